#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fhn/dopri5.hpp"
#include "fhn/model.hpp"

namespace fhn {

struct IntegratorSettings {
    double rel_tol = 1e-9;
    double abs_tol = 1e-9;
    double max_step = 1e-2;
    double t_transient = 300.0; // discarded
    double t_observe = 500.0;   // recorded (also the time budget for section searches)

    void validate() const;
    detail::StepControl step_control() const noexcept { return {rel_tol, abs_tol, max_step}; }
};

/// Post-transient samples at the integrator's accepted times, with dense output.
class Trajectory {
public:
    using Segment = detail::DenseStep<4>;

    Trajectory() = default;
    explicit Trajectory(const Parameters& p) : params_(p) {}

    const Parameters& params() const noexcept { return params_; }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<State>& states() const noexcept { return states_; }
    std::span<const Segment> segments() const noexcept { return segments_; }

    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }
    double t_begin() const noexcept { return times_.front(); }
    double t_end() const noexcept { return times_.back(); }
    const State& final_state() const noexcept { return states_.back(); }

    /// Dense interpolation; t is clamped to [t_begin, t_end].
    State at(double t) const;

    void push_sample(double t, const State& s);
    void push_segment(const Segment& seg) { segments_.push_back(seg); }

private:
    Parameters params_{};
    std::vector<double> times_;
    std::vector<State> states_;
    std::vector<Segment> segments_;
};

enum class Coordinate : std::size_t { x1 = 0, y1 = 1, x2 = 2, y2 = 3 };

struct SectionSpec {
    Coordinate coordinate = Coordinate::y2;
    double level = 0.0;
    int direction = +1; // +1 increasing, -1 decreasing, 0 both
};

struct Crossing {
    double t = 0.0;
    State state;
    int direction = 0;
};

/// Integrate over [0, t_transient + t_observe], recording only the observed part.
Trajectory integrate(const State& s0, const Parameters& p, const IntegratorSettings& cfg);

/// Flow map: the state after `duration` time units, nothing recorded.
State advance(const State& s0, const Parameters& p, double duration, const IntegratorSettings& cfg);

/// Skips t_transient, then returns the first n crossings within t_observe. Crossing
/// states are polished by Newton iteration on fresh Runge-Kutta steps so the section
/// equation holds to 1e-10. Times are measured from the start of the transient.
/// Throws SectionTimeout when fewer than n crossings occur.
std::vector<Crossing> section_crossings(const State& s0, const Parameters& p, const SectionSpec& sec, std::size_t n,
                                        const IntegratorSettings& cfg);

/// Several sections watched along one trajectory; result[i] holds the first n crossings
/// of sections[i]. Stops once every section has n crossings.
std::vector<std::vector<Crossing>> section_crossings(const State& s0, const Parameters& p,
                                                     std::span<const SectionSpec> sections, std::size_t n,
                                                     const IntegratorSettings& cfg);

using Vec4 = std::array<double, 4>;

struct TangentResult {
    Trajectory trajectory;
    std::vector<Vec4> basis;       // evolved (orthonormal when renormalised) tangent vectors
    std::vector<double> log_norms; // accumulated log stretch per vector
    double tangent_time = 0.0;     // time span covered by the tangent flow
    double mean_trace = 0.0;       // time average of trace(J) along the tangent span
};

/// Joint state + variational integration. The transient is integrated without tangent
/// vectors; the tangent flow covers t_observe. With renorm_interval > 0 the basis is
/// Gram-Schmidt orthonormalised at that spacing and log stretches accumulate
/// (Benettin); with renorm_interval == 0 the raw evolved vectors are returned, so an
/// identity basis yields the state-transition matrix columns.
TangentResult integrate_with_tangent(const State& s0, std::span<const Vec4> basis, const Parameters& p,
                                     const IntegratorSettings& cfg, double renorm_interval = 0.0,
                                     bool record = true);

/// Columns of the state-transition matrix over [0, duration] from s0.
Matrix4 monodromy(const State& s0, const Parameters& p, double duration, const IntegratorSettings& cfg);

} // namespace fhn
