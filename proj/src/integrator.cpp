#include "fhn/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fhn/errors.hpp"

namespace fhn {

using detail::DenseStep;
using detail::Vec;

namespace {

struct FlowRhs {
    const Parameters& p;
    void operator()(double, const Vec<4>& y, Vec<4>& dy) const {
        dy = vector_field(State::from_array(y), p).to_array();
    }
};

// State plus M tangent vectors stored contiguously after it.
template <std::size_t M>
struct TangentRhs {
    const Parameters& p;
    void operator()(double, const Vec<4 + 4 * M>& y, Vec<4 + 4 * M>& dy) const {
        const State s{y[0], y[1], y[2], y[3]};
        const auto f = vector_field(s, p).to_array();
        for (std::size_t i = 0; i < 4; ++i) dy[i] = f[i];
        const Matrix4 j = jacobian(s, p);
        for (std::size_t m = 0; m < M; ++m) {
            const std::size_t off = 4 + 4 * m;
            for (std::size_t r = 0; r < 4; ++r) {
                double acc = 0.0;
                for (std::size_t c = 0; c < 4; ++c) acc += j(r, c) * y[off + c];
                dy[off + r] = acc;
            }
        }
    }
};

State to_state(const Vec<4>& v) { return State::from_array(v); }

// Root of component idx of the dense interpolant minus level inside the step.
double dense_root(const DenseStep<4>& seg, std::size_t idx, double level) {
    double lo = seg.t0, hi = seg.t1();
    double flo = seg.component_at(idx, lo) - level;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = seg.component_at(idx, mid) - level;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

bool crosses(double before, double after, int direction) {
    const bool up = before < 0.0 && after >= 0.0;
    const bool down = before > 0.0 && after <= 0.0;
    if (direction > 0) return up;
    if (direction < 0) return down;
    return up || down;
}

} // namespace

void IntegratorSettings::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("invalid integrator settings: " + msg); };
    if (!(rel_tol > 0.0)) fail("rel_tol must be positive");
    if (!(abs_tol > 0.0)) fail("abs_tol must be positive");
    if (!(max_step > 0.0)) fail("max_step must be positive");
    if (!(t_transient >= 0.0)) fail("t_transient must be non-negative");
    if (!(t_observe >= 0.0)) fail("t_observe must be non-negative");
}

State Trajectory::at(double t) const {
    if (segments_.empty()) return states_.front();
    t = std::clamp(t, t_begin(), t_end());
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const Segment& seg) { return v < seg.t1(); });
    if (it == segments_.end()) --it;
    return to_state(it->at(t));
}

void Trajectory::push_sample(double t, const State& s) {
    times_.push_back(t);
    states_.push_back(s);
}

Trajectory integrate(const State& s0, const Parameters& p, const IntegratorSettings& cfg) {
    cfg.validate();
    if (!s0.is_finite()) throw std::invalid_argument("initial state must be finite");
    const auto ctl = cfg.step_control();
    Vec<4> y = s0.to_array();
    double h = 0.0;
    FlowRhs rhs{p};
    detail::dopri_drive<4>(rhs, y, 0.0, cfg.t_transient, ctl, h, [](const auto&, const auto&) { return true; });

    Trajectory traj(p);
    traj.push_sample(cfg.t_transient, to_state(y));
    detail::dopri_drive<4>(rhs, y, cfg.t_transient, cfg.t_transient + cfg.t_observe, ctl, h,
                           [&](const DenseStep<4>& seg, const Vec<4>& y1) {
                               traj.push_segment(seg);
                               traj.push_sample(seg.t1(), to_state(y1));
                               return true;
                           });
    return traj;
}

State advance(const State& s0, const Parameters& p, double duration, const IntegratorSettings& cfg) {
    cfg.validate();
    Vec<4> y = s0.to_array();
    double h = 0.0;
    detail::dopri_drive<4>(FlowRhs{p}, y, 0.0, duration, cfg.step_control(), h,
                           [](const auto&, const auto&) { return true; });
    return to_state(y);
}

std::vector<std::vector<Crossing>> section_crossings(const State& s0, const Parameters& p,
                                                     std::span<const SectionSpec> sections, std::size_t n,
                                                     const IntegratorSettings& cfg) {
    cfg.validate();
    if (n == 0) throw std::invalid_argument("section_crossings needs n >= 1");
    if (sections.empty()) throw std::invalid_argument("section_crossings needs at least one section");
    const auto ctl = cfg.step_control();
    FlowRhs rhs{p};
    Vec<4> y = s0.to_array();
    double h = 0.0;
    detail::dopri_drive<4>(rhs, y, 0.0, cfg.t_transient, ctl, h, [](const auto&, const auto&) { return true; });

    std::vector<std::vector<Crossing>> out(sections.size());
    for (auto& v : out) v.reserve(n);
    std::size_t complete = 0;
    auto on_step = [&](const DenseStep<4>& seg, const Vec<4>& y1) {
        for (std::size_t s = 0; s < sections.size(); ++s) {
            const SectionSpec& sec = sections[s];
            if (out[s].size() >= n) continue;
            const auto idx = static_cast<std::size_t>(sec.coordinate);
            const double before = seg.r[0][idx] - sec.level;
            const double after = y1[idx] - sec.level;
            if (!crosses(before, after, sec.direction)) continue;
            // a start that sits on the section would otherwise report itself
            if (seg.t0 == cfg.t_transient && std::abs(before) < 1e-9) continue;

            // Newton on the crossing time using single Runge-Kutta steps from the step start.
            const Vec<4> y0 = seg.r[0];
            Vec<4> k1, ys, k7;
            rhs(seg.t0, y0, k1);
            double ts = dense_root(seg, idx, sec.level);
            auto step_to = [&](double t) {
                if (t == seg.t0) {
                    ys = y0;
                } else {
                    detail::dopri_trial<4>(rhs, seg.t0, y0, k1, t - seg.t0, ctl, ys, k7, nullptr);
                }
            };
            step_to(ts);
            for (int it = 0; it < 8 && std::abs(ys[idx] - sec.level) > 1e-13; ++it) {
                Vec<4> f;
                rhs(ts, ys, f);
                if (f[idx] == 0.0) break;
                ts -= (ys[idx] - sec.level) / f[idx];
                step_to(ts);
            }
            Crossing c;
            c.t = ts;
            c.state = to_state(ys);
            c.direction = after > before ? +1 : -1;
            out[s].push_back(c);
            if (out[s].size() == n) ++complete;
        }
        return complete < sections.size();
    };
    detail::dopri_drive<4>(rhs, y, cfg.t_transient, cfg.t_transient + cfg.t_observe, ctl, h, on_step);
    if (complete < sections.size()) {
        std::size_t fewest = n;
        for (const auto& v : out) fewest = std::min(fewest, v.size());
        throw SectionTimeout("found " + std::to_string(fewest) + " of " + std::to_string(n) +
                                 " section crossings within the time budget",
                             fewest);
    }
    return out;
}

std::vector<Crossing> section_crossings(const State& s0, const Parameters& p, const SectionSpec& sec, std::size_t n,
                                        const IntegratorSettings& cfg) {
    return std::move(section_crossings(s0, p, std::span<const SectionSpec>(&sec, 1), n, cfg).front());
}

namespace {

template <std::size_t M>
TangentResult tangent_impl(const State& s0, std::span<const Vec4> basis, const Parameters& p,
                           const IntegratorSettings& cfg, double renorm_interval, bool record) {
    constexpr std::size_t N = 4 + 4 * M;
    const auto ctl = cfg.step_control();
    Vec<4> ys = s0.to_array();
    double h = 0.0;
    detail::dopri_drive<4>(FlowRhs{p}, ys, 0.0, cfg.t_transient, ctl, h,
                           [](const auto&, const auto&) { return true; });

    Vec<N> y{};
    for (std::size_t i = 0; i < 4; ++i) y[i] = ys[i];
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t i = 0; i < 4; ++i) y[4 + 4 * m + i] = basis[m][i];

    TangentResult res;
    res.trajectory = Trajectory(p);
    res.log_norms.assign(M, 0.0);
    if (record) res.trajectory.push_sample(cfg.t_transient, to_state(ys));

    double trace_integral = 0.0;
    auto on_step = [&](const DenseStep<N>& seg, const Vec<N>& y1) {
        const auto mid = seg.at(seg.t0 + 0.5 * seg.h);
        auto tr = [&](const Vec<N>& v) { return trace_jacobian(State{v[0], v[1], v[2], v[3]}, p); };
        trace_integral += seg.h * (tr(seg.r[0]) + 4.0 * tr(mid) + tr(y1)) / 6.0;
        if (record) {
            Trajectory::Segment s4;
            s4.t0 = seg.t0;
            s4.h = seg.h;
            for (std::size_t r = 0; r < 5; ++r)
                for (std::size_t i = 0; i < 4; ++i) s4.r[r][i] = seg.r[r][i];
            res.trajectory.push_segment(s4);
            res.trajectory.push_sample(seg.t1(), State{y1[0], y1[1], y1[2], y1[3]});
        }
        return true;
    };

    TangentRhs<M> rhs{p};
    const double t_start = cfg.t_transient;
    const double t_stop = cfg.t_transient + cfg.t_observe;
    double t = t_start;
    h = 0.0; // tangent components change the error scale
    while (t < t_stop) {
        const double t_next = renorm_interval > 0.0 ? std::min(t + renorm_interval, t_stop) : t_stop;
        t = detail::dopri_drive<N>(rhs, y, t, t_next, ctl, h, on_step);
        if (renorm_interval > 0.0) {
            // modified Gram-Schmidt
            for (std::size_t m = 0; m < M; ++m) {
                double* v = &y[4 + 4 * m];
                for (std::size_t q = 0; q < m; ++q) {
                    const double* u = &y[4 + 4 * q];
                    double dot = 0.0;
                    for (std::size_t i = 0; i < 4; ++i) dot += v[i] * u[i];
                    for (std::size_t i = 0; i < 4; ++i) v[i] -= dot * u[i];
                }
                double norm = 0.0;
                for (std::size_t i = 0; i < 4; ++i) norm += v[i] * v[i];
                norm = std::sqrt(norm);
                if (!(norm > 0.0) || !std::isfinite(norm)) throw DivergenceError("tangent basis degenerated", t);
                res.log_norms[m] += std::log(norm);
                for (std::size_t i = 0; i < 4; ++i) v[i] /= norm;
            }
        }
    }

    res.basis.resize(M);
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t i = 0; i < 4; ++i) res.basis[m][i] = y[4 + 4 * m + i];
    res.tangent_time = t_stop - t_start;
    res.mean_trace = res.tangent_time > 0.0 ? trace_integral / res.tangent_time : 0.0;
    if (!record) res.trajectory.push_sample(t_stop, State{y[0], y[1], y[2], y[3]});
    return res;
}

} // namespace

TangentResult integrate_with_tangent(const State& s0, std::span<const Vec4> basis, const Parameters& p,
                                     const IntegratorSettings& cfg, double renorm_interval, bool record) {
    cfg.validate();
    if (!(renorm_interval >= 0.0)) throw std::invalid_argument("renorm_interval must be non-negative");
    switch (basis.size()) {
    case 1: return tangent_impl<1>(s0, basis, p, cfg, renorm_interval, record);
    case 2: return tangent_impl<2>(s0, basis, p, cfg, renorm_interval, record);
    case 3: return tangent_impl<3>(s0, basis, p, cfg, renorm_interval, record);
    case 4: return tangent_impl<4>(s0, basis, p, cfg, renorm_interval, record);
    default: throw std::invalid_argument("tangent basis must hold 1 to 4 vectors");
    }
}

Matrix4 monodromy(const State& s0, const Parameters& p, double duration, const IntegratorSettings& cfg) {
    IntegratorSettings c = cfg;
    c.t_transient = 0.0;
    c.t_observe = duration;
    const std::array<Vec4, 4> identity{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
    const TangentResult r = integrate_with_tangent(s0, identity, p, c, 0.0, false);
    Matrix4 m;
    for (std::size_t col = 0; col < 4; ++col)
        for (std::size_t row = 0; row < 4; ++row) m(row, col) = r.basis[col][row];
    return m;
}

} // namespace fhn
