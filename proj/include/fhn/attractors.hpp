#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fhn/integrator.hpp"
#include "fhn/model.hpp"

namespace fhn {

struct SpikeTrain {
    std::array<std::vector<double>, 2> times; // element 1, element 2
};

struct SpikeSettings {
    double threshold = 1.0;  // upward crossing of x_i
    double refractory = 0.2; // same-element spikes closer than this are merged
};

/// Upward threshold crossings of x1 and x2, located on the dense output.
SpikeTrain detect_spikes(const Trajectory& traj, const SpikeSettings& settings = {});

/**
 * Symbolic label of an attractor.
 *
 * Sequential words are sequences over {1, 2} grouped into bursts: a burst starts at
 * a spike whose preceding inter-spike gap is longer than its following gap (the
 * leading element) and runs up to the next such spike. The canonical word is the
 * lexicographically smallest rotation that starts at a burst boundary, so L12 and
 * L21 stay distinct while rotations of the same orbit compare equal.
 */
class RegimeLabel {
public:
    enum class Tag { quiescent, in_phase, anti_phase, sequential, chaotic, unclassified };

    RegimeLabel() = default;
    static RegimeLabel quiescent() { return RegimeLabel(Tag::quiescent); }
    static RegimeLabel in_phase() { return RegimeLabel(Tag::in_phase); }
    static RegimeLabel anti_phase() { return RegimeLabel(Tag::anti_phase); }
    static RegimeLabel chaotic() { return RegimeLabel(Tag::chaotic); }
    static RegimeLabel unclassified() { return RegimeLabel(Tag::unclassified); }
    /// Canonicalises the burst sequence. Throws std::invalid_argument unless the
    /// bursts are non-empty strings over {1, 2} that together use both symbols.
    static RegimeLabel sequential(std::vector<std::string> bursts);

    Tag tag() const noexcept { return tag_; }
    const std::string& word() const noexcept { return word_; }
    const std::vector<std::string>& bursts() const noexcept { return bursts_; }

    /// Label of the swap-conjugate attractor (symbols 1 and 2 exchanged).
    RegimeLabel swapped() const;

    /// "Quiescent", "InPhase", "AntiPhase", "Sequential(1221)", "Chaotic", "Unclassified".
    std::string to_string() const;

    friend bool operator==(const RegimeLabel& l, const RegimeLabel& r) {
        return l.tag_ == r.tag_ && l.word_ == r.word_;
    }
    friend bool operator<(const RegimeLabel& l, const RegimeLabel& r) { return l.to_string() < r.to_string(); }

private:
    explicit RegimeLabel(Tag t) : tag_(t) {}
    Tag tag_ = Tag::unclassified;
    std::string word_;
    std::vector<std::string> bursts_;
};

struct ClassifierSettings {
    SpikeSettings spikes;
    double sync_fraction = 0.05;       // in-phase pairing window, fraction of mean period
    double anti_phase_fraction = 0.10; // allowed deviation of the offset from T/2
    double timing_tolerance = 1e-4;    // periodicity of inter-spike gaps, fraction of mean gap
    double chaos_threshold = 0.005;    // largest Lyapunov exponent
    std::size_t max_word = 64;
    std::size_t min_spikes = 10;       // per element, within the analysed half of the window
    double lyapunov_time = 2000.0;
    IntegratorSettings integrator;     // used for the Lyapunov estimate
};

/// Classifies the attractor sampled by a post-transient trajectory. Only the second
/// half of the window is analysed. Throws InsufficientDataError when an element fires
/// fewer than min_spikes times there while activity persists.
RegimeLabel classify_regime(const Trajectory& traj, const Parameters& p, const ClassifierSettings& settings = {});

enum class CycleSymmetry { self_symmetric, asymmetric_pair };

std::string to_string(CycleSymmetry s);

struct CycleRecord {
    double period = 0.0;
    std::size_t section_period = 1;             // returns to the section per period
    State fixed_point;                          // on y2 = 0 with y2 increasing
    std::vector<State> section_points;          // the section_period returns
    std::array<std::complex<double>, 4> multipliers{}; // eigenvalues of the monodromy matrix
    std::size_t trivial_index = 0;              // multiplier of the flow direction (near 1)
    std::array<double, 4> log_moduli{};         // log|multiplier| from QR-renormalised tangent flow
    double trace_integral = 0.0;                // integral of trace(J) over one period
    CycleSymmetry symmetry = CycleSymmetry::self_symmetric;

    /// Largest modulus among the non-trivial multipliers.
    double max_nontrivial_modulus() const;
};

struct CycleSettings {
    IntegratorSettings integrator;   // t_transient is skipped first
    double max_time = 20000.0;       // search budget after the transient
    double tolerance = 1e-8;         // agreement of repeated section points
    std::size_t max_period = 64;
    double symmetry_tolerance = 1e-6;
};

/// Throws NotPeriodicError when no repeating section pattern appears within budget.
CycleRecord find_limit_cycle(const State& seed, const Parameters& p, const CycleSettings& settings = {});

/// Benettin estimate with renormalisation every time unit over max(cfg.t_observe, 2000)
/// time units after cfg.t_transient.
double largest_lyapunov(const State& seed, const Parameters& p, const IntegratorSettings& cfg);

struct PdScanSettings {
    IntegratorSettings integrator;  // t_transient used only for the cold start
    std::size_t discard = 128;      // section returns skipped at each alpha
    std::size_t keep = 256;         // section returns recorded at each alpha
    double cluster_tolerance = 1e-4;
    std::size_t refine_levels = 0;  // extra passes splitting grid intervals where the cluster count changes
    std::size_t refine_factor = 10;
    double min_spacing = deg_to_rad(1e-5);
    std::size_t chaos_clusters = 16; // above this a point counts as chaotic when deciding where to refine
};

struct PdScanPoint {
    double alpha = 0.0; // radians
    int branch = 0;     // 0: seeded from `seed`, 1: seeded from swap(seed)
    bool ok = true;
    std::string error;
    std::vector<double> x1; // x1 at returns to y2 = 0, y2 increasing
};

/// Attractor-following scan over alpha for fixed delta. Each branch warm-starts from
/// the final state at the previous alpha. Points are ordered by alpha, then branch.
/// Refinement inserts refine_factor - 1 points into each interval whose neighbours
/// differ in cluster count or branch overlap, repeated refine_levels times.
std::vector<PdScanPoint> period_doubling_scan(double delta, double alpha_lo, double alpha_hi, std::size_t n_points,
                                              const Parameters& p, const State& seed,
                                              const PdScanSettings& settings = {});

/// Number of groups after sorting, splitting where neighbours differ by more than tol.
std::size_t cluster_count(std::vector<double> values, double tol);

/// True when the ranges of the two value sets intersect (widened by tol).
bool value_sets_overlap(const std::vector<double>& a, const std::vector<double>& b, double tol);

struct CascadeSummary {
    std::vector<double> alphas;          // radians, ascending, branch 0
    std::vector<std::size_t> clusters;   // branch 0 cluster counts
    std::vector<bool> overlap;           // branch 0 and branch 1 value sets overlap
    std::vector<std::size_t> route;      // distinct cluster counts in order of appearance, up to chaos
    bool monotone_before_chaos = false;
    std::optional<double> chaos_onset;   // first alpha with more than chaos_clusters clusters
    std::optional<double> merge_alpha;   // alpha_0: branches become one chaotic attractor
};

CascadeSummary summarize_cascade(const std::vector<PdScanPoint>& scan, double cluster_tol,
                                 std::size_t chaos_clusters = 16);

} // namespace fhn
