#include "fhn/attractors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fhn/errors.hpp"

namespace fhn {

namespace {

double upward_root(const Trajectory::Segment& seg, std::size_t idx, double level) {
    double lo = seg.t0, hi = seg.t1();
    for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (seg.component_at(idx, mid) < level) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double mean_gap(const std::vector<double>& t) {
    if (t.size() < 2) return 0.0;
    return (t.back() - t.front()) / static_cast<double>(t.size() - 1);
}

struct Spike {
    double t;
    char who; // '1' or '2'
};

std::vector<Spike> merge_trains(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<Spike> out;
    out.reserve(a.size() + b.size());
    for (double t : a) out.push_back({t, '1'});
    for (double t : b) out.push_back({t, '2'});
    std::stable_sort(out.begin(), out.end(), [](const Spike& l, const Spike& r) { return l.t < r.t; });
    return out;
}

// Smallest m with s[i] == s[i + m] throughout and at least three full repetitions.
template <class Same>
std::optional<std::size_t> minimal_period(std::size_t n, std::size_t max_m, std::size_t step, Same&& same) {
    for (std::size_t m = step; m <= max_m && 3 * m <= n; m += step) {
        bool ok = true;
        for (std::size_t i = 0; i + m < n && ok; ++i) ok = same(i, i + m);
        if (ok) return m;
    }
    return std::nullopt;
}

bool is_in_phase(const std::vector<double>& a, const std::vector<double>& b, double window) {
    if (a.size() > b.size() + 1 || b.size() > a.size() + 1) return false;
    for (double t : a) {
        auto it = std::lower_bound(b.begin(), b.end(), t - window);
        const bool paired = it != b.end() && std::abs(*it - t) <= window;
        // spikes near the window edges may lack a partner inside the window
        if (!paired && t - window > b.front() && t + window < b.back()) return false;
    }
    return true;
}

bool anti_phase_offsets(const std::vector<double>& a, const std::vector<double>& b, double tolerance) {
    const double period = mean_gap(a);
    const double half = 0.5 * period;
    std::size_t checked = 0;
    for (double t : a) {
        auto it = std::upper_bound(b.begin(), b.end(), t);
        if (it == b.end()) break;
        if (std::abs((*it - t) - half) > tolerance * half) return false;
        ++checked;
    }
    return checked > 0;
}

double state_distance(const State& l, const State& r) {
    return std::max({std::abs(l.x1 - r.x1), std::abs(l.y1 - r.y1), std::abs(l.x2 - r.x2), std::abs(l.y2 - r.y2)});
}

} // namespace

SpikeTrain detect_spikes(const Trajectory& traj, const SpikeSettings& settings) {
    SpikeTrain train;
    constexpr std::array<std::size_t, 2> coords{0, 2};
    for (const auto& seg : traj.segments()) {
        for (std::size_t e = 0; e < 2; ++e) {
            const std::size_t idx = coords[e];
            const double before = seg.r[0][idx];
            const double after = seg.r[0][idx] + seg.r[1][idx];
            if (!(before < settings.threshold && after >= settings.threshold)) continue;
            const double t = upward_root(seg, idx, settings.threshold);
            auto& times = train.times[e];
            if (!times.empty() && t - times.back() <= settings.refractory) continue;
            times.push_back(t);
        }
    }
    return train;
}

RegimeLabel RegimeLabel::sequential(std::vector<std::string> bursts) {
    if (bursts.empty()) throw std::invalid_argument("sequential label needs at least one burst");
    bool has1 = false, has2 = false;
    for (const auto& b : bursts) {
        if (b.empty()) throw std::invalid_argument("empty burst in sequential label");
        for (char c : b) {
            if (c == '1') has1 = true;
            else if (c == '2') has2 = true;
            else throw std::invalid_argument("sequential words use only the symbols 1 and 2");
        }
    }
    if (!has1 || !has2) throw std::invalid_argument("sequential word must contain both symbols");

    std::size_t best = 0;
    std::string best_word;
    for (std::size_t r = 0; r < bursts.size(); ++r) {
        std::string w;
        for (std::size_t i = 0; i < bursts.size(); ++i) w += bursts[(r + i) % bursts.size()];
        if (r == 0 || w < best_word) {
            best = r;
            best_word = w;
        }
    }
    std::rotate(bursts.begin(), bursts.begin() + static_cast<std::ptrdiff_t>(best), bursts.end());
    RegimeLabel label(Tag::sequential);
    label.word_ = std::move(best_word);
    label.bursts_ = std::move(bursts);
    return label;
}

RegimeLabel RegimeLabel::swapped() const {
    if (tag_ != Tag::sequential) return *this;
    std::vector<std::string> b = bursts_;
    for (auto& s : b)
        for (auto& c : s) c = c == '1' ? '2' : '1';
    return sequential(std::move(b));
}

std::string RegimeLabel::to_string() const {
    switch (tag_) {
    case Tag::quiescent: return "Quiescent";
    case Tag::in_phase: return "InPhase";
    case Tag::anti_phase: return "AntiPhase";
    case Tag::sequential: return "Sequential(" + word_ + ")";
    case Tag::chaotic: return "Chaotic";
    case Tag::unclassified: return "Unclassified";
    }
    return "Unclassified";
}

RegimeLabel classify_regime(const Trajectory& traj, const Parameters& p, const ClassifierSettings& settings) {
    if (traj.empty()) throw InsufficientDataError("empty trajectory");
    const SpikeTrain all = detect_spikes(traj, settings.spikes);
    const double t_mid = traj.t_begin() + 0.5 * (traj.t_end() - traj.t_begin());
    std::array<std::vector<double>, 2> trains;
    for (std::size_t e = 0; e < 2; ++e)
        std::copy_if(all.times[e].begin(), all.times[e].end(), std::back_inserter(trains[e]),
                     [&](double t) { return t >= t_mid; });

    // no spikes in the analysed half: activity has died out onto the equilibrium
    if (trains[0].empty() && trains[1].empty()) return RegimeLabel::quiescent();
    if (trains[0].size() < settings.min_spikes || trains[1].size() < settings.min_spikes)
        throw InsufficientDataError("fewer than " + std::to_string(settings.min_spikes) +
                                    " spikes per element in the analysed window");

    const double period = 0.5 * (mean_gap(trains[0]) + mean_gap(trains[1]));
    if (is_in_phase(trains[0], trains[1], settings.sync_fraction * period)) return RegimeLabel::in_phase();

    const std::vector<Spike> seq = merge_trains(trains[0], trains[1]);
    const std::size_t n = seq.size();
    std::vector<double> gaps(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) gaps[i] = seq[i + 1].t - seq[i].t;
    const double gap_scale = (seq.back().t - seq.front().t) / static_cast<double>(n - 1);

    const auto symbol_period = minimal_period(n, settings.max_word, 1, [&](std::size_t i, std::size_t j) {
        return seq[i].who == seq[j].who;
    });
    std::optional<std::size_t> timing_period;
    if (symbol_period) {
        const double tol = settings.timing_tolerance * gap_scale;
        timing_period = minimal_period(n - 1, settings.max_word, *symbol_period, [&](std::size_t i, std::size_t j) {
            return seq[i].who == seq[j].who && std::abs(gaps[i] - gaps[j]) <= tol;
        });
    }

    if (!timing_period) {
        IntegratorSettings cfg = settings.integrator;
        cfg.t_transient = 0.0;
        cfg.t_observe = settings.lyapunov_time;
        if (largest_lyapunov(traj.final_state(), p, cfg) > settings.chaos_threshold) return RegimeLabel::chaotic();
    }
    if (!symbol_period) return RegimeLabel::unclassified();

    const std::size_t m = *symbol_period;
    if (m == 2 && anti_phase_offsets(trains[0], trains[1], settings.anti_phase_fraction))
        return RegimeLabel::anti_phase();

    // One cycle of the word starting at index 1 so every position has a gap on both sides.
    if (n < m + 2) return RegimeLabel::unclassified();
    std::vector<bool> leader(m);
    std::string cycle(m, ' ');
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = 1 + j;
        cycle[j] = seq[i].who;
        leader[j] = gaps[i - 1] > gaps[i];
    }
    std::vector<std::string> bursts;
    const auto first = std::find(leader.begin(), leader.end(), true);
    if (first == leader.end()) {
        for (char c : cycle) bursts.emplace_back(1, c);
    } else {
        const std::size_t start = static_cast<std::size_t>(first - leader.begin());
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t j = (start + k) % m;
            if (leader[j] || bursts.empty()) bursts.emplace_back();
            bursts.back() += cycle[j];
        }
    }
    try {
        return RegimeLabel::sequential(std::move(bursts));
    } catch (const std::invalid_argument&) {
        return RegimeLabel::unclassified();
    }
}

std::string to_string(CycleSymmetry s) {
    return s == CycleSymmetry::self_symmetric ? "self-symmetric" : "asymmetric-pair";
}

double CycleRecord::max_nontrivial_modulus() const {
    double best = 0.0;
    for (std::size_t i = 0; i < multipliers.size(); ++i)
        if (i != trivial_index) best = std::max(best, std::abs(multipliers[i]));
    return best;
}

CycleRecord find_limit_cycle(const State& seed, const Parameters& p, const CycleSettings& settings) {
    const SectionSpec sec{Coordinate::y2, 0.0, +1};
    constexpr std::size_t chunk = 64;
    std::vector<double> times;
    std::vector<State> points;
    double offset = 0.0;
    double elapsed = 0.0;
    State current = seed;
    IntegratorSettings cfg = settings.integrator;

    std::optional<std::size_t> period;
    while (!period) {
        if (elapsed >= settings.max_time)
            throw NotPeriodicError("no periodic section pattern within the time budget");
        cfg.t_observe = settings.max_time - elapsed;
        std::vector<Crossing> batch;
        try {
            batch = section_crossings(current, p, sec, chunk, cfg);
        } catch (const SectionTimeout& e) {
            throw NotPeriodicError(std::string("section search ended: ") + e.what());
        }
        for (const auto& c : batch) {
            times.push_back(offset + c.t);
            points.push_back(c.state);
        }
        offset += batch.back().t;
        elapsed = offset;
        current = batch.back().state;
        cfg.t_transient = 0.0;

        // test the most recent returns for a repeating pattern
        const std::size_t n = points.size();
        for (std::size_t m = 1; m <= settings.max_period && 3 * m + 1 <= n; ++m) {
            bool ok = true;
            for (std::size_t i = n - 3 * m - 1; i + m < n && ok; ++i)
                ok = state_distance(points[i], points[i + m]) < settings.tolerance;
            if (ok) {
                period = m;
                break;
            }
        }
    }

    const std::size_t m = *period;
    const std::size_t n = points.size();
    CycleRecord rec;
    rec.section_period = m;
    rec.period = times[n - 1] - times[n - 1 - m];
    rec.fixed_point = points[n - 1];
    rec.section_points.assign(points.end() - static_cast<std::ptrdiff_t>(m), points.end());

    IntegratorSettings flow = settings.integrator;
    const Matrix4 mono = monodromy(rec.fixed_point, p, rec.period, flow);
    Eigen::EigenSolver<Matrix4> solver(mono, false);
    for (std::size_t i = 0; i < 4; ++i) rec.multipliers[i] = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
    std::sort(rec.multipliers.begin(), rec.multipliers.end(),
              [](const auto& l, const auto& r) { return std::abs(l) > std::abs(r); });
    rec.trivial_index = 0;
    for (std::size_t i = 1; i < 4; ++i)
        if (std::abs(rec.multipliers[i] - 1.0) < std::abs(rec.multipliers[rec.trivial_index] - 1.0))
            rec.trivial_index = i;

    // Moduli by QR-renormalised tangent flow: two periods to align the basis, then one measured.
    const std::array<Vec4, 4> identity{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
    flow.t_transient = 0.0;
    flow.t_observe = 2.0 * rec.period;
    // short spacing: the fast contraction is roughly 4/eps per time unit
    const double renorm = std::min(rec.period / 64.0, 0.01);
    const TangentResult warm = integrate_with_tangent(rec.fixed_point, identity, p, flow, renorm, false);
    flow.t_observe = rec.period;
    const TangentResult measured = integrate_with_tangent(rec.fixed_point, warm.basis, p, flow, renorm, false);
    for (std::size_t i = 0; i < 4; ++i) rec.log_moduli[i] = measured.log_norms[i];
    rec.trace_integral = measured.mean_trace * measured.tangent_time;

    // Self-symmetric orbits map their y1 = 0 returns onto their y2 = 0 returns under the swap.
    IntegratorSettings sym_cfg = settings.integrator;
    sym_cfg.t_transient = 0.0;
    sym_cfg.t_observe = 2.0 * rec.period;
    const auto mirror = section_crossings(rec.fixed_point, p, SectionSpec{Coordinate::y1, 0.0, +1}, m, sym_cfg);
    double worst = 0.0;
    for (const auto& c : mirror) {
        const State image = swap(c.state);
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& q : rec.section_points) nearest = std::min(nearest, state_distance(image, q));
        worst = std::max(worst, nearest);
    }
    rec.symmetry = worst < settings.symmetry_tolerance ? CycleSymmetry::self_symmetric : CycleSymmetry::asymmetric_pair;
    return rec;
}

double largest_lyapunov(const State& seed, const Parameters& p, const IntegratorSettings& cfg) {
    IntegratorSettings c = cfg;
    c.t_observe = std::max(cfg.t_observe, 2000.0);
    const std::array<Vec4, 1> basis{{{0.5, 0.5, 0.5, 0.5}}};
    const TangentResult r = integrate_with_tangent(seed, basis, p, c, 1.0, false);
    return r.log_norms[0] / r.tangent_time;
}

namespace {

struct ScanRow {
    std::array<PdScanPoint, 2> points;
    State state; // branch 0 state after this alpha; branch 1 is its swap image
    bool warm = false;
};

// Branch 1 starts from swap(seed), so by swap-equivariance its orbit is the swap image of
// branch 0: its returns to y2 = 0 are branch 0's returns to y1 = 0 with x1 read as x2.
// Both branches are therefore recorded from a single integration.
ScanRow scan_point(double alpha, const State& start, bool warm, const Parameters& base, const PdScanSettings& s) {
    ScanRow row;
    row.state = start;
    row.warm = warm;
    for (int b = 0; b < 2; ++b) {
        row.points[b].alpha = alpha;
        row.points[b].branch = b;
    }
    Parameters p = base;
    p.alpha = alpha;
    IntegratorSettings cfg = s.integrator;
    if (warm) cfg.t_transient = 0.0;
    // generous budget: 20 time units per requested return
    cfg.t_observe = 20.0 * static_cast<double>(s.discard + s.keep);
    const std::array<SectionSpec, 2> sections{SectionSpec{Coordinate::y2, 0.0, +1},
                                              SectionSpec{Coordinate::y1, 0.0, +1}};
    try {
        const auto crossings = section_crossings(start, p, sections, s.discard + s.keep, cfg);
        for (std::size_t i = s.discard; i < crossings[0].size(); ++i) {
            row.points[0].x1.push_back(crossings[0][i].state.x1);
            row.points[1].x1.push_back(crossings[1][i].state.x2);
        }
        // continue from whichever section was reached last so no dynamics are skipped
        row.state = crossings[0].back().t > crossings[1].back().t ? crossings[0].back().state
                                                                  : crossings[1].back().state;
        row.warm = true;
    } catch (const std::exception& e) {
        for (auto& pt : row.points) {
            pt.ok = false;
            pt.error = e.what();
        }
    }
    return row;
}

} // namespace

std::vector<PdScanPoint> period_doubling_scan(double delta, double alpha_lo, double alpha_hi, std::size_t n_points,
                                              const Parameters& p, const State& seed, const PdScanSettings& s) {
    if (n_points == 0) throw std::invalid_argument("period_doubling_scan needs at least one point");
    if (!(alpha_lo >= 0.0 && alpha_hi < two_pi && alpha_lo <= alpha_hi))
        throw std::invalid_argument("alpha range must lie within [0, 2pi)");
    if (s.refine_factor < 2) throw std::invalid_argument("refine_factor must be at least 2");
    Parameters base = p;
    base.delta = delta;
    base.alpha = alpha_lo;
    base.validate();

    std::vector<ScanRow> rows;
    rows.reserve(n_points);
    State state = seed;
    bool warm = false;
    for (std::size_t i = 0; i < n_points; ++i) {
        const double alpha = n_points == 1 ? alpha_lo
                                           : alpha_lo + (alpha_hi - alpha_lo) * static_cast<double>(i) /
                                                            static_cast<double>(n_points - 1);
        rows.push_back(scan_point(alpha, state, warm, base, s));
        state = rows.back().state;
        warm = rows.back().warm;
    }

    auto signature = [&](const ScanRow& r) {
        const auto& a = r.points[0];
        const auto& b = r.points[1];
        // counts inside a chaotic band fluctuate from point to point; treat them as one class
        const std::size_t ca = a.ok ? std::min(cluster_count(a.x1, s.cluster_tolerance), s.chaos_clusters + 1) : 0;
        const bool ov = a.ok && b.ok && value_sets_overlap(a.x1, b.x1, s.cluster_tolerance);
        return std::pair{ca, ov};
    };

    for (std::size_t level = 0; level < s.refine_levels; ++level) {
        std::vector<ScanRow> refined;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            refined.push_back(rows[i]);
            if (i + 1 == rows.size()) break;
            const double a0 = rows[i].points[0].alpha;
            const double a1 = rows[i + 1].points[0].alpha;
            const double spacing = (a1 - a0) / static_cast<double>(s.refine_factor);
            if (spacing < s.min_spacing || signature(rows[i]) == signature(rows[i + 1])) continue;
            State st = rows[i].state;
            bool w = rows[i].warm;
            for (std::size_t k = 1; k < s.refine_factor; ++k) {
                refined.push_back(scan_point(a0 + spacing * static_cast<double>(k), st, w, base, s));
                st = refined.back().state;
                w = refined.back().warm;
            }
        }
        rows = std::move(refined);
    }

    std::vector<PdScanPoint> out;
    out.reserve(2 * rows.size());
    for (auto& r : rows)
        for (auto& pt : r.points) out.push_back(std::move(pt));
    return out;
}

std::size_t cluster_count(std::vector<double> values, double tol) {
    if (values.empty()) return 0;
    std::sort(values.begin(), values.end());
    std::size_t clusters = 1;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] - values[i - 1] > tol) ++clusters;
    return clusters;
}

bool value_sets_overlap(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    if (a.empty() || b.empty()) return false;
    const auto [amin, amax] = std::minmax_element(a.begin(), a.end());
    const auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
    return *amin - tol <= *bmax && *bmin - tol <= *amax;
}

CascadeSummary summarize_cascade(const std::vector<PdScanPoint>& scan, double cluster_tol, std::size_t chaos_clusters) {
    CascadeSummary out;
    std::vector<const PdScanPoint*> a, b;
    for (const auto& pt : scan) (pt.branch == 0 ? a : b).push_back(&pt);
    const std::size_t n = std::min(a.size(), b.size());
    std::optional<std::size_t> chaos_index;
    for (std::size_t i = 0; i < n; ++i) {
        out.alphas.push_back(a[i]->alpha);
        const std::size_t c = a[i]->ok ? cluster_count(a[i]->x1, cluster_tol) : 0;
        out.clusters.push_back(c);
        out.overlap.push_back(a[i]->ok && b[i]->ok && value_sets_overlap(a[i]->x1, b[i]->x1, cluster_tol));
        if (!chaos_index && c > chaos_clusters) chaos_index = i;
    }
    const std::size_t end = chaos_index.value_or(n);
    out.monotone_before_chaos = true;
    std::size_t last = 0;
    for (std::size_t i = 0; i < end; ++i) {
        const std::size_t c = out.clusters[i];
        if (c == 0) continue;
        if (c < last) out.monotone_before_chaos = false;
        if (out.route.empty() || out.route.back() != c) out.route.push_back(c);
        last = std::max(last, c);
    }
    if (chaos_index) {
        out.chaos_onset = out.alphas[*chaos_index];
        for (std::size_t i = std::max<std::size_t>(*chaos_index, 1); i < n; ++i) {
            if (out.overlap[i] && out.clusters[i] > chaos_clusters && !out.overlap[i - 1]) {
                out.merge_alpha = out.alphas[i];
                break;
            }
        }
    }
    return out;
}

} // namespace fhn
