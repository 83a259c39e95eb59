#include "fhn/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fhn {

namespace {

constexpr int scan_intervals = 4096;
constexpr double duplicate_tolerance = 1e-8;
constexpr double alpha_scan_step = deg_to_rad(0.05);

double cubic_offset(const Parameters& p) { return p.a - p.a * p.a * p.a / 3.0; }

// Bisection down to adjacent doubles. Requires f(lo) and f(hi) of opposite sign.
template <class F>
double bisect(F&& f, double lo, double hi) {
    double flo = f(lo);
    if (flo == 0.0) return lo;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Roots of f on [lo, hi] via sign changes on a uniform grid.
template <class F>
std::vector<double> scan_roots(F&& f, double lo, double hi, int intervals) {
    std::vector<double> roots;
    const double step = (hi - lo) / intervals;
    double y_prev = lo;
    double f_prev = f(lo);
    if (f_prev == 0.0) roots.push_back(lo);
    for (int i = 1; i <= intervals; ++i) {
        const double y = i == intervals ? hi : lo + step * i;
        const double fy = f(y);
        if (fy == 0.0) {
            roots.push_back(y);
        } else if (f_prev != 0.0 && (fy < 0.0) != (f_prev < 0.0)) {
            roots.push_back(bisect(f, y_prev, y));
        }
        y_prev = y;
        f_prev = fy;
    }
    return roots;
}

bool near_any(double y, const std::vector<double>& ys) {
    return std::any_of(ys.begin(), ys.end(), [&](double v) { return std::abs(v - y) < duplicate_tolerance; });
}

double wrap_angle(double a) {
    a = std::fmod(a, two_pi);
    if (a < 0.0) a += two_pi;
    if (a >= two_pi) a = 0.0;
    return a;
}

double branch_target(HopfBranch branch, const Parameters& p) {
    const double base = p.a * p.a - 1.0;
    return branch == HopfBranch::in_phase ? base : -base;
}

} // namespace

std::string to_string(StabilityClass c) {
    switch (c) {
    case StabilityClass::stable_focus: return "stable-focus";
    case StabilityClass::stable_node: return "stable-node";
    case StabilityClass::saddle_focus: return "saddle-focus";
    case StabilityClass::saddle: return "saddle";
    case StabilityClass::unstable: return "unstable";
    case StabilityClass::marginal: return "marginal";
    }
    return "unknown";
}

std::string to_string(HopfBranch b) { return b == HopfBranch::in_phase ? "in-phase" : "anti-phase"; }

double itilde(double y, const Parameters& p) {
    return cubic_offset(p) + coupling_current(phase_angle(p.a, y), p);
}

double symmetric_equilibrium_y(const Parameters& p) {
    const double c = cubic_offset(p);
    if (p.g == 0.0) return c;
    // y - itilde(y) is negative at c and positive at c + g since 0 < I < g
    return bisect([&](double y) { return y - itilde(y, p); }, c, c + p.g);
}

StabilityClass classify_equilibrium(const Spectrum& spectrum) {
    bool any_pos = false, any_neg = false, any_complex = false;
    for (const auto& l : spectrum.values) {
        if (std::abs(l.real()) <= marginal_tolerance) return StabilityClass::marginal;
        (l.real() > 0.0 ? any_pos : any_neg) = true;
        if (l.imag() != 0.0) any_complex = true;
    }
    if (!any_pos) return any_complex ? StabilityClass::stable_focus : StabilityClass::stable_node;
    if (!any_neg) return StabilityClass::unstable;
    return any_complex ? StabilityClass::saddle_focus : StabilityClass::saddle;
}

std::vector<Equilibrium> find_equilibria(const Parameters& p) {
    p.validate();
    const double c = cubic_offset(p);
    std::vector<Equilibrium> out;

    auto make_symmetric = [&](double y0) {
        Equilibrium eq;
        eq.kind = EquilibriumKind::symmetric;
        eq.y = {y0};
        eq.states = {State{p.a, y0, p.a, y0}};
        eq.spectrum = symmetric_spectrum(y0, p);
        eq.stability = classify_equilibrium(eq.spectrum);
        return eq;
    };

    if (p.g == 0.0) {
        out.push_back(make_symmetric(c));
        return out;
    }

    const double lo = c - p.g;
    const double hi = c + 2.0 * p.g;
    const auto map = [&](double y) { return itilde(y, p); };

    const std::vector<double> fixed = scan_roots([&](double y) { return y - map(y); }, lo, hi, scan_intervals);
    for (double y0 : fixed) out.push_back(make_symmetric(y0));

    const std::vector<double> period2 =
        scan_roots([&](double y) { return y - map(map(y)); }, lo, hi, scan_intervals);
    std::vector<double> seen;
    for (double y1 : period2) {
        if (near_any(y1, fixed) || near_any(y1, seen)) continue;
        const double y2 = map(y1);
        if (std::abs(y2 - y1) < duplicate_tolerance) continue;
        seen.push_back(y1);
        seen.push_back(y2);
        Equilibrium eq;
        eq.kind = EquilibriumKind::asymmetric_pair;
        eq.y = {y1, y2};
        const State o1{p.a, y1, p.a, y2};
        eq.states = {o1, swap(o1)};
        eq.spectrum = eigen_spectrum(jacobian(o1, p));
        eq.stability = classify_equilibrium(eq.spectrum);
        out.push_back(eq);
    }
    return out;
}

double hopf_residual(HopfBranch branch, const Parameters& p) {
    const double y0 = symmetric_equilibrium_y(p);
    return coupling_partials(p.a, y0, p).dx - branch_target(branch, p);
}

double crossing_pair_real(HopfBranch branch, const Parameters& p) {
    const SymmetricModes m = symmetric_modes(symmetric_equilibrium_y(p), p);
    const auto& pair = branch == HopfBranch::in_phase ? m.in_phase : m.anti_phase;
    return std::max(pair[0].real(), pair[1].real());
}

std::vector<HopfCurvePoint> hopf_curve(HopfBranch branch, std::span<const double> delta_grid, const Parameters& p) {
    std::vector<HopfCurvePoint> out;
    const int n_alpha = static_cast<int>(std::lround(two_pi / alpha_scan_step));
    for (double delta : delta_grid) {
        if (!(delta > 0.0 && delta < two_pi)) throw std::invalid_argument("hopf_curve: delta outside (0, 2pi)");
        Parameters q = p;
        q.delta = delta;
        auto residual = [&](double alpha) {
            q.alpha = wrap_angle(alpha);
            return hopf_residual(branch, q);
        };

        std::vector<double> values(n_alpha);
        for (int j = 0; j < n_alpha; ++j) values[j] = residual(j * alpha_scan_step);

        for (int j = 0; j < n_alpha; ++j) {
            const double a0 = j * alpha_scan_step;
            const double a1 = (j + 1) * alpha_scan_step;
            const double f0 = values[j];
            const double f1 = values[(j + 1) % n_alpha];
            double root;
            if (f0 == 0.0) {
                root = a0;
            } else if (f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0)) {
                root = bisect(residual, a0, a1);
            } else {
                continue;
            }
            HopfCurvePoint pt;
            pt.alpha = wrap_angle(root);
            pt.delta = delta;
            pt.branch = branch;
            q.alpha = pt.alpha;
            pt.y0 = symmetric_equilibrium_y(q);
            // the pair must be complex at the crossing, and a(1 - a^2)/y0 < 1
            const CouplingPartials d = coupling_partials(q.a, pt.y0, q);
            const bool complex_pair = branch == HopfBranch::in_phase ? d.dy < 1.0 : d.dy > -1.0;
            if (!complex_pair || !(q.a * (1.0 - q.a * q.a) / pt.y0 < 1.0)) continue;
            out.push_back(pt);
        }
    }
    return out;
}

} // namespace fhn
