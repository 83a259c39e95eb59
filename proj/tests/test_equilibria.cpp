#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fhn/equilibria.hpp"
#include "support.hpp"

using namespace fhn;

namespace {

// Plain fixed-point iteration of the one-dimensional map; it contracts for the
// default constants because |d itilde / dy| < 1.
double iterate_fixed_point(const Parameters& p) {
    double y = p.a - p.a * p.a * p.a / 3.0;
    for (int i = 0; i < 10000; ++i) {
        const double next = itilde(y, p);
        if (std::abs(next - y) < 1e-15) return next;
        y = next;
    }
    return y;
}

double max_abs(const StateDerivative& d) {
    return std::max({std::abs(d.dx1), std::abs(d.dy1), std::abs(d.dx2), std::abs(d.dy2)});
}

} // namespace

TEST_CASE("symmetric equilibrium solves the vector field") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> alpha(0.0, 360.0), delta(5.0, 90.0);
    for (int i = 0; i < 30; ++i) {
        const Parameters p = Parameters::from_degrees(alpha(gen), delta(gen));
        const double y0 = symmetric_equilibrium_y(p);
        CHECK(max_abs(vector_field(State{p.a, y0, p.a, y0}, p)) < 1e-10);
        CHECK(y0 == doctest::Approx(iterate_fixed_point(p)).epsilon(1e-12));
    }
}

TEST_CASE("uncoupled pair has the bare equilibrium") {
    Parameters p = Parameters::from_degrees(100.0, 20.0);
    p.g = 0.0;
    const auto eqs = find_equilibria(p);
    REQUIRE(eqs.size() == 1);
    CHECK(eqs[0].y[0] == doctest::Approx(p.a - p.a * p.a * p.a / 3.0));
    CHECK(eqs[0].stability == StabilityClass::stable_focus);
}

TEST_CASE("find_equilibria reports the symmetric equilibrium with its spectrum") {
    for (double alpha : {100.0, 157.0, 200.0, 210.0, 213.648}) {
        const Parameters p = Parameters::from_degrees(alpha, alpha == 213.648 ? 15.0 : 50.0);
        const auto eqs = find_equilibria(p);
        REQUIRE(!eqs.empty());
        bool found_symmetric = false;
        for (const auto& eq : eqs) {
            for (const auto& s : eq.states) CHECK(max_abs(vector_field(s, p)) < 1e-10);
            if (eq.kind == EquilibriumKind::symmetric) {
                found_symmetric = true;
                CHECK(eq.y[0] == doctest::Approx(symmetric_equilibrium_y(p)).epsilon(1e-12));
                const Spectrum generic = eigen_spectrum(jacobian(eq.states[0], p));
                CHECK(test::spectrum_distance(eq.spectrum, generic) < 1e-9);
            }
        }
        CHECK(found_symmetric);
    }
}

TEST_CASE("stability classes from synthetic spectra") {
    using c = std::complex<double>;
    CHECK(classify_equilibrium(Spectrum::sorted({c(-1, 2), c(-1, -2), c(-3, 0), c(-4, 0)})) == StabilityClass::stable_focus);
    CHECK(classify_equilibrium(Spectrum::sorted({c(-1, 0), c(-2, 0), c(-3, 0), c(-4, 0)})) == StabilityClass::stable_node);
    CHECK(classify_equilibrium(Spectrum::sorted({c(1, 2), c(1, -2), c(-3, 0), c(-4, 0)})) == StabilityClass::saddle_focus);
    CHECK(classify_equilibrium(Spectrum::sorted({c(1, 0), c(-2, 0), c(-3, 0), c(-4, 0)})) == StabilityClass::saddle);
    CHECK(classify_equilibrium(Spectrum::sorted({c(1, 0), c(2, 0), c(3, 1), c(3, -1)})) == StabilityClass::unstable);
    CHECK(classify_equilibrium(Spectrum::sorted({c(0, 2), c(0, -2), c(-3, 0), c(-4, 0)})) == StabilityClass::marginal);
    CHECK(to_string(StabilityClass::saddle_focus) == "saddle-focus");
}

TEST_CASE("hopf curve points are eigenvalue crossings") {
    std::vector<double> deltas;
    for (int i = 0; i < 10; ++i) deltas.push_back(deg_to_rad(10.0 + 8.0 * i));
    for (HopfBranch branch : {HopfBranch::in_phase, HopfBranch::anti_phase}) {
        const auto pts = hopf_curve(branch, deltas, Parameters{});
        CHECK(pts.size() >= 10);
        for (const auto& pt : pts) {
            Parameters q;
            q.alpha = pt.alpha;
            q.delta = pt.delta;
            CHECK(std::abs(crossing_pair_real(branch, q)) < 1e-6);
            // generic eigensolver sees the same purely imaginary pair
            const Spectrum s = eigen_spectrum(jacobian(State{q.a, pt.y0, q.a, pt.y0}, q));
            double nearest = 1e9;
            for (const auto& l : s.values)
                if (std::abs(l.imag()) > 1e-3) nearest = std::min(nearest, std::abs(l.real()));
            CHECK(nearest < 1e-6);

            Parameters lo = q, hi = q;
            lo.alpha = std::fmod(q.alpha - deg_to_rad(0.5) + two_pi, two_pi);
            hi.alpha = std::fmod(q.alpha + deg_to_rad(0.5), two_pi);
            CHECK(crossing_pair_real(branch, lo) * crossing_pair_real(branch, hi) < 0.0);
        }
    }
}

TEST_CASE("hopf curve at the cited sector width") {
    const std::vector<double> delta{deg_to_rad(50.0)};
    const auto in = hopf_curve(HopfBranch::in_phase, delta, Parameters{});
    const auto anti = hopf_curve(HopfBranch::anti_phase, delta, Parameters{});
    REQUIRE(in.size() == 2);
    REQUIRE(anti.size() == 2);
    // regression values; the crossing sits between the L12 point (157) and the 1221 point (158)
    CHECK(rad_to_deg(anti[0].alpha) == doctest::Approx(157.99).epsilon(1e-4));
    CHECK(rad_to_deg(in[0].alpha) == doctest::Approx(204.02).epsilon(1e-4));
    CHECK_THROWS_AS(hopf_curve(HopfBranch::in_phase, std::vector<double>{0.0}, Parameters{}), std::invalid_argument);
}
