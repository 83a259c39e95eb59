#pragma once

#include <span>
#include <string>
#include <vector>

#include "fhn/model.hpp"

namespace fhn {

enum class StabilityClass { stable_focus, stable_node, saddle_focus, saddle, unstable, marginal };

std::string to_string(StabilityClass c);

/// Real parts within this distance of zero are reported as marginal.
inline constexpr double marginal_tolerance = 1e-8;

enum class EquilibriumKind { symmetric, asymmetric_pair };

/**
 * An equilibrium of the ensemble. Every equilibrium has x1 = x2 = a.
 *
 * symmetric:        one state O(a, y0, a, y0); y = {y0}; spectrum in closed form.
 * asymmetric_pair:  states {O1, O2} with O2 = swap(O1); y = {y10, y20} where
 *                   y10 = Itilde(y20) and y20 = Itilde(y10). Both members share
 *                   one spectrum since the swap conjugates their Jacobians.
 */
struct Equilibrium {
    EquilibriumKind kind = EquilibriumKind::symmetric;
    std::vector<double> y;
    std::vector<State> states;
    Spectrum spectrum;
    StabilityClass stability = StabilityClass::stable_focus;
};

enum class HopfBranch {
    in_phase,   // Ix = a^2 - 1: the in-phase eigenvalue pair crosses the imaginary axis
    anti_phase, // Ix = 1 - a^2: the anti-phase pair crosses
};

std::string to_string(HopfBranch b);

struct HopfCurvePoint {
    double alpha = 0.0; // radians
    double delta = 0.0; // radians
    double y0 = 0.0;
    HopfBranch branch = HopfBranch::in_phase;
};

/// a - a^3/3 + I(phase_angle(a, y)): one-dimensional map whose fixed points and
/// period-2 points are the equilibria.
double itilde(double y, const Parameters& p);

/// y0 of the symmetric equilibrium by bisection of y - itilde(y) over (c, c + g),
/// c = a - a^3/3. When several fixed points exist this returns one of them.
double symmetric_equilibrium_y(const Parameters& p);

StabilityClass classify_equilibrium(const Spectrum& spectrum);
inline StabilityClass classify_equilibrium(const Equilibrium& eq) { return classify_equilibrium(eq.spectrum); }

/// All fixed points and period-2 orbits of itilde in [c - g, c + 2g].
std::vector<Equilibrium> find_equilibria(const Parameters& p);

/// Solutions (alpha, y0) of the Hopf system for each delta in the grid. Parameters
/// other than alpha and delta come from `p`.
std::vector<HopfCurvePoint> hopf_curve(HopfBranch branch, std::span<const double> delta_grid, const Parameters& p);

/// Ix at the symmetric equilibrium minus the branch target; zero on the Hopf curve.
double hopf_residual(HopfBranch branch, const Parameters& p);

/// Largest real part of the eigenvalue pair associated with a branch, at the
/// symmetric equilibrium.
double crossing_pair_real(HopfBranch branch, const Parameters& p);

} // namespace fhn
