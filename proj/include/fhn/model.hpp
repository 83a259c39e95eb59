#pragma once

#include <array>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace fhn {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

/**
 * Model constants and coupling sector of the two-element ensemble
 *
 *   eps x_i' = x_i - x_i^3/3 - y_i + I(phi_j)
 *       y_i' = x_i - a
 *
 * with I(phi) = g / (1 + exp(k(alpha - phi)) + exp(k(phi - beta))), beta = alpha + delta.
 * Angles are radians; phi_j is the polar angle of element j in its (x, y) plane.
 */
struct Parameters {
    double a = -1.01;   // excitability; |a| > 1 is the excitable regime
    double eps = 0.01;  // time-scale separation
    double k = 50.0;    // sigmoid steepness per radian
    double g = 0.1;     // coupling strength
    double alpha = 0.0; // sector start, [0, 2pi)
    double delta = deg_to_rad(50.0); // sector width, (0, 2pi)

    double beta() const noexcept { return alpha + delta; }

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;

    static Parameters from_degrees(double alpha_deg, double delta_deg);
};

/// Phase point (x1, y1, x2, y2).
struct State {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;

    std::array<double, 4> to_array() const noexcept { return {x1, y1, x2, y2}; }
    static State from_array(const std::array<double, 4>& v) noexcept { return {v[0], v[1], v[2], v[3]}; }

    double operator[](std::size_t i) const noexcept;
    bool is_finite() const noexcept;

    friend bool operator==(const State&, const State&) = default;
};

struct StateDerivative {
    double dx1 = 0.0;
    double dy1 = 0.0;
    double dx2 = 0.0;
    double dy2 = 0.0;

    std::array<double, 4> to_array() const noexcept { return {dx1, dy1, dx2, dy2}; }
};

/// Rows and columns ordered (x1, y1, x2, y2).
using Matrix4 = Eigen::Matrix4d;

/// Four eigenvalues sorted by descending real part, then descending imaginary part.
struct Spectrum {
    std::array<std::complex<double>, 4> values{};

    static Spectrum sorted(std::array<std::complex<double>, 4> v);
    double max_real() const noexcept { return values[0].real(); }
};

/// Eigenvalue pairs at a symmetric equilibrium, split by the two quadratic factors
/// of the characteristic polynomial. The in-phase pair has eigenvectors on the plane
/// x1 = x2, y1 = y2; the anti-phase pair is transverse to it.
struct SymmetricModes {
    std::array<std::complex<double>, 2> in_phase;
    std::array<std::complex<double>, 2> anti_phase;
};

struct CouplingPartials {
    double dx = 0.0;
    double dy = 0.0;
};

/// Polar angle of (x, y) in [0, 2pi). Throws DomainError at the origin.
double phase_angle(double x, double y);

/// Wrap-aware coupling current: the sector window evaluated at the copy of phi
/// (phi, phi + 2pi, phi - 2pi) nearest the sector centre. Assumes k*delta >> 1 and
/// k*(2pi - delta) >> 1 so at most one copy contributes.
double coupling_current(double phi, const Parameters& p);

/// dI/dphi at the same wrap-aware copy used by coupling_current.
double coupling_slope(double phi, const Parameters& p);

/// Partial derivatives of I(phase_angle(x, y)) with respect to x and y.
CouplingPartials coupling_partials(double x, double y, const Parameters& p);

StateDerivative vector_field(const State& s, const Parameters& p);
Matrix4 jacobian(const State& s, const Parameters& p);

constexpr State swap(const State& s) noexcept { return {s.x2, s.y2, s.x1, s.y1}; }

/// Closed-form eigenvalues at the symmetric equilibrium O(a, y0, a, y0).
SymmetricModes symmetric_modes(double y0, const Parameters& p);
Spectrum symmetric_spectrum(double y0, const Parameters& p);

/// Generic eigensolver on a 4x4 matrix.
Spectrum eigen_spectrum(const Matrix4& m);

inline double trace_jacobian(const State& s, const Parameters& p) noexcept {
    return ((1.0 - s.x1 * s.x1) + (1.0 - s.x2 * s.x2)) / p.eps;
}

} // namespace fhn
