#include "fhn/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fhn/errors.hpp"

namespace fhn {

namespace {

// exp arguments beyond this saturate the sigmoid at double precision
constexpr double exp_clamp = 500.0;

// below this, 1 + exp(arg) == 1 in double precision
constexpr double exp_negligible = -40.0;

double clamped_exp(double arg) {
    if (arg < exp_negligible) return 0.0;
    return std::exp(std::min(arg, exp_clamp));
}

// Shift phi by a multiple of 2pi so it lands closest to the sector centre. The
// window is symmetric and unimodal about its centre, so this copy maximises it.
double nearest_copy(double phi, const Parameters& p) {
    const double centre = p.alpha + 0.5 * p.delta;
    double best = phi;
    for (double shifted : {phi + two_pi, phi - two_pi}) {
        if (std::abs(shifted - centre) < std::abs(best - centre)) best = shifted;
    }
    return best;
}

struct Window {
    double lower;  // exp(k(alpha - phi))
    double upper;  // exp(k(phi - beta))
    double denom;
};

Window window_terms(double phi, const Parameters& p) {
    const double q = nearest_copy(phi, p);
    Window w;
    w.lower = clamped_exp(p.k * (p.alpha - q));
    w.upper = clamped_exp(p.k * (q - p.beta()));
    w.denom = 1.0 + w.lower + w.upper;
    return w;
}

} // namespace

void Parameters::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("invalid parameters: " + msg); };
    if (!std::isfinite(a)) fail("a must be finite");
    if (!(eps > 0.0) || !std::isfinite(eps)) fail("eps must be positive");
    if (!(k > 0.0) || !std::isfinite(k)) fail("k must be positive");
    if (!(g >= 0.0) || !std::isfinite(g)) fail("g must be non-negative");
    if (!(alpha >= 0.0 && alpha < two_pi)) fail("alpha must lie in [0, 2pi)");
    if (!(delta > 0.0 && delta < two_pi)) fail("delta must lie in (0, 2pi)");
}

Parameters Parameters::from_degrees(double alpha_deg, double delta_deg) {
    Parameters p;
    double wrapped = std::fmod(alpha_deg, 360.0);
    if (wrapped < 0.0) wrapped += 360.0;
    p.alpha = deg_to_rad(wrapped);
    // fmod may round up to exactly 2pi for tiny negative inputs
    if (p.alpha >= two_pi) p.alpha = 0.0;
    p.delta = deg_to_rad(delta_deg);
    return p;
}

double State::operator[](std::size_t i) const noexcept {
    switch (i) {
    case 0: return x1;
    case 1: return y1;
    case 2: return x2;
    default: return y2;
    }
}

bool State::is_finite() const noexcept {
    return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2);
}

Spectrum Spectrum::sorted(std::array<std::complex<double>, 4> v) {
    std::sort(v.begin(), v.end(), [](const auto& l, const auto& r) {
        if (l.real() != r.real()) return l.real() > r.real();
        return l.imag() > r.imag();
    });
    return Spectrum{v};
}

double phase_angle(double x, double y) {
    if (x == 0.0 && y == 0.0) throw DomainError("phase angle undefined at the origin");
    double phi = std::atan2(y, x);
    if (phi < 0.0) phi += two_pi;
    // atan2 of a tiny negative y rounds to exactly 2pi after the shift
    if (phi >= two_pi) phi = 0.0;
    return phi;
}

double coupling_current(double phi, const Parameters& p) {
    const Window w = window_terms(phi, p);
    return p.g / w.denom;
}

double coupling_slope(double phi, const Parameters& p) {
    const Window w = window_terms(phi, p);
    return p.g * p.k * (w.lower - w.upper) / (w.denom * w.denom);
}

CouplingPartials coupling_partials(double x, double y, const Parameters& p) {
    const double phi = phase_angle(x, y);
    const double slope = coupling_slope(phi, p);
    const double r2 = x * x + y * y;
    // dphi/dx = -y / r^2, dphi/dy = x / r^2
    return {-slope * y / r2, slope * x / r2};
}

StateDerivative vector_field(const State& s, const Parameters& p) {
    const double drive1 = coupling_current(phase_angle(s.x2, s.y2), p);
    const double drive2 = coupling_current(phase_angle(s.x1, s.y1), p);
    return {
        (s.x1 - s.x1 * s.x1 * s.x1 / 3.0 - s.y1 + drive1) / p.eps,
        s.x1 - p.a,
        (s.x2 - s.x2 * s.x2 * s.x2 / 3.0 - s.y2 + drive2) / p.eps,
        s.x2 - p.a,
    };
}

Matrix4 jacobian(const State& s, const Parameters& p) {
    const CouplingPartials from2 = coupling_partials(s.x2, s.y2, p);
    const CouplingPartials from1 = coupling_partials(s.x1, s.y1, p);
    const double inv_eps = 1.0 / p.eps;
    Matrix4 j;
    j << (1.0 - s.x1 * s.x1) * inv_eps, -inv_eps, from2.dx * inv_eps, from2.dy * inv_eps,
        1.0, 0.0, 0.0, 0.0,
        from1.dx * inv_eps, from1.dy * inv_eps, (1.0 - s.x2 * s.x2) * inv_eps, -inv_eps,
        0.0, 0.0, 1.0, 0.0;
    return j;
}

SymmetricModes symmetric_modes(double y0, const Parameters& p) {
    const CouplingPartials d = coupling_partials(p.a, y0, p);
    const double base = 1.0 - p.a * p.a;
    // Roots of eps*l^2 - l*(base +/- Ix) + (1 -/+ Iy) = 0
    auto roots = [&](double trace, double det) {
        const std::complex<double> disc = std::sqrt(std::complex<double>(trace * trace - 4.0 * p.eps * det));
        return std::array<std::complex<double>, 2>{(trace + disc) / (2.0 * p.eps), (trace - disc) / (2.0 * p.eps)};
    };
    return {roots(base + d.dx, 1.0 - d.dy), roots(base - d.dx, 1.0 + d.dy)};
}

Spectrum symmetric_spectrum(double y0, const Parameters& p) {
    const SymmetricModes m = symmetric_modes(y0, p);
    return Spectrum::sorted({m.in_phase[0], m.in_phase[1], m.anti_phase[0], m.anti_phase[1]});
}

Spectrum eigen_spectrum(const Matrix4& m) {
    Eigen::EigenSolver<Matrix4> solver(m, false);
    const auto& ev = solver.eigenvalues();
    return Spectrum::sorted({ev[0], ev[1], ev[2], ev[3]});
}

} // namespace fhn
