#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "fhn/model.hpp"

namespace fhn::test {

// Distance of phi from the nearest sector edge, measured on the circle.
inline double edge_distance(double phi, const Parameters& p) {
    auto circ = [](double a, double b) {
        double d = std::fmod(std::abs(a - b), two_pi);
        return std::min(d, two_pi - d);
    };
    return std::min(circ(phi, p.alpha), circ(phi, p.beta()));
}

// Random state whose two phases both sit at least `margin` radians from the sector edges.
inline State random_state_away_from_edges(std::mt19937_64& gen, const Parameters& p, double margin) {
    std::uniform_real_distribution<double> r(0.2, 2.5), ang(0.0, two_pi);
    for (;;) {
        const double r1 = r(gen), r2 = r(gen), a1 = ang(gen), a2 = ang(gen);
        if (edge_distance(a1, p) < margin || edge_distance(a2, p) < margin) continue;
        return {r1 * std::cos(a1), r1 * std::sin(a1), r2 * std::cos(a2), r2 * std::sin(a2)};
    }
}

// Ridders' extrapolation of central differences, starting from step h and shrinking
// it by 1.4 per stage; returns the estimate with the smallest error.
template <class F>
double ridders(F f, double x, double h) {
    constexpr int ntab = 12;
    constexpr double con = 1.4, con2 = con * con;
    std::array<std::array<double, ntab>, ntab> a{};
    a[0][0] = (f(x + h) - f(x - h)) / (2.0 * h);
    double best = a[0][0];
    double err = std::numeric_limits<double>::max();
    for (int i = 1; i < ntab; ++i) {
        h /= con;
        a[0][i] = (f(x + h) - f(x - h)) / (2.0 * h);
        double fac = con2;
        for (int j = 1; j <= i; ++j) {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= con2;
            const double e = std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
            if (e <= err) {
                err = e;
                best = a[j][i];
            }
        }
        if (std::abs(a[i][i] - a[i - 1][i - 1]) >= 2.0 * err) break;
    }
    return best;
}

inline Matrix4 finite_difference_jacobian(const State& s, const Parameters& p) {
    Matrix4 j;
    const auto base = s.to_array();
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 4; ++r) {
            auto component = [&](double v) {
                auto moved = base;
                moved[c] = v;
                return vector_field(State::from_array(moved), p).to_array()[r];
            };
            j(r, c) = ridders(component, base[c], 0.01);
        }
    return j;
}

// Largest distance between eigenvalues after pairing each with its nearest unused partner.
inline double spectrum_distance(const Spectrum& a, const Spectrum& b) {
    std::array<bool, 4> used{};
    double worst = 0.0;
    for (const auto& l : a.values) {
        std::size_t best = 0;
        double d = std::numeric_limits<double>::max();
        for (std::size_t k = 0; k < 4; ++k)
            if (!used[k] && std::abs(l - b.values[k]) < d) {
                d = std::abs(l - b.values[k]);
                best = k;
            }
        used[best] = true;
        worst = std::max(worst, d);
    }
    return worst;
}

// Entrywise relative error with an absolute floor for entries that vanish.
inline double max_relative_error(const Matrix4& got, const Matrix4& want) {
    const double scale = want.cwiseAbs().maxCoeff();
    double worst = 0.0;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            const double denom = std::max(std::abs(want(r, c)), 1e-6 * scale);
            worst = std::max(worst, std::abs(got(r, c) - want(r, c)) / denom);
        }
    return worst;
}

} // namespace fhn::test
