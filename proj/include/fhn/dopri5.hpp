#pragma once

// Dormand-Prince 5(4) embedded pair with Hairer's fourth-order continuous extension.
// Generic over fixed-size state arrays so the same stepper drives both the bare
// flow and the flow augmented with tangent vectors.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include "fhn/errors.hpp"

namespace fhn::detail {

template <std::size_t N>
using Vec = std::array<double, N>;

namespace dp {
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
} // namespace dp

/// Dense-output coefficients of one accepted step on [t0, t0 + h].
template <std::size_t N>
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    std::array<Vec<N>, 5> r{};

    double t1() const noexcept { return t0 + h; }

    Vec<N> at(double t) const noexcept {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        Vec<N> y;
        for (std::size_t i = 0; i < N; ++i)
            y[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        return y;
    }

    double component_at(std::size_t i, double t) const noexcept {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        return r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
    }
};

struct StepControl {
    double rel_tol = 1e-9;
    double abs_tol = 1e-9;
    double max_step = 1e-2;
};

/// One trial step. Returns the scaled error norm; fills y1, k7 (= f(t0+h, y1)) and,
/// when requested, the dense coefficients.
template <std::size_t N, class Rhs>
double dopri_trial(Rhs& f, double t0, const Vec<N>& y0, const Vec<N>& k1, double h, const StepControl& ctl,
                   Vec<N>& y1, Vec<N>& k7, DenseStep<N>* dense) {
    using namespace dp;
    Vec<N> tmp, k2, k3, k4, k5, k6;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y0[i] + h * a21 * k1[i];
    f(t0 + c2 * h, tmp, k2);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y0[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t0 + c3 * h, tmp, k3);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y0[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t0 + c4 * h, tmp, k4);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y0[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t0 + c5 * h, tmp, k5);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y0[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(t0 + h, tmp, k6);
    for (std::size_t i = 0; i < N; ++i)
        y1[i] = y0[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    f(t0 + h, y1, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / static_cast<double>(N));

    if (dense != nullptr) {
        dense->t0 = t0;
        dense->h = h;
        for (std::size_t i = 0; i < N; ++i) {
            const double dy = y1[i] - y0[i];
            const double bspl = h * k1[i] - dy;
            dense->r[0][i] = y0[i];
            dense->r[1][i] = dy;
            dense->r[2][i] = bspl;
            dense->r[3][i] = dy - h * k7[i] - bspl;
            dense->r[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
    }
    return err;
}

/// Adaptive driver from t0 to t_end. `h` carries the step size between calls (0 picks
/// an initial guess). `on_step(const DenseStep<N>&, const Vec<N>& y1)` is called for
/// every accepted step and returns false to stop early. Returns the final time reached.
template <std::size_t N, class Rhs, class OnStep>
double dopri_drive(Rhs&& f, Vec<N>& y, double t0, double t_end, const StepControl& ctl, double& h,
                   OnStep&& on_step) {
    constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0, beta = 0.04, expo = 0.2 - beta * 0.75;
    double t = t0;
    if (!(t_end > t0)) return t0;
    Vec<N> k1, y1, k7;
    f(t, y, k1);
    if (h <= 0.0) {
        double scale = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = ctl.abs_tol + ctl.rel_tol * std::abs(y[i]);
            scale = std::max(scale, std::abs(k1[i]) / sc);
        }
        h = scale > 0.0 ? 0.01 * std::pow(1.0 / scale, 0.2) : ctl.max_step;
    }
    h = std::min(h, ctl.max_step);

    DenseStep<N> dense;
    double err_old = 1e-4;
    bool last_rejected = false;
    while (t < t_end) {
        const double min_step = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        if (h < min_step) throw IntegrationError("step size underflow", t);
        bool final_step = false;
        double step = h;
        if (t + step >= t_end) {
            step = t_end - t;
            final_step = true;
        }
        const double err = dopri_trial<N>(f, t, y, k1, step, ctl, y1, k7, &dense);
        if (!std::isfinite(err)) {
            // retry smaller; persistent blow-up ends in step underflow
            h = step * fac_min;
            last_rejected = true;
            continue;
        }
        if (err <= 1.0) {
            for (std::size_t i = 0; i < N; ++i)
                if (!std::isfinite(y1[i])) throw DivergenceError("non-finite state", t);
            double fac = std::pow(err, expo) * std::pow(err_old, -beta) / safety;
            fac = std::clamp(fac, 1.0 / fac_max, 1.0 / fac_min);
            double h_new = step / fac;
            if (last_rejected) h_new = std::min(h_new, step);
            err_old = std::max(err, 1e-4);
            t = final_step ? t_end : t + step;
            dense.h = t - dense.t0;
            y = y1;
            k1 = k7;
            last_rejected = false;
            // keep the unclipped step when the horizon forced a short final step
            h = std::min(final_step ? std::max(h, h_new) : h_new, ctl.max_step);
            if (!on_step(static_cast<const DenseStep<N>&>(dense), static_cast<const Vec<N>&>(y))) break;
        } else {
            const double fac = std::min(1.0 / fac_min, std::pow(err, 0.2) / safety);
            h = step / fac;
            last_rejected = true;
        }
    }
    return t;
}

} // namespace fhn::detail
