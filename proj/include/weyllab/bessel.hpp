#pragma once

// ============================================================
// Bessel J0/J1 and the bounded radial kernel factors.
//
// Power series below |x| = 12, Hankel asymptotic expansion
// beyond; both branches agree to ~1e-12 at the switch.  The
// series accumulates in long double because its terms peak
// near 4e3 at the switch point while the result is O(0.1).
//
// The kernel factors are the bounded pieces of the radial
// Fourier kernels once every power of r has been pulled into
// the integrand's weight: J0(z), sin(z)/z, J1(z)/z and
// (sin(z)/z - cos(z))/z^2, each with its removable limit at 0.
// ============================================================

#include <cmath>

namespace weyllab {
namespace detail {

inline double j0_series(double x) {
    long double q = static_cast<long double>(x) * x / 4.0L;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k <= 80; ++k) {
        term *= -q / (static_cast<long double>(k) * k);
        sum += term;
        if (std::abs(static_cast<double>(term)) < 1e-20) break;
    }
    return static_cast<double>(sum);
}

inline double j1_series(double x) {
    long double q = static_cast<long double>(x) * x / 4.0L;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k <= 80; ++k) {
        term *= -q / (static_cast<long double>(k) * (k + 1));
        sum += term;
        if (std::abs(static_cast<double>(term)) < 1e-20) break;
    }
    return static_cast<double>(sum) * x / 2.0;
}

// Hankel expansion J_nu(x) = sqrt(2/(pi x)) (P cos chi - Q sin chi),
// chi = x - (nu/2 + 1/4) pi, truncated at the smallest term.
inline double j_asymptotic(int nu, double x) {
    const double mu = 4.0 * nu * nu;
    const double d2 = 64.0 * x * x;
    auto odd2 = [](int i) { return static_cast<double>(2 * i - 1) * (2 * i - 1); };

    double p = 1.0, t = 1.0, tmag = 1.0;
    for (int k = 0; k < 20; ++k) {
        t *= -(mu - odd2(2 * k + 1)) * (mu - odd2(2 * k + 2)) /
             ((2.0 * k + 1) * (2.0 * k + 2) * d2);
        if (std::abs(t) >= tmag) break;
        p += t;
        tmag = std::abs(t);
        if (tmag < 1e-17) break;
    }

    double s = (mu - 1.0) / (8.0 * x);
    double qsum = s;
    double smag = std::abs(s);
    for (int k = 0; k < 20; ++k) {
        s *= -(mu - odd2(2 * k + 2)) * (mu - odd2(2 * k + 3)) /
             ((2.0 * k + 2) * (2.0 * k + 3) * d2);
        if (std::abs(s) >= smag) break;
        qsum += s;
        smag = std::abs(s);
        if (smag < 1e-17) break;
    }

    double chi = x - (0.5 * nu + 0.25) * M_PI;
    return std::sqrt(2.0 / (M_PI * x)) * (p * std::cos(chi) - qsum * std::sin(chi));
}

} // namespace detail

inline double bessel_j0(double x) {
    x = std::abs(x);
    return x <= 12.0 ? detail::j0_series(x) : detail::j_asymptotic(0, x);
}

// J1 is odd.
inline double bessel_j1(double x) {
    double ax = std::abs(x);
    double v = ax <= 12.0 ? detail::j1_series(ax) : detail::j_asymptotic(1, ax);
    return x < 0.0 ? -v : v;
}

// sin(z)/z with sinc(0) = 1.
inline double sinc_kernel(double z) {
    z = std::abs(z);
    if (z < 1e-4) {
        double z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sin(z) / z;
}

// J1(z)/z with limit 1/2.
inline double j1_over_z(double z) {
    z = std::abs(z);
    if (z < 1e-6) {
        double z2 = z * z;
        return 0.5 - z2 / 16.0;
    }
    return bessel_j1(z) / z;
}

// (sin(z)/z - cos(z))/z^2 with limit 1/3; the direct form loses all
// digits to cancellation below z ~ 1e-5, so a series takes over early.
inline double sphere32_kernel(double z) {
    z = std::abs(z);
    if (z < 0.1) {
        double z2 = z * z;
        return 1.0 / 3.0 - z2 / 30.0 + z2 * z2 / 840.0 - z2 * z2 * z2 / 45360.0;
    }
    return (std::sin(z) / z - std::cos(z)) / (z * z);
}

} // namespace weyllab
