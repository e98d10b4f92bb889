#pragma once

// Trigonometric kernels of the wave-trace calculus: the pair kernel
// m(tau,mu), the spectral symbol u -> cos(t sqrt(u)) with derivatives,
// and the identity check comparing the closed-form second divided
// difference against the nested double time integral it resolves.

#include <cmath>
#include <stdexcept>

#include "weyllab/bessel.hpp"
#include "weyllab/divided_difference.hpp"
#include "weyllab/quadrature.hpp"

namespace weyllab {

// ============================================================
// u -> cos(t sqrt(u)) with two derivatives; all confluent and
// small-argument limits continuous.
// ============================================================
class CosineSqrtSymbol {
public:
    explicit CosineSqrtSymbol(double t) : t_(t) {}

    double time() const { return t_; }

    double value(double u) const { return std::cos(t_ * std::sqrt(u)); }

    // d/du cos(t sqrt(u)) = -(t^2/2) sinc(t sqrt(u))
    double slope(double u) const { return -0.5 * t_ * t_ * sinc_kernel(t_ * std::sqrt(u)); }

    // d^2/du^2 cos(t sqrt(u)) = -(t/(4u)) [t cos(ts) - sin(ts)/s]
    double curvature(double u) const {
        const double s = std::sqrt(u);
        const double z = t_ * s;
        if (z < 0.05) {
            // series of the bracket: -t^3 s^2 (1/3 - z^2/30 + z^4/840)
            const double z2 = z * z;
            return 0.25 * t_ * t_ * t_ * t_ * (1.0 / 3.0 - z2 / 30.0 + z2 * z2 / 840.0);
        }
        return -(t_ / (4.0 * u)) * (t_ * std::cos(z) - std::sin(z) / s);
    }

private:
    double t_;
};

// ============================================================
// m(tau,mu) = (cos(t tau) - cos(t mu)) / (tau^2 - mu^2), the first
// divided difference of cos(t sqrt(u)) at tau^2, mu^2; confluent
// value -t sin(t tau)/(2 tau), continuous through tau = mu = 0.
// ============================================================
inline double trig_kernel(double t, double tau, double mu) {
    if (tau < 0.0 || mu < 0.0)
        throw std::invalid_argument("trig_kernel: tau and mu must be nonnegative");
    const double d = tau * tau - mu * mu;
    const double tol = detail::dd_merge_tolerance(std::max(tau * tau, mu * mu));
    if (std::fabs(d) <= tol) {
        const double m = 0.5 * (tau + mu);
        return -0.5 * t * t * sinc_kernel(t * m);
    }
    return (std::cos(t * tau) - std::cos(t * mu)) / d;
}

namespace detail {

// int_0^s sin((s-r) a2)/a2 * cos(r a3) dr by composite Gauss; the
// sin(x)/a factor is written as (s-r) sinc((s-r) a2) so a2 = 0 is
// continuous.
inline double duhamel_inner(double s, double a2, double a3, const GaussRule& rule, int panels) {
    double acc = 0.0;
    const double h = s / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h, half = 0.5 * h;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double r = mid + half * rule.nodes[q];
            acc += half * rule.weights[q] * (s - r) * sinc_kernel((s - r) * a2) *
                   std::cos(r * a3);
        }
    }
    return acc;
}

}  // namespace detail

// ============================================================
// Residual of the two-step time-domain identity: the nested integral
//   int_0^t sin((t-s)a1)/a1 int_0^s sin((s-r)a2)/a2 cos(r a3) dr ds
// equals the second divided difference of cos(t sqrt(u)) at
// a1^2, a2^2, a3^2.  Returns |closed form - nested quadrature|.
// ============================================================
inline double double_duhamel_identity_check(double t, double a1, double a2, double a3) {
    if (t < 0.0 || a1 < 0.0 || a2 < 0.0 || a3 < 0.0)
        throw std::invalid_argument("double_duhamel_identity_check: arguments must be nonnegative");
    const double closed =
        divided_difference(CosineSqrtSymbol(t), a1 * a1, a2 * a2, a3 * a3);
    if (t == 0.0) return std::fabs(closed);

    const double amax = std::max({a1, a2, a3, 1.0});
    const int panels = std::max(8, static_cast<int>(std::ceil(t * amax / 4.0)));
    const GaussRule& rule = gauss_rule(16);
    double outer = 0.0;
    const double h = t / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h, half = 0.5 * h;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double s = mid + half * rule.nodes[q];
            outer += half * rule.weights[q] * (t - s) * sinc_kernel((t - s) * a1) *
                     detail::duhamel_inner(s, a2, a3, rule, panels);
        }
    }
    return std::fabs(closed - outer);
}

}  // namespace weyllab
