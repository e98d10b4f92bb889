#pragma once

// Confluent divided differences of a scalar function g with one or two
// derivatives.  Evaluators supply value(u), slope(u), curvature(u);
// nodes closer than 1e-8 * scale are merged and the derivative
// formulas used, so coefficients stay finite through coincidences.

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace weyllab {

namespace detail {

inline double dd_merge_tolerance(double scale) { return 1e-8 * std::max(1.0, scale); }

inline void dd_require_nonnegative(double u) {
    if (u < 0.0)
        throw std::invalid_argument("divided_difference: nodes must be nonnegative");
}

}  // namespace detail

template <typename G>
double divided_difference(const G& g, double a) {
    detail::dd_require_nonnegative(a);
    return g.value(a);
}

template <typename G>
double divided_difference(const G& g, double a, double b) {
    detail::dd_require_nonnegative(a);
    detail::dd_require_nonnegative(b);
    const double tol = detail::dd_merge_tolerance(std::max(std::fabs(a), std::fabs(b)));
    if (std::fabs(a - b) <= tol) return g.slope(0.5 * (a + b));
    return (g.value(a) - g.value(b)) / (a - b);
}

template <typename G>
double divided_difference(const G& g, double a, double b, double c) {
    detail::dd_require_nonnegative(a);
    detail::dd_require_nonnegative(b);
    detail::dd_require_nonnegative(c);
    double x0 = a, x1 = b, x2 = c;
    if (x0 > x1) std::swap(x0, x1);
    if (x1 > x2) std::swap(x1, x2);
    if (x0 > x1) std::swap(x0, x1);
    const double tol = detail::dd_merge_tolerance(std::fabs(x2));
    if (x2 - x0 <= tol) return 0.5 * g.curvature((x0 + x1 + x2) / 3.0);
    // widest denominator: inner pairs may still merge inside the
    // first differences
    return (divided_difference(g, x1, x2) - divided_difference(g, x0, x1)) / (x2 - x0);
}

}  // namespace weyllab
