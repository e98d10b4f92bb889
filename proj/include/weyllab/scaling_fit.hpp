#pragma once

// Least-squares power-law fit.  A sequence of (lambda, value) samples
// is reduced to |value| ~ prefactor * lambda^slope by regressing
// log|value| on log(lambda).  Samples with zero or nonfinite value
// carry no information about the exponent; they are dropped and each
// drop is recorded as a notice rather than silently swallowed.

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace weyllab {

struct ScalingFit {
    // Samples that survived the window and the drop rules, in input order.
    std::vector<std::pair<double, double>> used;
    // One human-readable line per dropped sample, plus a mixed-sign
    // warning when the fitted values do not share a sign.
    std::vector<std::string> notices;
    double slope = 0.0;
    double intercept = 0.0;   // log(prefactor)
    double prefactor = 0.0;   // exp(intercept), magnitude of the leading constant
    double residual_rms = 0.0;  // RMS of log-scale residuals over used samples
    // +1 if every fitted value is positive, -1 if every one is negative,
    // 0 when signs are mixed (the fit then describes |value| only).
    int sign = 0;
    double window_lo = 0.0;
    double window_hi = 0.0;
};

// Fit |value| ~ c * lambda^s over samples whose lambda lies in
// [window_lo, window_hi].  Requires at least four usable samples;
// fewer cannot distinguish a power law from generic smooth data.
inline ScalingFit fit_exponent(
    const std::vector<std::pair<double, double>>& points,
    double window_lo = 0.0,
    double window_hi = std::numeric_limits<double>::infinity()) {
    if (!(window_lo < window_hi))
        throw std::invalid_argument("fit_exponent: window must satisfy lo < hi");

    ScalingFit fit;
    fit.window_lo = window_lo;
    fit.window_hi = window_hi;

    bool any_pos = false, any_neg = false;
    for (const auto& [lam, val] : points) {
        if (!(lam > 0.0)) {
            std::ostringstream os;
            os << "dropped (lambda=" << lam << "): lambda must be positive";
            fit.notices.push_back(os.str());
            continue;
        }
        if (!(lam >= window_lo && lam <= window_hi)) continue;
        if (!(std::isfinite(val)) || val == 0.0) {
            std::ostringstream os;
            os << "dropped (lambda=" << lam << ", value=" << val
               << "): zero or nonfinite value";
            fit.notices.push_back(os.str());
            continue;
        }
        (val > 0.0 ? any_pos : any_neg) = true;
        fit.used.emplace_back(lam, val);
    }

    if (fit.used.size() < 4)
        throw std::invalid_argument(
            "fit_exponent: need at least 4 usable samples in the window");

    fit.sign = any_pos && any_neg ? 0 : (any_pos ? 1 : -1);
    if (fit.sign == 0)
        fit.notices.push_back(
            "mixed signs among fitted values; slope describes |value| only");

    // Centered normal equations: subtracting the means first keeps the
    // 2x2 system well conditioned even for narrow windows.
    const std::size_t m = fit.used.size();
    std::vector<double> lx(m), ly(m);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        lx[i] = std::log(fit.used[i].first);
        ly[i] = std::log(std::abs(fit.used[i].second));
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0))
        throw std::invalid_argument(
            "fit_exponent: samples share a single lambda; exponent is undetermined");

    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.prefactor = std::exp(fit.intercept);

    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        rss += r * r;
    }
    fit.residual_rms = std::sqrt(rss / static_cast<double>(m));
    return fit;
}

}  // namespace weyllab
