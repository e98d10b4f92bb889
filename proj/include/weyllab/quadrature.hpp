#pragma once

// ============================================================
// Gauss-Legendre panels and a graded integrator for radial
// integrands with a power singularity at the origin.
//
// power_weighted_integral handles
//
//     integral over (0, R] of  r^alpha * factor(r) dr
//
// with alpha > -1 and factor bounded (slowly varying factors
// such as logs are fine).  The substitution u = r^beta with
// beta = clamp(alpha+1, grading_floor, 1) flattens the origin
// power; whatever cusp the grading floor leaves behind is
// absorbed by panels that shrink geometrically toward u = 0.
// Oscillatory factors are resolved by capping the panel width
// so each panel sees at most nodes/nodes_per_period periods of
// the supplied frequency.
// ============================================================

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace weyllab {

struct GaussRule {
    std::vector<double> nodes;   // on (-1, 1), ascending
    std::vector<double> weights; // positive, sum 2
};

// Nodes by Newton iteration on the Legendre recurrence.  The
// returned reference stays valid for the process lifetime.
inline const GaussRule& gauss_rule(int npts) {
    if (npts < 1 || npts > 256)
        throw std::invalid_argument("gauss_rule: order out of range");
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(npts);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(static_cast<size_t>(npts));
    rule.weights.resize(static_cast<size_t>(npts));
    int n = npts;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        // one clean-up step so the weight uses the converged x
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        size_t lo = static_cast<size_t>(i);
        size_t hi = static_cast<size_t>(n - 1 - i);
        rule.nodes[hi] = x;
        rule.nodes[lo] = -x;
        rule.weights[hi] = w;
        rule.weights[lo] = w;
    }
    if (n % 2 == 1) rule.nodes[static_cast<size_t>(n / 2)] = 0.0;
    auto [pos, inserted] = cache.emplace(npts, std::move(rule));
    (void)inserted;
    return pos->second;
}

template <typename F>
double gauss_panel(F&& f, double a, double b, const GaussRule& rule) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

template <typename F>
double gauss_composite(F&& f, double a, double b, int panels, int npts) {
    const GaussRule& rule = gauss_rule(npts);
    double acc = 0.0, h = (b - a) / panels;
    for (int i = 0; i < panels; ++i)
        acc += gauss_panel(f, a + i * h, a + (i + 1) * h, rule);
    return acc;
}

struct QuadratureSpec {
    int nodes = 16;               // Gauss points per panel
    double grading_floor = 0.25;  // lower bound on the substitution power
    double rel_tolerance = 1e-9;  // gate on the refinement estimate
    double abs_tolerance = 1e-12;
    double nodes_per_period = 10.0;

    void validate() const {
        if (nodes < 2 || nodes > 128)
            throw std::invalid_argument("quadrature: nodes out of range");
        if (!(grading_floor > 0.0) || grading_floor > 1.0)
            throw std::invalid_argument("quadrature: grading floor outside (0,1]");
        if (!(rel_tolerance > 0.0) || !(abs_tolerance > 0.0))
            throw std::invalid_argument("quadrature: tolerances must be positive");
        if (nodes_per_period < 2.0)
            throw std::invalid_argument("quadrature: need >= 2 nodes per period");
    }
};

// Raised when the refinement estimate misses the requested tolerance.
class accuracy_error : public std::runtime_error {
public:
    accuracy_error(const std::string& what, double estimate)
        : std::runtime_error(what), estimate_(estimate) {}
    double estimate() const { return estimate_; }

private:
    double estimate_;
};

struct QuadResult {
    double value = 0.0;
    double err_estimate = 0.0;
    int panels = 0;
    int evals = 0;
};

namespace detail {

// Panel ladder in u-space: march down from U, each panel no wider
// than half its right endpoint (geometric grading) and no wider
// than the oscillation cap.  Interpolation knots are inserted as
// plain boundaries; analytic joints (where an exp(-1/s)-type piece
// begins, including the support endpoint U) additionally get a
// geometric cascade of boundaries on both sides, because Gauss
// accuracy next to such a joint is set by the distance to it.
inline std::vector<double> graded_panel_boundaries(double U, double beta, double q,
                                                   double osc_freq,
                                                   const std::vector<double>& knots_u,
                                                   const std::vector<double>& joints_u,
                                                   const QuadratureSpec& spec) {
    std::vector<double> bounds;
    bounds.push_back(U);
    // depth at which the remaining (0,b] contributes below 1e-14 relatively
    double depth = std::ceil(47.0 / std::max(q + 1.0, 0.18));
    double cutoff = U * std::ldexp(1.0, -static_cast<int>(std::min(depth, 260.0)));
    double b = U;
    size_t guard = 0;
    while (b > cutoff) {
        if (++guard > 100000) throw std::logic_error("panel ladder failed to terminate");
        double w = 0.5 * b;
        if (osc_freq > 0.0) {
            // period of cos(osc_freq * r) mapped through r = u^(1/beta),
            // smallest inside the panel at its right end
            double period_u = 2.0 * M_PI * beta * std::pow(b, (beta - 1.0) / beta) / osc_freq;
            double cap = (spec.nodes / spec.nodes_per_period) * period_u;
            w = std::min(w, cap);
        }
        b -= w;
        bounds.push_back(std::max(b, 0.0));
    }
    bounds.push_back(0.0);
    for (double br : knots_u)
        if (br > cutoff && br < U) bounds.push_back(br);

    std::vector<double> anchors = joints_u;
    anchors.push_back(0.0);
    anchors.push_back(U);
    std::sort(anchors.begin(), anchors.end());
    for (size_t i = 0; i < anchors.size(); ++i) {
        double j = anchors[i];
        if (j <= cutoff) continue;
        if (j < U) bounds.push_back(j);
        double left = i > 0 ? 0.5 * (j - anchors[i - 1]) : 0.0;
        double right = i + 1 < anchors.size() ? 0.5 * (anchors[i + 1] - j) : 0.0;
        for (int k = 0; k <= 12; ++k) {
            double step = std::ldexp(1.0, -k);
            if (left > 0.0 && j - left * step > cutoff) bounds.push_back(j - left * step);
            if (right > 0.0) bounds.push_back(j + right * step);
        }
    }

    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end(),
                             [](double a, double c) { return !(std::abs(a - c) > 0.0); }),
                 bounds.end());
    while (!bounds.empty() && bounds.back() > U) bounds.pop_back();
    return bounds;
}

} // namespace detail

// Integral over (0, R] of r^alpha * factor(r) dr.  osc_freq sizes
// panels for factors oscillating like cos(osc_freq * r); pass 0 for
// non-oscillatory factors.  knot_radii lists interior radii where
// the factor merely changes polynomial piece (interpolation knots:
// boundary alignment is enough); joint_radii lists radii where an
// analytic piece ends (bump transition joints: these also get
// cascaded refinement, as does the endpoint R itself).
template <typename F>
QuadResult power_weighted_integral(double alpha, double R, double osc_freq, F&& factor,
                                   const QuadratureSpec& spec,
                                   const std::vector<double>& knot_radii = {},
                                   const std::vector<double>& joint_radii = {}) {
    spec.validate();
    if (!(alpha > -1.0)) throw std::invalid_argument("power_weighted_integral: alpha <= -1");
    if (!(R > 0.0)) throw std::invalid_argument("power_weighted_integral: empty range");

    double beta = std::clamp(alpha + 1.0, spec.grading_floor, 1.0);
    double q = (alpha + 1.0) / beta - 1.0;
    double U = std::pow(R, beta);

    std::vector<double> knots_u, joints_u;
    for (double br : knot_radii)
        if (br > 0.0 && br < R) knots_u.push_back(std::pow(br, beta));
    for (double br : joint_radii)
        if (br > 0.0 && br < R) joints_u.push_back(std::pow(br, beta));

    std::vector<double> bounds =
        detail::graded_panel_boundaries(U, beta, q, osc_freq, knots_u, joints_u, spec);

    const double inv_beta = 1.0 / beta;
    auto integrand_u = [&](double u) {
        double r = std::pow(u, inv_beta);
        return std::pow(u, q) * inv_beta * factor(r);
    };

    const GaussRule& coarse = gauss_rule(spec.nodes);
    QuadResult out;
    double value = 0.0, err = 0.0;
    for (size_t i = 0; i + 1 < bounds.size(); ++i) {
        double lo = bounds[i], hi = bounds[i + 1];
        if (!(hi > lo)) continue;
        double mid = 0.5 * (lo + hi);
        double one = gauss_panel(integrand_u, lo, hi, coarse);
        double two = gauss_panel(integrand_u, lo, mid, coarse) +
                     gauss_panel(integrand_u, mid, hi, coarse);
        value += two;
        err += std::abs(two - one);
        out.panels += 1;
        out.evals += 3 * spec.nodes;
    }
    out.value = value;
    out.err_estimate = err;
    if (err > std::max(spec.rel_tolerance * std::abs(value), spec.abs_tolerance))
        throw accuracy_error("power_weighted_integral: refinement estimate " +
                                 std::to_string(err) + " above tolerance",
                             err);
    return out;
}

} // namespace weyllab
