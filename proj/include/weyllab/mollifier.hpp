#pragma once

// Smoothed spectral counting weight h = 1_[-lambda,lambda] * kappa_w,
// where kappa is the inverse cosine transform of an even plateau bump
// phi and kappa_w(s) = kappa(s/w)/w with window width w = lambda^{1-eta-eps}.
//
// One z-grid tabulation of kappa and its antiderivative serves every
// tau and every derivative order; no per-tau oscillatory quadrature:
//   h(tau)   = Psi(z+) - Psi(z-),          z+- = (tau +- lambda)/w
//   h'(tau)  = [G(z+) - G(z-)] / (2 pi w)
//   h''(tau) = [G'(z+) - G'(z-)] / (2 pi w^2)
// with G(z) = 2 int_0^1 phi(t) cos(zt) dt (so kappa = G/2pi) and
// Psi(z) = int_0^z kappa, an odd function with limits +-1/2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "weyllab/bump.hpp"
#include "weyllab/quadrature.hpp"

namespace weyllab {

namespace detail {

// ============================================================
// SmoothingKernelTable: uniform z-grid of G, G', G'' and the
// cumulative antiderivative Psi.  The grid extends in blocks
// until the kernel has decayed; values beyond the grid use the
// asymptotic plateau (Psi -> mass/2, G -> 0).
// ============================================================
class SmoothingKernelTable {
public:
    explicit SmoothingKernelTable(const BumpProfile& phi) { build(phi); }

    double step() const { return dz_; }
    double z_end() const { return zmax_; }
    double mass() const { return mass_; }
    double overshoot() const { return overshoot_; }

    // G, even in z; zero beyond the tabulated range.
    double g_value(double z) const {
        const double zz = std::fabs(z);
        if (zz >= zmax_) return 0.0;
        return hermite(g0_, g1_, zz);
    }

    // G', odd in z; zero beyond the tabulated range.
    double g_slope(double z) const {
        const double zz = std::fabs(z);
        if (zz >= zmax_) return 0.0;
        const double v = hermite(g1_, g2_, zz);
        return z < 0.0 ? -v : v;
    }

    // Psi, odd in z; beyond the grid the tabulated end value
    // (= mass/2) extends as a plateau, so far-out evaluation is
    // a plateau read, never an extrapolation failure.
    double psi_value(double z) const {
        const double zz = std::fabs(z);
        double v;
        if (zz >= zmax_) {
            v = psi_.back();
        } else {
            const double x = zz / dz_;
            std::size_t i = static_cast<std::size_t>(x);
            if (i > psi_.size() - 2) i = psi_.size() - 2;
            const double s = x - static_cast<double>(i);
            // exact integral of the local Hermite cubic of G
            const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
            const double i00 = 0.5 * s4 - s3 + s;
            const double i10 = 0.25 * s4 - (2.0 / 3.0) * s3 + 0.5 * s2;
            const double i01 = -0.5 * s4 + s3;
            const double i11 = 0.25 * s4 - s3 / 3.0;
            const double part = dz_ * (g0_[i] * i00 + dz_ * g1_[i] * i10 +
                                       g0_[i + 1] * i01 + dz_ * g1_[i + 1] * i11);
            v = psi_[i] + part / (2.0 * pi_);
        }
        return z < 0.0 ? -v : v;
    }

    // Smallest tabulated z with sup_{zeta >= z} 2|1/2 - Psi(zeta)| <= tol,
    // i.e. the window half-width beyond which |h - plateau| <= tol is
    // guaranteed by the measured kernel tail.  Infinity if never met.
    double certified_window(double tol) const {
        for (std::size_t i = 0; i < tail_.size(); ++i) {
            if (2.0 * tail_[i] <= tol) return static_cast<double>(i) * dz_;
        }
        return std::numeric_limits<double>::infinity();
    }

private:
    static constexpr double pi_ = 3.14159265358979323846264338328;

    double hermite(const std::vector<double>& vals, const std::vector<double>& slopes,
                   double zz) const {
        const double x = zz / dz_;
        std::size_t i = static_cast<std::size_t>(x);
        if (i > vals.size() - 2) i = vals.size() - 2;
        const double s = x - static_cast<double>(i);
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        const double h10 = s3 - 2.0 * s2 + s;
        const double h01 = -2.0 * s3 + 3.0 * s2;
        const double h11 = s3 - s2;
        return h00 * vals[i] + h10 * dz_ * slopes[i] + h01 * vals[i + 1] +
               h11 * dz_ * slopes[i + 1];
    }

    // Composite Gauss nodes over [0, support] resolving cos(z t) up to
    // z = z_top, with cascaded boundaries at the bump's analytic joints.
    struct NodeSet {
        std::vector<double> t, a0, a1, a2;  // a_k = 2 * weight * t^k * phi(t)
    };
    static NodeSet make_nodes(const BumpProfile& phi, double z_top) {
        const double sup = phi.support();
        const double plat = phi.plateau();
        const int npts = 16;
        const double width = std::min(sup / 8.0,
                                      2.0 * pi_ * (npts / 10.0) / std::max(z_top, 1.0));
        std::vector<double> bd;
        for (double b = 0.0; b < sup; b += width) bd.push_back(b);
        bd.push_back(sup);
        const double halfgap = 0.5 * (sup - plat);
        for (double j : {plat, sup}) {
            double off = halfgap;
            for (int k = 0; k <= 12; ++k, off *= 0.5) {
                if (j - off > 0.0) bd.push_back(j - off);
                if (j + off < sup) bd.push_back(j + off);
            }
            if (j > 0.0 && j < sup) bd.push_back(j);
        }
        std::sort(bd.begin(), bd.end());
        bd.erase(std::unique(bd.begin(), bd.end()), bd.end());

        const GaussRule& rule = gauss_rule(npts);
        NodeSet ns;
        for (std::size_t p = 0; p + 1 < bd.size(); ++p) {
            const double lo = bd[p], hi = bd[p + 1];
            if (!(hi > lo)) continue;
            const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            for (int q = 0; q < npts; ++q) {
                const double t = mid + half * rule.nodes[q];
                const double wgt = half * rule.weights[q];
                const double f = phi.value(t);
                ns.t.push_back(t);
                ns.a0.push_back(2.0 * wgt * f);
                ns.a1.push_back(2.0 * wgt * t * f);
                ns.a2.push_back(2.0 * wgt * t * t * f);
            }
        }
        return ns;
    }

    void build(const BumpProfile& phi) {
        const double z_first = 240.0;
        const double z_block = 120.0;
        const double z_hard_cap = 2400.0;
        const std::size_t block_rows = static_cast<std::size_t>(std::llround(z_block / dz_));

        double target = z_first;
        std::size_t row = 0;
        for (;;) {
            const std::size_t target_row = static_cast<std::size_t>(std::llround(target / dz_));
            const NodeSet ns = make_nodes(phi, target);
            const std::size_t m = ns.t.size();
            // rotation states cos(z t_i), sin(z t_i), advanced by dz each row
            std::vector<double> c(m), s(m), rc(m), rs(m);
            for (std::size_t i = 0; i < m; ++i) {
                rc[i] = std::cos(dz_ * ns.t[i]);
                rs[i] = std::sin(dz_ * ns.t[i]);
            }
            double chunk_peak = 0.0;
            for (std::size_t k = row; k <= target_row; ++k) {
                if ((k - row) % 512 == 0) {
                    const double z = static_cast<double>(k) * dz_;
                    for (std::size_t i = 0; i < m; ++i) {
                        c[i] = std::cos(z * ns.t[i]);
                        s[i] = std::sin(z * ns.t[i]);
                    }
                }
                double v0 = 0.0, v1 = 0.0, v2 = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    v0 += ns.a0[i] * c[i];
                    v1 -= ns.a1[i] * s[i];
                    v2 -= ns.a2[i] * c[i];
                    const double cn = c[i] * rc[i] - s[i] * rs[i];
                    s[i] = s[i] * rc[i] + c[i] * rs[i];
                    c[i] = cn;
                }
                g0_.push_back(v0);
                g1_.push_back(v1);
                g2_.push_back(v2);
                if (k + block_rows > target_row) chunk_peak = std::max(chunk_peak, std::fabs(v0));
            }
            row = target_row + 1;
            if (chunk_peak <= 1e-10) break;
            target += z_block;
            if (target > z_hard_cap)
                throw std::runtime_error(
                    "SmoothingKernelTable: transform failed to decay below 1e-10 "
                    "within the tabulation range");
        }
        zmax_ = static_cast<double>(g0_.size() - 1) * dz_;

        psi_.resize(g0_.size());
        long double acc = 0.0L;
        psi_[0] = 0.0;
        for (std::size_t i = 1; i < g0_.size(); ++i) {
            acc += static_cast<long double>(dz_) * 0.5L * (g0_[i - 1] + g0_[i]) +
                   static_cast<long double>(dz_) * dz_ / 12.0L * (g1_[i - 1] - g1_[i]);
            psi_[i] = static_cast<double>(acc / (2.0L * pi_));
        }
        mass_ = 2.0 * psi_.back();

        overshoot_ = 0.0;
        tail_.resize(psi_.size());
        double suffix = 0.0;
        for (std::size_t i = psi_.size(); i-- > 0;) {
            suffix = std::max(suffix, std::fabs(0.5 - psi_[i]));
            tail_[i] = suffix;
            overshoot_ = std::max(overshoot_, psi_[i] - 0.5);
        }
    }

    double dz_ = 0.01;
    double zmax_ = 0.0;
    double mass_ = 0.0;
    double overshoot_ = 0.0;
    std::vector<double> g0_, g1_, g2_, psi_, tail_;
};

inline std::shared_ptr<const SmoothingKernelTable> shared_kernel_table(const BumpProfile& phi) {
    static std::map<std::pair<double, double>, std::shared_ptr<const SmoothingKernelTable>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    const auto key = std::make_pair(phi.plateau(), phi.support());
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_shared<const SmoothingKernelTable>(phi)).first;
    return it->second;
}

}  // namespace detail

// ============================================================
// MollifierSpec: the smoothed indicator h for counting at level
// lambda with window width w = lambda^{1-eta-eps}.
// ============================================================
class MollifierSpec {
public:
    MollifierSpec(double lambda, double eta, double epsilon = -1.0,
                  const BumpProfile& phi = BumpProfile::standard(1.0))
        : lambda_(lambda), eta_(eta), eps_(epsilon) {
        if (!(lambda_ > 0.0)) throw std::invalid_argument("MollifierSpec: lambda must be positive");
        if (!(eta_ > 0.0 && eta_ < 1.0))
            throw std::invalid_argument("MollifierSpec: eta must lie in (0,1)");
        const double eps_cap = std::min(eta_, 1.0 - eta_) / 10.0;
        if (eps_ < 0.0) eps_ = std::min(eta_, 1.0 - eta_) / 20.0;
        if (!(eps_ > 0.0 && eps_ < eps_cap))
            throw std::invalid_argument("MollifierSpec: epsilon must lie in (0, min(eta,1-eta)/10)");
        if (!(phi.plateau() >= 0.5 && phi.support() <= 1.0))
            throw std::invalid_argument(
                "MollifierSpec: profile must sit between the indicators of [-1/2,1/2] and [-1,1]");
        width_ = std::pow(lambda_, 1.0 - eta_ - eps_);
        if (!(width_ >= 1.0))
            throw std::invalid_argument("MollifierSpec: configuration error, window width below 1");
        if (lambda_ >= 4.0 && !(width_ <= lambda_ / 2.0))
            throw std::invalid_argument(
                "MollifierSpec: configuration error, window width exceeds lambda/2");
        table_ = detail::shared_kernel_table(phi);
    }

    double lambda() const { return lambda_; }
    double eta() const { return eta_; }
    double epsilon() const { return eps_; }
    double width() const { return width_; }

    // Phi(+inf) - Phi(-inf); 1 to 1e-8 by the phi(0)=1 normalization.
    double kernel_mass() const { return table_->mass(); }

    // max_z Psi(z) - 1/2 >= 0; |h| <= 1 + 2*overshoot everywhere.
    double kernel_overshoot() const { return table_->overshoot(); }

    // Window half-width (in units of w) beyond which the measured
    // kernel tail guarantees |h - 1| <= tol inside and |h| <= tol
    // outside; the 1e-6 plateau is reached at z ~ tens, not at 10.
    double certified_window(double tol = 1e-6) const { return table_->certified_window(tol); }

    const detail::SmoothingKernelTable& kernel() const { return *table_; }

private:
    double lambda_, eta_, eps_, width_;
    std::shared_ptr<const detail::SmoothingKernelTable> table_;
};

inline double mollifier_value(const MollifierSpec& spec, double tau, int derivative_order);

// ============================================================
// MollifiedSymbol: u -> h(sqrt(u)) with two derivatives, the scalar
// function whose divided differences weight the perturbation sums.
// ============================================================
class MollifiedSymbol {
public:
    explicit MollifiedSymbol(MollifierSpec spec) : spec_(std::move(spec)) {}

    const MollifierSpec& spec() const { return spec_; }

    double value(double u) const { return mollifier_value(spec_, std::sqrt(u), 0); }

    // g'(u) = h'(s)/(2s), s = sqrt(u); h' is odd so the limit at the
    // origin is h''(0)/2.
    double slope(double u) const {
        if (u == 0.0) return 0.5 * mollifier_value(spec_, 0.0, 2);
        const double s = std::sqrt(u);
        return mollifier_value(spec_, s, 1) / (2.0 * s);
    }

    // g''(u) = [h''(s) - h'(s)/s] / (4u); the origin limit needs a
    // fourth h derivative, which the tabulation does not carry.
    double curvature(double u) const {
        if (u == 0.0)
            throw std::logic_error("MollifiedSymbol: curvature at zero is not available");
        const double s = std::sqrt(u);
        return (mollifier_value(spec_, s, 2) - mollifier_value(spec_, s, 1) / s) / (4.0 * u);
    }

private:
    MollifierSpec spec_;
};

inline double mollifier_value(const MollifierSpec& spec, double tau, int derivative_order = 0) {
    const detail::SmoothingKernelTable& k = spec.kernel();
    const double w = spec.width();
    const double zp = (tau + spec.lambda()) / w;
    const double zm = (tau - spec.lambda()) / w;
    constexpr double two_pi = 6.28318530717958647692528676656;
    switch (derivative_order) {
        case 0:
            return k.psi_value(zp) - k.psi_value(zm);
        case 1:
            return (k.g_value(zp) - k.g_value(zm)) / (two_pi * w);
        case 2:
            return (k.g_slope(zp) - k.g_slope(zm)) / (two_pi * w * w);
        default:
            throw std::invalid_argument("mollifier_value: derivative order must be 0, 1, or 2");
    }
}

}  // namespace weyllab
