#pragma once

// ============================================================
// The radial singular potential on the flat torus and its
// Fourier data.
//
//     V(x) = gamma * d(x,x0)^(-2+eta) * profile(d(x,x0))
//
// with d the wrapped torus distance and profile one of two
// compactly supported shapes: the plain plateau bump (rho) or
// its normalized self-convolution (chi), whose n-dimensional
// Fourier transform is a square and hence nonnegative.  The
// support stays inside a fundamental domain, so torus Fourier
// coefficients coincide with the whole-space transform and are
// computed by radial reduction:
//
//     n=2: 2 pi     int f(r) J0(xi r) r dr
//     n=3: 4 pi     int f(r) sinc(xi r) r^2 dr
//     n=4: 4 pi^2   int f(r) (J1/z)(xi r) r^3 dr
//     n=5: 8 pi^2   int f(r) s32(xi r) r^4 dr
//
// where every kernel factor is bounded with a finite limit at
// 0, so xi = 0 needs no special casing and the only singular
// weight is the explicit power r^(n-3+eta) handled by the
// graded integrator.
// ============================================================

#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "weyllab/bessel.hpp"
#include "weyllab/bump.hpp"
#include "weyllab/lattice.hpp"
#include "weyllab/quadrature.hpp"

namespace weyllab {

// Coordinate-wise wrapped difference, Euclidean norm.
inline double torus_distance(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("torus_distance: dimension mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double d = std::fmod(std::abs(x[i] - y[i]), 2.0 * M_PI);
        d = std::min(d, 2.0 * M_PI - d);
        acc += d * d;
    }
    return std::sqrt(acc);
}

enum class BumpVariant { rho, chi };

inline const char* variant_name(BumpVariant v) {
    return v == BumpVariant::rho ? "rho" : "chi";
}

namespace detail {

// Surface measure of the unit sphere S^(d-1).
inline double sphere_area(int d) {
    return d * unit_ball_volume(d);
}

inline double radial_kernel_constant(int dim) {
    switch (dim) {
        case 2: return 2.0 * M_PI;
        case 3: return 4.0 * M_PI;
        case 4: return 4.0 * M_PI * M_PI;
        case 5: return 8.0 * M_PI * M_PI;
        default: throw std::invalid_argument("radial kernel: dim outside 2..5");
    }
}

inline double radial_kernel_factor(int dim, double z) {
    switch (dim) {
        case 2: return bessel_j0(z);
        case 3: return sinc_kernel(z);
        case 4: return j1_over_z(z);
        case 5: return sphere32_kernel(z);
        default: throw std::invalid_argument("radial kernel: dim outside 2..5");
    }
}

// Normalized radial self-convolution of a bump, tabulated on a
// uniform grid with C^1 cubic interpolation.  For radial b,
//
//   (b*b)(r) = sigma int ds s^(d-1) b(s) int dth sin^(d-2)(th)
//                                        b(sqrt(r^2+s^2-2rs cos th))
//
// over th in [0,pi], with sigma the S^(d-2) area and the d=2
// convention sigma = 2 covering both half-circles.
class AutocorrelationTable {
public:
    AutocorrelationTable(int dim, const BumpProfile& b) {
        support_ = 2.0 * b.support();
        const int M = 257;
        h_ = support_ / (M - 1);
        vals_.resize(M);

        double sigma = dim == 2 ? 2.0 : sphere_area(dim - 1);
        const GaussRule& inner_rule = gauss_rule(32);
        for (int i = 0; i < M; ++i) {
            double r = i * h_;
            auto outer = [&](double s) {
                auto angular = [&](double th) {
                    double c = std::cos(th);
                    double d2 = r * r + s * s - 2.0 * r * s * c;
                    double arg = d2 > 0.0 ? std::sqrt(d2) : 0.0;
                    double v = b.value(arg);
                    if (dim > 2) {
                        double sn = std::sin(th);
                        for (int k = 0; k < dim - 2; ++k) v *= sn;
                    }
                    return v;
                };
                return std::pow(s, dim - 1) * b.value(s) *
                       gauss_panel(angular, 0.0, M_PI, inner_rule);
            };
            vals_[static_cast<size_t>(i)] =
                sigma * gauss_composite(outer, 0.0, b.support(), 12, 16);
        }
        double peak = vals_[0];
        if (!(peak > 0.0)) throw std::logic_error("autocorrelation: nonpositive peak");
        for (double& v : vals_) v /= peak;
        vals_.back() = 0.0;

        // central-difference slopes; even at 0, flat at the support end
        slopes_.assign(vals_.size(), 0.0);
        for (size_t i = 1; i + 1 < vals_.size(); ++i)
            slopes_[i] = (vals_[i + 1] - vals_[i - 1]) / (2.0 * h_);
    }

    double value(double r) const {
        r = std::abs(r);
        if (r >= support_) return 0.0;
        double t = r / h_;
        size_t i = std::min(static_cast<size_t>(t), vals_.size() - 2);
        double s = t - static_cast<double>(i);
        double v0 = vals_[i], v1 = vals_[i + 1];
        double m0 = slopes_[i] * h_, m1 = slopes_[i + 1] * h_;
        double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * v0 + (s3 - 2 * s2 + s) * m0 +
               (-2 * s3 + 3 * s2) * v1 + (s3 - s2) * m1;
    }

    double support() const { return support_; }
    double knot_spacing() const { return h_; }
    const std::vector<double>& knots_values() const { return vals_; }

    std::vector<double> knot_radii() const {
        std::vector<double> out;
        for (size_t i = 1; i + 1 < vals_.size(); ++i) out.push_back(i * h_);
        return out;
    }

private:
    double support_ = 0.0;
    double h_ = 0.0;
    std::vector<double> vals_;
    std::vector<double> slopes_;
};

} // namespace detail

// n-dimensional Fourier transform at radial frequency xi of
// r^(-2+eta) * profile(r) with profile supported in [0, R].
// eta may sit anywhere in (0, 2) here; the potential itself
// restricts to (0, 1).
template <typename P>
QuadResult radial_fourier_transform(int dim, double eta, double R, double xi, P&& profile,
                                    const QuadratureSpec& spec,
                                    const std::vector<double>& knot_radii = {},
                                    const std::vector<double>& joint_radii = {}) {
    if (!(eta > 0.0) || !(eta < 2.0))
        throw std::invalid_argument("radial_fourier_transform: eta outside (0,2)");
    double alpha = dim - 3 + eta;
    double cst = detail::radial_kernel_constant(dim);
    auto factor = [&](double r) {
        return cst * profile(r) * detail::radial_kernel_factor(dim, xi * r);
    };
    return power_weighted_integral(alpha, R, xi, factor, spec, knot_radii, joint_radii);
}

class RadialSingularPotential {
public:
    RadialSingularPotential(int dim, double eta, double gamma,
                            BumpVariant variant = BumpVariant::rho,
                            double support_radius = 1.0, std::vector<double> center = {})
        : dim_(dim),
          eta_(eta),
          gamma_(gamma),
          variant_(variant),
          bump_(BumpProfile::standard(support_radius)),
          center_(std::move(center)) {
        if (dim_ < 2 || dim_ > 5)
            throw std::invalid_argument("potential: dim outside 2..5");
        if (!(eta_ > 0.0) || !(eta_ < 1.0))
            throw std::invalid_argument("potential: eta outside (0,1)");
        if (gamma_ == 0.0) throw std::invalid_argument("potential: gamma must be nonzero");
        if (!(support_radius > 0.0) || !(support_radius < M_PI))
            throw std::invalid_argument("potential: support radius outside (0,pi)");
        if (center_.empty()) center_.assign(static_cast<size_t>(dim_), 0.0);
        if (center_.size() != static_cast<size_t>(dim_))
            throw std::invalid_argument("potential: center dimension mismatch");
        if (variant_ == BumpVariant::chi)
            chi_ = std::make_shared<detail::AutocorrelationTable>(
                dim_, BumpProfile::standard(support_radius / 2.0));
    }

    int dim() const { return dim_; }
    double eta() const { return eta_; }
    double gamma() const { return gamma_; }
    BumpVariant variant() const { return variant_; }
    double support_radius() const { return bump_.support(); }
    const std::vector<double>& center() const { return center_; }

    double distance(const std::vector<double>& x) const { return torus_distance(x, center_); }

    // The compactly supported shape multiplying the power singularity.
    double profile(double r) const {
        return variant_ == BumpVariant::chi ? chi_->value(r) : bump_.value(r);
    }

    double operator()(const std::vector<double>& x) const {
        double d = distance(x);
        if (d == 0.0) throw std::domain_error("potential: evaluation at the singular center");
        if (d >= support_radius()) return 0.0;
        return gamma_ * std::pow(d, -2.0 + eta_) * profile(d);
    }

    QuadResult fourier_value(double xi_norm, const QuadratureSpec& spec) const {
        auto prof = [this](double r) { return profile(r); };
        QuadResult res = radial_fourier_transform(dim_, eta_, support_radius(), xi_norm, prof,
                                                  spec, quadrature_knots(), quadrature_joints());
        res.value *= gamma_;
        res.err_estimate *= std::abs(gamma_);
        return res;
    }

    // Local singular integral against the dimension's Kato weight
    //   W_n(r) = r^(2-n) for n >= 3,  log(2 + 1/r) for n = 2,
    // taken at the worst point, which radial monotonicity puts at
    // the center itself.
    QuadResult kato_modulus(double delta, const QuadratureSpec& spec) const {
        if (!(delta > 0.0) || delta > M_PI)
            throw std::invalid_argument("kato_modulus: delta outside (0,pi]");
        double R = std::min(delta, support_radius());
        double sigma = detail::sphere_area(dim_);
        double ag = std::abs(gamma_);
        QuadratureSpec flat = exact_flattening(eta_ - 1.0, spec);
        if (dim_ >= 3) {
            auto factor = [&](double r) { return sigma * ag * profile(r); };
            return power_weighted_integral(eta_ - 1.0, R, 0.0, factor, flat,
                                           quadrature_knots(), quadrature_joints());
        }
        auto factor = [&](double r) {
            return sigma * ag * profile(r) * std::log(2.0 + 1.0 / r);
        };
        return power_weighted_integral(eta_ - 1.0, R, 0.0, factor, flat, quadrature_knots(),
                                       quadrature_joints());
    }

    struct Lp {
        double value = 0.0;
        bool divergent = false;
    };

    // Finite exactly when p (2 - eta) < n; the test is analytic,
    // the finite value is quadrature.
    Lp lp_norm(double p, const QuadratureSpec& spec) const {
        if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p < 1");
        Lp out;
        double alpha = dim_ - 1.0 - p * (2.0 - eta_);
        if (alpha <= -1.0) {
            out.divergent = true;
            return out;
        }
        double sigma = detail::sphere_area(dim_);
        double agp = std::pow(std::abs(gamma_), p);
        auto factor = [&](double r) {
            // interpolation can graze -1e-16 near the support end
            double pr = std::max(profile(r), 0.0);
            return sigma * agp * std::pow(pr, p);
        };
        QuadResult q =
            power_weighted_integral(alpha, support_radius(), 0.0, factor,
                                    exact_flattening(alpha, spec), quadrature_knots(),
                                    quadrature_joints());
        out.value = std::pow(q.value, 1.0 / p);
        return out;
    }

    // Stable textual identity for cache keys and table metadata.
    std::string fingerprint() const {
        std::ostringstream os;
        os.precision(17);
        os << "dim=" << dim_ << ";eta=" << eta_ << ";gamma=" << gamma_
           << ";variant=" << variant_name(variant_) << ";support=" << support_radius()
           << ";center=";
        for (double c : center_) os << c << ",";
        return os.str();
    }

private:
    // Non-oscillatory diagnostics may flatten the origin power
    // exactly, while Fourier quadrature keeps the conditioning
    // floor; near the L^p divergence threshold the exponent drops
    // below any fixed floor.
    static QuadratureSpec exact_flattening(double alpha, QuadratureSpec spec) {
        spec.grading_floor = std::min(spec.grading_floor, std::max(alpha + 1.0, 1e-6));
        return spec;
    }

    // chi is piecewise cubic: boundary alignment at the knots is
    // enough.  rho has an analytic joint at the plateau edge that
    // needs cascaded refinement (the integrator always cascades at
    // the support end itself).
    std::vector<double> quadrature_knots() const {
        if (variant_ == BumpVariant::chi) return chi_->knot_radii();
        return {};
    }

    std::vector<double> quadrature_joints() const {
        if (variant_ == BumpVariant::chi) return {};
        return {bump_.plateau()};
    }

    int dim_;
    double eta_;
    double gamma_;
    BumpVariant variant_;
    BumpProfile bump_;
    std::vector<double> center_;
    std::shared_ptr<const detail::AutocorrelationTable> chi_;
};

// Model offset kernel (1 + |xi|)^(-(n-2+eta)): the idealized decay
// profile of the transform, used as a drop-in coefficient table.
inline double model_offset_kernel(int dim, double eta, long long norm_sq) {
    double nrm = std::sqrt(static_cast<double>(norm_sq));
    return std::pow(1.0 + nrm, -(dim - 2.0 + eta));
}

// Radial table of Fourier values keyed by integer |xi|^2.  Tables
// backed by a potential extend on demand under a lock (single
// writer, concurrent readers must synchronize through it); static
// tables (constant potential, CSV imports) are complete as built.
class FourierTable {
public:
    struct Entry {
        double value = 0.0;
        double err = 0.0;
    };

    FourierTable(const RadialSingularPotential& pot, QuadratureSpec spec)
        : dim_(pot.dim()), eta_(pot.eta()), spec_(spec),
          pot_(std::make_shared<RadialSingularPotential>(pot)) {}

    // V identically c: the only nonzero coefficient is at offset 0.
    static FourierTable constant(int dim, double c) {
        FourierTable t(dim, /*eta=*/0.5);
        t.entries_[0] = {c * std::pow(2.0 * M_PI, dim), 0.0};
        return t;
    }

    static FourierTable from_rows(int dim, double eta,
                                  const std::vector<std::pair<long long, Entry>>& rows) {
        FourierTable t(dim, eta);
        for (const auto& r : rows) t.entries_[r.first] = r.second;
        return t;
    }

    int dim() const { return dim_; }
    double eta() const { return eta_; }

    double value_at_norm_sq(long long nsq) const { return fetch(nsq).value; }
    double err_at_norm_sq(long long nsq) const { return fetch(nsq).err; }

    void ensure_up_to(long long nsq_max) const {
        for (long long s = 0; s <= nsq_max; ++s)
            if (shell_multiplicity(dim_, s) > 0) fetch(s);
    }

    size_t size() const {
        std::lock_guard<std::mutex> lock(*mu_);
        return entries_.size();
    }

    std::vector<std::pair<long long, Entry>> rows() const {
        std::lock_guard<std::mutex> lock(*mu_);
        return {entries_.begin(), entries_.end()};
    }

    const QuadratureSpec& spec() const { return spec_; }

    std::string fingerprint() const {
        std::ostringstream os;
        os.precision(17);
        if (pot_) {
            os << pot_->fingerprint();
        } else {
            // Static tables have no generating potential; hash the rows
            // themselves so distinct tables never share a cache key.
            std::uint64_t h = 14695981039346656037ull;
            auto mix = [&h](const void* p, std::size_t len) {
                const auto* b = static_cast<const unsigned char*>(p);
                for (std::size_t i = 0; i < len; ++i) {
                    h ^= b[i];
                    h *= 1099511628211ull;
                }
            };
            std::lock_guard<std::mutex> lock(*mu_);
            for (const auto& [nsq, entry] : entries_) {
                mix(&nsq, sizeof nsq);
                mix(&entry.value, sizeof entry.value);
            }
            os << "static;dim=" << dim_ << ";eta=" << eta_
               << ";rows=" << entries_.size() << ";hash=" << std::hex << h
               << std::dec;
        }
        os << ";nodes=" << spec_.nodes << ";floor=" << spec_.grading_floor
           << ";npp=" << spec_.nodes_per_period;
        return os.str();
    }

private:
    FourierTable(int dim, double eta) : dim_(dim), eta_(eta) {}

    const Entry& fetch(long long nsq) const {
        if (nsq < 0) throw std::invalid_argument("fourier table: negative norm");
        std::lock_guard<std::mutex> lock(*mu_);
        auto it = entries_.find(nsq);
        if (it != entries_.end()) return it->second;
        if (!pot_) {
            // static tables are complete; treat absent offsets as structural zeros
            // only for the constant hook, otherwise refuse
            if (entries_.count(0) && entries_.size() == 1) return zero_;
            throw std::out_of_range("fourier table: offset " + std::to_string(nsq) +
                                    " absent from static table");
        }
        QuadResult q = pot_->fourier_value(std::sqrt(static_cast<double>(nsq)), spec_);
        auto [pos, inserted] = entries_.emplace(nsq, Entry{q.value, q.err_estimate});
        (void)inserted;
        return pos->second;
    }

    int dim_;
    double eta_;
    QuadratureSpec spec_;
    std::shared_ptr<const RadialSingularPotential> pot_;
    // boxed so the table stays movable; guards entries_ extension
    mutable std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
    mutable std::map<long long, Entry> entries_;
    static inline const Entry zero_{0.0, 0.0};
};

// Matrix element between plane waves in the orthonormal convention
// e_j = (2 pi)^(-n/2) exp(i j.x):  V_jk = (2 pi)^(-n) Vhat(j - k).
inline double matrix_entry(const FourierTable& table, const LatticePoint& j,
                           const LatticePoint& k) {
    if (j.coords.size() != k.coords.size())
        throw std::invalid_argument("matrix_entry: dimension mismatch");
    long long nsq = 0;
    for (size_t i = 0; i < j.coords.size(); ++i) {
        long long d = static_cast<long long>(j.coords[i]) - k.coords[i];
        nsq += d * d;
    }
    return std::pow(2.0 * M_PI, -table.dim()) * table.value_at_norm_sq(nsq);
}

struct EnvelopeReport {
    double c_min = 0.0;
    double c_max = 0.0;
    long long argmin_norm_sq = -1;
    long long argmax_norm_sq = -1;
    int nonpositive_count = 0; // reported, never clipped
};

// min/max of Vhat(xi) (1 + |xi|)^(n-2+eta) over representable
// offsets with |xi| <= xi_max.
inline EnvelopeReport envelope_report(const FourierTable& table, double xi_max) {
    EnvelopeReport rep;
    long long cap = detail::norm_sq_threshold(xi_max);
    bool first = true;
    for (long long nsq = 0; nsq <= cap; ++nsq) {
        if (shell_multiplicity(table.dim(), nsq) == 0) continue;
        double v = table.value_at_norm_sq(nsq);
        if (v <= 0.0) ++rep.nonpositive_count;
        double ratio =
            v * std::pow(1.0 + std::sqrt(static_cast<double>(nsq)), table.dim() - 2.0 + table.eta());
        if (first || ratio < rep.c_min) {
            rep.c_min = ratio;
            rep.argmin_norm_sq = nsq;
        }
        if (first || ratio > rep.c_max) {
            rep.c_max = ratio;
            rep.argmax_norm_sq = nsq;
        }
        first = false;
    }
    if (first) throw std::invalid_argument("envelope_report: no offsets below xi_max");
    return rep;
}

} // namespace weyllab
