#pragma once

// ============================================================
// Perturbation sums for the counting-function difference.
//
// For finite symmetric H = H0 + V with free projectors P_j and
// perturbed projectors Q_l, two exact expansions of g(H) - g(H0)
// hold for any scalar symbol g:
//
//   first order, mixed indices
//     Delta g = sum_{j,l} g[u0_j, u_l] P_j V Q_l
//
//   second order, free inner indices
//     Delta g = sum_{j,k} c1(u0_j, u0_k) P_j V P_k
//             + sum_{j,k,l} c2(u0_j, u0_k, u_l) P_j V P_k V Q_l
//
// where c1 is the divided difference with the zero-mode rule
// (both nodes at the origin give 0) and c2 is its recurrence
// partner: c1(a,b) + (c-b) c2(a,b,c) = g[a,c].  Because the rule
// only rewrites coefficients whose operator factors vanish, both
// expansions are exact -- except when the perturbed spectrum
// contains an exact zero, which the counting shift manufactures
// for attractive wells.  duhamel_identity_check therefore folds
// its own constant (shift + 1) into V, moving the perturbed
// spectrum onto [1, inf) where the conventions are exact for
// every coupling; the identity holds for any such constant.
// ============================================================

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "weyllab/divided_difference.hpp"
#include "weyllab/lattice.hpp"
#include "weyllab/mollifier.hpp"
#include "weyllab/potential.hpp"
#include "weyllab/spectral.hpp"

namespace weyllab {

// First-order coefficient: divided difference with the zero-mode
// rule.  Both nodes exactly at the origin multiply a vanishing
// matrix element, so the value there is a convention.
template <typename G>
double r1_coefficient(const G& g, double a, double b) {
    if (a == 0.0 && b == 0.0) return 0.0;
    return divided_difference(g, a, b);
}

// Second-order coefficient paired to r1_coefficient by the
// recurrence c1(a,b) + (c-b) c2(a,b,c) = g[a,c].  Away from the
// rewritten pair this is the plain confluent second difference.
template <typename G>
double r2_coefficient(const G& g, double a, double b, double c) {
    if (a == 0.0 && b == 0.0) {
        // recurrence partner of the zero-mode rule; c = 0 would pair
        // with a nonvanishing factor only on a shifted spectrum, which
        // the identity check avoids by construction
        if (c == 0.0) return 0.0;
        return divided_difference(g, 0.0, c) / c;
    }
    return divided_difference(g, a, b, c);
}

namespace detail {

// row of free plane-wave values at x: (2 pi)^(-n/2) e^{i j.x}
inline void free_phases(const LatticeBasis& basis, const std::vector<double>& x,
                        std::vector<double>& re0, std::vector<double>& im0) {
    const std::size_t nb = basis.points.size();
    const double scale = std::pow(2.0 * M_PI, -0.5 * basis.dim);
    re0.resize(nb);
    im0.resize(nb);
    for (std::size_t a = 0; a < nb; ++a) {
        double dot = 0.0;
        const auto& j = basis.points[a].coords;
        for (std::size_t c = 0; c < j.size(); ++c) dot += j[c] * x[c];
        re0[a] = scale * std::cos(dot);
        im0[a] = scale * std::sin(dot);
    }
}

// sum_{a,b} c1(|a|^2, |b|^2) M_ab Re[e0_a conj(e0_b)]
template <typename G>
long double r1_pair_sum(const LatticeBasis& basis, const std::vector<double>& m,
                        const std::vector<double>& re0, const std::vector<double>& im0,
                        const G& g) {
    const std::size_t nb = basis.points.size();
    long double acc = 0.0L;
    for (std::size_t b = 0; b < nb; ++b) {
        const double ub = static_cast<double>(basis.points[b].norm_sq);
        for (std::size_t a = 0; a < nb; ++a) {
            const double ua = static_cast<double>(basis.points[a].norm_sq);
            acc += r1_coefficient(g, ua, ub) * m[a + b * nb] *
                   static_cast<long double>(re0[a] * re0[b] + im0[a] * im0[b]);
        }
    }
    return acc;
}

// sum_{a,k,l} c2(|a|^2, |k|^2, u_l) e0_a M_ak VQ_kl Re[e_l ...] with the
// a-sum collapsed onto norm shells: F(s,k) = sum_{|a|^2 = s} e0_a M_ak.
// Cost O(shells * nb^2) instead of nb^3.
template <typename G>
long double r2_triple_sum(const LatticeBasis& basis, const std::vector<double>& m,
                          const std::vector<double>& vq, const std::vector<double>& u,
                          const std::vector<double>& re0, const std::vector<double>& im0,
                          const std::vector<double>& amp_re, const std::vector<double>& amp_im,
                          const G& g) {
    const std::size_t nb = basis.points.size();
    std::vector<long long> shells;
    std::vector<std::size_t> shell_of(nb);
    for (std::size_t a = 0; a < nb; ++a) {
        if (shells.empty() || shells.back() != basis.points[a].norm_sq)
            shells.push_back(basis.points[a].norm_sq);
        shell_of[a] = shells.size() - 1;
    }
    const std::size_t ns = shells.size();
    std::vector<double> f_re(ns * nb, 0.0), f_im(ns * nb, 0.0);
    for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t a = 0; a < nb; ++a) {
            f_re[shell_of[a] + k * ns] += re0[a] * m[a + k * nb];
            f_im[shell_of[a] + k * ns] += im0[a] * m[a + k * nb];
        }

    long double acc = 0.0L;
    for (std::size_t l = 0; l < nb; ++l) {
        long double zre = 0.0L, zim = 0.0L;
        for (std::size_t k = 0; k < nb; ++k) {
            const double uk = static_cast<double>(basis.points[k].norm_sq);
            long double cre = 0.0L, cim = 0.0L;
            for (std::size_t s = 0; s < ns; ++s) {
                const double c2 =
                    r2_coefficient(g, static_cast<double>(shells[s]), uk, u[l]);
                cre += c2 * f_re[s + k * ns];
                cim += c2 * f_im[s + k * ns];
            }
            zre += cre * vq[k + l * nb];
            zim += cim * vq[k + l * nb];
        }
        acc += zre * amp_re[l] + zim * amp_im[l];
    }
    return acc;
}

// VQ = M C: columns are M applied to the eigenvectors
inline std::vector<double> apply_to_vectors(const std::vector<double>& m,
                                            const SpectralData& sd) {
    const std::size_t nb = sd.size();
    std::vector<double> vq(nb * nb);
    const int n = static_cast<int>(nb);
    const double one = 1.0, zero = 0.0;
    dgemm_("N", "N", &n, &n, &n, &one, m.data(), &n, sd.vectors().data(), &n, &zero,
           vq.data(), &n);
    return vq;
}

} // namespace detail

// ============================================================
// First-order sum over the free basis, with a truncation bound.
// ============================================================

struct R1Result {
    double value = 0.0;
    // estimate of the part of the doubly infinite sum lost to the
    // basis cutoff; a genuine bound only when tail_certified, which
    // requires the basis to reach twice the kernel's certified
    // 1e-6 window -- far beyond desk scale for most runs
    double tail_estimate = 0.0;
    bool tail_certified = false;
    double tail_fraction = 0.0;
    bool truncation_warning = false;
};

// sum_{j,k in basis} c1(g; |j|^2, |k|^2) V_jk Re[e0_j(x) conj(e0_k(x))]
//
// The tail estimate covers pairs with one index beyond the basis:
// inside indices carry |g| <= sup_g = 1 + 2 overshoot out to
// lambda+ = lambda + z6 w and |g| <= window_tol beyond, the
// divided difference is bounded by sup through the denominator
// |k|^2 - |j|^2 >= (3/4)|k|^2, and the potential decay enters
// through the measured envelope constant c_max.
inline R1Result r1_sum(const LatticeBasis& basis, const FourierTable& table,
                       const MollifierSpec& mspec, const std::vector<double>& x,
                       double envelope_c_max = 0.0) {
    const std::size_t nb = basis.points.size();
    const int dim = basis.dim;
    MollifiedSymbol g(mspec);

    std::vector<double> m = potential_matrix(basis, table);
    std::vector<double> re0, im0;
    detail::free_phases(basis, x, re0, im0);

    R1Result out;
    out.value = static_cast<double>(detail::r1_pair_sum(basis, m, re0, im0, g));

    if (envelope_c_max > 0.0) {
        const double window_tol = 1e-3;
        const double z3 = mspec.certified_window(window_tol);
        const double lambda_plus =
            std::isfinite(z3) ? mspec.lambda() + z3 * mspec.width() : basis.cutoff;
        const double sup_g = 1.0 + 2.0 * mspec.kernel_overshoot();
        const double eta = table.eta();
        // sum_{|k| > K} |k|^(-n-eta) <= 2^(n+eta) n omega_n (K/2)^(-eta) / eta
        const double tailsum = std::pow(2.0, dim + eta) * dim * unit_ball_volume(dim) *
                               std::pow(0.5 * basis.cutoff, -eta) / eta;
        const double inner =
            static_cast<double>(count_ball(dim, std::min(lambda_plus, basis.cutoff))) *
                sup_g +
            static_cast<double>(nb) * 2.0 * window_tol;
        out.tail_estimate = inner * (4.0 / 3.0) * std::pow(2.0 * M_PI, -dim) *
                            envelope_c_max * std::pow(2.0, dim - 2.0 + eta) * tailsum;
        const double z6 = mspec.certified_window(1e-6);
        out.tail_certified =
            std::isfinite(z6) &&
            basis.cutoff >= 2.0 * (mspec.lambda() + z6 * mspec.width());
        out.tail_fraction = out.tail_estimate / std::max(std::fabs(out.value), 1e-300);
        out.truncation_warning = out.tail_fraction > 0.1;
    }
    return out;
}

// ============================================================
// Duhamel identity check: both expansions against the directly
// computed diagonal difference at one point.
// ============================================================

struct DuhamelCheck {
    double delta_diag = 0.0; // g-weighted diagonal of H minus H0
    double r1_mixed = 0.0;   // first-order sum, perturbed last index
    double r1_free = 0.0;    // first-order sum, both indices free
    double r2 = 0.0;         // second-order remainder
    double res1_abs = 0.0, res1_rel = 0.0;
    double res2_abs = 0.0, res2_rel = 0.0;
    double fold = 0.0;       // constant folded into V for the check
};

inline DuhamelCheck duhamel_identity_check(const SpectralData& sd, const FourierTable& table,
                                           const MollifierSpec& mspec,
                                           const std::vector<double>& x,
                                           long long r2_cap = 2500) {
    const LatticeBasis& basis = sd.basis();
    const std::size_t nb = sd.size();
    if (static_cast<long long>(nb) > r2_cap)
        throw std::length_error("duhamel_identity_check: basis of " + std::to_string(nb) +
                                " points exceeds cap " + std::to_string(r2_cap));
    MollifiedSymbol g(mspec);
    DuhamelCheck out;

    // move the perturbed spectrum onto [fold_min, inf): strictly
    // positive keeps the zero-mode rule consistent
    out.fold = sd.shift() > 0.0 ? sd.shift() + 1.0 : 0.0;

    // perturbed eigenvalues for the folded operator
    std::vector<double> u(nb);
    for (std::size_t l = 0; l < nb; ++l) u[l] = sd.raw_eigenvalue(l) + out.fold;

    // amplitudes at x: perturbed and free
    EigenfunctionAmplitudes amp = eigenfunction_amplitudes(sd, x);
    const double scale = std::pow(2.0 * M_PI, -0.5 * sd.dim());
    std::vector<double> re0, im0;
    detail::free_phases(basis, x, re0, im0);

    // direct diagonal difference
    long double pert = 0.0L, free0 = 0.0L;
    for (std::size_t l = 0; l < nb; ++l)
        pert += g.value(u[l]) * (amp.re[l] * amp.re[l] + amp.im[l] * amp.im[l]);
    for (std::size_t a = 0; a < nb; ++a)
        free0 += g.value(static_cast<double>(basis.points[a].norm_sq)) * (scale * scale);
    out.delta_diag = static_cast<double>(pert - free0);

    // potential matrix of the folded operator
    std::vector<double> m = potential_matrix(basis, table);
    for (std::size_t a = 0; a < nb; ++a) m[a + a * nb] += out.fold;

    // VQ = M C: columns are the folded V applied to the eigenvectors
    std::vector<double> vq = detail::apply_to_vectors(m, sd);

    // first order, mixed: sum_{j,l} c1(|j|^2, u_l) VQ_jl Re[e0_j conj(e_l)]
    long double r1m = 0.0L;
    for (std::size_t l = 0; l < nb; ++l) {
        long double col = 0.0L;
        for (std::size_t a = 0; a < nb; ++a) {
            const double ua = static_cast<double>(basis.points[a].norm_sq);
            col += r1_coefficient(g, ua, u[l]) * vq[a + l * nb] *
                   static_cast<long double>(re0[a] * amp.re[l] + im0[a] * amp.im[l]);
        }
        r1m += col;
    }
    out.r1_mixed = static_cast<double>(r1m);

    // first order, free: sum_{j,k} c1(|j|^2, |k|^2) M_jk Re[e0_j conj(e0_k)]
    out.r1_free = static_cast<double>(detail::r1_pair_sum(basis, m, re0, im0, g));

    // second order
    out.r2 = static_cast<double>(
        detail::r2_triple_sum(basis, m, vq, u, re0, im0, amp.re, amp.im, g));

    const double denom = std::max(std::fabs(out.delta_diag), 1e-30);
    out.res1_abs = std::fabs(out.delta_diag - out.r1_mixed);
    out.res1_rel = out.res1_abs / denom;
    out.res2_abs = std::fabs(out.delta_diag - out.r1_free - out.r2);
    out.res2_rel = out.res2_abs / denom;
    return out;
}

// ============================================================
// Second-order spectral sum with the operator's own frequencies:
//
//   sum_{j,k,l} c2(|j|^2, |k|^2, u_l) e0_j(x) V_jk (V C)_kl
//               Re[conj(e_l(x)) ...],   u_l = shifted eigenvalue.
//
// This is the R2 piece of the expansion on its own; for a
// potential needing no positivity shift it equals the r2 field
// of duhamel_identity_check.
// ============================================================

inline double r2_sum(const SpectralData& sd, const FourierTable& table,
                     const MollifierSpec& mspec, const std::vector<double>& x,
                     long long r2_cap = 2500) {
    const LatticeBasis& basis = sd.basis();
    const std::size_t nb = sd.size();
    if (static_cast<long long>(nb) > r2_cap)
        throw std::length_error("r2_sum: basis of " + std::to_string(nb) +
                                " points exceeds cap " + std::to_string(r2_cap));
    MollifiedSymbol g(mspec);
    std::vector<double> u(nb);
    for (std::size_t l = 0; l < nb; ++l) u[l] = sd.shifted_eigenvalue(l);
    EigenfunctionAmplitudes amp = eigenfunction_amplitudes(sd, x);
    std::vector<double> re0, im0;
    detail::free_phases(basis, x, re0, im0);
    std::vector<double> m = potential_matrix(basis, table);
    std::vector<double> vq = detail::apply_to_vectors(m, sd);
    return static_cast<double>(
        detail::r2_triple_sum(basis, m, vq, u, re0, im0, amp.re, amp.im, g));
}

// ============================================================
// Pointwise counting remainders and the perturbation difference.
// ============================================================

struct PointwiseRemainder {
    double counted = 0.0;   // weighted diagonal at x
    double main_term = 0.0; // (2 pi)^-n omega_n lambda^n
    double remainder = 0.0;
};

inline PointwiseRemainder pointwise_remainder_indicator(const SpectralData& sd, double lambda,
                                                        const std::vector<double>& x) {
    PointwiseRemainder out;
    out.counted = projector_diag(sd, lambda, x);
    out.main_term = std::pow(2.0 * M_PI, -sd.dim()) * unit_ball_volume(sd.dim()) *
                    std::pow(std::max(lambda, 0.0), sd.dim());
    out.remainder = out.counted - out.main_term;
    return out;
}

inline PointwiseRemainder pointwise_remainder_mollified(const SpectralData& sd,
                                                        const MollifierSpec& mspec,
                                                        const std::vector<double>& x) {
    PointwiseRemainder out;
    std::vector<double> w(sd.size());
    for (std::size_t l = 0; l < sd.size(); ++l)
        w[l] = mollifier_value(mspec, sd.tau(l));
    out.counted = weighted_diag(sd, w, {x})[0];
    out.main_term = std::pow(2.0 * M_PI, -sd.dim()) * unit_ball_volume(sd.dim()) *
                    std::pow(mspec.lambda(), sd.dim());
    out.remainder = out.counted - out.main_term;
    return out;
}

// Mollified counting difference between the perturbed and the free
// operator at one point; the free side is explicit on the basis.
inline double perturbation_difference(const SpectralData& sd, const MollifierSpec& mspec,
                                      const std::vector<double>& x) {
    std::vector<double> w(sd.size());
    for (std::size_t l = 0; l < sd.size(); ++l)
        w[l] = mollifier_value(mspec, sd.tau(l));
    const double pert = weighted_diag(sd, w, {x})[0];
    long double free0 = 0.0L;
    const double dens = std::pow(2.0 * M_PI, -sd.dim());
    for (const auto& p : sd.basis().points)
        free0 += mollifier_value(mspec, std::sqrt(static_cast<double>(p.norm_sq)));
    return pert - dens * static_cast<double>(free0);
}

inline double perturbation_difference_indicator(const SpectralData& sd, double lambda,
                                                const std::vector<double>& x) {
    const double pert = projector_diag(sd, lambda, x);
    const double free0 =
        std::pow(2.0 * M_PI, -sd.dim()) *
        static_cast<double>(count_ball(sd.dim(), std::min(lambda, sd.lambda_max())));
    return pert - free0;
}

// ============================================================
// Model first-order sum for the sharp indicator counter: the
// lattice double sum
//
//   2 sum_{|j| < lambda} sum_{lambda <= |k| <= K}
//       (1 + |j-k|)^(-(n-2+eta)) / (|k|^2 - |j|^2)
//
// with the idealized offset kernel standing in for the potential.
// Exact integer arithmetic on norms; signed-permutation orbit
// reduction on j; kernel values precomputed per offset norm.
// ============================================================

struct ModelR1Lower {
    double value = 0.0;
    long long pair_count = 0;
    double tail_bound = 0.0;    // beyond-K part of the k sum
    double tail_fraction = 0.0;
};

inline ModelR1Lower r1_indicator_lower(int dim, double eta, double lambda, double k_max,
                                       double cost_cap = 6e9) {
    if (dim < 2 || dim > 5) throw std::invalid_argument("r1_indicator_lower: dim outside 2..5");
    if (!(eta > 0.0) || !(eta < 1.0))
        throw std::invalid_argument("r1_indicator_lower: eta outside (0,1)");
    if (!(lambda > 0.0) || !(k_max >= 4.0 * lambda))
        throw std::invalid_argument("r1_indicator_lower: need 0 < lambda and K >= 4 lambda");

    ModelR1Lower out;
    // |j| < lambda strictly, |k| in [lambda, K]
    const long long j_hi = static_cast<long long>(std::ceil(
        static_cast<long double>(lambda) * static_cast<long double>(lambda)));  // exclusive
    const long long k_lo = static_cast<long long>(std::ceil(
        static_cast<long double>(lambda) * static_cast<long double>(lambda)));  // inclusive
    const long long k_hi = detail::norm_sq_threshold(k_max) + 1;                // exclusive

    const double j_cnt = static_cast<double>(count_ball(dim, lambda));
    const double k_cnt = static_cast<double>(detail::count_norm_le(dim, k_hi - 1) -
                                             detail::count_norm_le(dim, k_lo - 1));
    // the j loop runs over signed-permutation orbit representatives
    const double orbit_factor = std::pow(2.0, dim) * std::tgamma(dim + 1.0);
    const double est = j_cnt / orbit_factor * k_cnt;
    if (est > cost_cap)
        throw std::length_error("r1_indicator_lower: estimated " + std::to_string(est) +
                                " pairs exceed cap " + std::to_string(cost_cap));

    // kernel values per offset norm: |j-k|^2 <= (|j| + |k|)^2
    const double beta = dim - 2.0 + eta;
    const long long off_max = static_cast<long long>(std::ceil(
        (static_cast<long double>(lambda) + k_max) * (static_cast<long double>(lambda) + k_max)));
    std::vector<double> kernel(static_cast<std::size_t>(off_max) + 1);
    for (long long s = 0; s <= off_max; ++s)
        kernel[static_cast<std::size_t>(s)] =
            std::pow(1.0 + std::sqrt(static_cast<double>(s)), -beta);

    // the k annulus, materialized once
    struct KPoint {
        std::vector<int> coords;
        long long norm_sq;
    };
    std::vector<KPoint> annulus;
    detail::for_each_in_norm_range(dim, k_lo, k_hi, [&](const std::vector<int>& c) {
        long long nsq = 0;
        for (int v : c) nsq += static_cast<long long>(v) * v;
        annulus.push_back({c, nsq});
    });

    long double acc = 0.0L;
    long long pairs = 0;
    std::vector<int> rep(static_cast<std::size_t>(dim), 0);
    detail::visit_orbit_reps(dim, 0, j_hi, rep, 0, 0, 0, [&](const std::vector<int>& j) {
        long long jsq = 0;
        for (int v : j) jsq += static_cast<long long>(v) * v;
        const long long w = detail::orbit_size(j);
        long double sub = 0.0L;
        for (const auto& k : annulus) {
            long long off = 0;
            for (int c = 0; c < dim; ++c) {
                long long d = static_cast<long long>(k.coords[static_cast<std::size_t>(c)]) -
                              j[static_cast<std::size_t>(c)];
                off += d * d;
            }
            sub += kernel[static_cast<std::size_t>(off)] /
                   static_cast<double>(k.norm_sq - jsq);
        }
        acc += static_cast<long double>(w) * sub;
        pairs += w * static_cast<long long>(annulus.size());
    });
    out.value = 2.0 * static_cast<double>(acc);
    out.pair_count = pairs;

    // k beyond K >= 4 lambda: |k|^2 - |j|^2 >= (15/16)|k|^2 and
    // |k - j| >= (3/4)|k|, against the covering bound
    // sum_{|k| > K} |k|^(-n-eta) <= 2^(n+eta) n omega_n (K/2)^(-eta)/eta
    const double tailsum = std::pow(2.0, dim + eta) * dim * unit_ball_volume(dim) *
                           std::pow(0.5 * k_max, -eta) / eta;
    out.tail_bound =
        2.0 * j_cnt * (16.0 / 15.0) * std::pow(4.0 / 3.0, beta) * tailsum;
    out.tail_fraction = out.tail_bound / std::max(out.value, 1e-300);
    return out;
}

} // namespace weyllab
