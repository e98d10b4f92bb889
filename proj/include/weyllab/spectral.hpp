#pragma once

// ============================================================
// Dense Galerkin spectral data for H = -Laplacian + V on the
// flat torus, in the orthonormal plane-wave basis
//
//     e_j(x) = (2 pi)^(-n/2) exp(i j.x),  j in Z^n, |j| <= L.
//
// The potential is radial about its center and the center is
// folded into evaluation points rather than the basis, so
//
//     H_ab = |j_a|^2 delta_ab + (2 pi)^(-n) Vhat(j_a - j_b)
//
// is real symmetric.  Eigenvalues are kept raw (ascending, as
// LAPACK returns them); downstream square-root frequencies use
// tau_k = sqrt(lambda_k + shift) with shift = max(0, -lambda_min),
// the least nonnegative shift that makes every frequency real.
// Eigenvalues above (L/2)^2 sit in the truncation-polluted top of
// the box and are flagged unreliable by reliable_cutoff().
// ============================================================

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "weyllab/lattice.hpp"
#include "weyllab/potential.hpp"

extern "C" {
void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a, const int* lda,
             double* w, double* work, const int* lwork, int* iwork, const int* liwork,
             int* info);
void dgemm_(const char* transa, const char* transb, const int* m, const int* n, const int* k,
            const double* alpha, const double* a, const int* lda, const double* b,
            const int* ldb, const double* beta, double* c, const int* ldc);
}

namespace weyllab {

// Potential part alone: M_ab = (2 pi)^(-n) Vhat(j_a - j_b), column
// major.  The Fourier table is pre-extended over representable
// offset norms so the assembly loop stays a dense array read.
inline std::vector<double> potential_matrix(const LatticeBasis& basis,
                                            const FourierTable& table) {
    if (basis.dim != table.dim())
        throw std::invalid_argument("potential_matrix: basis/table dimension mismatch");
    const std::size_t nb = basis.points.size();
    if (nb == 0) throw std::invalid_argument("potential_matrix: empty basis");

    long long max_off = 0;
    for (const auto& p : basis.points) max_off = std::max(max_off, p.norm_sq);
    max_off *= 4; // |j - k|^2 <= (|j| + |k|)^2 <= 4 max |j|^2
    table.ensure_up_to(max_off);
    std::vector<double> off_value(static_cast<std::size_t>(max_off) + 1, 0.0);
    const double scale = std::pow(2.0 * M_PI, -basis.dim);
    for (long long s = 0; s <= max_off; ++s)
        if (shell_multiplicity(basis.dim, s) > 0)
            off_value[static_cast<std::size_t>(s)] = scale * table.value_at_norm_sq(s);

    std::vector<double> m(nb * nb);
    const int d = basis.dim;
    for (std::size_t b = 0; b < nb; ++b) {
        const auto& kb = basis.points[b].coords;
        for (std::size_t a = 0; a <= b; ++a) {
            const auto& ja = basis.points[a].coords;
            long long nsq = 0;
            for (int c = 0; c < d; ++c) {
                long long dc = static_cast<long long>(ja[static_cast<std::size_t>(c)]) -
                               kb[static_cast<std::size_t>(c)];
                nsq += dc * dc;
            }
            double v = off_value[static_cast<std::size_t>(nsq)];
            m[a + b * nb] = v;
            m[b + a * nb] = v;
        }
    }
    return m;
}

inline std::vector<double> hamiltonian_matrix(const LatticeBasis& basis,
                                              const FourierTable& table) {
    std::vector<double> h = potential_matrix(basis, table);
    const std::size_t nb = basis.points.size();
    for (std::size_t a = 0; a < nb; ++a)
        h[a + a * nb] += static_cast<double>(basis.points[a].norm_sq);
    return h;
}

// ============================================================
// SpectralData: basis, raw ascending eigenvalues, column-major
// eigenvectors, positivity shift.  Invariants are validated on
// construction so cache loads go through the same gate.
// ============================================================
class SpectralData {
public:
    static SpectralData from_parts(LatticeBasis basis, std::vector<double> eigenvalues,
                                   std::vector<double> vectors, std::string identity) {
        SpectralData sd;
        const std::size_t nb = basis.points.size();
        if (nb == 0) throw std::invalid_argument("spectral data: empty basis");
        if (eigenvalues.size() != nb || vectors.size() != nb * nb)
            throw std::invalid_argument("spectral data: size mismatch");
        if (!std::is_sorted(eigenvalues.begin(), eigenvalues.end()))
            throw std::invalid_argument("spectral data: eigenvalues not ascending");
        sd.basis_ = std::move(basis);
        sd.eigenvalues_ = std::move(eigenvalues);
        sd.vectors_ = std::move(vectors);
        sd.shift_ = std::max(0.0, -sd.eigenvalues_.front());
        sd.identity_ = std::move(identity);
        return sd;
    }

    int dim() const { return basis_.dim; }
    double lambda_max() const { return basis_.cutoff; }
    std::size_t size() const { return eigenvalues_.size(); }
    const LatticeBasis& basis() const { return basis_; }

    const std::vector<double>& raw_eigenvalues() const { return eigenvalues_; }
    double raw_eigenvalue(std::size_t k) const { return eigenvalues_.at(k); }
    double shift() const { return shift_; }
    double shifted_eigenvalue(std::size_t k) const {
        return std::max(0.0, eigenvalues_.at(k) + shift_);
    }
    double tau(std::size_t k) const { return std::sqrt(shifted_eigenvalue(k)); }

    // column k of the eigenvector matrix, length size()
    const double* vector(std::size_t k) const {
        if (k >= size()) throw std::out_of_range("spectral data: eigenvector index");
        return vectors_.data() + k * size();
    }
    const std::vector<double>& vectors() const { return vectors_; }

    // frequencies above half the basis radius are truncation territory
    double reliable_cutoff() const { return 0.5 * basis_.cutoff; }

    // table fingerprint + basis geometry; the cache key material
    const std::string& identity() const { return identity_; }

private:
    SpectralData() = default;

    LatticeBasis basis_;
    std::vector<double> eigenvalues_;
    std::vector<double> vectors_;
    double shift_ = 0.0;
    std::string identity_;
};

// Table fingerprint + basis geometry: the one string that names a
// decomposition, shared by the eigensolve and any cache keyed on it.
inline std::string spectral_identity(const LatticeBasis& basis,
                                     const FourierTable& table) {
    return table.fingerprint() + ";dim=" + std::to_string(basis.dim) +
           ";cutoff=" + std::to_string(basis.cutoff);
}

// Dense symmetric eigensolve.  The trace identity sum(w) = tr(H) is
// checked to 1e-9 relative on every decomposition; a violation means
// the eigensolve silently lost the matrix and is a hard error.
inline SpectralData decompose(LatticeBasis basis, const FourierTable& table,
                              long long basis_cap = 6000) {
    const std::size_t nb = basis.points.size();
    if (static_cast<long long>(nb) > basis_cap)
        throw std::length_error("decompose: basis of " + std::to_string(nb) +
                                " points exceeds cap " + std::to_string(basis_cap));
    std::vector<double> a = hamiltonian_matrix(basis, table);

    long double trace_in = 0.0L;
    for (std::size_t i = 0; i < nb; ++i) trace_in += a[i + i * nb];

    const int n = static_cast<int>(nb);
    std::vector<double> w(nb);
    int info = 0;
    int lwork = -1, liwork = -1;
    double work_query = 0.0;
    int iwork_query = 0;
    dsyevd_("V", "U", &n, a.data(), &n, w.data(), &work_query, &lwork, &iwork_query, &liwork,
            &info);
    if (info != 0) throw std::runtime_error("decompose: eigensolver workspace query failed");
    lwork = static_cast<int>(work_query);
    liwork = iwork_query;
    std::vector<double> work(static_cast<std::size_t>(lwork));
    std::vector<int> iwork(static_cast<std::size_t>(liwork));
    dsyevd_("V", "U", &n, a.data(), &n, w.data(), work.data(), &lwork, iwork.data(), &liwork,
            &info);
    if (info != 0)
        throw std::runtime_error("decompose: eigensolver failed with info " +
                                 std::to_string(info));

    long double trace_out = 0.0L;
    for (double v : w) trace_out += v;
    double defect = static_cast<double>(std::fabs(trace_out - trace_in)) /
                    std::max(1.0, static_cast<double>(std::fabs(trace_in)));
    if (defect > 1e-9)
        throw std::runtime_error("decompose: trace defect " + std::to_string(defect));

    std::string id = spectral_identity(basis, table);
    return SpectralData::from_parts(std::move(basis), std::move(w), std::move(a),
                                    std::move(id));
}

// ============================================================
// Eigenfunction evaluation.  e_k(x) = sum_a C_ak e_{j_a}(x) is
// complex; densities and weighted diagonal sums only ever need
// |e_k(x)|^2 = re^2 + im^2.  Batched over points with dgemm.
// ============================================================

namespace detail {

// cosines and sines of j_a . x_p, column-major nb x np
inline void phase_matrices(const LatticeBasis& basis,
                           const std::vector<std::vector<double>>& points, std::size_t first,
                           std::size_t count, std::vector<double>& cosm,
                           std::vector<double>& sinm) {
    const std::size_t nb = basis.points.size();
    cosm.resize(nb * count);
    sinm.resize(nb * count);
    for (std::size_t p = 0; p < count; ++p) {
        const auto& x = points[first + p];
        if (x.size() != static_cast<std::size_t>(basis.dim))
            throw std::invalid_argument("phase_matrices: point dimension mismatch");
        for (std::size_t a = 0; a < nb; ++a) {
            double dot = 0.0;
            const auto& j = basis.points[a].coords;
            for (std::size_t c = 0; c < j.size(); ++c) dot += j[c] * x[c];
            cosm[a + p * nb] = std::cos(dot);
            sinm[a + p * nb] = std::sin(dot);
        }
    }
}

// re/im = C^T * phases for a block of points
inline void amplitude_block(const SpectralData& sd, const std::vector<double>& cosm,
                            const std::vector<double>& sinm, std::size_t np,
                            std::vector<double>& re, std::vector<double>& im) {
    const int n = static_cast<int>(sd.size());
    const int p = static_cast<int>(np);
    const double one = 1.0, zero = 0.0;
    re.resize(sd.size() * np);
    im.resize(sd.size() * np);
    dgemm_("T", "N", &n, &p, &n, &one, sd.vectors().data(), &n, cosm.data(), &n, &zero,
           re.data(), &n);
    dgemm_("T", "N", &n, &p, &n, &one, sd.vectors().data(), &n, sinm.data(), &n, &zero,
           im.data(), &n);
}

constexpr std::size_t point_block = 512;

} // namespace detail

// Real and imaginary parts of e_k(x) for every k, normalization
// (2 pi)^(-n/2) included.
struct EigenfunctionAmplitudes {
    std::vector<double> re, im;
};

inline EigenfunctionAmplitudes eigenfunction_amplitudes(const SpectralData& sd,
                                                        const std::vector<double>& x) {
    std::vector<std::vector<double>> pts{x};
    std::vector<double> cosm, sinm;
    detail::phase_matrices(sd.basis(), pts, 0, 1, cosm, sinm);
    EigenfunctionAmplitudes out;
    detail::amplitude_block(sd, cosm, sinm, 1, out.re, out.im);
    const double scale = std::pow(2.0 * M_PI, -0.5 * sd.dim());
    for (double& v : out.re) v *= scale;
    for (double& v : out.im) v *= scale;
    return out;
}

// |e_k(x_p)|^2 for all k and points, row-major per point:
// out[p * size + k].
inline std::vector<double> eigenfunction_density(const SpectralData& sd,
                                                 const std::vector<std::vector<double>>& pts) {
    const std::size_t nb = sd.size();
    std::vector<double> out(pts.size() * nb);
    const double scale2 = std::pow(2.0 * M_PI, -sd.dim());
    std::vector<double> cosm, sinm, re, im;
    for (std::size_t first = 0; first < pts.size(); first += detail::point_block) {
        const std::size_t np = std::min(detail::point_block, pts.size() - first);
        detail::phase_matrices(sd.basis(), pts, first, np, cosm, sinm);
        detail::amplitude_block(sd, cosm, sinm, np, re, im);
        for (std::size_t p = 0; p < np; ++p)
            for (std::size_t k = 0; k < nb; ++k) {
                double r = re[k + p * nb], i = im[k + p * nb];
                out[(first + p) * nb + k] = scale2 * (r * r + i * i);
            }
    }
    return out;
}

// sum_k weights_k |e_k(x_p)|^2 for each point, without materializing
// the density matrix.
inline std::vector<double> weighted_diag(const SpectralData& sd,
                                         const std::vector<double>& weights,
                                         const std::vector<std::vector<double>>& pts) {
    const std::size_t nb = sd.size();
    if (weights.size() != nb) throw std::invalid_argument("weighted_diag: weight size");
    std::vector<double> out(pts.size(), 0.0);
    const double scale2 = std::pow(2.0 * M_PI, -sd.dim());
    std::vector<double> cosm, sinm, re, im;
    for (std::size_t first = 0; first < pts.size(); first += detail::point_block) {
        const std::size_t np = std::min(detail::point_block, pts.size() - first);
        detail::phase_matrices(sd.basis(), pts, first, np, cosm, sinm);
        detail::amplitude_block(sd, cosm, sinm, np, re, im);
        for (std::size_t p = 0; p < np; ++p) {
            long double acc = 0.0L;
            for (std::size_t k = 0; k < nb; ++k) {
                double r = re[k + p * nb], i = im[k + p * nb];
                acc += weights[k] * (r * r + i * i);
            }
            out[first + p] = scale2 * static_cast<double>(acc);
        }
    }
    return out;
}

// #{k : tau_k <= lambda}; raw eigenvalues are ascending so the
// threshold is a binary search on lambda^2 - shift.
inline long long eig_count(const SpectralData& sd, double lambda) {
    if (lambda < 0.0) return 0;
    const double thr = lambda * lambda - sd.shift();
    const auto& ev = sd.raw_eigenvalues();
    return std::upper_bound(ev.begin(), ev.end(), thr) - ev.begin();
}

// sum_{tau_k <= lambda} |e_k(x)|^2
inline double projector_diag(const SpectralData& sd, double lambda,
                             const std::vector<double>& x) {
    std::vector<double> w(sd.size(), 0.0);
    const long long cnt = eig_count(sd, lambda);
    for (long long k = 0; k < cnt; ++k) w[static_cast<std::size_t>(k)] = 1.0;
    return weighted_diag(sd, w, {x})[0];
}

// sum_k exp(-t lambda_k) |e_k(x)|^2 on the raw spectrum
inline double heat_diag(const SpectralData& sd, double t, const std::vector<double>& x) {
    if (!(t > 0.0)) throw std::invalid_argument("heat_diag: t must be > 0");
    std::vector<double> w(sd.size());
    for (std::size_t k = 0; k < sd.size(); ++k)
        w[k] = std::exp(-t * sd.raw_eigenvalue(k));
    return weighted_diag(sd, w, {x})[0];
}

// ============================================================
// Consistency checks.
// ============================================================

// max |C^T C - I|; O(n^3), meant for moderate sizes
inline double orthonormality_defect(const SpectralData& sd) {
    const int n = static_cast<int>(sd.size());
    const double one = 1.0, zero = 0.0;
    std::vector<double> g(sd.size() * sd.size());
    dgemm_("T", "N", &n, &n, &n, &one, sd.vectors().data(), &n, sd.vectors().data(), &n,
           &zero, g.data(), &n);
    double worst = 0.0;
    for (std::size_t b = 0; b < sd.size(); ++b)
        for (std::size_t a = 0; a < sd.size(); ++a) {
            double want = (a == b) ? 1.0 : 0.0;
            worst = std::max(worst, std::fabs(g[a + b * sd.size()] - want));
        }
    return worst;
}

// max_k |sum_x |e_k(x)|^2 (2 pi / m)^n - 1| on the uniform m^n grid.
// Plane-wave products have axis frequencies bounded by 2L, so any
// m > 2L integrates them exactly and the defect isolates eigenvector
// roundoff; m >= 4L leaves a wide margin.
inline double parseval_defect(const SpectralData& sd, int grid_per_axis) {
    if (grid_per_axis < 1) throw std::invalid_argument("parseval_defect: empty grid");
    double npts = std::pow(static_cast<double>(grid_per_axis), sd.dim());
    if (npts > 2e6)
        throw std::length_error("parseval_defect: grid of " + std::to_string(npts) +
                                " points is too large");
    const std::size_t m = static_cast<std::size_t>(grid_per_axis);
    const std::size_t total = static_cast<std::size_t>(npts);
    const std::size_t nb = sd.size();
    const double cell = std::pow(2.0 * M_PI / grid_per_axis, sd.dim());

    std::vector<long double> sums(nb, 0.0L);
    std::vector<std::vector<double>> block;
    block.reserve(detail::point_block);
    std::vector<double> x(static_cast<std::size_t>(sd.dim()), 0.0);
    std::vector<std::size_t> idx(static_cast<std::size_t>(sd.dim()), 0);
    std::vector<double> cosm, sinm, re, im;

    auto flush = [&]() {
        if (block.empty()) return;
        detail::phase_matrices(sd.basis(), block, 0, block.size(), cosm, sinm);
        detail::amplitude_block(sd, cosm, sinm, block.size(), re, im);
        for (std::size_t p = 0; p < block.size(); ++p)
            for (std::size_t k = 0; k < nb; ++k) {
                double r = re[k + p * nb], i = im[k + p * nb];
                sums[k] += static_cast<long double>(r * r + i * i);
            }
        block.clear();
    };

    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (int c = 0; c < sd.dim(); ++c) {
            idx[static_cast<std::size_t>(c)] = rem % m;
            rem /= m;
            x[static_cast<std::size_t>(c)] =
                2.0 * M_PI * static_cast<double>(idx[static_cast<std::size_t>(c)]) /
                static_cast<double>(m);
        }
        block.push_back(x);
        if (block.size() == detail::point_block) flush();
    }
    flush();

    const double scale2 = std::pow(2.0 * M_PI, -sd.dim());
    double worst = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
        double s = scale2 * static_cast<double>(sums[k]) * cell;
        worst = std::max(worst, std::fabs(s - 1.0));
    }
    return worst;
}

} // namespace weyllab
