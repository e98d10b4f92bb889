#pragma once

// Bound diagnostics.  Each routine sweeps a grid of inputs, forms the
// ratio of an observed spectral quantity to its conjectured envelope,
// and reports the worst case.  Ratios are reported raw: a bound that
// fails at desk scale shows up as a large max_ratio, not as a clipped
// number.  Thresholds are supplied by the caller; a report with no
// threshold applied passes vacuously.

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "weyllab/potential.hpp"
#include "weyllab/spectral.hpp"

namespace weyllab {

// ============================================================
// Exponent bookkeeping for spectral projector bounds.
// ============================================================

// Growth exponent sigma(p) governing ||E_lambda||_{2 -> p}: the max of
// the oscillatory branch (n-1)/2 * (1/2 - 1/p) and the concentration
// branch (n-1)/2 - n/p.  p = infinity is allowed; both branches are
// affine in 1/p and meet at p = 2(n+1)/(n-1).
inline double sogge_exponent(int dim, double p) {
    if (dim < 1) throw std::invalid_argument("sogge_exponent: dim must be >= 1");
    if (!(p >= 2.0)) throw std::invalid_argument("sogge_exponent: need p >= 2");
    const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
    const double osc = 0.5 * (dim - 1) * (0.5 - ip);
    const double conc = 0.5 * (dim - 1) - dim * ip;
    return std::max(osc, conc);
}

// Companion Lebesgue exponent p0 = 2n/(n-2+eta): squared eigenfunctions
// in L^{p0/2} pair by Hoelder against the critical L^{n/(2-eta)} class
// that contains the singular potential.
inline double holder_companion_p(int dim, double eta) {
    if (dim < 2) throw std::invalid_argument("holder_companion_p: dim must be >= 2");
    if (!(eta > 0.0 && eta < 1.0))
        throw std::invalid_argument("holder_companion_p: eta in (0,1)");
    return 2.0 * dim / (dim - 2.0 + eta);
}

// ============================================================
// Report container.
// ============================================================

struct BoundReport {
    std::string name;
    std::vector<std::pair<std::string, double>> params;
    // One row per swept input: (label, ratio).
    std::vector<std::pair<std::string, double>> rows;
    double max_ratio = 0.0;
    std::string argmax;
    std::vector<std::string> flags;
    // NaN until apply_threshold; pass is vacuous in that state.
    double threshold = std::numeric_limits<double>::quiet_NaN();
    bool pass = true;

    void apply_threshold(double thr) {
        threshold = thr;
        pass = max_ratio <= thr;
    }
};

namespace detail {

inline std::string point_label(std::size_t idx, const std::vector<double>& x) {
    std::ostringstream os;
    os << "x[" << idx << "]=(";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
    os << ")";
    return os.str();
}

inline void finalize_rows(BoundReport& rep) {
    for (const auto& [label, ratio] : rep.rows) {
        if (rep.argmax.empty() || ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.argmax = label;
        }
    }
}

inline void require_grid(const SpectralData& sd,
                         const std::vector<std::vector<double>>& x_grid,
                         const char* who) {
    if (x_grid.empty())
        throw std::invalid_argument(std::string(who) + ": empty point grid");
    for (const auto& x : x_grid)
        if (static_cast<int>(x.size()) != sd.dim())
            throw std::invalid_argument(std::string(who) + ": point dimension mismatch");
}

}  // namespace detail

// ============================================================
// Evaluation grids.
// ============================================================

// Uniform lattice on the torus, per_axis points per axis but never more
// than 4096 points total, with x0 and its antipode appended so the
// sweep always probes the singularity and the farthest point from it.
inline std::vector<std::vector<double>> diagnostic_grid(
    int dim, const std::vector<double>& x0, int per_axis = 32) {
    if (dim < 1) throw std::invalid_argument("diagnostic_grid: dim must be >= 1");
    if (static_cast<int>(x0.size()) != dim)
        throw std::invalid_argument("diagnostic_grid: x0 dimension mismatch");
    if (per_axis < 1) throw std::invalid_argument("diagnostic_grid: per_axis must be >= 1");

    // Shrink until per_axis^dim fits the point cap.
    const long long cap = 4096;
    long long total;
    do {
        total = 1;
        for (int i = 0; i < dim; ++i) {
            total *= per_axis;
            if (total > cap) break;
        }
        if (total > cap) --per_axis;
    } while (total > cap && per_axis >= 1);

    std::vector<std::vector<double>> grid;
    grid.reserve(static_cast<std::size_t>(total) + 2);
    const double step = 2.0 * M_PI / per_axis;
    std::vector<int> idx(dim, 0);
    for (;;) {
        std::vector<double> x(dim);
        for (int i = 0; i < dim; ++i) x[i] = idx[i] * step;
        grid.push_back(std::move(x));
        int i = 0;
        while (i < dim && ++idx[i] == per_axis) idx[i++] = 0;
        if (i == dim) break;
    }
    grid.push_back(x0);
    std::vector<double> anti(x0);
    for (double& v : anti) v = std::fmod(v + M_PI, 2.0 * M_PI);
    grid.push_back(std::move(anti));
    return grid;
}

// ============================================================
// Spectral band concentration.
// ============================================================

// max over the grid of sum_{tau_k in [lambda, lambda+1)} |e_k(x)|^2,
// divided by lambda^{n-1}.  The whole band must sit below the
// reliability cutoff or the sum is Galerkin garbage.
inline BoundReport band_ratio(const SpectralData& sd, double lambda,
                              const std::vector<std::vector<double>>& x_grid) {
    if (!(lambda > 0.0)) throw std::invalid_argument("band_ratio: lambda must be > 0");
    if (!(lambda + 1.0 <= sd.reliable_cutoff()))
        throw std::invalid_argument(
            "band_ratio: band top exceeds the reliability cutoff");
    detail::require_grid(sd, x_grid, "band_ratio");

    const double lo = lambda * lambda;
    const double hi = (lambda + 1.0) * (lambda + 1.0);
    std::vector<double> w(sd.size(), 0.0);
    long long members = 0;
    for (std::size_t k = 0; k < sd.size(); ++k) {
        const double s = sd.shifted_eigenvalue(k);
        if (s >= lo && s < hi) {
            w[k] = 1.0;
            ++members;
        }
    }

    BoundReport rep;
    rep.name = "band_ratio";
    rep.params = {{"lambda", lambda},
                  {"band_members", static_cast<double>(members)},
                  {"cutoff", sd.basis().cutoff}};
    if (members == 0) rep.flags.push_back("empty_band");

    const double denom = std::pow(lambda, sd.dim() - 1);
    const std::vector<double> diag = weighted_diag(sd, w, x_grid);
    rep.rows.reserve(x_grid.size());
    for (std::size_t p = 0; p < x_grid.size(); ++p)
        rep.rows.emplace_back(detail::point_label(p, x_grid[p]), diag[p] / denom);
    detail::finalize_rows(rep);
    return rep;
}

// ============================================================
// Pointwise projector bound.
// ============================================================

// max over the grid of E_lambda(x, x) / lambda^n; for the free lattice
// this is (2 pi)^{-n} N0(lambda) / lambda^n at every x.
inline BoundReport rough_bound_ratio(const SpectralData& sd, double lambda,
                                     const std::vector<std::vector<double>>& x_grid) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("rough_bound_ratio: lambda must be > 0");
    if (!(lambda <= sd.reliable_cutoff()))
        throw std::invalid_argument(
            "rough_bound_ratio: lambda exceeds the reliability cutoff");
    detail::require_grid(sd, x_grid, "rough_bound_ratio");

    std::vector<double> w(sd.size(), 0.0);
    const long long cnt = eig_count(sd, lambda);
    for (long long k = 0; k < cnt; ++k) w[static_cast<std::size_t>(k)] = 1.0;

    BoundReport rep;
    rep.name = "rough_bound_ratio";
    rep.params = {{"lambda", lambda},
                  {"eig_count", static_cast<double>(cnt)},
                  {"cutoff", sd.basis().cutoff}};

    const double denom = std::pow(lambda, sd.dim());
    const std::vector<double> diag = weighted_diag(sd, w, x_grid);
    rep.rows.reserve(x_grid.size());
    for (std::size_t p = 0; p < x_grid.size(); ++p)
        rep.rows.emplace_back(detail::point_label(p, x_grid[p]), diag[p] / denom);
    detail::finalize_rows(rep);
    return rep;
}

// ============================================================
// Heat kernel against the Gaussian envelope.
// ============================================================

// e^{-tH}(x, y) = sum_k e^{-t lambda_k} e_k(x) conj(e_k(y)) on the raw
// spectrum; real because the eigenbasis splits into cos/sin pairs.
inline double heat_pair(const SpectralData& sd, double t,
                        const std::vector<double>& x,
                        const std::vector<double>& y) {
    if (!(t > 0.0)) throw std::invalid_argument("heat_pair: t must be > 0");
    const EigenfunctionAmplitudes ax = eigenfunction_amplitudes(sd, x);
    const EigenfunctionAmplitudes ay = eigenfunction_amplitudes(sd, y);
    long double acc = 0.0L;
    for (std::size_t k = 0; k < sd.size(); ++k)
        acc += static_cast<long double>(std::exp(-t * sd.raw_eigenvalue(k))) *
               (static_cast<long double>(ax.re[k]) * ay.re[k] +
                static_cast<long double>(ax.im[k]) * ay.im[k]);
    return static_cast<double>(acc);
}

// max over (t, pair) of e^{-tH}(x, y) / (t^{-n/2} e^{-c d(x,y)^2 / t}).
// t >= 4 / Lambda^2 is the hard floor.  Beyond it, a time is flagged
// when the Galerkin-unreliable modes above the reliability cutoff
// could still carry a 1e-3 fraction of the free diagonal: their count
// times e^{-t cutoff^2}, against (pi/t)^{n/2}.  Those modes mix
// incoherently, so at flagged times far-separated pairs divide
// O(e^{-t cutoff^2}) noise by an astronomically small envelope and the
// ratio is meaningless.  The count ignores the coupling strength, so
// the flag is conservative for weak potentials: gamma = 0 data can
// still be accurate at flagged times.  Even at clean times the
// computed kernel carries a truncation noise floor, so a far pair
// whose envelope sits below that floor reports sign noise; rows are
// kept raw either way.
inline BoundReport heat_bound_ratio(
    const SpectralData& sd, const std::vector<double>& t_grid,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pair_grid,
    double c = 0.125) {
    if (!(c > 0.0)) throw std::invalid_argument("heat_bound_ratio: c must be > 0");
    if (t_grid.empty() || pair_grid.empty())
        throw std::invalid_argument("heat_bound_ratio: empty grid");
    const double cut = sd.basis().cutoff;
    const double t_min = 4.0 / (cut * cut);
    for (double t : t_grid)
        if (!(t >= t_min && t <= 1.0))
            throw std::invalid_argument(
                "heat_bound_ratio: t outside [4 / cutoff^2, 1]");
    for (const auto& [x, y] : pair_grid)
        if (static_cast<int>(x.size()) != sd.dim() ||
            static_cast<int>(y.size()) != sd.dim())
            throw std::invalid_argument("heat_bound_ratio: pair dimension mismatch");

    const int n = sd.dim();
    BoundReport rep;
    rep.name = "heat_bound_ratio";
    rep.params = {{"c", c},
                  {"cutoff", cut},
                  {"pairs", static_cast<double>(pair_grid.size())}};

    const double rel = sd.reliable_cutoff();
    const double unreliable =
        static_cast<double>(sd.size()) -
        static_cast<double>(eig_count(sd, rel));
    for (double t : t_grid) {
        if (unreliable * std::exp(-t * rel * rel) >
            1e-3 * std::pow(M_PI / t, 0.5 * n)) {
            std::ostringstream os;
            os << "truncation_dominated:t=" << t;
            rep.flags.push_back(os.str());
        }
        for (std::size_t p = 0; p < pair_grid.size(); ++p) {
            const auto& [x, y] = pair_grid[p];
            const double d = torus_distance(x, y);
            const double envelope =
                std::pow(t, -0.5 * n) * std::exp(-c * d * d / t);
            std::ostringstream os;
            os << "t=" << t << " pair[" << p << "] d=" << d;
            rep.rows.emplace_back(os.str(), heat_pair(sd, t, x, y) / envelope);
        }
    }
    detail::finalize_rows(rep);
    return rep;
}

}  // namespace weyllab
