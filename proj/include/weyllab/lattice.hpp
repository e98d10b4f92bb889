#pragma once
// Exact enumeration and counting of integer lattice points in balls, shells,
// annuli and spherical caps of Z^n.  Everything here is integer arithmetic on
// squared norms; a real radius r is reduced to the integer threshold
// floor(r^2), so "radius exactly at a lattice norm" includes that shell.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace weyllab {

// Volume of the unit ball in R^n.
inline double unit_ball_volume(int dim) {
    if (dim < 1) throw std::invalid_argument("unit_ball_volume: dim must be >= 1");
    return std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
}

// Largest y >= 0 with y*y <= v (v >= 0).
inline long long isqrt_floor(long long v) {
    if (v < 0) throw std::invalid_argument("isqrt_floor: negative argument");
    long long y = static_cast<long long>(std::sqrt(static_cast<double>(v)));
    while (y > 0 && y * y > v) --y;
    while ((y + 1) * (y + 1) <= v) ++y;
    return y;
}

// Smallest y >= 0 with y*y >= v.
inline long long ceil_sqrt(long long v) {
    if (v <= 0) return 0;
    long long y = isqrt_floor(v);
    return (y * y == v) ? y : y + 1;
}

namespace detail {

// Reduce a real radius to the inclusive integer squared-norm threshold.
inline long long norm_sq_threshold(double radius) {
    if (!(radius >= 0.0)) throw std::invalid_argument("radius must be >= 0");
    long double r2 = static_cast<long double>(radius) * static_cast<long double>(radius);
    return static_cast<long long>(std::floor(r2));
}

// #{x in Z^d : |x|^2 <= t} by slice recursion over the first coordinate.
inline long long count_norm_le(int d, long long t) {
    if (t < 0) return 0;
    if (d == 1) return 2 * isqrt_floor(t) + 1;
    long long s = isqrt_floor(t);
    long long total = count_norm_le(d - 1, t); // x1 = 0 slice
    for (long long x = 1; x <= s; ++x)
        total += 2 * count_norm_le(d - 1, t - x * x);
    return total;
}

// Visit every v in Z^d with lo <= |v|^2 < hi.  The visitor receives the
// coordinate array; it must copy what it needs.
template <typename F>
inline void visit_norm_range(int d, long long lo, long long hi, std::vector<int>& coords,
                             int axis, long long partial, F&& fn) {
    if (axis == d - 1) {
        // last axis: need lo - partial <= x^2 < hi - partial
        long long a = lo - partial, b = hi - partial;
        if (b <= 0) return;
        long long xmax = isqrt_floor(b - 1);
        long long xmin = (a <= 0) ? 0 : ceil_sqrt(a);
        if (xmin > xmax) return;
        for (long long x = xmin; x <= xmax; ++x) {
            coords[axis] = static_cast<int>(x);
            fn(coords);
            if (x != 0) {
                coords[axis] = static_cast<int>(-x);
                fn(coords);
            }
        }
        return;
    }
    long long b = hi - partial;
    if (b <= 0) return;
    long long xmax = isqrt_floor(b - 1);
    for (long long x = -xmax; x <= xmax; ++x) {
        coords[axis] = static_cast<int>(x);
        visit_norm_range(d, lo, hi, coords, axis + 1, partial + x * x, fn);
    }
}

template <typename F>
inline void for_each_in_norm_range(int dim, long long lo, long long hi, F&& fn) {
    if (dim < 1) throw std::invalid_argument("for_each_in_norm_range: dim must be >= 1");
    std::vector<int> coords(static_cast<size_t>(dim), 0);
    visit_norm_range(dim, lo, hi, coords, 0, 0, fn);
}

} // namespace detail

// #{j in Z^dim : |j| <= radius}.
inline long long count_ball(int dim, double radius) {
    if (dim < 1) throw std::invalid_argument("count_ball: dim must be >= 1");
    return detail::count_norm_le(dim, detail::norm_sq_threshold(radius));
}

// #{j in Z^dim : |j|^2 == norm_sq}.
inline long long shell_multiplicity(int dim, long long norm_sq) {
    if (dim < 1) throw std::invalid_argument("shell_multiplicity: dim must be >= 1");
    if (norm_sq < 0) return 0;
    if (dim == 1) {
        if (norm_sq == 0) return 1;
        long long s = isqrt_floor(norm_sq);
        return (s * s == norm_sq) ? 2 : 0;
    }
    long long s = isqrt_floor(norm_sq);
    long long total = shell_multiplicity(dim - 1, norm_sq);
    for (long long x = 1; x <= s; ++x)
        total += 2 * shell_multiplicity(dim - 1, norm_sq - x * x);
    return total;
}

// count_ball minus the Weyl main term omega_n * r^n (torus volume (2*pi)^n
// against the (2*pi)^{-n} density leaves exactly omega_n).
inline double weyl_remainder(int dim, double radius) {
    double main = unit_ball_volume(dim) * std::pow(radius, dim);
    return static_cast<double>(count_ball(dim, radius)) - main;
}

struct LatticePoint {
    std::vector<int> coords;
    long long norm_sq = 0;
};

struct LatticeBasis {
    int dim = 0;
    double cutoff = 0.0;
    std::vector<LatticePoint> points; // sorted by (norm_sq, lexicographic coords)
};

// All lattice points with |j| <= radius, canonically ordered.  Refuses to
// materialize more than memory_cap points (default 2e7) so a typo'd radius
// fails fast instead of exhausting memory.
inline LatticeBasis enumerate_ball(int dim, double radius, long long memory_cap = 20000000) {
    if (dim < 1) throw std::invalid_argument("enumerate_ball: dim must be >= 1");
    long long n = count_ball(dim, radius);
    if (n > memory_cap)
        throw std::length_error("enumerate_ball: " + std::to_string(n) +
                                " points exceed memory cap " + std::to_string(memory_cap));
    LatticeBasis basis;
    basis.dim = dim;
    basis.cutoff = radius;
    basis.points.reserve(static_cast<size_t>(n));
    long long t = detail::norm_sq_threshold(radius);
    detail::for_each_in_norm_range(dim, 0, t + 1, [&](const std::vector<int>& c) {
        LatticePoint p;
        p.coords = c;
        p.norm_sq = 0;
        for (int v : c) p.norm_sq += static_cast<long long>(v) * v;
        basis.points.push_back(std::move(p));
    });
    std::sort(basis.points.begin(), basis.points.end(),
              [](const LatticePoint& a, const LatticePoint& b) {
                  if (a.norm_sq != b.norm_sq) return a.norm_sq < b.norm_sq;
                  return a.coords < b.coords;
              });
    return basis;
}

// Dyadic bucket t covers norms in [2^{t-1}, 2^{t+1}); bucket 0 covers [0, 2).
// Buckets overlap by design: "v ~ 2^t" is a covering relation, not a
// partition.
struct DyadicWindow {
    double lo = 0.0, hi = 0.0;
};

inline DyadicWindow dyadic_window(int t) {
    if (t < 0) throw std::invalid_argument("dyadic_window: bucket must be >= 0");
    DyadicWindow w;
    w.lo = (t == 0) ? 0.0 : std::ldexp(1.0, t - 1);
    w.hi = std::ldexp(1.0, t + 1);
    return w;
}

inline std::string dyadic_window_note() {
    return "dyadic bucket t: [2^(t-1), 2^(t+1)); bucket 0: [0,2)";
}

// Census of the pair set
//   S = {(j,k) : lambda/2 < |j| < lambda <= |k| < 2 lambda,
//        |k - j| in bucket m,  |k| - |j| in bucket ell}
// together with the anisotropic counting bounds it is compared against:
//   #J <= lambda^{n-1} (2^ell + 1),  max_j #K(j) <= 2^{(n-1)m} (2^ell + 1),
//   #S <= lambda^{n-1} 2^{(n-1)m} (2^ell + 1)^2.
struct AnnulusCensus {
    int dim = 0;
    double lambda = 0.0;
    int ell = 0, m = 0;
    long long j_count = 0;    // j with at least one partner
    long long max_k_count = 0; // max over j of #K(j)
    long long pair_count = 0; // #S
    double j_bound = 0.0, k_bound = 0.0, s_bound = 0.0;
    double j_ratio = 0.0, k_ratio = 0.0, s_ratio = 0.0;
    std::string window_note;
};

namespace detail {

// Signed-permutation orbit size of a sorted nonnegative coordinate vector:
// permutations of the multiset times 2^(number of nonzero entries).
inline long long orbit_size(const std::vector<int>& sorted_coords) {
    // build n!/prod(mult!) incrementally: adding the i-th element multiplies
    // by i and divides by the length of the equal-run it extends
    long long perms = 1, run = 1;
    for (size_t i = 1; i <= sorted_coords.size(); ++i) {
        run = (i >= 2 && sorted_coords[i - 1] == sorted_coords[i - 2]) ? run + 1 : 1;
        perms = perms * static_cast<long long>(i) / run;
    }
    long long signs = 1;
    for (int v : sorted_coords)
        if (v != 0) signs *= 2;
    return perms * signs;
}

// Visit one representative per signed-permutation orbit with
// lo <= |j|^2 < hi: coordinates 0 <= c_1 <= c_2 <= ... <= c_d.
template <typename F>
inline void visit_orbit_reps(int d, long long lo, long long hi, std::vector<int>& coords,
                             int axis, long long partial, int minval, F&& fn) {
    if (axis == d) {
        if (partial >= lo) fn(coords);
        return;
    }
    long long b = hi - partial;
    if (b <= 0) return;
    // remaining axes are >= x each; prune with (d-axis) copies of x^2
    for (long long x = minval;; ++x) {
        long long need = partial + x * x;
        if (need >= hi) break;
        coords[axis] = static_cast<int>(x);
        visit_orbit_reps(d, lo, hi, coords, axis + 1, need, static_cast<int>(x), fn);
    }
}

} // namespace detail

inline AnnulusCensus annulus_census(int dim, double lambda, int ell, int m,
                                    double cost_cap = 4e9) {
    if (dim < 1) throw std::invalid_argument("annulus_census: dim must be >= 1");
    if (!(lambda > 0)) throw std::invalid_argument("annulus_census: lambda must be > 0");
    AnnulusCensus out;
    out.dim = dim;
    out.lambda = lambda;
    out.ell = ell;
    out.m = m;
    out.window_note = dyadic_window_note();
    DyadicWindow wl = dyadic_window(ell), wm = dyadic_window(m);

    // m-window on |k-j| in exact squared-integer form
    long long m2lo = static_cast<long long>(std::llround(wm.lo * wm.lo));
    long long m2hi = static_cast<long long>(std::llround(wm.hi * wm.hi));

    long double lam = lambda;
    long long j2lo = static_cast<long long>(std::floor(lam * lam / 4.0L)) + 1; // |j|^2 > lambda^2/4
    long long j2hi = static_cast<long long>(std::ceil(lam * lam));             // |j|^2 < lambda^2

    // cost estimate: candidate j's times the cheaper of the two k strategies
    double vol_off = unit_ball_volume(dim) * (std::pow(wm.hi, dim) - std::pow(wm.lo, dim));
    double vol_ann = unit_ball_volume(dim) *
                     (std::pow(std::min(2.0 * lambda, lambda + wl.hi), dim) -
                      std::pow(lambda, dim));
    double j_cand = static_cast<double>(detail::count_norm_le(dim, j2hi - 1) -
                                        detail::count_norm_le(dim, std::max(0LL, j2lo - 1)));
    double est = j_cand * std::min(vol_off, vol_ann) /
                 std::max(1.0, std::pow(2.0, dim)); // orbit reduction, coarse
    if (est > cost_cap)
        throw std::length_error("annulus_census: estimated cost " + std::to_string(est) +
                                " exceeds cap " + std::to_string(cost_cap));

    std::vector<int> rep(static_cast<size_t>(dim), 0);
    detail::visit_orbit_reps(dim, j2lo, j2hi, rep, 0, 0, 0, [&](const std::vector<int>& j) {
        long long jsq = 0;
        for (int v : j) jsq += static_cast<long long>(v) * v;
        long double jn = std::sqrt(static_cast<long double>(jsq));
        // k-norm window: [lambda, 2 lambda) intersect [|j| + wl.lo, |j| + wl.hi)
        long double klo = std::max<long double>(lam, jn + wl.lo);
        long double khi = std::min<long double>(2.0L * lam, jn + wl.hi);
        if (klo >= khi) return;
        long long k2lo = static_cast<long long>(std::ceil(klo * klo));  // inclusive
        long long k2hi = static_cast<long long>(std::ceil(khi * khi));  // exclusive
        if (k2lo >= k2hi) return;

        long long cnt = 0;
        double this_ann = unit_ball_volume(dim) *
                          (std::pow(static_cast<double>(khi), dim) -
                           std::pow(static_cast<double>(klo), dim));
        if (vol_off <= this_ann) {
            // enumerate offsets d with |d|^2 in the m-window, k = j + d
            detail::for_each_in_norm_range(dim, m2lo, m2hi, [&](const std::vector<int>& d) {
                long long ksq = 0;
                for (int a = 0; a < dim; ++a) {
                    long long kc = static_cast<long long>(j[static_cast<size_t>(a)]) +
                                   d[static_cast<size_t>(a)];
                    ksq += kc * kc;
                }
                if (ksq >= k2lo && ksq < k2hi) ++cnt;
            });
        } else {
            // enumerate k in the norm window, test the offset
            detail::for_each_in_norm_range(dim, k2lo, k2hi, [&](const std::vector<int>& k) {
                long long dsq = 0;
                for (int a = 0; a < dim; ++a) {
                    long long dc = static_cast<long long>(k[static_cast<size_t>(a)]) -
                                   j[static_cast<size_t>(a)];
                    dsq += dc * dc;
                }
                if (dsq >= m2lo && dsq < m2hi) ++cnt;
            });
        }
        if (cnt > 0) {
            long long w = detail::orbit_size(j);
            out.j_count += w;
            out.pair_count += w * cnt;
            out.max_k_count = std::max(out.max_k_count, cnt);
        }
    });

    double twol = std::ldexp(1.0, ell) + 1.0;
    out.j_bound = std::pow(lambda, dim - 1) * twol;
    out.k_bound = std::pow(2.0, (dim - 1) * m) * twol;
    out.s_bound = std::pow(lambda, dim - 1) * std::pow(2.0, (dim - 1) * m) * twol * twol;
    out.j_ratio = out.j_count / out.j_bound;
    out.k_ratio = out.max_k_count / out.k_bound;
    out.s_ratio = out.pair_count / out.s_bound;
    return out;
}

// Largest (ell, m) buckets that can meet a nonempty census at this lambda:
// |k|-|j| < 3 lambda / 2 and |k-j| < 3 lambda.
inline int max_admissible_ell(double lambda) {
    int t = 0;
    while (dyadic_window(t + 1).lo < 1.5 * lambda) ++t;
    return t;
}

inline int max_admissible_m(double lambda) {
    int t = 0;
    while (dyadic_window(t + 1).lo < 3.0 * lambda) ++t;
    return t;
}

// Cap census on the sphere |j|^2 = norm_sq: the maximal number of shell
// points within Euclidean distance cap_radius (inclusive) of a shell point,
// and a center attaining it.
struct CapCensus {
    int dim = 0;
    long long norm_sq = 0;
    double cap_radius = 0.0;
    long long max_count = 0;
    std::vector<int> center;  // attaining center (canonical order); empty if none
    bool empty_sphere = false;
};

inline CapCensus cap_count(int dim, long long norm_sq, double cap_radius) {
    if (dim < 1) throw std::invalid_argument("cap_count: dim must be >= 1");
    if (norm_sq < 0) throw std::invalid_argument("cap_count: norm_sq must be >= 0");
    if (!(cap_radius >= 0)) throw std::invalid_argument("cap_count: cap_radius must be >= 0");
    CapCensus out;
    out.dim = dim;
    out.norm_sq = norm_sq;
    out.cap_radius = cap_radius;
    std::vector<std::vector<int>> shell;
    detail::for_each_in_norm_range(dim, norm_sq, norm_sq + 1,
                                   [&](const std::vector<int>& p) { shell.push_back(p); });
    if (shell.empty()) {
        out.empty_sphere = true;
        return out;
    }
    std::sort(shell.begin(), shell.end());
    long double cr2 = static_cast<long double>(cap_radius) * cap_radius;
    for (const auto& c : shell) {
        long long cnt = 0;
        for (const auto& p : shell) {
            long long d2 = 0;
            for (int a = 0; a < dim; ++a) {
                long long d = static_cast<long long>(p[static_cast<size_t>(a)]) -
                              c[static_cast<size_t>(a)];
                d2 += d * d;
            }
            if (static_cast<long double>(d2) <= cr2) ++cnt;
        }
        if (cnt > out.max_count) {
            out.max_count = cnt;
            out.center = c;
        }
    }
    return out;
}

} // namespace weyllab
