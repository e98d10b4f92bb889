// ============================================================
// Lattice counting against brute-force cube scans.
//
// The library counts by slice recursion on squared norms; the
// oracle here walks the full coordinate cube with an odometer.
// The two routes share no code, so agreement pins both.
// ============================================================

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "weyllab/lattice.hpp"

using namespace weyllab;

namespace {

// Visit every point of [-box, box]^dim.
template <typename F>
void cube_scan(int dim, long long box, F&& fn) {
    std::vector<long long> c(static_cast<size_t>(dim), -box);
    for (;;) {
        fn(c);
        int axis = 0;
        while (axis < dim && ++c[static_cast<size_t>(axis)] > box) {
            c[static_cast<size_t>(axis)] = -box;
            ++axis;
        }
        if (axis == dim) break;
    }
}

long long brute_count_ball(int dim, double radius) {
    long long box = static_cast<long long>(std::floor(radius)) + 1;
    long double r2 = static_cast<long double>(radius) * radius;
    long long n = 0;
    cube_scan(dim, box, [&](const std::vector<long long>& c) {
        long long s = 0;
        for (long long v : c) s += v * v;
        if (static_cast<long double>(s) <= r2) ++n;
    });
    return n;
}

long long brute_shell(int dim, long long norm_sq) {
    long long box = isqrt_floor(norm_sq) + 1;
    long long n = 0;
    cube_scan(dim, box, [&](const std::vector<long long>& c) {
        long long s = 0;
        for (long long v : c) s += v * v;
        if (s == norm_sq) ++n;
    });
    return n;
}

struct BruteCensus {
    long long j_count = 0, max_k = 0, pairs = 0;
};

// Direct pair loop over the spec of the census, no orbit tricks.
BruteCensus brute_census(int dim, double lambda, int ell, int m) {
    DyadicWindow wl = dyadic_window(ell), wm = dyadic_window(m);
    long long box = static_cast<long long>(std::ceil(2 * lambda)) + 1;
    std::vector<std::vector<long long>> js, ks;
    cube_scan(dim, box, [&](const std::vector<long long>& c) {
        long long s = 0;
        for (long long v : c) s += v * v;
        double r = std::sqrt(static_cast<double>(s));
        if (r > lambda / 2 && r < lambda) js.push_back(c);
        if (r >= lambda && r < 2 * lambda) ks.push_back(c);
    });
    BruteCensus out;
    for (const auto& j : js) {
        double jn = 0;
        long long jsq = 0;
        for (long long v : j) jsq += v * v;
        jn = std::sqrt(static_cast<double>(jsq));
        long long cnt = 0;
        for (const auto& k : ks) {
            long long ksq = 0, dsq = 0;
            for (size_t a = 0; a < j.size(); ++a) {
                ksq += k[a] * k[a];
                long long d = k[a] - j[a];
                dsq += d * d;
            }
            double kn = std::sqrt(static_cast<double>(ksq));
            double dn = std::sqrt(static_cast<double>(dsq));
            if (kn - jn >= wl.lo && kn - jn < wl.hi && dn >= wm.lo && dn < wm.hi) ++cnt;
        }
        if (cnt > 0) {
            ++out.j_count;
            out.pairs += cnt;
            out.max_k = std::max(out.max_k, cnt);
        }
    }
    return out;
}

} // namespace

TEST_CASE("unit ball volumes") {
    REQUIRE(unit_ball_volume(2) == Catch::Approx(M_PI).epsilon(1e-15));
    REQUIRE(unit_ball_volume(3) == Catch::Approx(4.0 * M_PI / 3.0).epsilon(1e-15));
    REQUIRE(unit_ball_volume(4) == Catch::Approx(M_PI * M_PI / 2.0).epsilon(1e-15));
    REQUIRE(unit_ball_volume(5) == Catch::Approx(8.0 * M_PI * M_PI / 15.0).epsilon(1e-14));
}

TEST_CASE("count_ball pinned values") {
    REQUIRE(count_ball(2, 1.0) == 5);
    REQUIRE(count_ball(3, 2.0) == 33);
    REQUIRE(count_ball(2, 10.0) == 317);
    REQUIRE(count_ball(2, 0.0) == 1);
    REQUIRE(count_ball(1, 3.5) == 7);
}

TEST_CASE("count_ball matches cube scan") {
    const double radii[] = {0.5, 1.0, 1.5, 2.0, 2.5, 3.7, 5.0, 6.25, 10.0};
    for (int dim = 1; dim <= 4; ++dim)
        for (double r : radii) {
            if (dim == 4 && r > 6.5) continue;
            INFO("dim=" << dim << " r=" << r);
            REQUIRE(count_ball(dim, r) == brute_count_ball(dim, r));
        }
    REQUIRE(count_ball(5, 3.0) == brute_count_ball(5, 3.0));
}

TEST_CASE("radius exactly at a lattice norm includes the shell") {
    // |j|^2 = 25 shell is in for radius 5 and out for anything below
    REQUIRE(count_ball(2, 5.0) - count_ball(2, 4.9999999) == shell_multiplicity(2, 25));
}

TEST_CASE("shell multiplicities") {
    REQUIRE(shell_multiplicity(2, 0) == 1);
    REQUIRE(shell_multiplicity(2, 25) == 12);
    REQUIRE(shell_multiplicity(2, 3) == 0);
    for (int dim = 2; dim <= 4; ++dim)
        for (long long m = 0; m <= 60; ++m) {
            INFO("dim=" << dim << " m=" << m);
            REQUIRE(shell_multiplicity(dim, m) == brute_shell(dim, m));
        }
}

TEST_CASE("shells partition the ball") {
    for (int dim = 2; dim <= 4; ++dim) {
        long long acc = 0;
        for (long long m = 0; m <= 49; ++m) acc += shell_multiplicity(dim, m);
        REQUIRE(acc == count_ball(dim, 7.0));
    }
}

TEST_CASE("weyl remainder") {
    REQUIRE(weyl_remainder(2, 0.0) == Catch::Approx(1.0).margin(1e-15));
    REQUIRE(weyl_remainder(2, 10.0) == Catch::Approx(317.0 - 100.0 * M_PI).margin(1e-12));
    // sublinear growth at desk scale: |r(lambda)| <= 4 lambda for lambda in [2, 60]
    for (double lam = 2; lam <= 60; lam += 1.37) {
        REQUIRE(std::abs(weyl_remainder(2, lam)) <= 4.0 * lam);
    }
}

TEST_CASE("enumerate_ball canonical order and content") {
    LatticeBasis b = enumerate_ball(2, 1.0);
    REQUIRE(b.points.size() == 5);
    REQUIRE(b.points[0].coords == std::vector<int>{0, 0});
    REQUIRE(b.points[1].coords == std::vector<int>{-1, 0});
    REQUIRE(b.points[2].coords == std::vector<int>{0, -1});
    REQUIRE(b.points[3].coords == std::vector<int>{0, 1});
    REQUIRE(b.points[4].coords == std::vector<int>{1, 0});

    for (int dim = 2; dim <= 4; ++dim) {
        double r = (dim == 4) ? 5.0 : 12.0;
        LatticeBasis basis = enumerate_ball(dim, r);
        REQUIRE(static_cast<long long>(basis.points.size()) == count_ball(dim, r));
        long double r2 = static_cast<long double>(r) * r;
        for (size_t i = 0; i < basis.points.size(); ++i) {
            long long s = 0;
            for (int v : basis.points[i].coords) s += static_cast<long long>(v) * v;
            REQUIRE(s == basis.points[i].norm_sq);
            REQUIRE(static_cast<long double>(s) <= r2);
            if (i > 0) {
                bool ordered =
                    basis.points[i - 1].norm_sq < basis.points[i].norm_sq ||
                    (basis.points[i - 1].norm_sq == basis.points[i].norm_sq &&
                     basis.points[i - 1].coords < basis.points[i].coords);
                REQUIRE(ordered);
            }
        }
    }
}

TEST_CASE("enumerate_ball memory cap refuses") {
    REQUIRE_THROWS_AS(enumerate_ball(2, 10.0, 100), std::length_error);
}

TEST_CASE("dyadic windows") {
    REQUIRE(dyadic_window(0).lo == 0.0);
    REQUIRE(dyadic_window(0).hi == 2.0);
    REQUIRE(dyadic_window(3).lo == 4.0);
    REQUIRE(dyadic_window(3).hi == 16.0);
    REQUIRE_THROWS_AS(dyadic_window(-1), std::invalid_argument);
}

TEST_CASE("annulus census equals brute-force pair loop") {
    struct Cfg {
        int dim;
        double lambda;
    };
    const Cfg cfgs[] = {{2, 6.5}, {2, 9.2}, {3, 4.7}};
    for (const auto& cfg : cfgs) {
        for (int ell = 0; ell <= max_admissible_ell(cfg.lambda); ++ell)
            for (int m = 0; m <= max_admissible_m(cfg.lambda); ++m) {
                AnnulusCensus a = annulus_census(cfg.dim, cfg.lambda, ell, m);
                BruteCensus b = brute_census(cfg.dim, cfg.lambda, ell, m);
                INFO("dim=" << cfg.dim << " lambda=" << cfg.lambda << " ell=" << ell
                            << " m=" << m);
                REQUIRE(a.j_count == b.j_count);
                REQUIRE(a.max_k_count == b.max_k);
                REQUIRE(a.pair_count == b.pairs);
            }
    }
}

TEST_CASE("annulus census empty window") {
    // lambda = 1.2: |k - j| < 3.6, so bucket m = 4 ([8,32)) cannot be met
    AnnulusCensus a = annulus_census(2, 1.2, 0, 4);
    REQUIRE(a.j_count == 0);
    REQUIRE(a.max_k_count == 0);
    REQUIRE(a.pair_count == 0);
    REQUIRE(a.j_ratio == 0.0);
}

TEST_CASE("annulus census cost cap refuses") {
    REQUIRE_THROWS_AS(annulus_census(3, 300.0, 8, 9, /*cost_cap=*/1e5), std::length_error);
}

TEST_CASE("cap census") {
    CapCensus one = cap_count(2, 25, 1.0);
    REQUIRE(one.max_count == 1);
    REQUIRE_FALSE(one.empty_sphere);

    CapCensus three = cap_count(2, 25, 4.0);
    REQUIRE(three.max_count == 3);

    CapCensus empty = cap_count(2, 3, 1.0);
    REQUIRE(empty.max_count == 0);
    REQUIRE(empty.empty_sphere);
    REQUIRE(empty.center.empty());

    // whole-sphere cap swallows the shell
    CapCensus all = cap_count(2, 25, 100.0);
    REQUIRE(all.max_count == shell_multiplicity(2, 25));

    // brute cross-check in three dimensions
    CapCensus c3 = cap_count(3, 9, 2.0);
    long long best = 0;
    std::vector<std::vector<long long>> shell;
    cube_scan(3, 4, [&](const std::vector<long long>& c) {
        long long s = 0;
        for (long long v : c) s += v * v;
        if (s == 9) shell.push_back(c);
    });
    for (const auto& c : shell) {
        long long cnt = 0;
        for (const auto& p : shell) {
            long long d2 = 0;
            for (size_t a = 0; a < 3; ++a) d2 += (p[a] - c[a]) * (p[a] - c[a]);
            if (d2 <= 4) ++cnt;
        }
        best = std::max(best, cnt);
    }
    REQUIRE(c3.max_count == best);
}
