// Tests for the log-log power-law fit.
//
// Oracles: exact power laws must be recovered to rounding with zero
// residual; a bounded multiplicative ripple moves the slope by at most
// its amplitude over a wide window; drop rules and the four-sample
// floor are exercised directly.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "weyllab/scaling_fit.hpp"

using namespace weyllab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<std::pair<double, double>> power_samples(double c, double s,
                                                     std::vector<double> lams) {
    std::vector<std::pair<double, double>> pts;
    for (double lam : lams) pts.emplace_back(lam, c * std::pow(lam, s));
    return pts;
}

}  // namespace

TEST_CASE("exact power law is recovered to rounding") {
    const auto pts = power_samples(3.0, 1.5, {2.0, 3.0, 5.0, 8.0, 13.0});
    const ScalingFit fit = fit_exponent(pts);
    REQUIRE_THAT(fit.slope, WithinAbs(1.5, 1e-12));
    REQUIRE_THAT(fit.prefactor, WithinRel(3.0, 1e-12));
    REQUIRE(fit.residual_rms <= 1e-12);
    REQUIRE(fit.sign == 1);
    REQUIRE(fit.used.size() == 5);
    REQUIRE(fit.notices.empty());
    REQUIRE(fit.window_lo == 0.0);
    REQUIRE(fit.window_hi == std::numeric_limits<double>::infinity());
}

TEST_CASE("multiplicative ripple perturbs the slope mildly") {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 40; ++i) {
        const double lam = 10.0 * std::pow(100.0, i / 39.0);
        pts.emplace_back(lam, std::pow(lam, 1.5) * (1.0 + 0.1 * std::sin(lam)));
    }
    const ScalingFit fit = fit_exponent(pts);
    REQUIRE_THAT(fit.slope, WithinAbs(1.5, 0.05));
    // Deterministic input, so the exact outcome is a regression anchor.
    REQUIRE_THAT(fit.slope, WithinRel(1.5050039503835062, 1e-12));
    REQUIRE_THAT(fit.residual_rms, WithinRel(0.068945923661921829, 1e-10));
    REQUIRE(fit.residual_rms > 0.01);
}

TEST_CASE("negative-valued data fits the magnitude and records the sign") {
    const auto pts = power_samples(-2.0, 2.0, {2.0, 3.0, 5.0, 8.0});
    const ScalingFit fit = fit_exponent(pts);
    REQUIRE_THAT(fit.slope, WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(fit.prefactor, WithinRel(2.0, 1e-12));
    REQUIRE(fit.sign == -1);
}

TEST_CASE("zero and nonfinite samples are dropped with notices") {
    auto pts = power_samples(3.0, 1.5, {2.0, 3.0, 5.0, 8.0, 13.0, 21.0});
    pts.emplace_back(6.0, 0.0);
    pts.emplace_back(7.0, std::numeric_limits<double>::quiet_NaN());
    pts.emplace_back(-1.0, 4.0);
    const ScalingFit fit = fit_exponent(pts);
    REQUIRE(fit.used.size() == 6);
    REQUIRE(fit.notices.size() == 3);
    REQUIRE(fit.notices[0].find("zero or nonfinite") != std::string::npos);
    REQUIRE(fit.notices[2].find("lambda must be positive") != std::string::npos);
    REQUIRE_THAT(fit.slope, WithinAbs(1.5, 1e-12));
}

TEST_CASE("window subselects and the four-sample floor applies") {
    const auto pts =
        power_samples(1.0, 1.0, {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0});
    const ScalingFit fit = fit_exponent(pts, 2.0, 32.0);
    REQUIRE(fit.used.size() == 5);
    REQUIRE(fit.used.front().first == 2.0);
    REQUIRE(fit.used.back().first == 32.0);
    REQUIRE_THAT(fit.slope, WithinAbs(1.0, 1e-12));

    // Window leaves three usable samples: refused.
    REQUIRE_THROWS_AS(fit_exponent(pts, 2.0, 9.0), std::invalid_argument);
    // A single sample can never pin an exponent.
    REQUIRE_THROWS_AS(fit_exponent(power_samples(1.0, 1.0, {5.0})),
                      std::invalid_argument);
    // Degenerate window.
    REQUIRE_THROWS_AS(fit_exponent(pts, 5.0, 5.0), std::invalid_argument);
}

TEST_CASE("mixed signs fall back to magnitude fitting with a warning") {
    std::vector<std::pair<double, double>> pts;
    int flip = 1;
    for (double lam : {2.0, 3.0, 5.0, 8.0, 13.0, 21.0}) {
        pts.emplace_back(lam, flip * 3.0 * std::pow(lam, 1.5));
        flip = -flip;
    }
    const ScalingFit fit = fit_exponent(pts);
    REQUIRE(fit.sign == 0);
    REQUIRE(!fit.notices.empty());
    REQUIRE(fit.notices.back().find("mixed signs") != std::string::npos);
    REQUIRE_THAT(fit.slope, WithinAbs(1.5, 1e-12));
}

TEST_CASE("identical lambdas cannot determine an exponent") {
    std::vector<std::pair<double, double>> pts(4, {7.0, 3.0});
    REQUIRE_THROWS_AS(fit_exponent(pts), std::invalid_argument);
}
