#pragma once

// ============================================================
// Smooth compactly supported plateau profiles.
//
// psi(s) = exp(-1/s) on s > 0 extends by zero to a C^inf
// function; the ratio psi(s) / (psi(s) + psi(1-s)) climbs from
// 0 to 1 on [0,1] with all derivatives vanishing at both ends.
// Profiles built from it are exactly 1 on the plateau and
// exactly 0 from the support radius on, which the lattice sums
// and quadrature cutoffs rely on.
// ============================================================

#include <cmath>
#include <stdexcept>

namespace weyllab {

// 0 for s <= 0, 1 for s >= 1, smooth monotone in between.
inline double smooth_ramp(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    double rise = std::exp(-1.0 / s);
    double fall = std::exp(-1.0 / (1.0 - s));
    return rise / (rise + fall);
}

// Radial profile: 1 on [0, plateau], smooth descent on
// (plateau, support), 0 from support on.
class BumpProfile {
public:
    BumpProfile(double support_radius, double plateau_radius)
        : support_(support_radius), plateau_(plateau_radius) {
        if (!(support_ > 0.0) || !(plateau_ >= 0.0) || !(plateau_ < support_))
            throw std::invalid_argument("BumpProfile: need 0 <= plateau < support");
    }

    // Plateau fills the inner half of the support.
    static BumpProfile standard(double support_radius) {
        return BumpProfile(support_radius, support_radius / 2.0);
    }

    double value(double r) const {
        r = std::abs(r);
        if (r <= plateau_) return 1.0;
        if (r >= support_) return 0.0;
        return smooth_ramp((support_ - r) / (support_ - plateau_));
    }

    double operator()(double r) const { return value(r); }

    double support() const { return support_; }
    double plateau() const { return plateau_; }

private:
    double support_;
    double plateau_;
};

} // namespace weyllab
