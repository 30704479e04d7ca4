#pragma once

#include <cmath>

namespace hsg::bump {

// C^infty transition step: 1 for s <= 0, 0 for s >= 1, strictly decreasing
// in between.  All derivatives vanish at both endpoints.
inline double step_down(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

// Radial cutoff profile: 1 on [0,1/2], 0 on [1,inf), non-increasing.
inline double chi(double r) {
    return step_down(2.0 * r - 1.0);
}

// Smooth frequency cutoff at level N: chi(|n|/N).
inline double chi_cutoff(double abs_n, double N) {
    return chi(abs_n / N);
}

// Fat bump: 1 on |s| <= 5/4, 0 on |s| >= 8/5.
inline double fat_bump(double s) {
    const double a = 1.25, b = 1.6;
    return step_down((std::fabs(s) - a) / (b - a));
}

// Dyadic annulus profile: fat_bump(s) - fat_bump(2s).  Supported on
// 5/8 <= |s| <= 8/5; the dyadic dilates sum to 1 away from the origin.
inline double annulus(double s) {
    return fat_bump(s) - fat_bump(2.0 * s);
}

} // namespace hsg::bump
