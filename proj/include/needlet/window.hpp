#pragma once

#include <cmath>

namespace needlet {

/// C^infinity cutoff: 1 on [0,1/2], 0 on [1,infinity), and a smooth monotone
/// bump-quotient transition g(2(1-t)) / (g(2(1-t)) + g(2t-1)) in between,
/// with g(u) = exp(-1/u) for u > 0 and 0 otherwise.
struct Window {
    static double bump(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

    double operator()(double t) const {
        if (t <= 0.5) return 1.0;
        if (t >= 1.0) return 0.0;
        double up = bump(2.0 * (1.0 - t));
        double dn = bump(2.0 * t - 1.0);
        return up / (up + dn);
    }
};

inline double window_a(double t) { return Window{}(t); }

/// c(t) = sqrt(a(t/2) - a(t)); nonnegative since a is nonincreasing.
/// Supported on (1/2, 2) with c(1) = 1.
inline double window_c(double t) {
    double diff = window_a(0.5 * t) - window_a(t);
    return diff > 0.0 ? std::sqrt(diff) : 0.0;
}

}  // namespace needlet
