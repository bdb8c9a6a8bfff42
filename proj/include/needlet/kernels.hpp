#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "needlet/geometry.hpp"
#include "needlet/window.hpp"

namespace needlet {

/// Gegenbauer polynomial C_k^nu(t) by the three-term recurrence
///   k C_k = 2(k+nu-1) t C_{k-1} - (k+2nu-2) C_{k-2},  C_0 = 1, C_1 = 2 nu t.
inline double gegenbauer(int k, double nu, double t) {
    if (k < 0) throw std::invalid_argument("gegenbauer: k must be >= 0");
    if (!(nu > 0.0)) throw std::invalid_argument("gegenbauer: nu must be positive");
    if (k == 0) return 1.0;
    double prev = 1.0;
    double cur = 2.0 * nu * t;
    for (int m = 2; m <= k; ++m) {
        double next = (2.0 * (m + nu - 1.0) * t * cur - (m + 2.0 * nu - 2.0) * prev) / m;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Chebyshev T_k(t) by recurrence (the d=1 zonal basis).
inline double chebyshev(int k, double t) {
    if (k == 0) return 1.0;
    double prev = 1.0, cur = t;
    for (int m = 2; m <= k; ++m) {
        double next = 2.0 * t * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Dimension of the degree-k eigenspace H_k(S^d).
inline long dim_Hk(int d, int k) {
    if (k < 0) throw std::invalid_argument("dim_Hk: k must be >= 0");
    if (d == 1) return k == 0 ? 1 : 2;
    if (d == 2) return 2L * k + 1;
    throw std::invalid_argument("dim_Hk: only d in {1,2}");
}

/// Laplace eigenvalue k(k+d-1) on S^d (sign dropped).
inline double eigenvalue(int d, int k) { return static_cast<double>(k) * (k + d - 1.0); }

/// Reproducing kernel L_k of H_k(S^d) as a function of the inner product:
///   d=2: (1 + k/nu) C_k^nu(t) / |S^2| with nu = 1/2,
///   d=1: 1/(2 pi) for k = 0 and cos(k arccos t)/pi otherwise
/// (the Gegenbauer normalization degenerates at nu = 0).
inline double kernel_Lk(int d, int k, double t) {
    if (k < 0) throw std::invalid_argument("kernel_Lk: k must be >= 0");
    if (d == 1) {
        if (k == 0) return 1.0 / (2.0 * kPi);
        return chebyshev(k, t) / kPi;
    }
    if (d == 2) {
        double nu = 0.5;
        return (1.0 + k / nu) * gegenbauer(k, nu, t) / sphere_measure(2);
    }
    throw std::invalid_argument("kernel_Lk: only d in {1,2}");
}

/// The manifold constants of the deviation bounds: D1 = |S^d|^{-1/2},
/// D2 = |S^d|^{-1}, and nu = (d-1)/2.
struct SphereConstants {
    double surface_measure;
    double D1;
    double D2;
    double nu;
};

inline SphereConstants sphere_constants(int d) {
    double s = sphere_measure(d);
    return SphereConstants{s, std::sqrt(1.0 / s), 1.0 / s, (d - 1.0) / 2.0};
}

enum class ScalingMode { eigenvalue, degree };

/// Smoothed projector specification: dimension, dyadic resolution level, and
/// whether the window argument is lambda_k / 2^{2j} (sections 2-4) or k / 2^j
/// (the section-6 redefinition).
struct KernelSpec {
    int d = 2;
    int j = 0;
    ScalingMode mode = ScalingMode::eigenvalue;
    Window window{};
};

/// Largest degree entering A_j / C_j for this spec (window support [0,1)).
inline int max_degree(const KernelSpec& spec) {
    if (spec.j < 0) throw std::invalid_argument("max_degree: level must be >= 0");
    double cut = std::ldexp(1.0, spec.mode == ScalingMode::eigenvalue ? 2 * spec.j : spec.j);
    int k = 0;
    while (true) {
        double arg = spec.mode == ScalingMode::eigenvalue ? eigenvalue(spec.d, k + 1) : (k + 1.0);
        if (arg >= cut) break;
        ++k;
    }
    return k;
}

inline double window_argument(const KernelSpec& spec, int k) {
    if (spec.mode == ScalingMode::eigenvalue) return eigenvalue(spec.d, k) * std::ldexp(1.0, -2 * spec.j);
    return k * std::ldexp(1.0, -spec.j);
}

/// Window weights a(.) for degrees 0..max_degree(spec).
inline std::vector<double> aj_weights(const KernelSpec& spec) {
    int kmax = max_degree(spec);
    std::vector<double> w(kmax + 1);
    for (int k = 0; k <= kmax; ++k) w[k] = spec.window(window_argument(spec, k));
    return w;
}

/// sqrt(a(.)) weights for the split kernel C_j.
inline std::vector<double> cj_weights(const KernelSpec& spec) {
    std::vector<double> w = aj_weights(spec);
    for (double& v : w) v = std::sqrt(v);
    return w;
}

/// Evaluates sum_k w_k L_k(t) by the ascending recurrence in the zonal basis
/// (Legendre for d=2, Chebyshev for d=1).
inline double zonal_eval(int d, const std::vector<double>& weights, double t) {
    if (weights.empty()) return 0.0;
    if (d == 1) {
        // L_0 = 1/(2 pi), L_k = T_k / pi; T_k(cos x) = cos(k x)
        double acc = weights[0] * 0.5;
        double prev = 1.0, cur = t;
        for (std::size_t k = 1; k < weights.size(); ++k) {
            acc += weights[k] * cur;
            double next = 2.0 * t * cur - prev;
            prev = cur;
            cur = next;
        }
        return acc / kPi;
    }
    // d=2: L_k = (2k+1) P_k / (4 pi)
    double acc = weights[0];
    double prev = 1.0, cur = t;
    for (std::size_t k = 1; k < weights.size(); ++k) {
        acc += weights[k] * (2.0 * k + 1.0) * cur;
        double next = ((2.0 * k + 1.0) * t * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return acc / sphere_measure(2);
}

/// A_j(x,y) = sum_k a(.) L_k(<x,y>). Convenience form recomputing the window
/// weights per call; hot paths precompute aj_weights once.
inline double kernel_Aj(const KernelSpec& spec, double t) { return zonal_eval(spec.d, aj_weights(spec), t); }

/// C_j(x,y) = sum_k sqrt(a(.)) L_k(<x,y>); its self-convolution is A_j.
inline double kernel_Cj(const KernelSpec& spec, double t) { return zonal_eval(spec.d, cj_weights(spec), t); }

/// Dense table of a zonal kernel sampled uniformly in the angle, with
/// Catmull-Rom interpolation. Used for the bulk scans (c0 maximization,
/// localization sweeps) where ~1e-9 relative accuracy suffices; exactness
/// tests evaluate the recurrence directly instead.
class ZonalTable {
public:
    ZonalTable() = default;

    ZonalTable(int d, const std::vector<double>& weights) {
        int kmax = static_cast<int>(weights.size()) - 1;
        n_ = std::max(1024, 280 * std::max(kmax, 1));
        step_ = kPi / static_cast<double>(n_);
        vals_.resize(static_cast<std::size_t>(n_) + 3);
        for (int i = 0; i <= n_; ++i)
            vals_[static_cast<std::size_t>(i) + 1] = zonal_eval(d, weights, std::cos(step_ * i));
        // even reflection at both ends keeps the cubic stencil consistent
        vals_[0] = vals_[2];
        vals_[static_cast<std::size_t>(n_) + 2] = vals_[static_cast<std::size_t>(n_)];
    }

    double operator()(double theta) const {
        double u = std::clamp(theta, 0.0, kPi) / step_;
        int i = std::min(static_cast<int>(u), n_ - 1);
        double f = u - i;
        const double* p = vals_.data() + i;  // 4-point Lagrange cubic on [i, i+1]
        double w0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
        double w1 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
        double w2 = -(f + 1.0) * f * (f - 2.0) / 2.0;
        double w3 = (f + 1.0) * f * (f - 1.0) / 6.0;
        return w0 * p[0] + w1 * p[1] + w2 * p[2] + w3 * p[3];
    }

    double at_inner_product(double t) const { return (*this)(std::acos(std::clamp(t, -1.0, 1.0))); }

private:
    int n_ = 0;
    double step_ = 1.0;
    std::vector<double> vals_;
};

}  // namespace needlet
