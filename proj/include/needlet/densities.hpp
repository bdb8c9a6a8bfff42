#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "needlet/estimation.hpp"
#include "needlet/geometry.hpp"
#include "needlet/kernels.hpp"
#include "needlet/quadrature.hpp"

namespace needlet {

enum class DensityKind { uniform, polynomial, falpha };

/// Benchmark densities, all zonal about `pole`: the uniform density, zonal
/// polynomial densities p(<x,pole>)/Z, and the Hoelder family
/// f_alpha = (1 - <x,pole>)^{alpha/2} / Z with non-even alpha.
struct TestDensity {
    DensityKind kind = DensityKind::uniform;
    int d = 2;
    SpherePoint pole;
    double alpha = 0.0;                 // falpha
    std::vector<double> poly;           // polynomial profile coefficients in t
    double normalizer = 1.0;
    double sup_bound = 0.0;
    std::optional<double> smoothness_t; // alpha for falpha

    /// Unnormalized zonal profile.
    double shape(double t) const {
        switch (kind) {
            case DensityKind::uniform:
                return 1.0;
            case DensityKind::polynomial: {
                double acc = 0.0;
                for (std::size_t i = poly.size(); i-- > 0;) acc = acc * t + poly[i];
                return acc;
            }
            case DensityKind::falpha:
                return std::pow(std::max(0.0, 1.0 - t), 0.5 * alpha);
        }
        return 0.0;
    }

    double operator()(const SpherePoint& x) const { return shape(dot(x, pole)) / normalizer; }
};

namespace detail {

/// |S^{d-1}| int g(t) (1-t^2)^{nu-1/2} dt, the weight of the zonal
/// integration formula; the rule is Gauss-Jacobi in the Gegenbauer weight.
inline double zonal_integral(int d, const std::vector<double>& profile_vals, const QuadratureRule& rule) {
    double boundary = d == 1 ? 2.0 : 2.0 * kPi;
    return boundary * rule.integrate(profile_vals);
}

inline QuadratureRule gegenbauer_weight_rule(int d, int n) {
    double nu = (d - 1.0) / 2.0;
    return gauss_jacobi(n, nu - 0.5, nu - 0.5);
}

}  // namespace detail

inline TestDensity make_uniform_density(int d) {
    TestDensity f;
    f.kind = DensityKind::uniform;
    f.d = d;
    f.pole = north_pole(d);
    f.normalizer = sphere_measure(d);
    f.sup_bound = 1.0 / sphere_measure(d);
    return f;
}

inline TestDensity make_polynomial_density(int d, std::vector<double> coeffs, SpherePoint pole) {
    if (coeffs.empty()) throw std::invalid_argument("make_polynomial_density: no coefficients");
    TestDensity f;
    f.kind = DensityKind::polynomial;
    f.d = d;
    f.pole = pole;
    f.poly = std::move(coeffs);
    int deg = static_cast<int>(f.poly.size()) - 1;
    auto rule = detail::gegenbauer_weight_rule(d, deg / 2 + 4);
    std::vector<double> vals(rule.nodes.size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = f.shape(rule.nodes[i]);
    f.normalizer = detail::zonal_integral(d, vals, rule);
    if (!(f.normalizer > 0)) throw std::invalid_argument("make_polynomial_density: profile does not integrate to a positive mass");
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i <= 4096; ++i) {
        double v = f.shape(-1.0 + 2.0 * i / 4096.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo < -1e-12 * std::max(1.0, hi))
        throw std::invalid_argument("make_polynomial_density: profile is negative");
    f.sup_bound = hi / f.normalizer;
    return f;
}

inline TestDensity make_polynomial_density(int d, std::vector<double> coeffs) {
    return make_polynomial_density(d, std::move(coeffs), north_pole(d));
}

inline bool is_even_integer_alpha(double alpha) {
    double half = 0.5 * alpha;
    return std::abs(half - std::round(half)) < 1e-9;
}

inline TestDensity make_falpha_density(double alpha, SpherePoint pole, int d) {
    if (!(alpha > 0)) throw std::invalid_argument("make_falpha_density: alpha must be positive");
    if (is_even_integer_alpha(alpha))
        throw std::invalid_argument("make_falpha_density: alpha/2 integral; use the polynomial kind");
    TestDensity f;
    f.kind = DensityKind::falpha;
    f.d = d;
    f.pole = pole;
    f.alpha = alpha;
    f.smoothness_t = alpha;
    double nu = (d - 1.0) / 2.0;
    double boundary = d == 1 ? 2.0 : 2.0 * kPi;
    f.normalizer = boundary * jacobi_weight_mass(0.5 * alpha + nu - 0.5, nu - 0.5);
    f.sup_bound = std::pow(2.0, 0.5 * alpha) / f.normalizer;
    return f;
}

inline TestDensity make_falpha_density(double alpha, int d) {
    return make_falpha_density(alpha, north_pole(d), d);
}

/// Exact rejection sampler against the uniform proposal with envelope
/// sup_bound; deterministic given the seed. `tries` (optional) receives the
/// number of proposals drawn.
inline Sample sample_density(const TestDensity& f, std::uint64_t seed, std::size_t n,
                             std::size_t* tries = nullptr) {
    if (!(f.sup_bound > 0) || !std::isfinite(f.sup_bound))
        throw std::invalid_argument("sample_density: sup bound not finite");
    Rng rng(seed);
    std::vector<SpherePoint> pts;
    pts.reserve(n);
    std::size_t attempts = 0;
    double floor_ratio = 1.0 / (sphere_measure(f.d) * f.sup_bound);  // 1 for uniform
    while (pts.size() < n) {
        ++attempts;
        SpherePoint x;
        if (f.d == 1) {
            x = circle_point(2.0 * kPi * rng.uniform());
        } else {
            double z = 1.0 - 2.0 * rng.uniform();
            double phi = 2.0 * kPi * rng.uniform();
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            x.dim = 2;
            x.coords = {r * std::cos(phi), r * std::sin(phi), z};
        }
        if (floor_ratio >= 1.0) {
            pts.push_back(x);
            continue;
        }
        double u = rng.uniform();
        if (u * f.sup_bound <= f(x)) pts.push_back(x);
    }
    if (tries) *tries = attempts;
    return Sample{f.d, std::move(pts)};
}

/// Closed form of the Gegenbauer coefficients of the unnormalized f_alpha
/// (nu > 0):
///   u_k = (2nu)_k / (k! 2^k (nu+1/2)_k) (-alpha/2)_k
///         * 2^{alpha/2+k+2nu} B(alpha/2+nu+1/2, k+nu+1/2),
/// evaluated in log magnitude with explicit sign tracking of (-alpha/2)_k.
inline double u_k_closed(int k, double alpha, double nu) {
    if (k < 0 || k > 100000) throw std::invalid_argument("u_k_closed: k out of the stable range [0, 100000]");
    if (!(nu > 0)) throw std::invalid_argument("u_k_closed: nu must be positive (use quadrature for d=1)");
    if (is_even_integer_alpha(alpha)) throw std::invalid_argument("u_k_closed: alpha/2 must not be an integer");
    double half = 0.5 * alpha;
    double logmag = 0.0;
    int negatives = 0;
    for (int i = 0; i < k; ++i) {
        logmag += std::log(std::abs(static_cast<double>(i) - half));
        if (static_cast<double>(i) < half) ++negatives;
    }
    logmag += std::lgamma(2.0 * nu + k) - std::lgamma(2.0 * nu);
    logmag -= std::lgamma(nu + 0.5 + k) - std::lgamma(nu + 0.5);
    logmag -= std::lgamma(k + 1.0) + k * std::log(2.0);
    logmag += (half + k + 2.0 * nu) * std::log(2.0);
    logmag += std::lgamma(half + nu + 0.5) + std::lgamma(k + nu + 0.5) - std::lgamma(k + half + 2.0 * nu + 1.0);
    if (logmag > 700.0) throw std::overflow_error("u_k_closed: magnitude overflows a double");
    if (logmag < -745.0) return 0.0;
    double sign = (negatives % 2 == 0) ? 1.0 : -1.0;
    return sign * std::exp(logmag);
}

/// Same coefficient by Gauss-Jacobi quadrature with the weight
/// (1-t)^{alpha/2} (1-t^2)^{nu-1/2}; the remaining factor is the polynomial
/// C_k^nu (T_k when nu = 0), so the rule is exact. Oracle role.
inline double u_k_quadrature(int k, double alpha, double nu, int n_nodes = 0) {
    if (k < 0) throw std::invalid_argument("u_k_quadrature: k must be >= 0");
    if (n_nodes <= 0) n_nodes = k + 64;
    auto rule = gauss_jacobi(n_nodes, 0.5 * alpha + nu - 0.5, nu - 0.5);
    return rule.integrate_fn([&](double t) { return nu > 0 ? gegenbauer(k, nu, t) : chebyshev(k, t); });
}

/// Funk-Hecke coefficients c_k of the unnormalized f_alpha, so that
/// A_j f_alpha(y) = sum_k w_k c_k L_k(<y, pole>):
///   c_k = |S^{d-1}| u_k / C_k^nu(1)  (d=2: C_k^{1/2}(1) = 1, c_k = 2 pi u_k),
///   d=1: c_k = 2 int (1-t)^{alpha/2} T_k(t) (1-t^2)^{-1/2} dt.
inline std::vector<double> falpha_funk_hecke(int d, double alpha, int kmax) {
    std::vector<double> c(static_cast<std::size_t>(kmax) + 1);
    if (d == 2) {
        for (int k = 0; k <= kmax; ++k) c[static_cast<std::size_t>(k)] = 2.0 * kPi * u_k_closed(k, alpha, 0.5);
    } else {
        auto rule = gauss_jacobi(kmax + 64, 0.5 * alpha - 0.5, -0.5);
        for (int k = 0; k <= kmax; ++k)
            c[static_cast<std::size_t>(k)] = 2.0 * rule.integrate_fn([&](double t) { return chebyshev(k, t); });
    }
    return c;
}

/// Funk-Hecke coefficients of a zonal polynomial profile.
inline std::vector<double> polynomial_funk_hecke(int d, const TestDensity& f, int kmax) {
    double nu = (d - 1.0) / 2.0;
    int deg = static_cast<int>(f.poly.size()) - 1;
    auto rule = detail::gegenbauer_weight_rule(d, (deg + kmax) / 2 + 4);
    double boundary = d == 1 ? 2.0 : 2.0 * kPi;
    std::vector<double> c(static_cast<std::size_t>(kmax) + 1, 0.0);
    for (int k = 0; k <= kmax; ++k) {
        double ck1 = d == 1 ? 1.0 : gegenbauer(k, nu, 1.0);
        c[static_cast<std::size_t>(k)] =
            boundary / ck1 *
            rule.integrate_fn([&](double t) { return f.shape(t) * (d == 1 ? chebyshev(k, t) : gegenbauer(k, nu, t)); });
    }
    return c;
}

/// Normalized zonal expansion coefficients of a test density: f(x) =
/// sum_k hat_c_k L_k(<x,pole>).
inline std::vector<double> density_zonal_coeffs(const TestDensity& f, int kmax) {
    std::vector<double> c(static_cast<std::size_t>(kmax) + 1, 0.0);
    switch (f.kind) {
        case DensityKind::uniform:
            c[0] = 1.0;
            break;
        case DensityKind::polynomial:
            c = polynomial_funk_hecke(f.d, f, kmax);
            break;
        case DensityKind::falpha:
            c = falpha_funk_hecke(f.d, f.alpha, kmax);
            break;
    }
    for (double& v : c) v /= f.normalizer;
    return c;
}

/// Population projection of a test density through its zonal expansion;
/// equals the cubature-based population_projection up to quadrature error
/// and costs O(|grid| k) instead.
inline FieldOnGrid density_projection(const TestDensity& f, const KernelSpec& spec,
                                      std::shared_ptr<const EvalGrid> grid) {
    int kmax = max_degree(spec);
    auto w = aj_weights(spec);
    auto c = density_zonal_coeffs(f, kmax);
    for (int k = 0; k <= kmax; ++k) w[static_cast<std::size_t>(k)] *= c[static_cast<std::size_t>(k)];
    std::vector<double> vals(grid->size());
    parallel_for((grid->size() + 2047) / 2048, [&](std::size_t blk) {
        std::size_t lo = blk * 2048, hi = std::min(grid->size(), lo + 2048);
        for (std::size_t i = lo; i < hi; ++i) vals[i] = zonal_eval(f.d, w, dot(grid->point(i), f.pole));
    });
    return FieldOnGrid{grid, std::move(vals)};
}

/// |A_j f_alpha(x0)| for the unnormalized f_alpha (its value at the pole is
/// zero, so this is the pole bias). d=2 uses the u_k series; d=1 the exact
/// adapted quadrature.
inline double bias_at_pole(double alpha, const KernelSpec& spec) {
    auto w = aj_weights(spec);
    int kmax = max_degree(spec);
    if (spec.d == 2) {
        double acc = 0.0;
        for (int k = 0; k <= kmax; ++k)
            acc += w[static_cast<std::size_t>(k)] * (2.0 * k + 1.0) * u_k_closed(k, alpha, 0.5);
        return std::abs(0.5 * acc);  // |S^1| / |S^2| = 1/2
    }
    auto rule = gauss_jacobi(kmax + 64, 0.5 * alpha - 0.5, -0.5);
    double acc = 2.0 * rule.integrate_fn([&](double t) { return zonal_eval(1, w, t); });
    return std::abs(acc);
}

/// Grid sup of |A_j f_alpha - f_alpha| (unnormalized), through the zonal
/// profile; at least bias_at_pole up to the grid gap.
inline double bias_sup(double alpha, const KernelSpec& spec, const EvalGrid& grid, const SpherePoint& pole) {
    int kmax = max_degree(spec);
    auto w = aj_weights(spec);
    auto c = falpha_funk_hecke(spec.d, alpha, kmax);
    for (int k = 0; k <= kmax; ++k) w[static_cast<std::size_t>(k)] *= c[static_cast<std::size_t>(k)];
    std::size_t blocks = (grid.size() + 4095) / 4096;
    std::vector<double> maxima(blocks, 0.0);
    parallel_for(blocks, [&](std::size_t blk) {
        double m = 0.0;
        std::size_t lo = blk * 4096, hi = std::min(grid.size(), lo + 4096);
        for (std::size_t i = lo; i < hi; ++i) {
            double s = dot(grid.point(i), pole);
            double diff = zonal_eval(spec.d, w, s) - std::pow(std::max(0.0, 1.0 - s), 0.5 * alpha);
            m = std::max(m, std::abs(diff));
        }
        maxima[blk] = m;
    });
    double m = 0.0;
    for (double v : maxima) m = std::max(m, v);
    return m;
}

inline double bias_sup(double alpha, const KernelSpec& spec, const EvalGrid& grid) {
    return bias_sup(alpha, spec, grid, north_pole(spec.d));
}

/// Grid sup of |A_j f - f| for a normalized test density.
inline double density_bias_sup(const TestDensity& f, const KernelSpec& spec, const EvalGrid& grid) {
    if (f.kind == DensityKind::uniform) return 0.0;
    int kmax = max_degree(spec);
    auto w = aj_weights(spec);
    auto c = density_zonal_coeffs(f, kmax);
    for (int k = 0; k <= kmax; ++k) w[static_cast<std::size_t>(k)] *= c[static_cast<std::size_t>(k)];
    std::size_t blocks = (grid.size() + 4095) / 4096;
    std::vector<double> maxima(blocks, 0.0);
    parallel_for(blocks, [&](std::size_t blk) {
        double m = 0.0;
        std::size_t lo = blk * 4096, hi = std::min(grid.size(), lo + 4096);
        for (std::size_t i = lo; i < hi; ++i) {
            double s = dot(grid.point(i), f.pole);
            double diff = zonal_eval(f.d, w, s) - f.shape(s) / f.normalizer;
            m = std::max(m, std::abs(diff));
        }
        maxima[blk] = m;
    });
    double m = 0.0;
    for (double v : maxima) m = std::max(m, v);
    return m;
}

}  // namespace needlet
