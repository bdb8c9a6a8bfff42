#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <map>
#include <stdexcept>
#include <vector>

#include "needlet/cubature.hpp"
#include "needlet/geometry.hpp"
#include "needlet/harmonics.hpp"
#include "needlet/kernels.hpp"
#include "needlet/parallel.hpp"

namespace needlet {

struct Sample {
    int d = 2;
    std::vector<SpherePoint> points;

    std::size_t n() const { return points.size(); }
};

inline Sample make_sample(int d, std::vector<SpherePoint> pts) {
    if (pts.empty()) throw std::invalid_argument("make_sample: empty sample");
    for (const auto& p : pts)
        if (p.dim != d) throw std::invalid_argument("make_sample: mixed dimensions");
    return Sample{d, std::move(pts)};
}

/// Subset of grid nodes over which sup norms are taken; empty keep = full.
struct OmegaMask {
    std::vector<std::uint8_t> keep;

    bool full() const { return keep.empty(); }
};

/// Nodes within angular `radius` of `center`.
inline OmegaMask cap_mask(const EvalGrid& grid, const SpherePoint& center, double radius) {
    OmegaMask m;
    m.keep.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        m.keep[i] = geodesic_distance(grid.point(i), center) <= radius ? 1 : 0;
    return m;
}

struct FieldOnGrid {
    std::shared_ptr<const EvalGrid> grid;
    std::vector<double> values;
};

/// Weighted kernel field sum_i w_i A_j(X_i, .) evaluated over the grid via
/// the harmonic expansion (exact up to rounding; the kernel is band-limited).
inline FieldOnGrid kernel_field(const Sample& sample, const KernelSpec& spec,
                                std::shared_ptr<const EvalGrid> grid, double scalar_weight,
                                const std::vector<double>* per_point = nullptr) {
    if (sample.d != spec.d || grid->d != spec.d) throw std::invalid_argument("kernel_field: dimension mismatch");
    if (grid->design_level < spec.j)
        throw std::invalid_argument("kernel_field: grid under-resolves the requested level");
    int K = max_degree(spec);
    auto coeffs = empirical_harmonics(spec.d, K, sample.points, scalar_weight, per_point);
    apply_degree_weights(spec.d, K, coeffs, aj_weights(spec));
    return FieldOnGrid{grid, eval_harmonics(spec.d, K, coeffs, *grid)};
}

/// Linear needlet density estimator f_n(j, .) = (1/n) sum_i A_j(X_i, .).
inline FieldOnGrid estimate_density(const Sample& sample, const KernelSpec& spec,
                                    std::shared_ptr<const EvalGrid> grid) {
    return kernel_field(sample, spec, grid, 1.0 / static_cast<double>(sample.n()));
}

/// Reference path: direct pairwise kernel summation. O(n |grid| k); test use.
inline FieldOnGrid estimate_density_direct(const Sample& sample, const KernelSpec& spec,
                                           std::shared_ptr<const EvalGrid> grid) {
    if (sample.d != spec.d || grid->d != spec.d)
        throw std::invalid_argument("estimate_density_direct: dimension mismatch");
    auto aw = aj_weights(spec);
    std::vector<double> vals(grid->size(), 0.0);
    double inv = 1.0 / static_cast<double>(sample.n());
    parallel_for(grid->size(), [&](std::size_t i) {
        SpherePoint y = grid->point(i);
        double acc = 0.0;
        for (const auto& x : sample.points) acc += zonal_eval(spec.d, aw, dot(x, y));
        vals[i] = acc * inv;
    });
    return FieldOnGrid{grid, std::move(vals)};
}

/// Signed kernel average (1/n) sum_i eps_i A_j(X_i, .).
inline FieldOnGrid rademacher_field(const Sample& sample, const std::vector<double>& signs,
                                    const KernelSpec& spec, std::shared_ptr<const EvalGrid> grid) {
    if (signs.size() != sample.n()) throw std::invalid_argument("rademacher_field: sign count mismatch");
    std::vector<double> w(signs.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = signs[i] / static_cast<double>(sample.n());
    return kernel_field(sample, spec, grid, 0.0, &w);
}

/// Population projection A_j f by a cubature exact at degree(A_j) + margin.
template <typename Fn>
FieldOnGrid population_projection(Fn&& f, const KernelSpec& spec, std::shared_ptr<const EvalGrid> grid,
                                  int margin = 32) {
    CubatureSet ref = build_cubature(spec.d, max_degree(spec) + margin);
    Sample nodes{spec.d, ref.nodes};
    std::vector<double> w(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) w[i] = ref.weights[i] * f(ref.nodes[i]);
    return kernel_field(nodes, spec, grid, 0.0, &w);
}

/// Pointwise population projection (same quadrature, direct zonal sum).
template <typename Fn>
double population_projection_at(Fn&& f, const KernelSpec& spec, const SpherePoint& x, int margin = 32) {
    CubatureSet ref = build_cubature(spec.d, max_degree(spec) + margin);
    auto aw = aj_weights(spec);
    double acc = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i)
        acc += ref.weights[i] * f(ref.nodes[i]) * zonal_eval(spec.d, aw, dot(x, ref.nodes[i]));
    return acc;
}

inline void check_same_grid(const FieldOnGrid& a, const FieldOnGrid& b) {
    if (a.grid.get() != b.grid.get() &&
        (a.grid->d != b.grid->d || a.grid->size() != b.grid->size() ||
         a.grid->design_level != b.grid->design_level || a.grid->kind != b.grid->kind))
        throw std::invalid_argument("sup_norm_diff: grid mismatch");
    if (a.values.size() != b.values.size()) throw std::invalid_argument("sup_norm_diff: size mismatch");
}

/// sup over unmasked nodes of |a - b|.
inline double sup_norm_diff(const FieldOnGrid& a, const FieldOnGrid& b, const OmegaMask& mask = {}) {
    check_same_grid(a, b);
    if (!mask.full() && mask.keep.size() != a.values.size())
        throw std::invalid_argument("sup_norm_diff: mask size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (!mask.full() && !mask.keep[i]) continue;
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    }
    return m;
}

/// sup over unmasked nodes of |a|.
inline double sup_norm(const FieldOnGrid& a, const OmegaMask& mask = {}) {
    if (!mask.full() && mask.keep.size() != a.values.size())
        throw std::invalid_argument("sup_norm: mask size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (!mask.full() && !mask.keep[i]) continue;
        m = std::max(m, std::abs(a.values[i]));
    }
    return m;
}

/// Any density on S^d has sup at least 1/|S^d|; the plug-in estimate is
/// clamped below by that floor.
inline double density_sup_clamp(double raw, int d) { return std::max(raw, 1.0 / sphere_measure(d)); }

/// Plug-in sup-norm bound ||f_n(j_max)||_inf, clamped.
inline double plugin_sup_bound(const Sample& sample, int d, int j_max, std::shared_ptr<const EvalGrid> grid,
                               ScalingMode mode = ScalingMode::eigenvalue) {
    KernelSpec spec{d, j_max, mode};
    return density_sup_clamp(sup_norm(estimate_density(sample, spec, grid)), d);
}

}  // namespace needlet
