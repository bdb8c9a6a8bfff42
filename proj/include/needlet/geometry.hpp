#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "needlet/rng.hpp"

namespace needlet {

inline constexpr double kPi = std::numbers::pi;

/// Lebesgue surface measure of the d-sphere: |S^1| = 2 pi, |S^2| = 4 pi.
inline double sphere_measure(int d) {
    if (d == 1) return 2.0 * kPi;
    if (d == 2) return 4.0 * kPi;
    throw std::invalid_argument("sphere_measure: only d in {1,2} supported");
}

/// Unit vector in R^{d+1}, d in {1,2}. For d=1 the third coordinate is 0.
struct SpherePoint {
    std::array<double, 3> coords{0.0, 0.0, 0.0};
    int dim = 2;

    double x() const { return coords[0]; }
    double y() const { return coords[1]; }
    double z() const { return coords[2]; }
};

inline double dot(const SpherePoint& a, const SpherePoint& b) {
    return a.coords[0] * b.coords[0] + a.coords[1] * b.coords[1] + a.coords[2] * b.coords[2];
}

/// Normalizes coords (length 2 or 3) onto the sphere.
inline SpherePoint make_point(const std::vector<double>& coords) {
    if (coords.size() != 2 && coords.size() != 3)
        throw std::invalid_argument("make_point: coords must have length 2 or 3");
    double n2 = 0.0;
    for (double c : coords) n2 += c * c;
    if (n2 == 0.0 || !std::isfinite(n2))
        throw std::invalid_argument("make_point: zero or non-finite vector");
    double inv = 1.0 / std::sqrt(n2);
    SpherePoint p;
    p.dim = static_cast<int>(coords.size()) - 1;
    for (std::size_t i = 0; i < coords.size(); ++i) p.coords[i] = coords[i] * inv;
    return p;
}

inline SpherePoint make_point(double x, double y) { return make_point(std::vector<double>{x, y}); }
inline SpherePoint make_point(double x, double y, double z) {
    return make_point(std::vector<double>{x, y, z});
}

/// Point on S^1 at angle theta.
inline SpherePoint circle_point(double theta) {
    SpherePoint p;
    p.dim = 1;
    p.coords = {std::cos(theta), std::sin(theta), 0.0};
    return p;
}

/// Point on S^2 at colatitude theta, longitude phi.
inline SpherePoint sphere_point(double theta, double phi) {
    SpherePoint p;
    p.dim = 2;
    double st = std::sin(theta);
    p.coords = {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
    return p;
}

inline SpherePoint north_pole(int d) {
    SpherePoint p;
    p.dim = d;
    if (d == 1)
        p.coords = {1.0, 0.0, 0.0};
    else
        p.coords = {0.0, 0.0, 1.0};
    return p;
}

/// Geodesic distance arccos(<x,y>), inner product clamped to [-1,1].
inline double geodesic_distance(const SpherePoint& a, const SpherePoint& b) {
    if (a.dim != b.dim) throw std::invalid_argument("geodesic_distance: dimension mismatch");
    return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
}

/// i.i.d. uniform sample w.r.t. surface measure; deterministic given seed.
inline std::vector<SpherePoint> sample_uniform(std::uint64_t seed, int d, std::size_t n) {
    if (d != 1 && d != 2) throw std::invalid_argument("sample_uniform: d must be 1 or 2");
    if (n < 1) throw std::invalid_argument("sample_uniform: n must be >= 1");
    Rng rng(seed);
    std::vector<SpherePoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (d == 1) {
            out.push_back(circle_point(2.0 * kPi * rng.uniform()));
        } else {
            double z = 1.0 - 2.0 * rng.uniform();
            double phi = 2.0 * kPi * rng.uniform();
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            SpherePoint p;
            p.dim = 2;
            p.coords = {r * std::cos(phi), r * std::sin(phi), z};
            out.push_back(p);
        }
    }
    return out;
}

enum class GridKind { rings, fibonacci };

/// One iso-latitude ring of an S^2 evaluation grid.
struct GridRing {
    double theta;
    double phi0;          // longitude of the first node
    std::size_t count;    // nodes on this ring
    std::size_t begin;    // flat index of the first node
};

/// Evaluation grid discretizing sup norms over the sphere. The invariant is
/// the oversampling contract mesh_norm <= 2^{-(design_level+3)} * pi: grids
/// resolve anything band-limited at scale 2^{-design_level} with an 8x margin.
///
/// d=1 grids are equispaced angles (mesh exact). d=2 grids come in two kinds:
/// iso-latitude rings (the default; rings enable the fast per-ring Legendre
/// sweep when evaluating harmonic expansions) and a Fibonacci lattice (fewer
/// points per covering radius; preferable when evaluation is O(1) per point).
/// Ring grids store ring structure and materialize coordinates on demand.
struct EvalGrid {
    int d = 2;
    int design_level = 0;
    GridKind kind = GridKind::rings;
    double mesh_norm = 0.0;  // certified upper bound, radians

    std::size_t size_ = 0;
    std::vector<GridRing> rings;       // d=2 rings
    std::vector<SpherePoint> points_;  // d=2 fibonacci

    std::size_t size() const { return size_; }

    double circle_angle(std::size_t i) const { return 2.0 * kPi * static_cast<double>(i) / static_cast<double>(size_); }

    SpherePoint point(std::size_t i) const {
        if (d == 1) return circle_point(circle_angle(i));
        if (kind == GridKind::fibonacci) return points_[i];
        // locate ring by binary search on begin offsets
        std::size_t lo = 0, hi = rings.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi + 1) / 2;
            if (rings[mid].begin <= i)
                lo = mid;
            else
                hi = mid - 1;
        }
        const GridRing& r = rings[lo];
        double phi = r.phi0 + 2.0 * kPi * static_cast<double>(i - r.begin) / static_cast<double>(r.count);
        return sphere_point(r.theta, phi);
    }
};

inline double mesh_bound_for_level(int design_level) {
    return std::ldexp(kPi, -(design_level + 3));
}

namespace detail {

/// Nearest-neighbor query structure on S^2 using latitude/longitude buckets.
class SphereNN {
public:
    SphereNN(const std::vector<std::array<double, 3>>& pts, double cell) : cell_(cell) {
        nt_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(kPi / cell)));
        buckets_.resize(nt_);
        rows_np_.resize(nt_);
        for (std::size_t r = 0; r < nt_; ++r) {
            double tmid = (static_cast<double>(r) + 0.5) * kPi / static_cast<double>(nt_);
            double circ = 2.0 * kPi * std::sin(tmid);
            std::size_t np = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(circ / cell)));
            rows_np_[r] = np;
            buckets_[r].resize(np);
        }
        for (const auto& p : pts) {
            auto [r, c] = locate(p);
            buckets_[r][c].push_back(p);
        }
    }

    /// Distance from q to the nearest stored point.
    double nearest(const std::array<double, 3>& q) const {
        double best = -1.0;  // track max cosine
        double tq = std::acos(std::clamp(q[2], -1.0, 1.0));
        double pq = std::atan2(q[1], q[0]);
        // expand search radius in units of cells until a hit is certified
        for (std::size_t radius = 1; radius <= nt_; ++radius) {
            double tlo = tq - static_cast<double>(radius) * cell_;
            double thi = tq + static_cast<double>(radius) * cell_;
            long rlo = static_cast<long>(std::floor(tlo / kPi * static_cast<double>(nt_)));
            long rhi = static_cast<long>(std::floor(thi / kPi * static_cast<double>(nt_)));
            rlo = std::max<long>(rlo, 0);
            rhi = std::min<long>(rhi, static_cast<long>(nt_) - 1);
            for (long r = rlo; r <= rhi; ++r) {
                std::size_t np = rows_np_[static_cast<std::size_t>(r)];
                double tmid = (static_cast<double>(r) + 0.5) * kPi / static_cast<double>(nt_);
                // longitude window wide enough for the current search radius
                double st = std::max(std::sin(tmid), 1e-12);
                double dphi = std::min(kPi, static_cast<double>(radius) * cell_ / st + kPi / static_cast<double>(np));
                long clo = static_cast<long>(std::floor((pq - dphi) / (2.0 * kPi) * static_cast<double>(np)));
                long chi = static_cast<long>(std::floor((pq + dphi) / (2.0 * kPi) * static_cast<double>(np)));
                if (chi - clo + 1 >= static_cast<long>(np)) {
                    clo = 0;
                    chi = static_cast<long>(np) - 1;
                }
                for (long c = clo; c <= chi; ++c) {
                    std::size_t cc = static_cast<std::size_t>(((c % static_cast<long>(np)) + static_cast<long>(np)) % static_cast<long>(np));
                    for (const auto& p : buckets_[static_cast<std::size_t>(r)][cc])
                        best = std::max(best, q[0] * p[0] + q[1] * p[1] + q[2] * p[2]);
                }
            }
            if (best > -1.0) {
                double dist = std::acos(std::clamp(best, -1.0, 1.0));
                // all unsearched points are farther than (radius-1) cells away
                if (dist <= static_cast<double>(radius - 1) * cell_ || radius == nt_) return dist;
            }
        }
        return kPi;
    }

private:
    std::pair<std::size_t, std::size_t> locate(const std::array<double, 3>& p) const {
        double t = std::acos(std::clamp(p[2], -1.0, 1.0));
        std::size_t r = std::min<std::size_t>(nt_ - 1, static_cast<std::size_t>(t / kPi * static_cast<double>(nt_)));
        double phi = std::atan2(p[1], p[0]);
        if (phi < 0.0) phi += 2.0 * kPi;
        std::size_t np = rows_np_[r];
        std::size_t c = std::min<std::size_t>(np - 1, static_cast<std::size_t>(phi / (2.0 * kPi) * static_cast<double>(np)));
        return {r, c};
    }

    double cell_;
    std::size_t nt_;
    std::vector<std::size_t> rows_np_;
    std::vector<std::vector<std::vector<std::array<double, 3>>>> buckets_;
};

/// Iso-latitude node layout with spacing h; used both for grids and for the
/// probe sets of the mesh measurement. Returns (theta, phi0, count) triples
/// including single-node polar caps. The analytic covering bound of such a
/// layout is max over rings of (dtheta/2 + pi sin(theta)/count).
struct RingLayout {
    std::vector<GridRing> rings;
    std::size_t total = 0;
    double analytic_mesh = 0.0;
};

inline RingLayout ring_layout(double h) {
    RingLayout out;
    std::size_t nt = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(kPi / h)));
    double dt = kPi / static_cast<double>(nt);
    const double golden = 0.6180339887498949;
    auto push = [&](double theta, double phi0, std::size_t m) {
        out.rings.push_back(GridRing{theta, phi0, m, out.total});
        out.total += m;
    };
    push(0.0, 0.0, 1);  // pole caps get their own node
    for (std::size_t q = 0; q < nt; ++q) {
        double theta = (static_cast<double>(q) + 0.5) * dt;
        double st = std::sin(theta);
        std::size_t m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2.0 * kPi * st / h)));
        double phi0 = 2.0 * kPi * std::fmod(static_cast<double>(q) * golden, 1.0) / static_cast<double>(m);
        push(theta, phi0, m);
        out.analytic_mesh = std::max(out.analytic_mesh, 0.5 * dt + kPi * st / static_cast<double>(m));
    }
    push(kPi, 0.0, 1);
    out.analytic_mesh = std::max(out.analytic_mesh, 0.5 * dt);
    return out;
}

/// Certified mesh norm of an arbitrary S^2 point set: max over a probe layout
/// of the nearest-neighbor distance, plus the probe layout's own covering
/// bound (triangle inequality makes the total an upper bound for the true
/// covering radius).
inline double measure_mesh(const std::vector<std::array<double, 3>>& pts, double probe_h) {
    RingLayout probes = ring_layout(probe_h);
    // bucket size tracks the point-set spacing so radius-1 searches usually hit
    double spacing = std::sqrt(4.0 * kPi / static_cast<double>(pts.size()));
    SphereNN nn(pts, std::max({probe_h, 0.8 * spacing, 1e-4}));
    double worst = 0.0;
    for (const auto& r : probes.rings) {
        for (std::size_t i = 0; i < r.count; ++i) {
            double phi = r.phi0 + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(r.count);
            SpherePoint p = sphere_point(r.theta, phi);
            worst = std::max(worst, nn.nearest(p.coords));
        }
    }
    return worst + probes.analytic_mesh;
}

}  // namespace detail

/// Builds the evaluation grid for a resolution level. d=1: equispaced angles,
/// mesh exactly pi/count. d=2: ring or Fibonacci layout; the stored mesh_norm
/// is a certified upper bound (nearest-neighbor search over a finer probe
/// layout plus that layout's covering bound) and satisfies the invariant.
inline EvalGrid build_eval_grid(int d, int design_level, GridKind kind = GridKind::rings) {
    if (design_level < 0) throw std::invalid_argument("build_eval_grid: design_level must be >= 0");
    if (d != 1 && d != 2) throw std::invalid_argument("build_eval_grid: d must be 1 or 2");
    EvalGrid g;
    g.d = d;
    g.design_level = design_level;
    g.kind = kind;
    double bound = mesh_bound_for_level(design_level);
    if (d == 1) {
        std::size_t m = std::max<std::size_t>(16, std::size_t{1} << (design_level + 3));
        g.size_ = m;
        g.mesh_norm = kPi / static_cast<double>(m);
        return g;
    }
    if (kind == GridKind::rings) {
        double h = 0.80 * bound;
        for (int attempt = 0; attempt < 8; ++attempt) {
            detail::RingLayout lay = detail::ring_layout(h);
            if (lay.analytic_mesh > 0.88 * bound) {
                h *= 0.9;
                continue;
            }
            g.rings = std::move(lay.rings);
            g.size_ = lay.total;
            // mesh measurement by probe NN search (the analytic ring bound is
            // also valid; store the certified measured value)
            std::vector<std::array<double, 3>> pts;
            pts.reserve(g.size_);
            for (std::size_t i = 0; i < g.size_; ++i) pts.push_back(g.point(i).coords);
            g.mesh_norm = std::min(detail::measure_mesh(pts, h / 6.0), lay.analytic_mesh);
            if (g.mesh_norm <= bound) return g;
            h *= 0.9;
            g.rings.clear();
        }
        throw std::runtime_error("build_eval_grid: ring layout failed the mesh contract");
    }
    // Fibonacci lattice, grown until the measured mesh passes the contract
    std::size_t n = static_cast<std::size_t>(std::ceil(std::pow(2.45 / bound, 2.0)));
    for (int attempt = 0; attempt < 16; ++attempt) {
        const double golden = 0.6180339887498949;
        std::vector<std::array<double, 3>> pts;
        pts.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
            double phi = 2.0 * kPi * std::fmod(static_cast<double>(i) * golden, 1.0);
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            pts.push_back({r * std::cos(phi), r * std::sin(phi), z});
        }
        double mesh = detail::measure_mesh(pts, bound / 7.0);
        if (mesh <= bound) {
            g.size_ = n;
            g.mesh_norm = mesh;
            g.points_.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                g.points_[i].dim = 2;
                g.points_[i].coords = pts[i];
            }
            return g;
        }
        n = static_cast<std::size_t>(static_cast<double>(n) * 1.2);
    }
    throw std::runtime_error("build_eval_grid: fibonacci layout failed the mesh contract");
}

/// Shared grid registry (grids are immutable; levels get reused heavily).
inline std::shared_ptr<const EvalGrid> eval_grid(int d, int design_level, GridKind kind = GridKind::rings) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, std::shared_ptr<const EvalGrid>> cache;
    std::tuple<int, int, int> key{d, design_level, static_cast<int>(kind)};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto g = std::make_shared<const EvalGrid>(build_eval_grid(d, design_level, kind));
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, g).first->second;
}

}  // namespace needlet
