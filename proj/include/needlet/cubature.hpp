#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "needlet/geometry.hpp"
#include "needlet/quadrature.hpp"

namespace needlet {

/// Positive-weight nodes integrating every spherical polynomial of degree
/// <= `degree` exactly.
///   d=1: 2N+2 equispaced angles, equal weights (exact through degree 2N+1);
///   d=2: Gauss-Legendre in cos(theta) crossed with equispaced longitudes.
struct CubatureSet {
    int d = 2;
    int degree = 0;
    int n_lon = 0;  // d=2: equispaced longitudes per ring (symmetry group order)
    std::vector<SpherePoint> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }

    template <typename Fn>
    double integrate(Fn&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s;
    }
};

inline CubatureSet build_cubature(int d, int degree) {
    if (degree < 0) throw std::invalid_argument("build_cubature: degree must be >= 0");
    CubatureSet c;
    c.d = d;
    c.degree = degree;
    if (d == 1) {
        std::size_t m = 2 * static_cast<std::size_t>(degree) + 2;
        double w = 2.0 * kPi / static_cast<double>(m);
        c.nodes.reserve(m);
        c.weights.assign(m, w);
        for (std::size_t i = 0; i < m; ++i)
            c.nodes.push_back(circle_point(2.0 * kPi * static_cast<double>(i) / static_cast<double>(m)));
        return c;
    }
    if (d != 2) throw std::invalid_argument("build_cubature: only d in {1,2}");
    int n_gl = (degree + 1) / 2 + 1;
    int n_lon = std::max(1, degree + 1);
    c.n_lon = n_lon;
    QuadratureRule gl = gauss_legendre(n_gl);
    c.nodes.reserve(static_cast<std::size_t>(n_gl) * n_lon);
    c.weights.reserve(static_cast<std::size_t>(n_gl) * n_lon);
    for (int i = 0; i < n_gl; ++i) {
        double z = gl.nodes[i];
        double st = std::sqrt(std::max(0.0, 1.0 - z * z));
        double w = gl.weights[i] * 2.0 * kPi / n_lon;
        for (int k = 0; k < n_lon; ++k) {
            double phi = 2.0 * kPi * k / n_lon;
            SpherePoint p;
            p.dim = 2;
            p.coords = {st * std::cos(phi), st * std::sin(phi), z};
            c.nodes.push_back(p);
            c.weights.push_back(w);
        }
    }
    return c;
}

}  // namespace needlet
