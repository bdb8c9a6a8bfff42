#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "needlet/geometry.hpp"
#include "needlet/rng.hpp"

namespace testutil {

/// Standard normal via Box-Muller on the deterministic stream.
inline double gaussian(needlet::Rng& rng) {
    double u = std::max(rng.uniform(), 1e-300);
    double v = rng.uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * needlet::kPi * v);
}

/// Random rotation of R^3 (orthonormalized Gaussian frame with det +1).
inline std::array<std::array<double, 3>, 3> random_rotation(needlet::Rng& rng) {
    std::array<std::array<double, 3>, 3> m;
    for (auto& row : m)
        for (double& v : row) v = gaussian(rng);
    auto dot3 = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    };
    auto scale = [&](std::array<double, 3>& a) {
        double n = std::sqrt(dot3(a, a));
        for (double& v : a) v /= n;
    };
    scale(m[0]);
    double p = dot3(m[1], m[0]);
    for (int i = 0; i < 3; ++i) m[1][i] -= p * m[0][i];
    scale(m[1]);
    m[2] = {m[0][1] * m[1][2] - m[0][2] * m[1][1], m[0][2] * m[1][0] - m[0][0] * m[1][2],
            m[0][0] * m[1][1] - m[0][1] * m[1][0]};
    return m;
}

inline needlet::SpherePoint rotate(const std::array<std::array<double, 3>, 3>& m, const needlet::SpherePoint& p) {
    needlet::SpherePoint q;
    q.dim = p.dim;
    for (int i = 0; i < 3; ++i)
        q.coords[i] = m[i][0] * p.coords[0] + m[i][1] * p.coords[1] + m[i][2] * p.coords[2];
    return q;
}

}  // namespace testutil
