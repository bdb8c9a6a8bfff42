#include <catch2/catch_amalgamated.hpp>

#include "needlet/cubature.hpp"
#include "needlet/harmonics.hpp"
#include "needlet/kernels.hpp"
#include "needlet/needlets.hpp"
#include "test_helpers.hpp"

using namespace needlet;

TEST_CASE("cubature integrates constants and low moments exactly") {
    auto c = build_cubature(2, 2);
    double sum = 0.0;
    for (double w : c.weights) sum += w;
    CHECK(sum == Catch::Approx(4 * kPi).margin(1e-12));
    double z2 = c.integrate([](const SpherePoint& p) { return p.z() * p.z(); });
    CHECK(z2 == Catch::Approx(4 * kPi / 3.0).margin(1e-12));

    auto c1 = build_cubature(1, 5);
    double sum1 = 0.0;
    for (double w : c1.weights) sum1 += w;
    CHECK(sum1 == Catch::Approx(2 * kPi).margin(1e-12));
    double cos4 = c1.integrate([](const SpherePoint& p) { return chebyshev(4, p.x()); });
    CHECK(cos4 == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("all weights positive, nodes on the sphere") {
    for (int d : {1, 2}) {
        auto c = build_cubature(d, 9);
        for (double w : c.weights) CHECK(w > 0.0);
        for (const auto& p : c.nodes) CHECK(std::abs(dot(p, p) - 1.0) < 1e-12);
    }
}

TEST_CASE("exactness sweep: every harmonic up to the design degree integrates to its true value") {
    // integral of Y_{km} vanishes for k >= 1; only the constant survives
    for (int d : {1, 2}) {
        for (int j = 0; j <= 6; ++j) {
            KernelSpec spec{d, j, ScalingMode::eigenvalue};
            int deg = 2 * max_degree(spec) + 1;
            auto c = build_cubature(d, deg);
            auto integrals = empirical_harmonics(d, deg, c.nodes, 0.0, &c.weights);
            double dc = integrals[0];
            CHECK(dc == Catch::Approx(std::sqrt(sphere_measure(d))).margin(1e-10));
            double worst = 0.0;
            for (std::size_t i = 1; i < integrals.size(); ++i) worst = std::max(worst, std::abs(integrals[i]));
            INFO("d=" << d << " j=" << j << " degree=" << deg << " worst=" << worst);
            CHECK(worst <= 1e-10);
        }
    }
}

TEST_CASE("kernel factorization through the cubature nodes") {
    Rng rng(2718);
    for (int d : {1, 2}) {
        for (int j = 0; j <= 6; ++j) {
            KernelSpec spec{d, j, ScalingMode::eigenvalue};
            auto sys = needlet_system(spec);
            auto aw = aj_weights(spec);
            auto cw = cj_weights(spec);
            int pairs = (j <= 4) ? 8 : 4;
            for (int t = 0; t < pairs; ++t) {
                SpherePoint x, y;
                if (d == 1) {
                    x = circle_point(rng.uniform(0.0, 2 * kPi));
                    y = circle_point(rng.uniform(0.0, 2 * kPi));
                } else {
                    x = sample_uniform(rng.raw(), 2, 1)[0];
                    y = sample_uniform(rng.raw(), 2, 1)[0];
                }
                double direct = zonal_eval(d, aw, dot(x, y));
                double viacub = 0.0;
                for (std::size_t e = 0; e < sys->cubature.size(); ++e)
                    viacub += sys->cubature.weights[e] * zonal_eval(d, cw, dot(x, sys->cubature.nodes[e])) *
                              zonal_eval(d, cw, dot(sys->cubature.nodes[e], y));
                INFO("d=" << d << " j=" << j);
                CHECK(viacub == Catch::Approx(direct).margin(1e-10));
            }
        }
    }
}

TEST_CASE("node weight and cardinality constants are stable across levels") {
    for (int d : {1, 2}) {
        double k1_min = 1e300, k1_max = 0.0, k2_min = 1e300, k2_max = 0.0;
        for (int j = 2; j <= 6; ++j) {
            auto sys = needlet_system(KernelSpec{d, j, ScalingMode::eigenvalue});
            k1_min = std::min(k1_min, sys->k1);
            k1_max = std::max(k1_max, sys->k1);
            k2_min = std::min(k2_min, sys->k2);
            k2_max = std::max(k2_max, sys->k2);
            double pw = std::ldexp(1.0, d * j);
            CHECK(static_cast<double>(sys->node_count()) <= sys->k2 * pw);
            CHECK(static_cast<double>(sys->node_count()) >= pw / sys->k2);
        }
        INFO("d=" << d << " k1 in [" << k1_min << "," << k1_max << "] k2 in [" << k2_min << "," << k2_max << "]");
        CHECK(k1_max / k1_min <= 2.0);
        CHECK(k2_max / k2_min <= 2.0);
    }
}

TEST_CASE("cardinality ratio is maximal at level zero") {
    // justifies using the measured k2 as an upper bound at unmeasured levels
    for (int d : {1, 2}) {
        auto s0 = needlet_system(KernelSpec{d, 0, ScalingMode::eigenvalue});
        for (int j = 1; j <= 7; ++j) {
            auto sys = needlet_system(KernelSpec{d, j, ScalingMode::eigenvalue});
            CHECK(static_cast<double>(sys->node_count()) / std::ldexp(1.0, d * j) <= s0->k2 + 1e-12);
        }
    }
}
