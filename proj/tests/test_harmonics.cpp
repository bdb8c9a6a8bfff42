#include <catch2/catch_amalgamated.hpp>

#include "needlet/harmonics.hpp"
#include "needlet/kernels.hpp"
#include "test_helpers.hpp"

using namespace needlet;

TEST_CASE("layout offsets tile the basis exactly") {
    ShLayout lay(7);
    std::vector<int> hit(lay.size(), 0);
    for (int k = 0; k <= 7; ++k) hit[lay.m0(k)]++;
    for (int m = 1; m <= 7; ++m)
        for (int k = m; k <= 7; ++k) {
            hit[lay.cos_off(m) + static_cast<std::size_t>(k - m)]++;
            hit[lay.sin_off(m) + static_cast<std::size_t>(k - m)]++;
        }
    for (int h : hit) CHECK(h == 1);
}

TEST_CASE("addition theorem: basis contraction reproduces L_k") {
    // sum over the order-k basis of Y(x) Y(y) must equal kernel_Lk(<x,y>)
    Rng rng(11);
    const int K = 24;
    ShLayout lay(K);
    auto pts = sample_uniform(3, 2, 12);
    for (int trial = 0; trial < 12; ++trial) {
        const auto& x = pts[static_cast<std::size_t>(rng.uniform() * 12)];
        const auto& y = pts[static_cast<std::size_t>(rng.uniform() * 12)];
        // coefficients of delta_x truncated at K; contraction against Y(y)
        auto cx = empirical_harmonics(2, K, {x}, 1.0);
        for (int k = 0; k <= K; ++k) {
            std::vector<double> ck(cx.size(), 0.0);
            ck[lay.m0(k)] = cx[lay.m0(k)];
            for (int m = 1; m <= k; ++m) {
                ck[lay.cos_off(m) + static_cast<std::size_t>(k - m)] = cx[lay.cos_off(m) + static_cast<std::size_t>(k - m)];
                ck[lay.sin_off(m) + static_cast<std::size_t>(k - m)] = cx[lay.sin_off(m) + static_cast<std::size_t>(k - m)];
            }
            double got = eval_harmonics_at(2, K, ck, y);
            double want = kernel_Lk(2, k, dot(x, y));
            INFO("k=" << k);
            CHECK(got == Catch::Approx(want).margin(1e-12 * dim_Hk(2, k)));
        }
    }
}

TEST_CASE("circular addition theorem for d=1") {
    Rng rng(13);
    const int K = 16;
    for (int trial = 0; trial < 10; ++trial) {
        auto x = circle_point(rng.uniform(0.0, 2 * kPi));
        auto y = circle_point(rng.uniform(0.0, 2 * kPi));
        auto cx = empirical_harmonics(1, K, {x}, 1.0);
        for (int k = 0; k <= K; ++k) {
            std::vector<double> ck(cx.size(), 0.0);
            if (k == 0)
                ck[0] = cx[0];
            else {
                ck[2 * static_cast<std::size_t>(k) - 1] = cx[2 * static_cast<std::size_t>(k) - 1];
                ck[2 * static_cast<std::size_t>(k)] = cx[2 * static_cast<std::size_t>(k)];
            }
            CHECK(eval_harmonics_at(1, K, ck, y) == Catch::Approx(kernel_Lk(1, k, dot(x, y))).margin(1e-13));
        }
    }
}

TEST_CASE("batched accumulation equals the per-point path") {
    auto pts = sample_uniform(99, 2, 37);  // odd count exercises remainder lanes
    const int K = 10;
    auto batched = empirical_harmonics(2, K, pts, 1.0 / 37.0);
    std::vector<double> serial(batched.size(), 0.0);
    for (const auto& p : pts) {
        auto one = empirical_harmonics(2, K, {p}, 1.0 / 37.0);
        for (std::size_t i = 0; i < serial.size(); ++i) serial[i] += one[i];
    }
    for (std::size_t i = 0; i < serial.size(); ++i)
        CHECK(batched[i] == Catch::Approx(serial[i]).margin(1e-14));
}

TEST_CASE("ring-sweep evaluation equals per-point evaluation") {
    auto grid = build_eval_grid(2, 2, GridKind::rings);
    auto pts = sample_uniform(123, 2, 50);
    const int K = 15;
    auto coeffs = empirical_harmonics(2, K, pts, 1.0 / 50.0);
    auto fast = eval_harmonics(2, K, coeffs, grid);
    for (std::size_t i = 0; i < grid.size(); i += grid.size() / 97 + 1) {
        double ref = eval_harmonics_at(2, K, coeffs, grid.point(i));
        CHECK(fast[i] == Catch::Approx(ref).margin(1e-12));
    }
}

TEST_CASE("degree weighting zeroes orders beyond the window") {
    const int K = 6;
    auto pts = sample_uniform(5, 2, 8);
    auto coeffs = empirical_harmonics(2, K, pts, 0.125);
    std::vector<double> wk{1.0, 0.5};  // only k <= 1 survive
    apply_degree_weights(2, K, coeffs, wk);
    ShLayout lay(K);
    for (int k = 2; k <= K; ++k) CHECK(coeffs[lay.m0(k)] == 0.0);
    CHECK(coeffs[lay.cos_off(3)] == 0.0);
}
