#include <catch2/catch_amalgamated.hpp>

#include "needlet/concentration.hpp"
#include "needlet/estimation.hpp"
#include "test_helpers.hpp"

using namespace needlet;

TEST_CASE("estimator at level 0 is the constant density") {
    for (int d : {1, 2}) {
        auto grid = eval_grid(d, 1);
        KernelSpec spec{d, 0, ScalingMode::eigenvalue};
        auto one = make_sample(d, sample_uniform(4, d, 1));
        auto f1 = estimate_density(one, spec, grid);
        auto many = make_sample(d, sample_uniform(5, d, 200));
        auto f2 = estimate_density(many, spec, grid);
        for (double v : f1.values) CHECK(v == Catch::Approx(1.0 / sphere_measure(d)).margin(1e-13));
        for (double v : f2.values) CHECK(v == Catch::Approx(1.0 / sphere_measure(d)).margin(1e-13));
    }
}

TEST_CASE("fast harmonic path equals the direct kernel sum") {
    for (int d : {1, 2}) {
        auto grid = eval_grid(d, 2);
        KernelSpec spec{d, 2, ScalingMode::eigenvalue};
        auto sample = make_sample(d, sample_uniform(99, d, 3));
        auto fast = estimate_density(sample, spec, grid);
        auto direct = estimate_density_direct(sample, spec, grid);
        for (std::size_t i = 0; i < grid->size(); i += grid->size() / 10 + 1)
            CHECK(fast.values[i] == Catch::Approx(direct.values[i]).margin(1e-12));
    }
}

TEST_CASE("estimator preconditions") {
    auto grid = eval_grid(2, 1);
    KernelSpec too_fine{2, 3, ScalingMode::eigenvalue};
    auto sample = make_sample(2, sample_uniform(1, 2, 5));
    CHECK_THROWS_AS(estimate_density(sample, too_fine, grid), std::invalid_argument);
    KernelSpec wrong_d{1, 1, ScalingMode::eigenvalue};
    CHECK_THROWS_AS(estimate_density(sample, wrong_d, eval_grid(1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(make_sample(2, {}), std::invalid_argument);
}

TEST_CASE("estimate integrates to one") {
    // only the constant mode survives integration and a(0) = 1
    for (int d : {1, 2}) {
        KernelSpec spec{d, 3, ScalingMode::eigenvalue};
        auto sample = make_sample(d, sample_uniform(31, d, 40));
        auto aw = aj_weights(spec);
        auto cub = build_cubature(d, max_degree(spec) + 1);
        double integral = cub.integrate([&](const SpherePoint& y) {
            double acc = 0.0;
            for (const auto& x : sample.points) acc += zonal_eval(d, aw, dot(x, y));
            return acc / static_cast<double>(sample.n());
        });
        CHECK(integral == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("linearity across concatenated samples") {
    auto grid = eval_grid(2, 2);
    KernelSpec spec{2, 2, ScalingMode::eigenvalue};
    auto a = sample_uniform(7, 2, 30);
    auto b = sample_uniform(8, 2, 50);
    auto fa = estimate_density(make_sample(2, a), spec, grid);
    auto fb = estimate_density(make_sample(2, b), spec, grid);
    std::vector<SpherePoint> all = a;
    all.insert(all.end(), b.begin(), b.end());
    auto fab = estimate_density(make_sample(2, all), spec, grid);
    for (std::size_t i = 0; i < grid->size(); i += 17)
        CHECK(fab.values[i] == Catch::Approx((30.0 * fa.values[i] + 50.0 * fb.values[i]) / 80.0).margin(1e-12));
}

TEST_CASE("replication average approaches the population projection") {
    // uniform truth: A_j f is the constant density at every level
    const int R = 2000;
    auto grid = eval_grid(2, 2);
    KernelSpec spec{2, 2, ScalingMode::eigenvalue};
    const std::size_t n = 50;
    std::vector<double> mean(grid->size(), 0.0), m2(grid->size(), 0.0);
    for (int r = 0; r < R; ++r) {
        auto est = estimate_density(make_sample(2, sample_uniform(derive_seed(606, r), 2, n)), spec, grid);
        for (std::size_t i = 0; i < grid->size(); ++i) {
            double delta = est.values[i] - mean[i];
            mean[i] += delta / (r + 1.0);
            m2[i] += delta * (est.values[i] - mean[i]);
        }
    }
    double truth = 1.0 / (4 * kPi);
    for (std::size_t i = 0; i < grid->size(); i += grid->size() / 40 + 1) {
        double se = std::sqrt(m2[i] / (R - 1.0) / R);
        CHECK(std::abs(mean[i] - truth) <= 4.0 * se + 1e-12);
    }
}

TEST_CASE("field sup respects the kernel envelope") {
    for (int d : {1, 2}) {
        KernelSpec spec{d, 3, ScalingMode::eigenvalue};
        auto grid = eval_grid(d, 3);
        auto est = estimate_density(make_sample(d, sample_uniform(21, d, 25)), spec, grid);
        double envelope = (d == 1 ? 2.0 : 1.0) * std::ldexp(1.0, d * 3) / sphere_measure(d);
        CHECK(sup_norm(est) <= envelope * (1 + 1e-12));
    }
}

TEST_CASE("sup_norm_diff basics and mask monotonicity") {
    auto grid = eval_grid(2, 1);
    FieldOnGrid a{grid, std::vector<double>(grid->size(), 0.7)};
    FieldOnGrid b{grid, std::vector<double>(grid->size(), 0.0)};
    CHECK(sup_norm_diff(a, a) == 0.0);
    CHECK(sup_norm_diff(a, b) == Catch::Approx(0.7));
    CHECK(sup_norm(a) == Catch::Approx(0.7));

    auto est = estimate_density(make_sample(2, sample_uniform(77, 2, 60)), KernelSpec{2, 1, ScalingMode::eigenvalue}, grid);
    auto mask = cap_mask(*grid, north_pole(2), kPi / 2);
    CHECK(sup_norm_diff(est, b, mask) <= sup_norm_diff(est, b));

    FieldOnGrid other{eval_grid(2, 2), std::vector<double>(eval_grid(2, 2)->size(), 0.0)};
    CHECK_THROWS_AS(sup_norm_diff(a, other), std::invalid_argument);
}

TEST_CASE("plug-in sup bound") {
    // clamp definition
    CHECK(density_sup_clamp(0.05, 2) == Catch::Approx(1.0 / (4 * kPi)));
    CHECK(density_sup_clamp(0.5, 2) == 0.5);

    // uniform density, moderate n: plug-in lands within 20% of the true sup
    auto grid = eval_grid(2, 3);
    auto sample = make_sample(2, sample_uniform(909, 2, 5000));
    double fb = plugin_sup_bound(sample, 2, 3, grid);
    CHECK(fb >= 1.0 / (4 * kPi));
    CHECK(fb <= 1.35 / (4 * kPi));  // measured 1.17-1.30 across seeds at this design

    // single point: sup of one kernel, about A_j(1)
    auto one = make_sample(2, sample_uniform(4242, 2, 1));
    double fb1 = plugin_sup_bound(one, 2, 3, grid);
    KernelSpec spec{2, 3, ScalingMode::eigenvalue};
    CHECK(fb1 == Catch::Approx(kernel_Aj(spec, 1.0)).epsilon(0.02));
}

TEST_CASE("rademacher field symmetry and single-summand case") {
    auto grid = eval_grid(2, 3);
    KernelSpec spec{2, 3, ScalingMode::eigenvalue};
    auto sample = make_sample(2, sample_uniform(31337, 2, 40));
    Rng rng(5);
    std::vector<double> signs(40);
    for (double& s : signs) s = rng.sign();
    double r1 = rademacher_sup(sample, signs, spec, grid);
    for (double& s : signs) s = -s;
    CHECK(rademacher_sup(sample, signs, spec, grid) == Catch::Approx(r1).margin(1e-14));

    std::vector<double> plus(40, 1.0);
    auto est = estimate_density(sample, spec, grid);
    CHECK(rademacher_sup(sample, plus, spec, grid) == Catch::Approx(sup_norm(est)).margin(1e-13));

    auto one = make_sample(2, sample_uniform(50, 2, 1));
    double rs = rademacher_sup(one, {1.0}, spec, grid);
    CHECK(rs == Catch::Approx(kernel_Aj(spec, 1.0)).epsilon(0.02));
    CHECK_THROWS_AS(rademacher_sup(one, {1.0, -1.0}, spec, grid), std::invalid_argument);
}
