#include <catch2/catch_amalgamated.hpp>

#include "needlet/geometry.hpp"
#include "test_helpers.hpp"

using namespace needlet;

TEST_CASE("make_point normalizes and validates") {
    auto p = make_point(0.0, 0.0, 2.0);
    CHECK(p.x() == 0.0);
    CHECK(p.z() == Catch::Approx(1.0).margin(1e-12));

    auto q = make_point(1.0, 0.0);
    CHECK(q.dim == 1);
    CHECK(q.x() == Catch::Approx(1.0).margin(1e-12));

    auto r = make_point(3.0, 4.0, 0.0);
    CHECK(r.x() == Catch::Approx(0.6).margin(1e-12));
    CHECK(r.y() == Catch::Approx(0.8).margin(1e-12));

    CHECK_THROWS_AS(make_point(0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_point(std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_point(std::vector<double>{1.0, 0.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("geodesic distance basics") {
    auto n = make_point(0.0, 0.0, 1.0);
    auto s = make_point(0.0, 0.0, -1.0);
    auto e = make_point(1.0, 0.0, 0.0);
    CHECK(geodesic_distance(n, n) == 0.0);
    CHECK(geodesic_distance(n, s) == Catch::Approx(kPi).margin(1e-15));
    CHECK(geodesic_distance(n, e) == Catch::Approx(kPi / 2).margin(1e-15));
    CHECK_THROWS_AS(geodesic_distance(n, make_point(1.0, 0.0)), std::invalid_argument);
}

TEST_CASE("geodesic distance is a rotation-invariant metric") {
    Rng rng(91);
    auto pts = sample_uniform(17, 2, 60);
    for (int trial = 0; trial < 40; ++trial) {
        const auto& a = pts[static_cast<std::size_t>(rng.uniform() * 60)];
        const auto& b = pts[static_cast<std::size_t>(rng.uniform() * 60)];
        const auto& c = pts[static_cast<std::size_t>(rng.uniform() * 60)];
        CHECK(geodesic_distance(a, b) == geodesic_distance(b, a));
        CHECK(geodesic_distance(a, c) <= geodesic_distance(a, b) + geodesic_distance(b, c) + 1e-12);

        auto m = testutil::random_rotation(rng);
        double before = geodesic_distance(a, b);
        double after = geodesic_distance(testutil::rotate(m, a), testutil::rotate(m, b));
        CHECK(after == Catch::Approx(before).margin(1e-12));
    }
}

TEST_CASE("uniform sampler determinism and moments") {
    auto s1 = sample_uniform(42, 2, 2);
    auto s2 = sample_uniform(42, 2, 2);
    REQUIRE(s1.size() == 2);
    for (int i = 0; i < 2; ++i)
        for (int c = 0; c < 3; ++c) CHECK(s1[i].coords[c] == s2[i].coords[c]);

    CHECK_THROWS_AS(sample_uniform(1, 3, 10), std::invalid_argument);

    const std::size_t n = 100000;
    auto s = sample_uniform(2024, 2, n);
    double mx = 0, my = 0, mz = 0, mz2 = 0;
    for (const auto& p : s) {
        mx += p.x();
        my += p.y();
        mz += p.z();
        mz2 += p.z() * p.z();
    }
    mx /= n; my /= n; mz /= n; mz2 /= n;
    CHECK(std::abs(mx) < 0.02);
    CHECK(std::abs(my) < 0.02);
    CHECK(std::abs(mz) < 0.02);
    CHECK(std::abs(mz2 - 1.0 / 3.0) < 0.02);
}

TEST_CASE("uniform sampler chi-square on equal-area bins") {
    // 10 z-bands x 10 longitude sectors, all of equal area; d.f. = 99.
    // Critical value chi2_{0.999}(99) = 148.2303591651...
    const std::size_t n = 100000;
    auto s = sample_uniform(777, 2, n);
    std::array<std::array<long, 10>, 10> counts{};
    for (const auto& p : s) {
        int zi = std::min(9, static_cast<int>((p.z() + 1.0) / 0.2));
        double phi = std::atan2(p.y(), p.x());
        if (phi < 0) phi += 2 * kPi;
        int pi_ = std::min(9, static_cast<int>(phi / (2 * kPi) * 10));
        counts[zi][pi_]++;
    }
    double expected = static_cast<double>(n) / 100.0;
    double chi2 = 0.0;
    for (auto& row : counts)
        for (long c : row) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 148.23035916510173);
}

TEST_CASE("eval grid d=1 is equispaced with exact mesh") {
    auto g0 = build_eval_grid(1, 0);
    CHECK(g0.size() >= 16);
    CHECK(g0.mesh_norm == Catch::Approx(kPi / static_cast<double>(g0.size())));
    CHECK(g0.mesh_norm <= mesh_bound_for_level(0));

    auto g3 = build_eval_grid(1, 3);
    CHECK(g3.mesh_norm <= kPi / 64.0);

    // worst-case probe: midpoints between adjacent nodes
    double worst = 0.0;
    for (std::size_t i = 0; i < g0.size(); ++i) {
        auto mid = circle_point(g0.circle_angle(i) + kPi / static_cast<double>(g0.size()));
        double best = kPi;
        for (std::size_t j = 0; j < g0.size(); ++j)
            best = std::min(best, geodesic_distance(mid, g0.point(j)));
        worst = std::max(worst, best);
    }
    CHECK(worst <= g0.mesh_norm + 1e-12);
}

TEST_CASE("eval grid d=2 satisfies the oversampling contract") {
    for (auto kind : {GridKind::rings, GridKind::fibonacci}) {
        for (int level : {0, 2, 3}) {
            auto g = build_eval_grid(2, level, kind);
            double bound = mesh_bound_for_level(level);
            INFO("kind=" << (kind == GridKind::rings ? "rings" : "fibonacci") << " level=" << level
                         << " size=" << g.size() << " mesh=" << g.mesh_norm << " bound=" << bound);
            CHECK(g.mesh_norm <= bound);
            // independent spot check: random probes stay within the certified mesh
            auto probes = sample_uniform(5 + level, 2, 4000);
            double worst = 0.0;
            for (const auto& q : probes) {
                double best = kPi;
                for (std::size_t i = 0; i < g.size(); ++i)
                    best = std::min(best, geodesic_distance(q, g.point(i)));
                worst = std::max(worst, best);
            }
            CHECK(worst <= g.mesh_norm + 1e-12);
        }
    }
}

TEST_CASE("ring grid point materialization is consistent") {
    auto g = build_eval_grid(2, 2, GridKind::rings);
    REQUIRE(g.size() > 0);
    std::size_t count = 0;
    for (const auto& r : g.rings) count += r.count;
    CHECK(count == g.size());
    for (std::size_t i : {std::size_t{0}, g.size() / 3, g.size() - 1}) {
        auto p = g.point(i);
        CHECK(std::abs(dot(p, p) - 1.0) < 1e-12);
    }
}
