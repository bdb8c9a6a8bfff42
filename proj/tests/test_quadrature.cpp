#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "needlet/geometry.hpp"
#include "needlet/quadrature.hpp"

using namespace needlet;

namespace {

// closed-form moment of the Jacobi weight: int (1-t)^a (1+t)^b t^m dt,
// from t^m = ((1+t)-1)^m and the Beta integral
double jacobi_moment(double a, double b, int m) {
    double sum = 0.0;
    double binom = 1.0;
    for (int i = 0; i <= m; ++i) {
        double beta = std::exp((a + b + i + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                               std::lgamma(b + i + 1.0) - std::lgamma(a + b + i + 2.0));
        sum += (((m - i) % 2 == 0) ? 1.0 : -1.0) * binom * beta;
        binom = binom * (m - i) / (i + 1.0);
    }
    return sum;
}

}  // namespace

TEST_CASE("gauss-legendre nodes/weights against the 5-point classical rule") {
    auto r = gauss_legendre(5);
    REQUIRE(r.nodes.size() == 5);
    CHECK(r.nodes[2] == Catch::Approx(0.0).margin(1e-15));
    CHECK(r.nodes[4] == Catch::Approx(0.906179845938664).margin(1e-13));
    CHECK(r.weights[2] == Catch::Approx(128.0 / 225.0).margin(1e-13));
    CHECK(r.weights[4] == Catch::Approx(0.236926885056189).margin(1e-13));
}

TEST_CASE("gauss-legendre integrates monomials exactly up to 2n-1") {
    for (int n : {1, 3, 8, 40, 129}) {
        auto r = gauss_legendre(n);
        for (int m = 0; m <= std::min(2 * n - 1, 14); ++m) {
            double got = r.integrate_fn([m](double t) { return std::pow(t, m); });
            double want = (m % 2 == 1) ? 0.0 : 2.0 / (m + 1.0);
            CHECK(got == Catch::Approx(want).margin(1e-13));
        }
        // degree 2n is the first failure for the highest-degree rule checked
        double sum = 0.0;
        for (double w : r.weights) {
            CHECK(w > 0.0);
            sum += w;
        }
        CHECK(sum == Catch::Approx(2.0).margin(1e-13));
    }
}

TEST_CASE("gauss-jacobi reduces to chebyshev at a=b=-1/2") {
    int n = 9;
    auto r = gauss_jacobi(n, -0.5, -0.5);
    for (int i = 0; i < n; ++i) {
        CHECK(r.weights[i] == Catch::Approx(kPi / n).epsilon(1e-12));
        double want = std::cos((2.0 * (n - i) - 1.0) * kPi / (2.0 * n));
        CHECK(r.nodes[i] == Catch::Approx(want).margin(1e-12));
    }
}

TEST_CASE("gauss-jacobi integrates weighted monomials exactly") {
    for (auto [a, b] : {std::pair{0.75, 0.0}, {0.25, 0.0}, {1.5, 0.5}, {0.75, -0.5}, {2.25, 1.0}}) {
        for (int n : {6, 20, 96}) {
            auto r = gauss_jacobi(n, a, b);
            for (double w : r.weights) CHECK(w > 0.0);
            // the alternating-sum oracle itself loses digits past m ~ 9
            for (int m = 0; m <= 8; ++m) {
                double got = r.integrate_fn([m](double t) { return std::pow(t, m); });
                INFO("a=" << a << " b=" << b << " n=" << n << " m=" << m);
                CHECK(got == Catch::Approx(jacobi_moment(a, b, m)).epsilon(2e-11).margin(1e-14));
            }
        }
    }
    // frozen high-precision moments (mpmath) for the higher degrees
    auto r = gauss_jacobi(20, 0.75, 0.0);
    CHECK(r.integrate_fn([](double t) { return std::pow(t, 10); }) ==
          Catch::Approx(0.16112403045653456).epsilon(1e-12));
    CHECK(r.integrate_fn([](double t) { return std::pow(t, 11); }) ==
          Catch::Approx(-0.12480167262690023).epsilon(1e-12));
}

TEST_CASE("jacobi weight mass closed form matches the rule total") {
    for (auto [a, b] : {std::pair{0.75, 0.0}, {0.25, -0.5}, {3.2, 1.7}}) {
        auto r = gauss_jacobi(12, a, b);
        double sum = 0.0;
        for (double w : r.weights) sum += w;
        CHECK(sum == Catch::Approx(jacobi_weight_mass(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("large gauss-jacobi rules stay positive and ordered") {
    auto r = gauss_jacobi(300, 0.75, 0.5);
    for (std::size_t i = 1; i < r.nodes.size(); ++i) CHECK(r.nodes[i] > r.nodes[i - 1]);
    for (double w : r.weights) CHECK(w > 0.0);
}
