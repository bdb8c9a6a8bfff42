#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace needlet {

struct QuadratureRule {
    std::vector<double> nodes;    // ascending in (-1, 1)
    std::vector<double> weights;  // positive

    double integrate(const std::vector<double>& fvals) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * fvals[i];
        return s;
    }

    template <typename Fn>
    double integrate_fn(Fn&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s;
    }
};

/// n-point Gauss-Legendre rule on [-1,1]; exact for polynomials of degree
/// <= 2n-1. Newton iteration on the Legendre recurrence.
inline QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int k = 0; k < n; ++k) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * k + 1.0) * z * p2 - k * p3) / (k + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        r.nodes[i] = -z;
        r.nodes[n - 1 - i] = z;
        double w = 2.0 / ((1.0 - z * z) * pp * pp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

/// n-point Gauss-Jacobi rule for the weight (1-t)^a (1+t)^b on [-1,1];
/// exact for polynomials of degree <= 2n-1 against that weight. Requires
/// a, b > -1. Newton iteration with the classical starting guesses.
inline QuadratureRule gauss_jacobi(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be >= 1");
    if (a <= -1.0 || b <= -1.0) throw std::invalid_argument("gauss_jacobi: need a, b > -1");
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    std::vector<double> x(n + 1);  // 1-based, descending
    double alf = a, bet = b;
    double z = 0.0, pp = 0.0, p2 = 0.0, temp = 0.0;
    for (int j = 1; j <= n; ++j) {
        if (j == 1) {
            double an = alf / n, bn = bet / n;
            double r1 = (1.0 + alf) * (2.78 / (4.0 + n * n) + 0.768 * an / n);
            double r2 = 1.0 + 1.48 * an + 0.96 * bn + 0.452 * an * an + 0.83 * an * bn;
            z = 1.0 - r1 / r2;
        } else if (j == 2) {
            double r1 = (4.1 + alf) / ((1.0 + alf) * (1.0 + 0.156 * alf));
            double r2 = 1.0 + 0.06 * (n - 8.0) * (1.0 + 0.12 * alf) / n;
            double r3 = 1.0 + 0.012 * bet * (1.0 + 0.25 * std::abs(alf)) / n;
            z -= (1.0 - z) * r1 * r2 * r3;
        } else if (j == 3) {
            double r1 = (1.67 + 0.28 * alf) / (1.0 + 0.37 * alf);
            double r2 = 1.0 + 0.22 * (n - 8.0) / n;
            double r3 = 1.0 + 8.0 * bet / ((6.28 + bet) * n * n);
            z -= (x[1] - z) * r1 * r2 * r3;
        } else if (j == n - 1) {
            double r1 = (1.0 + 0.235 * bet) / (0.766 + 0.119 * bet);
            double r2 = 1.0 / (1.0 + 0.639 * (n - 4.0) / (1.0 + 0.71 * (n - 4.0)));
            double r3 = 1.0 / (1.0 + 20.0 * alf / ((7.5 + alf) * n * n));
            z += (z - x[n - 3]) * r1 * r2 * r3;
        } else if (j == n) {
            double r1 = (1.0 + 0.37 * bet) / (1.67 + 0.28 * bet);
            double r2 = 1.0 / (1.0 + 0.22 * (n - 8.0) / n);
            double r3 = 1.0 / (1.0 + 8.0 * alf / ((6.28 + alf) * n * n));
            z += (z - x[n - 2]) * r1 * r2 * r3;
        } else {
            z = 3.0 * x[j - 1] - 3.0 * x[j - 2] + x[j - 3];
        }
        bool converged = false;
        int polish = 0;
        for (int it = 0; it < 80; ++it) {
            temp = 2.0 + alf + bet;
            double p1 = (alf - bet + temp * z) / 2.0;
            p2 = 1.0;
            for (int jj = 2; jj <= n; ++jj) {
                double p3 = p2;
                p2 = p1;
                temp = 2.0 * jj + alf + bet;
                double aa = 2.0 * jj * (jj + alf + bet) * (temp - 2.0);
                double bb = (temp - 1.0) * (alf * alf - bet * bet + temp * (temp - 2.0) * z);
                double cc = 2.0 * (jj - 1 + alf) * (jj - 1 + bet) * temp;
                p1 = (bb * p2 - cc * p3) / aa;
            }
            pp = (n * (alf - bet - temp * z) * p1 + 2.0 * (n + alf) * (n + bet) * p2) / (temp * (1.0 - z * z));
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) converged = true;
            if (converged && ++polish >= 3) break;  // keep polishing past first convergence
        }
        if (!converged) throw std::runtime_error("gauss_jacobi: Newton failed to converge");
        x[j] = z;
        double w = std::exp(std::lgamma(alf + n) + std::lgamma(bet + n) - std::lgamma(n + 1.0) -
                            std::lgamma(n + alf + bet + 1.0)) *
                   temp * std::pow(2.0, alf + bet) / (pp * p2);
        r.nodes[n - j] = z;  // store ascending
        r.weights[n - j] = w;
    }
    return r;
}

/// Total mass of the Jacobi weight, 2^{a+b+1} B(a+1, b+1); closed form used
/// to cross-check the rules and to normalize densities.
inline double jacobi_weight_mass(double a, double b) {
    return std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                    std::lgamma(a + b + 2.0));
}

}  // namespace needlet
