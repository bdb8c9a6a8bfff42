#pragma once

#include <cmath>
#include <stdexcept>

#include "needlet/estimation.hpp"
#include "needlet/needlets.hpp"

namespace needlet {

/// Inputs of the explicit deviation bounds. c0_l and Z_l are the per-level
/// measured values (sigma_bar); C_M and k2 are their monotonized upper
/// bounds (sigma_mono). D2 is the kernel envelope constant used by the
/// Rademacher bound; callers pass the corrected d=1 value where needed.
struct ConcentrationParams {
    double n = 0;
    int l = 0;
    double x = 0;
    double f_sup = 0;
    double c0_l = 0;
    double Z_l = 0;
    double D1 = 0;
    double D2 = 0;
    double k2 = 0;
    double C_M = 0;
    int d = 2;

    void validate() const {
        if (!(n > 0) || !(x > 0) || !(f_sup > 0) || !(D1 > 0) || l < 0)
            throw std::invalid_argument("ConcentrationParams: nonpositive inputs");
    }
};

inline ConcentrationParams make_params(const LevelConstants& lc, double n, int l, double x, double f_sup) {
    ConcentrationParams p;
    p.n = n;
    p.l = l;
    p.x = x;
    p.f_sup = f_sup;
    p.d = lc.d;
    bool measured = l <= lc.measured_up_to;
    p.c0_l = measured ? lc.c0[static_cast<std::size_t>(l)] : lc.C_at(l);
    p.Z_l = measured ? lc.Zl[static_cast<std::size_t>(l)] : lc.k2 * std::ldexp(1.0, l * lc.d);
    auto sc = sphere_constants(lc.d);
    p.D1 = sc.D1;
    p.D2 = lc.d == 1 ? 2.0 * sc.D2 : sc.D2;  // measured d=1 envelope carries a factor 2
    p.k2 = lc.k2;
    p.C_M = lc.C_at(l);
    return p;
}

/// Bernstein-type deviation bound with the level's measured constants:
///   sigma_bar = abar sqrt(2^{ld}/n) + abar' 2^{ld}/n,
///   abar  = c0 sqrt(2 (log(2 Z_l) + x) f_sup),
///   abar' = c0 (2/3) D1 (log(2 Z_l) + x).
inline double sigma_bar(const ConcentrationParams& p) {
    p.validate();
    if (!(p.c0_l > 0) || !(p.Z_l > 0)) throw std::invalid_argument("sigma_bar: nonpositive constants");
    double lg = std::log(2.0 * p.Z_l) + p.x;
    double abar = p.c0_l * std::sqrt(2.0 * lg * p.f_sup);
    double abarp = p.c0_l * (2.0 / 3.0) * p.D1 * lg;
    double r = std::ldexp(1.0, p.l * p.d) / p.n;
    return abar * std::sqrt(r) + abarp * r;
}

struct SigmaMono {
    double sigma;
    double A;  // sigma = A sqrt(2^{ld}/n)
};

/// Monotonized bound: same shape with |Z_l| and c0 replaced by the upper
/// bounds k2 2^{ld} and C_M, which makes l -> sigma strictly increasing.
inline SigmaMono sigma_mono(const ConcentrationParams& p) {
    p.validate();
    if (!(p.C_M > 0) || !(p.k2 > 0)) throw std::invalid_argument("sigma_mono: nonpositive constants");
    double lg = std::log(2.0 * p.k2 * std::ldexp(1.0, p.l * p.d)) + p.x;
    double alpha = p.C_M * std::sqrt(2.0 * lg * p.f_sup);
    double alphap = p.C_M * (2.0 / 3.0) * p.D1 * lg;
    double r = std::ldexp(1.0, p.l * p.d) / p.n;
    double A = alpha + alphap * std::sqrt(r);
    return SigmaMono{A * std::sqrt(r), A};
}

/// Empirical Rademacher supremum R_n = sup_Omega |(1/n) sum eps_i A_j(X_i,.)|.
inline double rademacher_sup(const Sample& sample, const std::vector<double>& signs, const KernelSpec& spec,
                             std::shared_ptr<const EvalGrid> grid, const OmegaMask& mask = {}) {
    return sup_norm(rademacher_field(sample, signs, spec, grid), mask);
}

/// Symmetrized deviation bound
///   sigma_R = 6 R_n + 10 sqrt(2^{jd} D2 f_sup (x + log 2)/n)
///           + 22 2^{jd} D2 (2x + 2 log 2)/n.
inline double sigma_R(const ConcentrationParams& p, double R_n) {
    p.validate();
    if (R_n < 0) throw std::invalid_argument("sigma_R: negative R_n");
    if (!(p.D2 > 0)) throw std::invalid_argument("sigma_R: nonpositive D2");
    double pw = std::ldexp(1.0, p.l * p.d);
    return 6.0 * R_n + 10.0 * std::sqrt(pw * p.D2 * p.f_sup * (p.x + std::log(2.0)) / p.n) +
           22.0 * pw * p.D2 * (2.0 * p.x + 2.0 * std::log(2.0)) / p.n;
}

}  // namespace needlet
