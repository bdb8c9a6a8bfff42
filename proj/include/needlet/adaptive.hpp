#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "needlet/concentration.hpp"
#include "needlet/estimation.hpp"
#include "needlet/needlets.hpp"

namespace needlet {

/// Region over which sup norms and coverage are taken; realized as a mask on
/// each grid it meets.
struct OmegaSpec {
    enum class Kind { full, cap };
    Kind kind = Kind::full;
    SpherePoint center;
    double radius = 0.0;
};

inline OmegaMask omega_mask(const OmegaSpec& spec, const EvalGrid& grid) {
    if (spec.kind == OmegaSpec::Kind::full) return {};
    return cap_mask(grid, spec.center, spec.radius);
}

enum class JmaxRule { standard, practical };

/// Largest j with 2^{jd} <= n2 / (log n2)^2; 0 when n2 is too small.
inline int compute_jmax(std::size_t n2, int d) {
    if (n2 < 8) return 0;
    double cap = static_cast<double>(n2) / std::pow(std::log(static_cast<double>(n2)), 2.0);
    int j = 0;
    while (std::ldexp(1.0, (j + 1) * d) <= cap) ++j;
    return j;
}

/// The alternative rule: balance the Gaussian and Poissonian parts of the
/// monotonized bound at a real-valued level l*, then back off by
/// (log n2)^{1/d}. Requires the measured constants and a sup-norm bound.
inline int compute_jmax_practical(std::size_t n2, int d, const LevelConstants& lc, double x, double f_sup) {
    auto imbalance = [&](double l) {
        // alpha(x,l) sqrt(2^{ld}/n) - alpha'(x,l) 2^{ld}/n, sign only
        double lg = std::log(2.0 * lc.k2 * std::pow(2.0, l * d)) + x;
        double alpha = std::sqrt(2.0 * lg * f_sup);
        double alphap = (2.0 / 3.0) * sphere_constants(d).D1 * lg;
        double r = std::pow(2.0, l * d) / static_cast<double>(n2);
        return alpha * std::sqrt(r) - alphap * r;
    };
    double lo = 0.0, hi = 60.0;
    if (imbalance(lo) <= 0.0) return 0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (imbalance(mid) > 0.0 ? lo : hi) = mid;
    }
    double lstar = 0.5 * (lo + hi);
    double jmax = lstar - std::log2(std::log(static_cast<double>(n2))) / d;
    return std::max(0, static_cast<int>(std::floor(jmax)));
}

struct BandConfig {
    double kappa = 1.0;
    int u_n = -1;  // -1: ceil(log2 log2 n) at band-build time
    double x = 2.0;
    std::size_t n1 = 0, n2 = 0;
    OmegaSpec omega;
    ScalingMode mode = ScalingMode::eigenvalue;
    bool plugin_fsup = true;   // otherwise known_fsup is used
    double known_fsup = 0.0;
    JmaxRule jmax_rule = JmaxRule::standard;

    void validate() const {
        if (n1 < 1 || n2 < 1) throw std::invalid_argument("BandConfig: empty split");
        double ratio = static_cast<double>(n1) / static_cast<double>(n2);
        if (ratio < 0.25 || ratio > 4.0)
            throw std::invalid_argument("BandConfig: n1/n2 must lie in [1/4, 4]");
        if (!(kappa > 0)) throw std::invalid_argument("BandConfig: kappa must be positive");
        if (!(x > 0)) throw std::invalid_argument("BandConfig: x must be positive");
        if (!plugin_fsup && !(known_fsup > 0))
            throw std::invalid_argument("BandConfig: known_fsup must be positive");
    }
};

inline int undersmoothing(const BandConfig& cfg) {
    if (cfg.u_n >= 0) return cfg.u_n;
    double n = static_cast<double>(cfg.n1 + cfg.n2);
    return std::max(0, static_cast<int>(std::ceil(std::log2(std::log2(n)))));
}

struct PairwiseDiag {
    int j;
    int l;
    double sup_diff;
    double threshold;  // 4 sigma(n2, l, kappa log n2)
};

struct LepskiResult {
    int j_hat = 0;
    int j_max = 0;
    double f_sup_used = 0.0;
    std::vector<double> sigma_by_level;  // sigma(n2, l, kappa log n2), l = 0..j_max
    std::vector<PairwiseDiag> diagnostics;
};

/// Smallest j whose estimator differs from every finer-level estimator by at
/// most 4 sigma(n2, l, kappa log n2); j_max when no smaller level passes
/// (the j_max candidate passes vacuously). Pairwise sups are taken on the
/// grid of the finer level.
inline LepskiResult lepski_select(const Sample& s2, const BandConfig& cfg, const LevelConstants& lc,
                                  GridKind grid_kind = GridKind::rings) {
    cfg.validate();
    if (s2.n() != cfg.n2) throw std::invalid_argument("lepski_select: sample size differs from cfg.n2");
    int d = s2.d;
    LepskiResult res;
    res.j_max = cfg.jmax_rule == JmaxRule::standard
                    ? compute_jmax(cfg.n2, d)
                    : compute_jmax_practical(cfg.n2, d, lc, cfg.kappa * std::log(static_cast<double>(cfg.n2)),
                                             cfg.plugin_fsup ? 1.0 / sphere_measure(d) : cfg.known_fsup);
    int jm = res.j_max;
    double x_sel = cfg.kappa * std::log(static_cast<double>(cfg.n2));
    res.f_sup_used = cfg.plugin_fsup
                         ? plugin_sup_bound(s2, d, jm, eval_grid(d, jm, grid_kind), cfg.mode)
                         : cfg.known_fsup;
    for (int l = 0; l <= jm; ++l)
        res.sigma_by_level.push_back(
            sigma_mono(make_params(lc, static_cast<double>(cfg.n2), l, x_sel, res.f_sup_used)).sigma);

    // harmonic coefficients once at the finest level; pairwise differences
    // reuse them with differenced window weights
    KernelSpec top{d, jm, cfg.mode};
    int K = max_degree(top);
    auto coeffs = empirical_harmonics(d, K, s2.points, 1.0 / static_cast<double>(s2.n()));
    std::vector<std::vector<double>> w_by_level;
    for (int l = 0; l <= jm; ++l) w_by_level.push_back(aj_weights(KernelSpec{d, l, cfg.mode}));

    res.j_hat = jm;
    for (int j = 0; j < jm; ++j) {
        bool all_ok = true;
        for (int l = j + 1; l <= jm; ++l) {
            auto grid = eval_grid(d, l, grid_kind);
            int Kl = static_cast<int>(w_by_level[static_cast<std::size_t>(l)].size()) - 1;
            std::vector<double> diff_coeffs(coeffs.begin(), coeffs.end());
            std::vector<double> wdiff(static_cast<std::size_t>(Kl) + 1, 0.0);
            for (int k = 0; k <= Kl; ++k) {
                double wj = k < static_cast<int>(w_by_level[static_cast<std::size_t>(j)].size())
                                ? w_by_level[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]
                                : 0.0;
                wdiff[static_cast<std::size_t>(k)] = wj - w_by_level[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
            }
            apply_degree_weights(d, K, diff_coeffs, wdiff);
            FieldOnGrid diff{grid, eval_harmonics(d, K, diff_coeffs, *grid)};
            double sup = sup_norm(diff, omega_mask(cfg.omega, *grid));
            double thr = 4.0 * res.sigma_by_level[static_cast<std::size_t>(l)];
            res.diagnostics.push_back(PairwiseDiag{j, l, sup, thr});
            if (sup > thr) {
                all_ok = false;
                break;
            }
        }
        if (all_ok) {
            res.j_hat = j;
            break;
        }
    }
    return res;
}

/// Confidence band: center f_{n1}(j_hat + u_n, .), half width
/// 1.01 sigma(n1, j_hat + u_n, x).
struct Band {
    std::shared_ptr<const EvalGrid> grid;
    OmegaMask mask;
    std::vector<double> center;
    double half_width = 0.0;
    int selected_j = 0;
    int level = 0;  // selected_j + u_n
    int j_max = 0;
    int u_n = 0;
    double x = 0.0;
    double f_sup_used = 0.0;
    std::vector<double> sigma_by_level;  // sigma(n1, l, x) for l = 0..level
    std::vector<PairwiseDiag> diagnostics;
};

inline Band build_band(const Sample& s1, const LepskiResult& sel, const BandConfig& cfg,
                       const LevelConstants& lc, std::shared_ptr<const EvalGrid> grid,
                       double f_sup_override = 0.0) {
    cfg.validate();
    if (s1.n() != cfg.n1) throw std::invalid_argument("build_band: sample size differs from cfg.n1");
    Band band;
    band.u_n = undersmoothing(cfg);
    band.selected_j = sel.j_hat;
    band.j_max = sel.j_max;
    band.level = sel.j_hat + band.u_n;
    band.x = cfg.x;
    band.diagnostics = sel.diagnostics;
    band.f_sup_used = f_sup_override > 0.0 ? f_sup_override
                      : (cfg.plugin_fsup ? sel.f_sup_used : cfg.known_fsup);
    if (grid->design_level < band.level)
        throw std::invalid_argument("build_band: grid under-resolves the band level");
    KernelSpec spec{s1.d, band.level, cfg.mode};
    auto field = estimate_density(s1, spec, grid);
    band.grid = grid;
    band.mask = omega_mask(cfg.omega, *grid);
    band.center = std::move(field.values);
    for (int l = 0; l <= band.level; ++l)
        band.sigma_by_level.push_back(
            sigma_mono(make_params(lc, static_cast<double>(cfg.n1), l, cfg.x, band.f_sup_used)).sigma);
    band.half_width = 1.01 * band.sigma_by_level[static_cast<std::size_t>(band.level)];
    return band;
}

/// Does the band contain `truth` at every unmasked node?
template <typename Fn>
bool band_covers(const Band& band, Fn&& truth) {
    for (std::size_t i = 0; i < band.center.size(); ++i) {
        if (!band.mask.full() && !band.mask.keep[i]) continue;
        if (std::abs(band.center[i] - truth(band.grid->point(i))) > band.half_width) return false;
    }
    return true;
}

/// Rate-balancing level: min{j in J \ {0}: b2 2^{-jt} <= sigma(n2,j)} - 1,
/// or j_max - 1 when no level qualifies.
inline int theoretical_jstar(double t, double b2, std::size_t n2, const BandConfig& cfg,
                             const LevelConstants& lc, int j_max, double f_sup) {
    if (!(t > 0) || !(b2 > 0)) throw std::invalid_argument("theoretical_jstar: t, b2 must be positive");
    double x_sel = cfg.kappa * std::log(static_cast<double>(n2));
    for (int j = 1; j <= j_max; ++j) {
        double sigma = sigma_mono(make_params(lc, static_cast<double>(n2), j, x_sel, f_sup)).sigma;
        if (b2 * std::pow(2.0, -t * j) <= sigma) return j - 1;
    }
    return j_max - 1;
}

/// Smallest integer m* >= 0 with b_n 2^{t m*} >= 7 b2.
inline int m_star(double b_n, double b2, double t) {
    if (!(b_n > 0) || !(b2 > 0) || !(t > 0)) throw std::invalid_argument("m_star: nonpositive inputs");
    if (b_n > b2) throw std::invalid_argument("m_star: b_n must not exceed b2");
    double m = std::ceil(std::log2(7.0 * b2 / b_n) / t);
    return std::max(0, static_cast<int>(m));
}

/// Coverage-defect indicator of the finite-sample theorem:
/// 1{100 sqrt(n1/n2) A(n2, j*+1, kappa log n2) / A(n1, j*+u_n-m, x)
///    > 2^{(u_n-m-1)(d/2+t)}}.
inline bool coverage_indicator(const BandConfig& cfg, const LevelConstants& lc, int jstar, int m, double t,
                               double f_sup) {
    int d = lc.d;
    int un = undersmoothing(cfg);
    double x_sel = cfg.kappa * std::log(static_cast<double>(cfg.n2));
    double A2 = sigma_mono(make_params(lc, static_cast<double>(cfg.n2), jstar + 1, x_sel, f_sup)).A;
    double A1 = sigma_mono(make_params(lc, static_cast<double>(cfg.n1), jstar + un - m, cfg.x, f_sup)).A;
    double lhs = 100.0 * std::sqrt(static_cast<double>(cfg.n1) / static_cast<double>(cfg.n2)) * A2 / A1;
    double rhs = std::pow(2.0, (un - m - 1.0) * (0.5 * d + t));
    return lhs > rhs;
}

}  // namespace needlet
