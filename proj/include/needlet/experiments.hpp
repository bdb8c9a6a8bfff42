#pragma once

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "needlet/adaptive.hpp"
#include "needlet/concentration.hpp"
#include "needlet/densities.hpp"
#include "needlet/estimation.hpp"
#include "needlet/needlets.hpp"

namespace needlet {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DensitySpec {
    DensityKind kind = DensityKind::uniform;
    double alpha = 1.5;
    std::vector<double> poly{1.0, -1.0};  // profile 1 - t by default
};

struct ExperimentConfig {
    std::string experiment = "coverage";  // coverage|selection|concentration|bias|frame-checks
    int d = 2;
    DensitySpec density;
    std::size_t n = 4000;
    int reps = 100;
    std::uint64_t seed = 1;
    double kappa = 1.0;
    double x = 2.0;
    int u_n = -1;                       // -1: automatic ceil(log2 log2 n)
    std::string jmax_rule = "standard";  // standard|practical
    std::string mode = "eig";            // eig|deg
    std::string fsup = "plugin";         // plugin|known
    double fsup_value = 0.0;             // used when fsup == known and > 0; else density sup
    OmegaSpec omega;
    int level = 3;      // concentration resolution level
    int bias_j_lo = 3;
    int bias_j_hi = 8;
    int rademacher_draws = 1;
    std::string out_dir;

    ScalingMode scaling() const { return mode == "deg" ? ScalingMode::degree : ScalingMode::eigenvalue; }

    void validate() const {
        static const std::vector<std::string> known{"coverage", "selection", "concentration", "bias",
                                                    "frame-checks"};
        if (std::find(known.begin(), known.end(), experiment) == known.end())
            throw ConfigError("unknown experiment: " + experiment);
        if (d != 1 && d != 2) throw ConfigError("d must be 1 or 2");
        if (reps < 1) throw ConfigError("reps must be >= 1");
        if (n < 4) throw ConfigError("n must be >= 4");
        if (!(kappa > 0)) throw ConfigError("kappa must be positive");
        if (!(x > 0)) throw ConfigError("x must be positive");
        if (mode != "eig" && mode != "deg") throw ConfigError("mode must be eig or deg");
        if (fsup != "plugin" && fsup != "known") throw ConfigError("fsup must be plugin or known");
        if (jmax_rule != "standard" && jmax_rule != "practical")
            throw ConfigError("jmax_rule must be standard or practical");
        if (level < 0 || bias_j_lo < 0 || bias_j_hi < bias_j_lo) throw ConfigError("bad level range");
        if (rademacher_draws < 1) throw ConfigError("rademacher_draws must be >= 1");
        if (density.kind == DensityKind::falpha) {
            if (!(density.alpha > 0)) throw ConfigError("alpha must be positive");
            if (is_even_integer_alpha(density.alpha))
                throw ConfigError("alpha/2 must not be an integer (use the polynomial density)");
        }
    }
};

inline TestDensity density_from(const ExperimentConfig& cfg) {
    switch (cfg.density.kind) {
        case DensityKind::uniform:
            return make_uniform_density(cfg.d);
        case DensityKind::polynomial:
            return make_polynomial_density(cfg.d, cfg.density.poly);
        case DensityKind::falpha:
            return make_falpha_density(cfg.density.alpha, cfg.d);
    }
    throw ConfigError("unknown density kind");
}

// ---------------------------------------------------------------- reports

struct ExperimentReport {
    std::string experiment;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> records;
    nlohmann::json summary;
    bool ok = true;  // property-suite verdict; true for plain runs
};

inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string records_csv(const ExperimentReport& rep) {
    std::string out;
    for (std::size_t c = 0; c < rep.columns.size(); ++c) {
        out += rep.columns[c];
        out += (c + 1 == rep.columns.size()) ? '\n' : ',';
    }
    for (const auto& row : rep.records) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out += format_value(row[c]);
            out += (c + 1 == row.size()) ? '\n' : ',';
        }
    }
    return out;
}

inline nlohmann::json config_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["experiment"] = cfg.experiment;
    j["d"] = cfg.d;
    j["density"]["kind"] = cfg.density.kind == DensityKind::uniform      ? "uniform"
                           : cfg.density.kind == DensityKind::polynomial ? "poly"
                                                                         : "falpha";
    if (cfg.density.kind == DensityKind::falpha) j["density"]["alpha"] = cfg.density.alpha;
    if (cfg.density.kind == DensityKind::polynomial) j["density"]["coeffs"] = cfg.density.poly;
    j["n"] = cfg.n;
    j["reps"] = cfg.reps;
    j["seed"] = cfg.seed;
    j["kappa"] = cfg.kappa;
    j["x"] = cfg.x;
    j["u_n"] = cfg.u_n;
    j["jmax_rule"] = cfg.jmax_rule;
    j["mode"] = cfg.mode;
    j["fsup"] = cfg.fsup;
    if (cfg.fsup == "known" && cfg.fsup_value > 0) j["fsup_value"] = cfg.fsup_value;
    j["omega"]["kind"] = cfg.omega.kind == OmegaSpec::Kind::full ? "full" : "cap";
    if (cfg.omega.kind == OmegaSpec::Kind::cap) {
        j["omega"]["radius"] = cfg.omega.radius;
        j["omega"]["center"] = {cfg.omega.center.x(), cfg.omega.center.y(), cfg.omega.center.z()};
    }
    j["level"] = cfg.level;
    j["bias_j_lo"] = cfg.bias_j_lo;
    j["bias_j_hi"] = cfg.bias_j_hi;
    j["rademacher_draws"] = cfg.rademacher_draws;
    return j;
}

struct ReportPaths {
    std::string records;
    std::string summary;
};

/// Writes <experiment>-seed<seed>-<timestamp>.records.csv / .summary.json.
/// Record bytes depend only on config + seed.
inline ReportPaths write_report(const ExperimentReport& rep, const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    fs::path dir = cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir);
    fs::create_directories(dir);
    std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y%m%dT%H%M%S", std::gmtime(&now));
    std::string base = rep.experiment + "-seed" + std::to_string(cfg.seed) + "-" + stamp;
    ReportPaths paths{(dir / (base + ".records.csv")).string(), (dir / (base + ".summary.json")).string()};
    std::ofstream csv(paths.records, std::ios::binary);
    csv << records_csv(rep);
    std::ofstream js(paths.summary, std::ios::binary);
    js << rep.summary.dump(2) << "\n";
    return paths;
}

// ------------------------------------------------------------- internals

namespace detail {

/// Measured constants, extended lazily to the deepest level requested so a
/// shallow run does not pay for high-level c0 scans.
inline LevelConstants level_constants(int d, ScalingMode mode, int need_level) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, LevelConstants> cache;
    int capped = std::min(std::max(need_level, 0), c0_measure_cap(d));
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(d, static_cast<int>(mode));
    auto it = cache.find(key);
    if (it == cache.end() || it->second.measured_up_to < capped) {
        LevelConstants lc = measure_level_constants(d, mode, capped);
        it = cache.insert_or_assign(key, std::move(lc)).first;
    }
    return it->second;
}

inline BandConfig band_config(const ExperimentConfig& cfg, const TestDensity& f) {
    BandConfig bc;
    bc.kappa = cfg.kappa;
    bc.u_n = cfg.u_n;
    bc.x = cfg.x;
    bc.n1 = (cfg.n + 1) / 2;
    bc.n2 = cfg.n - bc.n1;
    bc.omega = cfg.omega;
    bc.mode = cfg.scaling();
    bc.plugin_fsup = cfg.fsup == "plugin";
    if (!bc.plugin_fsup) bc.known_fsup = cfg.fsup_value > 0 ? cfg.fsup_value : f.sup_bound;
    bc.jmax_rule = cfg.jmax_rule == "practical" ? JmaxRule::practical : JmaxRule::standard;
    return bc;
}

/// Truth values of a zonal density on a grid, cached per level.
class TruthCache {
public:
    TruthCache(const TestDensity& f, GridKind kind) : f_(f), kind_(kind) {}

    const std::vector<double>& at_level(int level) {
        auto it = cache_.find(level);
        if (it != cache_.end()) return it->second;
        auto grid = eval_grid(f_.d, level, kind_);
        std::vector<double> vals(grid->size());
        for (std::size_t i = 0; i < grid->size(); ++i) vals[i] = f_(grid->point(i));
        return cache_.emplace(level, std::move(vals)).first->second;
    }

private:
    TestDensity f_;
    GridKind kind_;
    std::map<int, std::vector<double>> cache_;
};

/// Condition-style bias certification of a density over levels 0..j_top:
/// ratios r_j = 2^{j t} ||A_j f - f||, with b2 = max, b_n = min.
struct BiasCertificate {
    double t = 0.0;
    std::vector<double> ratios;
    double b2 = 0.0;
    double b_lower = 0.0;
};

inline BiasCertificate certify_bias(const TestDensity& f, ScalingMode mode, int j_top) {
    if (!f.smoothness_t) throw std::invalid_argument("certify_bias: density has no smoothness exponent");
    BiasCertificate cert;
    cert.t = *f.smoothness_t;
    auto grid = eval_grid(f.d, std::max(j_top, 3));
    cert.b2 = 0.0;
    cert.b_lower = 1e300;
    for (int j = 0; j <= j_top; ++j) {
        double bias = density_bias_sup(f, KernelSpec{f.d, j, mode}, *grid);
        double r = std::pow(2.0, cert.t * j) * bias;
        cert.ratios.push_back(r);
        cert.b2 = std::max(cert.b2, r);
        cert.b_lower = std::min(cert.b_lower, r);
    }
    return cert;
}

inline void seed_columns(std::vector<double>& row, std::uint64_t seed) {
    row.push_back(static_cast<double>(seed >> 32));
    row.push_back(static_cast<double>(seed & 0xffffffffULL));
}

}  // namespace detail

// ------------------------------------------------------------ experiments

/// Coverage study: replicate sample -> split -> Lepski -> band -> check that
/// the truth lies inside the band everywhere on (masked) grid nodes.
inline ExperimentReport run_coverage(const ExperimentConfig& cfg) {
    cfg.validate();
    TestDensity f = density_from(cfg);
    BandConfig bc = detail::band_config(cfg, f);
    const LevelConstants lc =
        detail::level_constants(cfg.d, cfg.scaling(), compute_jmax(bc.n2, cfg.d) + undersmoothing(bc));
    detail::TruthCache truth(f, GridKind::rings);

    ExperimentReport rep;
    rep.experiment = "coverage";
    rep.columns = {"rep", "seed_hi", "seed_lo", "j_hat", "band_level", "s_n", "sup_dev", "covered", "f_sup"};

    std::size_t cover_count = 0;
    double sn_sum = 0.0;
    std::map<int, int> jhist;
    std::vector<std::size_t> size_ok_count(1, 0);

    // bias certification for densities with a known exponent (feeds v_n)
    int j_max0 = compute_jmax(bc.n2, cfg.d);
    std::optional<detail::BiasCertificate> cert;
    int jstar = 0, mstar_v = 0, m = 0;
    bool indicator = false;
    double v_n = 0.0;
    if (f.smoothness_t) {
        cert = detail::certify_bias(f, cfg.scaling(), j_max0);
        double fs = bc.plugin_fsup ? f.sup_bound : bc.known_fsup;
        jstar = theoretical_jstar(cert->t, cert->b2, bc.n2, bc, lc, j_max0, fs);
        mstar_v = m_star(cert->b_lower, cert->b2, cert->t);
        m = std::min(jstar, mstar_v);
        indicator = coverage_indicator(bc, lc, jstar, m, cert->t, fs);
        v_n = 2.0 * (j_max0 - m) * std::pow(static_cast<double>(bc.n2), -cfg.kappa) + (indicator ? 1.0 : 0.0);
    }

    for (int r = 0; r < cfg.reps; ++r) {
        std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
        Sample all = sample_density(f, seed, cfg.n);
        Sample s1{cfg.d, {all.points.begin(), all.points.begin() + static_cast<long>(bc.n1)}};
        Sample s2{cfg.d, {all.points.begin() + static_cast<long>(bc.n1), all.points.end()}};
        LepskiResult sel = lepski_select(s2, bc, lc);
        int band_level = sel.j_hat + undersmoothing(bc);
        auto grid = eval_grid(cfg.d, band_level);
        Band band = build_band(s1, sel, bc, lc, grid);
        const auto& tv = truth.at_level(band_level);
        double supdev = 0.0;
        for (std::size_t i = 0; i < tv.size(); ++i) {
            if (!band.mask.full() && !band.mask.keep[i]) continue;
            supdev = std::max(supdev, std::abs(band.center[i] - tv[i]));
        }
        bool covered = supdev <= band.half_width;
        cover_count += covered ? 1 : 0;
        sn_sum += band.half_width;
        jhist[sel.j_hat]++;
        if (cert) {
            double cap = 1.01 * sigma_mono(make_params(lc, static_cast<double>(bc.n1),
                                                        jstar + undersmoothing(bc) + 1, cfg.x,
                                                        band.f_sup_used))
                                    .sigma;
            if (band.half_width <= cap) size_ok_count[0]++;
        }
        std::vector<double> row{static_cast<double>(r)};
        detail::seed_columns(row, seed);
        row.insert(row.end(), {static_cast<double>(sel.j_hat), static_cast<double>(band_level),
                               band.half_width, supdev, covered ? 1.0 : 0.0, band.f_sup_used});
        rep.records.push_back(std::move(row));
    }

    nlohmann::json s;
    s["config"] = config_json(cfg);
    s["n1"] = bc.n1;
    s["n2"] = bc.n2;
    s["j_max"] = j_max0;
    s["coverage"] = static_cast<double>(cover_count) / cfg.reps;
    s["mean_s_n"] = sn_sum / cfg.reps;
    s["coverage_floor"] = 1.0 - std::exp(-cfg.x) - v_n;
    s["v_n"] = v_n;
    for (auto& [j, c] : jhist) s["j_hat_histogram"][std::to_string(j)] = c;
    s["constants"]["C_M"] = lc.C_M;
    s["constants"]["k1"] = lc.k1;
    s["constants"]["k2"] = lc.k2;
    s["constants"]["c0"] = lc.c0;
    s["constants"]["Z"] = lc.Zl;
    if (cert) {
        s["bias"]["t"] = cert->t;
        s["bias"]["ratios"] = cert->ratios;
        s["bias"]["b2"] = cert->b2;
        s["bias"]["b_lower"] = cert->b_lower;
        s["j_star"] = jstar;
        s["m_star"] = mstar_v;
        s["m"] = m;
        s["indicator_I_n"] = indicator;
        s["size_ok_rate"] = static_cast<double>(size_ok_count[0]) / cfg.reps;
        s["size_ok_floor"] =
            1.0 - 2.0 * (j_max0 - jstar) * std::pow(static_cast<double>(bc.n2), -cfg.kappa);
    }
    rep.summary = std::move(s);
    return rep;
}

/// Selection study: distribution of the Lepski level.
inline ExperimentReport run_selection(const ExperimentConfig& cfg) {
    cfg.validate();
    TestDensity f = density_from(cfg);
    BandConfig bc = detail::band_config(cfg, f);
    const LevelConstants lc = detail::level_constants(cfg.d, cfg.scaling(), compute_jmax(bc.n2, cfg.d));

    ExperimentReport rep;
    rep.experiment = "selection";
    rep.columns = {"rep", "seed_hi", "seed_lo", "j_hat", "j_max", "f_sup"};

    std::map<int, int> jhist;
    int j_max0 = compute_jmax(bc.n2, cfg.d);
    std::optional<detail::BiasCertificate> cert;
    int jstar = 0, m = 0;
    if (f.smoothness_t) {
        cert = detail::certify_bias(f, cfg.scaling(), j_max0);
        double fs = bc.plugin_fsup ? f.sup_bound : bc.known_fsup;
        jstar = theoretical_jstar(cert->t, cert->b2, bc.n2, bc, lc, j_max0, fs);
        m = std::min(jstar, m_star(cert->b_lower, cert->b2, cert->t));
    }
    std::size_t envelope_hits = 0;

    for (int r = 0; r < cfg.reps; ++r) {
        std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
        Sample all = sample_density(f, seed, cfg.n);
        Sample s2{cfg.d, {all.points.begin() + static_cast<long>(bc.n1), all.points.end()}};
        LepskiResult sel = lepski_select(s2, bc, lc);
        jhist[sel.j_hat]++;
        if (cert && sel.j_hat >= jstar - m && sel.j_hat <= jstar + 1) envelope_hits++;
        std::vector<double> row{static_cast<double>(r)};
        detail::seed_columns(row, seed);
        row.insert(row.end(),
                   {static_cast<double>(sel.j_hat), static_cast<double>(sel.j_max), sel.f_sup_used});
        rep.records.push_back(std::move(row));
    }

    nlohmann::json s;
    s["config"] = config_json(cfg);
    s["j_max"] = j_max0;
    for (auto& [j, c] : jhist) s["j_hat_histogram"][std::to_string(j)] = c;
    int mode_j = 0, best = -1;
    for (auto& [j, c] : jhist)
        if (c > best) {
            best = c;
            mode_j = j;
        }
    s["j_hat_mode"] = mode_j;
    if (cfg.density.kind == DensityKind::polynomial) {
        // exact reproduction level of the zonal polynomial
        int deg = static_cast<int>(cfg.density.poly.size()) - 1;
        int J = 0;
        while (true) {
            KernelSpec spec{cfg.d, J, cfg.scaling()};
            if (window_argument(spec, deg) <= 0.5) break;
            ++J;
        }
        s["reproduction_level_J"] = J;
        int hits = 0;
        for (auto& [j, c] : jhist)
            if (j == J - 1 || j == J) hits += c;
        s["freq_J_band"] = static_cast<double>(hits) / cfg.reps;
    }
    if (cfg.density.kind == DensityKind::uniform) {
        s["freq_zero"] = jhist.count(0) ? static_cast<double>(jhist[0]) / cfg.reps : 0.0;
    }
    if (cert) {
        s["j_star"] = jstar;
        s["m"] = m;
        s["envelope_rate"] = static_cast<double>(envelope_hits) / cfg.reps;
        s["envelope_floor"] =
            1.0 - 2.0 * (j_max0 - m) * std::pow(static_cast<double>(bc.n2), -cfg.kappa);
    }
    rep.summary = std::move(s);
    return rep;
}

/// Deviation study at a fixed level: sup |f_n - A_j f| against the
/// Bernstein-type and Rademacher-symmetrized bounds.
inline ExperimentReport run_concentration(const ExperimentConfig& cfg) {
    cfg.validate();
    TestDensity f = density_from(cfg);
    const LevelConstants lc = detail::level_constants(cfg.d, cfg.scaling(), cfg.level);
    KernelSpec spec{cfg.d, cfg.level, cfg.scaling()};
    auto grid = eval_grid(cfg.d, cfg.level);
    OmegaMask mask = omega_mask(cfg.omega, *grid);
    FieldOnGrid projected = density_projection(f, spec, grid);
    double f_sup = cfg.fsup == "known" && cfg.fsup_value > 0 ? cfg.fsup_value : f.sup_bound;
    auto params = make_params(lc, static_cast<double>(cfg.n), cfg.level, cfg.x, f_sup);
    double bar = sigma_bar(params);

    ExperimentReport rep;
    rep.experiment = "concentration";
    rep.columns = {"rep",     "seed_hi", "seed_lo",  "sup_dev", "sigma_bar",
                   "exceed_bar", "R_n",    "sigma_R", "exceed_R"};

    std::size_t exceed_bar = 0, exceed_R = 0;
    double rn_sum = 0.0;
    for (int r = 0; r < cfg.reps; ++r) {
        std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
        Sample sample = sample_density(f, seed, cfg.n);
        auto est = estimate_density(sample, spec, grid);
        double dev = sup_norm_diff(est, projected, mask);
        bool ebar = dev >= bar;
        exceed_bar += ebar ? 1 : 0;

        Rng srng(derive_seed(seed ^ 0x5bd1e995ULL, 1));
        double rn = 0.0;
        std::vector<double> signs(cfg.n);
        for (int s = 0; s < cfg.rademacher_draws; ++s) {
            for (double& v : signs) v = srng.sign();
            rn += rademacher_sup(sample, signs, spec, grid, mask);
        }
        rn /= cfg.rademacher_draws;
        rn_sum += rn;
        double sR = sigma_R(params, rn);
        bool eR = dev >= sR;
        exceed_R += eR ? 1 : 0;

        std::vector<double> row{static_cast<double>(r)};
        detail::seed_columns(row, seed);
        row.insert(row.end(), {dev, bar, ebar ? 1.0 : 0.0, rn, sR, eR ? 1.0 : 0.0});
        rep.records.push_back(std::move(row));
    }

    nlohmann::json s;
    s["config"] = config_json(cfg);
    s["sigma_bar"] = bar;
    s["exceed_rate_bar"] = static_cast<double>(exceed_bar) / cfg.reps;
    s["exceed_rate_R"] = static_cast<double>(exceed_R) / cfg.reps;
    s["exceed_cap"] = std::exp(-cfg.x);
    s["mean_R_n"] = rn_sum / cfg.reps;
    s["f_sup"] = f_sup;
    s["c0_level"] = params.c0_l;
    s["Z_level"] = params.Z_l;
    rep.summary = std::move(s);
    return rep;
}

/// Bias-decay study for the Hoelder family: the two-sided sandwich
/// 2^{j alpha} ||A_j f_alpha - f_alpha|| within a fixed band across levels.
inline ExperimentReport run_bias(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.density.kind == DensityKind::falpha && is_even_integer_alpha(cfg.density.alpha))
        throw ConfigError("bias: alpha/2 must not be an integer");

    ExperimentReport rep;
    rep.experiment = "bias";
    rep.columns = {"mode_deg", "j", "bias_sup", "bias_at_pole", "ratio_sup", "ratio_pole"};

    nlohmann::json s;
    s["config"] = config_json(cfg);

    double alpha = cfg.density.alpha;
    bool poly_control = cfg.density.kind == DensityKind::polynomial;
    for (ScalingMode mode : {ScalingMode::degree, ScalingMode::eigenvalue}) {
        std::string mname = mode == ScalingMode::degree ? "deg" : "eig";
        double rmax = 0.0, rmin = 1e300;
        for (int j = cfg.bias_j_lo; j <= cfg.bias_j_hi; ++j) {
            KernelSpec spec{cfg.d, j, mode};
            double bsup, bpole;
            if (poly_control) {
                TestDensity f = make_polynomial_density(cfg.d, cfg.density.poly);
                auto grid = eval_grid(cfg.d, j);
                bsup = density_bias_sup(f, spec, *grid);
                bpole = 0.0;
            } else {
                auto grid = eval_grid(cfg.d, j);
                bsup = bias_sup(alpha, spec, *grid);
                bpole = bias_at_pole(alpha, spec);
            }
            double scale = std::pow(2.0, alpha * j);
            rep.records.push_back({mode == ScalingMode::degree ? 1.0 : 0.0, static_cast<double>(j), bsup,
                                   bpole, scale * bsup, scale * bpole});
            if (!poly_control) {
                rmax = std::max(rmax, scale * bsup);
                rmin = std::min(rmin, scale * bsup);
            }
        }
        if (!poly_control) {
            s[mname]["ratio_max"] = rmax;
            s[mname]["ratio_min"] = rmin;
            s[mname]["ratio_spread"] = rmax / rmin;
            s[mname]["sandwich_ok"] = rmax / rmin <= 4.0;
        }
    }

    if (!poly_control) {
        // cross-checks: u_k closed form vs quadrature, pole series vs cubature
        double worst_uk = 0.0;
        for (int k = 0; k <= 64; ++k) {
            double c = u_k_closed(k, alpha, 0.5);
            double q = u_k_quadrature(k, alpha, 0.5);
            worst_uk = std::max(worst_uk, std::abs(c - q) / std::max(1e-300, std::abs(q)));
        }
        s["uk_closed_vs_quadrature_rel"] = worst_uk;

        KernelSpec spec3{cfg.d, cfg.bias_j_lo, cfg.scaling()};
        double series = bias_at_pole(alpha, spec3);
        auto fshape = [&](const SpherePoint& y) {
            return std::pow(std::max(0.0, 1.0 - dot(y, north_pole(cfg.d))), 0.5 * alpha);
        };
        double cub = std::abs(population_projection_at(fshape, spec3, north_pole(cfg.d), 512));
        s["pole_series"] = series;
        s["pole_cubature"] = cub;
        s["pole_match_error"] = std::abs(series - cub);
        rep.ok = s["deg"]["sandwich_ok"].get<bool>() && std::abs(series - cub) < 1e-6;
    }
    rep.summary = std::move(s);
    return rep;
}

/// Structural property suite: cubature exactness, kernel factorization,
/// reproduction, frame Parseval, phi-norm bounds; reports measured constants.
inline ExperimentReport run_frame_checks(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentReport rep;
    rep.experiment = "frame-checks";
    rep.columns = {"check", "d", "level", "worst", "tolerance", "pass"};
    nlohmann::json s;
    s["config"] = config_json(cfg);
    Rng rng(cfg.seed);
    int check_id = 0;
    bool all_ok = true;

    auto push = [&](int id, int d, int level, double worst, double tol) {
        bool ok = worst <= tol;
        all_ok = all_ok && ok;
        rep.records.push_back({static_cast<double>(id), static_cast<double>(d),
                               static_cast<double>(level), worst, tol, ok ? 1.0 : 0.0});
        return ok;
    };

    std::vector<std::string> names;

    // 1: cubature exactness across levels
    names.push_back("cubature-exactness");
    for (int d : {1, 2}) {
        for (int j = 0; j <= 6; ++j) {
            KernelSpec spec{d, j, cfg.scaling()};
            int deg = 2 * max_degree(spec) + 1;
            auto cub = build_cubature(d, deg);
            auto integrals = empirical_harmonics(d, deg, cub.nodes, 0.0, &cub.weights);
            double worst = std::abs(integrals[0] - std::sqrt(sphere_measure(d)));
            for (std::size_t i = 1; i < integrals.size(); ++i) worst = std::max(worst, std::abs(integrals[i]));
            push(check_id, d, j, worst, 1e-10);
        }
    }
    ++check_id;

    // 2: factorization sum_eta b C(x,eta) C(eta,y) = A(x,y)
    names.push_back("kernel-factorization");
    for (int d : {1, 2}) {
        for (int j = 0; j <= 6; ++j) {
            KernelSpec spec{d, j, cfg.scaling()};
            auto sys = needlet_system(spec);
            auto aw = aj_weights(spec);
            double worst = 0.0;
            for (int t = 0; t < 50; ++t) {
                SpherePoint x = d == 1 ? circle_point(rng.uniform(0.0, 2 * kPi)) : sample_uniform(rng.raw(), 2, 1)[0];
                SpherePoint y = d == 1 ? circle_point(rng.uniform(0.0, 2 * kPi)) : sample_uniform(rng.raw(), 2, 1)[0];
                double direct = zonal_eval(d, aw, dot(x, y));
                double via = 0.0;
                for (std::size_t e = 0; e < sys->cubature.size(); ++e)
                    via += sys->cubature.weights[e] * zonal_eval(d, sys->cw, dot(x, sys->cubature.nodes[e])) *
                           zonal_eval(d, sys->cw, dot(sys->cubature.nodes[e], y));
                worst = std::max(worst, std::abs(via - direct));
            }
            push(check_id, d, j, worst, 1e-10);
        }
    }
    ++check_id;

    // 3: band-limited reproduction
    names.push_back("reproduction");
    for (int d : {1, 2}) {
        for (int j : {2, 3, 4}) {
            KernelSpec spec{d, j, ScalingMode::eigenvalue};
            int deg = 0;
            while (eigenvalue(d, deg + 1) <= std::ldexp(1.0, 2 * j - 1)) ++deg;
            std::vector<double> coef;
            std::vector<SpherePoint> poles;
            for (int k = 0; k <= deg; ++k) {
                coef.push_back(rng.uniform(-1.0, 1.0));
                poles.push_back(d == 1 ? circle_point(rng.uniform(0.0, 2 * kPi)) : sample_uniform(rng.raw(), 2, 1)[0]);
            }
            auto h = [&](const SpherePoint& p) {
                double acc = 0.0;
                for (std::size_t i = 0; i < coef.size(); ++i)
                    acc += coef[i] * kernel_Lk(d, static_cast<int>(i), dot(p, poles[i]));
                return acc;
            };
            double worst = 0.0;
            for (int t = 0; t < 10; ++t) {
                SpherePoint p = d == 1 ? circle_point(rng.uniform(0.0, 2 * kPi)) : sample_uniform(rng.raw(), 2, 1)[0];
                worst = std::max(worst, std::abs(population_projection_at(h, spec, p, deg + 4) - h(p)));
            }
            push(check_id, d, j, worst, 1e-9);
        }
    }
    ++check_id;

    // 4: tight frame Parseval on random degree-3 polynomials, relative
    names.push_back("tight-frame-parseval");
    for (int d : {1, 2}) {
        std::vector<double> coef;
        std::vector<SpherePoint> poles;
        for (int k = 0; k <= 3; ++k) {
            coef.push_back(rng.uniform(-1.0, 1.0));
            poles.push_back(d == 1 ? circle_point(rng.uniform(0.0, 2 * kPi)) : sample_uniform(rng.raw(), 2, 1)[0]);
        }
        auto fpoly = [&](const SpherePoint& p) {
            double acc = 0.0;
            for (std::size_t i = 0; i < coef.size(); ++i)
                acc += coef[i] * kernel_Lk(d, static_cast<int>(i), dot(p, poles[i]));
            return acc;
        };
        auto ref = build_cubature(d, 10);
        double l2sq = ref.integrate([&](const SpherePoint& p) { return fpoly(p) * fpoly(p); });
        double dc = ref.integrate(fpoly);
        double total = dc * dc / sphere_measure(d);
        for (int l = 0; l <= 3; ++l) {
            auto sys = build_psi_system(d, l);
            for (double c : psi_coeffs(sys, fpoly)) total += c * c;
        }
        push(check_id, d, 3, std::abs(total - l2sq) / l2sq, 1e-8);
    }
    ++check_id;

    // 5: phi norm bounds
    names.push_back("phi-norms");
    for (int d : {1, 2}) {
        for (int j = 0; j <= 6; ++j) {
            auto sys = needlet_system(KernelSpec{d, j, cfg.scaling()});
            double worst_l2 = 0.0;
            for (double b : sys->cubature.weights) worst_l2 = std::max(worst_l2, b * sys->phi_l2_common);
            double capphi = sphere_constants(d).D1 * std::pow(2.0, 0.5 * d * j);
            double worst = std::max(worst_l2 - 1.0, sys->phi_sup / capphi - 1.0);
            push(check_id, d, j, worst, 1e-9);
        }
    }
    ++check_id;

    s["check_names"] = names;
    for (int d : {1, 2}) {
        const LevelConstants lc = detail::level_constants(d, cfg.scaling(), 6);
        std::string key = "constants_d" + std::to_string(d);
        s[key]["c0"] = lc.c0;
        s[key]["Z"] = lc.Zl;
        s[key]["k1"] = lc.k1;
        s[key]["k2"] = lc.k2;
        s[key]["C_M"] = lc.C_M;
    }
    s["all_pass"] = all_ok;
    rep.ok = all_ok;
    rep.summary = std::move(s);
    return rep;
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.experiment == "coverage") return run_coverage(cfg);
    if (cfg.experiment == "selection") return run_selection(cfg);
    if (cfg.experiment == "concentration") return run_concentration(cfg);
    if (cfg.experiment == "bias") return run_bias(cfg);
    return run_frame_checks(cfg);
}

}  // namespace needlet
