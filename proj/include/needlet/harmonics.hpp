#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "needlet/geometry.hpp"
#include "needlet/parallel.hpp"

namespace needlet {

/// Flat m-major layout of the real orthonormal harmonic basis up to degree K.
/// d=2: block m=0 holds k=0..K, then per m >= 1 a cos block and a sin block
/// over k=m..K; total (K+1)^2 entries. The basis is orthonormal w.r.t.
/// surface measure and satisfies sum_m Y_km(x) Y_km(y) = L_k(<x,y>).
/// d=1: [1/sqrt(2pi), cos(k.)/sqrt(pi), sin(k.)/sqrt(pi), ...], 2K+1 entries.
struct ShLayout {
    int K;

    explicit ShLayout(int K_) : K(K_) {}

    std::size_t size() const { return static_cast<std::size_t>(K + 1) * (K + 1); }
    std::size_t m0(int k) const { return static_cast<std::size_t>(k); }
    std::size_t cos_off(int m) const {
        return static_cast<std::size_t>(K + 1) + 2u * static_cast<std::size_t>(m - 1) * (K + 1) -
               static_cast<std::size_t>(m) * (m - 1);
    }
    std::size_t sin_off(int m) const { return cos_off(m) + static_cast<std::size_t>(K - m + 1); }
};

namespace detail {

/// Precomputed recurrence coefficients for the fully normalized associated
/// Legendre functions:
///   Pbar_mm     = cmm_m * sin(theta) * Pbar_{m-1,m-1},   Pbar_00 = (4pi)^{-1/2}
///   Pbar_{m+1,m}= dm_m * z * Pbar_mm
///   Pbar_km     = a_km * z * Pbar_{k-1,m} - b_km * Pbar_{k-2,m}
struct ShTables {
    int K;
    std::vector<double> a, b;  // flat k*(K+1)+m, defined for k >= m+2
    std::vector<double> cmm;   // index m, m >= 1
    std::vector<double> dm;    // index m

    explicit ShTables(int K_) : K(K_) {
        std::size_t n = static_cast<std::size_t>(K + 1) * (K + 1);
        a.assign(n, 0.0);
        b.assign(n, 0.0);
        cmm.assign(static_cast<std::size_t>(K) + 1, 0.0);
        dm.assign(static_cast<std::size_t>(K) + 1, 0.0);
        for (int m = 1; m <= K; ++m) cmm[m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
        for (int m = 0; m <= K; ++m) dm[m] = std::sqrt(2.0 * m + 3.0);
        for (int m = 0; m <= K; ++m)
            for (int k = m + 2; k <= K; ++k) {
                double num = (2.0 * k - 1.0) * (2.0 * k + 1.0);
                double den = (static_cast<double>(k) - m) * (static_cast<double>(k) + m);
                a[static_cast<std::size_t>(k) * (K + 1) + m] = std::sqrt(num / den);
                b[static_cast<std::size_t>(k) * (K + 1) + m] =
                    std::sqrt((2.0 * k + 1.0) * (k - 1.0 + m) * (k - 1.0 - m) / ((2.0 * k - 3.0) * den));
            }
    }
};

inline std::shared_ptr<const ShTables> sh_tables(int K) {
    static std::mutex mu;
    static std::unordered_map<int, std::shared_ptr<const ShTables>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(K);
    if (it != cache.end()) return it->second;
    auto t = std::make_shared<const ShTables>(K);
    cache.emplace(K, t);
    return t;
}

inline constexpr double kP00 = 0.28209479177387814;  // (4 pi)^{-1/2}
inline constexpr double kSqrt2 = 1.4142135623730951;

/// One batch of <=W points accumulated into acc: acc[idx] += w_l Y_idx(x_l).
template <int W>
void sh_accumulate_batch(const ShTables& tb, const ShLayout& lay, const double* px, const double* py,
                         const double* pz, const double* pw, int lanes, double* acc) {
    const int K = lay.K;
    double st[W], z[W], cphi[W], sphi[W], cm[W], sm[W], pmm[W];
    for (int l = 0; l < lanes; ++l) {
        z[l] = pz[l];
        st[l] = std::sqrt(px[l] * px[l] + py[l] * py[l]);
        double inv = st[l] > 0.0 ? 1.0 / st[l] : 0.0;
        cphi[l] = st[l] > 0.0 ? px[l] * inv : 1.0;
        sphi[l] = st[l] > 0.0 ? py[l] * inv : 0.0;
        cm[l] = 1.0;
        sm[l] = 0.0;
        pmm[l] = kP00;
    }
    double pk1[W], pk2[W];
    for (int m = 0; m <= K; ++m) {
        if (m > 0) {
            double c = tb.cmm[m];
            bool alive = false;
            for (int l = 0; l < lanes; ++l) {
                pmm[l] *= c * st[l];
                if (std::abs(pmm[l]) < 1e-280) pmm[l] = 0.0;
                alive = alive || pmm[l] != 0.0;
                double ncm = cm[l] * cphi[l] - sm[l] * sphi[l];
                sm[l] = sm[l] * cphi[l] + cm[l] * sphi[l];
                cm[l] = ncm;
            }
            if (!alive) break;  // higher orders vanish at these latitudes
        }
        double wc[W], ws[W];
        for (int l = 0; l < lanes; ++l) {
            double s = (m == 0) ? 1.0 : kSqrt2;
            wc[l] = pw[l] * s * cm[l];
            ws[l] = pw[l] * s * sm[l];
        }
        double* accc = acc + (m == 0 ? lay.m0(0) : lay.cos_off(m));
        double* accs = m == 0 ? nullptr : acc + lay.sin_off(m);
        for (int l = 0; l < lanes; ++l) {
            pk2[l] = pmm[l];
            accc[0] += wc[l] * pk2[l];
            if (accs) accs[0] += ws[l] * pk2[l];
        }
        if (m + 1 <= K) {
            double d = tb.dm[m];
            for (int l = 0; l < lanes; ++l) {
                pk1[l] = d * z[l] * pmm[l];
                accc[1] += wc[l] * pk1[l];
                if (accs) accs[1] += ws[l] * pk1[l];
            }
        }
        for (int k = m + 2; k <= K; ++k) {
            double ak = tb.a[static_cast<std::size_t>(k) * (K + 1) + m];
            double bk = tb.b[static_cast<std::size_t>(k) * (K + 1) + m];
            int off = k - m;
            for (int l = 0; l < lanes; ++l) {
                double p = ak * z[l] * pk1[l] - bk * pk2[l];
                pk2[l] = pk1[l];
                pk1[l] = p;
                accc[off] += wc[l] * p;
                if (accs) accs[off] += ws[l] * p;
            }
        }
    }
}

}  // namespace detail

/// Harmonic coefficients of the weighted empirical measure sum_i w_i
/// delta_{x_i}: coeff[idx] = sum_i w_i Y_idx(x_i). Weight is the scalar
/// `w` when `per_point` is null. Deterministic under parallel execution.
inline std::vector<double> empirical_harmonics(int d, int K, const std::vector<SpherePoint>& pts,
                                               double w, const std::vector<double>* per_point = nullptr) {
    if (d == 1) {
        std::vector<double> coeffs(2 * static_cast<std::size_t>(K) + 1, 0.0);
        const double c0 = 1.0 / std::sqrt(2.0 * kPi);
        const double c1 = 1.0 / std::sqrt(kPi);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double wi = per_point ? (*per_point)[i] : w;
            double cx = pts[i].x(), sx = pts[i].y();
            coeffs[0] += wi * c0;
            double cm = cx, sm = sx;
            for (int k = 1; k <= K; ++k) {
                coeffs[2 * static_cast<std::size_t>(k) - 1] += wi * c1 * cm;
                coeffs[2 * static_cast<std::size_t>(k)] += wi * c1 * sm;
                double nc = cm * cx - sm * sx;
                sm = sm * cx + cm * sx;
                cm = nc;
            }
        }
        return coeffs;
    }
    ShLayout lay(K);
    auto tables = detail::sh_tables(K);
    constexpr int W = 4;
    std::size_t n = pts.size();
    std::size_t block = 256;  // points per work item
    std::size_t n_blocks = (n + block - 1) / block;
    unsigned threads = std::min<unsigned>(std::thread::hardware_concurrency(), 8);
    std::vector<std::vector<double>> part(std::max<std::size_t>(n_blocks, 1));
    parallel_for(n_blocks, [&](std::size_t bi) {
        std::vector<double> acc(lay.size(), 0.0);
        double px[W], py[W], pz[W], pw[W];
        std::size_t lo = bi * block, hi = std::min(n, lo + block);
        for (std::size_t i = lo; i < hi; i += W) {
            int lanes = static_cast<int>(std::min<std::size_t>(W, hi - i));
            for (int l = 0; l < lanes; ++l) {
                px[l] = pts[i + l].x();
                py[l] = pts[i + l].y();
                pz[l] = pts[i + l].z();
                pw[l] = per_point ? (*per_point)[i + l] : w;
            }
            detail::sh_accumulate_batch<W>(*tables, lay, px, py, pz, pw, lanes, acc.data());
        }
        part[bi] = std::move(acc);
    }, threads);
    std::vector<double> coeffs(lay.size(), 0.0);
    for (std::size_t bi = 0; bi < n_blocks; ++bi)
        for (std::size_t idx = 0; idx < coeffs.size(); ++idx) coeffs[idx] += part[bi][idx];
    return coeffs;
}

/// Multiplies every order-k coefficient by wk[k] (entries beyond wk vanish).
inline void apply_degree_weights(int d, int K, std::vector<double>& coeffs, const std::vector<double>& wk) {
    auto weight = [&](int k) { return k < static_cast<int>(wk.size()) ? wk[k] : 0.0; };
    if (d == 1) {
        coeffs[0] *= weight(0);
        for (int k = 1; k <= K; ++k) {
            coeffs[2 * static_cast<std::size_t>(k) - 1] *= weight(k);
            coeffs[2 * static_cast<std::size_t>(k)] *= weight(k);
        }
        return;
    }
    ShLayout lay(K);
    for (int k = 0; k <= K; ++k) coeffs[lay.m0(k)] *= weight(k);
    for (int m = 1; m <= K; ++m) {
        double* pc = coeffs.data() + lay.cos_off(m);
        double* ps = coeffs.data() + lay.sin_off(m);
        for (int k = m; k <= K; ++k) {
            pc[k - m] *= weight(k);
            ps[k - m] *= weight(k);
        }
    }
}

/// Evaluates the expansion at one point; per-point O(K^2) reference path.
inline double eval_harmonics_at(int d, int K, const std::vector<double>& coeffs, const SpherePoint& p) {
    if (d == 1) {
        double val = coeffs[0] / std::sqrt(2.0 * kPi);
        double c1 = 1.0 / std::sqrt(kPi);
        double cx = p.x(), sx = p.y();
        double cm = cx, sm = sx;
        for (int k = 1; k <= K; ++k) {
            val += c1 * (coeffs[2 * static_cast<std::size_t>(k) - 1] * cm + coeffs[2 * static_cast<std::size_t>(k)] * sm);
            double nc = cm * cx - sm * sx;
            sm = sm * cx + cm * sx;
            cm = nc;
        }
        return val;
    }
    ShLayout lay(K);
    auto tb = detail::sh_tables(K);
    double z = p.z();
    double st = std::sqrt(p.x() * p.x() + p.y() * p.y());
    double cphi = st > 0.0 ? p.x() / st : 1.0;
    double sphi = st > 0.0 ? p.y() / st : 0.0;
    double val = 0.0;
    double pmm = detail::kP00, cm = 1.0, sm = 0.0;
    for (int m = 0; m <= K; ++m) {
        if (m > 0) {
            pmm *= tb->cmm[m] * st;
            if (std::abs(pmm) < 1e-280) break;
            double nc = cm * cphi - sm * sphi;
            sm = sm * cphi + cm * sphi;
            cm = nc;
        }
        const double* pc = coeffs.data() + (m == 0 ? lay.m0(0) : lay.cos_off(m));
        const double* ps = m == 0 ? nullptr : coeffs.data() + lay.sin_off(m);
        double sc = 0.0, ss = 0.0;
        double pk2 = pmm, pk1 = 0.0;
        sc += pc[0] * pk2;
        if (ps) ss += ps[0] * pk2;
        if (m + 1 <= K) {
            pk1 = tb->dm[m] * z * pmm;
            sc += pc[1] * pk1;
            if (ps) ss += ps[1] * pk1;
        }
        for (int k = m + 2; k <= K; ++k) {
            double p3 = tb->a[static_cast<std::size_t>(k) * (K + 1) + m] * z * pk1 -
                        tb->b[static_cast<std::size_t>(k) * (K + 1) + m] * pk2;
            pk2 = pk1;
            pk1 = p3;
            sc += pc[k - m] * p3;
            if (ps) ss += ps[k - m] * p3;
        }
        if (m == 0)
            val += sc;
        else
            val += detail::kSqrt2 * (cm * sc + sm * ss);
    }
    return val;
}

/// Evaluates the expansion at every grid node. Ring grids use the per-ring
/// Legendre sweep (the recurrence cost is shared by all nodes of a ring);
/// other grids fall back to the per-point path.
inline std::vector<double> eval_harmonics(int d, int K, const std::vector<double>& coeffs, const EvalGrid& grid) {
    std::vector<double> out(grid.size());
    if (d == 1) {
        parallel_for(grid.size(), [&](std::size_t i) {
            out[i] = eval_harmonics_at(1, K, coeffs, circle_point(grid.circle_angle(i)));
        });
        return out;
    }
    if (grid.kind != GridKind::rings) {
        parallel_for((grid.size() + 1023) / 1024, [&](std::size_t blk) {
            std::size_t lo = blk * 1024, hi = std::min(grid.size(), lo + 1024);
            for (std::size_t i = lo; i < hi; ++i) out[i] = eval_harmonics_at(2, K, coeffs, grid.point(i));
        });
        return out;
    }
    ShLayout lay(K);
    auto tb = detail::sh_tables(K);
    parallel_for(grid.rings.size(), [&](std::size_t ri) {
        const GridRing& ring = grid.rings[ri];
        double z = std::cos(ring.theta);
        double st = std::sin(ring.theta);
        // Fourier profile of the expansion on this ring
        std::vector<double> gc(static_cast<std::size_t>(K) + 1, 0.0), gs(static_cast<std::size_t>(K) + 1, 0.0);
        double pmm = detail::kP00;
        for (int m = 0; m <= K; ++m) {
            if (m > 0) {
                pmm *= tb->cmm[m] * st;
                if (std::abs(pmm) < 1e-280) break;
            }
            const double* pc = coeffs.data() + (m == 0 ? lay.m0(0) : lay.cos_off(m));
            const double* ps = m == 0 ? nullptr : coeffs.data() + lay.sin_off(m);
            double sc = 0.0, ss = 0.0;
            double pk2 = pmm, pk1 = 0.0;
            sc += pc[0] * pk2;
            if (ps) ss += ps[0] * pk2;
            if (m + 1 <= K) {
                pk1 = tb->dm[m] * z * pmm;
                sc += pc[1] * pk1;
                if (ps) ss += ps[1] * pk1;
            }
            for (int k = m + 2; k <= K; ++k) {
                double p3 = tb->a[static_cast<std::size_t>(k) * (K + 1) + m] * z * pk1 -
                            tb->b[static_cast<std::size_t>(k) * (K + 1) + m] * pk2;
                pk2 = pk1;
                pk1 = p3;
                sc += pc[k - m] * p3;
                if (ps) ss += ps[k - m] * p3;
            }
            double s = (m == 0) ? 1.0 : detail::kSqrt2;
            gc[m] = s * sc;
            gs[m] = s * ss;
        }
        // sweep the ring with an incremental rotation instead of per-node trig
        double dphi = 2.0 * kPi / static_cast<double>(ring.count);
        double cd = std::cos(dphi), sd = std::sin(dphi);
        double c1 = std::cos(ring.phi0), s1 = std::sin(ring.phi0);
        for (std::size_t i = 0; i < ring.count; ++i) {
            double val = gc[0];
            double cmv = c1, smv = s1;
            for (int m = 1; m <= K; ++m) {
                val += gc[m] * cmv + gs[m] * smv;
                double nc = cmv * c1 - smv * s1;
                smv = smv * c1 + cmv * s1;
                cmv = nc;
            }
            out[ring.begin + i] = val;
            double nc1 = c1 * cd - s1 * sd;
            s1 = s1 * cd + c1 * sd;
            c1 = nc1;
        }
    });
    return out;
}

}  // namespace needlet
