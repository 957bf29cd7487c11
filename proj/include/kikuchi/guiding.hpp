#pragma once

// The guiding state |Gamma_ell> = (1/chi) sum over ordered pairwise-disjoint
// c-tuples of observed clauses of T_{S_1}...T_{S_c} |S_1 + ... + S_c|>, its
// normalization chi^2 = alpha_ell m^c, the disjointness fraction alpha_ell,
// overlap measurements against the high-energy eigenspace, and the
// amplitude-amplification repetition count L.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "kikuchi/combinatorics.hpp"
#include "kikuchi/kikuchi.hpp"
#include "kikuchi/model.hpp"
#include "kikuchi/spectral.hpp"

namespace kikuchi {

struct GuidingConfig {
    uint64_t dense_cap = 4000;  // eigendecomposition cap for overlap reports
    uint64_t state_dim_cap = 2000000;  // amplitude-vector cap for build_guiding
};

// Normalization convention: chi^2 is the actual squared norm of the ordered
// disjoint-tuple sum (the c! orderings of a tuple add coherently), so
// chi^2 = alpha_ell m^c and the preparation success alpha_ell c^{-ell} are
// exact identities. The tuple-counting fraction (weight-ell mass of the
// product state before shuffling) is kept separately as alpha_tuple; absent
// union collisions, alpha_ell = c! * alpha_tuple.
struct GuidingState {
    int n = 0, k = 0, ell = 0, c = 0;
    std::vector<double> amplitudes;  // unit norm, length C(n, ell)
    double chi_sq = 0;        // squared norm of the unnormalized ordered sum
    double norm_sq_raw = 0;   // same as chi_sq (kept for clarity at call sites)
    double tuple_count = 0;   // ordered pairwise-disjoint c-tuples, weighted
    double alpha_tuple = 0;   // tuple_count / m^c
    double alpha_ell = 0;     // chi^2 / m^c (coherent success mass)
    double beta_ell_sq = 0;   // end-to-end preparation success: alpha_ell c^{-ell}
};

namespace detail {

// Recursively accumulate products over unordered pairwise-disjoint c-tuples
// of entries with ascending indices; multiplied by c! for the ordered count.
template <class F>
void disjoint_tuples(const SparseSignedTensor& t, int c, F&& emit) {
    size_t m = t.entry_count();
    std::vector<uint64_t> masks(m, 0);
    bool use_mask = t.n <= 64;
    std::vector<std::vector<char>> ind;
    if (use_mask) {
        for (size_t e = 0; e < m; ++e)
            for (int x : t.keys[e]) masks[e] |= 1ULL << x;
    } else {
        ind.assign(m, std::vector<char>(t.n, 0));
        for (size_t e = 0; e < m; ++e)
            for (int x : t.keys[e]) ind[e][x] = 1;
    }
    std::vector<size_t> chosen;
    std::vector<char> used(t.n, 0);
    auto rec = [&](auto&& self, size_t start, uint64_t mask, int rem) -> void {
        if (rem == 0) {
            emit(chosen);
            return;
        }
        for (size_t e = start; e + rem <= m; ++e) {
            if (use_mask) {
                if (mask & masks[e]) continue;
            } else {
                bool clash = false;
                for (int x : t.keys[e])
                    if (used[x]) { clash = true; break; }
                if (clash) continue;
                for (int x : t.keys[e]) used[x] = 1;
            }
            chosen.push_back(e);
            self(self, e + 1, mask | masks[e], rem - 1);
            chosen.pop_back();
            if (!use_mask)
                for (int x : t.keys[e]) used[x] = 0;
        }
    };
    rec(rec, 0, 0, c);
}

}  // namespace detail

// Fraction of ordered c-tuples of observed entries that are pairwise disjoint.
inline double alpha_ell(const SparseSignedTensor& t, int c) {
    if (c <= 0) throw std::invalid_argument("alpha_ell: c >= 1");
    double m = static_cast<double>(t.entry_count());
    if (m == 0) return 0;
    if (c == 1) return 1.0;
    double count = 0;
    detail::disjoint_tuples(t, c, [&](const std::vector<size_t>&) { count += 1.0; });
    double fact = 1;
    for (int i = 2; i <= c; ++i) fact *= i;
    return count * fact / std::pow(m, c);
}

// Prop lower bound: alpha_ell >= 1 - C(c,2)(k^2/n + 4k ln n / m).
inline double alpha_ell_bound(int n, int k, int c, double m) {
    double pairs = 0.5 * c * (c - 1);
    return 1.0 - pairs * (static_cast<double>(k) * k / n + 4.0 * k * std::log(static_cast<double>(n)) / m);
}

inline GuidingState build_guiding(const SparseSignedTensor& t, int ell, GuidingConfig cfg = {}) {
    if (ell % t.k != 0) throw std::invalid_argument("build_guiding: k must divide ell");
    int c = ell / t.k;
    SubsetIndexer idx(t.n, ell);
    if (idx.dim() > cfg.state_dim_cap) throw std::runtime_error("build_guiding: dimension cap exceeded");
    GuidingState g;
    g.n = t.n;
    g.k = t.k;
    g.ell = ell;
    g.c = c;
    g.amplitudes.assign(idx.dim(), 0.0);
    double fact = 1;
    for (int i = 2; i <= c; ++i) fact *= i;
    double tuple_weight = 0;  // sum over unordered tuples of (prod |T|)^2 proxy: count with weights
    std::vector<int> uni(ell);
    detail::disjoint_tuples(t, c, [&](const std::vector<size_t>& chosen) {
        int prod = 1;
        int pos = 0;
        for (size_t e : chosen) {
            prod *= t.weights[e];
            for (int x : t.keys[e]) uni[pos++] = x;
        }
        std::sort(uni.begin(), uni.end());
        g.amplitudes[idx.rank(uni)] += fact * prod;
        tuple_weight += fact * static_cast<double>(prod) * prod;
    });
    g.tuple_count = tuple_weight;  // for +-1 weights: the ordered disjoint tuple count
    double ns = 0;
    for (double a : g.amplitudes) ns += a * a;
    g.chi_sq = ns;
    g.norm_sq_raw = ns;
    if (ns > 0) {
        double inv = 1.0 / std::sqrt(ns);
        for (double& a : g.amplitudes) a *= inv;
    }
    double m = static_cast<double>(t.entry_count());
    g.alpha_tuple = m > 0 ? g.tuple_count / std::pow(m, c) : 0.0;
    g.alpha_ell = m > 0 ? g.chi_sq / std::pow(m, c) : 0.0;
    g.beta_ell_sq = g.alpha_ell * std::pow(static_cast<double>(c), -ell);
    return g;
}

// Asymmetric/embedded variant: same disjoint-union construction on sym(T).
// Each embedded clause holds one index per block, so any disjoint union of c
// of them lies in the valid set V_{N,ell,k} automatically.
inline GuidingState asym_guiding(const SparseSignedTensor& t_embedded, int ell, GuidingConfig cfg = {}) {
    if (t_embedded.symmetric_flag)
        throw std::invalid_argument("asym_guiding: expected a symmetrically embedded tensor");
    return build_guiding(t_embedded, ell, cfg);
}

// Free constants of Thm 2.40 / Prop 2.31.
struct OverlapConstants {
    double gamma = 0.1;
    double kappa = 1.0;
    double eps = 0.5;   // spectral-mass split parameter
    double nu = 0.5;    // clause-count concentration slack
    double zeta = 0.5;  // Poisson-splitting fraction
};

struct OverlapReport {
    double lambda_star = 0;
    double lambda_max = 0;
    double zeta_sq = 0;        // <Gamma| Pi_{>=lambda*} |Gamma>
    double z_overlap = 0;      // <z-lift| Pi | z-lift>
    double xi = 0;             // Thm 2.40 prefactor
    double xi_bound = 0;       // xi (m / C(n,k))^{ell/k}
    double prop231_bound = 0;  // eps rho / A, A = 1+kappa-(1-gamma) rho
    int L = 0;                 // ceil(prefactor / sqrt(xi_bound))
};

inline nlohmann::json overlap_report_to_json(const OverlapReport& r) {
    return nlohmann::json{{"lambda_star", r.lambda_star}, {"lambda_max", r.lambda_max},
                          {"zeta_sq", r.zeta_sq},         {"z_overlap", r.z_overlap},
                          {"xi", r.xi},                   {"xi_bound", r.xi_bound},
                          {"prop231_bound", r.prop231_bound}, {"L", r.L}};
}

inline double xi_prefactor(int k, int ell, double rho, const OverlapConstants& oc) {
    int c = ell / k;
    double A = 1.0 + oc.kappa - (1.0 - oc.gamma) * rho;
    double log_comb = std::lgamma(ell + 1.0) - std::lgamma(c + 1.0) - c * std::lgamma(k + 1.0);
    return std::exp(log_comb) * rho * oc.eps * oc.nu / (4.0 * A) * std::pow(rho * rho * oc.zeta, c);
}

// Measure <Gamma|Pi|Gamma> and <z-lift|Pi|z-lift> for Pi = Pi_{>= lambda*}
// from a full dense eigendecomposition.
inline OverlapReport overlap_report(const KikuchiOperator& K, const GuidingState& g,
                                    const SpikeVector& z, double m, double rho,
                                    double amp_prefactor = 1.0, OverlapConstants oc = {},
                                    GuidingConfig cfg = {}) {
    if (K.dim() > cfg.dense_cap) throw std::runtime_error("overlap_report: dense cap exceeded");
    int n = K.n(), k = K.k(), ell = K.ell();
    int c = ell / k;
    DetectionParams dp;
    dp.gamma = oc.gamma;
    dp.kappa = oc.kappa;
    DetectionThresholds th = detection_thresholds(n, k, ell, m, rho, dp);
    Eigen::MatrixXd D = dense_matrix(K, cfg.dense_cap);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
    OverlapReport r;
    r.lambda_star = th.lambda_star;
    r.lambda_max = es.eigenvalues()(D.rows() - 1);
    if (r.lambda_max < r.lambda_star)
        throw std::runtime_error("overlap_report: empty high-energy subspace (lambda* > lambda_max)");
    Eigen::Map<const Eigen::VectorXd> gv(g.amplitudes.data(), D.rows());
    auto zl = K.tensor().symmetric_flag ? spike_lift(z, ell) : spike_lift_embedded(z, ell);
    Eigen::Map<const Eigen::VectorXd> zv(zl.data(), D.rows());
    for (int i = 0; i < D.rows(); ++i) {
        if (es.eigenvalues()(i) < r.lambda_star) continue;
        double pg = es.eigenvectors().col(i).dot(gv);
        double pz = es.eigenvectors().col(i).dot(zv);
        r.zeta_sq += pg * pg;
        r.z_overlap += pz * pz;
    }
    r.xi = xi_prefactor(k, ell, rho, oc);
    r.xi_bound = r.xi * std::pow(m / static_cast<double>(binom(n, k)), c);
    double A = 1.0 + oc.kappa - (1.0 - oc.gamma) * rho;
    r.prop231_bound = oc.eps * rho / A;
    r.L = std::max(1, static_cast<int>(std::ceil(amp_prefactor / std::sqrt(r.xi_bound) - 1e-9)));
    return r;
}

// L = ceil(prefactor * (C(n,k)/m)^{ell/(2k)}); log-space for headline problem sizes.
inline long long amp_amp_reps(int n, int k, int ell, double m, double prefactor) {
    double log_ratio = log_binom(n, k) - std::log(m);
    double x = prefactor * std::exp(log_ratio * ell / (2.0 * k));
    return static_cast<long long>(std::ceil(x - 1e-9));
}

}  // namespace kikuchi
