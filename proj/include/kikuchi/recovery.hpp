#pragma once

// Recovery pipeline: voting matrix over an eigenvector of the Kikuchi
// operator, 1RDM / top-eigenvector rounding, one round of tensor-power
// boosting on the full tensor, and the Fig. 2 experiment harness.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kikuchi/combinatorics.hpp"
#include "kikuchi/kikuchi.hpp"
#include "kikuchi/model.hpp"
#include "kikuchi/rng.hpp"
#include "kikuchi/spectral.hpp"

namespace kikuchi {

// corr(x, z) = |x.z| / (|x||z|); for block spikes (asymmetric case) each
// block is aligned with its optimal sign, since the pipeline is invariant
// under flipping an even number of blocks.
inline double correlation(const std::vector<double>& x, const SpikeVector& z) {
    if (static_cast<int>(x.size()) != z.n()) throw std::invalid_argument("correlation: length mismatch");
    int nb = z.block_count, bs = z.block_size();
    double num = 0, nx = 0;
    for (double v : x) nx += v * v;
    for (int b = 0; b < nb; ++b) {
        double dot = 0;
        for (int j = 0; j < bs; ++j) dot += x[b * bs + j] * z.values[b * bs + j];
        num += std::abs(dot);
    }
    double denom = std::sqrt(nx) * std::sqrt(static_cast<double>(z.n()));
    return denom > 0 ? num / denom : 0.0;
}

// V_ij = sum_{U,V} v_U v_V 1(U delta V = {i,j}), zero diagonal. Computed as
// A^T A with A[(rank of U minus x), x] = v_U summed over x in U.
inline Eigen::MatrixXd voting_matrix(const std::vector<double>& v, int n, int ell) {
    SubsetIndexer idx(n, ell);
    if (v.size() != idx.dim()) throw std::invalid_argument("voting_matrix: bad eigenvector length");
    uint64_t wdim = binom(n, ell - 1);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(wdim, n);
    std::vector<int> U(ell);
    for (int i = 0; i < ell; ++i) U[i] = i;
    for (uint64_t r = 0; r < idx.dim(); ++r) {
        double val = v[r];
        if (val != 0) {
            for (int j = 0; j < ell; ++j) {
                // rank of U without U[j] among (ell-1)-subsets.
                uint64_t w = 0;
                for (int i = 0; i < j; ++i) w += binom(U[i], i + 1);
                for (int i = j + 1; i < ell; ++i) w += binom(U[i], i);
                A(w, U[j]) += val;
            }
        }
        int i = 0;
        while (i + 1 < ell && U[i] + 1 == U[i + 1]) ++i;
        ++U[i];
        for (int j = 0; j < i; ++j) U[j] = j;
    }
    Eigen::MatrixXd V = A.transpose() * A;
    V.diagonal().setZero();
    return V;
}

// 1RDM (identity + V)/n; trace exactly 1 by construction.
inline Eigen::MatrixXd one_rdm(const Eigen::MatrixXd& V) {
    int n = static_cast<int>(V.rows());
    return (Eigen::MatrixXd::Identity(n, n) + V) / static_cast<double>(n);
}

enum class RecoveryStrategy { top_eigvec, gaussian_1rdm };

struct RecoveryResult {
    std::vector<double> candidate;  // unit norm
    std::vector<int> rounded;       // sign rounding
    double correlation = -1;        // vs reference spike when supplied
    bool boosted = false;
};

inline RecoveryResult weak_recover(const Eigen::MatrixXd& V, uint64_t seed,
                                   RecoveryStrategy strategy = RecoveryStrategy::top_eigvec,
                                   const SpikeVector* z = nullptr) {
    int n = static_cast<int>(V.rows());
    Eigen::VectorXd x(n);
    if (strategy == RecoveryStrategy::top_eigvec) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V);
        x = es.eigenvectors().col(n - 1);
    } else {
        Eigen::MatrixXd R = one_rdm(V);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
        Eigen::VectorXd lam = es.eigenvalues();
        for (int i = 0; i < n; ++i) {
            if (lam(i) < -1e-9)
                throw std::runtime_error("weak_recover: 1RDM eigenvalue below -1e-9");
            lam(i) = std::max(lam(i), 0.0);  // clamp finite-sample noise
        }
        Rng g = Rng(seed).derive("gaussian-1rdm");
        x.setZero();
        for (int i = 0; i < n; ++i) x += std::sqrt(lam(i)) * g.next_gaussian() * es.eigenvectors().col(i);
    }
    double nx = x.norm();
    if (nx > 0) x /= nx;
    RecoveryResult res;
    res.candidate.assign(x.data(), x.data() + n);
    res.rounded.resize(n);
    for (int i = 0; i < n; ++i) res.rounded[i] = x(i) >= 0 ? 1 : -1;
    if (z) res.correlation = correlation(res.candidate, *z);
    return res;
}

// ---- boosting (one round of tensor power iteration, section 4.2 model) ----

// Full ordered tensor T'_s = Xi_s z_s over [n]^k with independent Skellam
// weights: T'_s = Poi(q'(1 + rho z_s)/2) - Poi(q'(1 - rho z_s)/2),
// q' = m / (k! C(n,k)). Stored dense, row-major over [n]^k.
struct FullTensor {
    int n = 0, k = 0;
    std::vector<int> values;
};

inline FullTensor sample_full_tensor(int n, int k, double m, double rho, const SpikeVector& z,
                                     uint64_t seed) {
    FullTensor t;
    t.n = n;
    t.k = k;
    double kfact = std::tgamma(k + 1.0);
    double q = m / (kfact * static_cast<double>(binom(n, k)));
    size_t total = 1;
    for (int i = 0; i < k; ++i) total *= n;
    t.values.resize(total);
    Rng g = Rng(seed).derive("full-tensor");
    std::vector<int> tup(k, 0);
    for (size_t s = 0; s < total; ++s) {
        int zs = 1;
        for (int b = 0; b < k; ++b) zs *= z.values[tup[b]];
        double lp = q * (1.0 + rho * zs) / 2.0;
        double lm = q * (1.0 - rho * zs) / 2.0;
        t.values[s] = static_cast<int>(g.next_poisson(lp)) - static_cast<int>(g.next_poisson(lm));
        int b = k - 1;
        while (b >= 0 && ++tup[b] == n) tup[b--] = 0;
    }
    return t;
}

// x_hat = T' . x^{(k-1)} contracted on the first index.
inline RecoveryResult boost(const FullTensor& t, const std::vector<double>& x,
                            const SpikeVector* z = nullptr) {
    int n = t.n, k = t.k;
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("boost: length mismatch");
    size_t stride = 1;
    for (int i = 0; i < k - 1; ++i) stride *= n;
    std::vector<double> out(n, 0.0);
    // Precompute products over the trailing k-1 indices incrementally.
    std::vector<int> tup(k - 1, 0);
    for (size_t s = 0; s < stride; ++s) {
        double px = 1;
        for (int b = 0; b < k - 1; ++b) px *= x[tup[b]];
        if (px != 0) {
            for (int i = 0; i < n; ++i) {
                int w = t.values[static_cast<size_t>(i) * stride + s];
                if (w != 0) out[i] += w * px;
            }
        }
        int b = k - 2;
        while (b >= 0 && ++tup[b] == n) tup[b--] = 0;
    }
    double norm = 0;
    for (double v : out) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0) throw std::runtime_error("boost: zero contraction result");
    for (double& v : out) v /= norm;
    RecoveryResult res;
    res.candidate = std::move(out);
    res.rounded.resize(n);
    for (int i = 0; i < n; ++i) res.rounded[i] = res.candidate[i] >= 0 ? 1 : -1;
    res.boosted = true;
    if (z) res.correlation = correlation(res.candidate, *z);
    return res;
}

// Symmetric-entry contraction: each k-subset entry stands for its k!
// orderings, so the first-index contraction picks up (k-1)! per element.
inline RecoveryResult boost(const SparseSignedTensor& t, const std::vector<double>& x,
                            const SpikeVector* z = nullptr) {
    int n = t.n, k = t.k;
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("boost: length mismatch");
    std::vector<double> out(n, 0.0);
    for (size_t e = 0; e < t.keys.size(); ++e) {
        const auto& S = t.keys[e];
        double w = t.weights[e];
        // prod over S, divided by x_i for each i in S (handle zeros directly).
        for (int j = 0; j < k; ++j) {
            double p = w;
            for (int i = 0; i < k; ++i)
                if (i != j) p *= x[S[i]];
            out[S[j]] += p;
        }
    }
    double norm = 0;
    for (double v : out) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0) throw std::runtime_error("boost: zero contraction result");
    for (double& v : out) v /= norm;
    RecoveryResult res;
    res.candidate = std::move(out);
    res.rounded.resize(n);
    for (int i = 0; i < n; ++i) res.rounded[i] = res.candidate[i] >= 0 ? 1 : -1;
    res.boosted = true;
    if (z) res.correlation = correlation(res.candidate, *z);
    return res;
}

// ---- Fig. 2 experiment harness ----

struct Fig2Cell {
    std::string setting;  // "symmetric" | "asymmetric"
    double rho = 0;
    double obs_fraction = 0;
    int trials = 0;
    double mean_corr = 0;
    double std_corr = 0;
};

struct Fig2Config {
    int n_sym = 20;
    int n_asym = 7;  // N = 28
    int k = 4;
    int ell = 6;
    int trials = 30;
    std::vector<double> rhos{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
    std::vector<double> fractions{0.01, 0.05, 0.2, 0.5};
    uint64_t seed = 2024;
};

// One full Fig. 2 trial: top-3 eigenvectors of K, a seeded random normal
// combination, the voting matrix, and its top eigenvector.
inline double fig2_trial(bool symmetric, const Fig2Config& cfg, double rho, double frac,
                         uint64_t trial_seed) {
    ProblemParams p;
    p.k = cfg.k;
    p.ell = cfg.ell;
    p.rho = rho;
    p.seed = trial_seed;
    int N;
    SparseSignedTensor t;
    SpikeVector z;
    if (symmetric) {
        p.n = cfg.n_sym;
        N = p.n;
        p.m_target = frac * static_cast<double>(binom(p.n, p.k));
        std::tie(t, z) = sample_planted(p);
    } else {
        p.n = cfg.n_asym;
        N = p.n * p.k;
        p.m_target = frac * std::pow(static_cast<double>(p.n), p.k);
        auto [a, za] = sample_asymmetric_planted(p);
        t = symmetric_embed(a);
        z = za;
    }
    if (t.entry_count() == 0) return 0.0;
    KikuchiOperator K(t, cfg.ell);
    EigenOptions opt;
    opt.top_count = 3;
    opt.seed = Rng(trial_seed).derive("fig2-eig").next_u64();
    EigenResult er = lanczos_top(K, opt);
    int got = static_cast<int>(er.eigenvectors.size());
    if (got == 0) return 0.0;
    Rng g = Rng(trial_seed).derive("fig2-combo");
    std::vector<double> v(K.dim(), 0.0);
    for (int tvec = 0; tvec < got; ++tvec) {
        double c = g.next_gaussian();
        const auto& ev = er.eigenvectors[tvec];
        for (uint64_t i = 0; i < K.dim(); ++i) v[i] += c * ev[i];
    }
    double nv = 0;
    for (double x : v) nv += x * x;
    nv = std::sqrt(nv);
    if (nv == 0) return 0.0;
    for (double& x : v) x /= nv;
    Eigen::MatrixXd V = voting_matrix(v, N, cfg.ell);
    RecoveryResult rr = weak_recover(V, trial_seed, RecoveryStrategy::top_eigvec, &z);
    return rr.correlation;
}

inline Fig2Cell fig2_cell(bool symmetric, const Fig2Config& cfg, double rho, double frac) {
    Fig2Cell cell;
    cell.setting = symmetric ? "symmetric" : "asymmetric";
    cell.rho = rho;
    cell.obs_fraction = frac;
    cell.trials = cfg.trials;
    Rng root(cfg.seed);
    std::vector<double> corrs;
    for (int t = 0; t < cfg.trials; ++t) {
        uint64_t s = root.derive(symmetric ? "fig2-sym" : "fig2-asym",
                                 static_cast<uint64_t>(t) * 1000003ULL +
                                     static_cast<uint64_t>(rho * 997) * 31ULL +
                                     static_cast<uint64_t>(frac * 10007))
                         .next_u64();
        corrs.push_back(fig2_trial(symmetric, cfg, rho, frac, s));
    }
    double mean = 0;
    for (double c : corrs) mean += c;
    mean /= corrs.size();
    double var = 0;
    for (double c : corrs) var += (c - mean) * (c - mean);
    var = corrs.size() > 1 ? var / (corrs.size() - 1) : 0.0;
    cell.mean_corr = mean;
    cell.std_corr = std::sqrt(var);
    return cell;
}

inline void fig2_csv_header(std::ostream& os) {
    os << "setting,rho,obs_fraction,trials,mean_corr,std_corr\n";
}

inline void fig2_csv_row(std::ostream& os, const Fig2Cell& c) {
    os << c.setting << ',' << c.rho << ',' << c.obs_fraction << ',' << c.trials << ','
       << c.mean_corr << ',' << c.std_corr << '\n';
}

}  // namespace kikuchi
