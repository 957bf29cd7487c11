#pragma once

// Eigensolvers over the Kikuchi operator (Lanczos with full
// reorthogonalization, power iteration) and the detection procedure:
// thresholds lambda_star / random_bound, failure probabilities, verdicts,
// and the JSON detection certificate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "kikuchi/combinatorics.hpp"
#include "kikuchi/kikuchi.hpp"
#include "kikuchi/rng.hpp"

namespace kikuchi {

struct EigenOptions {
    double tol = 1e-6;
    int max_iter = 0;       // 0: use 10 * ell * ln(dim)
    int top_count = 1;      // number of extremal eigenpairs wanted
    uint64_t seed = 12345;  // start-vector seed
};

struct EigenResult {
    std::vector<double> eigenvalues;              // descending by value
    std::vector<std::vector<double>> eigenvectors;  // unit norm, parallel
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline int default_max_iter(int ell, uint64_t dim) {
    return std::max(30, static_cast<int>(std::ceil(10.0 * ell * std::log(static_cast<double>(std::max<uint64_t>(dim, 2))))));
}

}  // namespace detail

// Lanczos with full reorthogonalization. Returns the top_count algebraically
// largest Ritz pairs; eigenvalue convergence is measured by the usual
// beta * |last component| residual bound.
template <class MatVec>
EigenResult lanczos_top(MatVec&& apply, uint64_t dim, const EigenOptions& opt = {}) {
    EigenResult res;
    if (dim == 0) return res;
    int max_iter = opt.max_iter > 0 ? opt.max_iter : detail::default_max_iter(8, dim);
    max_iter = static_cast<int>(std::min<uint64_t>(max_iter, dim));
    std::vector<std::vector<double>> V;
    std::vector<double> alpha, beta;
    std::vector<double> v(dim), w(dim);
    Rng rng(opt.seed);
    Rng g = rng.derive("lanczos-start");
    double nrm = 0;
    for (auto& x : v) {
        x = g.next_gaussian();
        nrm += x * x;
    }
    nrm = std::sqrt(nrm);
    for (auto& x : v) x /= nrm;

    auto ritz = [&](int it) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(it, it);
        for (int i = 0; i < it; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < it) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        return es;
    };

    int it = 0;
    for (; it < max_iter; ++it) {
        V.push_back(v);
        apply(std::span<const double>(v), std::span<double>(w));
        double a = 0;
        for (uint64_t i = 0; i < dim; ++i) a += v[i] * w[i];
        alpha.push_back(a);
        // w -= alpha*v + beta*v_prev, then full reorthogonalization (twice).
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : V) {
                double dot = 0;
                for (uint64_t i = 0; i < dim; ++i) dot += q[i] * w[i];
                for (uint64_t i = 0; i < dim; ++i) w[i] -= dot * q[i];
            }
        }
        double b = 0;
        for (double x : w) b += x * x;
        b = std::sqrt(b);
        int kk = static_cast<int>(alpha.size());
        if (kk >= opt.top_count) {
            auto es = ritz(kk);
            bool ok = true;
            for (int t = 0; t < opt.top_count; ++t) {
                int col = kk - 1 - t;
                double resid = b * std::abs(es.eigenvectors()(kk - 1, col));
                double scale = std::max(1.0, std::abs(es.eigenvalues()(col)));
                if (resid > opt.tol * scale) { ok = false; break; }
            }
            if (ok || b < 1e-14 || kk == static_cast<int>(std::min<uint64_t>(max_iter, dim))) {
                res.converged = ok || b < 1e-14;
                res.iterations = kk;
                for (int t = 0; t < opt.top_count && t < kk; ++t) {
                    int col = kk - 1 - t;
                    res.eigenvalues.push_back(es.eigenvalues()(col));
                    std::vector<double> y(dim, 0.0);
                    for (int j = 0; j < kk; ++j) {
                        double c = es.eigenvectors()(j, col);
                        const auto& q = V[j];
                        for (uint64_t i = 0; i < dim; ++i) y[i] += c * q[i];
                    }
                    double ny = 0;
                    for (double x : y) ny += x * x;
                    ny = std::sqrt(ny);
                    if (ny > 0)
                        for (double& x : y) x /= ny;
                    res.eigenvectors.push_back(std::move(y));
                }
                return res;
            }
        }
        if (b < 1e-14) {
            // Invariant subspace exhausted; restart with a fresh random vector
            // orthogonal to V (keeps the Krylov growth going on reducible inputs).
            Rng g2 = rng.derive("lanczos-restart", static_cast<uint64_t>(it));
            for (auto& x : w) x = g2.next_gaussian();
            for (const auto& q : V) {
                double dot = 0;
                for (uint64_t i = 0; i < dim; ++i) dot += q[i] * w[i];
                for (uint64_t i = 0; i < dim; ++i) w[i] -= dot * q[i];
            }
            b = 0;
            for (double x : w) b += x * x;
            b = std::sqrt(b);
            if (b < 1e-14) break;  // full space spanned
            beta.push_back(0.0);
        } else {
            beta.push_back(b);
        }
        for (uint64_t i = 0; i < dim; ++i) v[i] = w[i] / b;
    }
    // Fell out of the loop: report best available Ritz data.
    int kk = static_cast<int>(alpha.size());
    if (kk > 0) {
        auto es = ritz(kk);
        res.iterations = kk;
        for (int t = 0; t < opt.top_count && t < kk; ++t) {
            int col = kk - 1 - t;
            res.eigenvalues.push_back(es.eigenvalues()(col));
            std::vector<double> y(dim, 0.0);
            for (int j = 0; j < kk; ++j) {
                double c = es.eigenvectors()(j, col);
                for (uint64_t i = 0; i < dim; ++i) y[i] += c * V[j][i];
            }
            double ny = 0;
            for (double x : y) ny += x * x;
            ny = std::sqrt(ny);
            if (ny > 0)
                for (double& x : y) x /= ny;
            res.eigenvectors.push_back(std::move(y));
        }
        res.converged = true;  // exhausted the space
    }
    return res;
}

inline EigenResult lanczos_top(const KikuchiOperator& K, EigenOptions opt = {}) {
    if (opt.max_iter == 0) opt.max_iter = detail::default_max_iter(K.ell(), K.dim());
    return lanczos_top([&K](std::span<const double> x, std::span<double> y) { K.matvec(x, y); },
                       K.dim(), opt);
}

// Power iteration on K (largest |eigenvalue|); mainly a cross-check oracle.
template <class MatVec>
EigenResult power_iteration(MatVec&& apply, uint64_t dim, const EigenOptions& opt = {}) {
    EigenResult res;
    if (dim == 0) return res;
    int max_iter = opt.max_iter > 0 ? opt.max_iter : 10000;
    std::vector<double> v(dim), w(dim);
    Rng g = Rng(opt.seed).derive("power-start");
    double nrm = 0;
    for (auto& x : v) {
        x = g.next_gaussian();
        nrm += x * x;
    }
    nrm = std::sqrt(nrm);
    for (auto& x : v) x /= nrm;
    double lam = 0;
    for (int it = 1; it <= max_iter; ++it) {
        apply(std::span<const double>(v), std::span<double>(w));
        double nw = 0, ray = 0;
        for (uint64_t i = 0; i < dim; ++i) {
            ray += v[i] * w[i];
            nw += w[i] * w[i];
        }
        nw = std::sqrt(nw);
        res.iterations = it;
        if (nw < 1e-300) break;
        for (uint64_t i = 0; i < dim; ++i) v[i] = w[i] / nw;
        if (std::abs(nw - std::abs(lam)) <= opt.tol * std::max(1.0, nw) && it > 3) {
            lam = ray >= 0 ? nw : -nw;
            res.converged = true;
            break;
        }
        lam = ray >= 0 ? nw : -nw;
    }
    res.eigenvalues.push_back(lam);
    res.eigenvectors.push_back(v);
    return res;
}

// Dense materialization for desk-scale eigendecompositions.
inline Eigen::MatrixXd dense_matrix(const KikuchiOperator& K, uint64_t dense_cap = 10000) {
    if (K.dim() > dense_cap) throw std::runtime_error("dense_matrix: dimension cap exceeded");
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(K.dim(), K.dim());
    K.for_each_pair([&](uint64_t u, uint64_t v, int w) {
        D(u, v) += w;
        D(v, u) += w;
    });
    return D;
}

// ---- detection thresholds ----

struct DetectionParams {
    double gamma = 0.1;    // planted concentration slack
    double kappa = 1.0;    // degree concentration slack
    double epsilon = 1.0;  // union-bound slack
};

struct DetectionThresholds {
    double d = 0;             // average degree m * delta
    double lambda_star = 0;   // planted certification threshold (1-gamma) rho d
    double random_bound = 0;  // sqrt(2 (1+kappa)(1+eps) d ln C(n,ell))
    double log_p_planted = 0; // ln P[planted lambda < lambda_star]
    double log_p_deg = 0;     // ln P[max degree > (1+kappa) d]
    double log_p_rand = 0;    // ln P[random lambda > random_bound]
};

inline DetectionThresholds detection_thresholds(int n, int k, int ell, double m, double rho,
                                                const DetectionParams& dp = {}) {
    DetectionThresholds th;
    KikuchiStats st = kikuchi_stats(n, k, ell, m);
    double lnN = log_binom(n, ell);
    th.d = st.d;
    th.lambda_star = (1.0 - dp.gamma) * rho * st.d;
    th.random_bound = std::sqrt(2.0 * (1.0 + dp.kappa) * (1.0 + dp.epsilon) * st.d * lnN);
    th.log_p_planted = -dp.gamma * dp.gamma * rho * rho * m / 2.0;
    th.log_p_deg = lnN - dp.kappa * dp.kappa / (2.0 + dp.kappa) * st.d;
    // P_rand <= P_deg + C(n,ell)^{-eps}; combine in log space.
    double a = th.log_p_deg, b = -dp.epsilon * lnN;
    double hi = std::max(a, b);
    th.log_p_rand = hi + std::log(std::exp(a - hi) + std::exp(b - hi));
    return th;
}

struct DetectionCertificate {
    double lambda_hat = 0;
    double lambda_star = 0;
    double random_bound = 0;
    std::string verdict;  // "planted" | "random" | "inconclusive"
    uint64_t seed = 0;
    int iterations = 0;
    DetectionThresholds thresholds;
};

inline nlohmann::json certificate_to_json(const DetectionCertificate& c) {
    nlohmann::json j;
    j["lambda_hat"] = c.lambda_hat;
    j["lambda_star"] = c.lambda_star;
    j["random_bound"] = c.random_bound;
    j["verdict"] = c.verdict;
    j["seeds"] = {{"instance", c.seed}};
    j["iterations"] = c.iterations;
    j["failure_probs"] = {{"log_p_planted", c.thresholds.log_p_planted},
                          {"log_p_deg", c.thresholds.log_p_deg},
                          {"log_p_rand", c.thresholds.log_p_rand},
                          {"p_planted", std::exp(c.thresholds.log_p_planted)},
                          {"p_rand", std::exp(c.thresholds.log_p_rand)}};
    return j;
}

// Run detection on an instance: estimate lambda_max(K_ell) and compare to the
// thresholds computed for (m, rho). Uses the tensor's own entry weights;
// m defaults to the absolute weight mass when not provided.
inline DetectionCertificate detect(const KikuchiOperator& K, double rho, double m_target,
                                   const DetectionParams& dp = {}, EigenOptions eopt = {}) {
    double m = m_target > 0 ? m_target : K.tensor().abs_weight_mass();
    DetectionThresholds th = detection_thresholds(K.n(), K.k(), K.ell(), m, rho > 0 ? rho : 1.0, dp);
    eopt.top_count = 1;
    EigenResult er = lanczos_top(K, eopt);
    DetectionCertificate c;
    c.lambda_hat = er.eigenvalues.empty() ? 0.0 : er.eigenvalues[0];
    c.lambda_star = th.lambda_star;
    c.random_bound = th.random_bound;
    c.seed = eopt.seed;
    c.iterations = er.iterations;
    c.thresholds = th;
    if (c.lambda_hat >= th.lambda_star)
        c.verdict = "planted";
    else if (c.lambda_hat <= th.random_bound)
        c.verdict = "random";
    else
        c.verdict = "inconclusive";
    return c;
}

}  // namespace kikuchi
