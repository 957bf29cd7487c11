#pragma once

// Subset ranking/unranking (combinadic order) and the closed-form
// combinatorial quantities of the Kikuchi method: sparsity delta, average
// degree d, dense degree Delta, edge count E, symmetric-embedding analogues,
// and the Eberlein polynomials of the Johnson association scheme.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kikuchi {

// Exact binomial table, C(i, j) for i <= n_max. Values that would overflow
// uint64 are saturated; callers needing larger values use log_binom.
class BinomTable {
public:
    explicit BinomTable(int n_max) : n_max_(n_max), c_(static_cast<size_t>(n_max + 1) * (n_max + 1), 0) {
        for (int i = 0; i <= n_max; ++i) {
            at(i, 0) = 1;
            for (int j = 1; j <= i; ++j) {
                uint64_t a = at(i - 1, j - 1), b = at(i - 1, j);
                uint64_t s = a + b;
                if (s < a || a == kSat || b == kSat) s = kSat;
                at(i, j) = s;
            }
        }
    }

    uint64_t operator()(int i, int j) const {
        if (j < 0 || j > i || i < 0) return 0;
        assert(i <= n_max_);
        uint64_t v = c_[static_cast<size_t>(i) * (n_max_ + 1) + j];
        if (v == kSat) throw std::overflow_error("binomial overflow; use log_binom");
        return v;
    }

    int n_max() const { return n_max_; }

    static constexpr uint64_t kSat = ~0ULL;

private:
    uint64_t& at(int i, int j) { return c_[static_cast<size_t>(i) * (n_max_ + 1) + j]; }
    int n_max_;
    std::vector<uint64_t> c_;
};

inline const BinomTable& binom_table() {
    static BinomTable t(300);
    return t;
}

inline uint64_t binom(int n, int k) { return binom_table()(n, k); }

// ln C(n, k) via log-gamma; valid for any n >= k >= 0.
inline double log_binom(double n, double k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Combinadic bijection between sorted ell-subsets of {0,...,n-1} and
// [0, C(n,ell)). rank(S) = sum_i C(S[i], i+1).
class SubsetIndexer {
public:
    SubsetIndexer(int n, int ell) : n_(n), ell_(ell) {
        if (ell < 0 || ell > n) throw std::invalid_argument("SubsetIndexer: need 0 <= ell <= n");
        dim_ = binom(n, ell);
    }

    int n() const { return n_; }
    int ell() const { return ell_; }
    uint64_t dim() const { return dim_; }

    uint64_t rank(std::span<const int> subset) const {
        assert(static_cast<int>(subset.size()) == ell_);
        uint64_t r = 0;
        for (int i = 0; i < ell_; ++i) {
            assert(subset[i] >= 0 && subset[i] < n_);
            assert(i == 0 || subset[i] > subset[i - 1]);
            r += binom(subset[i], i + 1);
        }
        return r;
    }

    void unrank(uint64_t index, std::span<int> out) const {
        if (index >= dim_) throw std::out_of_range("SubsetIndexer::unrank");
        assert(static_cast<int>(out.size()) == ell_);
        int c = n_;
        for (int i = ell_; i >= 1; --i) {
            // Largest c with C(c, i) <= index.
            while (binom(c - 1, i) > index) --c;
            --c;
            out[i - 1] = c;
            index -= binom(c, i);
        }
    }

    std::vector<int> unrank(uint64_t index) const {
        std::vector<int> out(ell_);
        unrank(index, out);
        return out;
    }

private:
    int n_, ell_;
    uint64_t dim_;
};

struct KikuchiStats {
    double delta = 0;     // average sparsity ratio delta_{n,k,ell}
    double d = 0;         // average degree d = m * delta
    double Delta = 0;     // dense regular degree C(n-ell,k/2)*C(ell,k/2)
    double E = 0;         // edge count (1/2) m C(n-k, ell-k/2) C(k, k/2)
    double delta_S = 0;   // embedded analogue C(k,k/2) c^{k/2}(n_blk-c)^{k/2}/n_blk^k
    double d_S = 0;       // m * delta_S
    double Delta_S_max = 0;  // dense embedded max degree C(k,k/2) c^{k/2}(n_blk-c)^{k/2}
};

// All quantities evaluated in log space, so they stay finite at headline problem sizes.
inline KikuchiStats kikuchi_stats(int n, int k, int ell, double m) {
    if (k <= 0 || k % 2 != 0) throw std::invalid_argument("kikuchi_stats: k must be even positive");
    if (ell < k / 2 || ell > n) throw std::invalid_argument("kikuchi_stats: need k/2 <= ell <= n");
    if (m < 0) throw std::invalid_argument("kikuchi_stats: m >= 0");
    KikuchiStats s;
    int h = k / 2;
    double log_delta = log_binom(n - k, ell - h) + log_binom(k, h) - log_binom(n, ell);
    s.delta = std::exp(log_delta);
    s.d = m * s.delta;
    s.Delta = std::exp(log_binom(n - ell, h) + log_binom(ell, h));
    s.E = 0.5 * m * std::exp(log_binom(n - k, ell - h) + log_binom(k, h));
    if (ell % k == 0 && n % k == 0) {
        // Interpret (n, ell) as the embedded space: N = n with k blocks of
        // n_blk = n/k, c = ell/k indices per block.
        int n_blk = n / k, c = ell / k;
        if (c <= n_blk) {
            double log_ds = log_binom(k, h) + h * (std::log(static_cast<double>(c)) + std::log(static_cast<double>(n_blk - c))) -
                            k * std::log(static_cast<double>(n_blk));
            s.delta_S = std::exp(log_ds);
            s.d_S = m * s.delta_S;
            s.Delta_S_max = s.delta_S * std::pow(static_cast<double>(n_blk), k);
        }
    }
    return s;
}

// Eberlein polynomial: eigenvalue of the distance-i graph of the Johnson
// scheme J(n, ell) on eigenspace r. Exact integer arithmetic.
inline double eberlein(int n, int ell, int i, int r) {
    if (r < 0 || r > ell || i < 0 || i > ell) throw std::invalid_argument("eberlein: need 0<=r<=ell, 0<=i<=ell");
    double acc = 0;
    for (int j = 0; j <= std::min(r, i); ++j) {
        double term = static_cast<double>(binom(r, j)) * static_cast<double>(binom(ell - r, i - j)) *
                      static_cast<double>(binom(n - ell - r, i - j));
        acc += (j % 2 == 0) ? term : -term;
    }
    return acc;
}

// Multiplicity of eigenspace r in the Johnson scheme J(n, ell).
inline double johnson_multiplicity(int n, int ell, int r) {
    if (r == 0) return 1;
    return static_cast<double>(binom(n, r)) - static_cast<double>(binom(n, r - 1));
}

}  // namespace kikuchi
