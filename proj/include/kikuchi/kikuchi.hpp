#pragma once

// The Kikuchi operator K_ell: symmetric matrix indexed by ell-subsets of [n]
// with [K]_{U,V} = T_{U delta V} whenever |U delta V| = k and the symmetric
// difference is an observed entry. Supports an explicit CSR representation at
// desk scale and an implicit matvec that enumerates entry blocks on the fly.

#include <cstdint>
#include <cstring>
#include <functional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "kikuchi/combinatorics.hpp"
#include "kikuchi/model.hpp"

namespace kikuchi {

struct KikuchiConfig {
    uint64_t explicit_dim_cap = 200000;   // explicit CSR if dim <= cap ...
    double explicit_nnz_cap = 1.6e8;      // ... and estimated nonzeros fit
    uint64_t sigma_dim_cap = 5000000;     // column-sparsity array only below this dim
};

class KikuchiOperator {
public:
    KikuchiOperator(const SparseSignedTensor& t, int ell, KikuchiConfig cfg = {})
        : tensor_(t), n_(t.n), k_(t.k), ell_(ell), cfg_(cfg), indexer_(t.n, ell) {
        if (k_ % 2 != 0) throw std::invalid_argument("Kikuchi: k must be even");
        if (ell_ < k_ / 2 || ell_ > n_ - k_ / 2)
            throw std::invalid_argument("Kikuchi: need k/2 <= ell <= n - k/2");
        dim_ = indexer_.dim();
        int h = k_ / 2;
        // Flat table C(x, p) for x < n, 1 <= p <= ell, for the hot ranking loop.
        ct_.resize(static_cast<size_t>(n_) * ell_);
        for (int x = 0; x < n_; ++x)
            for (int p = 1; p <= ell_; ++p) ct_[static_cast<size_t>(x) * ell_ + p - 1] = binom(x, p);
        pairs_per_entry_ = static_cast<double>(binom(k_ - 1, h - 1)) * static_cast<double>(binom(n_ - k_, ell_ - h));
        double nnz_est = 2.0 * pairs_per_entry_ * static_cast<double>(t.entry_count());
        explicit_ = dim_ <= cfg_.explicit_dim_cap || nnz_est <= cfg_.explicit_nnz_cap;
        if (explicit_ && (nnz_est > 4.0e8 || dim_ > 80000000)) explicit_ = false;
        if (explicit_) build_explicit();
        if (dim_ <= cfg_.sigma_dim_cap) build_sigma();
    }

    uint64_t dim() const { return dim_; }
    int n() const { return n_; }
    int k() const { return k_; }
    int ell() const { return ell_; }
    bool is_explicit() const { return explicit_; }
    const SubsetIndexer& indexer() const { return indexer_; }
    const SparseSignedTensor& tensor() const { return tensor_; }

    // Column sparsity sigma(U); requires dim below sigma_dim_cap.
    const std::vector<uint32_t>& sigma() const {
        if (sigma_.empty() && dim_ > 0 && tensor_.entry_count() > 0)
            throw std::runtime_error("Kikuchi: sigma not available at this dimension");
        return sigma_;
    }
    uint32_t d_max() const { return d_max_; }

    // Enumerate, for every entry S, all unordered pairs (U, V) with
    // U delta V = S, passing (rank_U, rank_V, weight) to emit.
    template <class F>
    void for_each_pair(F&& emit) const {
        int h = k_ / 2, wlen = ell_ - h;
        std::vector<int> comp(n_ - k_), A(h), B(h), pick(h > 0 ? h - 1 : 0);
        for (size_t e = 0; e < tensor_.keys.size(); ++e) {
            const std::vector<int>& S = tensor_.keys[e];
            int w = tensor_.weights[e];
            // Complement of S.
            {
                int ci = 0, si = 0;
                for (int x = 0; x < n_; ++x) {
                    if (si < k_ && S[si] == x) { ++si; continue; }
                    comp[ci++] = x;
                }
            }
            // Unordered splits: A always contains S[0].
            // Iterate (h-1)-subsets of {1..k-1} by odometer.
            for (int i = 0; i < h - 1; ++i) pick[i] = i + 1;
            while (true) {
                A[0] = S[0];
                for (int i = 0; i < h - 1; ++i) A[i + 1] = S[pick[i]];
                {
                    int bi = 0, pi = 0;
                    for (int j = 1; j < k_; ++j) {
                        if (pi < h - 1 && pick[pi] == j) { ++pi; continue; }
                        B[bi++] = S[j];
                    }
                }
                enumerate_split(A, B, comp, wlen, w, emit);
                // Advance odometer.
                int i = h - 2;
                while (i >= 0 && pick[i] == k_ - (h - 1) + i) --i;
                if (i < 0) break;
                ++pick[i];
                for (int j = i + 1; j < h - 1; ++j) pick[j] = pick[j - 1] + 1;
            }
            if (h == 1) {
                // Odometer above handles h >= 2; h == 1 has the single split
                // A = {S[0]}, B = {S[1]} which the first pass already emitted.
            }
        }
    }

    void matvec(std::span<const double> x, std::span<double> y) const {
        if (x.size() != dim_ || y.size() != dim_) throw std::invalid_argument("matvec: bad length");
        std::fill(y.begin(), y.end(), 0.0);
        if (explicit_) {
            for (uint64_t r = 0; r < dim_; ++r) {
                double acc = 0;
                for (uint64_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
                    acc += static_cast<double>(vals_[p]) * x[cols_[p]];
                y[r] = acc;
            }
        } else {
            for_each_pair([&](uint64_t u, uint64_t v, int w) {
                y[u] += w * x[v];
                y[v] += w * x[u];
            });
        }
    }

    std::vector<double> matvec(std::span<const double> x) const {
        std::vector<double> y(dim_);
        matvec(x, y);
        return y;
    }

    double quadratic_form(std::span<const double> x) const {
        if (x.size() != dim_) throw std::invalid_argument("quadratic_form: bad length");
        if (explicit_) {
            double acc = 0;
            for (uint64_t r = 0; r < dim_; ++r) {
                double row = 0;
                for (uint64_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
                    row += static_cast<double>(vals_[p]) * x[cols_[p]];
                acc += row * x[r];
            }
            return acc;
        }
        double acc = 0;
        for_each_pair([&](uint64_t u, uint64_t v, int w) { acc += 2.0 * w * x[u] * x[v]; });
        return acc;
    }

    // Coordinate text dump `row col value` (0-based), both triangles.
    void dump_coo(std::ostream& os) const {
        for_each_pair([&](uint64_t u, uint64_t v, int w) {
            os << u << ' ' << v << ' ' << w << '\n';
            os << v << ' ' << u << ' ' << w << '\n';
        });
    }

private:
    template <class F>
    void enumerate_split(const std::vector<int>& A, const std::vector<int>& B,
                         const std::vector<int>& comp, int wlen, int w, F&& emit) const {
        int h = k_ / 2;
        const uint64_t* ct = ct_.data();
        const int L = ell_;
        // Recursive enumeration of W with incremental combinadic ranks.
        // State: next complement index, elements left to pick, flush pointers
        // into A/B, placed counts and partial ranks for U and V.
        auto rec = [&](auto&& self, int start, int rem, int aU, int pU, uint64_t rU,
                       int aV, int pV, uint64_t rV) -> void {
            if (rem == 0) {
                uint64_t ru = rU, rv = rV;
                int p = pU;
                for (int i = aU; i < h; ++i) { ru += ct[static_cast<size_t>(A[i]) * L + p]; ++p; }
                p = pV;
                for (int i = aV; i < h; ++i) { rv += ct[static_cast<size_t>(B[i]) * L + p]; ++p; }
                emit(ru, rv, w);
                return;
            }
            int limit = static_cast<int>(comp.size()) - rem;
            for (int ci = start; ci <= limit; ++ci) {
                int x = comp[ci];
                while (aU < h && A[aU] < x) { rU += ct[static_cast<size_t>(A[aU]) * L + pU]; ++pU; ++aU; }
                while (aV < h && B[aV] < x) { rV += ct[static_cast<size_t>(B[aV]) * L + pV]; ++pV; ++aV; }
                self(self, ci + 1, rem - 1, aU, pU + 1, rU + ct[static_cast<size_t>(x) * L + pU],
                     aV, pV + 1, rV + ct[static_cast<size_t>(x) * L + pV]);
            }
        };
        rec(rec, 0, wlen, 0, 0, 0, 0, 0, 0);
    }

    void build_explicit() {
        double nnz_est = 2.0 * pairs_per_entry_ * static_cast<double>(tensor_.entry_count());
        std::vector<uint32_t> cu, cv;
        std::vector<int8_t> cw;
        size_t cap = static_cast<size_t>(nnz_est / 2.0 + 16);
        cu.reserve(cap);
        cv.reserve(cap);
        cw.reserve(cap);
        bool narrow = true;
        for (int wgt : tensor_.weights)
            if (wgt > 127 || wgt < -127) narrow = false;
        if (!narrow) throw std::runtime_error("Kikuchi explicit: weight exceeds int8 storage");
        for_each_pair([&](uint64_t u, uint64_t v, int w) {
            cu.push_back(static_cast<uint32_t>(u));
            cv.push_back(static_cast<uint32_t>(v));
            cw.push_back(static_cast<int8_t>(w));
        });
        size_t np = cu.size();
        row_ptr_.assign(dim_ + 1, 0);
        for (size_t p = 0; p < np; ++p) {
            ++row_ptr_[cu[p] + 1];
            ++row_ptr_[cv[p] + 1];
        }
        for (uint64_t r = 0; r < dim_; ++r) row_ptr_[r + 1] += row_ptr_[r];
        cols_.resize(2 * np);
        vals_.resize(2 * np);
        std::vector<uint64_t> fill(row_ptr_.begin(), row_ptr_.end() - 1);
        for (size_t p = 0; p < np; ++p) {
            uint64_t a = fill[cu[p]]++;
            cols_[a] = cv[p];
            vals_[a] = cw[p];
            uint64_t b = fill[cv[p]]++;
            cols_[b] = cu[p];
            vals_[b] = cw[p];
        }
    }

    void build_sigma() {
        sigma_.assign(dim_, 0);
        if (explicit_) {
            for (uint64_t r = 0; r < dim_; ++r)
                sigma_[r] = static_cast<uint32_t>(row_ptr_[r + 1] - row_ptr_[r]);
        } else {
            for_each_pair([&](uint64_t u, uint64_t v, int) {
                ++sigma_[u];
                ++sigma_[v];
            });
        }
        d_max_ = 0;
        for (uint32_t s : sigma_) d_max_ = std::max(d_max_, s);
    }

    SparseSignedTensor tensor_;
    int n_, k_, ell_;
    KikuchiConfig cfg_;
    SubsetIndexer indexer_;
    uint64_t dim_ = 0;
    double pairs_per_entry_ = 0;
    bool explicit_ = false;
    std::vector<uint64_t> ct_;
    std::vector<uint64_t> row_ptr_;
    std::vector<uint32_t> cols_;
    std::vector<float> vals_;
    std::vector<uint32_t> sigma_;
    uint32_t d_max_ = 0;
};

// Normalized spike lift z^{odot ell}: [x]_U = z_U / sqrt(C(n, ell)).
inline std::vector<double> spike_lift(const SpikeVector& z, int ell) {
    int n = z.n();
    SubsetIndexer idx(n, ell);
    uint64_t dim = idx.dim();
    std::vector<double> x(dim);
    double norm = 1.0 / std::sqrt(static_cast<double>(dim));
    std::vector<int> U(ell);
    for (int i = 0; i < ell; ++i) U[i] = i;
    for (uint64_t r = 0; r < dim; ++r) {
        int p = 1;
        for (int i : U) p *= z.values[i];
        x[r] = p * norm;
        // Advance to the next subset in combinadic order.
        int i = 0;
        while (i + 1 < ell && U[i] + 1 == U[i + 1]) ++i;
        ++U[i];
        for (int j = 0; j < i; ++j) U[j] = j;
    }
    return x;
}

// Embedded spike lift |z~> supported on the valid indices V_{N,ell,k}
// (exactly c = ell/k elements per block), normalization C(n_blk, c)^{-k/2}.
inline std::vector<double> spike_lift_embedded(const SpikeVector& z, int ell) {
    int N = z.n(), k = z.block_count, n_blk = z.block_size();
    if (ell % k != 0) throw std::invalid_argument("spike_lift_embedded: k must divide ell");
    int c = ell / k;
    SubsetIndexer idx(N, ell);
    uint64_t dim = idx.dim();
    std::vector<double> x(dim, 0.0);
    double norm = std::pow(static_cast<double>(binom(n_blk, c)), -0.5 * k);
    std::vector<int> U(ell);
    for (int i = 0; i < ell; ++i) U[i] = i;
    std::vector<int> profile(k);
    for (uint64_t r = 0; r < dim; ++r) {
        std::fill(profile.begin(), profile.end(), 0);
        for (int i : U) ++profile[i / n_blk];
        bool valid = true;
        for (int b = 0; b < k; ++b)
            if (profile[b] != c) { valid = false; break; }
        if (valid) {
            int p = 1;
            for (int i : U) p *= z.values[i];
            x[r] = p * norm;
        }
        int i = 0;
        while (i + 1 < ell && U[i] + 1 == U[i + 1]) ++i;
        ++U[i];
        for (int j = 0; j < i; ++j) U[j] = j;
    }
    return x;
}

}  // namespace kikuchi
