#pragma once

// Instance sampling and representation for planted / random kXOR instances
// and spiked tensors, symmetric and asymmetric, plus the symmetric embedding
// and text/JSON serialization of tensors.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kikuchi/combinatorics.hpp"
#include "kikuchi/rng.hpp"

namespace kikuchi {

enum class SampleMode {
    poisson,       // Poissonized Skellam weights (proof model)
    simple_signs,  // m distinct subsets with +-1 signs (circuit model)
};

struct ProblemParams {
    int n = 0;
    int k = 0;
    int ell = 0;
    double m_target = 0;
    double rho = 0;
    uint64_t seed = 0;
    SampleMode mode = SampleMode::poisson;

    void validate() const {
        if (n <= 0) throw std::invalid_argument("params: n must be positive");
        if (k <= 0 || k % 2 != 0) throw std::invalid_argument("params: k must be even positive");
        if (ell <= 0 || ell > n) throw std::invalid_argument("params: need 0 < ell <= n");
        if (m_target < 0) throw std::invalid_argument("params: m_target must be nonnegative");
        if (rho < 0 || rho > 1) throw std::invalid_argument("params: rho in [0,1]");
    }
};

struct SpikeVector {
    std::vector<int> values;                 // entries in {+1,-1}; length n (or N = k*n)
    int block_count = 1;                     // k blocks of equal size in the asymmetric case

    int n() const { return static_cast<int>(values.size()); }
    int block_size() const { return n() / block_count; }
};

// Observed instance: multiset of k-subsets with net integer Skellam weights.
// Keys are sorted 0-based index lists; zero net weights are dropped.
struct SparseSignedTensor {
    int n = 0;
    int k = 0;
    bool symmetric_flag = true;  // false marks a symmetrically embedded asymmetric tensor
    std::vector<std::vector<int>> keys;  // sorted, deduplicated, lexicographically ordered
    std::vector<int> weights;            // parallel to keys, nonzero

    size_t entry_count() const { return keys.size(); }

    double abs_weight_mass() const {
        double s = 0;
        for (int w : weights) s += std::abs(w);
        return s;
    }

    // z_S = prod_{i in S} z_i
    static int parity(const SpikeVector& z, const std::vector<int>& key) {
        int p = 1;
        for (int i : key) p *= z.values[i];
        return p;
    }
};

// Ordered k-tuples over [n]^k with signed integer weights.
struct AsymmetricTensorSample {
    int n = 0;
    int k = 0;
    std::vector<std::vector<int>> keys;  // ordered tuples, 0-based
    std::vector<int> weights;

    size_t entry_count() const { return keys.size(); }
};

namespace detail {

inline std::vector<int> random_k_subset(Rng& rng, int n, int k) {
    // Partial Fisher-Yates via Floyd's algorithm.
    std::vector<int> out;
    out.reserve(k);
    for (int j = n - k; j < n; ++j) {
        int t = static_cast<int>(rng.next_below(static_cast<uint64_t>(j) + 1));
        if (std::find(out.begin(), out.end(), t) != out.end()) t = j;
        out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline SparseSignedTensor finalize(int n, int k, bool symmetric_flag,
                                   std::map<std::vector<int>, int>& acc) {
    SparseSignedTensor t;
    t.n = n;
    t.k = k;
    t.symmetric_flag = symmetric_flag;
    t.keys.reserve(acc.size());
    t.weights.reserve(acc.size());
    for (auto& [key, w] : acc) {
        if (w == 0) continue;
        t.keys.push_back(key);
        t.weights.push_back(w);
    }
    return t;
}

}  // namespace detail

inline SpikeVector random_spike(Rng rng, int n, int block_count = 1) {
    SpikeVector z;
    z.values.resize(n);
    z.block_count = block_count;
    for (int i = 0; i < n; ++i) z.values[i] = rng.next_sign();
    return z;
}

// Poisson model: M ~ Poi(m_target) draws of uniform k-subsets (equivalent to
// including each subset Poi(q) times, q = m/C(n,k)); each inclusion carries
// sign z_S * (-1)^Bern((1-rho)/2); net weights accumulated.
// simple_signs model: m_target distinct subsets without replacement, +-1.
inline std::pair<SparseSignedTensor, SpikeVector> sample_planted(const ProblemParams& p) {
    p.validate();
    Rng root(p.seed);
    SpikeVector z = random_spike(root.derive("spike"), p.n);
    Rng draw = root.derive("entries");
    std::map<std::vector<int>, int> acc;
    if (p.mode == SampleMode::poisson) {
        uint64_t M = draw.derive("count").next_poisson(p.m_target);
        Rng sub = draw.derive("subsets");
        Rng noise = draw.derive("noise");
        for (uint64_t t = 0; t < M; ++t) {
            std::vector<int> key = detail::random_k_subset(sub, p.n, p.k);
            int sign = SparseSignedTensor::parity(z, key);
            if (noise.next_bernoulli((1.0 - p.rho) / 2.0)) sign = -sign;
            acc[std::move(key)] += sign;
        }
    } else {
        uint64_t m = static_cast<uint64_t>(std::llround(p.m_target));
        double total = static_cast<double>(binom(p.n, p.k));
        if (static_cast<double>(m) > total)
            throw std::invalid_argument("simple_signs: m_target exceeds C(n,k)");
        Rng sub = draw.derive("subsets");
        Rng noise = draw.derive("noise");
        while (acc.size() < m) {
            std::vector<int> key = detail::random_k_subset(sub, p.n, p.k);
            if (acc.count(key)) continue;
            int sign = SparseSignedTensor::parity(z, key);
            if (noise.next_bernoulli((1.0 - p.rho) / 2.0)) sign = -sign;
            acc[std::move(key)] = sign;
        }
    }
    return {detail::finalize(p.n, p.k, true, acc), z};
}

inline SparseSignedTensor sample_random(const ProblemParams& p) {
    ProblemParams q = p;
    q.rho = 0;
    return sample_planted(q).first;
}

// Asymmetric model: ordered tuples in [n]^k at rate m/n^k, spike z~ = k
// independent blocks. Every tuple embeds to a distinct valid multi-index of
// sym(T), so no sampled mass is excluded.
inline std::pair<AsymmetricTensorSample, SpikeVector> sample_asymmetric_planted(const ProblemParams& p) {
    // ell refers to the embedded space of N = n*k indices here.
    ProblemParams q = p;
    q.n = p.n * p.k;
    q.validate();
    Rng root(p.seed);
    SpikeVector z = random_spike(root.derive("spike-asym"), p.n * p.k, p.k);
    Rng draw = root.derive("entries-asym");
    uint64_t M = draw.derive("count").next_poisson(p.m_target);
    Rng tup = draw.derive("tuples");
    Rng noise = draw.derive("noise");
    std::map<std::vector<int>, int> acc;
    for (uint64_t t = 0; t < M; ++t) {
        std::vector<int> key(p.k);
        int sign = 1;
        for (int b = 0; b < p.k; ++b) {
            key[b] = static_cast<int>(tup.next_below(p.n));
            sign *= z.values[b * p.n + key[b]];
        }
        if (noise.next_bernoulli((1.0 - p.rho) / 2.0)) sign = -sign;
        acc[std::move(key)] += sign;
    }
    AsymmetricTensorSample out;
    out.n = p.n;
    out.k = p.k;
    out.keys.reserve(acc.size());
    out.weights.reserve(acc.size());
    for (auto& [key, w] : acc) {
        if (w == 0) continue;
        out.keys.push_back(key);
        out.weights.push_back(w);
    }
    return {out, z};
}

// sym(T): block index map (b, j) -> b*n + j (0-based); each ordered tuple
// becomes one unordered multi-index with exactly one element per block.
inline SparseSignedTensor symmetric_embed(const AsymmetricTensorSample& t) {
    std::map<std::vector<int>, int> acc;
    for (size_t e = 0; e < t.keys.size(); ++e) {
        std::vector<int> key(t.k);
        for (int b = 0; b < t.k; ++b) key[b] = b * t.n + t.keys[e][b];
        // One index per block and blocks are disjoint ranges, so already sorted.
        acc[std::move(key)] += t.weights[e];
    }
    return detail::finalize(t.n * t.k, t.k, false, acc);
}

// ---- serialization ----

inline void save_tensor_text(const SparseSignedTensor& t, std::ostream& os) {
    os << t.n << ' ' << t.k << ' ' << (t.symmetric_flag ? 1 : 0) << '\n';
    for (size_t e = 0; e < t.keys.size(); ++e) {
        for (int i : t.keys[e]) os << (i + 1) << ' ';
        os << t.weights[e] << '\n';
    }
}

inline SparseSignedTensor load_tensor_text(std::istream& is) {
    SparseSignedTensor t;
    int sym = 1;
    // Skip leading comment lines (e.g. an embedded "# config ..." header).
    while (is.peek() == '#') is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    if (!(is >> t.n >> t.k >> sym)) throw std::runtime_error("tensor text: bad header");
    t.symmetric_flag = sym != 0;
    std::vector<int> key(t.k);
    int w;
    while (true) {
        bool ok = true;
        for (int i = 0; i < t.k; ++i) {
            if (!(is >> key[i])) { ok = false; break; }
            --key[i];
        }
        if (!ok) break;
        if (!(is >> w)) throw std::runtime_error("tensor text: truncated entry");
        t.keys.push_back(key);
        t.weights.push_back(w);
    }
    return t;
}

inline nlohmann::json tensor_to_json(const SparseSignedTensor& t) {
    nlohmann::json j;
    j["n"] = t.n;
    j["k"] = t.k;
    j["symmetric_flag"] = t.symmetric_flag;
    nlohmann::json entries = nlohmann::json::array();
    for (size_t e = 0; e < t.keys.size(); ++e) {
        std::vector<int> one_based;
        for (int i : t.keys[e]) one_based.push_back(i + 1);
        entries.push_back({{"indices", one_based}, {"weight", t.weights[e]}});
    }
    j["entries"] = std::move(entries);
    return j;
}

inline SparseSignedTensor tensor_from_json(const nlohmann::json& j) {
    SparseSignedTensor t;
    t.n = j.at("n").get<int>();
    t.k = j.at("k").get<int>();
    t.symmetric_flag = j.at("symmetric_flag").get<bool>();
    for (const auto& e : j.at("entries")) {
        std::vector<int> key = e.at("indices").get<std::vector<int>>();
        for (int& i : key) --i;
        t.keys.push_back(std::move(key));
        t.weights.push_back(e.at("weight").get<int>());
    }
    return t;
}

}  // namespace kikuchi
