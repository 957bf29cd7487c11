#pragma once

// Constructors for the appendix circuits: Dicke state preparation (Alg. 1),
// the one-hot shuffle D^c_1, clause state preparation, the guiding-state
// preparation pipeline with postselection, the block-encoding oracle model
// (decorated-permutation semantics + closed-form counts), and QSP response /
// rounding-error evaluation.

#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "kikuchi/circuits.hpp"
#include "kikuchi/combinatorics.hpp"
#include "kikuchi/kikuchi.hpp"
#include "kikuchi/model.hpp"

namespace kikuchi {

// ---- Dicke preparation (Alg. 1) over 2^l qubits ----
// The returned circuit C maps |e_1> to the Dicke state |D_1^{(2^l)}> and
// fixes |0...0>; its inverse is the decoder U with U|D_1> = |e_1>.
inline CircuitIR dicke_prep(int l) {
    if (l < 0) throw std::invalid_argument("dicke_prep: l >= 0");
    CircuitIR c;
    c.add_register("dicke", "data", 1 << l);
    for (int i = 1; i <= l; ++i) c.ch(0, (1 << i) - 1);
    for (int i = 1; i <= l; ++i) {
        int hi = (1 << i) - 1;
        for (int j = 0; j <= (1 << (i - 1)) - 2; ++j) {
            int t = (1 << (i - 1)) + j;
            // Unitary V gadget: Toffoli then two cleanup CNOTs.
            c.toffoli(hi, j, t);
            c.cx(t, j);
            c.cx(t, hi);
        }
        c.cx(hi, (1 << (i - 1)) - 1);
    }
    return c;
}

// ---- one-hot shuffle ----
// D = prod_{i=1}^{c-1} G_{i,i+1}(1/sqrt(c+1-i)) spreads |e_1> uniformly over
// the c one-hot states. one_hot_shuffle returns D^dagger, whose accepted
// branch (|e_1>) has probability exactly 1/c from any one-hot input.
inline CircuitIR one_hot_D(int c) {
    if (c < 1) throw std::invalid_argument("one_hot_D: c >= 1");
    CircuitIR circ;
    circ.add_register("group", "data", c);
    for (int i = 1; i <= c - 1; ++i)
        circ.givens(i - 1, i, std::acos(1.0 / std::sqrt(static_cast<double>(c + 1 - i))));
    return circ;
}

inline CircuitIR one_hot_shuffle(int c) { return one_hot_D(c).inverse(); }

// ---- clause state preparation ----

namespace detail {

inline void pattern_mcx(CircuitIR& c, const std::vector<int>& controls, uint64_t pattern, int target) {
    for (size_t j = 0; j < controls.size(); ++j)
        if (!((pattern >> j) & 1)) c.x(controls[j]);
    std::vector<int> q(controls);
    q.push_back(target);
    c.mcx(q);
    for (size_t j = 0; j < controls.size(); ++j)
        if (!((pattern >> j) & 1)) c.x(controls[j]);
}

inline int index_bits(size_t m) {
    int s = 0;
    while ((size_t{1} << s) < m) ++s;
    return s;
}

// Emit the |phi> preparation onto existing registers at the given offsets.
inline void state_prep_into(CircuitIR& c, const SparseSignedTensor& t, int idx_off, int data_off) {
    size_t m = t.entry_count();
    if (m == 0) throw std::invalid_argument("state_prep: empty tensor");
    for (int w : t.weights)
        if (w != 1 && w != -1) throw std::invalid_argument("state_prep: entries must be +-1");
    int s = index_bits(m);
    std::vector<int> idx(s);
    for (int j = 0; j < s; ++j) idx[j] = idx_off + j;
    for (int j = 0; j < s; ++j) c.h(idx[j]);
    // U_{i -> S_i}: write clause bits and the sign, controlled on index = i.
    for (size_t i = 0; i < m; ++i) {
        for (int v : t.keys[i]) pattern_mcx(c, idx, i, data_off + v);
        if (t.weights[i] == -1) {
            // Multi-controlled Z via H-MCX-H on a data qubit that is |1> on
            // the matched branch only.
            int tq = data_off + t.keys[i][0];
            c.h(tq);
            pattern_mcx(c, idx, i, tq);
            c.h(tq);
        }
    }
    // U_{S_i -> i}: erase the index, controlled on data = S_i.
    for (size_t i = 0; i < m; ++i) {
        std::vector<int> ctrl;
        for (int v : t.keys[i]) ctrl.push_back(data_off + v);
        for (int j = 0; j < s; ++j) {
            if ((i >> j) & 1) {
                std::vector<int> q(ctrl);
                q.push_back(idx[j]);
                c.mcx(q);
            }
        }
    }
}

}  // namespace detail

// Single-copy preparation of |phi> = sum_S T_S |S> / sqrt(m) on the branch
// where the s-qubit index register returns to |0>.
inline CircuitIR state_prep_circuit(const SparseSignedTensor& t) {
    CircuitIR c;
    int s = detail::index_bits(t.entry_count());
    int idx_off = c.add_register("idx", "index", s);
    int data_off = c.add_register("data", "data", t.n);
    detail::state_prep_into(c, t, idx_off, data_off);
    return c;
}

struct StatePrepResult {
    double success_prob = 0;            // P(index register = 0)
    std::vector<double> amplitudes;     // accepted branch over n-bit data patterns (real here)
};

inline StatePrepResult simulate_state_prep(const SparseSignedTensor& t) {
    CircuitIR c = state_prep_circuit(t);
    int s = c.registers[0].size, n = t.n;
    StateVec st(c.num_qubits);
    run_circuit(st, c);
    StatePrepResult res;
    res.amplitudes.assign(size_t{1} << n, 0.0);
    uint64_t idx_mask = (s == 0) ? 0 : ((1ULL << s) - 1);
    double p = 0;
    for (uint64_t i = 0; i < st.amp.size(); ++i) {
        if ((i & idx_mask) != 0) continue;
        double re = st.amp[i].real();
        p += std::norm(st.amp[i]);
        res.amplitudes[i >> s] = re;
    }
    res.success_prob = p;
    double nn = std::sqrt(p);
    if (nn > 0)
        for (double& a : res.amplitudes) a /= nn;
    return res;
}

// ---- guiding-state preparation pipeline ----

struct GuidingPrep {
    CircuitIR circuit;
    int n = 0, k = 0, c = 0, s = 0;
    size_t m = 0;
    std::vector<int> idx_qubits;    // must postselect to 0
    std::vector<int> junk_qubits;   // group members 2..c, must postselect to 0
    std::vector<int> output_qubits; // group member 1 per variable, holds the union
};

inline GuidingPrep guiding_prep_circuit(const SparseSignedTensor& t, int c) {
    GuidingPrep gp;
    gp.n = t.n;
    gp.k = t.k;
    gp.c = c;
    gp.m = t.entry_count();
    gp.s = detail::index_bits(gp.m);
    int span = gp.s + t.n;
    for (int j = 0; j < c; ++j) {
        gp.circuit.add_register("idx" + std::to_string(j), "index", gp.s);
        gp.circuit.add_register("data" + std::to_string(j), "data", t.n);
    }
    for (int j = 0; j < c; ++j) {
        detail::state_prep_into(gp.circuit, t, j * span, j * span + gp.s);
        for (int b = 0; b < gp.s; ++b) gp.idx_qubits.push_back(j * span + b);
    }
    // Regroup: variable v across copies forms a c-qubit group; apply D^dagger.
    CircuitIR dshuf = one_hot_shuffle(c);
    for (int v = 0; v < t.n; ++v) {
        std::vector<int> group(c);
        for (int j = 0; j < c; ++j) group[j] = j * span + gp.s + v;
        for (const Gate& g : dshuf.gates) {
            Gate mapped = g;
            for (int& q : mapped.qubits) q = group[q];
            gp.circuit.gates.push_back(mapped);
        }
        gp.output_qubits.push_back(group[0]);
        for (int j = 1; j < c; ++j) gp.junk_qubits.push_back(group[j]);
    }
    return gp;
}

struct GuidingPrepResult {
    double success_raw = 0;          // P(all postselections pass)
    double success_conditional = 0;  // conditioned on the dense-index branch (m/2^s per copy)
    std::vector<double> amplitudes;  // accepted state over n-bit union patterns, unit norm
};

inline GuidingPrepResult simulate_guiding_prep(const GuidingPrep& gp) {
    StateVec st(gp.circuit.num_qubits);
    run_circuit(st, gp.circuit);
    uint64_t zero_mask = 0;
    for (int q : gp.idx_qubits) zero_mask |= 1ULL << q;
    for (int q : gp.junk_qubits) zero_mask |= 1ULL << q;
    GuidingPrepResult res;
    res.amplitudes.assign(size_t{1} << gp.n, 0.0);
    for (uint64_t i = 0; i < st.amp.size(); ++i) {
        if ((i & zero_mask) != 0) continue;
        uint64_t pattern = 0;
        for (int v = 0; v < gp.n; ++v)
            if (i & (1ULL << gp.output_qubits[v])) pattern |= 1ULL << v;
        res.success_raw += std::norm(st.amp[i]);
        res.amplitudes[pattern] += st.amp[i].real();
    }
    double branch = std::pow(static_cast<double>(gp.m) / std::pow(2.0, gp.s), gp.c);
    res.success_conditional = branch > 0 ? res.success_raw / branch : 0.0;
    double nn = std::sqrt(res.success_raw);
    if (nn > 0)
        for (double& a : res.amplitudes) a /= nn;
    return res;
}

// ---- block-encoding oracle model ----
// Semantic (decorated-permutation) model of O_A / O_E / O_H: per column U,
// the adjacent clauses in fixed order define V(k, U) and the rotation
// amplitude; the dense b-qubit register contributes 2^{-b}.

class OracleModel {
public:
    OracleModel(const SparseSignedTensor& t, int ell) : t_(t), ell_(ell), idx_(t.n, ell) {
        int h = t.k / 2;
        neighbors_.resize(idx_.dim());
        std::vector<int> U(ell);
        for (uint64_t r = 0; r < idx_.dim(); ++r) {
            idx_.unrank(r, U);
            std::vector<char> in(t.n, 0);
            for (int x : U) in[x] = 1;
            for (size_t e = 0; e < t.keys.size(); ++e) {
                int overlap = 0;
                for (int x : t.keys[e]) overlap += in[x];
                if (overlap == h) neighbors_[r].push_back(static_cast<int>(e));
            }
        }
        d_max_ = 0;
        for (auto& nb : neighbors_) d_max_ = std::max<uint32_t>(d_max_, nb.size());
        b_ = 0;
        while ((1u << b_) < std::max<uint32_t>(d_max_, 1)) ++b_;
    }

    int sigma(uint64_t u) const { return static_cast<int>(neighbors_[u].size()); }
    uint32_t d_max() const { return d_max_; }
    int b() const { return b_; }
    uint64_t dim() const { return idx_.dim(); }

    // O_A: |kk, U> -> |V(kk, U), U> for 1 <= kk <= sigma(U); identity otherwise.
    uint64_t oA(int kk, uint64_t u) const {
        if (kk < 1 || kk > sigma(u)) return u;
        return flip(u, neighbors_[u][kk - 1]);
    }

    // O_E amplitude on the flag-0 branch: the clause weight (|w| <= 1 required).
    double entry(int kk, uint64_t u) const {
        if (kk < 1 || kk > sigma(u)) return 0.0;
        int w = t_.weights[neighbors_[u][kk - 1]];
        if (w != 1 && w != -1) throw std::invalid_argument("OracleModel: entries must be +-1");
        return static_cast<double>(w);
    }

    // Net block-encoded matrix: <0,0,V|U_K|0,0,U> summed over the dense
    // register, i.e. K_{V,U} / 2^b evaluated from the oracle semantics.
    Eigen::MatrixXd block_encoding_matrix() const {
        uint64_t dim = idx_.dim();
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
        double scale = std::pow(2.0, -b_);
        for (uint64_t u = 0; u < dim; ++u)
            for (int kk = 1; kk <= sigma(u); ++kk)
                M(oA(kk, u), u) += entry(kk, u) * scale;
        return M;
    }

private:
    uint64_t flip(uint64_t u, int clause) const {
        std::vector<int> U = idx_.unrank(u);
        std::vector<char> in(t_.n, 0);
        for (int x : U) in[x] = 1;
        for (int x : t_.keys[clause]) in[x] ^= 1;
        std::vector<int> V;
        for (int x = 0; x < t_.n; ++x)
            if (in[x]) V.push_back(x);
        return idx_.rank(V);
    }

    SparseSignedTensor t_;
    int ell_;
    SubsetIndexer idx_;
    std::vector<std::vector<int>> neighbors_;
    uint32_t d_max_ = 0;
    int b_ = 0;
};

// Max deviation |<0,0,V|U_K|0,0,U> - K_{V,U}/2^b| over all (U, V).
inline double block_encoding_check(const SparseSignedTensor& t, int ell) {
    OracleModel om(t, ell);
    KikuchiOperator K(t, ell);
    Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(om.dim(), om.dim());
    K.for_each_pair([&](uint64_t u, uint64_t v, int w) {
        ref(u, v) += w;
        ref(v, u) += w;
    });
    ref *= std::pow(2.0, -om.b());
    return (om.block_encoding_matrix() - ref).cwiseAbs().maxCoeff();
}

// Closed-form oracle gate costs (appendix figures; exact for k = 4,
// extrapolated and flagged otherwise).
struct OracleCosts {
    long long p_i_toffolis = 0;
    long long p_i_depth = 0;
    long long per_term_cost_b = 0;    // b
    long long per_term_depth_bp = 0;  // b'
    bool estimated = false;
};

inline OracleCosts oracle_costs(int k) {
    OracleCosts oc;
    // Incrementor on 7 counter qubits: 21 Toffolis, depth 6. Hamming check:
    // C(k, k/2) patterns, 2 Toffolis each, computed and uncomputed.
    long long ham = 2 * 2 * static_cast<long long>(binom(k, k / 2));
    oc.p_i_toffolis = 21 + ham;
    oc.p_i_depth = 6 + static_cast<long long>(k) * (k - 1) / 2 + 1;
    oc.per_term_cost_b = 4 * oc.p_i_toffolis + 30;
    oc.per_term_depth_bp = 4 * oc.p_i_depth + 8;
    oc.estimated = (k != 4);
    return oc;
}

// ---- QSP ----

inline Eigen::Matrix2cd qsp_signal(double a) {
    std::complex<double> i(0.0, 1.0);
    double s = std::sqrt(std::max(0.0, 1.0 - a * a));
    Eigen::Matrix2cd W;
    W << a, i * s, i * s, a;
    return W;
}

// U(a) = W(a) * prod_{j=1}^{L} ( e^{i phi_j Z} W(a) ).
inline Eigen::Matrix2cd qsp_unitary(const std::vector<double>& phases, double a) {
    Eigen::Matrix2cd U = qsp_signal(a);
    std::complex<double> i(0.0, 1.0);
    for (double phi : phases) {
        Eigen::Matrix2cd Z;
        Z << std::exp(i * phi), 0.0, 0.0, std::exp(-i * phi);
        U = U * Z * qsp_signal(a);
    }
    return U;
}

inline std::complex<double> qsp_response(const std::vector<double>& phases, double a) {
    return qsp_unitary(phases, a)(0, 0);
}

inline double op_norm(const Eigen::Matrix2cd& M) {
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(M);
    return svd.singularValues()(0);
}

// Round every phase to the nearest multiple of 2*eps and report the largest
// operator-norm deviation over a signal grid. Triangle inequality bounds it
// by 2 * len(phases) * eps.
inline double qsp_rounding_error(const std::vector<double>& phases, double eps, int grid = 41) {
    std::vector<double> rounded(phases);
    for (double& p : rounded) p = 2.0 * eps * std::round(p / (2.0 * eps));
    double worst = 0;
    for (int g = 0; g < grid; ++g) {
        double a = -1.0 + 2.0 * g / (grid - 1);
        worst = std::max(worst, op_norm(qsp_unitary(phases, a) - qsp_unitary(rounded, a)));
    }
    return worst;
}

}  // namespace kikuchi
