#pragma once

// Circuit IR over the gate set used by the appendix constructions, exact
// non-Clifford gate/depth counting, a dense statevector simulator (<= 24
// qubits), and a plain-text circuit export format.

#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace kikuchi {

enum class GateKind {
    H, X, Z, CX, CZ, CH,      // Clifford except CH
    Toffoli,                  // 1 non-Clifford unit
    MCX,                      // r controls -> r-1 Toffolis
    Givens,                   // 2-qubit rotation, angle theta
    Ry,                       // 1-qubit rotation, angle theta
};

struct Gate {
    GateKind kind;
    std::vector<int> qubits;  // controls first, target last
    double angle = 0.0;
};

struct Register {
    std::string name;
    std::string role;
    int offset = 0;
    int size = 0;
};

struct CircuitIR {
    int num_qubits = 0;
    std::vector<Register> registers;
    std::vector<Gate> gates;

    int add_register(const std::string& name, const std::string& role, int size) {
        int off = num_qubits;
        registers.push_back({name, role, off, size});
        num_qubits += size;
        return off;
    }

    void check(int q) const {
        if (q < 0 || q >= num_qubits) throw std::out_of_range("CircuitIR: qubit index");
    }
    void h(int q) { check(q); gates.push_back({GateKind::H, {q}}); }
    void x(int q) { check(q); gates.push_back({GateKind::X, {q}}); }
    void z(int q) { check(q); gates.push_back({GateKind::Z, {q}}); }
    void cx(int c, int t) { check(c); check(t); gates.push_back({GateKind::CX, {c, t}}); }
    void cz(int c, int t) { check(c); check(t); gates.push_back({GateKind::CZ, {c, t}}); }
    void ch(int c, int t) { check(c); check(t); gates.push_back({GateKind::CH, {c, t}}); }
    void toffoli(int c1, int c2, int t) {
        check(c1); check(c2); check(t);
        gates.push_back({GateKind::Toffoli, {c1, c2, t}});
    }
    void mcx(std::vector<int> controls_then_target) {
        for (int q : controls_then_target) check(q);
        int r = static_cast<int>(controls_then_target.size()) - 1;
        if (r == 0) gates.push_back({GateKind::X, std::move(controls_then_target)});
        else if (r == 1) gates.push_back({GateKind::CX, std::move(controls_then_target)});
        else if (r == 2) gates.push_back({GateKind::Toffoli, std::move(controls_then_target)});
        else gates.push_back({GateKind::MCX, std::move(controls_then_target)});
    }
    void givens(int q1, int q2, double theta) {
        check(q1); check(q2);
        gates.push_back({GateKind::Givens, {q1, q2}, theta});
    }
    void ry(int q, double theta) { check(q); gates.push_back({GateKind::Ry, {q}, theta}); }

    void append(const CircuitIR& other) {
        if (other.num_qubits > num_qubits) throw std::invalid_argument("append: qubit space too small");
        for (const Gate& g : other.gates) gates.push_back(g);
    }

    // Reverse order; self-inverse gates unchanged, rotations negated.
    CircuitIR inverse() const {
        CircuitIR inv;
        inv.num_qubits = num_qubits;
        inv.registers = registers;
        inv.gates.reserve(gates.size());
        for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
            Gate g = *it;
            if (g.kind == GateKind::Givens || g.kind == GateKind::Ry) g.angle = -g.angle;
            inv.gates.push_back(std::move(g));
        }
        return inv;
    }
};

// ---- counting ----

struct CountConfig {
    double eps_rot = 1e-10;  // rotation synthesis accuracy
};

struct CountReport {
    long long toffoli_count = 0;   // Toffoli-equivalent units (MCX decomposed)
    long long t_count = 0;         // T gates (CH = 2, rotation = ceil(log2(1/eps)))
    long long non_clifford_count = 0;  // toffoli_count + t_count
    long long depth = 0;           // non-Clifford depth, qubit-disjoint layering
    int qubit_count = 0;
    bool estimated = false;
};

inline long long rotation_t_cost(double eps) {
    return static_cast<long long>(std::ceil(std::log2(1.0 / eps)));
}

inline CountReport count_circuit(const CircuitIR& c, CountConfig cfg = {}) {
    CountReport r;
    r.qubit_count = c.num_qubits;
    long long rot = rotation_t_cost(cfg.eps_rot);
    std::vector<long long> level(c.num_qubits, 0);
    for (const Gate& g : c.gates) {
        long long units = 0;
        switch (g.kind) {
            case GateKind::Toffoli:
                r.toffoli_count += 1;
                units = 1;
                break;
            case GateKind::MCX:
                r.toffoli_count += static_cast<long long>(g.qubits.size()) - 2;
                units = static_cast<long long>(g.qubits.size()) - 2;
                break;
            case GateKind::CH:
                r.t_count += 2;
                units = 1;
                break;
            case GateKind::Givens:
            case GateKind::Ry:
                r.t_count += rot;
                units = 1;
                break;
            default:
                break;  // Clifford
        }
        long long lv = 0;
        for (int q : g.qubits) lv = std::max(lv, level[q]);
        if (units > 0) lv += 1;  // one non-Clifford layer per gate
        for (int q : g.qubits) level[q] = lv;
        r.depth = std::max(r.depth, lv);
    }
    r.non_clifford_count = r.toffoli_count + r.t_count;
    return r;
}

// ---- statevector simulation ----

struct StateVec {
    int nq = 0;
    std::vector<std::complex<double>> amp;

    explicit StateVec(int nq_) : nq(nq_) {
        if (nq_ > 24) throw std::invalid_argument("StateVec: simulator cap is 24 qubits");
        amp.assign(size_t{1} << nq_, {0.0, 0.0});
        amp[0] = 1.0;
    }

    void set_basis(uint64_t idx) {
        std::fill(amp.begin(), amp.end(), std::complex<double>{0.0, 0.0});
        amp[idx] = 1.0;
    }

    double norm() const {
        double s = 0;
        for (auto a : amp) s += std::norm(a);
        return std::sqrt(s);
    }
};

namespace detail {

inline void apply_single(StateVec& st, int q, std::complex<double> u00, std::complex<double> u01,
                         std::complex<double> u10, std::complex<double> u11) {
    uint64_t bit = 1ULL << q;
    for (uint64_t i = 0; i < st.amp.size(); ++i) {
        if (i & bit) continue;
        auto a0 = st.amp[i], a1 = st.amp[i | bit];
        st.amp[i] = u00 * a0 + u01 * a1;
        st.amp[i | bit] = u10 * a0 + u11 * a1;
    }
}

}  // namespace detail

inline void apply_gate(StateVec& st, const Gate& g) {
    const double is2 = 1.0 / std::sqrt(2.0);
    switch (g.kind) {
        case GateKind::H:
            detail::apply_single(st, g.qubits[0], is2, is2, is2, -is2);
            break;
        case GateKind::X:
            detail::apply_single(st, g.qubits[0], 0, 1, 1, 0);
            break;
        case GateKind::Z:
            detail::apply_single(st, g.qubits[0], 1, 0, 0, -1);
            break;
        case GateKind::Ry: {
            double c = std::cos(g.angle / 2.0), s = std::sin(g.angle / 2.0);
            detail::apply_single(st, g.qubits[0], c, -s, s, c);
            break;
        }
        case GateKind::CX: {
            uint64_t cb = 1ULL << g.qubits[0], tb = 1ULL << g.qubits[1];
            for (uint64_t i = 0; i < st.amp.size(); ++i)
                if ((i & cb) && !(i & tb)) std::swap(st.amp[i], st.amp[i | tb]);
            break;
        }
        case GateKind::CZ: {
            uint64_t cb = 1ULL << g.qubits[0], tb = 1ULL << g.qubits[1];
            for (uint64_t i = 0; i < st.amp.size(); ++i)
                if ((i & cb) && (i & tb)) st.amp[i] = -st.amp[i];
            break;
        }
        case GateKind::CH: {
            uint64_t cb = 1ULL << g.qubits[0], tb = 1ULL << g.qubits[1];
            for (uint64_t i = 0; i < st.amp.size(); ++i) {
                if (!(i & cb) || (i & tb)) continue;
                auto a0 = st.amp[i], a1 = st.amp[i | tb];
                st.amp[i] = is2 * (a0 + a1);
                st.amp[i | tb] = is2 * (a0 - a1);
            }
            break;
        }
        case GateKind::Toffoli:
        case GateKind::MCX: {
            uint64_t mask = 0;
            for (size_t j = 0; j + 1 < g.qubits.size(); ++j) mask |= 1ULL << g.qubits[j];
            uint64_t tb = 1ULL << g.qubits.back();
            for (uint64_t i = 0; i < st.amp.size(); ++i)
                if ((i & mask) == mask && !(i & tb)) std::swap(st.amp[i], st.amp[i | tb]);
            break;
        }
        case GateKind::Givens: {
            // On the two-qubit subspace: |10> -> a|10> + b|01>,
            // |01> -> -b|10> + a|01>, with a = cos(theta), b = sin(theta).
            double a = std::cos(g.angle), b = std::sin(g.angle);
            uint64_t b1 = 1ULL << g.qubits[0], b2 = 1ULL << g.qubits[1];
            for (uint64_t i = 0; i < st.amp.size(); ++i) {
                if ((i & b1) && !(i & b2)) {
                    uint64_t j = (i & ~b1) | b2;  // the |01> partner
                    auto a10 = st.amp[i], a01 = st.amp[j];
                    st.amp[i] = a * a10 - b * a01;
                    st.amp[j] = b * a10 + a * a01;
                }
            }
            break;
        }
    }
}

inline void run_circuit(StateVec& st, const CircuitIR& c) {
    if (c.num_qubits > st.nq) throw std::invalid_argument("run_circuit: state too small");
    for (const Gate& g : c.gates) apply_gate(st, g);
}

// ---- text export ----

inline const char* gate_name(GateKind k) {
    switch (k) {
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::Z: return "Z";
        case GateKind::CX: return "CX";
        case GateKind::CZ: return "CZ";
        case GateKind::CH: return "CH";
        case GateKind::Toffoli: return "TOFFOLI";
        case GateKind::MCX: return "MCX";
        case GateKind::Givens: return "GIVENS";
        case GateKind::Ry: return "RY";
    }
    return "?";
}

inline void export_circuit_text(const CircuitIR& c, std::ostream& os) {
    os << "# qubits " << c.num_qubits << '\n';
    for (const Register& r : c.registers)
        os << "# register " << r.name << ' ' << r.role << ' ' << r.offset << ' ' << r.size << '\n';
    for (const Gate& g : c.gates) {
        os << gate_name(g.kind);
        for (int q : g.qubits) os << ' ' << q;
        if (g.kind == GateKind::Givens || g.kind == GateKind::Ry) os << ' ' << g.angle;
        os << '\n';
    }
}

}  // namespace kikuchi
