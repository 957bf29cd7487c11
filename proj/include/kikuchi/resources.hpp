#pragma once

// Non-asymptotic quantum resource estimation for the detection task (logical
// qubits, amplitude-amplification repetitions, per-shot gate counts/depths and
// totals), the clause-parallelization coloring, and the classical power-method
// FLOPs baseline.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kikuchi/circuit_lib.hpp"
#include "kikuchi/combinatorics.hpp"
#include "kikuchi/guiding.hpp"
#include "kikuchi/model.hpp"
#include "kikuchi/spectral.hpp"

namespace kikuchi {

// Calibration constants. Zero-valued fields are filled with calibrated
// defaults in estimate(): the repetition prefactor and the FLOPs iteration
// count are pinned at the n = 100 reference row, the QSP length at q = 594.
struct EstimatorConfig {
    int n = 100;
    int k = 4;
    int ell = 16;
    double rho = 0.25;
    double m_explicit = 0;       // 0 -> m = round(10 n^2 ln n)
    double eps_rot = 1e-10;      // rotation synthesis accuracy
    long long q_qsp = 0;         // 0 -> qsp_length default (594 at eps 1e-10)
    double L_prefactor = 0;      // 0 -> calibrated so that L(100) = 201
    long long b = 0;             // per-term oracle gate cost; 0 -> closed form (210 at k=4)
    long long b_prime = 0;       // per-term oracle depth; 0 -> closed form (60 at k=4)
    double depth_pe_calibration = 4.383;  // residual PE-depth ratio vs the reference row
    double flops_iters = 0;      // 0 -> calibrated so FLOPs(100) = 6.611e23
};

struct ResourceReport {
    int n = 0, k = 0, ell = 0, c = 0, s = 0;
    double rho = 0, m = 0;
    long long b = 0, b_prime = 0, q = 0;
    long long logical_qubits = 0;
    long long L = 0;
    double gates_state = 0, gates_pe = 0;
    double depth_state = 0;
    double depth_pe_raw = 0;  // appendix formula as printed
    double depth_pe = 0;      // raw x depth_pe_calibration (matches the table column)
    double depth_pe_calibration = 1;
    double total_gates = 0;   // L * (gates_state + gates_pe), exactly
    double total_depth = 0;   // L * (depth_state + depth_pe), exactly
    double edge_count = 0;    // E = 1/2 m C(n-k, l-k/2) C(k, k/2)
    double classical_flops = 0;
    double flops_iters = 0;
    double lambda_star = 0, random_bound = 0, degree = 0, d_max_bound = 0;
    bool estimated = false;  // oracle costs extrapolated beyond k = 4
};

inline double table1_m(int n) { return std::round(10.0 * n * n * std::log(static_cast<double>(n))); }

// QSP sequence length q = ceil(pref * (alpha/delta) * ln(1/eps)); the default
// prefactor is calibrated so the reference configuration gives q = 594.
inline long long qsp_length(double alpha_over_delta, double eps,
                            double pref = 594.0 / std::log(1e10)) {
    return static_cast<long long>(std::ceil(pref * alpha_over_delta * std::log(1.0 / eps) - 1e-9));
}

// E = 1/2 m C(n-k, l-k/2) C(k, k/2), evaluated in log space.
inline double kikuchi_edge_count(int n, int k, int ell, double m) {
    return 0.5 * m * std::exp(log_binom(n - k, ell - k / 2) + log_binom(k, k / 2));
}

inline double classical_flops(int n, int k, int ell, double m, double iters) {
    return iters * 4.0 * kikuchi_edge_count(n, k, ell, m);
}

inline ResourceReport estimate(EstimatorConfig cfg) {
    if (cfg.ell % cfg.k != 0) throw std::invalid_argument("estimate: k must divide ell");
    ResourceReport r;
    r.n = cfg.n;
    r.k = cfg.k;
    r.ell = cfg.ell;
    r.rho = cfg.rho;
    r.c = cfg.ell / cfg.k;
    r.m = cfg.m_explicit > 0 ? cfg.m_explicit : table1_m(cfg.n);
    r.s = static_cast<int>(std::ceil(std::log2(r.m)));
    double log2e = std::log2(1.0 / cfg.eps_rot);

    OracleCosts oc = oracle_costs(cfg.k);
    r.b = cfg.b > 0 ? cfg.b : oc.per_term_cost_b;
    r.b_prime = cfg.b_prime > 0 ? cfg.b_prime : oc.per_term_depth_bp;
    r.estimated = cfg.b == 0 && cfg.k != 4;

    // Qubits: c data registers of n plus n/4 clause-parallel index registers
    // of s + 1 qubits each.
    r.logical_qubits = static_cast<long long>(r.c) * cfg.n +
                       static_cast<long long>((cfg.n + 3) / 4) * (r.s + 1);

    double pref = cfg.L_prefactor;
    if (pref <= 0) {
        // Pin L = 201 at the n = 100 reference row of the same (k, ell).
        double ratio = std::exp((log_binom(100, cfg.k) - std::log(table1_m(100))) * cfg.ell / (2.0 * cfg.k));
        pref = 201.0 / ratio;
    }
    r.L = amp_amp_reps(cfg.n, cfg.k, cfg.ell, r.m, pref);

    r.q = cfg.q_qsp > 0 ? cfg.q_qsp : qsp_length(1.0, cfg.eps_rot);

    double cl2 = std::pow(static_cast<double>(r.c), cfg.ell / 2.0);
    double mn = r.m / cfg.n;
    r.gates_state = 2.0 * cl2 * (r.c * r.m * (cfg.k + r.s) + (10.0 * r.m + 2.0 * r.c * (cfg.n - 1))) +
                    cfg.n * log2e;
    r.gates_pe = static_cast<double>(r.q) *
                 (4.0 * r.m * r.b + 7.0 * cfg.n - 2.0 + 3.0 * log2e);
    r.depth_state = 2.0 * cl2 * (4.0 * mn * (std::log2(static_cast<double>(cfg.k)) + std::log2(static_cast<double>(r.s))) +
                                 (24.0 * cfg.n + 2.0 * std::log2(r.c * (cfg.n - 1.0)))) +
                    log2e;
    r.depth_pe_raw = static_cast<double>(r.q) *
                     (4.0 * mn * r.b_prime + 3.0 * std::log2(cfg.n - 1.0) + 2.0 + 3.0 * log2e);
    r.depth_pe_calibration = cfg.depth_pe_calibration;
    r.depth_pe = r.depth_pe_raw * r.depth_pe_calibration;

    r.total_gates = static_cast<double>(r.L) * (r.gates_state + r.gates_pe);
    r.total_depth = static_cast<double>(r.L) * (r.depth_state + r.depth_pe);

    r.edge_count = kikuchi_edge_count(cfg.n, cfg.k, cfg.ell, r.m);
    double iters = cfg.flops_iters;
    if (iters <= 0)
        iters = 6.611e23 / (4.0 * kikuchi_edge_count(100, cfg.k, cfg.ell, table1_m(100)));
    r.flops_iters = iters;
    r.classical_flops = classical_flops(cfg.n, cfg.k, cfg.ell, r.m, iters);

    KikuchiStats st = kikuchi_stats(cfg.n, cfg.k, cfg.ell, r.m);
    DetectionThresholds th = detection_thresholds(cfg.n, cfg.k, cfg.ell, r.m, cfg.rho);
    r.degree = st.d;
    r.d_max_bound = st.Delta;
    r.lambda_star = th.lambda_star;
    r.random_bound = th.random_bound;
    return r;
}

inline nlohmann::json report_to_json(const ResourceReport& r) {
    return nlohmann::json{
        {"n", r.n}, {"k", r.k}, {"ell", r.ell}, {"c", r.c}, {"s", r.s},
        {"rho", r.rho}, {"m", r.m}, {"b", r.b}, {"b_prime", r.b_prime}, {"q_qsp", r.q},
        {"logical_qubits", r.logical_qubits}, {"repetitions", r.L},
        {"gates_state", r.gates_state}, {"gates_pe", r.gates_pe},
        {"depth_state", r.depth_state}, {"depth_pe_raw", r.depth_pe_raw},
        {"depth_pe", r.depth_pe}, {"depth_pe_calibration", r.depth_pe_calibration},
        {"total_gates", r.total_gates}, {"total_depth", r.total_depth},
        {"edge_count", r.edge_count}, {"flops_iters", r.flops_iters},
        {"classical_flops", r.classical_flops},
        {"lambda_star", r.lambda_star}, {"random_bound", r.random_bound},
        {"degree", r.degree}, {"d_max_bound", r.d_max_bound},
        {"estimated", r.estimated}};
}

inline std::string report_to_markdown(const ResourceReport& r) {
    std::ostringstream os;
    os << "| quantity | value |\n|---|---|\n";
    os << "| n | " << r.n << " |\n| m | " << r.m << " |\n";
    os << "| logical qubits | " << r.logical_qubits << " |\n";
    os << "| amp. amp. repetitions | " << r.L << " |\n";
    os << "| gates (state prep, per shot) | " << r.gates_state << " |\n";
    os << "| gates (phase estimation, per shot) | " << r.gates_pe << " |\n";
    os << "| depth (state prep, per shot) | " << r.depth_state << " |\n";
    os << "| depth (phase estimation, per shot) | " << r.depth_pe << " |\n";
    os << "| total gates | " << r.total_gates << " |\n";
    os << "| total depth | " << r.total_depth << " |\n";
    os << "| classical FLOPs | " << r.classical_flops << " |\n";
    return os.str();
}

// Four-row summary mirroring the published resource table, CSV.
inline std::string emit_table1(const std::vector<int>& n_list = {60, 80, 100, 120},
                               EstimatorConfig base = {}) {
    std::ostringstream os;
    os << "n,Logical Qubits,Amp. amp. Repetitions,Depth PE x10^9,Depth State x10^9,"
          "Gates PE x10^12,Gates State x10^12,Total Depth x10^12,Total Gates x10^15,"
          "Classical FLOPs x10^20\n";
    os.precision(4);
    for (int n : n_list) {
        EstimatorConfig c = base;
        c.n = n;
        c.m_explicit = 0;
        ResourceReport r = estimate(c);
        os << n << ',' << r.logical_qubits << ',' << r.L << ','
           << r.depth_pe / 1e9 << ',' << r.depth_state / 1e9 << ','
           << r.gates_pe / 1e12 << ',' << r.gates_state / 1e12 << ','
           << r.total_depth / 1e12 << ',' << r.total_gates / 1e15 << ','
           << r.classical_flops / 1e20 << '\n';
    }
    return os.str();
}

// ---- clause parallelization ----

struct ClauseColoring {
    int color_count = 0;
    std::vector<std::vector<uint32_t>> schedule;  // clause indices per color
};

namespace detail {

// First-fit pass over clauses in the given order; per-variable color bitsets.
inline int first_fit_pass(const SparseSignedTensor& t, const std::vector<uint32_t>& order,
                          std::vector<int>& col) {
    std::vector<std::vector<uint64_t>> used(t.n);
    size_t maxc = 0;
    for (uint32_t e : order) {
        const auto& key = t.keys[e];
        size_t color = 0;
        for (size_t w = 0;; ++w) {
            uint64_t merged = 0;
            for (int x : key)
                if (w < used[x].size()) merged |= used[x][w];
            if (merged != ~0ULL) {
                color = w * 64 + static_cast<size_t>(__builtin_ctzll(~merged));
                break;
            }
        }
        for (int x : key) {
            if (used[x].size() <= color / 64) used[x].resize(color / 64 + 1, 0);
            used[x][color / 64] |= 1ULL << (color % 64);
        }
        col[e] = static_cast<int>(color);
        maxc = std::max(maxc, color + 1);
    }
    return static_cast<int>(maxc);
}

}  // namespace detail

// Iterated-greedy coloring of the clause-conflict graph (clauses adjacent iff
// they share a variable): first-fit seeded by descending max variable degree,
// then a few recoloring passes over permuted color classes. Class-grouped
// recoloring never increases the color count and typically lands within a few
// percent of the 4m/n degree bound.
inline ClauseColoring clause_coloring(const SparseSignedTensor& t, int passes = 6) {
    size_t m = t.entry_count();
    std::vector<int> deg(t.n, 0);
    for (const auto& key : t.keys)
        for (int x : key) deg[x]++;
    std::vector<uint32_t> order(m);
    std::iota(order.begin(), order.end(), 0u);
    auto max_deg = [&](uint32_t e) {
        int s = 0;
        for (int x : t.keys[e]) s = std::max(s, deg[x]);
        return s;
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](uint32_t a, uint32_t b) { return max_deg(a) > max_deg(b); });
    std::vector<int> col(m, 0);
    int c = detail::first_fit_pass(t, order, col);
    Rng rng(20240913);
    for (int pass = 0; pass < passes; ++pass) {
        std::vector<std::vector<uint32_t>> cls(c);
        for (uint32_t e = 0; e < m; ++e) cls[col[e]].push_back(e);
        std::vector<int> corder(c);
        std::iota(corder.begin(), corder.end(), 0);
        if (pass % 3 == 0) {
            std::reverse(corder.begin(), corder.end());
        } else if (pass % 3 == 1) {
            std::stable_sort(corder.begin(), corder.end(),
                             [&](int a, int b) { return cls[a].size() < cls[b].size(); });
        } else {
            for (int i = c - 1; i > 0; --i) std::swap(corder[i], corder[rng.next_below(i + 1)]);
        }
        order.clear();
        for (int ci : corder)
            for (uint32_t e : cls[ci]) order.push_back(e);
        c = detail::first_fit_pass(t, order, col);
    }
    ClauseColoring out;
    out.color_count = c;
    out.schedule.assign(c, {});
    for (uint32_t e = 0; e < m; ++e) out.schedule[col[e]].push_back(e);
    return out;
}

inline bool coloring_valid(const SparseSignedTensor& t, const ClauseColoring& c) {
    std::vector<int> stamp(t.n, -1);
    for (size_t color = 0; color < c.schedule.size(); ++color) {
        for (uint32_t e : c.schedule[color])
            for (int x : t.keys[e]) {
                if (stamp[x] == static_cast<int>(color)) return false;
                stamp[x] = static_cast<int>(color);
            }
    }
    size_t total = 0;
    for (const auto& g : c.schedule) total += g.size();
    return total == t.entry_count();
}

}  // namespace kikuchi
