// Command-line front end: sampling, detection, recovery, the recovery-grid
// experiment, resource estimation, desk-scale circuit verification, and a
// classical matvec benchmark. One flat JSON config file per run; flags
// override config values, config overrides defaults; the effective config is
// echoed into every output.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <Eigen/Core>

#include "kikuchi/circuit_lib.hpp"
#include "kikuchi/guiding.hpp"
#include "kikuchi/kikuchi.hpp"
#include "kikuchi/model.hpp"
#include "kikuchi/recovery.hpp"
#include "kikuchi/resources.hpp"
#include "kikuchi/spectral.hpp"

using nlohmann::json;
using namespace kikuchi;

namespace {

struct Common {
    uint64_t seed = 2024;
    int threads = 1;
    std::string config_path;
    std::string out;
};

// Values bound to CLI11 options; config supplies any value the command line
// did not. Unknown config keys are rejected.
struct Binder {
    CLI::App* sub;
    json cfg;
    std::vector<std::string> known{"command"};

    void load(const std::string& path) {
        if (path.empty()) return;
        std::ifstream is(path);
        if (!is) throw std::runtime_error("cannot open config file: " + path);
        is >> cfg;
        if (!cfg.is_object()) throw std::runtime_error("config must be a JSON object");
    }

    template <class T>
    void apply(const std::string& flag, const std::string& key, T& value) {
        known.push_back(key);
        CLI::Option* o = sub->get_option(flag);
        if (o->count() == 0 && cfg.contains(key)) value = cfg.at(key).get<T>();
    }

    void finish() const {
        for (auto& [key, v] : cfg.items()) {
            if (std::find(known.begin(), known.end(), key) == known.end())
                throw std::runtime_error("unknown config key: " + key);
        }
    }
};

json effective_config(const Common& c, json extra) {
    extra["seed"] = c.seed;
    extra["threads"] = c.threads;
    return extra;
}

void write_text(const Common& c, const std::string& body, const json& cfg) {
    std::string payload = "# config " + cfg.dump() + "\n" + body;
    if (c.out.empty()) {
        std::cout << payload;
    } else {
        std::ofstream os(c.out);
        if (!os) throw std::runtime_error("cannot open output file: " + c.out);
        os << payload;
    }
}

void write_json(const Common& c, json doc, const json& cfg) {
    doc["config"] = cfg;
    if (c.out.empty()) {
        std::cout << doc.dump(2) << '\n';
    } else {
        std::ofstream os(c.out);
        if (!os) throw std::runtime_error("cannot open output file: " + c.out);
        os << doc.dump(2) << '\n';
    }
}

SparseSignedTensor load_tensor(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open tensor file: " + path);
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        json j;
        is >> j;
        return tensor_from_json(j);
    }
    return load_tensor_text(is);
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "root RNG seed");
    sub->add_option("--threads", c.threads, "thread count")->envname("KIKUCHI_THREADS");
    sub->add_option("--config", c.config_path, "JSON config file");
    sub->add_option("--out", c.out, "output path (default stdout)");
}

void bind_common(Binder& b, Common& c) {
    b.apply("--seed", "seed", c.seed);
    b.apply("--threads", "threads", c.threads);
    b.known.push_back("out");
    CLI::Option* o = b.sub->get_option("--out");
    if (o->count() == 0 && b.cfg.contains("out")) c.out = b.cfg.at("out").get<std::string>();
}

// ---- verify-circuits checks ----

int run_verify_circuits(int dicke_l, std::ostream& os) {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        os << (ok ? "[ok]   " : "[FAIL] ") << name << '\n';
        if (!ok) ++failures;
    };

    {  // Dicke gadget: |e1> -> |D1>, |0> -> |0>.
        int l = dicke_l;
        CircuitIR c = dicke_prep(l);
        StateVec st(c.num_qubits);
        st.set_basis(1);
        run_circuit(st, c);
        double target = 1.0 / std::sqrt(static_cast<double>(c.num_qubits));
        bool ok = true;
        for (int q = 0; q < c.num_qubits; ++q)
            ok = ok && std::abs(st.amp[1ULL << q].real() - target) < 1e-9;
        StateVec z(c.num_qubits);
        run_circuit(z, c);
        ok = ok && std::abs(std::abs(z.amp[0]) - 1.0) < 1e-9;
        check("dicke prep (l = " + std::to_string(l) + ")", ok);
    }
    {  // One-hot shuffle: accepted column has uniform 1/sqrt(c) overlaps.
        int c = 4;
        CircuitIR d = one_hot_D(c);
        bool ok = true;
        for (int j = 0; j < c; ++j) {
            StateVec st(c);
            st.set_basis(1ULL << j);
            run_circuit(st, d.inverse());
            ok = ok && std::abs(std::abs(st.amp[1].real()) - 1.0 / std::sqrt(static_cast<double>(c))) < 1e-9;
        }
        check("one-hot shuffle overlaps (c = 4)", ok);
    }
    {  // State prep matches the clause superposition with signs.
        SparseSignedTensor t;
        t.n = 5;
        t.k = 2;
        t.keys = {{0, 1}, {1, 2}, {3, 4}};
        t.weights = {1, -1, 1};
        StatePrepResult r = simulate_state_prep(t);
        double a = 1.0 / std::sqrt(3.0);
        bool ok = std::abs(r.amplitudes[0b00011] - a) < 1e-9 &&
                  std::abs(r.amplitudes[0b00110] + a) < 1e-9 &&
                  std::abs(r.amplitudes[0b11000] - a) < 1e-9;
        check("state preparation (3 clauses, n = 5)", ok);
    }
    {  // Guiding prep success equals alpha_ell c^{-ell} exactly.
        SparseSignedTensor t;
        t.n = 4;
        t.k = 2;
        t.keys = {{0, 1}, {2, 3}};
        t.weights = {1, -1};
        GuidingState g = build_guiding(t, 4);
        GuidingPrep gp = guiding_prep_circuit(t, 2);
        GuidingPrepResult r = simulate_guiding_prep(gp);
        bool ok = std::abs(r.success_conditional - g.alpha_ell * std::pow(2.0, -4.0)) < 1e-10;
        check("guiding prep success identity (c = 2)", ok);
    }
    {  // Block-encoding oracle reproduces the Kikuchi matrix.
        ProblemParams p;
        p.n = 6;
        p.k = 2;
        p.ell = 2;
        p.m_target = 9;
        p.rho = 0.7;
        p.seed = 11;
        p.mode = SampleMode::simple_signs;
        auto [t, z] = sample_planted(p);
        check("block encoding vs Kikuchi matrix", block_encoding_check(t, 2) < 1e-10);
    }
    {  // QSP rounding error stays within 2 * len * eps.
        std::vector<double> phases(24, 0.0);
        double err = qsp_rounding_error(phases, 1e-8);
        check("qsp rounding bound", err <= 2.0 * 25 * 1e-8 + 1e-15);
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kikuchi spectral method: sampling, detection, recovery, and resource estimation"};
    app.require_subcommand(1);

    // sample
    auto* s_sample = app.add_subcommand("sample", "sample a planted or random instance");
    Common c_sample;
    int sm_n = 20, sm_k = 4, sm_ell = 0;
    double sm_m = 100, sm_rho = 0;
    std::string sm_mode = "poisson", sm_format = "text", sm_spike_out;
    bool sm_asym = false;
    s_sample->add_option("--n", sm_n, "variable count");
    s_sample->add_option("--k", sm_k, "clause arity (even)");
    s_sample->add_option("--ell", sm_ell, "Kikuchi level (default k)");
    s_sample->add_option("--m", sm_m, "target clause count");
    s_sample->add_option("--rho", sm_rho, "signal strength (0 = unplanted)");
    s_sample->add_option("--mode", sm_mode, "poisson | simple");
    s_sample->add_option("--format", sm_format, "text | json");
    s_sample->add_flag("--asymmetric", sm_asym, "asymmetric model, symmetric embedding");
    s_sample->add_option("--spike-out", sm_spike_out, "also save the planted spike (JSON)");
    add_common(s_sample, c_sample);

    // detect
    auto* s_detect = app.add_subcommand("detect", "spectral detection certificate");
    Common c_detect;
    std::string dt_in;
    int dt_ell = 4;
    double dt_rho = 1.0, dt_m = 0, dt_tol = 1e-6;
    s_detect->add_option("--in", dt_in, "tensor file (text or .json)")->required();
    s_detect->add_option("--ell", dt_ell, "Kikuchi level");
    s_detect->add_option("--rho", dt_rho, "assumed signal strength");
    s_detect->add_option("--m", dt_m, "clause budget (0 = weight mass)");
    s_detect->add_option("--tol", dt_tol, "eigensolver tolerance");
    add_common(s_detect, c_detect);

    // recover
    auto* s_recover = app.add_subcommand("recover", "weak recovery via the voting matrix");
    Common c_recover;
    std::string rc_in, rc_strategy = "top", rc_spike_in;
    int rc_ell = 4, rc_top = 3;
    s_recover->add_option("--in", rc_in, "tensor file (text or .json)")->required();
    s_recover->add_option("--ell", rc_ell, "Kikuchi level");
    s_recover->add_option("--strategy", rc_strategy, "top | gaussian");
    s_recover->add_option("--top-count", rc_top, "eigenvectors combined before voting");
    s_recover->add_option("--spike-in", rc_spike_in, "reference spike (JSON) for correlation");
    add_common(s_recover, c_recover);

    // fig2
    auto* s_fig2 = app.add_subcommand("fig2", "recovery-grid experiment (CSV)");
    Common c_fig2;
    std::string f2_setting = "both";
    Fig2Config f2;
    s_fig2->add_option("--setting", f2_setting, "symmetric | asymmetric | both");
    s_fig2->add_option("--trials", f2.trials, "trials per cell");
    s_fig2->add_option("--n-sym", f2.n_sym, "symmetric n");
    s_fig2->add_option("--n-asym", f2.n_asym, "asymmetric n (per mode)");
    s_fig2->add_option("--rhos", f2.rhos, "rho grid");
    s_fig2->add_option("--fractions", f2.fractions, "observation-fraction grid");
    add_common(s_fig2, c_fig2);

    // estimate
    auto* s_estimate = app.add_subcommand("estimate", "quantum resource estimation");
    Common c_estimate;
    bool es_table1 = false;
    std::string es_format = "json";
    EstimatorConfig ec;
    std::vector<int> es_rows{60, 80, 100, 120};
    s_estimate->add_flag("--table1", es_table1, "emit the four-row summary CSV");
    s_estimate->add_option("--rows", es_rows, "n values for --table1");
    s_estimate->add_option("--n", ec.n, "problem size");
    s_estimate->add_option("--k", ec.k, "clause arity");
    s_estimate->add_option("--ell", ec.ell, "Kikuchi level");
    s_estimate->add_option("--rho", ec.rho, "signal strength");
    s_estimate->add_option("--m", ec.m_explicit, "explicit clause count (0 = 10 n^2 ln n)");
    s_estimate->add_option("--eps-rot", ec.eps_rot, "rotation synthesis accuracy");
    s_estimate->add_option("--format", es_format, "json | markdown (single report)");
    add_common(s_estimate, c_estimate);

    // verify-circuits
    auto* s_verify = app.add_subcommand("verify-circuits", "desk-scale circuit property checks");
    Common c_verify;
    int vc_dicke_l = 2;
    s_verify->add_option("--dicke-l", vc_dicke_l, "Dicke gadget size parameter");
    add_common(s_verify, c_verify);

    // bench
    auto* s_bench = app.add_subcommand("bench", "classical matvec timing vs FLOPs model");
    Common c_bench;
    int bn_n = 20, bn_k = 4, bn_ell = 6, bn_reps = 3;
    double bn_m = 1000, bn_rho = 0.5;
    s_bench->add_option("--n", bn_n, "problem size");
    s_bench->add_option("--k", bn_k, "clause arity");
    s_bench->add_option("--ell", bn_ell, "Kikuchi level");
    s_bench->add_option("--m", bn_m, "clause count");
    s_bench->add_option("--rho", bn_rho, "signal strength");
    s_bench->add_option("--reps", bn_reps, "matvec repetitions");
    add_common(s_bench, c_bench);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*s_sample) {
            Common& c = c_sample;
            Binder b{s_sample};
            b.load(c.config_path);
            b.apply("--n", "n", sm_n);
            b.apply("--k", "k", sm_k);
            b.apply("--ell", "ell", sm_ell);
            b.apply("--m", "m", sm_m);
            b.apply("--rho", "rho", sm_rho);
            b.apply("--mode", "mode", sm_mode);
            b.apply("--format", "format", sm_format);
            b.apply("--asymmetric", "asymmetric", sm_asym);
            b.apply("--spike-out", "spike_out", sm_spike_out);
            bind_common(b, c);
            b.finish();
            Eigen::setNbThreads(c.threads);
            ProblemParams p;
            p.n = sm_n;
            p.k = sm_k;
            p.ell = sm_ell > 0 ? sm_ell : sm_k;
            p.m_target = sm_m;
            p.rho = sm_rho;
            p.seed = c.seed;
            p.mode = sm_mode == "simple" ? SampleMode::simple_signs : SampleMode::poisson;
            SparseSignedTensor t;
            SpikeVector z;
            if (sm_asym) {
                auto [a, za] = sample_asymmetric_planted(p);
                t = symmetric_embed(a);
                z = za;
            } else {
                std::tie(t, z) = sample_planted(p);
            }
            json cfg = effective_config(c, {{"command", "sample"}, {"n", sm_n}, {"k", sm_k},
                                            {"m", sm_m}, {"rho", sm_rho}, {"mode", sm_mode},
                                            {"asymmetric", sm_asym}});
            if (sm_format == "json") {
                write_json(c, json{{"tensor", tensor_to_json(t)}}, cfg);
            } else {
                std::ostringstream body;
                save_tensor_text(t, body);
                write_text(c, body.str(), cfg);
            }
            if (!sm_spike_out.empty()) {
                std::ofstream os(sm_spike_out);
                if (!os) throw std::runtime_error("cannot open spike output: " + sm_spike_out);
                os << json{{"block_count", z.block_count}, {"values", z.values}}.dump(2) << '\n';
            }
            return 0;
        }

        if (*s_detect) {
            Common& c = c_detect;
            Binder b{s_detect};
            b.load(c.config_path);
            b.apply("--in", "in", dt_in);
            b.apply("--ell", "ell", dt_ell);
            b.apply("--rho", "rho", dt_rho);
            b.apply("--m", "m", dt_m);
            b.apply("--tol", "tol", dt_tol);
            bind_common(b, c);
            b.finish();
            Eigen::setNbThreads(c.threads);
            SparseSignedTensor t = load_tensor(dt_in);
            KikuchiOperator K(t, dt_ell);
            EigenOptions eopt;
            eopt.seed = c.seed;
            eopt.tol = dt_tol;
            DetectionCertificate cert = detect(K, dt_rho, dt_m, {}, eopt);
            json cfg = effective_config(c, {{"command", "detect"}, {"in", dt_in}, {"ell", dt_ell},
                                            {"rho", dt_rho}, {"m", dt_m}});
            write_json(c, certificate_to_json(cert), cfg);
            return cert.verdict == "inconclusive" ? 2 : 0;
        }

        if (*s_recover) {
            Common& c = c_recover;
            Binder b{s_recover};
            b.load(c.config_path);
            b.apply("--in", "in", rc_in);
            b.apply("--ell", "ell", rc_ell);
            b.apply("--strategy", "strategy", rc_strategy);
            b.apply("--top-count", "top_count", rc_top);
            b.apply("--spike-in", "spike_in", rc_spike_in);
            bind_common(b, c);
            b.finish();
            Eigen::setNbThreads(c.threads);
            SparseSignedTensor t = load_tensor(rc_in);
            KikuchiOperator K(t, rc_ell);
            EigenOptions eopt;
            eopt.top_count = rc_top;
            eopt.seed = Rng(c.seed).derive("recover-eig").next_u64();
            EigenResult er = lanczos_top(K, eopt);
            if (er.eigenvectors.empty()) throw std::runtime_error("eigensolver returned nothing");
            Rng g = Rng(c.seed).derive("recover-combo");
            std::vector<double> v(K.dim(), 0.0);
            for (const auto& ev : er.eigenvectors) {
                double w = g.next_gaussian();
                for (uint64_t i = 0; i < K.dim(); ++i) v[i] += w * ev[i];
            }
            double nv = 0;
            for (double x : v) nv += x * x;
            nv = std::sqrt(nv);
            if (nv > 0)
                for (double& x : v) x /= nv;
            Eigen::MatrixXd V = voting_matrix(v, t.n, rc_ell);
            SpikeVector zref;
            bool have_spike = false;
            if (!rc_spike_in.empty()) {
                std::ifstream is(rc_spike_in);
                if (!is) throw std::runtime_error("cannot open spike file: " + rc_spike_in);
                json j;
                is >> j;
                zref.block_count = j.at("block_count").get<int>();
                zref.values = j.at("values").get<std::vector<int>>();
                have_spike = true;
            }
            RecoveryStrategy strat = rc_strategy == "gaussian" ? RecoveryStrategy::gaussian_1rdm
                                                               : RecoveryStrategy::top_eigvec;
            RecoveryResult rr = weak_recover(V, c.seed, strat, have_spike ? &zref : nullptr);
            json cfg = effective_config(c, {{"command", "recover"}, {"in", rc_in}, {"ell", rc_ell},
                                            {"strategy", rc_strategy}, {"top_count", rc_top}});
            write_json(c,
                       json{{"candidate", rr.candidate},
                            {"rounded", rr.rounded},
                            {"correlation", rr.correlation},
                            {"lambda_hat", er.eigenvalues[0]},
                            {"iterations", er.iterations}},
                       cfg);
            return 0;
        }

        if (*s_fig2) {
            Common& c = c_fig2;
            Binder b{s_fig2};
            b.load(c.config_path);
            b.apply("--setting", "setting", f2_setting);
            b.apply("--trials", "trials", f2.trials);
            b.apply("--n-sym", "n_sym", f2.n_sym);
            b.apply("--n-asym", "n_asym", f2.n_asym);
            b.apply("--rhos", "rhos", f2.rhos);
            b.apply("--fractions", "fractions", f2.fractions);
            bind_common(b, c);
            b.finish();
            Eigen::setNbThreads(c.threads);
            f2.seed = c.seed;
            std::ostringstream body;
            fig2_csv_header(body);
            std::vector<bool> settings;
            if (f2_setting == "symmetric" || f2_setting == "both") settings.push_back(true);
            if (f2_setting == "asymmetric" || f2_setting == "both") settings.push_back(false);
            if (settings.empty()) throw std::runtime_error("setting must be symmetric|asymmetric|both");
            for (bool sym : settings)
                for (double rho : f2.rhos)
                    for (double frac : f2.fractions) fig2_csv_row(body, fig2_cell(sym, f2, rho, frac));
            json cfg = effective_config(c, {{"command", "fig2"}, {"setting", f2_setting},
                                            {"trials", f2.trials}, {"rhos", f2.rhos},
                                            {"fractions", f2.fractions}});
            write_text(c, body.str(), cfg);
            return 0;
        }

        if (*s_estimate) {
            Common& c = c_estimate;
            Binder b{s_estimate};
            b.load(c.config_path);
            b.apply("--table1", "table1", es_table1);
            b.apply("--rows", "rows", es_rows);
            b.apply("--n", "n", ec.n);
            b.apply("--k", "k", ec.k);
            b.apply("--ell", "ell", ec.ell);
            b.apply("--rho", "rho", ec.rho);
            b.apply("--m", "m", ec.m_explicit);
            b.apply("--eps-rot", "eps_rot", ec.eps_rot);
            b.apply("--format", "format", es_format);
            bind_common(b, c);
            b.finish();
            json cfg = effective_config(c, {{"command", "estimate"}, {"table1", es_table1},
                                            {"n", ec.n}, {"k", ec.k}, {"ell", ec.ell},
                                            {"rho", ec.rho}, {"m", ec.m_explicit}});
            if (es_table1) {
                write_text(c, emit_table1(es_rows, ec), cfg);
            } else {
                ResourceReport r = estimate(ec);
                if (es_format == "markdown")
                    write_text(c, report_to_markdown(r), cfg);
                else
                    write_json(c, report_to_json(r), cfg);
            }
            return 0;
        }

        if (*s_verify) {
            Common& c = c_verify;
            Binder b{s_verify};
            b.load(c.config_path);
            b.apply("--dicke-l", "dicke_l", vc_dicke_l);
            bind_common(b, c);
            b.finish();
            if (c.out.empty()) return run_verify_circuits(vc_dicke_l, std::cout);
            std::ofstream os(c.out);
            if (!os) throw std::runtime_error("cannot open output file: " + c.out);
            return run_verify_circuits(vc_dicke_l, os);
        }

        if (*s_bench) {
            Common& c = c_bench;
            Binder b{s_bench};
            b.load(c.config_path);
            b.apply("--n", "n", bn_n);
            b.apply("--k", "k", bn_k);
            b.apply("--ell", "ell", bn_ell);
            b.apply("--m", "m", bn_m);
            b.apply("--rho", "rho", bn_rho);
            b.apply("--reps", "reps", bn_reps);
            bind_common(b, c);
            b.finish();
            Eigen::setNbThreads(c.threads);
            ProblemParams p;
            p.n = bn_n;
            p.k = bn_k;
            p.ell = bn_ell;
            p.m_target = bn_m;
            p.rho = bn_rho;
            p.seed = c.seed;
            auto [t, z] = sample_planted(p);
            KikuchiOperator K(t, bn_ell);
            std::vector<double> x(K.dim(), 1.0 / std::sqrt(static_cast<double>(K.dim())));
            std::vector<double> y(K.dim());
            auto t0 = std::chrono::steady_clock::now();
            for (int r = 0; r < bn_reps; ++r) K.matvec(x, y);
            auto t1 = std::chrono::steady_clock::now();
            double secs = std::chrono::duration<double>(t1 - t0).count() / std::max(1, bn_reps);
            double model = 4.0 * kikuchi_edge_count(bn_n, bn_k, bn_ell, static_cast<double>(t.entry_count()));
            json cfg = effective_config(c, {{"command", "bench"}, {"n", bn_n}, {"k", bn_k},
                                            {"ell", bn_ell}, {"m", bn_m}, {"reps", bn_reps}});
            write_json(c,
                       json{{"dim", K.dim()},
                            {"entries", t.entry_count()},
                            {"seconds_per_matvec", secs},
                            {"model_flops_per_matvec", model},
                            {"implied_flops_per_second", secs > 0 ? model / secs : 0.0}},
                       cfg);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
