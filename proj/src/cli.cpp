#include "arrayobs/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "arrayobs/decisions.hpp"
#include "arrayobs/dynamics.hpp"
#include "arrayobs/io.hpp"
#include "arrayobs/ngraph.hpp"
#include "arrayobs/spectral.hpp"

namespace arrayobs {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open '" + path + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot open '" + path + "' for writing");
    out << content;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
    } else {
        write_file(path, content);
    }
}

std::string complex_str(Complex z) {
    // display layer only: hide sub-nanoscale noise, JSON output keeps raw values
    auto clean = [](double v) { return std::abs(v) < 1e-9 ? 0.0 : v; };
    std::ostringstream os;
    os << clean(z.real()) << (clean(z.imag()) < 0 ? "-" : "+") << std::abs(clean(z.imag())) << "i";
    return os.str();
}

std::vector<PairKey> parse_pairs(const std::vector<int>& flat, int q) {
    if (flat.size() % 2 != 0) {
        throw validation_error("--pair expects two indices per occurrence");
    }
    std::vector<PairKey> pairs;
    for (std::size_t i = 0; i + 1 < flat.size(); i += 2) {
        const int k = flat[i], l = flat[i + 1];
        if (k < 1 || l < 1 || k > q || l > q) {
            throw validation_error("--pair " + std::to_string(k) + " " + std::to_string(l) +
                                   ": indices must lie in 1.." + std::to_string(q));
        }
        if (k == l) throw validation_error("--pair: indices must be distinct");
        pairs.push_back(canonical_pair(k - 1, l - 1));
    }
    return pairs;
}

std::vector<double> linspace(double t_final, int samples) {
    if (samples < 2) throw validation_error("--samples must be at least 2");
    if (!(t_final > 0.0)) throw validation_error("--t-final must be positive");
    std::vector<double> times(samples);
    for (int i = 0; i < samples; ++i) {
        times[i] = t_final * static_cast<double>(i) / static_cast<double>(samples - 1);
    }
    return times;
}

// ---- subcommand: analyze -------------------------------------------------

int run_analyze(const std::string& input, const std::vector<int>& pair_flat, bool cross_check,
                const std::string& json_out, const std::string& dot_dir) {
    const Tolerance base = Tolerance::from_env();
    const ArrayDocument doc = parse_array_document(read_file(input), base);
    const Tolerance tol = doc.tolerance.value_or(base);
    const auto pairs = parse_pairs(pair_flat, doc.system.q);

    const auto start = std::chrono::steady_clock::now();
    const AnalysisReport report = analyze(doc.system, tol, pairs, cross_check);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    std::cout << "observable: " << (report.observable ? "yes" : "no") << "\n";
    std::cout << "detectable: " << (report.detectable ? "yes" : "no") << "\n";
    std::cout << "nonderogatory: " << (report.nonderogatory ? "yes" : "no") << "\n";
    std::cout << "interconnection graph connected: "
              << (report.interconnection_connected ? "yes" : "no") << "\n";
    for (const auto& v : report.per_eigengraph) {
        std::cout << "eigengraph mu=" << complex_str(v.mu) << " alg=" << v.algebraic_mult
                  << " geo=" << v.geometric_mult << " " << (v.connected ? "connected" : "disconnected")
                  << (v.re_nonneg ? " [right-half-plane]" : "") << "\n";
    }
    for (const auto& [key, v] : report.pairwise) {
        std::cout << "pair (" << (key.first + 1) << ", " << (key.second + 1)
                  << "): observable=" << (v.pair_observable ? "yes" : "no")
                  << " detectable=" << (v.pair_detectable ? "yes" : "no")
                  << " conductance_rank=" << v.conductance_rank << "/" << report.n << "\n";
    }
    for (const auto& d : report.diagnostics) std::cout << "note: " << d << "\n";

    if (!json_out.empty()) {
        write_file(json_out, report_to_json(report, tol, wall_ms).dump(2) + "\n");
    }
    if (!dot_dir.empty()) {
        std::filesystem::create_directories(dot_dir);
        const auto eig = eig_structure(doc.system.A, tol);
        int written = 0;
        for (std::size_t sigma = 0; sigma < eig.entries.size(); ++sigma) {
            if (eig.entries[sigma].geometric_mult != 1) continue;
            const NGraph g = eigengraph(doc.system, sigma, eig);
            const std::string name = "eigengraph_" + std::to_string(sigma + 1);
            write_file(dot_dir + "/" + name + ".dot", to_dot(g, tol, name));
            ++written;
        }
        std::cout << "wrote " << written << " DOT file(s) to " << dot_dir << "\n";
    }
    return 0;
}

// ---- subcommand: effcond -------------------------------------------------

int run_effcond(const std::string& input, int k, int l, const std::string& json_out) {
    const Tolerance base = Tolerance::from_env();
    const ArrayDocument doc = parse_array_document(read_file(input), base);
    const Tolerance tol = doc.tolerance.value_or(base);
    const int q = doc.system.q;
    if (k < 1 || l < 1 || k > q || l > q) {
        throw validation_error("vertex indices must lie in 1.." + std::to_string(q));
    }
    if (k == l) throw validation_error("vertex indices must be distinct");

    const NGraph inter = interconnection_graph(doc.system);
    const auto cond = effective_conductance(inter, k - 1, l - 1, tol);
    const auto rank = numerical_rank(cond.gamma, tol);
    const double herm_residual = (cond.gamma - cond.gamma.adjoint()).norm();
    const auto eig = hermitian_eig(cond.gamma, tol);
    const double min_eig = eig.values.size() > 0 ? eig.values(0) : 0.0;

    std::cout << "effective conductance between vertices " << k << " and " << l << ":\n";
    for (Eigen::Index r = 0; r < cond.gamma.rows(); ++r) {
        std::cout << "  ";
        for (Eigen::Index c = 0; c < cond.gamma.cols(); ++c) {
            std::cout << complex_str(cond.gamma(r, c)) << (c + 1 < cond.gamma.cols() ? "  " : "");
        }
        std::cout << "\n";
    }
    std::cout << "rank: " << rank << "/" << doc.system.n << "\n";
    std::cout << "defining-equation residual: " << cond.residual << "\n";
    std::cout << "hermiticity residual: " << herm_residual << "\n";
    std::cout << "min eigenvalue: " << min_eig << "\n";

    if (!json_out.empty()) {
        nlohmann::ordered_json out;
        out["k"] = k;
        out["l"] = l;
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (Eigen::Index r = 0; r < cond.gamma.rows(); ++r) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (Eigen::Index c = 0; c < cond.gamma.cols(); ++c) {
                row.push_back({cond.gamma(r, c).real(), cond.gamma(r, c).imag()});
            }
            rows.push_back(std::move(row));
        }
        out["gamma"] = std::move(rows);
        out["rank"] = static_cast<int>(rank);
        out["residual"] = cond.residual;
        out["hermiticity_residual"] = herm_residual;
        out["min_eigenvalue"] = min_eig;
        write_file(json_out, out.dump(2) + "\n");
    }
    return 0;
}

// ---- subcommand: simulate ------------------------------------------------

int run_simulate(const std::string& input, const std::string& init_path,
                 const std::string& witness_report, const std::string& witness_label,
                 double t_final, int samples, bool open_loop, const std::string& csv_out) {
    const Tolerance base = Tolerance::from_env();
    const ArrayDocument doc = parse_array_document(read_file(input), base);
    const int q = doc.system.q, n = doc.system.n;

    std::vector<CVector> x0;
    if (!init_path.empty() && !witness_report.empty()) {
        throw validation_error("--init and --init-witness are mutually exclusive");
    }
    if (!init_path.empty()) {
        x0 = parse_initial_state(read_file(init_path), q, n);
    } else if (!witness_report.empty()) {
        x0 = witness_from_report(read_file(witness_report), q, n, witness_label);
    } else {
        throw validation_error("one of --init or --init-witness is required");
    }

    const auto times = linspace(t_final, samples);
    if (doc.oscillator && !open_loop) {
        const auto traj = simulate_coupled(*doc.oscillator, x0, times);
        const auto energy = lyapunov_energy(*doc.oscillator, traj);
        emit(csv_out, trajectory_to_csv(traj, &energy));
    } else {
        emit(csv_out, trajectory_to_csv(simulate(doc.system, x0, times)));
    }
    return 0;
}

// ---- subcommand: gen -----------------------------------------------------

double next_unit(std::mt19937_64& rng) {
    // uniform in [0, 1) from the top 53 bits, identical across platforms
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double next_range(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * next_unit(rng);
}

ArrayDocument gen_oscillator(OscillatorKind kind, int p, int q, double b_const, uint64_t seed) {
    if (p < 1) throw validation_error("--p must be positive");
    if (q < 2) throw validation_error("--q must be at least 2");
    if (b_const < 0.0) throw validation_error("--b must be nonnegative");
    OscillatorSpec spec;
    spec.masses.assign(p, 1.0);
    spec.stiffness.assign(p + 1, 1.0);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < q; ++i) {
        for (int j = i + 1; j < q; ++j) {
            std::vector<double> b(p);
            for (int node = 0; node < p; ++node) {
                b[node] = b_const > 0.0 ? b_const : next_range(rng, 0.5, 1.5);
            }
            spec.conductances[{i, j}] = std::move(b);
        }
    }
    ArrayDocument doc;
    doc.oscillator = build_oscillator_array(kind, spec, q);
    doc.system = doc.oscillator->system;
    return doc;
}

ArrayDocument gen_random(int n, int q, double density, bool complex_entries, uint64_t seed) {
    if (n < 1) throw validation_error("--n must be positive");
    if (q < 2) throw validation_error("--q must be at least 2");
    if (!(density >= 0.0 && density <= 1.0)) {
        throw validation_error("--density must lie in [0, 1]");
    }
    std::mt19937_64 rng(seed);
    auto entry = [&]() {
        return complex_entries ? Complex(next_range(rng, -1, 1), next_range(rng, -1, 1))
                               : Complex(next_range(rng, -1, 1), 0.0);
    };
    CMatrix A(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) A(r, c) = entry();
    }
    std::map<PairKey, CMatrix> couplings;
    for (int i = 0; i < q; ++i) {
        for (int j = i + 1; j < q; ++j) {
            if (next_unit(rng) >= density) continue;
            const int m = 1 + static_cast<int>(next_unit(rng) * n);
            CMatrix C(m, n);
            for (int r = 0; r < m; ++r) {
                for (int c = 0; c < n; ++c) C(r, c) = entry();
            }
            couplings[{i, j}] = std::move(C);
        }
    }
    ArrayDocument doc;
    doc.system = make_array_system(q, std::move(A), std::move(couplings));
    return doc;
}

}  // namespace

int exit_code_for_current_exception() {
    try {
        throw;
    } catch (const disagreement_error& e) {
        std::cerr << "internal disagreement: " << e.what() << "\n";
        return 3;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"observability, detectability, and pairwise analysis of coupled LTI arrays"};
    app.require_subcommand(1);

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "full verdicts for an array document");
    std::string an_input, an_json, an_dot;
    std::vector<int> an_pairs;
    bool an_cross = false;
    analyze_cmd->add_option("input", an_input, "array document (JSON)")->required();
    analyze_cmd->add_option("--pair", an_pairs, "vertex pair to analyze (one-based, repeatable)")
        ->type_size(2);
    analyze_cmd->add_flag("--cross-check", an_cross, "verify verdicts through the redundant routes");
    analyze_cmd->add_option("--json", an_json, "write the JSON report here");
    analyze_cmd->add_option("--dot", an_dot, "write per-eigengraph DOT files to this directory");

    // effcond
    auto* effcond_cmd = app.add_subcommand("effcond", "effective conductance between two vertices");
    std::string ec_input, ec_json;
    int ec_k = 0, ec_l = 0;
    effcond_cmd->add_option("input", ec_input, "array document (JSON)")->required();
    effcond_cmd->add_option("k", ec_k, "first vertex (one-based)")->required();
    effcond_cmd->add_option("l", ec_l, "second vertex (one-based)")->required();
    effcond_cmd->add_option("--json", ec_json, "write the JSON result here");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "propagate the array analytically");
    std::string sim_input, sim_init, sim_witness, sim_label, sim_csv;
    double sim_tfinal = 10.0;
    int sim_samples = 101;
    bool sim_open_loop = false;
    sim_cmd->add_option("input", sim_input, "array document (JSON)")->required();
    sim_cmd->add_option("--init", sim_init, "initial state file (JSON)");
    sim_cmd->add_option("--init-witness", sim_witness,
                        "pull the initial state from a prior analyze report");
    sim_cmd->add_option("--witness-label", sim_label, "which witness to use (default: first)");
    sim_cmd->add_option("--t-final", sim_tfinal, "end of the time grid");
    sim_cmd->add_option("--samples", sim_samples, "number of grid points");
    sim_cmd->add_flag("--open-loop", sim_open_loop,
                      "ignore the oscillator coupling and propagate each system through e^{At}");
    sim_cmd->add_option("--csv", sim_csv, "write the trajectory CSV here (default: stdout)");

    // gen
    auto* gen_cmd = app.add_subcommand("gen", "generate an array document");
    std::string gen_kind, gen_out;
    int gen_p = 2, gen_q = 3, gen_n = 3;
    double gen_density = 0.6, gen_b = 0.0;
    uint64_t gen_seed = 0;
    gen_cmd->add_option("kind", gen_kind, "lc | spring | random")->required();
    gen_cmd->add_option("--p", gen_p, "oscillator nodes per system");
    gen_cmd->add_option("--q", gen_q, "number of systems");
    gen_cmd->add_option("--n", gen_n, "state dimension (random kind)");
    gen_cmd->add_option("--density", gen_density, "coupling density (random kind)");
    gen_cmd->add_option("--b", gen_b, "constant coupling conductance (oscillator kinds)");
    gen_cmd->add_option("--seed", gen_seed, "RNG seed");
    gen_cmd->add_flag("--complex", "draw complex entries (random kind)");
    gen_cmd->add_option("--out", gen_out, "output path (default: stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (analyze_cmd->parsed()) {
            return run_analyze(an_input, an_pairs, an_cross, an_json, an_dot);
        }
        if (effcond_cmd->parsed()) {
            return run_effcond(ec_input, ec_k, ec_l, ec_json);
        }
        if (sim_cmd->parsed()) {
            return run_simulate(sim_input, sim_init, sim_witness, sim_label, sim_tfinal,
                                sim_samples, sim_open_loop, sim_csv);
        }
        if (gen_cmd->parsed()) {
            ArrayDocument doc;
            if (gen_kind == "lc") {
                doc = gen_oscillator(OscillatorKind::lc, gen_p, gen_q, gen_b, gen_seed);
            } else if (gen_kind == "spring") {
                doc = gen_oscillator(OscillatorKind::spring, gen_p, gen_q, gen_b, gen_seed);
            } else if (gen_kind == "random") {
                doc = gen_random(gen_n, gen_q, gen_density, gen_cmd->count("--complex") > 0,
                                 gen_seed);
            } else {
                throw validation_error("unknown kind '" + gen_kind + "' (expected lc|spring|random)");
            }
            emit(gen_out, serialize_array_document(doc));
            return 0;
        }
        throw validation_error("no subcommand given");
    } catch (...) {
        return exit_code_for_current_exception();
    }
}

}  // namespace arrayobs
