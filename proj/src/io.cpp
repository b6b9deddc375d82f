#include "arrayobs/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace arrayobs {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

double number_at(const json& node, const std::string& where) {
    if (!node.is_number()) {
        throw validation_error(where + ": expected a number");
    }
    const double v = node.get<double>();
    if (!std::isfinite(v)) throw validation_error(where + ": value must be finite");
    return v;
}

Complex complex_at(const json& node, const std::string& where) {
    if (!node.is_array() || node.size() != 2) {
        throw validation_error(where + ": expected a two-element [re, im] array");
    }
    return Complex(number_at(node[0], where + "[0]"), number_at(node[1], where + "[1]"));
}

CMatrix matrix_at(const json& node, const std::string& where, Eigen::Index expect_cols = -1) {
    if (!node.is_array() || node.empty()) {
        throw validation_error(where + ": expected a nonempty array of rows");
    }
    const Eigen::Index rows = static_cast<Eigen::Index>(node.size());
    Eigen::Index cols = -1;
    CMatrix M;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = node[r];
        const std::string row_where = where + " row " + std::to_string(r + 1);
        if (!row.is_array()) throw validation_error(row_where + ": expected an array");
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
            if (expect_cols >= 0 && cols != expect_cols) {
                throw validation_error(row_where + ": has " + std::to_string(cols) +
                                       " entries, expected " + std::to_string(expect_cols));
            }
            M.resize(rows, cols);
        } else if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw validation_error(row_where + ": has " + std::to_string(row.size()) +
                                   " entries, expected " + std::to_string(cols));
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            M(r, c) = complex_at(row[c], row_where + " col " + std::to_string(c + 1));
        }
    }
    return M;
}

ordered_json complex_to_json(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json matrix_to_json(const CMatrix& M) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(complex_to_json(M(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

int index_at(const json& node, const std::string& where, int q) {
    if (!node.is_number_integer()) throw validation_error(where + ": expected an integer index");
    const int idx = node.get<int>();
    if (idx < 1 || idx > q) {
        throw validation_error(where + ": index " + std::to_string(idx) + " out of range 1.." +
                               std::to_string(q));
    }
    return idx - 1;
}

Tolerance tolerance_from_json(const json& node, const Tolerance& base, const std::string& where) {
    if (!node.is_object()) throw validation_error(where + ": expected an object");
    Tolerance tol = base;
    for (const auto& [key, value] : node.items()) {
        const double v = number_at(value, where + "." + key);
        if (key == "rank_rtol") {
            tol.rank_rtol = v;
        } else if (key == "eig_cluster_atol") {
            tol.eig_cluster_atol = v;
        } else if (key == "psd_slack") {
            tol.psd_slack = v;
        } else if (key == "boundary_atol") {
            tol.boundary_atol = v;
        } else {
            throw validation_error(where + ": unknown field '" + key + "'");
        }
    }
    tol.validate();
    return tol;
}

ordered_json tolerance_to_json(const Tolerance& tol) {
    ordered_json out;
    out["rank_rtol"] = tol.rank_rtol;
    out["eig_cluster_atol"] = tol.eig_cluster_atol;
    out["psd_slack"] = tol.psd_slack;
    out["boundary_atol"] = tol.boundary_atol;
    return out;
}

OscillatorArray oscillator_from_json(const json& node, int q, const std::string& where) {
    if (!node.is_object()) throw validation_error(where + ": expected an object");
    if (!node.contains("kind") || !node["kind"].is_string()) {
        throw validation_error(where + ".kind: expected \"lc\" or \"spring\"");
    }
    const std::string kind_str = node["kind"].get<std::string>();
    OscillatorKind kind;
    if (kind_str == "lc") {
        kind = OscillatorKind::lc;
    } else if (kind_str == "spring") {
        kind = OscillatorKind::spring;
    } else {
        throw validation_error(where + ".kind: unknown kind '" + kind_str + "'");
    }

    OscillatorSpec spec;
    auto read_list = [&](const char* field, std::vector<double>& out) {
        if (!node.contains(field) || !node[field].is_array()) {
            throw validation_error(where + "." + field + ": expected an array of numbers");
        }
        for (std::size_t i = 0; i < node[field].size(); ++i) {
            out.push_back(
                number_at(node[field][i], where + "." + field + "[" + std::to_string(i) + "]"));
        }
    };
    read_list("masses", spec.masses);
    read_list("stiffness", spec.stiffness);

    if (!node.contains("conductances") || !node["conductances"].is_array()) {
        throw validation_error(where + ".conductances: expected an array");
    }
    for (std::size_t e = 0; e < node["conductances"].size(); ++e) {
        const json& entry = node["conductances"][e];
        const std::string entry_where = where + ".conductances[" + std::to_string(e) + "]";
        if (!entry.is_object() || !entry.contains("i") || !entry.contains("j") ||
            !entry.contains("b")) {
            throw validation_error(entry_where + ": expected {i, j, b}");
        }
        const int i = index_at(entry["i"], entry_where + ".i", q);
        const int j = index_at(entry["j"], entry_where + ".j", q);
        if (i == j) throw validation_error(entry_where + ": i and j must differ");
        std::vector<double> b;
        if (!entry["b"].is_array()) throw validation_error(entry_where + ".b: expected an array");
        for (std::size_t v = 0; v < entry["b"].size(); ++v) {
            b.push_back(number_at(entry["b"][v], entry_where + ".b[" + std::to_string(v) + "]"));
        }
        if (!spec.conductances.emplace(canonical_pair(i, j), std::move(b)).second) {
            throw validation_error(entry_where + ": duplicate pair");
        }
    }
    return build_oscillator_array(kind, spec, q);
}

ordered_json oscillator_to_json(const OscillatorArray& osc) {
    ordered_json out;
    out["kind"] = osc.kind == OscillatorKind::lc ? "lc" : "spring";
    out["masses"] = osc.spec.masses;
    out["stiffness"] = osc.spec.stiffness;
    ordered_json conds = ordered_json::array();
    for (const auto& [key, b] : osc.spec.conductances) {
        ordered_json entry;
        entry["i"] = key.first + 1;
        entry["j"] = key.second + 1;
        entry["b"] = b;
        conds.push_back(std::move(entry));
    }
    out["conductances"] = std::move(conds);
    return out;
}

json parse_json_or_throw(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {  // parse errors and number overflow alike
        throw validation_error(std::string(what) + ": " + e.what());
    }
}

}  // namespace

ArrayDocument parse_array_document(const std::string& text, const Tolerance& base) {
    const json doc = parse_json_or_throw(text, "array document");
    if (!doc.is_object()) throw validation_error("array document: top level must be an object");
    for (const char* field : {"n", "q", "A", "couplings"}) {
        if (!doc.contains(field)) {
            throw validation_error(std::string("array document: missing field '") + field + "'");
        }
    }
    if (doc.contains("version") &&
        (!doc["version"].is_number_integer() || doc["version"].get<int>() != 1)) {
        throw validation_error("array document: unsupported version");
    }
    if (!doc["n"].is_number_integer() || doc["n"].get<int>() < 1) {
        throw validation_error("n: expected a positive integer");
    }
    if (!doc["q"].is_number_integer() || doc["q"].get<int>() < 1) {
        throw validation_error("q: expected a positive integer");
    }
    const int n = doc["n"].get<int>();
    const int q = doc["q"].get<int>();

    CMatrix A = matrix_at(doc["A"], "A", n);
    if (A.rows() != n) {
        throw validation_error("A: has " + std::to_string(A.rows()) + " rows, expected " +
                               std::to_string(n));
    }

    if (!doc["couplings"].is_array()) throw validation_error("couplings: expected an array");
    std::map<PairKey, CMatrix> directed;
    for (std::size_t e = 0; e < doc["couplings"].size(); ++e) {
        const json& entry = doc["couplings"][e];
        const std::string where = "couplings[" + std::to_string(e) + "]";
        if (!entry.is_object() || !entry.contains("i") || !entry.contains("j") ||
            !entry.contains("C")) {
            throw validation_error(where + ": expected {i, j, C}");
        }
        const int i = index_at(entry["i"], where + ".i", q);
        const int j = index_at(entry["j"], where + ".j", q);
        if (i == j) {
            throw validation_error(where + ": self-coupling (i = j = " + std::to_string(i + 1) +
                                   ") is not allowed");
        }
        CMatrix C = matrix_at(entry["C"], where + ".C", n);
        if (!directed.emplace(PairKey{i, j}, std::move(C)).second) {
            throw validation_error(where + ": duplicate coupling for (i, j) = (" +
                                   std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")");
        }
    }

    ArrayDocument out;
    out.system = make_array_system(q, std::move(A), symmetrize_couplings(directed, n, q));

    if (doc.contains("tolerance")) {
        out.tolerance = tolerance_from_json(doc["tolerance"], base, "tolerance");
    }
    if (doc.contains("oscillator")) {
        out.oscillator = oscillator_from_json(doc["oscillator"], q, "oscillator");
        // the explicit matrices must agree with what the oscillator parameters produce
        const ArraySystem& rebuilt = out.oscillator->system;
        if (rebuilt.n != out.system.n ||
            (rebuilt.A - out.system.A).norm() > 1e-9 * std::max(1.0, rebuilt.A.norm())) {
            throw validation_error("oscillator: stored A does not match the oscillator parameters");
        }
        if (rebuilt.couplings.size() != out.system.couplings.size()) {
            throw validation_error("oscillator: stored couplings do not match the parameters");
        }
        for (const auto& [key, C] : rebuilt.couplings) {
            auto it = out.system.couplings.find(key);
            if (it == out.system.couplings.end() || it->second.rows() != C.rows() ||
                (it->second - C).norm() > 1e-9 * std::max(1.0, C.norm())) {
                throw validation_error("oscillator: stored coupling (" +
                                       std::to_string(key.first + 1) + ", " +
                                       std::to_string(key.second + 1) +
                                       ") does not match the parameters");
            }
        }
    }
    return out;
}

std::string serialize_array_document(const ArrayDocument& doc) {
    ordered_json out;
    out["version"] = 1;
    out["n"] = doc.system.n;
    out["q"] = doc.system.q;
    out["A"] = matrix_to_json(doc.system.A);
    ordered_json couplings = ordered_json::array();
    for (const auto& [key, C] : doc.system.couplings) {
        ordered_json entry;
        entry["i"] = key.first + 1;
        entry["j"] = key.second + 1;
        entry["C"] = matrix_to_json(C);
        couplings.push_back(std::move(entry));
    }
    out["couplings"] = std::move(couplings);
    if (doc.tolerance) out["tolerance"] = tolerance_to_json(*doc.tolerance);
    if (doc.oscillator) out["oscillator"] = oscillator_to_json(*doc.oscillator);
    return out.dump(2) + "\n";
}

ordered_json report_to_json(const AnalysisReport& report, const Tolerance& tol, double wall_ms) {
    ordered_json out;
    out["tool"]["name"] = "arrayobs";
#ifdef ARRAYOBS_VERSION
    out["tool"]["version"] = ARRAYOBS_VERSION;
#else
    out["tool"]["version"] = "dev";
#endif
    out["n"] = report.n;
    out["q"] = report.q;
    out["tolerance"] = tolerance_to_json(tol);
    out["cross_checked"] = report.cross_checked;
    out["observable"] = report.observable;
    out["detectable"] = report.detectable;
    out["nonderogatory"] = report.nonderogatory;
    out["interconnection_connected"] = report.interconnection_connected;

    ordered_json graphs = ordered_json::array();
    for (const auto& v : report.per_eigengraph) {
        ordered_json entry;
        entry["mu"] = complex_to_json(v.mu);
        entry["algebraic_mult"] = v.algebraic_mult;
        entry["geometric_mult"] = v.geometric_mult;
        entry["connected"] = v.connected;
        entry["re_nonneg"] = v.re_nonneg;
        graphs.push_back(std::move(entry));
    }
    out["eigengraphs"] = std::move(graphs);

    ordered_json pairs = ordered_json::array();
    for (const auto& [key, v] : report.pairwise) {
        ordered_json entry;
        entry["k"] = key.first + 1;
        entry["l"] = key.second + 1;
        entry["pair_observable"] = v.pair_observable;
        entry["pair_detectable"] = v.pair_detectable;
        entry["conductance_rank"] = static_cast<int>(v.conductance_rank);
        pairs.push_back(std::move(entry));
    }
    out["pairwise"] = std::move(pairs);

    ordered_json witnesses = ordered_json::array();
    for (const auto& w : report.witnesses) {
        ordered_json entry;
        entry["label"] = w.label;
        ordered_json x0 = ordered_json::array();
        for (int i = 0; i < report.q; ++i) {
            ordered_json block = ordered_json::array();
            for (int c = 0; c < report.n; ++c) {
                block.push_back(complex_to_json(w.x0(report.n * i + c)));
            }
            x0.push_back(std::move(block));
        }
        entry["x0"] = std::move(x0);
        witnesses.push_back(std::move(entry));
    }
    out["witnesses"] = std::move(witnesses);
    out["diagnostics"] = report.diagnostics;
    out["timing_ms"] = wall_ms;
    return out;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::string trajectory_to_csv(const Trajectory& traj, const std::vector<double>* energy) {
    if (energy && energy->size() != traj.times.size()) {
        throw validation_error("trajectory_to_csv: energy column length mismatch");
    }
    const std::size_t steps = traj.times.size();
    const int q = steps > 0 ? static_cast<int>(traj.states[0].size()) : 0;
    const int n = q > 0 ? static_cast<int>(traj.states[0][0].size()) : 0;

    std::ostringstream os;
    os << "t";
    for (int i = 0; i < q; ++i) {
        for (int c = 0; c < n; ++c) {
            os << ",x" << (i + 1) << "_" << (c + 1) << "_re";
            os << ",x" << (i + 1) << "_" << (c + 1) << "_im";
        }
    }
    for (const auto& [key, _] : traj.disagreement) {
        os << ",d_" << (key.first + 1) << "_" << (key.second + 1);
    }
    for (const auto& [key, _] : traj.outputs) {
        os << ",y_" << (key.first + 1) << "_" << (key.second + 1);
    }
    if (energy) os << ",V";
    os << "\n";

    for (std::size_t t = 0; t < steps; ++t) {
        os << format_double(traj.times[t]);
        for (int i = 0; i < q; ++i) {
            for (int c = 0; c < n; ++c) {
                os << "," << format_double(traj.states[t][i](c).real());
                os << "," << format_double(traj.states[t][i](c).imag());
            }
        }
        for (const auto& [key, ds] : traj.disagreement) os << "," << format_double(ds[t]);
        for (const auto& [key, ys] : traj.outputs) os << "," << format_double(ys[t].norm());
        if (energy) os << "," << format_double((*energy)[t]);
        os << "\n";
    }
    return os.str();
}

std::vector<CVector> parse_initial_state(const std::string& text, int q, int n) {
    const json doc = parse_json_or_throw(text, "initial state");
    if (!doc.is_object() || !doc.contains("states") || !doc["states"].is_array()) {
        throw validation_error("initial state: expected {\"states\": [...]} ");
    }
    const json& states = doc["states"];
    if (static_cast<int>(states.size()) != q) {
        throw validation_error("initial state: expected " + std::to_string(q) +
                               " state vectors, got " + std::to_string(states.size()));
    }
    std::vector<CVector> out;
    for (int i = 0; i < q; ++i) {
        const std::string where = "states[" + std::to_string(i) + "]";
        if (!states[i].is_array() || static_cast<int>(states[i].size()) != n) {
            throw validation_error(where + ": expected " + std::to_string(n) + " entries");
        }
        CVector v(n);
        for (int c = 0; c < n; ++c) {
            v(c) = complex_at(states[i][c], where + "[" + std::to_string(c) + "]");
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<CVector> witness_from_report(const std::string& report_json, int q, int n,
                                         const std::string& label) {
    const json doc = parse_json_or_throw(report_json, "analysis report");
    if (!doc.is_object() || !doc.contains("witnesses") || !doc["witnesses"].is_array()) {
        throw validation_error("analysis report: no witnesses array");
    }
    for (const auto& entry : doc["witnesses"]) {
        if (!entry.is_object() || !entry.contains("label") || !entry.contains("x0")) continue;
        if (!label.empty() && entry["label"].get<std::string>() != label) continue;
        const json& x0 = entry["x0"];
        if (static_cast<int>(x0.size()) != q) {
            throw validation_error("witness: block count mismatch (report for a different system?)");
        }
        std::vector<CVector> out;
        for (int i = 0; i < q; ++i) {
            if (static_cast<int>(x0[i].size()) != n) {
                throw validation_error("witness: state dimension mismatch");
            }
            CVector v(n);
            for (int c = 0; c < n; ++c) v(c) = complex_at(x0[i][c], "witness entry");
            out.push_back(std::move(v));
        }
        return out;
    }
    throw validation_error(label.empty() ? "analysis report contains no witnesses"
                                         : "analysis report has no witness labeled '" + label + "'");
}

}  // namespace arrayobs
