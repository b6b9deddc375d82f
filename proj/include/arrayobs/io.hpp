#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "arrayobs/array_model.hpp"
#include "arrayobs/decisions.hpp"
#include "arrayobs/dynamics.hpp"

namespace arrayobs {

/// Parsed form of the JSON array document: the system itself, an optional
/// tolerance override block, and an optional oscillator block describing how
/// the system was generated (which also enables physical simulation).
struct ArrayDocument {
    ArraySystem system;
    std::optional<Tolerance> tolerance;
    std::optional<OscillatorArray> oscillator;
};

/// Parse and validate a JSON array document. Complex entries must be
/// two-element [re, im] arrays of finite numbers; coupling indices are
/// one-based; when both directions of a pair are present they are stacked.
/// Tolerance fields in the document override `base`.
/// Throws validation_error with the offending field in the message.
ArrayDocument parse_array_document(const std::string& text, const Tolerance& base = Tolerance{});

/// Canonical serialization; parse(serialize(parse(x))) == parse(x) and
/// serialize is byte-stable on its own output.
std::string serialize_array_document(const ArrayDocument& doc);

/// JSON rendering of an analysis report (schema-stable; booleans never omitted).
nlohmann::ordered_json report_to_json(const AnalysisReport& report, const Tolerance& tol,
                                      double wall_ms);

/// CSV with a header row: time, per-system state components (re/im), pairwise
/// disagreement norms, relative-output norms, and optionally an energy column.
std::string trajectory_to_csv(const Trajectory& traj, const std::vector<double>* energy = nullptr);

/// Initial condition file: {"states": [[ [re, im] x n ] x q]}.
std::vector<CVector> parse_initial_state(const std::string& text, int q, int n);

/// Pull a stored witness initial condition out of a prior analysis report.
/// An empty label picks the first witness.
std::vector<CVector> witness_from_report(const std::string& report_json, int q, int n,
                                         const std::string& label = "");

}  // namespace arrayobs
