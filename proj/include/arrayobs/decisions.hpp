#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arrayobs/array_model.hpp"
#include "arrayobs/ngraph.hpp"
#include "arrayobs/spectral.hpp"

namespace arrayobs {

struct EigengraphVerdict {
    Complex mu;
    int algebraic_mult = 0;
    int geometric_mult = 0;
    bool connected = false;
    bool re_nonneg = false;  // Re(mu) >= -boundary_atol (marginal values count as right-half-plane)
};

struct ObservabilityVerdict {
    bool observable = false;
    bool interconnection_connected = false;
    std::vector<EigengraphVerdict> per_eigengraph;
    CVector witness;  // desynchronizing initial condition when not observable
    std::vector<std::string> diagnostics;
};

/// Observable iff the interconnection graph is connected; redundantly checked
/// against the all-eigengraphs-connected route. Disagreement between the two
/// routes throws disagreement_error.
ObservabilityVerdict is_observable(const ArraySystem& sys, const Tolerance& tol);

struct DetectabilityVerdict {
    bool detectable = false;
    std::vector<EigengraphVerdict> per_eigengraph;
    CVector witness;  // non-decaying initial condition when not detectable
    std::vector<std::string> diagnostics;
};

/// Detectable iff every eigengraph whose eigenvalue has Re >= -boundary_atol
/// is connected. `cross_check` additionally verifies each such verdict against
/// a null-space intersection test on the interconnection Laplacian.
DetectabilityVerdict is_detectable(const ArraySystem& sys, const Tolerance& tol,
                                   bool cross_check = true);

struct PairObservabilityVerdict {
    bool pair_observable = false;
    bool pair_connected = false;
    Eigen::Index conductance_rank = 0;
    EffectiveConductance conductance;
    CVector witness;
};

/// Pair (k, l) observable iff the interconnection graph is (k, l)-connected;
/// cross-checked against full rank of the effective conductance. Disagreement
/// throws disagreement_error.
PairObservabilityVerdict is_pair_observable(const ArraySystem& sys, int k, int l,
                                            const Tolerance& tol);

struct PairDetectabilityVerdict {
    bool pair_detectable = false;
    CVector witness;
    std::vector<Complex> failing_modes;  // right-half-plane eigenvalues where the rank test fails
};

/// Rank test on [A - mu I; Gamma_kl] at every eigenvalue mu of A with
/// Re >= -boundary_atol (the rank cannot drop anywhere else).
PairDetectabilityVerdict is_pair_detectable(const ArraySystem& sys, int k, int l,
                                            const Tolerance& tol);

/// (k, l)-connectivity of every eigengraph. A necessary condition for pair
/// observability/detectability only; the converse fails in general.
std::vector<std::pair<Complex, bool>> eigengraph_necessity_check(const ArraySystem& sys, int k,
                                                                 int l, const Tolerance& tol);

struct PairVerdict {
    bool pair_observable = false;
    bool pair_detectable = false;
    Eigen::Index conductance_rank = 0;
};

struct WitnessEntry {
    std::string label;
    CVector x0;  // stacked initial condition, q blocks of size n
};

struct AnalysisReport {
    int n = 0;
    int q = 0;
    bool observable = false;
    bool detectable = false;
    bool nonderogatory = false;
    bool interconnection_connected = false;
    std::vector<EigengraphVerdict> per_eigengraph;
    std::map<PairKey, PairVerdict> pairwise;
    std::vector<WitnessEntry> witnesses;
    std::vector<std::string> diagnostics;
    bool cross_checked = false;
};

/// Full report: global verdicts, per-eigengraph connectivity, and verdicts for
/// the requested pairs. With `cross_check` the trajectory-level oracles are run
/// as an extra route and any disagreement throws disagreement_error.
AnalysisReport analyze(const ArraySystem& sys, const Tolerance& tol,
                       const std::vector<PairKey>& pairs = {}, bool cross_check = false);

}  // namespace arrayobs
