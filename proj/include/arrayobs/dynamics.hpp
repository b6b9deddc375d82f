#pragma once

#include <map>
#include <vector>

#include "arrayobs/array_model.hpp"
#include "arrayobs/ngraph.hpp"
#include "arrayobs/numerics.hpp"

namespace arrayobs {

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<CVector>> states;             // states[t][i], i-th system at times[t]
    std::map<PairKey, std::vector<CVector>> outputs;      // y_ij(t) for stored couplings
    std::map<PairKey, std::vector<double>> disagreement;  // |x_i(t) - x_j(t)| for every pair
};

/// Propagate every system through e^{A t} and evaluate relative outputs and
/// pairwise disagreement norms on the given time grid.
Trajectory simulate(const ArraySystem& sys, const std::vector<CVector>& x0,
                    const std::vector<double>& times);

struct OscillatorSpec {
    std::vector<double> masses;                          // m_1..m_p, positive
    std::vector<double> stiffness;                       // k_1..k_{p+1}, positive
    std::map<PairKey, std::vector<double>> conductances; // per pair, one value per node, >= 0

    int p() const { return static_cast<int>(masses.size()); }
    void validate(int q) const;
};

enum class OscillatorKind { lc, spring };

/// A coupled oscillator chain array: the analysis-facing system [(C_ij), A]
/// plus what the physical simulation needs (drift coupling blocks and the
/// energy weight of the dissipation argument).
struct OscillatorArray {
    OscillatorKind kind = OscillatorKind::lc;
    OscillatorSpec spec;
    int q = 0;
    ArraySystem system;
    std::map<PairKey, CMatrix> drift_couplings;  // [0 0; 0 K^-1 B] or [0 0; 0 M^-1 B]
    CMatrix energy_weight;                       // P with V = 1/2 sum_i x_i^T P x_i
};

OscillatorArray build_oscillator_array(OscillatorKind kind, const OscillatorSpec& spec, int q);

/// Array [(C_ij), A] of the capacitively coupled LC chain: A = [0 I; -K^-1 M^-1 0],
/// C_ij = [0 0; 0 B_ij].
ArraySystem build_lc_array(const OscillatorSpec& spec, int q);

/// Array of the damped mass-spring chain: A = [0 I; -M^-1 K 0], C_ij = [0 0; 0 B_ij].
ArraySystem build_spring_array(const OscillatorSpec& spec, int q);

/// Propagate the *coupled* oscillator dynamics (drift plus diffusive coupling)
/// analytically through one stacked matrix exponential.
Trajectory simulate_coupled(const OscillatorArray& osc, const std::vector<CVector>& x0,
                            const std::vector<double>& times);

/// Oscillator energy evaluated along a trajectory.
std::vector<double> lyapunov_energy(const OscillatorArray& osc, const Trajectory& traj);

struct DecayReport {
    std::vector<double> energy;
    double max_step_increase = 0.0;  // largest positive jump between consecutive samples
};

DecayReport lyapunov_check(const OscillatorArray& osc, const Trajectory& traj);

struct OracleVerdict {
    bool value = false;
    CVector witness;  // stacked initial condition exhibiting the failure, when any
};

/// Ground-truth observability oracle: null(L) equals the synchronization
/// subspace, decided by direct null-space projection on the interconnection
/// Laplacian. Independent of the decision layer.
OracleVerdict oracle_observable(const ArraySystem& sys, const Tolerance& tol);

/// Ground-truth pairwise observability: propagate every zero-output initial
/// condition (a Laplacian null basis) over a time grid and require the k/l
/// blocks to stay equal.
OracleVerdict oracle_pair_observable(const ArraySystem& sys, int k, int l, const Tolerance& tol);

/// Ground-truth pairwise detectability: for sampled zero-output initial
/// conditions, the k/l difference decays iff it lies in the stable invariant
/// subspace of A (modal check, no norm thresholds on finite horizons).
OracleVerdict oracle_pair_detectable(const ArraySystem& sys, int k, int l, int x0_samples,
                                     double horizon, const Tolerance& tol);

}  // namespace arrayobs
