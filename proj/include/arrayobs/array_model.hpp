#pragma once

#include <map>

#include "arrayobs/numerics.hpp"

namespace arrayobs {

/// An array of q identical systems dx_i/dt = A x_i observed through relative
/// outputs y_ij = C_ij (x_i - x_j). Couplings are keyed by unordered pair
/// (canonical i < j, zero-based); an absent pair means a zero coupling.
struct ArraySystem {
    int q = 0;
    int n = 0;
    CMatrix A;
    std::map<PairKey, CMatrix> couplings;

    bool has_coupling(int i, int j) const { return couplings.count(canonical_pair(i, j)) > 0; }
    const CMatrix& coupling(int i, int j) const { return couplings.at(canonical_pair(i, j)); }
};

/// Validating constructor. Rejects self-couplings, wrong column counts,
/// out-of-range indices, and non-finite entries; drops couplings with zero rows.
ArraySystem make_array_system(int q, CMatrix A, std::map<PairKey, CMatrix> couplings);

/// Collapse a directed coupling map to the unordered convention: when both
/// directions are present for a pair the two matrices are stacked vertically
/// (row block for the smaller index first), otherwise the single entry is kept.
/// Zero-row results are dropped.
std::map<PairKey, CMatrix> symmetrize_couplings(const std::map<PairKey, CMatrix>& directed, int n,
                                                int q);

/// Vertical stack of C * A^k for k = 0 .. n-1.
CMatrix observability_matrix(const CMatrix& C, const CMatrix& A);

struct ObservabilityData {
    std::map<PairKey, CMatrix> W;        // stacked observability matrix per pair
    std::map<PairKey, CMatrix> U_basis;  // orthonormal basis of null(W) per pair
};

/// W and unobservable-subspace bases for every stored pair. Absent pairs have
/// W = 0 and unobservable subspace equal to the whole state space implicitly.
ObservabilityData build_observability_data(const ArraySystem& sys, const Tolerance& tol);

}  // namespace arrayobs
