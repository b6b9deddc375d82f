#pragma once

#include <map>
#include <string>
#include <vector>

#include "arrayobs/array_model.hpp"
#include "arrayobs/numerics.hpp"

namespace arrayobs {

/// Graph on q vertices whose edge weights are n x n Hermitian PSD matrices.
/// An absent pair means a zero weight.
struct NGraph {
    int q = 0;
    int n = 0;
    std::map<PairKey, CMatrix> weights;

    bool has_weight(int i, int j) const { return weights.count(canonical_pair(i, j)) > 0; }
    const CMatrix& weight(int i, int j) const { return weights.at(canonical_pair(i, j)); }
};

/// Graph with weights G_ij = H_ij* H_ij (Hermitian PSD by construction).
/// Every H must have n columns; zero-row entries become absent pairs.
NGraph graph_from_matrices(const std::map<PairKey, CMatrix>& H, int q, int n);

/// Validating constructor for explicitly supplied weights: each weight must be
/// Hermitian with smallest eigenvalue >= -psd_slack * |G|.
NGraph make_ngraph(int q, int n, std::map<PairKey, CMatrix> weights, const Tolerance& tol);

/// The graph whose weights come from the per-pair observability matrices W_ij.
NGraph interconnection_graph(const ArraySystem& sys);

struct LaplacianView {
    CMatrix L;              // nq x nq block Laplacian
    RVector eigenvalues;    // ascending
    CMatrix null_basis;     // orthonormal columns spanning null(L)
    double zero_threshold;  // eigenvalues at or below this counted as zero
};

/// Block Laplacian (diagonal blocks sum the incident weights, off-diagonal
/// blocks negate them) together with its eigen-data and numerical null space.
LaplacianView laplacian(const NGraph& g, const Tolerance& tol);

/// Orthonormal basis of the synchronization subspace (all q blocks equal).
CMatrix sync_subspace_basis(int q, int n);

struct ConnectivityVerdict {
    bool connected = false;
    CVector witness;  // size 0 when connected; otherwise a null vector violating the condition
};

/// Connected iff eigenvalue n+1 of the Laplacian is above the zero threshold,
/// equivalently null(L) is exactly the synchronization subspace.
ConnectivityVerdict is_connected(const NGraph& g, const Tolerance& tol);

/// Pair (k, l) connected iff every Laplacian null vector has equal k-th and
/// l-th blocks. Witness on failure is a null vector with differing blocks.
ConnectivityVerdict is_pair_connected(const NGraph& g, int k, int l, const Tolerance& tol);

struct EffectiveConductance {
    int k = 0;
    int l = 0;
    CMatrix gamma;                   // n x n, Hermitian PSD
    std::vector<CMatrix> potentials; // q node potentials, X_k = I and X_l = 0
    double residual = 0.0;           // |L X - (e_k - e_l) (x) gamma|
    Eigen::Index gamma_rank = 0;     // rank of gamma measured at the Laplacian's scale
};

/// Matrix-valued effective conductance between distinct vertices k and l:
/// the Schur complement of the Laplacian with the (k, l) rows/columns kept,
/// using the pseudo-inverse on the interior block.
EffectiveConductance effective_conductance(const NGraph& g, int k, int l, const Tolerance& tol);

/// DOT rendering for scalar-weighted graphs (n = 1); an edge is drawn iff the
/// weight exceeds the scale-relative threshold.
std::string to_dot(const NGraph& g, const Tolerance& tol, const std::string& name = "g");

}  // namespace arrayobs
