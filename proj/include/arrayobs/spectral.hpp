#pragma once

#include <vector>

#include "arrayobs/array_model.hpp"
#include "arrayobs/ngraph.hpp"
#include "arrayobs/numerics.hpp"

namespace arrayobs {

struct EigEntry {
    Complex mu;          // cluster representative
    CMatrix V;           // orthonormal eigenvector basis, n x geometric_mult
    int geometric_mult = 0;
    int algebraic_mult = 0;
};

/// Distinct eigenvalues of A with eigenvector bases. Eigenvalues are clustered
/// with single linkage at radius eig_cluster_atol * max(1, |A|); bases come
/// from the null space of the shifted matrix, never from the eigensolver.
struct EigStructure {
    std::vector<EigEntry> entries;  // sorted by (Re, Im)
    bool nonderogatory = false;     // every geometric multiplicity is 1
    std::vector<std::string> diagnostics;

    int m() const { return static_cast<int>(entries.size()); }
};

EigStructure eig_structure(const CMatrix& A, const Tolerance& tol);

/// Eigengraph for the sigma-th distinct eigenvalue: the graph of C_ij * V_sigma.
NGraph eigengraph(const ArraySystem& sys, std::size_t sigma, const EigStructure& eig);

/// Eigengraph built from an explicitly supplied eigenvector basis.
NGraph eigengraph_with_basis(const ArraySystem& sys, const CMatrix& V);

}  // namespace arrayobs
