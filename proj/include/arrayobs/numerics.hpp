#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace arrayobs {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Unordered vertex/system pair, stored canonically with first < second (zero-based).
using PairKey = std::pair<int, int>;

inline PairKey canonical_pair(int i, int j) { return i < j ? PairKey{i, j} : PairKey{j, i}; }

/// Bad user input (shapes, indices, file contents). Maps to exit code 2 in the CLI.
class validation_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The primary decision path and its redundant cross-check disagreed. Maps to exit code 3.
class disagreement_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numeric cutoffs used by every zero/rank/connectivity decision. Nothing in the
/// analysis layers compares against zero directly; it all flows through here.
struct Tolerance {
    double rank_rtol = 1e-10;        // relative singular-value cutoff
    double eig_cluster_atol = 1e-7;  // eigenvalue clustering radius, scaled by max(1, |A|)
    double psd_slack = 1e-8;         // allowed negative-eigenvalue slack relative to |M|
    double boundary_atol = 1e-8;     // band around the imaginary axis for Re >= 0 decisions

    void validate() const;

    /// Defaults overridden by ARRAYOBS_RANK_RTOL, ARRAYOBS_EIG_CLUSTER_ATOL,
    /// ARRAYOBS_PSD_SLACK, ARRAYOBS_BOUNDARY_ATOL when set.
    static Tolerance from_env();
};

/// Throws validation_error if M contains NaN/Inf.
void require_finite(const CMatrix& M, const std::string& what);

struct HermitianEig {
    RVector values;   // ascending
    CMatrix vectors;  // unitary, columns match values
};

/// Eigendecomposition of a Hermitian matrix. Rejects matrices that are not
/// Hermitian within psd_slack * |M|.
HermitianEig hermitian_eig(const CMatrix& M, const Tolerance& tol);

/// All n eigenvalues (with multiplicity) of a general square matrix,
/// sorted by (real, imag) for determinism.
std::vector<Complex> general_eigenvalues(const CMatrix& M, const Tolerance& tol);

/// Orthonormal basis of null(M); zero columns when M has full column rank.
CMatrix null_space_basis(const CMatrix& M, const Tolerance& tol);

/// Number of singular values above rank_rtol * sigma_max * max(rows, cols).
Eigen::Index numerical_rank(const CMatrix& M, const Tolerance& tol);

/// Moore-Penrose pseudo-inverse via SVD with the shared rank cutoff.
CMatrix pseudo_inverse(const CMatrix& M, const Tolerance& tol);

/// e^{M t} (scaling-and-squaring with Pade approximant).
CMatrix matrix_exp(const CMatrix& M, double t = 1.0);

/// Kronecker product, shape (rA*rB) x (cA*cB).
CMatrix kron(const CMatrix& A, const CMatrix& B);

}  // namespace arrayobs
