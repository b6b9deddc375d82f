#include "arrayobs/numerics.hpp"

#include <algorithm>
#include <cstdlib>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace arrayobs {

void Tolerance::validate() const {
    auto check = [](double v, const char* name) {
        if (!(v > 0.0 && v < 1.0)) {
            throw validation_error(std::string("tolerance ") + name +
                                   " must lie strictly between 0 and 1, got " + std::to_string(v));
        }
    };
    check(rank_rtol, "rank_rtol");
    check(eig_cluster_atol, "eig_cluster_atol");
    check(psd_slack, "psd_slack");
    check(boundary_atol, "boundary_atol");
}

Tolerance Tolerance::from_env() {
    Tolerance tol;
    auto read = [](const char* name, double& field) {
        if (const char* v = std::getenv(name)) {
            char* end = nullptr;
            double parsed = std::strtod(v, &end);
            if (end == v || (end && *end != '\0')) {
                throw validation_error(std::string(name) + ": cannot parse '" + v + "' as a double");
            }
            field = parsed;
        }
    };
    read("ARRAYOBS_RANK_RTOL", tol.rank_rtol);
    read("ARRAYOBS_EIG_CLUSTER_ATOL", tol.eig_cluster_atol);
    read("ARRAYOBS_PSD_SLACK", tol.psd_slack);
    read("ARRAYOBS_BOUNDARY_ATOL", tol.boundary_atol);
    tol.validate();
    return tol;
}

void require_finite(const CMatrix& M, const std::string& what) {
    if (!M.allFinite()) {
        throw validation_error(what + ": entries must be finite (no NaN/Inf)");
    }
}

HermitianEig hermitian_eig(const CMatrix& M, const Tolerance& tol) {
    require_finite(M, "hermitian_eig input");
    if (M.rows() != M.cols()) {
        throw validation_error("hermitian_eig: matrix must be square, got " +
                               std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
    }
    const double asym = (M - M.adjoint()).norm();
    if (asym > tol.psd_slack * M.norm()) {
        throw validation_error("hermitian_eig: matrix is not Hermitian within tolerance (|M - M*| = " +
                               std::to_string(asym) + ")");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (M + M.adjoint()));
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("hermitian_eig: eigensolver failed to converge");
    }
    return HermitianEig{solver.eigenvalues(), solver.eigenvectors()};
}

std::vector<Complex> general_eigenvalues(const CMatrix& M, const Tolerance&) {
    require_finite(M, "general_eigenvalues input");
    if (M.rows() != M.cols()) {
        throw validation_error("general_eigenvalues: matrix must be square");
    }
    if (M.rows() == 0) return {};
    Eigen::ComplexEigenSolver<CMatrix> solver(M, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("general_eigenvalues: eigensolver failed to converge");
    }
    std::vector<Complex> eigs(solver.eigenvalues().data(),
                              solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(eigs.begin(), eigs.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return eigs;
}

namespace {

Eigen::JacobiSVD<CMatrix> svd_of(const CMatrix& M, unsigned options) {
    return Eigen::JacobiSVD<CMatrix>(M, options);
}

Eigen::Index rank_from_svd(const Eigen::JacobiSVD<CMatrix>& svd, const CMatrix& M, const Tolerance& tol) {
    if (svd.singularValues().size() == 0) return 0;
    const double cutoff =
        tol.rank_rtol * svd.singularValues()(0) * static_cast<double>(std::max(M.rows(), M.cols()));
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()(i) > cutoff) ++r;
    }
    return r;
}

}  // namespace

CMatrix null_space_basis(const CMatrix& M, const Tolerance& tol) {
    require_finite(M, "null_space_basis input");
    if (M.cols() == 0) return CMatrix(0, 0);
    if (M.rows() == 0) return CMatrix::Identity(M.cols(), M.cols());
    auto svd = svd_of(M, Eigen::ComputeFullV);
    const Eigen::Index r = rank_from_svd(svd, M, tol);
    return svd.matrixV().rightCols(M.cols() - r);
}

Eigen::Index numerical_rank(const CMatrix& M, const Tolerance& tol) {
    require_finite(M, "numerical_rank input");
    if (M.rows() == 0 || M.cols() == 0) return 0;
    return rank_from_svd(svd_of(M, 0), M, tol);
}

CMatrix pseudo_inverse(const CMatrix& M, const Tolerance& tol) {
    require_finite(M, "pseudo_inverse input");
    if (M.rows() == 0 || M.cols() == 0) return CMatrix::Zero(M.cols(), M.rows());
    auto svd = svd_of(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Index r = rank_from_svd(svd, M, tol);
    RVector inv = RVector::Zero(svd.singularValues().size());
    for (Eigen::Index i = 0; i < r; ++i) inv(i) = 1.0 / svd.singularValues()(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

CMatrix matrix_exp(const CMatrix& M, double t) {
    require_finite(M, "matrix_exp input");
    if (M.rows() != M.cols()) {
        throw validation_error("matrix_exp: matrix must be square");
    }
    return (M * Complex(t, 0.0)).exp();
}

CMatrix kron(const CMatrix& A, const CMatrix& B) {
    return Eigen::kroneckerProduct(A, B).eval();
}

}  // namespace arrayobs
