#include "arrayobs/array_model.hpp"

namespace arrayobs {

namespace {

std::string pair_str(int i, int j) {
    return "(" + std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")";
}

}  // namespace

ArraySystem make_array_system(int q, CMatrix A, std::map<PairKey, CMatrix> couplings) {
    if (q < 1) throw validation_error("array system: q must be at least 1");
    if (A.rows() != A.cols() || A.rows() < 1) {
        throw validation_error("array system: A must be square and nonempty, got " +
                               std::to_string(A.rows()) + "x" + std::to_string(A.cols()));
    }
    require_finite(A, "array system A");
    const int n = static_cast<int>(A.rows());

    std::map<PairKey, CMatrix> normalized;
    for (auto& [key, C] : couplings) {
        const auto [i, j] = key;
        if (i == j) {
            throw validation_error("array system: self-coupling at index " + std::to_string(i + 1) +
                                   " is not allowed (diagonal couplings are zero by convention)");
        }
        if (i < 0 || j < 0 || i >= q || j >= q) {
            throw validation_error("array system: coupling " + pair_str(i, j) +
                                   " is out of range for q = " + std::to_string(q));
        }
        if (C.cols() != n) {
            throw validation_error("array system: coupling " + pair_str(i, j) + " has " +
                                   std::to_string(C.cols()) + " columns, expected n = " +
                                   std::to_string(n));
        }
        require_finite(C, "array system coupling " + pair_str(i, j));
        if (C.rows() == 0) continue;  // zero-row couplings are the same as absent pairs
        const PairKey canon = canonical_pair(i, j);
        if (normalized.count(canon)) {
            throw validation_error("array system: both directions of pair " +
                                   pair_str(canon.first, canon.second) +
                                   " supplied; use symmetrize_couplings first");
        }
        normalized.emplace(canon, std::move(C));
    }

    return ArraySystem{q, n, std::move(A), std::move(normalized)};
}

std::map<PairKey, CMatrix> symmetrize_couplings(const std::map<PairKey, CMatrix>& directed, int n,
                                                int q) {
    std::map<PairKey, CMatrix> out;
    for (const auto& [key, C] : directed) {
        const auto [i, j] = key;
        if (i == j) {
            throw validation_error("symmetrize: self-coupling at index " + std::to_string(i + 1));
        }
        if (i < 0 || j < 0 || i >= q || j >= q) {
            throw validation_error("symmetrize: pair " + pair_str(i, j) + " is out of range for q = " +
                                   std::to_string(q));
        }
        if (C.cols() != n) {
            throw validation_error("symmetrize: pair " + pair_str(i, j) + " has " +
                                   std::to_string(C.cols()) + " columns, expected " + std::to_string(n));
        }
        require_finite(C, "symmetrize pair " + pair_str(i, j));

        const PairKey canon = canonical_pair(i, j);
        auto it = out.find(canon);
        if (it == out.end()) {
            out.emplace(canon, C);
        } else if (i == canon.first) {
            // entry for the smaller index goes on top
            CMatrix stacked(C.rows() + it->second.rows(), n);
            stacked << C, it->second;
            it->second = std::move(stacked);
        } else {
            CMatrix stacked(it->second.rows() + C.rows(), n);
            stacked << it->second, C;
            it->second = std::move(stacked);
        }
    }
    for (auto it = out.begin(); it != out.end();) {
        it = it->second.rows() == 0 ? out.erase(it) : std::next(it);
    }
    return out;
}

CMatrix observability_matrix(const CMatrix& C, const CMatrix& A) {
    if (A.rows() != A.cols()) throw validation_error("observability_matrix: A must be square");
    if (C.cols() != A.rows()) {
        throw validation_error("observability_matrix: C has " + std::to_string(C.cols()) +
                               " columns but A is " + std::to_string(A.rows()) + "x" +
                               std::to_string(A.cols()));
    }
    const Eigen::Index n = A.rows();
    const Eigen::Index m = C.rows();
    CMatrix W(n * m, n);
    CMatrix block = C;
    for (Eigen::Index k = 0; k < n; ++k) {
        W.middleRows(k * m, m) = block;
        if (k + 1 < n) block = block * A;
    }
    return W;
}

ObservabilityData build_observability_data(const ArraySystem& sys, const Tolerance& tol) {
    ObservabilityData data;
    for (const auto& [key, C] : sys.couplings) {
        CMatrix W = observability_matrix(C, sys.A);
        data.U_basis.emplace(key, null_space_basis(W, tol));
        data.W.emplace(key, std::move(W));
    }
    return data;
}

}  // namespace arrayobs
