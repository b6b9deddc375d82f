#include "arrayobs/spectral.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace arrayobs {

namespace {

std::string complex_str(Complex z) {
    std::ostringstream os;
    os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return os.str();
}

}  // namespace

EigStructure eig_structure(const CMatrix& A, const Tolerance& tol) {
    if (A.rows() != A.cols() || A.rows() < 1) {
        throw validation_error("eig_structure: A must be square and nonempty");
    }
    const int n = static_cast<int>(A.rows());
    const auto eigs = general_eigenvalues(A, tol);
    const double radius = tol.eig_cluster_atol * std::max(1.0, A.norm());

    // single-linkage clustering via union-find
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(eigs[i] - eigs[j]) <= radius) parent[find(i)] = find(j);
        }
    }
    std::map<int, std::vector<int>> clusters;
    for (int i = 0; i < n; ++i) clusters[find(i)].push_back(i);

    EigStructure out;
    for (const auto& [root, members] : clusters) {
        Complex mu{0.0, 0.0};
        for (int idx : members) mu += eigs[idx];
        mu /= static_cast<double>(members.size());

        EigEntry entry;
        entry.mu = mu;
        entry.algebraic_mult = static_cast<int>(members.size());
        entry.V = null_space_basis(A - mu * CMatrix::Identity(n, n), tol);
        if (entry.V.cols() == 0) {
            // shifted matrix came out numerically full rank; fall back to the
            // smallest singular direction so the basis is never empty for a true eigenvalue
            Eigen::JacobiSVD<CMatrix> svd(A - mu * CMatrix::Identity(n, n), Eigen::ComputeFullV);
            entry.V = svd.matrixV().rightCols(1);
            out.diagnostics.push_back("eigenvalue " + complex_str(mu) +
                                      ": null space of the shift was numerically empty; using the "
                                      "smallest singular direction");
        }
        entry.geometric_mult = static_cast<int>(entry.V.cols());
        out.entries.push_back(std::move(entry));
    }

    std::sort(out.entries.begin(), out.entries.end(), [](const EigEntry& a, const EigEntry& b) {
        if (a.mu.real() != b.mu.real()) return a.mu.real() < b.mu.real();
        return a.mu.imag() < b.mu.imag();
    });

    // clusters closer than twice the radius are ambiguous: warn, do not merge
    for (std::size_t i = 0; i < out.entries.size(); ++i) {
        for (std::size_t j = i + 1; j < out.entries.size(); ++j) {
            const double d = std::abs(out.entries[i].mu - out.entries[j].mu);
            if (d < 2.0 * radius) {
                out.diagnostics.push_back("eigenvalue clusters " + complex_str(out.entries[i].mu) +
                                          " and " + complex_str(out.entries[j].mu) +
                                          " are separated by only " + std::to_string(d) +
                                          " (clustering radius " + std::to_string(radius) + ")");
            }
        }
    }

    out.nonderogatory = std::all_of(out.entries.begin(), out.entries.end(),
                                    [](const EigEntry& e) { return e.geometric_mult == 1; });
    return out;
}

NGraph eigengraph(const ArraySystem& sys, std::size_t sigma, const EigStructure& eig) {
    if (sigma >= eig.entries.size()) {
        throw validation_error("eigengraph: index " + std::to_string(sigma) + " out of range, m = " +
                               std::to_string(eig.entries.size()));
    }
    return eigengraph_with_basis(sys, eig.entries[sigma].V);
}

NGraph eigengraph_with_basis(const ArraySystem& sys, const CMatrix& V) {
    if (V.rows() != sys.n || V.cols() < 1) {
        throw validation_error("eigengraph: basis must have n rows and at least one column");
    }
    std::map<PairKey, CMatrix> H;
    for (const auto& [key, C] : sys.couplings) H.emplace(key, C * V);
    return graph_from_matrices(H, sys.q, static_cast<int>(V.cols()));
}

}  // namespace arrayobs
