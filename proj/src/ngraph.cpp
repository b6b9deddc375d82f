#include "arrayobs/ngraph.hpp"

#include <sstream>

namespace arrayobs {

namespace {

void check_vertex_pair(const NGraph& g, int k, int l, const char* what) {
    if (k == l) {
        throw validation_error(std::string(what) + ": vertex indices must be distinct, got " +
                               std::to_string(k + 1) + " twice");
    }
    if (k < 0 || l < 0 || k >= g.q || l >= g.q) {
        throw validation_error(std::string(what) + ": vertex index out of range for q = " +
                               std::to_string(g.q));
    }
}

std::string pair_str(int i, int j) {
    return "(" + std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")";
}

}  // namespace

NGraph graph_from_matrices(const std::map<PairKey, CMatrix>& H, int q, int n) {
    if (q < 1 || n < 1) throw validation_error("n-graph: q and n must be at least 1");
    NGraph g{q, n, {}};
    for (const auto& [key, Hij] : H) {
        const auto [i, j] = key;
        if (i == j) throw validation_error("n-graph: self-weight at vertex " + std::to_string(i + 1));
        if (i < 0 || j < 0 || i >= q || j >= q) {
            throw validation_error("n-graph: pair " + pair_str(i, j) + " out of range for q = " +
                                   std::to_string(q));
        }
        if (Hij.cols() != n) {
            throw validation_error("n-graph: matrix for pair " + pair_str(i, j) + " has " +
                                   std::to_string(Hij.cols()) + " columns, expected " +
                                   std::to_string(n));
        }
        require_finite(Hij, "n-graph matrix " + pair_str(i, j));
        if (Hij.rows() == 0) continue;
        g.weights[canonical_pair(i, j)] = Hij.adjoint() * Hij;
    }
    return g;
}

NGraph make_ngraph(int q, int n, std::map<PairKey, CMatrix> weights, const Tolerance& tol) {
    if (q < 1 || n < 1) throw validation_error("n-graph: q and n must be at least 1");
    for (const auto& [key, G] : weights) {
        const auto [i, j] = key;
        if (i == j || i < 0 || j < 0 || i >= q || j >= q || i > j) {
            throw validation_error("n-graph: invalid weight key " + pair_str(i, j));
        }
        if (G.rows() != n || G.cols() != n) {
            throw validation_error("n-graph: weight " + pair_str(i, j) + " must be " +
                                   std::to_string(n) + "x" + std::to_string(n));
        }
        auto eig = hermitian_eig(G, tol);  // also rejects non-Hermitian weights
        if (eig.values.size() > 0 && eig.values(0) < -tol.psd_slack * G.norm()) {
            throw validation_error("n-graph: weight " + pair_str(i, j) +
                                   " is not positive semidefinite (min eigenvalue " +
                                   std::to_string(eig.values(0)) + ")");
        }
    }
    return NGraph{q, n, std::move(weights)};
}

NGraph interconnection_graph(const ArraySystem& sys) {
    std::map<PairKey, CMatrix> H;
    for (const auto& [key, C] : sys.couplings) {
        H.emplace(key, observability_matrix(C, sys.A));
    }
    return graph_from_matrices(H, sys.q, sys.n);
}

LaplacianView laplacian(const NGraph& g, const Tolerance& tol) {
    const int n = g.n, q = g.q;
    CMatrix L = CMatrix::Zero(n * q, n * q);
    for (const auto& [key, G] : g.weights) {
        const auto [i, j] = key;
        L.block(n * i, n * i, n, n) += G;
        L.block(n * j, n * j, n, n) += G;
        L.block(n * i, n * j, n, n) -= G;
        L.block(n * j, n * i, n, n) -= G;
    }
    auto eig = hermitian_eig(L, tol);
    const double lambda_max = std::max(eig.values(eig.values.size() - 1), 0.0);
    const double threshold = tol.rank_rtol * lambda_max * static_cast<double>(n * q);

    Eigen::Index null_dim = 0;
    while (null_dim < eig.values.size() && eig.values(null_dim) <= threshold) ++null_dim;

    return LaplacianView{std::move(L), std::move(eig.values), eig.vectors.leftCols(null_dim),
                         threshold};
}

CMatrix sync_subspace_basis(int q, int n) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(q));
    return kron(CMatrix::Constant(q, 1, Complex(scale, 0.0)), CMatrix::Identity(n, n));
}

namespace {

// Largest component of the null basis outside the synchronization subspace,
// normalized; empty when the null space is contained in it.
CVector non_sync_null_direction(const LaplacianView& lv, int q, int n, const Tolerance& tol) {
    if (lv.null_basis.cols() == 0) return CVector();
    const CMatrix S = sync_subspace_basis(q, n);
    const CMatrix residual = lv.null_basis - S * (S.adjoint() * lv.null_basis);
    Eigen::Index best = -1;
    double best_norm = tol.rank_rtol * static_cast<double>(n * q);
    for (Eigen::Index c = 0; c < residual.cols(); ++c) {
        if (residual.col(c).norm() > best_norm) {
            best_norm = residual.col(c).norm();
            best = c;
        }
    }
    if (best < 0) return CVector();
    return residual.col(best) / residual.col(best).norm();
}

}  // namespace

ConnectivityVerdict is_connected(const NGraph& g, const Tolerance& tol) {
    if (g.q == 1) return ConnectivityVerdict{true, {}};
    auto lv = laplacian(g, tol);
    if (lv.null_basis.cols() == g.n) return ConnectivityVerdict{true, {}};
    CVector witness = non_sync_null_direction(lv, g.q, g.n, tol);
    if (witness.size() == 0) {
        // null space no larger than the sync subspace
        return ConnectivityVerdict{true, {}};
    }
    return ConnectivityVerdict{false, std::move(witness)};
}

ConnectivityVerdict is_pair_connected(const NGraph& g, int k, int l, const Tolerance& tol) {
    check_vertex_pair(g, k, l, "is_pair_connected");
    auto lv = laplacian(g, tol);
    const CMatrix& N = lv.null_basis;
    if (N.cols() == 0) return ConnectivityVerdict{true, {}};

    CMatrix D = CMatrix::Zero(g.n * g.q, g.n);  // (e_k - e_l) (x) I_n
    D.block(g.n * k, 0, g.n, g.n) = CMatrix::Identity(g.n, g.n);
    D.block(g.n * l, 0, g.n, g.n) = -CMatrix::Identity(g.n, g.n);

    const CMatrix P = N.adjoint() * D;
    if (P.norm() <= tol.rank_rtol * static_cast<double>(g.n * g.q)) {
        return ConnectivityVerdict{true, {}};
    }
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < P.cols(); ++c) {
        if (P.col(c).norm() > P.col(best).norm()) best = c;
    }
    CVector witness = N * P.col(best);
    witness /= witness.norm();
    return ConnectivityVerdict{false, std::move(witness)};
}

EffectiveConductance effective_conductance(const NGraph& g, int k, int l, const Tolerance& tol) {
    check_vertex_pair(g, k, l, "effective_conductance");
    const int n = g.n, q = g.q;

    EffectiveConductance out;
    out.k = k;
    out.l = l;
    out.potentials.assign(q, CMatrix::Zero(n, n));
    out.potentials[k] = CMatrix::Identity(n, n);

    const LaplacianView lv = laplacian(g, tol);
    const CMatrix& L = lv.L;

    if (q == 2) {
        out.gamma = g.has_weight(k, l) ? g.weight(k, l) : CMatrix::Zero(n, n);
    } else {
        std::vector<int> rest;
        rest.reserve(q - 2);
        for (int i = 0; i < q; ++i) {
            if (i != k && i != l) rest.push_back(i);
        }
        const int r = static_cast<int>(rest.size());
        CMatrix Lrr(n * r, n * r), Lrk(n * r, n);
        for (int a = 0; a < r; ++a) {
            Lrk.middleRows(n * a, n) = L.block(n * rest[a], n * k, n, n);
            for (int b = 0; b < r; ++b) {
                Lrr.block(n * a, n * b, n, n) = L.block(n * rest[a], n * rest[b], n, n);
            }
        }
        const CMatrix Lkk = L.block(n * k, n * k, n, n);
        const CMatrix E = -(pseudo_inverse(Lrr, tol) * Lrk);
        CMatrix gamma = Lrk.adjoint() * E + Lkk;  // L_{k,rest} = L_{rest,k}* since L is Hermitian
        out.gamma = 0.5 * (gamma + gamma.adjoint());
        for (int a = 0; a < r; ++a) out.potentials[rest[a]] = E.middleRows(n * a, n);
    }

    CMatrix X(n * q, n);
    for (int i = 0; i < q; ++i) X.middleRows(n * i, n) = out.potentials[i];
    CMatrix rhs = CMatrix::Zero(n * q, n);
    rhs.middleRows(n * k, n) = out.gamma;
    rhs.middleRows(n * l, n) = -out.gamma;
    out.residual = (L * X - rhs).norm();
    if (out.residual > 1e-8 * L.norm() + 1e-14) {
        throw std::runtime_error("effective_conductance: defining-equation residual " +
                                 std::to_string(out.residual) + " exceeds tolerance; the weight " +
                                 "assembly is numerically inconsistent");
    }

    // rank against the network's own scale: a conductance that is pure roundoff
    // relative to the Laplacian must not count as full rank
    const double lambda_max = std::max(lv.eigenvalues(lv.eigenvalues.size() - 1), 0.0);
    Eigen::JacobiSVD<CMatrix> svd(out.gamma);
    const double cutoff =
        tol.rank_rtol * std::max(svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0,
                                 lambda_max) *
        static_cast<double>(n * q);
    out.gamma_rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()(i) > cutoff) ++out.gamma_rank;
    }
    return out;
}

std::string to_dot(const NGraph& g, const Tolerance& tol, const std::string& name) {
    if (g.n != 1) {
        throw validation_error("to_dot: only scalar-weighted graphs (n = 1) have an unambiguous "
                               "visual representation");
    }
    double max_w = 0.0;
    for (const auto& [key, G] : g.weights) max_w = std::max(max_w, std::abs(G(0, 0)));
    const double threshold = tol.rank_rtol * std::max(max_w, 1.0);

    std::ostringstream os;
    os << "graph " << name << " {\n";
    for (int i = 0; i < g.q; ++i) os << "  v" << (i + 1) << ";\n";
    for (const auto& [key, G] : g.weights) {
        const double w = G(0, 0).real();
        if (w > threshold) {
            os << "  v" << (key.first + 1) << " -- v" << (key.second + 1) << " [label=\"" << w
               << "\"];\n";
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace arrayobs
