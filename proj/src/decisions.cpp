#include "arrayobs/decisions.hpp"

#include <algorithm>
#include <sstream>

namespace arrayobs {

namespace {

std::string pair_label(int k, int l) {
    return std::to_string(k + 1) + "_" + std::to_string(l + 1);
}

bool re_nonneg(Complex mu, const Tolerance& tol) { return mu.real() >= -tol.boundary_atol; }

struct EigengraphScan {
    std::vector<EigengraphVerdict> verdicts;
    std::vector<CVector> witnesses;  // eigengraph-level null-vector witnesses (empty when connected)
    std::vector<std::string> diagnostics;
};

EigengraphScan scan_eigengraphs(const ArraySystem& sys, const EigStructure& eig,
                                const Tolerance& tol) {
    EigengraphScan scan;
    scan.diagnostics = eig.diagnostics;
    for (std::size_t sigma = 0; sigma < eig.entries.size(); ++sigma) {
        const auto& entry = eig.entries[sigma];
        auto verdict = is_connected(eigengraph(sys, sigma, eig), tol);
        scan.verdicts.push_back(EigengraphVerdict{entry.mu, entry.algebraic_mult,
                                                  entry.geometric_mult, verdict.connected,
                                                  re_nonneg(entry.mu, tol)});
        scan.witnesses.push_back(verdict.witness);
        if (std::abs(entry.mu.real()) <= tol.boundary_atol && entry.mu.real() != 0.0) {
            std::ostringstream os;
            os << "eigenvalue with Re = " << entry.mu.real()
               << " lies within boundary_atol of the imaginary axis; treated as right-half-plane";
            scan.diagnostics.push_back(os.str());
        }
    }
    return scan;
}

/// Lift an eigengraph-level witness (blocks of size n_sigma) to state space.
CVector lift_witness(const CVector& eta, const CMatrix& V, int q) {
    const Eigen::Index ns = V.cols();
    CVector zeta(V.rows() * q);
    for (int i = 0; i < q; ++i) {
        zeta.segment(V.rows() * i, V.rows()) = V * eta.segment(ns * i, ns);
    }
    return zeta / zeta.norm();
}

/// Independent route for the connectivity of eigengraph sigma: the eigengraph
/// is disconnected iff range(I_q (x) V_sigma) and null(L) intersect outside the
/// synchronization subspace, where L is the interconnection Laplacian.
bool eigengraph_connected_by_intersection(const ArraySystem& sys, const LaplacianView& lv,
                                          const CMatrix& V, const Tolerance& tol) {
    const int q = sys.q, n = sys.n;
    const CMatrix P = kron(CMatrix::Identity(q, q), V);
    const CMatrix& N = lv.null_basis;
    if (N.cols() == 0) return true;

    CMatrix combined(n * q, P.cols() + N.cols());
    combined << P, -N;
    const CMatrix K = null_space_basis(combined, tol);
    if (K.cols() == 0) return true;

    // columns of J span range(P) intersect null(L)
    CMatrix J = P * K.topRows(P.cols());
    const CMatrix S = sync_subspace_basis(q, n);
    const CMatrix outside = J - S * (S.adjoint() * J);
    for (Eigen::Index c = 0; c < outside.cols(); ++c) {
        if (J.col(c).norm() < tol.rank_rtol) continue;
        if (outside.col(c).norm() > tol.rank_rtol * static_cast<double>(n * q) * J.col(c).norm() +
                                       tol.rank_rtol * static_cast<double>(n * q)) {
            return false;
        }
    }
    return true;
}

}  // namespace

ObservabilityVerdict is_observable(const ArraySystem& sys, const Tolerance& tol) {
    tol.validate();
    ObservabilityVerdict out;

    auto inter = is_connected(interconnection_graph(sys), tol);
    out.interconnection_connected = inter.connected;
    out.witness = inter.witness;

    const auto eig = eig_structure(sys.A, tol);
    auto scan = scan_eigengraphs(sys, eig, tol);
    out.per_eigengraph = scan.verdicts;
    out.diagnostics = std::move(scan.diagnostics);

    const bool all_eigengraphs_connected =
        std::all_of(out.per_eigengraph.begin(), out.per_eigengraph.end(),
                    [](const EigengraphVerdict& v) { return v.connected; });

    if (inter.connected != all_eigengraphs_connected) {
        std::ostringstream os;
        os << "is_observable: interconnection-graph route says "
           << (inter.connected ? "connected" : "disconnected")
           << " but the eigengraph route says "
           << (all_eigengraphs_connected ? "all connected" : "some disconnected")
           << "; eigengraph verdicts:";
        for (const auto& v : out.per_eigengraph) {
            os << " (mu=" << v.mu.real() << (v.mu.imag() < 0 ? "-" : "+") << std::abs(v.mu.imag())
               << "i " << (v.connected ? "conn" : "disc") << ")";
        }
        os << "; likely a tolerance misconfiguration";
        throw disagreement_error(os.str());
    }

    out.observable = inter.connected;
    if (!out.observable && out.witness.size() == 0) {
        // interconnection witness missing (should not happen); fall back to a lifted one
        for (std::size_t s = 0; s < scan.witnesses.size(); ++s) {
            if (scan.witnesses[s].size() > 0) {
                out.witness = lift_witness(scan.witnesses[s], eig.entries[s].V, sys.q);
                break;
            }
        }
    }
    return out;
}

DetectabilityVerdict is_detectable(const ArraySystem& sys, const Tolerance& tol, bool cross_check) {
    tol.validate();
    DetectabilityVerdict out;

    const auto eig = eig_structure(sys.A, tol);
    auto scan = scan_eigengraphs(sys, eig, tol);
    out.per_eigengraph = scan.verdicts;
    out.diagnostics = std::move(scan.diagnostics);

    out.detectable = true;
    for (std::size_t s = 0; s < out.per_eigengraph.size(); ++s) {
        const auto& v = out.per_eigengraph[s];
        if (v.re_nonneg && !v.connected) {
            out.detectable = false;
            if (out.witness.size() == 0 && scan.witnesses[s].size() > 0) {
                out.witness = lift_witness(scan.witnesses[s], eig.entries[s].V, sys.q);
            }
        }
    }

    if (cross_check) {
        const auto lv = laplacian(interconnection_graph(sys), tol);
        for (std::size_t s = 0; s < out.per_eigengraph.size(); ++s) {
            if (!out.per_eigengraph[s].re_nonneg) continue;
            const bool by_intersection =
                eigengraph_connected_by_intersection(sys, lv, eig.entries[s].V, tol);
            if (by_intersection != out.per_eigengraph[s].connected) {
                std::ostringstream os;
                os << "is_detectable: eigengraph " << (s + 1) << " connectivity ("
                   << (out.per_eigengraph[s].connected ? "connected" : "disconnected")
                   << ") disagrees with the null-space intersection route";
                throw disagreement_error(os.str());
            }
        }
    }
    return out;
}

PairObservabilityVerdict is_pair_observable(const ArraySystem& sys, int k, int l,
                                            const Tolerance& tol) {
    tol.validate();
    const NGraph inter = interconnection_graph(sys);

    PairObservabilityVerdict out;
    auto conn = is_pair_connected(inter, k, l, tol);
    out.pair_connected = conn.connected;
    out.witness = conn.witness;
    out.conductance = effective_conductance(inter, k, l, tol);
    out.conductance_rank = out.conductance.gamma_rank;

    const bool full_rank = out.conductance_rank == sys.n;
    if (full_rank != conn.connected) {
        std::ostringstream os;
        os << "is_pair_observable(" << (k + 1) << ", " << (l + 1) << "): pairwise-connectivity"
           << " route says " << (conn.connected ? "connected" : "disconnected")
           << " but the effective conductance has rank " << out.conductance_rank << " of " << sys.n;
        throw disagreement_error(os.str());
    }
    out.pair_observable = conn.connected;
    return out;
}

PairDetectabilityVerdict is_pair_detectable(const ArraySystem& sys, int k, int l,
                                            const Tolerance& tol) {
    tol.validate();
    const NGraph inter = interconnection_graph(sys);
    const auto cond = effective_conductance(inter, k, l, tol);
    const auto eig = eig_structure(sys.A, tol);

    PairDetectabilityVerdict out;
    out.pair_detectable = true;
    for (const auto& entry : eig.entries) {
        if (!re_nonneg(entry.mu, tol)) continue;
        CMatrix stacked(sys.n + cond.gamma.rows(), sys.n);
        stacked << sys.A - entry.mu * CMatrix::Identity(sys.n, sys.n), cond.gamma;
        if (numerical_rank(stacked, tol) < sys.n) {
            out.pair_detectable = false;
            out.failing_modes.push_back(entry.mu);
            if (out.witness.size() == 0) {
                const CMatrix rho_basis = null_space_basis(stacked, tol);
                if (rho_basis.cols() > 0) {
                    // initial condition x_i(0) = X_i rho keeps all outputs zero while
                    // x_k - x_l = rho e^{mu t} does not decay
                    const CVector rho = rho_basis.col(0);
                    CVector zeta(sys.n * sys.q);
                    for (int i = 0; i < sys.q; ++i) {
                        zeta.segment(sys.n * i, sys.n) = cond.potentials[i] * rho;
                    }
                    out.witness = zeta / zeta.norm();
                }
            }
        }
    }
    return out;
}

std::vector<std::pair<Complex, bool>> eigengraph_necessity_check(const ArraySystem& sys, int k,
                                                                 int l, const Tolerance& tol) {
    tol.validate();
    const auto eig = eig_structure(sys.A, tol);
    std::vector<std::pair<Complex, bool>> out;
    for (std::size_t sigma = 0; sigma < eig.entries.size(); ++sigma) {
        auto verdict = is_pair_connected(eigengraph(sys, sigma, eig), k, l, tol);
        out.emplace_back(eig.entries[sigma].mu, verdict.connected);
    }
    return out;
}

AnalysisReport analyze(const ArraySystem& sys, const Tolerance& tol,
                       const std::vector<PairKey>& pairs, bool cross_check) {
    tol.validate();
    AnalysisReport report;
    report.n = sys.n;
    report.q = sys.q;
    report.cross_checked = cross_check;

    const auto eig = eig_structure(sys.A, tol);
    report.nonderogatory = eig.nonderogatory;

    auto obs = is_observable(sys, tol);
    report.observable = obs.observable;
    report.interconnection_connected = obs.interconnection_connected;
    report.per_eigengraph = obs.per_eigengraph;
    report.diagnostics = obs.diagnostics;
    if (!obs.observable && obs.witness.size() > 0) {
        report.witnesses.push_back({"observable", obs.witness});
    }

    auto det = is_detectable(sys, tol, cross_check);
    report.detectable = det.detectable;
    if (!det.detectable && det.witness.size() > 0) {
        report.witnesses.push_back({"detectable", det.witness});
    }

    for (const auto& [k, l] : pairs) {
        if (k == l) {
            throw validation_error("analyze: pair indices must be distinct, got " +
                                   std::to_string(k + 1) + " twice");
        }
        if (k < 0 || l < 0 || k >= sys.q || l >= sys.q) {
            throw validation_error("analyze: pair (" + std::to_string(k + 1) + ", " +
                                   std::to_string(l + 1) + ") out of range for q = " +
                                   std::to_string(sys.q));
        }
        auto pobs = is_pair_observable(sys, k, l, tol);
        auto pdet = is_pair_detectable(sys, k, l, tol);
        report.pairwise[canonical_pair(k, l)] =
            PairVerdict{pobs.pair_observable, pdet.pair_detectable, pobs.conductance_rank};
        if (!pobs.pair_observable && pobs.witness.size() > 0) {
            report.witnesses.push_back({"pair_" + pair_label(k, l) + "_observable", pobs.witness});
        }
        if (!pdet.pair_detectable && pdet.witness.size() > 0) {
            report.witnesses.push_back({"pair_" + pair_label(k, l) + "_detectable", pdet.witness});
        }
    }
    return report;
}

}  // namespace arrayobs
