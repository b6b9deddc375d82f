#include <doctest.h>

#include "arrayobs/spectral.hpp"
#include "paper_data.hpp"
#include "support.hpp"

using namespace arrayobs;
using namespace testsupport;

namespace {
const Tolerance tol;
}

TEST_CASE("eig_structure of the ring fixture matrix") {
    const auto eig = eig_structure(ring4_A(), tol);
    REQUIRE(eig.m() == 5);
    CHECK(eig.nonderogatory);

    // distinct eigenvalues {0, 1, -1, i, -i}; zero has algebraic multiplicity 2
    // but a one-dimensional eigenspace
    for (const auto& [mu, v_paper] : ring4_eigenvectors()) {
        const auto it = std::find_if(eig.entries.begin(), eig.entries.end(), [&](const EigEntry& e) {
            return std::abs(e.mu - mu) < 1e-5;
        });
        REQUIRE_MESSAGE(it != eig.entries.end(), "missing eigenvalue cluster");
        CHECK(it->geometric_mult == 1);
        CHECK(it->algebraic_mult == (std::abs(mu) < 0.5 ? 2 : 1));
        CHECK(span_distance(it->V, v_paper, tol) < 1e-6);
        CHECK((ring4_A() * it->V - mu * it->V).norm() < 1e-5);
    }
}

TEST_CASE("eig_structure of the nilpotent fixture matrix") {
    const auto eig = eig_structure(triangle3_A(), tol);
    REQUIRE(eig.m() == 1);
    CHECK(std::abs(eig.entries[0].mu) < 1e-9);
    CHECK(eig.entries[0].algebraic_mult == 4);
    CHECK(eig.entries[0].geometric_mult == 2);
    CHECK_FALSE(eig.nonderogatory);
    CHECK(span_distance(eig.entries[0].V, triangle3_V1(), tol) < 1e-10);
}

TEST_CASE("eig_structure of the identity") {
    const auto eig = eig_structure(CMatrix::Identity(3, 3), tol);
    REQUIRE(eig.m() == 1);
    CHECK(std::abs(eig.entries[0].mu - Complex(1, 0)) < 1e-12);
    CHECK(eig.entries[0].geometric_mult == 3);
    CHECK(eig.entries[0].algebraic_mult == 3);
}

TEST_CASE("clustering ambiguity is reported, not silently merged") {
    CMatrix A = CMatrix::Zero(2, 2);
    A(0, 0) = Complex(0.0, 0.0);
    A(1, 1) = Complex(1.5 * tol.eig_cluster_atol, 0.0);  // between one and two radii apart
    const auto eig = eig_structure(A, tol);
    CHECK(eig.m() == 2);
    CHECK_FALSE(eig.diagnostics.empty());
}

TEST_CASE("eigengraph construction") {
    const auto sys = ring4_system();
    const auto eig = eig_structure(sys.A, tol);
    REQUIRE(eig.m() == 5);

    SUBCASE("zero-eigenvalue eigengraph misses edge (1,2) despite a nonzero coupling") {
        const auto it = std::find_if(eig.entries.begin(), eig.entries.end(),
                                     [](const EigEntry& e) { return std::abs(e.mu) < 1e-5; });
        const std::size_t sigma = static_cast<std::size_t>(it - eig.entries.begin());
        const NGraph g = eigengraph(sys, sigma, eig);
        CHECK(g.n == 1);
        REQUIRE(g.has_weight(0, 1));
        // the computed basis is normalized, so compare against its scale
        CHECK(std::abs(g.weight(0, 1)(0, 0)) < 1e-10);
        CHECK(std::abs(g.weight(1, 2)(0, 0)) > 1e-4);
    }

    SUBCASE("all five eigengraphs are connected") {
        for (std::size_t sigma = 0; sigma < 5; ++sigma) {
            CHECK(is_connected(eigengraph(sys, sigma, eig), tol).connected);
        }
    }

    SUBCASE("zero couplings give all-zero eigengraphs") {
        const auto empty = make_array_system(3, ring4_A(), {});
        const auto eig_empty = eig_structure(empty.A, tol);
        for (std::size_t sigma = 0; sigma < eig_empty.entries.size(); ++sigma) {
            const NGraph g = eigengraph(empty, sigma, eig_empty);
            CHECK(g.weights.empty());
            CHECK_FALSE(is_connected(g, tol).connected);
        }
    }

    CHECK_THROWS_AS(eigengraph(sys, 99, eig), validation_error);
}

TEST_CASE("eigengraph verdicts are basis independent") {
    Rng rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        const auto sys = random_array(rng, 3, 3, 0.8, trial % 2 == 0);
        const auto eig = eig_structure(sys.A, tol);
        for (std::size_t sigma = 0; sigma < eig.entries.size(); ++sigma) {
            const CMatrix& V = eig.entries[sigma].V;
            const Eigen::Index ns = V.cols();
            CMatrix T = rng.matrix(ns, ns, true) + 2.0 * CMatrix::Identity(ns, ns);
            const NGraph g1 = eigengraph_with_basis(sys, V);
            const NGraph g2 = eigengraph_with_basis(sys, V * T);
            CHECK(is_connected(g1, tol).connected == is_connected(g2, tol).connected);
            for (int k = 0; k < sys.q; ++k) {
                for (int l = k + 1; l < sys.q; ++l) {
                    CHECK(is_pair_connected(g1, k, l, tol).connected ==
                          is_pair_connected(g2, k, l, tol).connected);
                }
            }
        }
    }
}

TEST_CASE("scalar identity: stacked powers against the geometric sum") {
    Rng rng(73);
    int checked = 0;
    for (int trial = 0; trial < 25; ++trial) {
        const int n = rng.integer(2, 4);
        const auto sys = random_array(rng, n, rng.integer(2, 4), 0.8, trial % 2 == 0);
        const auto eig = eig_structure(sys.A, tol);
        // keep instances with cleanly separated eigenvalues so the eigenvector
        // residual does not dominate the comparison
        double min_gap = 1e30;
        for (std::size_t a = 0; a < eig.entries.size(); ++a) {
            for (std::size_t b = a + 1; b < eig.entries.size(); ++b) {
                min_gap = std::min(min_gap, std::abs(eig.entries[a].mu - eig.entries[b].mu));
            }
        }
        if (eig.m() > 1 && min_gap < 0.1) continue;
        ++checked;
        for (const auto& entry : eig.entries) {
            double factor = 0.0;
            for (int r = 0; r < sys.n; ++r) factor += std::pow(std::abs(entry.mu), 2 * r);
            for (const auto& [key, C] : sys.couplings) {
                const CMatrix W = observability_matrix(C, sys.A);
                const CMatrix lhs = entry.V.adjoint() * W.adjoint() * W * entry.V;
                const CMatrix rhs = factor * entry.V.adjoint() * C.adjoint() * C * entry.V;
                CHECK((lhs - rhs).norm() <= 1e-7 * std::max({lhs.norm(), rhs.norm(), 1e-6}));
            }
        }
    }
    CHECK(checked >= 10);
}

TEST_CASE("disconnection is equivalent to a lifted null vector outside the sync subspace") {
    Rng rng(79);
    int disconnected_seen = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto sys = random_array(rng, rng.integer(2, 3), rng.integer(2, 4), rng.range(0.3, 1.0),
                                      trial % 2 == 0);
        const auto eig = eig_structure(sys.A, tol);
        const auto lv = laplacian(interconnection_graph(sys), tol);
        const CMatrix S = sync_subspace_basis(sys.q, sys.n);
        for (std::size_t sigma = 0; sigma < eig.entries.size(); ++sigma) {
            const NGraph g = eigengraph(sys, sigma, eig);
            const auto verdict = is_connected(g, tol);
            if (!verdict.connected) {
                ++disconnected_seen;
                // witness lifts to a Laplacian null vector outside the sync subspace
                REQUIRE(verdict.witness.size() == sys.q * eig.entries[sigma].V.cols());
                CVector zeta(sys.q * sys.n);
                const CMatrix& V = eig.entries[sigma].V;
                for (int i = 0; i < sys.q; ++i) {
                    zeta.segment(sys.n * i, sys.n) =
                        V * verdict.witness.segment(V.cols() * i, V.cols());
                }
                CHECK((lv.L * zeta).norm() <= 1e-7 * std::max(1.0, lv.L.norm()) * zeta.norm());
                CHECK((zeta - S * (S.adjoint() * zeta)).norm() > 1e-6 * zeta.norm());
            }
        }
    }
    CHECK(disconnected_seen > 0);
}
