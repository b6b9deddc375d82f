#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <doctest.h>

#include "arrayobs/array_model.hpp"
#include "arrayobs/numerics.hpp"

namespace testsupport {

using namespace arrayobs;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(bool(in), "cannot open ", path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline std::string fixture_path(const std::string& name) {
    return std::string(ARRAYOBS_FIXTURES_DIR) + "/" + name;
}

inline CMatrix real_matrix(std::initializer_list<std::initializer_list<double>> rows) {
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = static_cast<Eigen::Index>(rows.begin()->size());
    CMatrix M(r, c);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double v : row) M(i, j++) = Complex(v, 0.0);
        ++i;
    }
    return M;
}

class Rng {
public:
    explicit Rng(uint64_t seed) : rng_(seed) {}

    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
    int integer(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(unit() * (hi - lo + 1));
    }
    Complex scalar(bool complex_entries) {
        const double re = range(-1.0, 1.0);
        return complex_entries ? Complex(re, range(-1.0, 1.0)) : Complex(re, 0.0);
    }
    CMatrix matrix(Eigen::Index r, Eigen::Index c, bool complex_entries) {
        CMatrix M(r, c);
        for (Eigen::Index i = 0; i < r; ++i) {
            for (Eigen::Index j = 0; j < c; ++j) M(i, j) = scalar(complex_entries);
        }
        return M;
    }

    std::mt19937_64& raw() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// Random array with a given coupling density; roughly half the instances are complex.
inline ArraySystem random_array(Rng& rng, int n, int q, double density, bool complex_entries) {
    CMatrix A = rng.matrix(n, n, complex_entries);
    std::map<PairKey, CMatrix> couplings;
    for (int i = 0; i < q; ++i) {
        for (int j = i + 1; j < q; ++j) {
            if (rng.unit() >= density) continue;
            const int m = rng.integer(1, n);
            couplings[{i, j}] = rng.matrix(m, n, complex_entries);
        }
    }
    return make_array_system(q, std::move(A), std::move(couplings));
}

/// Random diagonalizable A with prescribed eigenvalues (well-conditioned basis).
inline CMatrix matrix_with_eigenvalues(Rng& rng, const std::vector<Complex>& eigs,
                                       bool complex_entries) {
    const int n = static_cast<int>(eigs.size());
    CMatrix D = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) D(i, i) = eigs[i];
    // a basis near the identity keeps the eigenvector conditioning mild
    CMatrix T = CMatrix::Identity(n, n) + 0.3 * rng.matrix(n, n, complex_entries);
    return T * D * T.inverse();
}

}  // namespace testsupport
