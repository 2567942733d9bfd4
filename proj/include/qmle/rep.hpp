#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "qmle/rng.hpp"

namespace qmle {

using complexd = std::complex<double>;

enum class Field { Real, Complex };

// Numerical tolerances shared across the floating-point checkers. All the
// "rel" quantities are relative to the natural scale of the object they gate.
struct Tolerances {
    double rank = 1e-8;      // singular values below rank*sigma_max count as zero
    double end = 1e-8;       // morphism / subrepresentation residual
    double eig = 1e-6;       // eigenvalue clustering, relative to spectral radius
    double block = 1e-8;     // off-block mass, relative to ||Y||_F
    double collapse = 1e-12; // blow-down / singular-update detection
    double stat = 1e-8;      // flip-flop stationarity residual
    double unique = 1e-6;    // MLE product comparison across starts
};

inline const Tolerances& default_tols() {
    static const Tolerances t{};
    return t;
}

// An m-tuple of p x q matrices: simultaneously the sample data of a matrix
// normal model and a representation of the m-Kronecker quiver. Entries are
// stored complex; when field == Real every imaginary part is zero and the
// checkers run in real arithmetic.
struct RepTuple {
    int p = 0;
    int q = 0;
    int m = 0;
    Field field = Field::Real;
    std::vector<Eigen::MatrixXcd> matrices;

    bool well_formed() const {
        if (p < 1 || q < 1 || m < 1) return false;
        if (static_cast<int>(matrices.size()) != m) return false;
        for (const auto& M : matrices) {
            if (M.rows() != p || M.cols() != q) return false;
            if (!M.allFinite()) return false;
        }
        return true;
    }

    double norm() const {
        double s = 0;
        for (const auto& M : matrices) s += M.squaredNorm();
        return std::sqrt(s);
    }

    bool is_zero(double tol = 0.0) const { return norm() <= tol; }

    std::vector<Eigen::MatrixXd> real_matrices() const {
        std::vector<Eigen::MatrixXd> out;
        out.reserve(matrices.size());
        for (const auto& M : matrices) out.push_back(M.real());
        return out;
    }
};

inline RepTuple make_rep(std::vector<Eigen::MatrixXd> mats) {
    RepTuple Y;
    Y.m = static_cast<int>(mats.size());
    if (!mats.empty()) {
        Y.p = static_cast<int>(mats[0].rows());
        Y.q = static_cast<int>(mats[0].cols());
    }
    Y.field = Field::Real;
    for (auto& M : mats) Y.matrices.emplace_back(M.cast<complexd>());
    return Y;
}

inline RepTuple make_rep(std::vector<Eigen::MatrixXcd> mats) {
    RepTuple Y;
    Y.m = static_cast<int>(mats.size());
    if (!mats.empty()) {
        Y.p = static_cast<int>(mats[0].rows());
        Y.q = static_cast<int>(mats[0].cols());
    }
    Y.field = Field::Complex;
    Y.matrices = std::move(mats);
    return Y;
}

inline Eigen::MatrixXd gaussian_matrix(int rows, int cols, std::mt19937_64& eng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) M(i, j) = g(eng);
    return M;
}

inline Eigen::MatrixXcd gaussian_matrix_complex(int rows, int cols, std::mt19937_64& eng) {
    std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(2.0));
    Eigen::MatrixXcd M(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) M(i, j) = complexd(g(eng), g(eng));
    return M;
}

// Independent standard Gaussian entries; absolutely continuous, so almost
// surely generic.
inline RepTuple sample_gaussian(int p, int q, int m, Field field, std::uint64_t seed) {
    auto eng = make_engine(seed);
    RepTuple Y;
    Y.p = p;
    Y.q = q;
    Y.m = m;
    Y.field = field;
    for (int i = 0; i < m; ++i) {
        if (field == Field::Real)
            Y.matrices.emplace_back(gaussian_matrix(p, q, eng).cast<complexd>());
        else
            Y.matrices.emplace_back(gaussian_matrix_complex(p, q, eng));
    }
    return Y;
}

}  // namespace qmle
