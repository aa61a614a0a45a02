#pragma once

#include <cstddef>
#include <vector>

#include "polynomial.hpp"
#include "spectral_measure.hpp"

namespace specgap {

// Dense square matrix, row-major. Small dimensions only.
class Matrix {
public:
    explicit Matrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    std::size_t dim() const { return n_; }
    double& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    bool is_symmetric(double tol) const;
    double frobenius() const;

private:
    std::size_t n_;
    std::vector<double> a_;
};

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;
};

struct EigenDecomposition {
    std::vector<double> values;        // ascending
    std::vector<std::vector<double>> vectors; // vectors[i] for values[i]
};

struct ToeplitzSpectrum {
    double sigma2 = 0.0;
    Polynomial minimizer; // real coefficients, unit coefficient norm
    std::size_t dim = 0;  // N + 1
    // sigma2 = 0 holds exactly (the matrix is structurally rank-deficient),
    // as opposed to a least eigenvalue that merely underflowed
    bool exact_zero = false;
};

struct RhoValue {
    int n = 0;
    double rho2 = 0.0;
    std::vector<double> minimizer_moments; // a_1..a_n of P(y) = 1 + sum a_k y^k
    double condition_estimate = 0.0;
};

// (N+1)x(N+1) symmetric Toeplitz matrix with first row k(0), ..., k(N).
Matrix build_toeplitz(const SpectralMeasure& mu, std::size_t N);

// Cyclic Jacobi to off-diagonal norm < 1e-14 * ||A||.
EigenDecomposition jacobi_eigen(const Matrix& A);

// Least eigenpair; degenerate minima are broken by the lexicographically
// largest absolute-value eigenvector, then the sign is fixed so the first
// nonzero component is positive.
EigenPair min_eigenpair(const Matrix& A);

// sigma^2 and the minimizing polynomial for a measure supported in the unit
// band (1/4, 1/2].
ToeplitzSpectrum sigma_for_band(const SpectralMeasure& mu_unit, std::size_t N);

// rho_n^2 = min { integral |1 + sum a_k y^k|^2 d mu } via the Hankel moment
// matrix G_{jk} = integral y^{j+k} d mu. Gate guards Hankel ill-conditioning.
RhoValue rho(const SpectralMeasure& mu, int n, int n_gate = 12);

} // namespace specgap
