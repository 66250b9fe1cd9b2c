#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace thermo {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct EigenPair {
    std::complex<double> lambda;
    Vector right;  // M right = lambda right
    Vector left;   // left^T M = lambda left^T, normalized left^T right = 1
    int iterations = 0;
    double residual = 0.0;  // max |M right - lambda right|
};

struct IterationOptions {
    double tol = 1e-12;
    int max_iterations = 100000;
    std::uint64_t seed = 20240531;
    // Relative size of the random perturbation added to the start vector.
    double perturbation = 1e-3;
};

// Power iteration for the dominant eigenvalue and both eigenvectors.
// `start` seeds the right iteration (typically the constant function).
EigenPair dominant_eigen(const Matrix& M, const Vector& start_right, const Vector& start_left,
                         const IterationOptions& opts = {});

// Asymptotic growth rate of ||M^n v|| from log-growth averaging over a
// sliding window; robust when several eigenvalues share the top modulus.
double growth_rate(const Matrix& M, const Vector& start, const IterationOptions& opts = {});

// Modulus of the largest eigenvalue after removing the rank-one spectral
// projection of `pair`.
double deflated_modulus(const Matrix& M, const EigenPair& pair, const IterationOptions& opts = {});

}  // namespace thermo
