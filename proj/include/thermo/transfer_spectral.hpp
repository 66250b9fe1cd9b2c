#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thermo/blaschke.hpp"
#include "thermo/eigen_iteration.hpp"
#include "thermo/observable.hpp"

namespace thermo {

// Fourier-collocation matrix of the weighted transfer operator
//   (L f)(alpha) = sum_{F(y) = alpha} |F'(y)|^{-s} e^{s g(y)} f(y)
// on the modes n = -N/2 .. N/2 - 1.  Column n holds the coefficients of L e_n.
struct OperatorMatrix {
    int N = 0;
    Matrix entries;
    std::string map_id;
    std::string potential;
    cplx s = 1.0;

    int mode_offset() const { return N / 2; }
    int index_of(int mode) const { return mode + N / 2; }
};

OperatorMatrix assemble_operator(const BlaschkeMap& F, cplx s, const TrigPolynomial* g, int N,
                                 unsigned threads = 1);

struct SpectralData {
    cplx lambda;
    Vector rho;      // Fourier coefficients of the eigenfunction, m(rho) = 1
    Vector moments;  // moments[k] = integral of e_k against the conformal measure
    double gap = 0.0;       // |lambda_2| / |lambda|
    double residual = 0.0;  // max coefficient of L rho - lambda rho
    int N = 0;
    int iterations = 0;

    double rho_at(double theta) const;
    // Density of the conformal measure with respect to Lebesgue.
    double conformal_density_at(double theta) const;
    // Conformal weights on the uniform grid of the given size; total mass 1.
    std::vector<double> conformal_weights(int grid) const;
};

SpectralData leading_eigen(const OperatorMatrix& M, double tol = 1e-12);

double subleading_modulus(const OperatorMatrix& M, const SpectralData& S, double tol = 1e-7);

struct PressureDerivatives {
    double p0 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double mean_prediction = 0.0;      // integral of g against Lebesgue
    double variance_prediction = 0.0;  // Green-Kubo sigma^2
    double worst_gap = 0.0;            // largest subleading ratio over the stencil
};

// P(t) = log lambda(L_{-log|F'| + t g}) differentiated at t = 0 on the
// five-point stencil {0, +-h, +-2h}.
PressureDerivatives pressure_and_derivs(const BlaschkeMap& F, const TrigPolynomial& g, double h = 1e-2,
                                        int N = 128, unsigned threads = 1);

// Conformal and equilibrium data for the potential g - log|F'|.
SpectralData conformal_equilibrium(const BlaschkeMap& F, const TrigPolynomial& g, int N = 128,
                                   unsigned threads = 1);

// |integral e_n o F d mu - integral e_n d mu| for mu = rho m.
double equilibrium_invariance_residual(const BlaschkeMap& F, const SpectralData& S, int n, int grid = 8192);

// Correlations C_k = integral h (h o F^k) dm for k = 0..k_max, computed by
// duality as integral (L^k h) h dm with the exact unweighted operator.
std::vector<double> lebesgue_correlations(const BlaschkeMap& F, const TrigPolynomial& h, int k_max);

// Spectrum report row for the CSV export.
struct SpectrumRow {
    cplx s;
    cplx lambda;
    double gap;
    double residual;
};

}  // namespace thermo
