#include "thermo/transfer_spectral.hpp"

#include <cmath>

#include "thermo/errors.hpp"
#include "thermo/parallel.hpp"

namespace thermo {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Vector unit_mode(int N, int mode) {
    Vector v = Vector::Zero(N);
    v[mode + N / 2] = 1.0;
    return v;
}

}  // namespace

OperatorMatrix assemble_operator(const BlaschkeMap& F, cplx s, const TrigPolynomial* g, int N,
                                 unsigned threads) {
    if (!is_power_of_two(N) || N < 32 || N > 4096) {
        fail(ErrorKind::InvalidArgument, "N must be a power of two in [32, 4096]");
    }
    const int Q = 2 * N;
    const int half = N / 2;
    // V(j, n) = sum over preimages y of alpha_j of w(y) e^{i n y}
    Matrix V(Q, N);
    parallel_for(static_cast<std::size_t>(Q), threads, [&](std::size_t j) {
        const double alpha = kTwoPi * static_cast<double>(j) / Q;
        for (int n = 0; n < N; ++n) V(j, n) = 0.0;
        for (double y : boundary_preimages(F, CirclePoint(alpha))) {
            cplx logw = -s * std::log(F.boundary_derivative(y));
            if (g) logw += s * (*g)(y);
            const cplx w = std::exp(logw);
            const cplx step = std::polar(1.0, y);
            cplx e = w * std::polar(1.0, -half * y);
            for (int n = 0; n < N; ++n) {
                V(j, n) += e;
                e *= step;
            }
        }
    });
    Matrix E(N, Q);
    for (int k = 0; k < N; ++k) {
        for (int j = 0; j < Q; ++j) {
            // exact reduction of k*j modulo Q keeps the phases accurate
            const long kj = static_cast<long>(k - half) * j;
            const long r = ((kj % Q) + Q) % Q;
            E(k, j) = std::polar(1.0 / Q, -kTwoPi * static_cast<double>(r) / Q);
        }
    }
    OperatorMatrix out;
    out.N = N;
    out.entries = E * V;
    out.map_id = F.describe();
    out.potential = g ? g->describe() : "0";
    out.s = s;
    return out;
}

double SpectralData::rho_at(double theta) const {
    const int half = N / 2;
    cplx v = 0.0;
    for (int i = 0; i < N; ++i) v += rho[i] * std::polar(1.0, (i - half) * theta);
    return v.real();
}

double SpectralData::conformal_density_at(double theta) const {
    const int half = N / 2;
    cplx v = 0.0;
    for (int i = 0; i < N; ++i) v += moments[i] * std::polar(1.0, -(i - half) * theta);
    return v.real();
}

std::vector<double> SpectralData::conformal_weights(int grid) const {
    std::vector<double> w(static_cast<std::size_t>(grid));
    for (int j = 0; j < grid; ++j) w[j] = conformal_density_at(kTwoPi * j / grid) / grid;
    const double total = pairwise_sum(w.data(), w.size());
    for (double& x : w) x /= total;
    return w;
}

SpectralData leading_eigen(const OperatorMatrix& M, double tol) {
    if (!(tol >= 1e-12)) fail(ErrorKind::InvalidArgument, "tolerance must be at least 1e-12");
    IterationOptions opts;
    opts.tol = tol;
    const Vector e0 = unit_mode(M.N, 0);
    EigenPair pair = dominant_eigen(M.entries, e0, e0, opts);
    SpectralData out;
    out.N = M.N;
    out.lambda = pair.lambda;
    const cplx mass = pair.left[M.index_of(0)];
    if (std::abs(mass) < 1e-300) fail(ErrorKind::NoConvergence, "conformal eigenvector has zero mass");
    out.moments = pair.left / mass;
    out.rho = pair.right * mass;
    out.residual = (M.entries * out.rho - out.lambda * out.rho).cwiseAbs().maxCoeff();
    out.iterations = pair.iterations;
    IterationOptions sub = opts;
    sub.tol = std::max(tol, 1e-7);
    out.gap = deflated_modulus(M.entries, pair, sub) / std::abs(out.lambda);
    return out;
}

double subleading_modulus(const OperatorMatrix& M, const SpectralData& S, double tol) {
    EigenPair pair;
    pair.lambda = S.lambda;
    pair.right = S.rho;
    pair.left = S.moments;
    IterationOptions opts;
    opts.tol = tol;
    return deflated_modulus(M.entries, pair, opts);
}

std::vector<double> lebesgue_correlations(const BlaschkeMap& F, const TrigPolynomial& h, int k_max) {
    int N = 32;
    while (N < 2 * (h.degree() + 1)) N *= 2;
    const OperatorMatrix M = assemble_operator(F, 1.0, nullptr, N);
    const int half = N / 2;
    Vector v = Vector::Zero(N);
    Vector dual = Vector::Zero(N);
    for (int n = -h.degree(); n <= h.degree(); ++n) {
        v[n + half] = h.fourier_coefficient(n);
        dual[n + half] = h.fourier_coefficient(-n);
    }
    std::vector<double> out;
    for (int k = 0; k <= k_max; ++k) {
        out.push_back((dual.transpose() * v)(0).real());
        v = M.entries * v;
    }
    return out;
}

namespace {

double green_kubo_sum(const std::vector<double>& c) {
    double s = c.empty() ? 0.0 : c[0];
    for (std::size_t k = 1; k < c.size(); ++k) s += 2.0 * c[k];
    return s;
}

}  // namespace

PressureDerivatives pressure_and_derivs(const BlaschkeMap& F, const TrigPolynomial& g, double h, int N,
                                        unsigned threads) {
    if (!(h >= 1e-4 && h <= 1e-2)) fail(ErrorKind::InvalidArgument, "step h must lie in [1e-4, 1e-2]");
    const double ts[5] = {-2 * h, -h, 0.0, h, 2 * h};
    double P[5];
    PressureDerivatives out;
    for (int i = 0; i < 5; ++i) {
        const TrigPolynomial gt = g.scaled(ts[i]);
        const OperatorMatrix M = assemble_operator(F, 1.0, &gt, N, threads);
        const SpectralData S = leading_eigen(M, 1e-12);
        if (S.gap > 0.95) fail(ErrorKind::GapLost, "subleading ratio exceeds 0.95 on the stencil");
        out.worst_gap = std::max(out.worst_gap, S.gap);
        P[i] = std::log(std::abs(S.lambda));
    }
    out.p0 = P[2];
    out.p1 = (8.0 * (P[3] - P[1]) - (P[4] - P[0])) / (12.0 * h);
    out.p2 = (-P[4] + 16.0 * P[3] - 30.0 * P[2] + 16.0 * P[1] - P[0]) / (12.0 * h * h);
    out.mean_prediction = g.constant_term();
    out.variance_prediction = green_kubo_sum(lebesgue_correlations(F, g.centered(), 64));
    return out;
}

SpectralData conformal_equilibrium(const BlaschkeMap& F, const TrigPolynomial& g, int N, unsigned threads) {
    const OperatorMatrix M = assemble_operator(F, 1.0, &g, N, threads);
    SpectralData S = leading_eigen(M, 1e-12);
    if (S.gap > 0.95) fail(ErrorKind::GapLost, "subleading ratio exceeds 0.95");
    return S;
}

double equilibrium_invariance_residual(const BlaschkeMap& F, const SpectralData& S, int n, int grid) {
    std::vector<double> a(static_cast<std::size_t>(grid)), b(static_cast<std::size_t>(grid));
    std::vector<double> ai(static_cast<std::size_t>(grid)), bi(static_cast<std::size_t>(grid));
    for (int j = 0; j < grid; ++j) {
        const double th = kTwoPi * j / grid;
        const double w = S.rho_at(th) * S.conformal_density_at(th);
        const double fth = F.lift(th);
        a[j] = w * std::cos(n * fth);
        ai[j] = w * std::sin(n * fth);
        b[j] = w * std::cos(n * th);
        bi[j] = w * std::sin(n * th);
    }
    const double re = (pairwise_sum(a.data(), a.size()) - pairwise_sum(b.data(), b.size())) / grid;
    const double im = (pairwise_sum(ai.data(), ai.size()) - pairwise_sum(bi.data(), bi.size())) / grid;
    return std::hypot(re, im);
}

}  // namespace thermo
