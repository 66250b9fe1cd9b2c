#include "thermo/eigen_iteration.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "thermo/errors.hpp"

namespace thermo {

namespace {

void perturb(Vector& v, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double norm = std::max(v.cwiseAbs().maxCoeff(), 1.0);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += scale * norm * std::complex<double>(u(rng), u(rng));
}

struct PowerResult {
    std::complex<double> lambda;
    Vector vec;
    int iterations;
};

PowerResult power(const Matrix& M, Vector v, const IterationOptions& opts) {
    v.normalize();
    // Stop on the eigen-residual |M v - rq v|; the Rayleigh quotient alone
    // converges quadratically and would stop with a lagging vector.  When
    // rounding sets a floor above tol, accept the best residual once it has
    // not improved for a while.
    double best = std::numeric_limits<double>::infinity();
    int since_best = 0;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        Vector w = M * v;
        const std::complex<double> rq = v.dot(w);  // v^H M v with |v| = 1
        const double nw = w.norm();
        if (nw == 0.0) return {0.0, v, it};
        const double res = (w - rq * v).norm();
        const double scale = std::max(1.0, std::abs(rq));
        v = w / nw;
        if (res < best) {
            best = res;
            since_best = 0;
        } else {
            ++since_best;
        }
        if (res <= opts.tol * scale || (since_best >= 200 && best <= 1e3 * opts.tol * scale)) {
            // fix the phase so that results are reproducible
            Eigen::Index k;
            v.cwiseAbs().maxCoeff(&k);
            v *= std::abs(v[k]) / v[k];
            return {rq, v, it};
        }
    }
    fail(ErrorKind::NoConvergence, "power iteration did not converge within the iteration budget");
}

}  // namespace

EigenPair dominant_eigen(const Matrix& M, const Vector& start_right, const Vector& start_left,
                         const IterationOptions& opts) {
    Vector r0 = start_right;
    Vector l0 = start_left;
    perturb(r0, opts.seed, opts.perturbation);
    perturb(l0, opts.seed + 1, opts.perturbation);
    PowerResult right = power(M, r0, opts);
    PowerResult left = power(M.transpose(), l0, opts);
    EigenPair out;
    out.lambda = right.lambda;
    out.right = right.vec;
    out.left = left.vec;
    const std::complex<double> pairing = (out.left.transpose() * out.right)(0);
    if (std::abs(pairing) < 1e-300) fail(ErrorKind::NoConvergence, "left and right eigenvectors are orthogonal");
    out.left /= pairing;
    out.iterations = std::max(right.iterations, left.iterations);
    out.residual = (M * out.right - out.lambda * out.right).cwiseAbs().maxCoeff();
    return out;
}

double growth_rate(const Matrix& M, const Vector& start, const IterationOptions& opts) {
    constexpr int window = 64;
    Vector v = start;
    perturb(v, opts.seed + 7, 1.0);
    double nv = v.norm();
    if (nv == 0.0) return 0.0;
    v /= nv;
    const double scale = std::max(M.cwiseAbs().maxCoeff(), 1e-300);
    // cumulative log-norms; the estimate averages over the second half of
    // the run so transients decay geometrically and bounded oscillations
    // from equal-modulus eigenvalues decay like 1/k
    std::vector<double> cum{0.0};
    double prev_est = -1.0;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        Vector w = M * v;
        const double nw = w.norm();
        // A nilpotent or numerically null operator collapses the iterate.
        if (nw <= 1e-13 * scale) return nw;
        cum.push_back(cum.back() + std::log(nw));
        v = w / nw;
        if (it >= 2 * window && it % window == 0) {
            const int half = it / 2;
            const double est = std::exp((cum[it] - cum[half]) / (it - half));
            if (prev_est >= 0.0 &&
                std::abs(est - prev_est) < std::max(opts.tol, 1e-14) * std::max(est, 1e-300)) {
                return est;
            }
            prev_est = est;
        }
    }
    fail(ErrorKind::NoConvergence, "growth-rate estimate did not settle within the iteration budget");
}

double deflated_modulus(const Matrix& M, const EigenPair& pair, const IterationOptions& opts) {
    Matrix D = M - pair.lambda * pair.right * pair.left.transpose();
    Vector start = Vector::Ones(M.rows());
    return growth_rate(D, start, opts);
}

}  // namespace thermo
