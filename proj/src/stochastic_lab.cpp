#include "thermo/stochastic_lab.hpp"

#include <algorithm>
#include <cmath>

#include "thermo/errors.hpp"
#include "thermo/parallel.hpp"
#include "thermo/transfer_spectral.hpp"

namespace thermo {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return c;
}

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {
    counter_[2] = static_cast<std::uint32_t>(stream);
    counter_[3] = static_cast<std::uint32_t>(stream >> 32);
}

std::uint32_t Philox4x32::next_u32() {
    if (used_ == 4) {
        buffer_ = block(counter_, key_);
        if (++counter_[0] == 0) ++counter_[1];
        used_ = 0;
    }
    return buffer_[used_++];
}

double Philox4x32::next_double() {
    const std::uint64_t hi = next_u32() >> 5;  // 27 bits
    const std::uint64_t lo = next_u32() >> 6;  // 26 bits
    return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
}

double BirkhoffSample::mean() const {
    if (values.empty()) return 0.0;
    return pairwise_sum(values.data(), values.size()) / static_cast<double>(values.size());
}

double BirkhoffSample::variance() const {
    if (values.size() < 2) return 0.0;
    const double m = mean();
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - m) * (values[i] - m);
    return pairwise_sum(sq.data(), sq.size()) / static_cast<double>(values.size() - 1);
}

namespace {

// Orbit of a uniformly random angle under z^d read off an exact base-d
// expansion: F shifts the digits, and a sliding window of the next digits
// gives the angle to double precision at every step.
class DigitOrbit {
public:
    DigitOrbit(int d, Philox4x32& rng) : d_(static_cast<std::uint64_t>(d)), rng_(rng) {
        // largest window with d^w <= 2^63
        width_ = 0;
        std::uint64_t p = 1;
        while (p <= (static_cast<std::uint64_t>(1) << 63) / d_) {
            p *= d_;
            ++width_;
        }
        top_ = p / d_;
        scale_ = static_cast<double>(p);
        value_ = 0;
        for (int i = 0; i < width_; ++i) value_ = value_ * d_ + digit();
    }

    double angle() const { return kTwoPi * (static_cast<double>(value_) / scale_); }

    void step() { value_ = (value_ % top_) * d_ + digit(); }

private:
    std::uint64_t digit() {
        if (d_ == 2) {
            if (bits_left_ == 0) {
                bits_ = rng_.next_u32();
                bits_left_ = 32;
            }
            --bits_left_;
            return (bits_ >> bits_left_) & 1u;
        }
        return (static_cast<std::uint64_t>(rng_.next_u32()) * d_) >> 32;
    }

    std::uint64_t d_;
    Philox4x32& rng_;
    int width_ = 0;
    std::uint64_t top_ = 1;
    double scale_ = 1.0;
    std::uint64_t value_ = 0;
    std::uint32_t bits_ = 0;
    int bits_left_ = 0;
};

}  // namespace

BirkhoffSample birkhoff_samples(const BlaschkeMap& F, const TrigPolynomial& h, int n, int samples,
                                std::uint64_t seed, unsigned threads, OrbitIterator iterator) {
    if (n < 1 || samples < 1) fail(ErrorKind::InvalidArgument, "n and samples must be positive");
    if (static_cast<double>(n) * samples > 1e9) fail(ErrorKind::BudgetExceeded, "n * samples exceeds 1e9 steps");
    const bool digits_ok = F.is_monomial() && F.rotation() == 0.0 && F.degree() >= 2;
    if (iterator == OrbitIterator::ExactDigits && !digits_ok) {
        fail(ErrorKind::InvalidArgument, "the exact digit iterator needs a rotation-free monomial");
    }
    const bool use_digits = iterator == OrbitIterator::ExactDigits || (iterator == OrbitIterator::Automatic && digits_ok);
    BirkhoffSample out;
    out.n = n;
    out.seed = seed;
    out.observable = h.describe();
    out.mean_removed = grid_mean(h, 4096);
    out.values.assign(static_cast<std::size_t>(samples), 0.0);
    const double root_n = std::sqrt(static_cast<double>(n));
    parallel_for(static_cast<std::size_t>(samples), threads, [&](std::size_t i) {
        Philox4x32 rng(seed, i);
        double s = 0.0;
        if (use_digits) {
            DigitOrbit orbit(F.degree(), rng);
            for (int j = 0; j < n; ++j) {
                s += h(orbit.angle());
                orbit.step();
            }
        } else {
            double x = kTwoPi * rng.next_double();
            for (int j = 0; j < n; ++j) {
                s += h(x);
                x = F.boundary_map(x);
            }
        }
        out.values[i] = (s - n * out.mean_removed) / root_n;
    });
    return out;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_distance(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double c = standard_normal_cdf(values[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - c, c - static_cast<double>(i) / n});
    }
    return d;
}

CltDiagnostics clt_diagnostics(const BirkhoffSample& S, double sigma2) {
    if (sigma2 < 1e-12) fail(ErrorKind::DegenerateVariance, "variance vanishes: the observable is a coboundary");
    CltDiagnostics out;
    out.var_ratio = S.variance() / sigma2;
    std::vector<double> z = S.values;
    const double sd = std::sqrt(sigma2);
    for (double& v : z) v /= sd;
    out.ks_stat = ks_distance(std::move(z));
    return out;
}

GreenKubo green_kubo_variance(const BlaschkeMap& F, const TrigPolynomial& h, int k_max) {
    if (k_max < 1 || k_max > 64) fail(ErrorKind::InvalidArgument, "k_max must lie in [1, 64]");
    GreenKubo out;
    out.correlations = lebesgue_correlations(F, h.centered(), k_max);
    const auto& c = out.correlations;
    out.sigma2 = c[0];
    for (int k = 1; k <= k_max; ++k) out.sigma2 += 2.0 * c[k];
    const double last = std::abs(c[k_max]);
    const double before = std::abs(c[k_max - 1]);
    const double scale = std::max(std::abs(c[0]), 1e-300);
    if (last > 1e-14 * scale) {
        const double r = before > 0.0 ? last / before : 1.0;
        if (r >= 1.0) fail(ErrorKind::NonDecaying, "correlations do not decay");
        out.truncation_error = 2.0 * last * r / (1.0 - r);
    }
    return out;
}

}  // namespace thermo
