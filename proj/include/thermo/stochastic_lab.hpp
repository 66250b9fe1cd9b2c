#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "thermo/blaschke.hpp"
#include "thermo/observable.hpp"

namespace thermo {

// Philox4x32-10 counter-based generator.  Stream i of a seed is an
// independent sequence, so sample i draws the same numbers regardless of
// which thread runs it.
class Philox4x32 {
public:
    Philox4x32(std::uint64_t seed, std::uint64_t stream);

    std::uint32_t next_u32();
    // Uniform double in [0, 1) with 53 random bits.
    double next_double();

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                              std::array<std::uint32_t, 2> key);

private:
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_{};
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

enum class OrbitIterator {
    Automatic,  // exact digit shift for rotation-free monomials, else floating point
    Floating,
    ExactDigits,
};

struct BirkhoffSample {
    int n = 0;
    std::uint64_t seed = 0;
    std::string observable;
    double mean_removed = 0.0;
    std::vector<double> values;  // S_n h(x) / sqrt(n)

    double mean() const;
    double variance() const;  // unbiased sample variance
};

BirkhoffSample birkhoff_samples(const BlaschkeMap& F, const TrigPolynomial& h, int n, int samples,
                                std::uint64_t seed, unsigned threads = 1,
                                OrbitIterator iterator = OrbitIterator::Automatic);

struct CltDiagnostics {
    double ks_stat = 0.0;
    double var_ratio = 0.0;
};

double standard_normal_cdf(double x);
// Kolmogorov-Smirnov distance of the sample to N(0, 1).
double ks_distance(std::vector<double> values);

CltDiagnostics clt_diagnostics(const BirkhoffSample& S, double sigma2);

struct GreenKubo {
    double sigma2 = 0.0;
    double truncation_error = 0.0;
    std::vector<double> correlations;  // C_0 .. C_kmax
};

GreenKubo green_kubo_variance(const BlaschkeMap& F, const TrigPolynomial& h, int k_max = 64);

}  // namespace thermo
