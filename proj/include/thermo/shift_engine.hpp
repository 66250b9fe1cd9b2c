#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "thermo/counting_ledger.hpp"
#include "thermo/eigen_iteration.hpp"
#include "thermo/markov_coding.hpp"

namespace thermo {

// Subshift of finite type on letters 1..M (stored 0-based internally).
class SymbolicSystem {
public:
    SymbolicSystem(int alphabet_size, std::vector<std::vector<int>> incidence);

    static SymbolicSystem full(int M);

    int alphabet_size() const { return M_; }
    // Is the two-letter word (a, b) admissible?  0-based letters.
    bool allowed(int a, int b) const { return A_[static_cast<std::size_t>(a) * M_ + b] != 0; }
    std::vector<std::vector<int>> incidence() const;

private:
    int M_;
    std::vector<std::uint8_t> A_;
};

// Locally constant potential: psi(omega) depends on the first `depth`
// letters.  values[code] with code = sum u_i M^{depth-1-i} over 0-based
// letters; entries for inadmissible words are ignored.
struct PotentialSpec {
    int depth = 1;
    std::vector<double> values;
    double alpha = 1.0;     // Holder exponent
    double v_alpha = 0.0;   // Holder constant of the discarded remainder
    double tail_mass = 0.0; // bound on the sum of sup e^psi over dropped letters

    double value(std::uint64_t code) const { return values.at(code); }
};

// Depth-1 potential psi(a) = log p_a.
PotentialSpec bernoulli_potential(const std::vector<double>& weights);
// Depth-1 constant potential.
PotentialSpec constant_potential(int M, double value);
// Letters n = 1..M with psi = -2 log n (uncalibrated); tail mass bound 1/M.
PotentialSpec gauss_like_potential(int M);

// Admissible words of length `depth`, the states of the cylinder matrices.
class StateSpace {
public:
    StateSpace(const SymbolicSystem& S, int depth);

    int depth() const { return depth_; }
    std::size_t size() const { return codes_.size(); }
    std::uint64_t code(std::size_t i) const { return codes_[i]; }
    const std::vector<int>& word(std::size_t i) const { return words_[i]; }
    std::optional<std::size_t> index(std::uint64_t code) const;
    std::uint64_t code_of(const std::vector<int>& letters) const;

private:
    int depth_;
    int M_;
    std::vector<std::uint64_t> codes_;
    std::vector<std::vector<int>> words_;
    std::unordered_map<std::uint64_t, std::size_t> lookup_;
};

struct PrimitivityWitness {
    int length = 0;
    std::vector<Word> words;  // 1-based letters
};

PrimitivityWitness check_finitely_primitive(const SymbolicSystem& S, int max_len);

struct SummabilityStats {
    double inf_sum = 0.0;
    double sup_sum = 0.0;
    double integral = 0.0;
    double ratio = 0.0;  // sup_sum / integral
};

SummabilityStats summability_stats(const SymbolicSystem& S, const PotentialSpec& psi, double s, double p);

// Matrix of g -> sum_a psi^p e^{s psi}(a omega) g(a omega) on depth-k states.
struct CylinderMatrix {
    cplx s = 1.0;
    double p = 0.0;
    Matrix entries;
};

CylinderMatrix cylinder_operator(const SymbolicSystem& S, const PotentialSpec& psi, cplx s, double p);

struct ShiftSpectralData {
    cplx lambda;
    Vector rho;  // eigenfunction on states, nu^T rho = 1
    Vector nu;   // conformal masses of the depth-k cylinders, sum 1
    double gap = 0.0;
    double residual = 0.0;
};

ShiftSpectralData spectral_data(const SymbolicSystem& S, const PotentialSpec& psi, cplx s);
// Growth rate of L_s, valid even when several eigenvalues share the top modulus.
double spectral_radius(const SymbolicSystem& S, const PotentialSpec& psi, cplx s);
bool has_peripheral_eigenvalue(const SymbolicSystem& S, const PotentialSpec& psi, cplx s);

// log lambda(s psi) for real s.
double shift_pressure(const SymbolicSystem& S, const PotentialSpec& psi, double s);
// Shifts psi by -P(psi) so that the pressure vanishes.
PotentialSpec calibrate(const SymbolicSystem& S, const PotentialSpec& psi);

struct ShiftPressureDerivatives {
    double p1 = 0.0;        // from differences of log lambda_s, s >= 1
    double p2 = 0.0;
    double integral = 0.0;  // integral of psi against the equilibrium state
    double green_kubo = 0.0;
};

ShiftPressureDerivatives pressure_derivs_shift(const SymbolicSystem& S, const PotentialSpec& psi);

struct EtaResult {
    cplx series;      // partial sums of L_s^n f_s at xi
    cplx resolvent;   // (1 - lambda)^{-1} R f + sum Delta^n f
    bool series_converged = false;
    long terms = 0;
};

// Poincare series at the seed word xi; offset is a depth-k function on
// states (empty means zero).
EtaResult poincare_eta(const SymbolicSystem& S, const PotentialSpec& psi, const std::vector<double>& offset,
                       cplx s, const Word& xi);

// Symbolic systems seen as trees of prefixed words, for exact counting.
struct PrefixState {
    std::uint64_t code = 0;
    double point = 0.0;
};

struct PrefixChild {
    int letter = 0;  // 1-based
    PrefixState state;
    double cost = 0.0;  // the new term of the Birkhoff sum of -psi
};

class PrefixSystem {
public:
    virtual ~PrefixSystem() = default;
    virtual PrefixState root() const = 0;
    virtual void children(const PrefixState& state, std::vector<PrefixChild>& out) const = 0;
    // Letters of the seed word xi; long enough for the cylinder tests.
    virtual const Word& seed_word() const = 0;
};

class LocallyConstantPrefix : public PrefixSystem {
public:
    LocallyConstantPrefix(const SymbolicSystem& S, const PotentialSpec& psi, Word xi);
    PrefixState root() const override;
    void children(const PrefixState& state, std::vector<PrefixChild>& out) const override;
    const Word& seed_word() const override { return xi_; }

private:
    const SymbolicSystem& S_;
    const PotentialSpec& psi_;
    Word xi_;
    std::uint64_t top_ = 1;  // M^{depth-1}
};

// Coded circle system of a Blaschke product: a letter picks the inverse
// branch on the matching partition arc and psi = -log|F'| is evaluated
// exactly at the coded point.
class CodedCirclePrefix : public PrefixSystem {
public:
    CodedCirclePrefix(const MarkovPartition& P, CirclePoint x, int seed_depth = 16);
    PrefixState root() const override;
    void children(const PrefixState& state, std::vector<PrefixChild>& out) const override;
    const Word& seed_word() const override { return xi_; }

private:
    const MarkovPartition& P_;
    CirclePoint x_;
    Word xi_;
};

// Counts words omega with omega xi in B and S(-psi)(omega xi) <= T.
// B is a union of cylinders (empty list means everything).
CountingLedger count_words(const PrefixSystem& system, double T, const std::vector<Word>& B,
                           unsigned threads = 1, std::uint64_t node_budget = 10000000);

struct LatticeVerdict {
    bool lattice = false;
    double generator = 0.0;
    int period_reached = 0;
    std::size_t samples = 0;
};

// Are all values integer multiples of a common a > 0, within tol?
LatticeVerdict detect_lattice(const std::vector<double>& values, double tol = 1e-9, long max_denominator = 1000);

LatticeVerdict d_genericity(const SymbolicSystem& S, const PotentialSpec& psi, int max_period, double tol = 1e-9);

struct HolderFit {
    double constant = 0.0;
    double exponent = 0.0;
    std::vector<double> steps;
    std::vector<double> differences;
};

HolderFit holder_modulus_in_s(const SymbolicSystem& S, const PotentialSpec& psi, double q, cplx s0, double radius);

}  // namespace thermo
