#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "thermo/counting_ledger.hpp"

namespace thermo {

struct Pole {
    double b;
    double t;
};

// F(z) = z - sum t_i / (z - b_i), a doubly parabolic self-map of the upper
// half-plane with Denjoy-Wolff point at infinity.
class ParabolicMap {
public:
    explicit ParabolicMap(std::vector<Pole> poles);

    const std::vector<Pole>& poles() const { return poles_; }
    double a() const { return a_; }
    double min_pole() const { return poles_.front().b; }
    double max_pole() const { return poles_.back().b; }

    double eval(double x) const;
    double derivative(double x) const;
    // log F'(x), accurate near the poles.
    double log_derivative(double x) const;

    // The n + 1 real solutions of F(x) = y, ascending.
    std::vector<double> preimages(double y) const;
    // Outermost solution on the given side (+1 right, -1 left).
    double outer_preimage(double y, int side) const;
    // Solution of F(x) = y in the interval between poles `branch` - 1 and
    // `branch` (branch 0 is the leftmost unbounded interval).
    double branch_preimage(double y, std::size_t branch) const;

private:
    std::vector<Pole> poles_;
    double a_;
};

// Rejects a nonzero translation term (singly parabolic normal form).
ParabolicMap build_parabolic(const std::vector<Pole>& poles, double translation = 0.0);

struct Interval {
    double lo;
    double hi;
    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

struct RealPartition {
    int level = 0;
    std::vector<double> plus;   // p_1^+, p_2^+, ..., p_{N+1}^+
    std::vector<double> minus;  // p_1^-, p_2^-, ..., p_{N+1}^-
    Interval core;              // X = [p_{N+1}^-, p_{N+1}^+]
    // p_n^2 / n on the last decade divided by the same at its start; close
    // to 1 when the boundary orbit grows like sqrt(n).
    double growth_ratio = 1.0;
};

RealPartition real_markov_partition(const ParabolicMap& P, int N);

struct ReturnEvent {
    double start = 0.0;
    double return_point = 0.0;
    long return_time = 0;
    double log_deriv = 0.0;
};

ReturnEvent first_return(const ParabolicMap& P, const Interval& X, double x, long cap = 1000000);

// Integral of log F' over the real line.
double real_lyapunov(const ParabolicMap& P);

struct KacResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double direct = 0.0;         // integral of log F' over X
    double excursions = 0.0;     // strata contributions up to the cap
    double tail = 0.0;           // estimated contribution beyond the cap
    double tail_uncertainty = 0.0;
    double length_sum = 0.0;     // lengths of all strata; equals |X|
    double core_length = 0.0;
    int strata = 0;
};

KacResult kac_check(const ParabolicMap& P, int N, int quad_points = 32, int strata_cap = 10000);

struct ParabolicCountOptions {
    int core_level = 1;
    std::uint64_t node_budget = 200000000;
};

// n(x, T, B): preimages y in B of all orders with log (F^n)'(y) <= T.
// Locations are the real points y.
CountingLedger parabolic_count(const ParabolicMap& P, double x, double T, const std::vector<Interval>& B,
                               const ParabolicCountOptions& opts = {});

// Log multipliers of periodic orbits of period <= max_period; every cycle
// passes through the core, so these are the induced periodic sums.
std::vector<double> periodic_log_multipliers(const ParabolicMap& P, int max_period);

}  // namespace thermo
