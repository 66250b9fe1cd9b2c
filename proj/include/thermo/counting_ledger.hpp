#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "thermo/circle.hpp"

namespace thermo {

// One counted object, or an arithmetic progression of `multiplicity` points
// location + k * spacing (k = 0 .. multiplicity-1) sharing the same value.
// Progressions let the equispaced preimage levels of z^d be stored exactly.
struct CountEvent {
    double value = 0.0;
    double location = 0.0;
    std::uint64_t multiplicity = 1;
    double spacing = 0.0;

    friend bool operator==(const CountEvent&, const CountEvent&) = default;
};

enum class Boundary { Strict, Closed };

// Sorted event stream with the counting function N(T) and its transforms.
class CountingLedger {
public:
    CountingLedger() = default;
    CountingLedger(std::vector<CountEvent> events, double seed, double t_max);

    const std::vector<CountEvent>& events() const { return events_; }
    double seed() const { return seed_; }
    double t_max() const { return t_max_; }
    bool budget_hit() const { return budget_hit_; }
    void mark_budget_hit() { budget_hit_ = true; }

    // Number of counted objects with value < T (Strict) or <= T (Closed).
    std::uint64_t count(double T, Boundary b = Boundary::Strict) const;
    std::uint64_t total() const;

    // (1/T) integral_0^T N(t) e^{-t} dt, exact for the step function N.
    double cesaro(double T) const;
    // sum over events of multiplicity * e^{-s value}.
    std::complex<double> stieltjes(std::complex<double> s) const;

    // Distinct event values (for lattice scans and step locations).
    std::vector<double> distinct_values() const;

    // Events whose locations lie in the arc set (half-open arcs).
    CountingLedger restrict(const ArcSet& B) const;

private:
    std::vector<CountEvent> events_;
    std::vector<std::uint64_t> cumulative_;
    double seed_ = 0.0;
    double t_max_ = 0.0;
    bool budget_hit_ = false;
};

void sort_events(std::vector<CountEvent>& events);

struct AsymptoticRow {
    double T;
    std::uint64_t N;
    double scaled;     // N e^{-T}
    double predicted;  // m(B) / Lambda
    double ratio;      // scaled / predicted
};

std::vector<AsymptoticRow> asymptotic_report(const CountingLedger& L, double lambda, double mB,
                                             const std::vector<double>& T_grid,
                                             Boundary b = Boundary::Strict);

}  // namespace thermo
