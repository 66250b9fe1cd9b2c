#pragma once

#include <cstdint>
#include <vector>

#include "thermo/blaschke.hpp"
#include "thermo/counting_ledger.hpp"

namespace thermo {

struct EnumerateOptions {
    unsigned threads = 1;
    std::uint64_t node_budget = 10000000;
};

// All pairs (n, y) with F^n(y) = x and log|(F^n)'(y)| <= T, as events
// (log-derivative, angle of y).  Monomials z^d are stored as exact
// equispaced progressions, one per level.
CountingLedger enumerate(const BlaschkeMap& F, CirclePoint x, double T, const EnumerateOptions& opts = {});

CountingLedger restrict(const CountingLedger& L, const ArcSet& B);

double cesaro_average(const CountingLedger& L, double T);

// max minus min of the direct ratio N(T) e^{-T} Lambda / m(B) over a grid,
// halved: the oscillation amplitude of the normalized counting function.
double ratio_amplitude(const CountingLedger& L, double lambda, double mB, double T_lo, double T_hi,
                       int samples = 2001, Boundary b = Boundary::Strict);

}  // namespace thermo
