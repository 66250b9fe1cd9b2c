#include "thermo/counting_ledger.hpp"

#include <algorithm>
#include <cmath>

#include "thermo/errors.hpp"

namespace thermo {

void sort_events(std::vector<CountEvent>& events) {
    std::sort(events.begin(), events.end(), [](const CountEvent& a, const CountEvent& b) {
        if (a.value != b.value) return a.value < b.value;
        if (a.location != b.location) return a.location < b.location;
        return a.multiplicity < b.multiplicity;
    });
}

CountingLedger::CountingLedger(std::vector<CountEvent> events, double seed, double t_max)
    : events_(std::move(events)), seed_(seed), t_max_(t_max) {
    sort_events(events_);
    cumulative_.reserve(events_.size());
    std::uint64_t c = 0;
    for (const auto& e : events_) {
        c += e.multiplicity;
        cumulative_.push_back(c);
    }
}

std::uint64_t CountingLedger::count(double T, Boundary b) const {
    auto it = b == Boundary::Strict
                  ? std::lower_bound(events_.begin(), events_.end(), T,
                                     [](const CountEvent& e, double t) { return e.value < t; })
                  : std::upper_bound(events_.begin(), events_.end(), T,
                                     [](double t, const CountEvent& e) { return t < e.value; });
    const auto n = static_cast<std::size_t>(it - events_.begin());
    return n == 0 ? 0 : cumulative_[n - 1];
}

std::uint64_t CountingLedger::total() const { return cumulative_.empty() ? 0 : cumulative_.back(); }

double CountingLedger::cesaro(double T) const {
    if (!(T > 0.0)) fail(ErrorKind::InvalidArgument, "Cesaro average needs T > 0");
    const double eT = std::exp(-T);
    double s = 0.0;
    for (const auto& e : events_) {
        if (e.value >= T) break;
        s += static_cast<double>(e.multiplicity) * (std::exp(-e.value) - eT);
    }
    return s / T;
}

std::complex<double> CountingLedger::stieltjes(std::complex<double> s) const {
    std::complex<double> acc = 0.0;
    for (const auto& e : events_) acc += static_cast<double>(e.multiplicity) * std::exp(-s * e.value);
    return acc;
}

std::vector<double> CountingLedger::distinct_values() const {
    std::vector<double> v;
    for (const auto& e : events_) {
        if (v.empty() || v.back() != e.value) v.push_back(e.value);
    }
    return v;
}

namespace {

// Sub-progressions of {start + k sp : 0 <= k < m} (angles taken mod 2pi)
// lying in the half-open arc.
void clip_progression(const CountEvent& e, const Arc& arc, std::vector<CountEvent>& out) {
    if (e.multiplicity == 1 || e.spacing == 0.0) {
        if (arc.contains(CirclePoint(e.location))) out.push_back(e);
        return;
    }
    const double a = arc.start().angle();
    const double len = arc.length();
    const double sp = e.spacing;
    const auto m = static_cast<double>(e.multiplicity);
    for (int wrap = -1; wrap <= 2; ++wrap) {
        const double lo = a + kTwoPi * wrap - e.location;
        const double hi = lo + len;
        double k0 = std::ceil(lo / sp);
        double k1 = std::ceil(hi / sp);  // exclusive
        k0 = std::max(k0, 0.0);
        k1 = std::min(k1, m);
        if (k1 <= k0) continue;
        CountEvent sub = e;
        sub.location = reduce_angle(e.location + k0 * sp);
        sub.multiplicity = static_cast<std::uint64_t>(k1 - k0);
        if (sub.multiplicity == 1) sub.spacing = 0.0;
        out.push_back(sub);
    }
}

}  // namespace

CountingLedger CountingLedger::restrict(const ArcSet& B) const {
    std::vector<CountEvent> kept;
    for (const auto& e : events_) {
        for (const Arc& arc : B.arcs()) clip_progression(e, arc, kept);
    }
    CountingLedger out(std::move(kept), seed_, t_max_);
    out.budget_hit_ = budget_hit_;
    return out;
}

std::vector<AsymptoticRow> asymptotic_report(const CountingLedger& L, double lambda, double mB,
                                             const std::vector<double>& T_grid, Boundary b) {
    std::vector<AsymptoticRow> rows;
    const double predicted = mB / lambda;
    for (double T : T_grid) {
        AsymptoticRow r;
        r.T = T;
        r.N = L.count(T, b);
        r.scaled = static_cast<double>(r.N) * std::exp(-T);
        r.predicted = predicted;
        r.ratio = r.scaled / predicted;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace thermo
