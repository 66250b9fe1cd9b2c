#include "thermo/orbit_counter.hpp"

#include <algorithm>
#include <cmath>

#include "thermo/errors.hpp"
#include "thermo/parallel.hpp"

namespace thermo {

namespace {

CountingLedger monomial_levels(const BlaschkeMap& F, CirclePoint x, double T) {
    const int d = F.degree();
    const double step = std::log(static_cast<double>(d));
    std::vector<CountEvent> events;
    double scale = 1.0;        // d^n
    double rot_sum = 0.0;      // rot (1 + d + ... + d^{n-1})
    for (int n = 0;; ++n) {
        const double value = n * step;
        if (value > T) break;
        if (n > 62) fail(ErrorKind::BudgetExceeded, "preimage levels exceed 64-bit multiplicities");
        CountEvent e;
        e.value = value;
        std::uint64_t mult = 1;
        for (int i = 0; i < n; ++i) mult *= static_cast<std::uint64_t>(d);
        e.multiplicity = mult;
        e.location = reduce_angle(x.angle() - F.rotation() * rot_sum) / scale;
        e.spacing = mult > 1 ? kTwoPi / scale : 0.0;
        events.push_back(e);
        rot_sum = rot_sum * d + 1.0;
        scale *= d;
    }
    return CountingLedger(std::move(events), x.angle(), T);
}

struct TreeWalker {
    const BlaschkeMap& F;
    double T;
    std::uint64_t budget;
    std::uint64_t nodes = 0;
    std::vector<CountEvent> events;

    void visit(double y, double value) {
        if (++nodes > budget) fail(ErrorKind::BudgetExceeded, "preimage tree exceeded the node budget");
        events.push_back({value, y, 1, 0.0});
        for (double c : boundary_preimages(F, CirclePoint(y))) {
            const double v = value + std::log(F.boundary_derivative(c));
            if (v <= T) visit(c, v);
        }
    }
};

}  // namespace

CountingLedger enumerate(const BlaschkeMap& F, CirclePoint x, double T, const EnumerateOptions& opts) {
    if (F.is_rotation()) fail(ErrorKind::InvalidArgument, "counting is undefined for rotations");
    if (T < 0.0) return CountingLedger({}, x.angle(), T);
    if (F.is_monomial()) return monomial_levels(F, x, T);
    const double lambda = lyapunov_exponent(F, 1024);
    const double predicted = std::exp(T) / lambda * 4.0;
    if (predicted > static_cast<double>(opts.node_budget)) {
        fail(ErrorKind::BudgetExceeded, "predicted preimage tree exceeds the node budget");
    }
    // Split into subtrees two levels down so that threads have work to share.
    struct Task {
        double y;
        double value;
    };
    std::vector<CountEvent> events{{0.0, x.angle(), 1, 0.0}};
    std::vector<Task> frontier{{x.angle(), 0.0}};
    for (int level = 0; level < 2; ++level) {
        std::vector<Task> next;
        for (const Task& t : frontier) {
            for (double c : boundary_preimages(F, CirclePoint(t.y))) {
                const double v = t.value + std::log(F.boundary_derivative(c));
                if (v > T) continue;
                next.push_back({c, v});
                if (level == 0) events.push_back({v, c, 1, 0.0});
            }
        }
        frontier = std::move(next);
    }
    std::vector<std::vector<CountEvent>> parts(frontier.size());
    std::vector<std::uint64_t> used(frontier.size(), 0);
    parallel_for(frontier.size(), opts.threads, [&](std::size_t i) {
        TreeWalker w{F, T, opts.node_budget, 0, {}};
        w.visit(frontier[i].y, frontier[i].value);
        parts[i] = std::move(w.events);
        used[i] = w.nodes;
    });
    std::uint64_t total = events.size();
    for (std::size_t i = 0; i < parts.size(); ++i) {
        total += used[i];
        events.insert(events.end(), parts[i].begin(), parts[i].end());
    }
    if (total > opts.node_budget) fail(ErrorKind::BudgetExceeded, "preimage tree exceeded the node budget");
    return CountingLedger(std::move(events), x.angle(), T);
}

CountingLedger restrict(const CountingLedger& L, const ArcSet& B) { return L.restrict(B); }

double cesaro_average(const CountingLedger& L, double T) {
    if (T > L.t_max() + 1e-12) fail(ErrorKind::InvalidArgument, "ledger is not exact up to T");
    return L.cesaro(T);
}

double ratio_amplitude(const CountingLedger& L, double lambda, double mB, double T_lo, double T_hi, int samples,
                       Boundary b) {
    double lo = INFINITY, hi = -INFINITY;
    for (int i = 0; i < samples; ++i) {
        const double T = T_lo + (T_hi - T_lo) * i / (samples - 1);
        const double r = static_cast<double>(L.count(T, b)) * std::exp(-T) * lambda / mB;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return 0.5 * (hi - lo);
}

}  // namespace thermo
