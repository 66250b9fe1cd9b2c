#include "thermo/parabolic_inducer.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <functional>
#include <limits>

#include "thermo/circle.hpp"
#include "thermo/errors.hpp"

namespace thermo {

ParabolicMap::ParabolicMap(std::vector<Pole> poles) : poles_(std::move(poles)), a_(0.0) {
    if (poles_.empty()) fail(ErrorKind::InvalidArgument, "a parabolic map needs at least one pole");
    std::sort(poles_.begin(), poles_.end(), [](const Pole& x, const Pole& y) { return x.b < y.b; });
    for (std::size_t i = 0; i < poles_.size(); ++i) {
        if (!(poles_[i].t > 0.0) || !std::isfinite(poles_[i].b)) {
            fail(ErrorKind::InvalidArgument, "pole weights must be positive and locations finite");
        }
        if (i > 0 && poles_[i].b == poles_[i - 1].b) fail(ErrorKind::InvalidArgument, "pole locations must be distinct");
        a_ += poles_[i].t;
    }
}

ParabolicMap build_parabolic(const std::vector<Pole>& poles, double translation) {
    if (translation != 0.0) {
        fail(ErrorKind::NotDoublyParabolic, "a translation term makes the map singly parabolic");
    }
    return ParabolicMap(poles);
}

double ParabolicMap::eval(double x) const {
    double v = x;
    for (const Pole& p : poles_) v -= p.t / (x - p.b);
    return v;
}

double ParabolicMap::derivative(double x) const {
    double v = 1.0;
    for (const Pole& p : poles_) {
        const double d = x - p.b;
        v += p.t / (d * d);
    }
    return v;
}

double ParabolicMap::log_derivative(double x) const {
    std::size_t j = 0;
    double best = std::abs(x - poles_[0].b);
    for (std::size_t i = 1; i < poles_.size(); ++i) {
        const double d = std::abs(x - poles_[i].b);
        if (d < best) {
            best = d;
            j = i;
        }
    }
    if (best == 0.0) return std::numeric_limits<double>::infinity();
    if (best * best >= poles_[j].t) {
        // away from the poles log1p keeps the 1/x^2 tail accurate
        double q = 0.0;
        for (const Pole& p : poles_) {
            const double d = x - p.b;
            q += p.t / (d * d);
        }
        return std::log1p(q);
    }
    double rest = 1.0;
    for (std::size_t i = 0; i < poles_.size(); ++i) {
        if (i == j) continue;
        const double d = x - poles_[i].b;
        rest += poles_[i].t / (d * d);
    }
    // F' = (delta^2 rest + t_j) / delta^2 keeps precision as delta -> 0
    return std::log(best * best * rest + poles_[j].t) - 2.0 * std::log(best);
}

double ParabolicMap::branch_preimage(double y, std::size_t branch) const {
    const std::size_t n = poles_.size();
    if (branch > n) fail(ErrorKind::InvalidArgument, "branch index out of range");
    if (!std::isfinite(y)) fail(ErrorKind::InvalidArgument, "preimage of a non-finite value");
    if (n == 1) {
        // x - b = u with u^2 - c u - t = 0, c = y - b; stable quadratic roots
        const double b = poles_[0].b, t = poles_[0].t, c = y - b;
        const double big = 0.5 * (c + std::copysign(std::sqrt(c * c + 4.0 * t), c == 0.0 ? 1.0 : c));
        const double small = -t / big;
        const double right = std::max(big, small), left = std::min(big, small);
        return b + (branch == 1 ? right : left);
    }
    auto f = [&](double x) { return eval(x) - y; };
    double lo, hi;
    if (branch == 0) {
        hi = poles_[0].b;
        double step = 1.0;
        lo = std::min(hi, y) - step;
        while (f(lo) >= 0.0) {
            step *= 2.0;
            lo = std::min(hi, y) - step;
            if (step > 1e300) fail(ErrorKind::BisectionFail, "no lower bracket on the left branch");
        }
        // move hi off the pole until the sign is right
        double delta = std::max(1.0, std::abs(hi - lo));
        while (true) {
            delta *= 0.5;
            const double h = poles_[0].b - delta;
            // the root is closer to the pole than one ulp
            if (h == poles_[0].b) return std::nextafter(h, -INFINITY);
            if (h <= lo) continue;
            if (f(h) > 0.0) {
                hi = h;
                break;
            }
            lo = h;
        }
    } else if (branch == n) {
        lo = poles_[n - 1].b;
        double step = 1.0;
        hi = std::max(lo, y) + step;
        while (f(hi) <= 0.0) {
            step *= 2.0;
            hi = std::max(lo, y) + step;
            if (step > 1e300) fail(ErrorKind::BisectionFail, "no upper bracket on the right branch");
        }
        double delta = std::max(1.0, std::abs(hi - lo));
        while (true) {
            delta *= 0.5;
            const double l = poles_[n - 1].b + delta;
            if (l == poles_[n - 1].b) return std::nextafter(l, INFINITY);
            if (l >= hi) continue;
            if (f(l) < 0.0) {
                lo = l;
                break;
            }
            hi = l;
        }
    } else {
        const double left = poles_[branch - 1].b, right = poles_[branch].b;
        double delta = 0.5 * (right - left);
        lo = left + delta;
        hi = lo;
        // shrink toward each pole until the bracket holds
        double dl = delta;
        while (f(lo) >= 0.0) {
            dl *= 0.5;
            lo = left + dl;
            if (lo == left) return std::nextafter(left, INFINITY);
        }
        double dr = delta;
        hi = right - dr;
        while (f(hi) <= 0.0) {
            dr *= 0.5;
            hi = right - dr;
            if (hi == right) return std::nextafter(right, -INFINITY);
        }
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 300; ++it) {
        const double fx = f(x);
        if (fx == 0.0) return x;
        if (fx < 0.0) lo = x;
        else hi = x;
        double nx = x - fx / derivative(x);
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (std::abs(nx - x) <= 4e-16 * std::max(1.0, std::abs(x)) || hi - lo <= 4e-16 * std::max(1.0, std::abs(x))) {
            return nx;
        }
        x = nx;
    }
    if (!std::isfinite(x)) fail(ErrorKind::BisectionFail, "preimage solve failed");
    return x;
}

std::vector<double> ParabolicMap::preimages(double y) const {
    std::vector<double> out;
    out.reserve(poles_.size() + 1);
    for (std::size_t i = 0; i <= poles_.size(); ++i) out.push_back(branch_preimage(y, i));
    return out;
}

double ParabolicMap::outer_preimage(double y, int side) const {
    return branch_preimage(y, side > 0 ? poles_.size() : 0);
}

RealPartition real_markov_partition(const ParabolicMap& P, int N) {
    if (N < 1 || N > 10000) fail(ErrorKind::InvalidArgument, "partition level must lie in [1, 10000]");
    RealPartition R;
    R.level = N;
    R.plus.push_back(P.max_pole());
    R.minus.push_back(P.min_pole());
    for (int n = 1; n <= N; ++n) {
        R.plus.push_back(P.outer_preimage(R.plus.back(), +1));
        R.minus.push_back(P.outer_preimage(R.minus.back(), -1));
        if (!(R.plus.back() > R.plus[n - 1]) || !(R.minus.back() < R.minus[n - 1])) {
            fail(ErrorKind::BisectionFail, "boundary orbit is not monotone");
        }
    }
    R.core = {R.minus.back(), R.plus.back()};
    if (N >= 20) {
        const int m = (N + 1) / 10;
        const double end = R.plus[N] * R.plus[N] / (N + 1);
        const double start = R.plus[m - 1] * R.plus[m - 1] / m;
        if (start > 0.0) R.growth_ratio = end / start;
    }
    return R;
}

ReturnEvent first_return(const ParabolicMap& P, const Interval& X, double x, long cap) {
    if (!X.contains(x)) fail(ErrorKind::InvalidArgument, "start point must lie in the core interval");
    ReturnEvent ev;
    ev.start = x;
    double y = x;
    for (long n = 1; n <= cap; ++n) {
        const double ld = P.log_derivative(y);
        y = P.eval(y);
        if (!std::isfinite(y) || !std::isfinite(ld)) {
            fail(ErrorKind::NoReturnWithinCap, "orbit reached a pole");
        }
        ev.log_deriv += ld;
        if (X.contains(y)) {
            ev.return_time = n;
            ev.return_point = y;
            return ev;
        }
    }
    fail(ErrorKind::NoReturnWithinCap, "no return to the core within the iteration cap");
}

namespace {

double integrate_finite(const std::function<double(double)>& f, double a, double b) {
    if (!(b > a)) return 0.0;
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, a, b, 1e-13);
}

double integrate_right_tail(const std::function<double(double)>& f, double a) {
    boost::math::quadrature::exp_sinh<double> es;
    return es.integrate([&](double u) { return f(a + u); }, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
}

double integrate_left_tail(const std::function<double(double)>& f, double b) {
    boost::math::quadrature::exp_sinh<double> es;
    return es.integrate([&](double u) { return f(b - u); }, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
}

// Integral of log F' over [lo, hi] split at the poles.
double integrate_log_derivative(const ParabolicMap& P, double lo, double hi) {
    auto f = [&](double x) {
        const double v = P.log_derivative(x);
        return std::isfinite(v) ? v : 0.0;
    };
    std::vector<double> cuts{lo};
    for (const Pole& p : P.poles()) {
        if (p.b > lo && p.b < hi) cuts.push_back(p.b);
    }
    cuts.push_back(hi);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += integrate_finite(f, cuts[i], cuts[i + 1]);
    return s;
}

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = z;
                p0 = 1.0;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

// Mass density of x in X with F(x) = u: sum of 1/F'(c) over preimages c in X.
double core_jacobian(const ParabolicMap& P, const Interval& X, double u) {
    if (!std::isfinite(u)) return 0.0;
    const auto& poles = P.poles();
    double s = 0.0;
    for (double c : P.preimages(u)) {
        if (!X.contains(c)) continue;
        std::size_t j = 0;
        for (std::size_t i = 1; i < poles.size(); ++i) {
            if (std::abs(c - poles[i].b) < std::abs(c - poles[j].b)) j = i;
        }
        if (std::abs(c - poles[j].b) > 1e-6 * std::max(1.0, std::abs(poles[j].b))) {
            s += std::exp(-P.log_derivative(c));
            continue;
        }
        // Next to a pole the root may sit below one ulp of it; solve for the
        // offset d = c - b_j from t_j / d = b_j - u - sum_{i != j} t_i / (b_j - b_i).
        double rest = poles[j].b - u, curv = 0.0;
        for (std::size_t i = 0; i < poles.size(); ++i) {
            if (i == j) continue;
            const double e = poles[j].b - poles[i].b;
            rest -= poles[i].t / e;
            curv += poles[i].t / (e * e);
        }
        const double d = poles[j].t / rest;
        s += d * d / (d * d * (1.0 + curv) + poles[j].t);
    }
    return s;
}

struct SideSums {
    double excursions_half = 0.0, mass_half = 0.0, mean_half = 0.0, edge_half = 0.0;
    double excursions = 0.0, mass = 0.0, mean = 0.0, edge = 0.0;
};

}  // namespace

double real_lyapunov(const ParabolicMap& P) {
    auto f = [&](double x) {
        const double v = P.log_derivative(x);
        return std::isfinite(v) ? v : 0.0;
    };
    const double lo = P.min_pole() - 1.0, hi = P.max_pole() + 1.0;
    return integrate_left_tail(f, lo) + integrate_log_derivative(P, lo, hi) + integrate_right_tail(f, hi);
}

KacResult kac_check(const ParabolicMap& P, int N, int quad_points, int strata_cap) {
    if (N < 1) fail(ErrorKind::InvalidArgument, "core level must be at least 1");
    if (quad_points < 2 || strata_cap < 2) fail(ErrorKind::InvalidArgument, "need at least two nodes and two strata");
    const RealPartition R = real_markov_partition(P, N);
    const Interval X = R.core;
    KacResult out;
    out.rhs = real_lyapunov(P);
    out.direct = integrate_log_derivative(P, X.lo, X.hi);
    out.core_length = X.length();
    out.strata = strata_cap;

    std::vector<double> gx, gw;
    gauss_legendre(quad_points, gx, gw);
    const int half = strata_cap / 2;
    double lhs_half = out.direct, lhs_full = out.direct;
    double lengths = 0.0;
    for (int side : {+1, -1}) {
        // J_N on this side, the part of X that outer points fall into
        const double a = side > 0 ? R.plus[N - 1] : R.minus[N];
        const double b = side > 0 ? R.plus[N] : R.minus[N - 1];
        std::vector<double> u(static_cast<std::size_t>(quad_points)), w(u.size()), D(u.size(), 0.0);
        for (int q = 0; q < quad_points; ++q) {
            u[q] = 0.5 * (a + b) + 0.5 * (b - a) * gx[q];
            w[q] = 0.5 * (b - a) * gw[q];
        }
        double edge = side > 0 ? R.plus[N] : R.minus[N];
        SideSums s;
        for (int j = 1; j <= strata_cap; ++j) {
            double exc = 0.0, mass = 0.0;
            for (int q = 0; q < quad_points; ++q) {
                u[q] = P.outer_preimage(u[q], side);
                D[q] += P.log_derivative(u[q]);
                const double m = w[q] * core_jacobian(P, X, u[q]) * std::exp(-D[q]);
                mass += m;
                exc += m * D[q];
            }
            edge = P.outer_preimage(edge, side);
            s.excursions += exc;
            s.mass += mass;
            if (j == half) {
                s.excursions_half = s.excursions;
                s.mass_half = s.mass;
                s.mean_half = exc / mass;
                s.edge_half = edge;
            }
            if (j == strata_cap) s.mean = exc / mass;
        }
        s.edge = edge;
        auto W = [&](double v) { return core_jacobian(P, X, v); };
        const double tail_full = side > 0 ? integrate_right_tail(W, s.edge) : integrate_left_tail(W, s.edge);
        const double tail_half = side > 0 ? integrate_right_tail(W, s.edge_half) : integrate_left_tail(W, s.edge_half);
        // Inside the tail the excursion length grows like half the log of the
        // stratum index while stratum masses decay like j^{-3/2}; averaging
        // gives the mean at the cap plus one.
        const double est_full = tail_full * (s.mean + 1.0);
        const double est_half = tail_half * (s.mean_half + 1.0);
        out.excursions += s.excursions;
        out.tail += est_full;
        lhs_full += s.excursions + est_full;
        lhs_half += s.excursions_half + est_half;
        lengths += s.mass + tail_full;
    }
    out.lhs = lhs_full;
    out.tail_uncertainty = std::abs(lhs_full - lhs_half);

    // x in X with F(x) in X: integrate the Jacobian over X, split where a
    // preimage crosses the boundary of X.
    auto W = [&](double v) { return core_jacobian(P, X, v); };
    std::vector<double> cuts{X.lo, R.minus[N - 1], R.plus[N - 1], X.hi};
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) lengths += integrate_finite(W, cuts[i], cuts[i + 1]);
    out.length_sum = lengths;

    if (out.tail_uncertainty > 0.01 * out.rhs) {
        fail(ErrorKind::TailBoundExceeded, "stratum tail uncertainty exceeds 1% of the Lyapunov integral");
    }
    return out;
}

CountingLedger parabolic_count(const ParabolicMap& P, double x, double T, const std::vector<Interval>& B,
                               const ParabolicCountOptions& opts) {
    const RealPartition R = real_markov_partition(P, std::max(1, opts.core_level));
    const Interval X = R.core;
    if (!X.contains(x)) fail(ErrorKind::InvalidArgument, "seed must lie in the core interval");
    for (const Interval& I : B) {
        if (!(I.lo >= X.lo && I.hi <= X.hi && I.lo <= I.hi)) {
            fail(ErrorKind::InvalidArgument, "count intervals must lie inside the core interval");
        }
    }
    if (T < 0.0) return CountingLedger({}, x, T);
    double radius = std::max(std::abs(X.lo), std::abs(X.hi));
    for (const Pole& p : P.poles()) radius = std::max(radius, std::abs(p.b));
    auto in_B = [&](double y) {
        for (const Interval& I : B) {
            if (y >= I.lo && y < I.hi) return true;
        }
        return false;
    };
    struct Node {
        double y;
        double value;
    };
    std::vector<Node> stack{{x, 0.0}};
    std::vector<CountEvent> events;
    std::uint64_t nodes = 0;
    while (!stack.empty()) {
        const Node nd = stack.back();
        stack.pop_back();
        if (++nodes > opts.node_budget) fail(ErrorKind::BudgetExceeded, "preimage tree exceeded the node budget");
        if (in_B(nd.y)) events.push_back({nd.value, nd.y, 1, 0.0});
        for (double c : P.preimages(nd.y)) {
            const double v = nd.value + P.log_derivative(c);
            if (v > T) continue;
            const double out_by = std::abs(c) - radius;
            if (out_by > 0.0) {
                // Any counted descendant re-enters through a bounded branch,
                // whose derivative is at least 1 + (|c| - R)^2 / a.
                if (v + std::log1p(out_by * out_by / P.a()) > T) continue;
            }
            stack.push_back({c, v});
        }
    }
    return CountingLedger(std::move(events), x, T);
}

std::vector<double> periodic_log_multipliers(const ParabolicMap& P, int max_period) {
    if (max_period < 1 || max_period > 12) fail(ErrorKind::InvalidArgument, "max_period must lie in [1, 12]");
    const int k = static_cast<int>(P.poles().size()) + 1;
    std::vector<double> out;
    for (int p = 1; p <= max_period; ++p) {
        if (std::pow(static_cast<double>(k), p) > 1e6) break;
        std::vector<int> w(static_cast<std::size_t>(p), 0);
        while (true) {
            bool lyndon = true;
            for (int r = 1; r < p && lyndon; ++r) {
                for (int i = 0; i < p; ++i) {
                    const int a = w[(i + r) % p], b = w[i];
                    if (a != b) {
                        if (a < b) lyndon = false;
                        break;
                    }
                    if (i == p - 1) lyndon = false;
                }
            }
            const bool escapes = std::all_of(w.begin(), w.end(), [&](int v) { return v == 0; }) ||
                                 std::all_of(w.begin(), w.end(), [&](int v) { return v == k - 1; });
            if (lyndon && !escapes) {
                // fixed point of the composed inverse branches
                double y = 0.0;
                bool ok = false;
                for (int it = 0; it < 5000; ++it) {
                    double z = y;
                    for (int i = p - 1; i >= 0; --i) z = P.branch_preimage(z, static_cast<std::size_t>(w[i]));
                    const bool done = std::abs(z - y) <= 1e-15 * std::max(1.0, std::abs(z));
                    y = z;
                    if (!std::isfinite(y) || std::abs(y) > 1e12) break;
                    if (done) {
                        ok = true;
                        break;
                    }
                }
                if (ok) {
                    double L = 0.0, z = y;
                    for (int i = 0; i < p; ++i) {
                        L += P.log_derivative(z);
                        z = P.eval(z);
                    }
                    out.push_back(L);
                }
            }
            int i = p - 1;
            while (i >= 0 && w[i] == k - 1) w[i--] = 0;
            if (i < 0) break;
            ++w[i];
        }
    }
    return out;
}

}  // namespace thermo
