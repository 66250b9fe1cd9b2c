#include "thermo/shift_engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "thermo/errors.hpp"
#include "thermo/parallel.hpp"

namespace thermo {

SymbolicSystem::SymbolicSystem(int alphabet_size, std::vector<std::vector<int>> incidence)
    : M_(alphabet_size) {
    if (M_ < 1) fail(ErrorKind::InvalidArgument, "alphabet must be nonempty");
    if (static_cast<int>(incidence.size()) != M_) fail(ErrorKind::InvalidArgument, "incidence matrix has wrong size");
    A_.assign(static_cast<std::size_t>(M_) * M_, 0);
    for (int a = 0; a < M_; ++a) {
        if (static_cast<int>(incidence[a].size()) != M_) {
            fail(ErrorKind::InvalidArgument, "incidence matrix must be square");
        }
        for (int b = 0; b < M_; ++b) {
            const int v = incidence[a][b];
            if (v != 0 && v != 1) fail(ErrorKind::InvalidArgument, "incidence entries must be 0 or 1");
            A_[static_cast<std::size_t>(a) * M_ + b] = static_cast<std::uint8_t>(v);
        }
    }
}

SymbolicSystem SymbolicSystem::full(int M) {
    return SymbolicSystem(M, std::vector<std::vector<int>>(static_cast<std::size_t>(M),
                                                           std::vector<int>(static_cast<std::size_t>(M), 1)));
}

std::vector<std::vector<int>> SymbolicSystem::incidence() const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(M_), std::vector<int>(static_cast<std::size_t>(M_)));
    for (int a = 0; a < M_; ++a)
        for (int b = 0; b < M_; ++b) out[a][b] = allowed(a, b) ? 1 : 0;
    return out;
}

PotentialSpec bernoulli_potential(const std::vector<double>& weights) {
    PotentialSpec psi;
    for (double w : weights) {
        if (!(w > 0.0 && w < 1.0)) fail(ErrorKind::InvalidArgument, "Bernoulli weights must lie in (0, 1)");
        psi.values.push_back(std::log(w));
    }
    return psi;
}

PotentialSpec constant_potential(int M, double value) {
    PotentialSpec psi;
    psi.values.assign(static_cast<std::size_t>(M), value);
    return psi;
}

PotentialSpec gauss_like_potential(int M) {
    PotentialSpec psi;
    for (int n = 1; n <= M; ++n) psi.values.push_back(-2.0 * std::log(static_cast<double>(n)));
    psi.tail_mass = 1.0 / M;  // sum_{n > M} n^{-2} < 1/M
    return psi;
}

StateSpace::StateSpace(const SymbolicSystem& S, int depth) : depth_(depth), M_(S.alphabet_size()) {
    if (depth < 1) fail(ErrorKind::InvalidArgument, "depth must be at least 1");
    if (std::pow(static_cast<double>(M_), depth) > 4e6) {
        fail(ErrorKind::BudgetExceeded, "too many depth-k cylinders");
    }
    std::vector<int> w;
    std::function<void()> rec = [&] {
        if (static_cast<int>(w.size()) == depth_) {
            const std::uint64_t c = code_of(w);
            lookup_.emplace(c, codes_.size());
            codes_.push_back(c);
            words_.push_back(w);
            return;
        }
        for (int a = 0; a < M_; ++a) {
            if (!w.empty() && !S.allowed(w.back(), a)) continue;
            w.push_back(a);
            rec();
            w.pop_back();
        }
    };
    rec();
}

std::optional<std::size_t> StateSpace::index(std::uint64_t code) const {
    auto it = lookup_.find(code);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t StateSpace::code_of(const std::vector<int>& letters) const {
    std::uint64_t c = 0;
    for (int a : letters) c = c * static_cast<std::uint64_t>(M_) + static_cast<std::uint64_t>(a);
    return c;
}

namespace {

void check_potential(const SymbolicSystem& S, const PotentialSpec& psi) {
    const double expected = std::pow(static_cast<double>(S.alphabet_size()), psi.depth);
    if (psi.depth < 1 || static_cast<double>(psi.values.size()) != expected) {
        fail(ErrorKind::InvalidArgument, "potential table must have M^depth entries");
    }
}

cplx weight(double psi, cplx s, double p) {
    cplx w = std::exp(s * psi);
    if (p != 0.0) {
        const double f = p == std::floor(p) ? std::pow(psi, p) : std::pow(std::abs(psi), p);
        w *= f;
    }
    return w;
}

// Richardson extrapolation of a difference quotient whose error expands in
// integer powers of h.
double richardson(const std::function<double(double)>& quotient, double h0, int levels) {
    std::vector<std::vector<double>> R(static_cast<std::size_t>(levels));
    for (int j = 0; j < levels; ++j) {
        R[j].push_back(quotient(h0 / std::pow(2.0, j)));
        for (int m = 1; m <= j; ++m) {
            const double f = std::pow(2.0, m);
            R[j].push_back((f * R[j][m - 1] - R[j - 1][m - 1]) / (f - 1.0));
        }
    }
    return R.back().back();
}

}  // namespace

PrimitivityWitness check_finitely_primitive(const SymbolicSystem& S, int max_len) {
    if (max_len < 1 || max_len > 8) fail(ErrorKind::InvalidArgument, "max_len must lie in [1, 8]");
    const int M = S.alphabet_size();
    for (int len = 1; len <= max_len; ++len) {
        if (std::pow(static_cast<double>(M), len) > 2e6) break;
        // connect[a][b]: some admissible tau of this length makes a tau b admissible
        std::vector<char> connect(static_cast<std::size_t>(M) * M, 0);
        std::vector<Word> used;
        std::vector<int> tau;
        std::function<void()> rec = [&] {
            if (static_cast<int>(tau.size()) == len) {
                bool useful = false;
                for (int a = 0; a < M; ++a) {
                    if (!S.allowed(a, tau.front())) continue;
                    for (int b = 0; b < M; ++b) {
                        if (!S.allowed(tau.back(), b)) continue;
                        connect[static_cast<std::size_t>(a) * M + b] = 1;
                        useful = true;
                    }
                }
                if (useful) {
                    Word w;
                    for (int x : tau) w.push_back(x + 1);
                    used.push_back(w);
                }
                return;
            }
            for (int a = 0; a < M; ++a) {
                if (!tau.empty() && !S.allowed(tau.back(), a)) continue;
                tau.push_back(a);
                rec();
                tau.pop_back();
            }
        };
        rec();
        if (std::all_of(connect.begin(), connect.end(), [](char c) { return c != 0; })) {
            return {len, used};
        }
    }
    fail(ErrorKind::NotFoundWithinBudget, "no primitivity witness within the length budget");
}

CylinderMatrix cylinder_operator(const SymbolicSystem& S, const PotentialSpec& psi, cplx s, double p) {
    check_potential(S, psi);
    const StateSpace states(S, psi.depth);
    const std::size_t n = states.size();
    const auto M = static_cast<std::uint64_t>(S.alphabet_size());
    std::uint64_t top = 1;
    for (int i = 1; i < psi.depth; ++i) top *= M;
    CylinderMatrix out;
    out.s = s;
    out.p = p;
    out.entries = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const int first = states.word(i).front();
        for (int a = 0; a < S.alphabet_size(); ++a) {
            if (!S.allowed(a, first)) continue;
            const std::uint64_t u = static_cast<std::uint64_t>(a) * top + states.code(i) / M;
            const auto j = states.index(u);
            if (!j) continue;
            out.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*j)) += weight(psi.value(u), s, p);
        }
    }
    return out;
}

ShiftSpectralData spectral_data(const SymbolicSystem& S, const PotentialSpec& psi, cplx s) {
    if (s.real() < 1.0 - 1e-15) fail(ErrorKind::InvalidArgument, "spectral data requires Re s >= 1");
    const CylinderMatrix K = cylinder_operator(S, psi, s, 0.0);
    const Eigen::Index n = K.entries.rows();
    IterationOptions opts;
    opts.tol = 1e-14;
    opts.perturbation = 0.0;
    const Vector ones = Vector::Ones(n);
    EigenPair pair = dominant_eigen(K.entries, ones, ones, opts);
    ShiftSpectralData out;
    out.rho = pair.right;
    out.nu = pair.left;
    const cplx total = out.nu.sum();
    if (std::abs(total) > 1e-300) {
        out.nu /= total;
        out.rho *= total;
    }
    // Two-sided Rayleigh quotient: quadratic accuracy in the eigenvectors.
    out.lambda = (out.nu.transpose() * K.entries * out.rho)(0) / (out.nu.transpose() * out.rho)(0);
    out.residual = (K.entries * out.rho - out.lambda * out.rho).cwiseAbs().maxCoeff();
    pair.lambda = out.lambda;
    IterationOptions sub;
    sub.tol = 1e-8;
    out.gap = deflated_modulus(K.entries, pair, sub) / std::abs(out.lambda);
    return out;
}

double spectral_radius(const SymbolicSystem& S, const PotentialSpec& psi, cplx s) {
    const CylinderMatrix K = cylinder_operator(S, psi, s, 0.0);
    IterationOptions opts;
    opts.tol = 1e-10;
    return growth_rate(K.entries, Vector::Ones(K.entries.rows()), opts);
}

bool has_peripheral_eigenvalue(const SymbolicSystem& S, const PotentialSpec& psi, cplx s) {
    return std::abs(spectral_radius(S, psi, s) - 1.0) < 1e-6;
}

double shift_pressure(const SymbolicSystem& S, const PotentialSpec& psi, double s) {
    return std::log(std::abs(spectral_data(S, psi, s).lambda));
}

PotentialSpec calibrate(const SymbolicSystem& S, const PotentialSpec& psi) {
    const double P = shift_pressure(S, psi, 1.0);
    PotentialSpec out = psi;
    for (double& v : out.values) v -= P;
    out.tail_mass = psi.tail_mass * std::exp(-P);
    return out;
}

SummabilityStats summability_stats(const SymbolicSystem& S, const PotentialSpec& psi, double s, double p) {
    check_potential(S, psi);
    const StateSpace states(S, psi.depth);
    const int M = S.alphabet_size();
    std::vector<double> lo(static_cast<std::size_t>(M), INFINITY), hi(static_cast<std::size_t>(M), 0.0);
    std::vector<char> seen(static_cast<std::size_t>(M), 0);
    for (std::size_t i = 0; i < states.size(); ++i) {
        const int a = states.word(i).front();
        const double v = std::abs(weight(psi.value(states.code(i)), s, p));
        lo[a] = std::min(lo[a], v);
        hi[a] = std::max(hi[a], v);
        seen[a] = 1;
    }
    SummabilityStats out;
    for (int a = 0; a < M; ++a) {
        if (!seen[a]) continue;
        out.inf_sum += lo[a];
        out.sup_sum += hi[a];
    }
    PotentialSpec scaled = psi;
    for (double& v : scaled.values) v *= s;
    const ShiftSpectralData sd = spectral_data(S, scaled, 1.0);
    for (std::size_t i = 0; i < states.size(); ++i) {
        const double v = psi.value(states.code(i));
        out.integral += sd.nu[static_cast<Eigen::Index>(i)].real() * (p == 0.0 ? 1.0 : std::pow(std::abs(v), p));
    }
    out.ratio = out.sup_sum / out.integral;
    return out;
}

ShiftPressureDerivatives pressure_derivs_shift(const SymbolicSystem& S, const PotentialSpec& psi) {
    const SummabilityStats s1 = summability_stats(S, psi, 1.0, 1.0);
    const SummabilityStats s2 = summability_stats(S, psi, 1.0, 2.0);
    if (!std::isfinite(s1.sup_sum) || !std::isfinite(s2.sup_sum) ||
        (psi.tail_mass > 0.0 && !std::isfinite(psi.tail_mass))) {
        fail(ErrorKind::SummabilityViolated, "psi is not (1,2)-summable on this truncation");
    }
    std::vector<std::pair<double, double>> cache;
    auto P = [&](double s) {
        for (const auto& [k, v] : cache)
            if (k == s) return v;
        const double v = shift_pressure(S, psi, s);
        cache.emplace_back(s, v);
        return v;
    };
    const double P1 = P(1.0);
    ShiftPressureDerivatives out;
    out.p1 = richardson([&](double h) { return (P(1.0 + h) - P1) / h; }, 0.05, 7);
    out.p2 = richardson([&](double h) { return (P(1.0 + 2 * h) - 2 * P(1.0 + h) + P1) / (h * h); }, 0.05, 6);

    const StateSpace states(S, psi.depth);
    const ShiftSpectralData sd = spectral_data(S, psi, 1.0);
    const CylinderMatrix K = cylinder_operator(S, psi, 1.0, 0.0);
    const Eigen::Index n = static_cast<Eigen::Index>(states.size());
    Eigen::VectorXd rho(n), nu(n), f(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        rho[i] = sd.rho[i].real();
        nu[i] = sd.nu[i].real();
        f[i] = psi.value(states.code(static_cast<std::size_t>(i)));
    }
    const double lambda = sd.lambda.real();
    out.integral = (nu.array() * rho.array() * f.array()).sum();
    const Eigen::VectorXd phi = f.array() - out.integral;
    const Eigen::MatrixXd Kr = K.entries.real();
    Eigen::VectorXd v = rho.cwiseProduct(phi);
    double sigma2 = (nu.array() * v.array() * phi.array()).sum();
    for (int j = 1; j <= 100000; ++j) {
        v = Kr * v / lambda;
        const double c = (nu.array() * v.array() * phi.array()).sum();
        sigma2 += 2.0 * c;
        if (std::abs(c) < 1e-18 * std::max(1.0, std::abs(sigma2)) && v.cwiseAbs().maxCoeff() < 1e-16) break;
    }
    out.green_kubo = sigma2;
    return out;
}

EtaResult poincare_eta(const SymbolicSystem& S, const PotentialSpec& psi, const std::vector<double>& offset,
                       cplx s, const Word& xi) {
    check_potential(S, psi);
    if (s.real() < 1.0) fail(ErrorKind::DivergentSeries, "Poincare series diverges for Re s < 1");
    if (s.real() == 1.0 && (s.imag() == 0.0 || has_peripheral_eigenvalue(S, psi, s))) {
        fail(ErrorKind::DivergentSeries, "no spectral gap on the critical line at this s");
    }
    const StateSpace states(S, psi.depth);
    if (static_cast<int>(xi.size()) < psi.depth) fail(ErrorKind::InvalidArgument, "seed word shorter than the potential depth");
    std::vector<int> head;
    for (int i = 0; i < psi.depth; ++i) head.push_back(xi[i] - 1);
    const auto at = states.index(states.code_of(head));
    if (!at) fail(ErrorKind::InvalidArgument, "seed word is not admissible");
    const auto x = static_cast<Eigen::Index>(*at);
    const auto n = static_cast<Eigen::Index>(states.size());
    if (!offset.empty() && static_cast<Eigen::Index>(offset.size()) != n) {
        fail(ErrorKind::InvalidArgument, "offset must have one value per state");
    }
    Vector f(n);
    for (Eigen::Index i = 0; i < n; ++i) f[i] = offset.empty() ? cplx(1.0) : std::exp(s * offset[i]);

    const CylinderMatrix K = cylinder_operator(S, psi, s, 0.0);
    EtaResult out;

    // Resolvent form with the rank-one spectral projection R = rho nu^T.
    const ShiftSpectralData sd = spectral_data(S, psi, s);
    const cplx pairing = (sd.nu.transpose() * sd.rho)(0);
    const cplx nf = (sd.nu.transpose() * f)(0) / pairing;
    Vector u = f - sd.rho * nf;
    cplx rest = u[x];
    for (long k = 0; k < 10000000; ++k) {
        u = K.entries * u;
        rest += u[x];
        if (u.cwiseAbs().maxCoeff() < 1e-17 * std::max(1.0, f.cwiseAbs().maxCoeff())) break;
    }
    out.resolvent = sd.rho[x] * nf / (1.0 - sd.lambda) + rest;

    // Direct partial sums.
    const long cap = std::max<long>(1000, static_cast<long>(4e8 / static_cast<double>(n * n)));
    Vector v = f;
    cplx sum = 0.0;
    double prev = v.cwiseAbs().maxCoeff();
    for (long k = 0; k < cap; ++k) {
        sum += v[x];
        v = K.entries * v;
        ++out.terms;
        const double nv = v.cwiseAbs().maxCoeff();
        const double r = prev > 0.0 ? nv / prev : 0.0;
        prev = nv;
        if (nv == 0.0 || (r < 1.0 && k > 2 && nv / (1.0 - r) < 1e-13 * std::max(1.0, std::abs(sum)))) {
            out.series_converged = true;
            break;
        }
    }
    out.series = sum;
    return out;
}

LocallyConstantPrefix::LocallyConstantPrefix(const SymbolicSystem& S, const PotentialSpec& psi, Word xi)
    : S_(S), psi_(psi), xi_(std::move(xi)) {
    check_potential(S, psi);
    if (static_cast<int>(xi_.size()) < psi.depth) fail(ErrorKind::InvalidArgument, "seed word shorter than the potential depth");
    for (int a : xi_) {
        if (a < 1 || a > S.alphabet_size()) fail(ErrorKind::InvalidArgument, "seed letter out of range");
    }
    for (std::size_t i = 0; i + 1 < xi_.size(); ++i) {
        if (!S.allowed(xi_[i] - 1, xi_[i + 1] - 1)) fail(ErrorKind::InvalidArgument, "seed word is not admissible");
    }
    for (int i = 1; i < psi.depth; ++i) top_ *= static_cast<std::uint64_t>(S.alphabet_size());
}

PrefixState LocallyConstantPrefix::root() const {
    PrefixState st;
    for (int i = 0; i < psi_.depth; ++i) {
        st.code = st.code * static_cast<std::uint64_t>(S_.alphabet_size()) + static_cast<std::uint64_t>(xi_[i] - 1);
    }
    return st;
}

void LocallyConstantPrefix::children(const PrefixState& state, std::vector<PrefixChild>& out) const {
    out.clear();
    const auto M = static_cast<std::uint64_t>(S_.alphabet_size());
    const int first = static_cast<int>(state.code / top_);
    for (int a = 0; a < S_.alphabet_size(); ++a) {
        if (!S_.allowed(a, first)) continue;
        PrefixChild c;
        c.letter = a + 1;
        c.state.code = static_cast<std::uint64_t>(a) * top_ + state.code / M;
        c.cost = -psi_.value(c.state.code);
        if (!(c.cost > 0.0)) fail(ErrorKind::InvalidArgument, "counting needs a strictly negative potential");
        out.push_back(c);
    }
}

CodedCirclePrefix::CodedCirclePrefix(const MarkovPartition& P, CirclePoint x, int seed_depth) : P_(P), x_(x) {
    try {
        xi_ = encode(P, x, seed_depth);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::ExceptionalPoint) throw;
        xi_.clear();  // cylinder tests will refuse an exceptional seed
    }
}

PrefixState CodedCirclePrefix::root() const {
    PrefixState st;
    st.point = x_.angle();
    return st;
}

void CodedCirclePrefix::children(const PrefixState& state, std::vector<PrefixChild>& out) const {
    out.clear();
    const BlaschkeMap& F = P_.map();
    for (double y : boundary_preimages(F, CirclePoint(state.point))) {
        PrefixChild c;
        c.letter = P_.arc_index(CirclePoint(y));
        c.state.point = y;
        c.cost = std::log(F.boundary_derivative(y));
        out.push_back(c);
    }
    std::sort(out.begin(), out.end(), [](const PrefixChild& a, const PrefixChild& b) { return a.letter < b.letter; });
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].letter != static_cast<int>(i) + 1) {
            fail(ErrorKind::ExceptionalPoint, "inverse branches do not match the partition arcs");
        }
    }
}

namespace {

struct WordCounter {
    const PrefixSystem& system;
    double T;
    const std::vector<Word>& B;
    std::uint64_t budget;
    std::uint64_t nodes = 0;
    std::vector<int> path;  // prepended letters, most recent last
    std::vector<CountEvent> events;

    int letter_at(std::size_t i) const {
        if (i < path.size()) return path[path.size() - 1 - i];
        const Word& xi = system.seed_word();
        const std::size_t j = i - path.size();
        if (j >= xi.size()) fail(ErrorKind::InvalidArgument, "seed word too short for the cylinder set");
        return xi[j];
    }

    bool in_B() const {
        if (B.empty()) return true;
        for (const Word& c : B) {
            bool ok = true;
            for (std::size_t i = 0; i < c.size() && ok; ++i) ok = letter_at(i) == c[i];
            if (ok) return true;
        }
        return false;
    }

    void visit(const PrefixState& st, double value) {
        if (++nodes > budget) fail(ErrorKind::BudgetExceeded, "word enumeration exceeded the node budget");
        if (in_B()) events.push_back({value, st.point, 1, 0.0});
        std::vector<PrefixChild> kids;
        system.children(st, kids);
        for (const PrefixChild& c : kids) {
            const double v = value + c.cost;
            if (v > T) continue;
            path.push_back(c.letter);
            visit(c.state, v);
            path.pop_back();
        }
    }
};

}  // namespace

CountingLedger count_words(const PrefixSystem& system, double T, const std::vector<Word>& B, unsigned threads,
                           std::uint64_t node_budget) {
    std::vector<CountEvent> events;
    if (T < 0.0) return CountingLedger({}, 0.0, T);
    const PrefixState root = system.root();
    {
        WordCounter top{system, T, B, node_budget, 0, {}, {}};
        if (top.in_B()) events.push_back({0.0, root.point, 1, 0.0});
    }
    std::vector<PrefixChild> first;
    system.children(root, first);
    std::vector<std::vector<CountEvent>> parts(first.size());
    std::vector<std::uint64_t> used(first.size(), 0);
    parallel_for(first.size(), threads, [&](std::size_t i) {
        const PrefixChild& c = first[i];
        if (c.cost > T) return;
        WordCounter wc{system, T, B, node_budget, 0, {}, {}};
        wc.path.push_back(c.letter);
        wc.visit(c.state, c.cost);
        parts[i] = std::move(wc.events);
        used[i] = wc.nodes;
    });
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        total += used[i];
        events.insert(events.end(), parts[i].begin(), parts[i].end());
    }
    if (total > node_budget) fail(ErrorKind::BudgetExceeded, "word enumeration exceeded the node budget");
    return CountingLedger(std::move(events), root.point, T);
}

LatticeVerdict detect_lattice(const std::vector<double>& values, double tol, long max_denominator) {
    LatticeVerdict out;
    std::vector<double> v;
    for (double x : values) {
        if (std::abs(x) > tol) v.push_back(std::abs(x));
    }
    out.samples = v.size();
    if (v.empty()) return out;
    const double vmin = *std::min_element(v.begin(), v.end());
    long L = 1;
    for (double x : v) {
        const double r = x / vmin;
        // continued-fraction convergents p/q of r
        double rem = r;
        long p0 = 1, q0 = 0, p1 = static_cast<long>(std::floor(rem)), q1 = 1;
        bool found = false;
        for (int it = 0; it < 64; ++it) {
            if (std::abs(r - static_cast<double>(p1) / q1) <= tol * r) {
                found = true;
                break;
            }
            const double frac = rem - std::floor(rem);
            if (frac < 1e-300) break;
            rem = 1.0 / frac;
            const long a = static_cast<long>(std::floor(rem));
            const long p2 = a * p1 + p0, q2 = a * q1 + q0;
            if (q2 > max_denominator || q2 <= 0) break;
            p0 = p1;
            q0 = q1;
            p1 = p2;
            q1 = q2;
        }
        if (!found) return out;
        L = std::lcm(L, q1);
        if (L > max_denominator) return out;
    }
    const double a = vmin / static_cast<double>(L);
    for (double x : v) {
        const double k = std::round(x / a);
        if (std::abs(x / a - k) > tol * std::max(1.0, x / a)) return out;
    }
    out.lattice = true;
    out.generator = a;
    return out;
}

LatticeVerdict d_genericity(const SymbolicSystem& S, const PotentialSpec& psi, int max_period, double tol) {
    check_potential(S, psi);
    if (max_period < 1 || max_period > 12) fail(ErrorKind::InvalidArgument, "max_period must lie in [1, 12]");
    const int M = S.alphabet_size();
    std::vector<double> sums;
    int reached = 0;
    for (int p = 1; p <= max_period; ++p) {
        if (std::pow(static_cast<double>(M), p) > 4e6) break;
        std::vector<int> w(static_cast<std::size_t>(p), 0);
        while (true) {
            // keep primitive words in least rotation (Lyndon words)
            bool lyndon = true;
            for (int r = 1; r < p && lyndon; ++r) {
                for (int i = 0; i < p; ++i) {
                    const int a = w[(i + r) % p], b = w[i];
                    if (a != b) {
                        if (a < b) lyndon = false;
                        break;
                    }
                    if (i == p - 1) lyndon = false;  // rotation equals w: not primitive
                }
            }
            bool admissible = lyndon;
            for (int i = 0; i < p && admissible; ++i) admissible = S.allowed(w[i], w[(i + 1) % p]);
            if (admissible) {
                double s = 0.0;
                for (int j = 0; j < p; ++j) {
                    std::uint64_t code = 0;
                    for (int i = 0; i < psi.depth; ++i) code = code * static_cast<std::uint64_t>(M) + static_cast<std::uint64_t>(w[(j + i) % p]);
                    s += psi.value(code);
                }
                sums.push_back(-s);
            }
            int i = p - 1;
            while (i >= 0 && w[i] == M - 1) w[i--] = 0;
            if (i < 0) break;
            ++w[i];
        }
        reached = p;
    }
    LatticeVerdict v = detect_lattice(sums, tol);
    v.period_reached = reached;
    return v;
}

HolderFit holder_modulus_in_s(const SymbolicSystem& S, const PotentialSpec& psi, double q, cplx s0, double radius) {
    if (!(radius > 0.0)) fail(ErrorKind::InvalidArgument, "radius must be positive");
    const StateSpace states(S, psi.depth);
    const std::size_t n = states.size();
    const Matrix K0 = cylinder_operator(S, psi, s0, q).entries;
    // common prefix lengths between states, for the Holder part of the norm
    auto prefix = [&](std::size_t i, std::size_t j) {
        int c = 0;
        while (c < psi.depth && states.word(i)[c] == states.word(j)[c]) ++c;
        return c;
    };
    auto norm = [&](const Matrix& D) {
        double sup = 0.0, var = 0.0;
        for (std::size_t i = 0; i < n; ++i) sup = std::max(sup, D.row(static_cast<Eigen::Index>(i)).cwiseAbs().sum());
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double diff = (D.row(static_cast<Eigen::Index>(i)) - D.row(static_cast<Eigen::Index>(j))).cwiseAbs().sum();
                var = std::max(var, diff * std::exp(psi.alpha * prefix(i, j)));
            }
        }
        return sup + var;
    };
    HolderFit fit;
    const int j0 = static_cast<int>(std::ceil(-std::log2(radius)));
    for (int j = j0; j < j0 + 10; ++j) {
        const double step = std::pow(2.0, -j);
        const Matrix K1 = cylinder_operator(S, psi, s0 + cplx(0.0, step), q).entries;
        const double d = norm(K1 - K0);
        if (d > 0.0) {
            fit.steps.push_back(step);
            fit.differences.push_back(d);
        }
    }
    if (fit.steps.size() < 2) {
        fit.exponent = INFINITY;
        return fit;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(fit.steps.size());
    for (std::size_t i = 0; i < fit.steps.size(); ++i) {
        const double x = std::log(fit.steps[i]), y = std::log(fit.differences[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    fit.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.constant = std::exp((sy - fit.exponent * sx) / m);
    return fit;
}

}  // namespace thermo
