#include "thermo/cli_runner.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "thermo/blaschke.hpp"
#include "thermo/errors.hpp"
#include "thermo/markov_coding.hpp"
#include "thermo/orbit_counter.hpp"
#include "thermo/parabolic_inducer.hpp"
#include "thermo/parallel.hpp"
#include "thermo/shift_engine.hpp"
#include "thermo/stochastic_lab.hpp"
#include "thermo/transfer_spectral.hpp"

namespace thermo {

using nlohmann::json;

namespace {

enum class PType { Real, Int, Text, Flag, Complex, ComplexList, PairList, Word, WordList };

struct ParamSpec {
    const char* name;
    PType type;
    json def;
    const char* help;
};

struct CommandSpec {
    const char* name;
    const char* help;
    bool needs_seed;
    std::vector<ParamSpec> params;
};

const std::vector<CommandSpec>& commands() {
    static const std::vector<CommandSpec> table = {
        {"spectrum",
         "Leading eigenvalue, gap and residual of the weighted transfer operator (Ruelle-Perron-Frobenius theorem; "
         "Koenigs eigenvalues set the gap)",
         false,
         {{"s", PType::ComplexList, json::array({json::array({1.0, 0.0})}), "parameter s as re[,im], repeatable"},
          {"N", PType::Int, 256, "number of Fourier modes"},
          {"obs", PType::Text, "", "observable g added to the potential, e.g. 0.1*cos"},
          {"tol", PType::Real, 1e-12, "eigenvalue tolerance"}}},
        {"pressure",
         "First two derivatives of the pressure of -log|F'| + t g at t = 0 against the mean and the "
         "Green-Kubo variance",
         false,
         {{"obs", PType::Text, "cos", "observable g"},
          {"fd_step", PType::Real, 1e-2, "finite difference step"},
          {"N", PType::Int, 128, "number of Fourier modes"}}},
        {"count",
         "Backward orbit counting n(x, T, B) against e^T m(B) / Lambda (counting theorem; Cesaro version in the "
         "lattice case)",
         false,
         {{"T", PType::Real, 12.0, "largest log-derivative"},
          {"x", PType::Real, 0.0, "angle of the seed point"},
          {"arc", PType::PairList, json::array(), "arc a,b as endpoint angles, repeatable; default full circle"},
          {"strict", PType::Flag, false, "count values < T"},
          {"closed", PType::Flag, false, "count values <= T"},
          {"cesaro", PType::Flag, false, "add the Cesaro average column"},
          {"step", PType::Real, 1.0, "spacing of the T grid"},
          {"budget", PType::Real, 1e7, "node budget"}}},
        {"cesaro",
         "Cesaro average (1/T) integral N(t) e^{-t} dt against m(B) / Lambda (Cesaro counting theorem)",
         false,
         {{"T", PType::Real, 20.0, "horizon"},
          {"x", PType::Real, 0.0, "angle of the seed point"},
          {"arc", PType::PairList, json::array(), "arc a,b, repeatable; default full circle"},
          {"budget", PType::Real, 1e7, "node budget"}}},
        {"clt",
         "Monte Carlo Birkhoff sums against the normal law with Green-Kubo variance (central limit theorem)",
         true,
         {{"obs", PType::Text, "cos", "observable"},
          {"n", PType::Int, 4096, "orbit length"},
          {"samples", PType::Int, 100000, "number of samples"},
          {"iterator", PType::Text, "auto", "auto, float or exact"},
          {"kmax", PType::Int, 64, "Green-Kubo truncation"}}},
        {"clark",
         "Aleksandrov-Clark measure: atoms at the preimages of alpha with masses 1/|F'|",
         false,
         {{"alpha", PType::Real, 0.0, "angle of alpha"}}},
        {"nevanlinna",
         "Nevanlinna counting function of w against log(1/|w|) (equality for inner functions)",
         false,
         {{"w", PType::PairList, json::array({json::array({0.3, 0.2})}), "point re,im, repeatable"}}},
        {"shift-count",
         "Exact word counting N_xi^B(T) on a symbolic system or the coded system of a Blaschke product "
         "(symbolic counting theorem)",
         false,
         {{"T", PType::Real, 5.0, "largest Birkhoff sum of -psi"},
          {"xi", PType::Word, "1", "seed word for symbolic systems"},
          {"x", PType::Real, 1.0, "seed angle for Blaschke products"},
          {"base", PType::Real, 0.0, "fixed point generating the Markov partition"},
          {"cylinder", PType::WordList, json::array(), "cylinder word, repeatable; default everything"},
          {"budget", PType::Real, 1e7, "node budget"}}},
        {"d-generic",
         "Lattice test of periodic Birkhoff sums (D-genericity of the length spectrum)",
         false,
         {{"max_period", PType::Int, 8, "largest period scanned"},
          {"tol", PType::Real, 1e-9, "rationality tolerance"}}},
        {"eta",
         "Poincare series by partial sums and by the resolvent decomposition (convergence and residue at s = 1)",
         false,
         {{"s", PType::Complex, json::array({2.0, 0.0}), "parameter re[,im]"},
          {"xi", PType::Word, "1", "seed word"}}},
        {"kac",
         "Kac identity: Lyapunov exponent of the first return map equals the integral of log F' over the line",
         false,
         {{"N", PType::Int, 5, "core level"},
          {"strata", PType::Int, 10000, "return time cap"},
          {"quad", PType::Int, 32, "Gauss-Legendre nodes per stratum"}}},
        {"parabolic-count",
         "Preimage counting for a doubly parabolic map against e^T l(B) / integral log F' (parabolic counting "
         "theorem)",
         false,
         {{"T", PType::Real, 11.0, "largest log-derivative"},
          {"x", PType::Real, 0.5, "seed point in the core"},
          {"interval", PType::PairList, json::array({json::array({-1.0, 1.0})}), "interval a,b, repeatable"},
          {"core_level", PType::Int, 1, "core level of the real Markov partition"},
          {"step", PType::Real, 1.0, "spacing of the T grid"},
          {"budget", PType::Real, 2e8, "node budget"}}},
        {"holder-mod",
         "Fitted Holder modulus of s -> L_{s,q} on the critical line (regularity of the modified operators)",
         false,
         {{"q", PType::Real, 0.0, "order q"},
          {"s0", PType::Complex, json::array({1.0, 0.0}), "base point re[,im]"},
          {"radius", PType::Real, 0.5, "largest step"}}},
    };
    return table;
}

const CommandSpec& find_command(const std::string& name) {
    for (const CommandSpec& c : commands()) {
        if (name == c.name) return c;
    }
    fail(ErrorKind::InvalidConfig, "unknown command: " + name);
}

std::vector<double> parse_numbers(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            fail(ErrorKind::InvalidConfig, "not a number: " + item);
        }
        while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
        if (pos != item.size()) fail(ErrorKind::InvalidConfig, "not a number: " + item);
        out.push_back(v);
    }
    return out;
}

json complex_from_text(const std::string& text) {
    const std::vector<double> v = parse_numbers(text);
    if (v.empty() || v.size() > 2) fail(ErrorKind::InvalidConfig, "expected re[,im]: " + text);
    return json::array({v[0], v.size() == 2 ? v[1] : 0.0});
}

json pair_from_text(const std::string& text) {
    const std::vector<double> v = parse_numbers(text);
    if (v.size() != 2) fail(ErrorKind::InvalidConfig, "expected a,b: " + text);
    return json::array({v[0], v[1]});
}

bool is_pair(const json& v) {
    return v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number();
}

void check_type(const ParamSpec& p, const json& v) {
    bool ok = false;
    switch (p.type) {
        case PType::Real: ok = v.is_number(); break;
        case PType::Int: ok = v.is_number_integer(); break;
        case PType::Text: ok = v.is_string(); break;
        case PType::Flag: ok = v.is_boolean(); break;
        case PType::Complex: ok = is_pair(v); break;
        case PType::ComplexList:
        case PType::PairList:
            ok = v.is_array() && std::all_of(v.begin(), v.end(), is_pair);
            break;
        case PType::Word:
            ok = v.is_string();
            if (ok && !v.get<std::string>().empty()) parse_word(v.get<std::string>());
            break;
        case PType::WordList:
            ok = v.is_array() && std::all_of(v.begin(), v.end(), [](const json& w) { return w.is_string(); });
            if (ok) {
                for (const json& w : v) parse_word(w.get<std::string>());
            }
            break;
    }
    if (!ok) fail(ErrorKind::InvalidConfig, std::string("parameter has the wrong type: ") + p.name);
}

json complete_params(const CommandSpec& c, const json& given) {
    if (!given.is_object()) fail(ErrorKind::InvalidConfig, "params must be an object");
    for (auto it = given.begin(); it != given.end(); ++it) {
        const bool known = std::any_of(c.params.begin(), c.params.end(),
                                       [&](const ParamSpec& p) { return it.key() == p.name; });
        if (!known) fail(ErrorKind::InvalidConfig, "unknown parameter for " + std::string(c.name) + ": " + it.key());
    }
    json out = json::object();
    for (const ParamSpec& p : c.params) {
        json v = given.contains(p.name) ? given.at(p.name) : p.def;
        check_type(p, v);
        out[p.name] = v;
    }
    return out;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
    if (!j.is_object()) fail(ErrorKind::InvalidConfig, std::string(what) + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
        if (!ok) fail(ErrorKind::InvalidConfig, std::string("unknown field in ") + what + ": " + it.key());
    }
}

std::string kind_of(const json& map) {
    if (!map.is_object()) fail(ErrorKind::InvalidConfig, "map must be a JSON object");
    if (map.contains("kind")) {
        if (!map.at("kind").is_string()) fail(ErrorKind::InvalidConfig, "map kind must be a string");
        return map.at("kind").get<std::string>();
    }
    if (map.contains("alphabet")) return "symbolic";
    fail(ErrorKind::InvalidConfig, "map has no kind");
}

double number(const json& j, const char* key, double def) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_number()) fail(ErrorKind::InvalidConfig, std::string("field must be a number: ") + key);
    return j.at(key).get<double>();
}

BlaschkeMap make_blaschke(const json& map) {
    const std::string kind = kind_of(map);
    if (kind == "monomial") {
        check_keys(map, {"kind", "d", "rotation"}, "monomial map");
        if (!map.contains("d") || !map.at("d").is_number_integer()) {
            fail(ErrorKind::InvalidConfig, "monomial map needs an integer d");
        }
        return BlaschkeMap::monomial(map.at("d").get<int>(), number(map, "rotation", 0.0));
    }
    if (kind == "blaschke") {
        check_keys(map, {"kind", "zeros", "rotation"}, "blaschke map");
        if (!map.contains("zeros") || !map.at("zeros").is_array()) {
            fail(ErrorKind::InvalidConfig, "blaschke map needs a zeros array");
        }
        std::vector<cplx> zeros;
        for (const json& z : map.at("zeros")) {
            if (!is_pair(z)) fail(ErrorKind::InvalidConfig, "zeros are [re, im] pairs");
            zeros.emplace_back(z[0].get<double>(), z[1].get<double>());
        }
        try {
            return BlaschkeMap(zeros, number(map, "rotation", 0.0));
        } catch (const Error& e) {
            fail(ErrorKind::InvalidConfig, e.what());
        }
    }
    fail(ErrorKind::InvalidConfig, "command needs a blaschke or monomial map, got " + kind);
}

ParabolicMap make_parabolic(const json& map) {
    if (kind_of(map) != "parabolic") fail(ErrorKind::InvalidConfig, "command needs a parabolic map");
    check_keys(map, {"kind", "poles", "translation"}, "parabolic map");
    if (!map.contains("poles") || !map.at("poles").is_array()) fail(ErrorKind::InvalidConfig, "parabolic map needs poles");
    std::vector<Pole> poles;
    for (const json& p : map.at("poles")) {
        if (!is_pair(p)) fail(ErrorKind::InvalidConfig, "poles are [b, t] pairs");
        poles.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return build_parabolic(poles, number(map, "translation", 0.0));
}

struct Symbolic {
    SymbolicSystem system;
    PotentialSpec potential;
};

Symbolic make_symbolic(const json& map) {
    const std::string kind = kind_of(map);
    if (kind == "gauss_like") {
        check_keys(map, {"kind", "alphabet", "calibrate"}, "gauss_like system");
        if (!map.contains("alphabet") || !map.at("alphabet").is_number_integer()) {
            fail(ErrorKind::InvalidConfig, "gauss_like system needs an integer alphabet");
        }
        const int M = map.at("alphabet").get<int>();
        if (M < 2 || M > 4096) fail(ErrorKind::InvalidConfig, "alphabet must lie in [2, 4096]");
        Symbolic out{SymbolicSystem::full(M), gauss_like_potential(M)};
        out.potential.alpha = 1.0;
        if (map.value("calibrate", false)) out.potential = calibrate(out.system, out.potential);
        return out;
    }
    if (kind != "symbolic") fail(ErrorKind::InvalidConfig, "command needs a symbolic system, got " + kind);
    check_keys(map, {"kind", "alphabet", "incidence", "potential"}, "symbolic system");
    if (!map.contains("alphabet") || !map.at("alphabet").is_number_integer()) {
        fail(ErrorKind::InvalidConfig, "symbolic system needs an integer alphabet");
    }
    const int M = map.at("alphabet").get<int>();
    if (M < 1 || M > 4096) fail(ErrorKind::InvalidConfig, "alphabet must lie in [1, 4096]");
    std::vector<std::vector<int>> A(static_cast<std::size_t>(M), std::vector<int>(static_cast<std::size_t>(M), 1));
    if (map.contains("incidence") && !(map.at("incidence").is_string() && map.at("incidence") == "full")) {
        const json& inc = map.at("incidence");
        if (!inc.is_array() || static_cast<int>(inc.size()) != M) fail(ErrorKind::InvalidConfig, "incidence must be M x M");
        for (int a = 0; a < M; ++a) {
            if (!inc[a].is_array() || static_cast<int>(inc[a].size()) != M) {
                fail(ErrorKind::InvalidConfig, "incidence must be M x M");
            }
            for (int b = 0; b < M; ++b) {
                if (!inc[a][b].is_number_integer()) fail(ErrorKind::InvalidConfig, "incidence entries are 0 or 1");
                A[a][b] = inc[a][b].get<int>();
            }
        }
    }
    SymbolicSystem S(M, A);
    if (!map.contains("potential")) fail(ErrorKind::InvalidConfig, "symbolic system needs a potential");
    const json& pj = map.at("potential");
    check_keys(pj, {"depth", "values", "alpha", "v_alpha", "tail_mass", "bernoulli", "constant", "calibrate"},
               "potential");
    PotentialSpec psi;
    if (pj.contains("bernoulli")) {
        psi = bernoulli_potential(pj.at("bernoulli").get<std::vector<double>>());
        if (static_cast<int>(psi.values.size()) != M) fail(ErrorKind::InvalidConfig, "need one weight per letter");
    } else if (pj.contains("constant")) {
        psi = constant_potential(M, number(pj, "constant", 0.0));
    } else {
        if (!pj.contains("values") || !pj.at("values").is_object()) {
            fail(ErrorKind::InvalidConfig, "potential needs values, bernoulli or constant");
        }
        const int depth = pj.contains("depth") ? pj.at("depth").get<int>() : 1;
        if (depth < 1 || std::pow(static_cast<double>(M), depth) > 4e6) {
            fail(ErrorKind::InvalidConfig, "potential depth out of range");
        }
        psi.depth = depth;
        psi.values.assign(static_cast<std::size_t>(std::llround(std::pow(M, depth))), 0.0);
        const StateSpace states(S, depth);
        std::vector<bool> seen(psi.values.size(), false);
        for (auto it = pj.at("values").begin(); it != pj.at("values").end(); ++it) {
            const Word w = parse_word(it.key());
            if (static_cast<int>(w.size()) != depth) fail(ErrorKind::InvalidConfig, "value key has the wrong length");
            std::vector<int> letters;
            for (int a : w) {
                if (a < 1 || a > M) fail(ErrorKind::InvalidConfig, "letter out of range in " + it.key());
                letters.push_back(a - 1);
            }
            if (!it.value().is_number()) fail(ErrorKind::InvalidConfig, "potential values must be numbers");
            const std::uint64_t code = states.code_of(letters);
            psi.values[code] = it.value().get<double>();
            seen[code] = true;
        }
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (!seen[states.code(i)]) {
                fail(ErrorKind::InvalidConfig, "missing potential value for " + format_word([&] {
                         Word w;
                         for (int a : states.word(i)) w.push_back(a + 1);
                         return w;
                     }()));
            }
        }
    }
    psi.alpha = number(pj, "alpha", 1.0);
    psi.v_alpha = number(pj, "v_alpha", 0.0);
    psi.tail_mass = number(pj, "tail_mass", psi.tail_mass);
    if (pj.value("calibrate", false)) psi = calibrate(S, psi);
    return {S, psi};
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_of(const json& v) { return {v[0].get<double>(), v[1].get<double>()}; }

// T grid step, 2 step, ..., ending exactly at T.
std::vector<double> t_grid(double T, double step) {
    if (!(step > 0.0)) fail(ErrorKind::InvalidConfig, "step must be positive");
    std::vector<double> out;
    for (long k = 1; k * step < T - 1e-12; ++k) out.push_back(static_cast<double>(k) * step);
    out.push_back(T);
    return out;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void dump_into(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                dump_into(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                dump_into(j[i], out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? fmt(v) : "null";
            break;
        }
        default:
            out += j.dump();
    }
}

struct Report {
    bool csv = false;
    json result;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

ArcSet arcs_from(const json& list) {
    if (list.empty()) return ArcSet::full_circle();
    std::vector<Arc> arcs;
    for (const json& a : list) arcs.push_back(Arc::from_endpoints(a[0].get<double>(), a[1].get<double>()));
    return ArcSet(arcs);
}

std::uint64_t budget_of(const json& p) {
    const double b = p.at("budget").get<double>();
    if (!(b >= 1.0) || b > 1e12) fail(ErrorKind::InvalidConfig, "budget must lie in [1, 1e12]");
    return static_cast<std::uint64_t>(b);
}

Report cmd_spectrum(const ExperimentConfig& c, unsigned threads) {
    const BlaschkeMap F = make_blaschke(c.map);
    const json& p = c.params;
    const std::string obs = p.at("obs").get<std::string>();
    std::unique_ptr<TrigPolynomial> g;
    if (!obs.empty()) g = std::make_unique<TrigPolynomial>(TrigPolynomial::parse(obs));
    Report r;
    r.csv = true;
    r.columns = {"s_re", "s_im", "lambda_re", "lambda_im", "gap", "residual"};
    for (const json& sj : p.at("s")) {
        const cplx s = complex_of(sj);
        const OperatorMatrix M = assemble_operator(F, s, g.get(), p.at("N").get<int>(), threads);
        const SpectralData S = leading_eigen(M, p.at("tol").get<double>());
        r.rows.push_back({s.real(), s.imag(), S.lambda.real(), S.lambda.imag(), S.gap, S.residual});
    }
    return r;
}

Report cmd_pressure(const ExperimentConfig& c, unsigned threads) {
    const BlaschkeMap F = make_blaschke(c.map);
    const json& p = c.params;
    const TrigPolynomial g = TrigPolynomial::parse(p.at("obs").get<std::string>());
    const PressureDerivatives d =
        pressure_and_derivs(F, g, p.at("fd_step").get<double>(), p.at("N").get<int>(), threads);
    Report r;
    r.result = {{"p0", d.p0},
                {"p1", d.p1},
                {"p2", d.p2},
                {"mean_prediction", d.mean_prediction},
                {"variance_prediction", d.variance_prediction},
                {"worst_gap", d.worst_gap}};
    return r;
}

Report cmd_count(const ExperimentConfig& c, unsigned threads) {
    const BlaschkeMap F = make_blaschke(c.map);
    const json& p = c.params;
    if (p.at("strict").get<bool>() && p.at("closed").get<bool>()) {
        fail(ErrorKind::InvalidConfig, "--strict and --closed are exclusive");
    }
    const Boundary b = p.at("closed").get<bool>() ? Boundary::Closed : Boundary::Strict;
    const double T = p.at("T").get<double>();
    const ArcSet B = arcs_from(p.at("arc"));
    EnumerateOptions opts;
    opts.threads = threads;
    opts.node_budget = budget_of(p);
    const CountingLedger L = restrict(enumerate(F, CirclePoint(p.at("x").get<double>()), T, opts), B);
    const double lambda = F.is_monomial() ? std::log(static_cast<double>(F.degree())) : lyapunov_exponent(F);
    const double mB = B.measure();
    const bool ces = p.at("cesaro").get<bool>();
    Report r;
    r.csv = true;
    r.columns = {"T", "N", "N_exp_ratio"};
    if (ces) r.columns.push_back("cesaro");
    for (double t : t_grid(T, p.at("step").get<double>())) {
        const double N = static_cast<double>(L.count(t, b));
        std::vector<double> row{t, N, N * std::exp(-t) * lambda / mB};
        if (ces) row.push_back(cesaro_average(L, t));
        r.rows.push_back(row);
    }
    return r;
}

Report cmd_cesaro(const ExperimentConfig& c, unsigned threads) {
    const BlaschkeMap F = make_blaschke(c.map);
    const json& p = c.params;
    const double T = p.at("T").get<double>();
    const ArcSet B = arcs_from(p.at("arc"));
    EnumerateOptions opts;
    opts.threads = threads;
    opts.node_budget = budget_of(p);
    const CountingLedger L = restrict(enumerate(F, CirclePoint(p.at("x").get<double>()), T, opts), B);
    const double lambda = F.is_monomial() ? std::log(static_cast<double>(F.degree())) : lyapunov_exponent(F);
    const double predicted = B.measure() / lambda;
    const double value = cesaro_average(L, T);
    Report r;
    r.result = {{"T", T},
                {"cesaro", value},
                {"predicted", predicted},
                {"ratio", value / predicted},
                {"lyapunov", lambda},
                {"measure", B.measure()}};
    return r;
}

Report cmd_clt(const ExperimentConfig& c, unsigned threads) {
    const BlaschkeMap F = make_blaschke(c.map);
    const json& p = c.params;
    const TrigPolynomial h = TrigPolynomial::parse(p.at("obs").get<std::string>());
    const std::string it = p.at("iterator").get<std::string>();
    OrbitIterator mode = OrbitIterator::Automatic;
    if (it == "float") mode = OrbitIterator::Floating;
    else if (it == "exact") mode = OrbitIterator::ExactDigits;
    else if (it != "auto") fail(ErrorKind::InvalidConfig, "iterator must be auto, float or exact");
    const GreenKubo gk = green_kubo_variance(F, h, p.at("kmax").get<int>());
    const BirkhoffSample S =
        birkhoff_samples(F, h, p.at("n").get<int>(), p.at("samples").get<int>(), *c.seed, threads, mode);
    const CltDiagnostics d = clt_diagnostics(S, gk.sigma2);
    Report r;
    r.result = {{"n", S.n},
                {"samples", static_cast<std::int64_t>(S.values.size())},
                {"seed", *c.seed},
                {"sigma2_gk", gk.sigma2},
                {"sigma2_gk_truncation", gk.truncation_error},
                {"sigma2_mc", S.variance()},
                {"mean", S.mean()},
                {"ks_stat", d.ks_stat}};
    return r;
}

Report cmd_clark(const ExperimentConfig& c, unsigned) {
    const BlaschkeMap F = make_blaschke(c.map);
    const ClarkMeasure mu = clark_measure(F, CirclePoint(c.params.at("alpha").get<double>()));
    json atoms = json::array();
    for (const ClarkAtom& a : mu.atoms) atoms.push_back(json::array({a.location.angle(), a.mass}));
    Report r;
    r.result = {{"alpha", mu.alpha.angle()}, {"atoms", atoms}, {"total_mass", mu.total_mass()}};
    return r;
}

Report cmd_nevanlinna(const ExperimentConfig& c, unsigned) {
    const BlaschkeMap F = make_blaschke(c.map);
    json rows = json::array();
    for (const json& wj : c.params.at("w")) {
        const cplx w = complex_of(wj);
        json pre = json::array();
        for (cplx z : disk_preimages(F, w)) pre.push_back(complex_json(z));
        const double N = nevanlinna(F, w);
        rows.push_back({{"w", complex_json(w)},
                        {"N", N},
                        {"log_inv_abs_w", -std::log(std::abs(w))},
                        {"preimages", pre}});
    }
    Report r;
    r.result = {{"points", rows}};
    return r;
}

Report cmd_shift_count(const ExperimentConfig& c, unsigned threads) {
    const json& p = c.params;
    const double T = p.at("T").get<double>();
    std::vector<Word> B;
    for (const json& w : p.at("cylinder")) B.push_back(parse_word(w.get<std::string>()));
    const std::string kind = kind_of(c.map);
    CountingLedger L;
    if (kind == "blaschke" || kind == "monomial") {
        const BlaschkeMap F = make_blaschke(c.map);
        const MarkovPartition P = build_partition(F, CirclePoint(p.at("base").get<double>()));
        const CodedCirclePrefix sys(P, CirclePoint(p.at("x").get<double>()));
        L = count_words(sys, T, B, threads, budget_of(p));
    } else {
        const Symbolic sym = make_symbolic(c.map);
        const LocallyConstantPrefix sys(sym.system, sym.potential, parse_word(p.at("xi").get<std::string>()));
        L = count_words(sys, T, B, threads, budget_of(p));
    }
    Report r;
    r.csv = true;
    r.columns = {"T", "N"};
    for (double v : L.distinct_values()) {
        if (v > T) break;
        r.rows.push_back({v, static_cast<double>(L.count(v, Boundary::Closed))});
    }
    return r;
}

json verdict_json(const LatticeVerdict& v) {
    return {{"lattice", v.lattice},
            {"generator", v.generator},
            {"period_reached", v.period_reached},
            {"samples", static_cast<std::int64_t>(v.samples)}};
}

Report cmd_d_generic(const ExperimentConfig& c, unsigned) {
    const json& p = c.params;
    const int max_period = p.at("max_period").get<int>();
    const double tol = p.at("tol").get<double>();
    const std::string kind = kind_of(c.map);
    LatticeVerdict v;
    if (kind == "parabolic") {
        const ParabolicMap P = make_parabolic(c.map);
        const std::vector<double> L = periodic_log_multipliers(P, max_period);
        v = detect_lattice(L, tol);
        v.period_reached = max_period;
    } else if (kind == "blaschke" || kind == "monomial") {
        const BlaschkeMap F = make_blaschke(c.map);
        std::vector<double> L;
        int reached = 0;
        for (int n = 1; n <= max_period; ++n) {
            if (std::pow(static_cast<double>(F.degree()), n) > 1e6) break;
            for (const PeriodicPoint& q : periodic_points(F, n)) L.push_back(std::log(q.multiplier));
            reached = n;
        }
        v = detect_lattice(L, tol);
        v.period_reached = reached;
    } else {
        const Symbolic sym = make_symbolic(c.map);
        v = d_genericity(sym.system, sym.potential, max_period, tol);
    }
    Report r;
    r.result = verdict_json(v);
    return r;
}

Report cmd_eta(const ExperimentConfig& c, unsigned) {
    const Symbolic sym = make_symbolic(c.map);
    const cplx s = complex_of(c.params.at("s"));
    const EtaResult e =
        poincare_eta(sym.system, sym.potential, {}, s, parse_word(c.params.at("xi").get<std::string>()));
    Report r;
    r.result = {{"s", complex_json(s)},
                {"series", complex_json(e.series)},
                {"resolvent", complex_json(e.resolvent)},
                {"series_converged", e.series_converged},
                {"terms", e.terms}};
    return r;
}

Report cmd_kac(const ExperimentConfig& c, unsigned) {
    const ParabolicMap P = make_parabolic(c.map);
    const json& p = c.params;
    const KacResult k = kac_check(P, p.at("N").get<int>(), p.at("quad").get<int>(), p.at("strata").get<int>());
    Report r;
    r.result = {{"lhs", k.lhs},
                {"rhs", k.rhs},
                {"ratio", k.lhs / k.rhs},
                {"direct", k.direct},
                {"excursions", k.excursions},
                {"tail", k.tail},
                {"tail_uncertainty", k.tail_uncertainty},
                {"length_sum", k.length_sum},
                {"core_length", k.core_length},
                {"strata", k.strata}};
    return r;
}

Report cmd_parabolic_count(const ExperimentConfig& c, unsigned) {
    const ParabolicMap P = make_parabolic(c.map);
    const json& p = c.params;
    const double T = p.at("T").get<double>();
    std::vector<Interval> B;
    double lB = 0.0;
    for (const json& iv : p.at("interval")) {
        B.push_back({iv[0].get<double>(), iv[1].get<double>()});
        lB += B.back().length();
    }
    if (B.empty() || !(lB > 0.0)) fail(ErrorKind::InvalidConfig, "need at least one interval of positive length");
    ParabolicCountOptions opts;
    opts.core_level = p.at("core_level").get<int>();
    opts.node_budget = budget_of(p);
    const CountingLedger L = parabolic_count(P, p.at("x").get<double>(), T, B, opts);
    const double lyap = real_lyapunov(P);
    Report r;
    r.csv = true;
    r.columns = {"T", "N", "N_exp_ratio"};
    for (double t : t_grid(T, p.at("step").get<double>())) {
        const double N = static_cast<double>(L.count(t, Boundary::Closed));
        r.rows.push_back({t, N, N * std::exp(-t) * lyap / lB});
    }
    return r;
}

Report cmd_holder_mod(const ExperimentConfig& c, unsigned) {
    const Symbolic sym = make_symbolic(c.map);
    const json& p = c.params;
    const HolderFit h = holder_modulus_in_s(sym.system, sym.potential, p.at("q").get<double>(),
                                            complex_of(p.at("s0")), p.at("radius").get<double>());
    Report r;
    r.result = {{"constant", h.constant}, {"exponent", h.exponent}, {"steps", h.steps}, {"differences", h.differences}};
    return r;
}

Report dispatch(const ExperimentConfig& c, unsigned threads) {
    static const std::map<std::string, Report (*)(const ExperimentConfig&, unsigned)> table = {
        {"spectrum", cmd_spectrum},       {"pressure", cmd_pressure},
        {"count", cmd_count},             {"cesaro", cmd_cesaro},
        {"clt", cmd_clt},                 {"clark", cmd_clark},
        {"nevanlinna", cmd_nevanlinna},   {"shift-count", cmd_shift_count},
        {"d-generic", cmd_d_generic},     {"eta", cmd_eta},
        {"kac", cmd_kac},                 {"parabolic-count", cmd_parabolic_count},
        {"holder-mod", cmd_holder_mod},
    };
    return table.at(c.command)(c, threads);
}

json load_json_text(const std::string& text) {
    std::string body = text;
    const auto first = body.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) fail(ErrorKind::InvalidConfig, "empty JSON argument");
    if (body[first] != '{' && body[first] != '[') {
        std::ifstream in(text);
        if (!in) fail(ErrorKind::InvalidConfig, "cannot read " + text);
        std::stringstream ss;
        ss << in.rdbuf();
        body = ss.str();
    }
    // a CSV artifact carries its config on the first comment line
    const std::string tag = "# config: ";
    if (body.compare(0, tag.size(), tag) == 0) body = body.substr(tag.size(), body.find('\n') - tag.size());
    try {
        return json::parse(body);
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidConfig, std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace

json ExperimentConfig::to_json() const {
    json j = {{"command", command}, {"map", map}, {"params", params}};
    if (seed) j["seed"] = *seed;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    check_keys(j, {"command", "map", "params", "seed"}, "config");
    if (!j.contains("command") || !j.at("command").is_string()) fail(ErrorKind::InvalidConfig, "config needs a command");
    if (!j.contains("map")) fail(ErrorKind::InvalidConfig, "config needs a map");
    ExperimentConfig c;
    c.command = j.at("command").get<std::string>();
    const CommandSpec& spec = find_command(c.command);
    c.map = j.at("map");
    // building the map validates its fields
    const std::string kind = kind_of(c.map);
    if (kind == "monomial" || kind == "blaschke") {
        make_blaschke(c.map);
    } else if (kind == "parabolic") {
        make_parabolic(c.map);
    } else if (kind == "symbolic" || kind == "gauss_like") {
        make_symbolic(c.map);
    } else {
        fail(ErrorKind::InvalidConfig, "unknown map kind " + kind);
    }
    c.params = complete_params(spec, j.value("params", json::object()));
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) fail(ErrorKind::InvalidConfig, "seed must be a non-negative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (spec.needs_seed && !c.seed) fail(ErrorKind::InvalidConfig, c.command + " needs --seed");
    return c;
}

std::string dump_json(const json& j) {
    std::string out;
    dump_into(j, out);
    return out;
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

Artifact run_experiment(const ExperimentConfig& config) {
    const ExperimentConfig c = ExperimentConfig::from_json(config.to_json());
    const unsigned threads = resolve_threads(config.threads);
    const Report r = dispatch(c, threads);
    Artifact a;
    if (r.csv) {
        std::string body;
        for (std::size_t i = 0; i < r.columns.size(); ++i) body += (i ? "," : "") + r.columns[i];
        body += '\n';
        for (const auto& row : r.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) body += (i ? "," : "") + fmt(row[i]);
            body += '\n';
        }
        a.content_sha256 = sha256_hex(body);
        a.text = "# config: " + dump_json(c.to_json()) + "\n# content_sha256: " + a.content_sha256 + "\n" + body;
    } else {
        a.content_sha256 = sha256_hex(dump_json(r.result));
        const json doc = {{"config", c.to_json()}, {"result", r.result}, {"content_sha256", a.content_sha256}};
        a.text = dump_json(doc) + "\n";
    }
    return a;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Thermodynamic formalism experiments for inner functions"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 0;
    std::string output;
    app.add_option("--threads", threads, "worker threads (default THERMO_THREADS or machine parallelism)");
    app.add_option("-o,--out", output, "write the artifact to this file instead of standard output");

    struct Holder {
        const ParamSpec* spec;
        std::string text;
        std::vector<std::string> list;
        bool flag = false;
        CLI::Option* opt = nullptr;
    };
    struct Sub {
        const CommandSpec* spec;
        CLI::App* app;
        std::string map;
        std::uint64_t seed = 0;
        CLI::Option* seed_opt = nullptr;
        std::vector<std::unique_ptr<Holder>> holders;
    };
    std::vector<std::unique_ptr<Sub>> subs;
    for (const CommandSpec& c : commands()) {
        auto s = std::make_unique<Sub>();
        s->spec = &c;
        s->app = app.add_subcommand(c.name, c.help);
        s->app->add_option("--map,--system", s->map, "map or system as inline JSON or a file path")->required();
        s->seed_opt = s->app->add_option("--seed", s->seed, "random seed");
        if (c.needs_seed) s->seed_opt->required();
        for (const ParamSpec& p : c.params) {
            auto h = std::make_unique<Holder>();
            h->spec = &p;
            const std::string flag = "--" + std::string(p.name);
            if (p.type == PType::Flag) {
                h->opt = s->app->add_flag(flag, h->flag, p.help);
            } else if (p.type == PType::ComplexList || p.type == PType::PairList || p.type == PType::WordList) {
                h->opt = s->app->add_option(flag, h->list, p.help)->allow_extra_args(false);
            } else {
                h->opt = s->app->add_option(flag, h->text, p.help);
            }
            s->holders.push_back(std::move(h));
        }
        subs.push_back(std::move(s));
    }
    std::string replay_path;
    CLI::App* replay = app.add_subcommand("replay", "re-run the config embedded in an artifact or config file");
    replay->add_option("--config", replay_path, "artifact or config JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig config;
        if (replay->parsed()) {
            json j = load_json_text(replay_path);
            if (j.contains("config")) j = j.at("config");
            config = ExperimentConfig::from_json(j);
        } else {
            for (const auto& s : subs) {
                if (!s->app->parsed()) continue;
                json params = json::object();
                for (const auto& h : s->holders) {
                    if (h->opt->count() == 0) continue;
                    const ParamSpec& p = *h->spec;
                    json v;
                    switch (p.type) {
                        case PType::Flag: v = h->flag; break;
                        case PType::Real: {
                            const auto nums = parse_numbers(h->text);
                            if (nums.size() != 1) fail(ErrorKind::InvalidConfig, "expected one number for --" + std::string(p.name));
                            v = nums[0];
                            break;
                        }
                        case PType::Int: {
                            std::size_t pos = 0;
                            long long n = 0;
                            try {
                                n = std::stoll(h->text, &pos);
                            } catch (const std::exception&) {
                                pos = 0;
                            }
                            if (pos == 0 || pos != h->text.size()) {
                                fail(ErrorKind::InvalidConfig, "expected an integer for --" + std::string(p.name));
                            }
                            v = n;
                            break;
                        }
                        case PType::Text:
                        case PType::Word: v = h->text; break;
                        case PType::Complex: v = complex_from_text(h->text); break;
                        case PType::ComplexList:
                            v = json::array();
                            for (const auto& t : h->list) v.push_back(complex_from_text(t));
                            break;
                        case PType::PairList:
                            v = json::array();
                            for (const auto& t : h->list) v.push_back(pair_from_text(t));
                            break;
                        case PType::WordList:
                            v = json::array();
                            for (const auto& t : h->list) v.push_back(t);
                            break;
                    }
                    params[p.name] = v;
                }
                json j = {{"command", s->spec->name}, {"map", load_json_text(s->map)}, {"params", params}};
                if (s->seed_opt->count() > 0) j["seed"] = s->seed;
                config = ExperimentConfig::from_json(j);
            }
        }
        config.threads = threads;
        config.output = output;
        const Artifact a = run_experiment(config);
        if (output.empty()) {
            std::cout << a.text;
            std::cout.flush();
        } else {
            std::ofstream out(output, std::ios::binary);
            if (!out) fail(ErrorKind::InvalidConfig, "cannot write " + output);
            out << a.text;
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_budget_or_convergence(e.kind()) ? 3 : 2;
    } catch (const json::exception& e) {
        std::cerr << "error: InvalidConfig: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace thermo
