#include <cmath>
#include <random>

#include "doctest.h"
#include "thermo/errors.hpp"
#include "thermo/shift_engine.hpp"

using namespace thermo;
using doctest::Approx;

namespace {

const double kLog2 = std::log(2.0);

SymbolicSystem golden() { return SymbolicSystem(2, {{1, 1}, {1, 0}}); }

PotentialSpec bern3() { return bernoulli_potential({0.5, 1.0 / 3, 1.0 / 6}); }

double bern3_entropy() { return 0.5 * std::log(2.0) + std::log(3.0) / 3 + std::log(6.0) / 6; }

// Random depth-2 potential on the full 3-shift with values in [-3, -0.5].
PotentialSpec random_depth2(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-3.0, -0.5);
    PotentialSpec psi;
    psi.depth = 2;
    for (int i = 0; i < 9; ++i) psi.values.push_back(u(rng));
    return psi;
}

}  // namespace

TEST_SUITE("shift_engine") {
    TEST_CASE("check_finitely_primitive examples") {
        const PrimitivityWitness full = check_finitely_primitive(SymbolicSystem::full(2), 8);
        CHECK(full.length == 1);
        CHECK(full.words.size() == 2);
        // the letter 1 follows and precedes everything, so length 1 already connects the golden mean
        const PrimitivityWitness g = check_finitely_primitive(golden(), 8);
        CHECK(g.length == 1);
        CHECK(g.words == std::vector<Word>{{1}, {2}});
        try {
            check_finitely_primitive(SymbolicSystem(3, {{1, 1, 0}, {1, 1, 0}, {0, 0, 0}}), 8);
            FAIL("expected NotFoundWithinBudget");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NotFoundWithinBudget);
        }
    }

    TEST_CASE("summability_stats examples") {
        const SummabilityStats s1 = summability_stats(SymbolicSystem::full(3), bern3(), 1.0, 1.0);
        CHECK(s1.sup_sum == Approx(bern3_entropy()).epsilon(1e-14));
        CHECK(s1.integral == Approx(bern3_entropy()).epsilon(1e-10));
        const SummabilityStats s0 = summability_stats(SymbolicSystem::full(3), bern3(), 1.0, 0.0);
        CHECK(s0.inf_sum == Approx(1.0).epsilon(1e-14));
        CHECK(s0.sup_sum == Approx(1.0).epsilon(1e-14));
        CHECK(s0.integral == Approx(1.0).epsilon(1e-10));

        const int M = 200;
        const SummabilityStats g = summability_stats(SymbolicSystem::full(M), gauss_like_potential(M), 1.0, 2.0);
        double direct = 0.0;
        for (int n = 1; n <= M; ++n) direct += std::pow(2.0 * std::log(n), 2) / (double(n) * n);
        CHECK(g.sup_sum == Approx(direct).epsilon(1e-12));
        CHECK(g.ratio > 0.0);
        CHECK(g.ratio < 50.0);
    }

    TEST_CASE("cylinder_operator examples") {
        const SymbolicSystem S = SymbolicSystem::full(2);
        const PotentialSpec psi = constant_potential(2, -kLog2);
        const CylinderMatrix K1 = cylinder_operator(S, psi, 1.0, 0.0);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(std::abs(K1.entries(i, j) - 0.5) < 1e-15);
        CHECK(std::abs(spectral_data(S, psi, 1.0).lambda - 1.0) < 1e-13);
        CHECK(std::abs(spectral_data(S, psi, 2.0).lambda - 0.5) < 1e-13);
        const CylinderMatrix Kp = cylinder_operator(S, psi, 1.0, 1.0);
        CHECK(std::abs(Kp.entries(0, 1) + 0.5 * kLog2) < 1e-15);
        const Vector ones = Vector::Ones(2);
        CHECK((Kp.entries * ones - cplx(-kLog2) * ones).cwiseAbs().maxCoeff() < 1e-15);
    }

    TEST_CASE("spectral_data examples") {
        const SymbolicSystem S2 = SymbolicSystem::full(2);
        const PotentialSpec c = constant_potential(2, -kLog2);
        for (double a : {0.3, 1.0, 4.0}) {
            CHECK(spectral_radius(S2, c, cplx(1.0, a)) == Approx(1.0).epsilon(1e-9));
            const ShiftSpectralData d = spectral_data(S2, c, cplx(1.0, a));
            CHECK(std::abs(d.lambda - std::exp(cplx(0.0, -a * kLog2))) < 1e-12);
        }
        CHECK(spectral_radius(SymbolicSystem::full(3), bern3(), cplx(1.0, 1.0)) < 0.99);
        const PotentialSpec gm = calibrate(golden(), constant_potential(2, -kLog2));
        const ShiftSpectralData d = spectral_data(golden(), gm, 1.0);
        CHECK(std::abs(d.lambda - 1.0) < 1e-12);
        for (Eigen::Index i = 0; i < d.rho.size(); ++i) CHECK(d.rho[i].real() > 0.0);
        CHECK(std::abs(shift_pressure(golden(), gm, 1.0)) < 1e-9);
        CHECK_THROWS_AS(spectral_data(S2, c, 0.5), Error);
    }

    TEST_CASE("pressure_derivs_shift examples") {
        const ShiftPressureDerivatives c = pressure_derivs_shift(SymbolicSystem::full(2), constant_potential(2, -kLog2));
        CHECK(c.p1 == Approx(-kLog2).epsilon(1e-9));
        CHECK(std::abs(c.p2) < 1e-7);
        CHECK(c.integral == Approx(-kLog2).epsilon(1e-12));
        const ShiftPressureDerivatives b = pressure_derivs_shift(SymbolicSystem::full(3), bern3());
        CHECK(b.p1 == Approx(-bern3_entropy()).epsilon(1e-8));
        CHECK(b.integral == Approx(-bern3_entropy()).epsilon(1e-12));
        CHECK(b.p2 == Approx(b.green_kubo).epsilon(1e-5));
    }

    TEST_CASE("poincare_eta examples") {
        const SymbolicSystem S2 = SymbolicSystem::full(2);
        const PotentialSpec c = constant_potential(2, -kLog2);
        const EtaResult e = poincare_eta(S2, c, {}, 2.0, {1});
        CHECK(std::abs(e.series - 2.0) < 1e-10);
        CHECK(std::abs(e.resolvent - 2.0) < 1e-10);
        // (s - 1) eta(s) -> 1 / log 2 as s decreases to 1
        double prev_err = INFINITY;
        for (double s : {1.1, 1.01, 1.001}) {
            const double v = (s - 1.0) * poincare_eta(S2, c, {}, s, {1}).resolvent.real();
            const double err = std::abs(v - 1.0 / kLog2);
            CHECK(err < prev_err);
            prev_err = err;
        }
        CHECK(prev_err < 1e-3);
        const EtaResult b = poincare_eta(SymbolicSystem::full(3), bern3(), {}, 1.5, {2, 1});
        CHECK(std::abs(b.series - b.resolvent) < 1e-9);
        CHECK(b.series_converged);
        try {
            poincare_eta(S2, c, {}, 0.9, {1});
            FAIL("expected DivergentSeries");
        } catch (const Error& err) {
            CHECK(err.kind() == ErrorKind::DivergentSeries);
        }
    }

    TEST_CASE("count_words examples") {
        const SymbolicSystem S2 = SymbolicSystem::full(2);
        const PotentialSpec c = constant_potential(2, -kLog2);
        const LocallyConstantPrefix sys1(S2, c, {1});
        CHECK(count_words(sys1, 5.0, {}).count(5.0, Boundary::Closed) == 255);
        CHECK(count_words(sys1, -1.0, {}).total() == 0);
        // with the seed starting at letter 2 only nonempty words land in [1]
        const LocallyConstantPrefix sys2(S2, c, {2});
        CHECK(count_words(sys2, 5.0, {{1}}).count(5.0, Boundary::Closed) == 127);
        CHECK(count_words(sys1, 5.0, {{1}}).count(5.0, Boundary::Closed) == 128);
        CHECK_THROWS_AS(count_words(sys1, 30.0, {}, 1, 1000), Error);
    }

    TEST_CASE("count_words is independent of the thread count") {
        std::mt19937_64 rng(3);
        const PotentialSpec psi = random_depth2(rng);
        const SymbolicSystem S = SymbolicSystem::full(3);
        const LocallyConstantPrefix sys(S, psi, {1, 2, 3});
        const CountingLedger a = count_words(sys, 9.0, {{2}, {3, 1}}, 1);
        const CountingLedger b = count_words(sys, 9.0, {{2}, {3, 1}}, 4);
        CHECK(a.events() == b.events());
        CHECK(a.total() > 100);
    }

    TEST_CASE("d_genericity examples") {
        const LatticeVerdict c = d_genericity(SymbolicSystem::full(2), constant_potential(2, -kLog2), 8);
        CHECK(c.lattice);
        CHECK(c.generator == Approx(kLog2).epsilon(1e-9));
        CHECK_FALSE(d_genericity(SymbolicSystem::full(3), bern3(), 8).lattice);
        const LatticeVerdict g = d_genericity(golden(), constant_potential(2, -kLog2), 8);
        CHECK(g.lattice);
        CHECK(g.generator == Approx(kLog2).epsilon(1e-9));
        CHECK(detect_lattice({0.5, 1.5, 2.0}).generator == Approx(0.5));
        CHECK_FALSE(detect_lattice({1.0, std::sqrt(2.0)}).lattice);
    }

    TEST_CASE("holder_modulus_in_s examples") {
        const HolderFit c = holder_modulus_in_s(SymbolicSystem::full(2), constant_potential(2, -kLog2), 0.0, 1.0, 0.5);
        CHECK(c.exponent >= 0.99);
        const int M = 64;
        PotentialSpec gl = gauss_like_potential(M);
        gl.alpha = 0.5;
        const HolderFit g0 = holder_modulus_in_s(SymbolicSystem::full(M), gl, 0.0, 1.0, 0.5);
        CHECK(g0.exponent >= 0.45);
        const HolderFit g1 = holder_modulus_in_s(SymbolicSystem::full(M), gl, 1.0, 1.0, 0.5);
        CHECK(std::isfinite(g1.constant));
        CHECK(g1.constant > 0.0);
    }

    TEST_CASE("property: RPF bundle for random depth-2 potentials") {
        std::mt19937_64 rng(11);
        const SymbolicSystem S = SymbolicSystem::full(3);
        const StateSpace states(S, 2);
        for (int trial = 0; trial < 5; ++trial) {
            const PotentialSpec psi = random_depth2(rng);
            const ShiftSpectralData d = spectral_data(S, psi, 1.0);
            const Matrix K = cylinder_operator(S, psi, 1.0, 0.0).entries;
            CHECK(std::abs(d.lambda.imag()) < 1e-12);
            CHECK(d.lambda.real() > 0.0);
            CHECK(std::abs((d.nu.transpose() * d.rho)(0) - 1.0) < 1e-12);
            for (Eigen::Index i = 0; i < d.rho.size(); ++i) CHECK(d.rho[i].real() > 0.0);
            // mu([w]) = sum_a mu([a w]) for depth-2 words w
            for (std::size_t i = 0; i < states.size(); ++i) {
                const auto& w = states.word(i);
                const cplx mu_w = d.rho[Eigen::Index(i)] * d.nu[Eigen::Index(i)];
                cplx sum = 0.0;
                for (int a = 0; a < 3; ++a) {
                    const std::size_t j = *states.index(states.code_of({a, w[0]}));
                    sum += d.rho[Eigen::Index(j)] * std::exp(psi.value(states.code(j))) / d.lambda *
                           d.nu[Eigen::Index(i)];
                }
                CHECK(std::abs(sum - mu_w) < 1e-9);
            }
            // integral of L g against m equals lambda times the integral of g
            std::normal_distribution<double> nd;
            Vector g(9);
            for (int k = 0; k < 9; ++k) g[k] = nd(rng);
            CHECK(std::abs((d.nu.transpose() * K * g)(0) - d.lambda * (d.nu.transpose() * g)(0)) < 1e-12);
        }
    }

    TEST_CASE("property: lambda_s is decreasing and log-convex") {
        std::mt19937_64 rng(12);
        const SymbolicSystem S = SymbolicSystem::full(3);
        const PotentialSpec psi = random_depth2(rng);
        std::vector<double> P;
        for (int i = 0; i <= 20; ++i) P.push_back(shift_pressure(S, psi, 1.0 + 0.1 * i));
        for (int i = 1; i <= 20; ++i) CHECK(P[i] < P[i - 1]);
        for (int i = 1; i < 20; ++i) CHECK(P[i - 1] - 2 * P[i] + P[i + 1] >= -1e-12);
    }

    TEST_CASE("property: Stieltjes sum of the ledger matches eta") {
        // the ledger tail beyond T contributes about e^{-(s-1)T}
        const SymbolicSystem S = SymbolicSystem::full(3);
        const PotentialSpec psi = bern3();
        const LocallyConstantPrefix sys(S, psi, {1});
        const CountingLedger L = count_words(sys, 12.0, {});
        for (cplx s : {cplx(3.0, 0.0), cplx(3.0, 2.0)}) {
            const EtaResult e = poincare_eta(S, psi, {}, s, {1});
            CHECK(std::abs(L.stieltjes(s) - e.resolvent) < 1e-8);
        }
    }

    TEST_CASE("property: truncation stability of the Gauss-like system") {
        const PotentialSpec small = gauss_like_potential(50);
        const PotentialSpec large = gauss_like_potential(100);
        const double l50 = std::exp(shift_pressure(SymbolicSystem::full(50), small, 1.0));
        const double l100 = std::exp(shift_pressure(SymbolicSystem::full(100), large, 1.0));
        CHECK(l100 > l50);
        CHECK(l100 - l50 < small.tail_mass);
    }

    TEST_CASE("property: peripheral dichotomy") {
        // weights x and x^2 with x + x^2 = 1: calibrated, lattice, not constant
        const double x = 2.0 / (1.0 + std::sqrt(5.0));
        const SymbolicSystem S2 = SymbolicSystem::full(2);
        const PotentialSpec lat = bernoulli_potential({x, x * x});
        const LatticeVerdict v = d_genericity(S2, lat, 8);
        REQUIRE(v.lattice);
        CHECK(v.generator == Approx(std::log((1 + std::sqrt(5.0)) / 2)).epsilon(1e-9));
        CHECK(has_peripheral_eigenvalue(S2, lat, cplx(1.0, kTwoPi / v.generator)));
        CHECK_FALSE(has_peripheral_eigenvalue(S2, lat, cplx(1.0, 0.5 * kTwoPi / v.generator)));
        CHECK(has_peripheral_eigenvalue(S2, constant_potential(2, -kLog2), cplx(1.0, kTwoPi / kLog2)));
        CHECK(d_genericity(S2, constant_potential(2, -kLog2), 8).lattice);
        CHECK_FALSE(d_genericity(SymbolicSystem::full(3), bern3(), 8).lattice);
        CHECK_FALSE(has_peripheral_eigenvalue(SymbolicSystem::full(3), bern3(), cplx(1.0, 2.0)));
        CHECK_FALSE(has_peripheral_eigenvalue(SymbolicSystem::full(3), bern3(), cplx(1.0, 9.06)));
    }
}
