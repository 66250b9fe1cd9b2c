#include <cmath>
#include <random>

#include "doctest.h"
#include "thermo/errors.hpp"
#include "thermo/markov_coding.hpp"
#include "thermo/transfer_spectral.hpp"

using namespace thermo;
using doctest::Approx;

namespace {

BlaschkeMap fa(double a) { return BlaschkeMap::one_zero(cplx(a, 0.0)); }

}  // namespace

TEST_SUITE("markov_coding") {
    TEST_CASE("word serialization") {
        CHECK(format_word({1, 2, 1}) == "1,2,1");
        CHECK(parse_word("1,2,1") == Word{1, 2, 1});
        CHECK_THROWS_AS(parse_word(""), Error);
        CHECK_THROWS_AS(parse_word("1,x"), Error);
        CHECK_THROWS_AS(parse_word("0"), Error);
    }

    TEST_CASE("build_partition examples") {
        const MarkovPartition P2 = build_partition(BlaschkeMap::monomial(2), CirclePoint(0.0));
        REQUIRE(P2.size() == 2);
        CHECK(P2.arcs()[0].start().angle() == Approx(0.0));
        CHECK(P2.arcs()[0].length() == Approx(kPi));
        CHECK(P2.arcs()[1].start().angle() == Approx(kPi));
        const MarkovPartition P3 = build_partition(BlaschkeMap::monomial(3), CirclePoint(0.0));
        REQUIRE(P3.size() == 3);
        for (int i = 0; i < 3; ++i) {
            CHECK(P3.arcs()[i].start().angle() == Approx(kTwoPi * i / 3));
            CHECK(P3.arcs()[i].length() == Approx(kTwoPi / 3));
        }
        const MarkovPartition Pa = build_partition(fa(0.5), CirclePoint(0.0));
        REQUIRE(Pa.size() == 2);
        CHECK(Pa.arcs()[1].start().angle() == Approx(kPi).epsilon(1e-12));
    }

    TEST_CASE("a non-fixed base point is rejected") {
        try {
            build_partition(BlaschkeMap::monomial(2), CirclePoint(1.0));
            FAIL("expected NotFixed");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NotFixed);
        }
    }

    TEST_CASE("encode examples") {
        const MarkovPartition P2 = build_partition(BlaschkeMap::monomial(2), CirclePoint(0.0));
        CHECK(encode(P2, CirclePoint(2 * kPi / 3), 3) == Word{1, 2, 1});
        CHECK(encode(P2, CirclePoint(kPi / 4), 2) == Word{1, 1});
        // orbit pi -> 3pi = pi under z^3 stays in the middle arc
        const MarkovPartition P3 = build_partition(BlaschkeMap::monomial(3), CirclePoint(0.0));
        CHECK(encode(P3, CirclePoint(kPi), 2) == Word{2, 2});
        CHECK_THROWS_AS(encode(P2, CirclePoint(kPi), 2), Error);
    }

    TEST_CASE("cylinder_arc examples") {
        const MarkovPartition P2 = build_partition(BlaschkeMap::monomial(2), CirclePoint(0.0));
        const Arc a1 = cylinder_arc(P2, {1});
        CHECK(a1.start().angle() == Approx(0.0));
        CHECK(a1.measure() == Approx(0.5));
        const Arc a12 = cylinder_arc(P2, {1, 2});
        CHECK(a12.start().angle() == Approx(kPi / 2));
        CHECK(a12.measure() == Approx(0.25));
        // Lebesgue is the conformal measure here; the 3/4 of the Clark atom is
        // the mass of the point -1, not of the arc
        const MarkovPartition Pa = build_partition(fa(0.5), CirclePoint(0.0));
        const Arc a2 = cylinder_arc(Pa, {2});
        CHECK(a2.start().angle() == Approx(kPi).epsilon(1e-12));
        CHECK(a2.measure() == Approx(0.5).epsilon(1e-12));
        CHECK(clark_measure(fa(0.5), CirclePoint(0.0)).atoms[1].mass == Approx(0.75));
    }

    TEST_CASE("property: coding semiconjugates the map to the shift") {
        const BlaschkeMap F = fa(0.5);
        const MarkovPartition P = build_partition(F, CirclePoint(0.0));
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> t(0.0, kTwoPi);
        int checked = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            const CirclePoint x(t(rng));
            try {
                const Word w = encode(P, x, 13);
                const Word v = encode(P, CirclePoint(F.boundary_map(x.angle())), 12);
                CHECK(Word(w.begin() + 1, w.end()) == v);
                ++checked;
            } catch (const Error& e) {
                CHECK(e.kind() == ErrorKind::ExceptionalPoint);
            }
        }
        CHECK(checked > 990);
    }

    TEST_CASE("property: cylinders nest, shrink and tile the circle") {
        const BlaschkeMap F = fa(0.5);
        const MarkovPartition P = build_partition(F, CirclePoint(0.0));
        const double contraction = 1.0 / F.min_boundary_derivative();
        double total = 0.0;
        for (int code = 0; code < 32; ++code) {
            Word w;
            for (int i = 4; i >= 0; --i) w.push_back(((code >> i) & 1) + 1);
            const Arc arc = cylinder_arc(P, w);
            total += arc.length();
            const Arc parent = cylinder_arc(P, Word(w.begin(), w.end() - 1));
            CHECK(parent.contains(CirclePoint(arc.start().angle() + 0.5 * arc.length())));
            // [w] is the image of [tail of w] under one inverse branch
            const Arc tail = cylinder_arc(P, Word(w.begin() + 1, w.end()));
            CHECK(arc.length() <= tail.length() * contraction + 1e-12);
            // the midpoint codes back to w
            CHECK(encode(P, CirclePoint(arc.start().angle() + 0.5 * arc.length()), 5) == w);
        }
        CHECK(std::abs(total - kTwoPi) < 1e-9);
    }

    TEST_CASE("property: conformal cylinder mass matches the weighted arc sum") {
        // For s = 1 the conformal measure is Lebesgue, so m([w]) equals the arc
        // length, and it is comparable to 1/|(F^n)'| at any point of [w].
        const BlaschkeMap F = fa(0.5);
        const MarkovPartition P = build_partition(F, CirclePoint(0.0));
        const SpectralData S = leading_eigen(assemble_operator(F, 1.0, nullptr, 64));
        const auto weights = S.conformal_weights(4096);
        for (const Word& w : {Word{1, 2}, Word{2, 2, 1}, Word{1, 1, 1, 2}}) {
            const Arc arc = cylinder_arc(P, w);
            double mass = 0.0;
            for (int j = 0; j < 4096; ++j) {
                if (arc.contains(CirclePoint(kTwoPi * j / 4096))) mass += weights[j];
            }
            CHECK(mass == Approx(arc.measure()).epsilon(0.02));
            double t = arc.start().angle() + 0.5 * arc.length(), deriv = 1.0;
            for (std::size_t i = 0; i < w.size(); ++i) {
                deriv *= F.boundary_derivative(t);
                t = F.lift(t);
            }
            const double ratio = arc.measure() * deriv;
            CHECK(ratio > 0.2);
            CHECK(ratio < 5.0);
        }
    }
}
