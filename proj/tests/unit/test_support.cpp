#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "thermo/circle.hpp"
#include "thermo/errors.hpp"
#include "thermo/observable.hpp"
#include "thermo/parallel.hpp"

using namespace thermo;

TEST_SUITE("support") {
    TEST_CASE("angles reduce into [0, 2pi)") {
        CHECK(reduce_angle(-kPi / 2) == doctest::Approx(3 * kPi / 2));
        CHECK(reduce_angle(5 * kPi) == doctest::Approx(kPi));
        CHECK(reduce_angle(kTwoPi) == 0.0);
        CHECK(circular_distance(CirclePoint(0.1), CirclePoint(kTwoPi - 0.1)) == doctest::Approx(0.2));
    }

    TEST_CASE("arcs are half-open and measured in units of 2pi") {
        const Arc a = Arc::from_endpoints(0.0, kPi);
        CHECK(a.measure() == doctest::Approx(0.5));
        CHECK(a.contains(CirclePoint(0.0)));
        CHECK_FALSE(a.contains(CirclePoint(kPi)));
        const Arc wrap = Arc::from_endpoints(3 * kPi / 2, kPi / 2);
        CHECK(wrap.contains(CirclePoint(0.0)));
        CHECK_FALSE(wrap.contains(CirclePoint(kPi)));
        CHECK(wrap.length() == doctest::Approx(kPi));
        CHECK(Arc::full_circle().contains(CirclePoint(6.2)));
        const ArcSet s({Arc::from_endpoints(0.0, 1.0), Arc::from_endpoints(2.0, 3.0)});
        CHECK(s.measure() == doctest::Approx(2.0 / kTwoPi));
        CHECK(s.contains(CirclePoint(2.5)));
        CHECK_FALSE(s.contains(CirclePoint(1.5)));
    }

    TEST_CASE("observable grammar") {
        CHECK(TrigPolynomial::parse("cos")(0.0) == doctest::Approx(1.0));
        CHECK(TrigPolynomial::parse("0.1*cos")(kPi) == doctest::Approx(-0.1));
        const TrigPolynomial h = TrigPolynomial::parse("cos(2)-cos");
        CHECK(h(0.3) == doctest::Approx(std::cos(0.6) - std::cos(0.3)));
        CHECK(h.degree() == 2);
        CHECK(TrigPolynomial::parse("1").is_constant());
        CHECK(TrigPolynomial::parse("2*sin(3)+0.5")(0.2) == doctest::Approx(2 * std::sin(0.6) + 0.5));
        CHECK(TrigPolynomial::parse("cos").fourier_coefficient(1) == cplx(0.5, 0.0));
        CHECK(TrigPolynomial::parse("sin").fourier_coefficient(-1) == cplx(0.0, 0.5));
        CHECK_THROWS_AS(TrigPolynomial::parse("tan"), Error);
        CHECK(grid_mean(TrigPolynomial::parse("cos+0.25")) == doctest::Approx(0.25));
    }

    TEST_CASE("parallel_for output does not depend on thread count") {
        for (unsigned threads : {1u, 3u, 8u}) {
            std::vector<double> out(1000);
            parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = std::sin(static_cast<double>(i)); });
            CHECK(pairwise_sum(out.data(), out.size()) ==
                  pairwise_sum(std::vector<double>(out).data(), out.size()));
            CHECK(out[999] == std::sin(999.0));
        }
        CHECK(resolve_threads(3) == 3u);
        CHECK(resolve_threads(0) >= 1u);
    }

    TEST_CASE("worker exceptions propagate") {
        CHECK_THROWS_AS(parallel_for(10, 4, [](std::size_t i) {
                            if (i == 7) fail(ErrorKind::BudgetExceeded, "boom");
                        }),
                        Error);
    }

    TEST_CASE("budget and convergence errors are classified") {
        CHECK(is_budget_or_convergence(ErrorKind::BudgetExceeded));
        CHECK(is_budget_or_convergence(ErrorKind::NoConvergence));
        CHECK_FALSE(is_budget_or_convergence(ErrorKind::InvalidConfig));
        CHECK_FALSE(is_budget_or_convergence(ErrorKind::PoleProximity));
    }
}
