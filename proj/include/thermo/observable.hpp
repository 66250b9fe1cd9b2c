#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "thermo/circle.hpp"

namespace thermo {

// Real trigonometric polynomial
//   h(theta) = c + sum_j (a_j cos(k_j theta) + b_j sin(k_j theta)).
// All observables handled by the library are of this form, which keeps them
// inside the Sobolev multiplier class and makes quadrature exact.
class TrigPolynomial {
public:
    struct Term {
        int k = 1;
        double cos_coeff = 0.0;
        double sin_coeff = 0.0;
    };

    TrigPolynomial() = default;
    TrigPolynomial(double constant, std::vector<Term> terms);

    static TrigPolynomial constant(double c) { return TrigPolynomial(c, {}); }
    static TrigPolynomial cosine(int k = 1, double coeff = 1.0);
    static TrigPolynomial sine(int k = 1, double coeff = 1.0);

    // Grammar: sum of terms "[coef*]cos[(k)]", "[coef*]sin[(k)]" or a number,
    // joined by + or -.  Examples: "cos", "0.1*cos", "cos(2)-cos", "1".
    static TrigPolynomial parse(std::string_view text);

    double operator()(double theta) const;
    double constant_term() const { return constant_; }
    const std::vector<Term>& terms() const { return terms_; }
    int degree() const;
    bool is_constant() const;

    // Complex Fourier coefficient of e^{i k theta}.
    cplx fourier_coefficient(int k) const;

    TrigPolynomial scaled(double factor) const;
    TrigPolynomial centered() const;  // drops the constant term

    std::string describe() const;

private:
    double constant_ = 0.0;
    std::vector<Term> terms_;
};

// Mean of h over the uniform grid of the given size (trapezoid rule).
double grid_mean(const TrigPolynomial& h, int points = 4096);

}  // namespace thermo
