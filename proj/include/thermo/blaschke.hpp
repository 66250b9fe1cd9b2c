#pragma once

#include <string>
#include <vector>

#include "thermo/circle.hpp"

namespace thermo {

struct ValueAndDerivative {
    cplx value;
    cplx derivative;
};

// Finite Blaschke product F(z) = e^{i rot} prod (z - a_i)/(1 - conj(a_i) z)
// with a_0 = 0, so that F(0) = 0 and Lebesgue measure is invariant.
class BlaschkeMap {
public:
    BlaschkeMap(std::vector<cplx> zeros, double rotation = 0.0);

    static BlaschkeMap monomial(int d, double rotation = 0.0);
    // z (z - a) / (1 - conj(a) z)
    static BlaschkeMap one_zero(cplx a);

    int degree() const { return static_cast<int>(zeros_.size()); }
    const std::vector<cplx>& zeros() const { return zeros_; }
    double rotation() const { return rotation_; }
    bool is_monomial() const { return monomial_; }
    bool is_rotation() const { return degree() == 1; }

    cplx eval(cplx z) const;
    ValueAndDerivative eval_and_deriv(cplx z) const;

    // Continuous lift of theta -> arg F(e^{i theta}); valid on all of R with
    // lift(theta + 2pi) = lift(theta) + 2 pi d.
    double lift(double theta) const;
    // |F'(e^{i theta})|, which equals the derivative of the lift.
    double boundary_derivative(double theta) const;
    // Angle of F(e^{i theta}) in [0, 2pi).
    double boundary_map(double theta) const { return reduce_angle(lift(theta)); }
    // Lift and its derivative in one pass.
    void lift_and_derivative(double theta, double& value, double& deriv) const;

    cplx derivative_at_zero() const;
    double min_boundary_derivative(int grid = 4096) const;

    std::string describe() const;

private:
    std::vector<cplx> zeros_;
    double rotation_;
    bool monomial_;
};

// Solves lift(theta) = target for theta in [lo, hi], assuming the lift is
// increasing there and brackets the target.
double invert_lift(const BlaschkeMap& F, double target, double lo, double hi);

// The d solutions of F(e^{iy}) = e^{i target}, ascending in [0, 2pi).
std::vector<double> boundary_preimages(const BlaschkeMap& F, CirclePoint target);

struct ClarkAtom {
    CirclePoint location;
    double mass;
};

struct ClarkMeasure {
    CirclePoint alpha;
    std::vector<ClarkAtom> atoms;

    double total_mass() const;
    // Integral of e^{i n theta} against the measure.
    cplx fourier(int n) const;
};

ClarkMeasure clark_measure(const BlaschkeMap& F, CirclePoint alpha);

// Trapezoid quadrature of log|F'| on the circle.
double lyapunov_exponent(const BlaschkeMap& F, int quad_points = 4096);

// Solutions of F(z) = w in the disk.
std::vector<cplx> disk_preimages(const BlaschkeMap& F, cplx w);

// Nevanlinna counting function sum log(1/|z|) over solutions of F(z) = w.
double nevanlinna(const BlaschkeMap& F, cplx w);

// F'(0)^{-depth} F^{depth}(z), the truncated Koenigs linearizer.
cplx koenigs(const BlaschkeMap& F, cplx z, int depth);

struct PeriodicPoint {
    CirclePoint point;
    double multiplier;
};

// Fixed points of the n-th iterate on the circle with |(F^n)'| at each.
std::vector<PeriodicPoint> periodic_points(const BlaschkeMap& F, int n);

}  // namespace thermo
