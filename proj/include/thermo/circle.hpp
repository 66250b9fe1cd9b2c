#pragma once

#include <complex>
#include <numbers>
#include <vector>

namespace thermo {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Reduces an angle to [0, 2*pi).
double reduce_angle(double theta);

// A point e^{i*angle} of the unit circle, stored by its canonical angle.
class CirclePoint {
public:
    CirclePoint() = default;
    explicit CirclePoint(double angle) : angle_(reduce_angle(angle)) {}

    static CirclePoint from_complex(cplx z);

    double angle() const { return angle_; }
    cplx point() const { return std::polar(1.0, angle_); }

    friend bool operator==(CirclePoint, CirclePoint) = default;

private:
    double angle_ = 0.0;
};

// Length of the shorter arc between two points.
double circular_distance(CirclePoint a, CirclePoint b);

// Half-open counterclockwise arc [start, start + length).
class Arc {
public:
    Arc(CirclePoint start, double length);

    static Arc from_endpoints(double start_angle, double end_angle);
    static Arc full_circle() { return Arc(CirclePoint(0.0), kTwoPi); }

    CirclePoint start() const { return start_; }
    CirclePoint end() const { return CirclePoint(start_.angle() + length_); }
    double length() const { return length_; }
    // Normalized Lebesgue measure m(arc) = length / 2pi.
    double measure() const { return length_ / kTwoPi; }

    bool contains(CirclePoint x) const;

private:
    CirclePoint start_;
    double length_;
};

// Finite union of arcs; the caller is responsible for disjointness when
// measure() is used.
class ArcSet {
public:
    ArcSet() = default;
    explicit ArcSet(std::vector<Arc> arcs) : arcs_(std::move(arcs)) {}

    static ArcSet full_circle() { return ArcSet({Arc::full_circle()}); }

    const std::vector<Arc>& arcs() const { return arcs_; }
    bool empty() const { return arcs_.empty(); }
    bool contains(CirclePoint x) const;
    double measure() const;

private:
    std::vector<Arc> arcs_;
};

}  // namespace thermo
