#include "thermo/circle.hpp"

#include <cmath>

#include "thermo/errors.hpp"

namespace thermo {

double reduce_angle(double theta) {
    double r = std::fmod(theta, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    // fmod of a tiny negative number can round up to exactly 2*pi
    if (r >= kTwoPi) r = 0.0;
    return r;
}

CirclePoint CirclePoint::from_complex(cplx z) { return CirclePoint(std::arg(z)); }

double circular_distance(CirclePoint a, CirclePoint b) {
    double d = std::abs(a.angle() - b.angle());
    return std::min(d, kTwoPi - d);
}

Arc::Arc(CirclePoint start, double length) : start_(start), length_(length) {
    if (!(length > 0.0) || length > kTwoPi * (1.0 + 1e-15)) {
        fail(ErrorKind::InvalidArgument, "arc length must lie in (0, 2pi]");
    }
    if (length_ > kTwoPi) length_ = kTwoPi;
}

Arc Arc::from_endpoints(double start_angle, double end_angle) {
    double len = reduce_angle(end_angle - start_angle);
    if (len == 0.0) len = kTwoPi;
    return Arc(CirclePoint(start_angle), len);
}

bool Arc::contains(CirclePoint x) const {
    if (length_ >= kTwoPi) return true;
    double offset = x.angle() - start_.angle();
    if (offset < 0.0) offset += kTwoPi;
    return offset < length_;
}

bool ArcSet::contains(CirclePoint x) const {
    for (const Arc& a : arcs_) {
        if (a.contains(x)) return true;
    }
    return false;
}

double ArcSet::measure() const {
    double m = 0.0;
    for (const Arc& a : arcs_) m += a.measure();
    return m;
}

}  // namespace thermo
