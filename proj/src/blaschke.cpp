#include "thermo/blaschke.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "thermo/errors.hpp"
#include "thermo/parallel.hpp"

namespace thermo {

namespace {

constexpr double kZeroBound = 1.0 - 1e-12;


}  // namespace

BlaschkeMap::BlaschkeMap(std::vector<cplx> zeros, double rotation)
    : zeros_(std::move(zeros)), rotation_(reduce_angle(rotation)) {
    if (zeros_.empty()) fail(ErrorKind::InvalidArgument, "a Blaschke product needs at least one zero");
    if (zeros_[0] != cplx(0.0, 0.0)) {
        fail(ErrorKind::InvalidArgument, "the first zero must be 0 so that F(0) = 0");
    }
    monomial_ = true;
    for (const cplx& a : zeros_) {
        if (!(std::abs(a) < kZeroBound)) {
            fail(ErrorKind::InvalidArgument, "zeros must satisfy |a| < 1 - 1e-12");
        }
        if (a != cplx(0.0, 0.0)) monomial_ = false;
    }
}

BlaschkeMap BlaschkeMap::monomial(int d, double rotation) {
    if (d < 1) fail(ErrorKind::InvalidArgument, "degree must be positive");
    return BlaschkeMap(std::vector<cplx>(static_cast<std::size_t>(d), cplx(0.0, 0.0)), rotation);
}

BlaschkeMap BlaschkeMap::one_zero(cplx a) { return BlaschkeMap({cplx(0.0, 0.0), a}, 0.0); }

cplx BlaschkeMap::eval(cplx z) const { return eval_and_deriv(z).value; }

ValueAndDerivative BlaschkeMap::eval_and_deriv(cplx z) const {
    const std::size_t d = zeros_.size();
    std::vector<cplx> b(d), db(d);
    for (std::size_t i = 0; i < d; ++i) {
        const cplx a = zeros_[i];
        if (a != cplx(0.0, 0.0) && std::abs(z - 1.0 / std::conj(a)) < 1e-12) {
            fail(ErrorKind::PoleProximity, "evaluation point is within 1e-12 of a pole");
        }
        const cplx den = 1.0 - std::conj(a) * z;
        b[i] = (z - a) / den;
        db[i] = (1.0 - std::norm(a)) / (den * den);
    }
    // Prefix and suffix products give the product rule without dividing by
    // factors that may vanish at a zero of F.
    std::vector<cplx> prefix(d + 1, 1.0), suffix(d + 1, 1.0);
    for (std::size_t i = 0; i < d; ++i) prefix[i + 1] = prefix[i] * b[i];
    for (std::size_t i = d; i-- > 0;) suffix[i] = suffix[i + 1] * b[i];
    cplx deriv = 0.0;
    for (std::size_t i = 0; i < d; ++i) deriv += db[i] * prefix[i] * suffix[i + 1];
    const cplx rot = std::polar(1.0, rotation_);
    return {rot * prefix[d], rot * deriv};
}

double BlaschkeMap::lift(double theta) const {
    double v = rotation_ + degree() * theta;
    if (monomial_) return v;
    const cplx e = std::polar(1.0, -theta);
    for (const cplx& a : zeros_) {
        if (a != cplx(0.0, 0.0)) v += 2.0 * std::arg(1.0 - a * e);
    }
    return v;
}

double BlaschkeMap::boundary_derivative(double theta) const {
    if (monomial_) return degree();
    const cplx z = std::polar(1.0, theta);
    double s = 0.0;
    for (const cplx& a : zeros_) s += (1.0 - std::norm(a)) / std::norm(z - a);
    return s;
}

void BlaschkeMap::lift_and_derivative(double theta, double& value, double& deriv) const {
    value = rotation_ + degree() * theta;
    if (monomial_) {
        deriv = degree();
        return;
    }
    const cplx e = std::polar(1.0, -theta);
    double s = 0.0;
    for (const cplx& a : zeros_) {
        if (a == cplx(0.0, 0.0)) {
            s += 1.0;
            continue;
        }
        const cplx q = 1.0 - a * e;
        value += 2.0 * std::arg(q);
        // |e^{i theta} - a| = |1 - a e^{-i theta}|
        s += (1.0 - std::norm(a)) / std::norm(q);
    }
    deriv = s;
}

cplx BlaschkeMap::derivative_at_zero() const {
    cplx v = std::polar(1.0, rotation_);
    for (std::size_t i = 1; i < zeros_.size(); ++i) v *= -zeros_[i];
    return v;
}

double BlaschkeMap::min_boundary_derivative(int grid) const {
    double m = boundary_derivative(0.0);
    for (int j = 1; j < grid; ++j) m = std::min(m, boundary_derivative(kTwoPi * j / grid));
    return m;
}

std::string BlaschkeMap::describe() const {
    std::ostringstream out;
    out.precision(17);
    if (monomial_) {
        out << "z^" << degree();
    } else {
        out << "blaschke[";
        for (std::size_t i = 0; i < zeros_.size(); ++i) {
            if (i) out << ",";
            out << "(" << zeros_[i].real() << "," << zeros_[i].imag() << ")";
        }
        out << "]";
    }
    if (rotation_ != 0.0) out << "*rot(" << rotation_ << ")";
    return out.str();
}

double invert_lift(const BlaschkeMap& F, double target, double lo, double hi) {
    double flo = F.lift(lo) - target;
    double fhi = F.lift(hi) - target;
    const double slack = 1e-12 * std::max(1.0, std::abs(target));
    if (flo > slack || fhi < -slack || hi < lo) {
        fail(ErrorKind::LiftNonMonotone, "argument lift does not bracket the target");
    }
    if (flo >= 0.0) return lo;
    if (fhi <= 0.0) return hi;
    double x = lo + (hi - lo) * (-flo) / (fhi - flo);
    for (int it = 0; it < 200; ++it) {
        double v, dv;
        F.lift_and_derivative(x, v, dv);
        const double f = v - target;
        if (f == 0.0) return x;
        if (f < 0.0) lo = x;
        else hi = x;
        if (!(dv > 0.0)) fail(ErrorKind::LiftNonMonotone, "argument lift has non-positive slope");
        double nx = x - f / dv;
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (std::abs(nx - x) <= 4e-16 * std::max(1.0, std::abs(x)) ||
            hi - lo <= 4e-16 * std::max(1.0, std::abs(x))) {
            return nx;
        }
        x = nx;
    }
    return x;
}

std::vector<double> boundary_preimages(const BlaschkeMap& F, CirclePoint target) {
    const int d = F.degree();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(d));
    if (F.is_monomial()) {
        const double base = reduce_angle(target.angle() - F.rotation()) / d;
        for (int k = 0; k < d; ++k) out.push_back(base + kTwoPi * k / d);
        return out;
    }
    const double phi0 = F.lift(0.0);
    const double t = target.angle();
    double m = std::ceil((phi0 - t) / kTwoPi);
    double lo = 0.0;
    for (int j = 0; j < d; ++j) {
        const double tj = t + kTwoPi * (m + j);
        const double y = invert_lift(F, tj, lo, kTwoPi);
        out.push_back(reduce_angle(y));
        lo = y;
    }
    std::sort(out.begin(), out.end());
    return out;
}

double ClarkMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.mass;
    return s;
}

cplx ClarkMeasure::fourier(int n) const {
    cplx s = 0.0;
    for (const auto& a : atoms) s += a.mass * std::polar(1.0, n * a.location.angle());
    return s;
}

ClarkMeasure clark_measure(const BlaschkeMap& F, CirclePoint alpha) {
    ClarkMeasure m;
    m.alpha = alpha;
    for (double y : boundary_preimages(F, alpha)) {
        m.atoms.push_back({CirclePoint(y), 1.0 / F.boundary_derivative(y)});
    }
    return m;
}

double lyapunov_exponent(const BlaschkeMap& F, int quad_points) {
    if (quad_points < 64 || (quad_points & (quad_points - 1)) != 0) {
        fail(ErrorKind::InvalidArgument, "quad_points must be a power of two >= 64");
    }
    std::vector<double> v(static_cast<std::size_t>(quad_points));
    for (int j = 0; j < quad_points; ++j) {
        v[j] = std::log(F.boundary_derivative(kTwoPi * j / quad_points));
    }
    return pairwise_sum(v.data(), v.size()) / quad_points;
}

namespace {

// Coefficients (ascending powers) of prod (z - r_i) scaled by lead.
std::vector<cplx> poly_from_roots(const std::vector<cplx>& roots, cplx lead) {
    std::vector<cplx> c{lead};
    for (const cplx& r : roots) {
        std::vector<cplx> next(c.size() + 1, 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k + 1] += c[k];
            next[k] -= r * c[k];
        }
        c = std::move(next);
    }
    return c;
}

void horner(const std::vector<cplx>& c, cplx z, cplx& p, cplx& dp) {
    p = 0.0;
    dp = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) {
        dp = dp * z + p;
        p = p * z + c[k];
    }
}

// Aberth-Ehrlich simultaneous iteration.
std::vector<cplx> aberth(const std::vector<cplx>& c) {
    const std::size_t n = c.size() - 1;
    std::vector<cplx> z(n);
    for (std::size_t k = 0; k < n; ++k) {
        z[k] = std::polar(0.5, kTwoPi * static_cast<double>(k) / static_cast<double>(n) + 0.4);
    }
    for (int it = 0; it < 1000; ++it) {
        double biggest = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            cplx p, dp;
            horner(c, z[k], p, dp);
            if (p == cplx(0.0, 0.0)) continue;
            const cplx ratio = p / dp;
            cplx s = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != k) s += 1.0 / (z[k] - z[j]);
            }
            const cplx corr = ratio / (1.0 - ratio * s);
            if (!std::isfinite(corr.real()) || !std::isfinite(corr.imag())) continue;
            z[k] -= corr;
            biggest = std::max(biggest, std::abs(corr) / std::max(1.0, std::abs(z[k])));
        }
        if (biggest < 1e-16) break;
    }
    return z;
}

}  // namespace

std::vector<cplx> disk_preimages(const BlaschkeMap& F, cplx w) {
    if (!(std::abs(w) < 1.0)) fail(ErrorKind::InvalidArgument, "target must lie in the open disk");
    const auto& zeros = F.zeros();
    // Numerator of F(z) - w: e^{i rot} prod (z - a_i) - w prod (1 - conj(a_i) z)
    std::vector<cplx> num = poly_from_roots(zeros, std::polar(1.0, F.rotation()));
    std::vector<cplx> den{1.0};
    for (const cplx& a : zeros) {
        std::vector<cplx> next(den.size() + 1, 0.0);
        for (std::size_t k = 0; k < den.size(); ++k) {
            next[k] += den[k];
            next[k + 1] -= std::conj(a) * den[k];
        }
        den = std::move(next);
    }
    for (std::size_t k = 0; k < num.size(); ++k) num[k] -= w * den[k];
    std::vector<cplx> roots = aberth(num);
    for (const cplx& r : roots) {
        if (!(std::abs(r) < 1.0 + 1e-9)) {
            fail(ErrorKind::RootEscape, "a computed preimage left the unit disk");
        }
    }
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return roots;
}

double nevanlinna(const BlaschkeMap& F, cplx w) {
    if (!(std::abs(w) > 0.0)) fail(ErrorKind::InvalidArgument, "nevanlinna requires w != 0");
    double s = 0.0;
    for (const cplx& r : disk_preimages(F, w)) {
        const double m = std::abs(r);
        if (m < 1e-14) fail(ErrorKind::LogSingularity, "a preimage coincides with the origin");
        s -= std::log(m);
    }
    return s;
}

cplx koenigs(const BlaschkeMap& F, cplx z, int depth) {
    const cplx lambda = F.derivative_at_zero();
    if (std::abs(lambda) < 1e-12) fail(ErrorKind::ZeroMultiplier, "F'(0) vanishes");
    if (depth < 1) fail(ErrorKind::InvalidArgument, "depth must be at least 1");
    if (!(std::abs(z) < 1.0)) fail(ErrorKind::InvalidArgument, "koenigs requires |z| < 1");
    for (int n = 0; n < depth; ++n) z = F.eval(z);
    return z / std::pow(lambda, depth);
}

std::vector<PeriodicPoint> periodic_points(const BlaschkeMap& F, int n) {
    if (n < 1 || n > 12) fail(ErrorKind::InvalidArgument, "period must lie in [1, 12]");
    const int d = F.degree();
    const double count_d = std::pow(static_cast<double>(d), n) - 1.0;
    if (count_d > 1e7) fail(ErrorKind::BudgetExceeded, "too many periodic points requested");
    std::vector<PeriodicPoint> out;
    const long count = static_cast<long>(count_d);
    if (count <= 0) return out;
    const double dn = count_d + 1.0;
    if (F.is_monomial() && F.rotation() == 0.0) {
        for (long k = 0; k < count; ++k) {
            out.push_back({CirclePoint(kTwoPi * static_cast<double>(k) / count_d), dn});
        }
        return out;
    }
    auto g = [&](double theta, double& value, double& deriv) {
        double x = theta, prod = 1.0;
        for (int i = 0; i < n; ++i) {
            double v, dv;
            F.lift_and_derivative(x, v, dv);
            x = v;
            prod *= dv;
        }
        value = x - theta;
        deriv = prod - 1.0;
    };
    double g0, dg0;
    g(0.0, g0, dg0);
    const double m = std::ceil(g0 / kTwoPi);
    double lo = 0.0;
    for (long k = 0; k < count; ++k) {
        const double target = kTwoPi * (m + static_cast<double>(k));
        double a = lo, b = kTwoPi;
        double x = a;
        for (int it = 0; it < 400; ++it) {
            double v, dv;
            g(x, v, dv);
            const double f = v - target;
            if (f == 0.0) break;
            if (f < 0.0) a = x;
            else b = x;
            double nx = dv > 0.0 ? x - f / dv : 0.5 * (a + b);
            if (!(nx > a && nx < b)) nx = 0.5 * (a + b);
            if (std::abs(nx - x) <= 4e-16 * std::max(1.0, x) || b - a <= 4e-16) {
                x = nx;
                break;
            }
            x = nx;
        }
        lo = x;
        double mult = 1.0, y = x;
        for (int i = 0; i < n; ++i) {
            mult *= F.boundary_derivative(y);
            y = F.boundary_map(y);
        }
        out.push_back({CirclePoint(x), mult});
    }
    std::sort(out.begin(), out.end(),
              [](const PeriodicPoint& a, const PeriodicPoint& b) { return a.point.angle() < b.point.angle(); });
    return out;
}

}  // namespace thermo
