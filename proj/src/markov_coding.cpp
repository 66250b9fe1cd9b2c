#include "thermo/markov_coding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "thermo/errors.hpp"

namespace thermo {

std::string format_word(const Word& w) {
    std::ostringstream out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out << ",";
        out << w[i];
    }
    return out.str();
}

Word parse_word(const std::string& text) {
    Word w;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            int v = std::stoi(item, &used);
            if (used != item.size() || v < 1) throw std::invalid_argument(item);
            w.push_back(v);
        } catch (const std::exception&) {
            fail(ErrorKind::InvalidArgument, "malformed word '" + text + "'");
        }
    }
    if (w.empty()) fail(ErrorKind::InvalidArgument, "empty word");
    return w;
}

MarkovPartition::MarkovPartition(BlaschkeMap map, CirclePoint base_point)
    : map_(std::move(map)), base_(base_point) {
    const int d = map_.degree();
    if (d < 2) fail(ErrorKind::InvalidArgument, "a Markov partition needs degree >= 2");
    const double residual = std::abs(map_.eval(base_.point()) - base_.point());
    if (residual > 1e-10) fail(ErrorKind::NotFixed, "base point is not a fixed point of F");
    const double p = base_.angle();
    std::vector<double> pre = boundary_preimages(map_, base_);
    // Unwrap relative to p; p itself is among the preimages and must come first.
    std::vector<double> offsets;
    for (double y : pre) {
        double off = reduce_angle(y - p);
        if (off > kTwoPi - 1e-9) off = 0.0;
        offsets.push_back(off);
    }
    std::sort(offsets.begin(), offsets.end());
    offsets[0] = 0.0;
    for (double off : offsets) ends_.push_back(p + off);
    ends_.push_back(p + kTwoPi);
    for (int i = 0; i < d; ++i) arcs_.emplace_back(CirclePoint(ends_[i]), ends_[i + 1] - ends_[i]);
    base_lift_ = map_.lift(p);
}

int MarkovPartition::arc_index(CirclePoint x) const {
    const double off = reduce_angle(x.angle() - base_.angle());
    for (int i = size() - 1; i >= 0; --i) {
        if (off >= ends_[i] - ends_[0]) return i + 1;
    }
    return 1;
}

double MarkovPartition::endpoint_distance(CirclePoint x) const {
    double best = kTwoPi;
    for (int i = 0; i < size(); ++i) best = std::min(best, circular_distance(x, CirclePoint(ends_[i])));
    return best;
}

double MarkovPartition::inverse_branch(int letter, double angle) const {
    if (letter < 1 || letter > size()) fail(ErrorKind::InvalidArgument, "letter out of range");
    // On [e_i, e_{i+1}] the lift runs from base_lift + 2pi(i) to base_lift + 2pi(i+1).
    const double lo = ends_[letter - 1], hi = ends_[letter];
    const double flo = map_.lift(lo);
    const double off = reduce_angle(angle - base_.angle());
    return invert_lift(map_, flo + off, lo, hi);
}

MarkovPartition build_partition(const BlaschkeMap& F, CirclePoint p) { return MarkovPartition(F, p); }

Word encode(const MarkovPartition& P, CirclePoint x, int depth) {
    if (depth < 1) fail(ErrorKind::InvalidArgument, "depth must be at least 1");
    Word w;
    w.reserve(static_cast<std::size_t>(depth));
    double theta = x.angle();
    for (int n = 0; n < depth; ++n) {
        const CirclePoint y(theta);
        if (P.endpoint_distance(y) < 1e-12) {
            fail(ErrorKind::ExceptionalPoint, "orbit meets a partition endpoint");
        }
        w.push_back(P.arc_index(y));
        theta = P.map().boundary_map(theta);
    }
    return w;
}

Arc cylinder_arc(const MarkovPartition& P, const Word& w) {
    if (w.empty()) fail(ErrorKind::InvalidArgument, "cylinder word must be nonempty");
    for (int a : w) {
        if (a < 1 || a > P.size()) fail(ErrorKind::InvalidArgument, "letter out of range");
    }
    const auto& ends = P.unwrapped_endpoints();
    // Work with unwrapped [lo, hi) inside the last arc and pull back.
    double lo = ends[w.back() - 1];
    double hi = ends[w.back()];
    for (std::size_t i = w.size() - 1; i-- > 0;) {
        const int letter = w[i];
        const double a = ends[letter - 1], b = ends[letter];
        const double base = P.map().lift(a);
        const double p = P.base_point().angle();
        // Offsets of the target arc measured from p, in [0, 2pi].
        const double off_lo = lo - p;
        const double off_hi = hi - p;
        const double nlo = invert_lift(P.map(), base + off_lo, a, b);
        const double nhi = invert_lift(P.map(), base + off_hi, a, b);
        lo = nlo;
        hi = nhi;
    }
    return Arc(CirclePoint(lo), hi - lo);
}

}  // namespace thermo
