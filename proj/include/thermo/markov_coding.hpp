#pragma once

#include <string>
#include <vector>

#include "thermo/blaschke.hpp"

namespace thermo {

// Letters are 1-based, matching the usual arc numbering I_1 .. I_d.
using Word = std::vector<int>;

std::string format_word(const Word& w);
Word parse_word(const std::string& text);

// Classical Markov partition: the preimages of a boundary fixed point p cut
// the circle into d arcs, each mapped bijectively onto the circle minus p.
class MarkovPartition {
public:
    MarkovPartition(BlaschkeMap map, CirclePoint base_point);

    const BlaschkeMap& map() const { return map_; }
    CirclePoint base_point() const { return base_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    int size() const { return static_cast<int>(arcs_.size()); }
    // Arc start angles unwrapped to [p, p + 2pi], with the closing endpoint.
    const std::vector<double>& unwrapped_endpoints() const { return ends_; }

    // 1-based index of the arc containing x (half-open convention).
    int arc_index(CirclePoint x) const;
    // Distance from x to the nearest arc endpoint.
    double endpoint_distance(CirclePoint x) const;
    // Inverse branch of F on arc `letter`, applied to an angle.
    double inverse_branch(int letter, double angle) const;

private:
    BlaschkeMap map_;
    CirclePoint base_;
    std::vector<Arc> arcs_;
    std::vector<double> ends_;
    double base_lift_ = 0.0;
};

MarkovPartition build_partition(const BlaschkeMap& F, CirclePoint p);

Word encode(const MarkovPartition& P, CirclePoint x, int depth);

Arc cylinder_arc(const MarkovPartition& P, const Word& w);

}  // namespace thermo
