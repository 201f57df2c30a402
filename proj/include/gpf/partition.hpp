#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "gpf/errors.hpp"

namespace gpf {

// Half-open interval [lo, hi) with 0 <= lo < hi <= +infinity.
struct Interval {
  double lo;
  double hi;
};

inline double interval_infinity() {
  return std::numeric_limits<double>::infinity();
}

// A product partition of R^n built from per-coordinate symmetric splits:
// coordinate j is divided into F_{j+} = {t : |t| in the interval list} and
// its complement F_{j-}. Both sets are symmetric by construction, so cell
// membership depends only on |t|.
//
// Intervals are canonicalized at construction (sorted by lo, touching
// intervals merged) and must be pairwise disjoint. Membership treats the
// endpoints as belonging to the plus side; endpoints form a null set, and
// the fixed convention makes point evaluation deterministic and round trips
// exact.
class SymmetricProductPartition {
 public:
  explicit SymmetricProductPartition(std::vector<std::vector<Interval>> plus);
  // F_{j+} = [0, inf) for every coordinate: a single all-plus cell.
  static SymmetricProductPartition trivial(Eigen::Index n);

  Eigen::Index dim() const { return static_cast<Eigen::Index>(plus_.size()); }
  const std::vector<Interval>& plus_intervals(Eigen::Index j) const;
  // Complement of the plus list within [0, inf), as half-open intervals.
  std::vector<Interval> minus_intervals(Eigen::Index j) const;

  // +1 if |t| lies in coordinate j's plus set (endpoints included), else -1.
  int sign_at(Eigen::Index j, double t) const;

  bool plus_has_measure(Eigen::Index j) const;
  bool minus_has_measure(Eigen::Index j) const;

  // True when some single sign cell covers R^n up to a null set.
  bool is_trivial() const;

  // Smallest distance from |t| to any endpoint of coordinate j's lists.
  double endpoint_distance(Eigen::Index j, double t) const;

 private:
  std::vector<std::vector<Interval>> plus_;
};

}  // namespace gpf
