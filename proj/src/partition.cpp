#include "gpf/partition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gpf {

SymmetricProductPartition::SymmetricProductPartition(
    std::vector<std::vector<Interval>> plus)
    : plus_(std::move(plus)) {
  if (plus_.empty())
    throw DimensionError("partition needs at least one coordinate");
  for (size_t j = 0; j < plus_.size(); ++j) {
    auto& list = plus_[j];
    for (const auto& iv : list) {
      if (std::isnan(iv.lo) || std::isnan(iv.hi))
        throw InvalidArgumentError("partition coordinate " + std::to_string(j) +
                                   ": NaN interval endpoint");
      if (iv.lo < 0.0 || !(iv.lo < iv.hi))
        throw InvalidArgumentError("partition coordinate " + std::to_string(j) +
                                   ": intervals need 0 <= lo < hi");
    }
    std::sort(list.begin(), list.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    // Merge touching intervals; overlap is an input error.
    std::vector<Interval> merged;
    for (const auto& iv : list) {
      if (!merged.empty()) {
        if (iv.lo < merged.back().hi)
          throw InvalidArgumentError("partition coordinate " + std::to_string(j) +
                                     ": overlapping intervals");
        if (iv.lo == merged.back().hi) {
          merged.back().hi = iv.hi;
          continue;
        }
      }
      merged.push_back(iv);
    }
    list = std::move(merged);
  }
}

SymmetricProductPartition SymmetricProductPartition::trivial(Eigen::Index n) {
  std::vector<std::vector<Interval>> plus(
      static_cast<size_t>(n), {Interval{0.0, interval_infinity()}});
  return SymmetricProductPartition(std::move(plus));
}

const std::vector<Interval>& SymmetricProductPartition::plus_intervals(
    Eigen::Index j) const {
  return plus_.at(static_cast<size_t>(j));
}

std::vector<Interval> SymmetricProductPartition::minus_intervals(
    Eigen::Index j) const {
  const auto& list = plus_.at(static_cast<size_t>(j));
  std::vector<Interval> out;
  double cursor = 0.0;
  for (const auto& iv : list) {
    if (iv.lo > cursor) out.push_back({cursor, iv.lo});
    cursor = iv.hi;
  }
  if (cursor < interval_infinity()) out.push_back({cursor, interval_infinity()});
  return out;
}

int SymmetricProductPartition::sign_at(Eigen::Index j, double t) const {
  const double a = std::abs(t);
  for (const auto& iv : plus_.at(static_cast<size_t>(j))) {
    // Closed test: interval endpoints count as plus.
    if (a >= iv.lo && a <= iv.hi) return 1;
  }
  return -1;
}

bool SymmetricProductPartition::plus_has_measure(Eigen::Index j) const {
  return !plus_.at(static_cast<size_t>(j)).empty();
}

bool SymmetricProductPartition::minus_has_measure(Eigen::Index j) const {
  return !minus_intervals(j).empty();
}

bool SymmetricProductPartition::is_trivial() const {
  for (Eigen::Index j = 0; j < dim(); ++j)
    if (plus_has_measure(j) && minus_has_measure(j)) return false;
  return true;
}

double SymmetricProductPartition::endpoint_distance(Eigen::Index j,
                                                    double t) const {
  const double a = std::abs(t);
  double best = interval_infinity();
  for (const auto& iv : plus_.at(static_cast<size_t>(j))) {
    best = std::min(best, std::abs(a - iv.lo));
    if (iv.hi < interval_infinity()) best = std::min(best, std::abs(a - iv.hi));
  }
  return best;
}

}  // namespace gpf
