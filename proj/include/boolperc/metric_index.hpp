#pragma once

#include <cstddef>
#include <vector>

#include "boolperc/geometry.hpp"

namespace boolperc {

/// Vantage-point tree over an arbitrary exact metric. Built once, then safe
/// for concurrent queries.
class MetricIndex {
 public:
  MetricIndex() = default;
  /// `points` holds one point per column; `ids[i]` is reported for column i
  /// (defaults to i).
  MetricIndex(const Space& space, const PointMatrix& points, std::vector<std::size_t> ids = {});

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  /// Ids of all points with distance(center, p) <= radius, ascending.
  std::vector<std::size_t> query(const Point& center, double radius) const;
  /// Appends matches in tree order (unsorted); `out` is not cleared.
  void query_into(const Point& center, double radius, std::vector<std::size_t>& out) const;

 private:
  struct Node {
    std::size_t vantage = 0;  // column in points_
    double threshold = 0.0;
    int inside = -1;
    int outside = -1;
    std::size_t leaf_begin = 0;
    std::size_t leaf_end = 0;
    bool leaf = false;
  };

  int build(std::vector<std::size_t>& order, std::vector<double>& scratch, std::size_t lo, std::size_t hi);
  void search(int node, const Point& center, double radius, std::vector<std::size_t>& out) const;
  double dist(const Point& center, std::size_t column) const {
    return detail::distance_unchecked(kind_, center, points_.col(column));
  }

  SpaceKind kind_ = SpaceKind::Euclidean;
  int coordinates_ = 0;
  PointMatrix points_;
  std::vector<std::size_t> ids_;
  std::vector<std::size_t> leaf_items_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

MetricIndex metric_index_build(const Space& space, const PointMatrix& points);
std::vector<std::size_t> metric_index_query(const MetricIndex& index, const Point& center, double radius);

}  // namespace boolperc
