#include "boolperc/metric_index.hpp"

#include <algorithm>
#include <numeric>

#include "boolperc/tolerances.hpp"

namespace boolperc {

namespace {
constexpr std::size_t kLeafSize = 8;
}

MetricIndex::MetricIndex(const Space& space, const PointMatrix& points, std::vector<std::size_t> ids)
    : kind_(space.kind()), coordinates_(space.coordinate_count()), points_(points), ids_(std::move(ids)) {
  if (points.cols() > 0 && points.rows() != space.coordinate_count())
    throw InvalidArgument("metric index: points have " + std::to_string(points.rows()) + " coordinates, space " +
                          space.name() + " expects " + std::to_string(space.coordinate_count()));
  const auto n = static_cast<std::size_t>(points.cols());
  if (ids_.empty()) {
    ids_.resize(n);
    std::iota(ids_.begin(), ids_.end(), std::size_t{0});
  } else if (ids_.size() != n) {
    throw InvalidArgument("metric index: ids and points differ in length");
  }
  if (n == 0) return;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> scratch(n);
  nodes_.reserve(2 * n / kLeafSize + 1);
  root_ = build(order, scratch, 0, n);
}

int MetricIndex::build(std::vector<std::size_t>& order, std::vector<double>& scratch, std::size_t lo,
                       std::size_t hi) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (hi - lo <= kLeafSize) {
    Node& node = nodes_[id];
    node.leaf = true;
    node.leaf_begin = leaf_items_.size();
    leaf_items_.insert(leaf_items_.end(), order.begin() + lo, order.begin() + hi);
    node.leaf_end = leaf_items_.size();
    return id;
  }

  std::swap(order[lo], order[lo + (hi - lo) / 2]);
  const std::size_t vantage = order[lo];
  const Point vp = points_.col(vantage);
  for (std::size_t i = lo + 1; i < hi; ++i) scratch[order[i]] = dist(vp, order[i]);

  const std::size_t mid = lo + 1 + (hi - lo - 1) / 2;
  std::nth_element(order.begin() + lo + 1, order.begin() + mid, order.begin() + hi,
                   [&](std::size_t a, std::size_t b) { return scratch[a] < scratch[b]; });
  const double threshold = scratch[order[mid]];

  // [lo+1, mid] has distance <= threshold, (mid, hi) has distance >= threshold.
  const int inside = build(order, scratch, lo + 1, mid + 1);
  const int outside = build(order, scratch, mid + 1, hi);
  Node& node = nodes_[id];
  node.vantage = vantage;
  node.threshold = threshold;
  node.inside = inside;
  node.outside = outside;
  return id;
}

void MetricIndex::search(int node_id, const Point& center, double radius, std::vector<std::size_t>& out) const {
  const Node& node = nodes_[node_id];
  if (node.leaf) {
    for (std::size_t k = node.leaf_begin; k < node.leaf_end; ++k) {
      const std::size_t column = leaf_items_[k];
      if (dist(center, column) <= radius) out.push_back(ids_[column]);
    }
    return;
  }
  const double d = dist(center, node.vantage);
  if (d <= radius) out.push_back(ids_[node.vantage]);
  const double slack = tolerance::kPruneSlack * std::max(1.0, d);
  if (d - radius <= node.threshold + slack) search(node.inside, center, radius, out);
  if (d + radius >= node.threshold - slack && node.outside >= 0) search(node.outside, center, radius, out);
}

void MetricIndex::query_into(const Point& center, double radius, std::vector<std::size_t>& out) const {
  if (root_ < 0) return;
  if (center.size() != coordinates_) throw InvalidArgument("metric index query: wrong coordinate count");
  search(root_, center, radius, out);
}

std::vector<std::size_t> MetricIndex::query(const Point& center, double radius) const {
  std::vector<std::size_t> out;
  query_into(center, radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

MetricIndex metric_index_build(const Space& space, const PointMatrix& points) { return MetricIndex(space, points); }

std::vector<std::size_t> metric_index_query(const MetricIndex& index, const Point& center, double radius) {
  return index.query(center, radius);
}

}  // namespace boolperc
