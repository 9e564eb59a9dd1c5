#include "boolperc/level_sweep.hpp"

#include <algorithm>
#include <numeric>

#include "boolperc/metric_index.hpp"

namespace boolperc {

LevelSweep::LevelSweep(const MarkedConfiguration& config, std::vector<std::uint8_t> flags,
                       std::vector<std::uint8_t> targets)
    : config_(&config),
      flags_(std::move(flags)),
      targets_(std::move(targets)),
      active_(config.size(), 0),
      sets_(config.size()),
      cluster_flags_(config.size(), 0),
      counts_(targets_.size(), 0),
      first_(targets_.size()) {
  const std::size_t n = config.size();
  if (flags_.size() != n) throw InvalidArgument("level sweep: one flag byte per point required");

  order_.resize(n);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    const double ma = config.marks(static_cast<Eigen::Index>(a));
    const double mb = config.marks(static_cast<Eigen::Index>(b));
    return ma < mb || (ma == mb && a < b);
  });

  const MetricIndex index(config.space, config.locations);
  const double reach = 2.0 * config.space.ball_radius();
  offsets_.assign(n + 1, 0);
  std::vector<std::size_t> found;
  for (std::size_t i = 0; i < n; ++i) {
    found.clear();
    index.query_into(config.location(i), reach, found);
    for (auto j : found)
      if (j != i) neighbors_.push_back(j);
    offsets_[i + 1] = neighbors_.size();
  }
}

void LevelSweep::tally(std::uint8_t flags, long delta) {
  for (std::size_t t = 0; t < targets_.size(); ++t) {
    if ((flags & targets_[t]) != targets_[t]) continue;
    counts_[t] = static_cast<std::size_t>(static_cast<long>(counts_[t]) + delta);
    if (delta > 0 && !first_[t]) first_[t] = current_mark_;
  }
}

void LevelSweep::activate(std::size_t point) {
  active_[point] = 1;
  ++clusters_;
  cluster_flags_[point] = flags_[point];
  tally(flags_[point], +1);
  for (std::size_t k = offsets_[point]; k < offsets_[point + 1]; ++k) {
    const std::size_t other = neighbors_[k];
    if (!active_[other]) continue;
    const std::size_t a = sets_.find(point);
    const std::size_t b = sets_.find(other);
    if (a == b) continue;
    tally(cluster_flags_[a], -1);
    tally(cluster_flags_[b], -1);
    const std::uint8_t merged = cluster_flags_[a] | cluster_flags_[b];
    const std::size_t root = sets_.unite(a, b);
    cluster_flags_[root] = merged;
    --clusters_;
    tally(merged, +1);
  }
}

void LevelSweep::advance_to(double lambda) {
  if (lambda < level_) throw InvalidArgument("level sweep: levels must be non-decreasing");
  if (lambda > config_->lambda_max) throw InvalidArgument("level sweep: lambda exceeds lambda_max");
  level_ = lambda;
  while (next_ < order_.size()) {
    const std::size_t point = order_[next_];
    const double mark = config_->marks(static_cast<Eigen::Index>(point));
    if (mark > lambda) break;
    current_mark_ = mark;
    activate(point);
    ++next_;
  }
}

}  // namespace boolperc
