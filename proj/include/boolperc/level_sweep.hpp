#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "boolperc/disjoint_sets.hpp"
#include "boolperc/point_process.hpp"

namespace boolperc {

/// Adds the points of a configuration in increasing mark order and keeps the
/// clusters of the active set current, so that one pass over a configuration
/// answers questions at every level lambda <= lambda_max.
///
/// Each point carries a small bit set of region flags (e.g. "ball meets the
/// inner region"). A cluster's flags are the OR over its members. For each
/// target mask the sweep tracks how many clusters carry all of its bits, and
/// the first level at which one did.
class LevelSweep {
 public:
  LevelSweep(const MarkedConfiguration& config, std::vector<std::uint8_t> flags, std::vector<std::uint8_t> targets);

  /// Activates every point with mark <= lambda. Levels must not decrease.
  void advance_to(double lambda);
  void advance_to_end() { advance_to(config_->lambda_max); }

  double level() const noexcept { return level_; }
  std::size_t active_count() const noexcept { return next_; }
  std::size_t cluster_count() const noexcept { return clusters_; }
  std::size_t clusters_with(std::size_t target) const { return counts_.at(target); }
  /// Smallest mark at which clusters_with(target) became positive, if it has
  /// happened up to the current level.
  std::optional<double> first_level(std::size_t target) const { return first_.at(target); }

 private:
  void activate(std::size_t point);
  void tally(std::uint8_t flags, long delta);

  const MarkedConfiguration* config_;
  std::vector<std::uint8_t> flags_;
  std::vector<std::uint8_t> targets_;
  std::vector<std::size_t> order_;  // ids by (mark, id)
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> neighbors_;
  std::vector<char> active_;
  DisjointSets sets_;
  std::vector<std::uint8_t> cluster_flags_;  // valid at roots
  std::vector<std::size_t> counts_;
  std::vector<std::optional<double>> first_;
  std::size_t next_ = 0;
  std::size_t clusters_ = 0;
  double level_ = 0.0;
  double current_mark_ = 0.0;
};

}  // namespace boolperc
