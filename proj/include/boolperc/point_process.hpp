#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "boolperc/geometry.hpp"

namespace boolperc {

/// Poisson configuration at intensity lambda_max where every point carries an
/// independent uniform level mark in [0, lambda_max]. The points with
/// mark <= lambda form a Poisson process of intensity lambda, for every
/// lambda <= lambda_max at once, and these sets are nested in lambda.
struct MarkedConfiguration {
  Space space;
  Window window;
  double lambda_max = 0.0;
  std::uint64_t seed = 0;
  PointMatrix locations;  // one point per column
  Eigen::VectorXd marks;

  std::size_t size() const noexcept { return static_cast<std::size_t>(marks.size()); }
  Point location(std::size_t id) const { return locations.col(static_cast<Eigen::Index>(id)); }
};

/// Points of a configuration active at level `lambda`. Holds a pointer to the
/// configuration, which must outlive it.
class ActiveSet {
 public:
  ActiveSet(const MarkedConfiguration& config, double lambda, std::vector<std::size_t> ids)
      : config_(&config), lambda_(lambda), ids_(std::move(ids)) {}

  const MarkedConfiguration& config() const noexcept { return *config_; }
  const Space& space() const noexcept { return config_->space; }
  double lambda() const noexcept { return lambda_; }
  const std::vector<std::size_t>& ids() const noexcept { return ids_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  /// Locations of the active points, in `ids()` order.
  PointMatrix locations() const;

 private:
  const MarkedConfiguration* config_;
  double lambda_;
  std::vector<std::size_t> ids_;
};

/// Two-stage sampling: Poisson(lambda_max * volume) count, then i.i.d.
/// location/mark pairs, all from RandomStream(seed).
MarkedConfiguration sample_configuration(const Space& space, const Window& window, double lambda_max,
                                         std::uint64_t seed);

/// Active ids {i : mark_i <= lambda}, ascending. lambda in [0, lambda_max].
ActiveSet restrict_to(const MarkedConfiguration& config, double lambda);

/// Appends extra points (e.g. bridging balls) with mark 0 so they are active
/// at every level. Window containment is not re-checked.
MarkedConfiguration with_extra_points(const MarkedConfiguration& config, const std::vector<Point>& extra);

// CSV: "id,coord0,...,coordK,mark" then one row per point.
void write_configuration_csv(std::ostream& out, const MarkedConfiguration& config);
// Flat key=value sidecar: space, window, lambda_max, seed.
void write_configuration_metadata(std::ostream& out, const MarkedConfiguration& config);
MarkedConfiguration read_configuration(std::istream& csv, std::istream& metadata);

void save_configuration(const std::string& csv_path, const std::string& metadata_path,
                        const MarkedConfiguration& config);
MarkedConfiguration load_configuration(const std::string& csv_path, const std::string& metadata_path);

}  // namespace boolperc
