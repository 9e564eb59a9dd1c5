#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "boolperc/geometry.hpp"
#include "boolperc/metric_index.hpp"
#include "boolperc/point_process.hpp"

namespace boolperc {

/// Ball-intersection graph of an active set: i ~ j iff the closed balls of
/// radius ball_radius around them meet, i.e. distance <= 2 * ball_radius.
///
/// Vertices are numbered locally 0..size()-1 in ascending config-id order, so
/// the smallest local index of a component is also its smallest config id.
struct IntersectionGraph {
  Space space;
  Point window_center;
  double lambda = 0.0;
  std::vector<std::size_t> ids;  // local -> config id
  PointMatrix locations;         // local columns
  MetricIndex index;             // over locations, reporting local indices
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> adjacency;

  std::size_t size() const noexcept { return ids.size(); }
  std::span<const std::size_t> neighbors(std::size_t local) const {
    return {adjacency.data() + offsets[local], offsets[local + 1] - offsets[local]};
  }
  Point location(std::size_t local) const { return locations.col(static_cast<Eigen::Index>(local)); }
  std::optional<std::size_t> local_index(std::size_t config_id) const;
  /// Local indices of the balls containing p (distance <= ball_radius).
  std::vector<std::size_t> balls_covering(const Point& p) const;
};

IntersectionGraph build_intersection_graph(const ActiveSet& active);

struct Cluster {
  std::size_t label = 0;               // smallest member config id
  std::vector<std::size_t> members;    // config ids, ascending
  double max_distance_from_center = 0.0;
};

struct ClusterLabeling {
  std::vector<std::size_t> label;  // per local index
  std::vector<Cluster> clusters;   // ascending label

  std::size_t cluster_count() const noexcept { return clusters.size(); }
  /// Cluster with the given label; throws InvalidArgument if absent.
  const Cluster& cluster(std::size_t label) const;
};

ClusterLabeling label_clusters(const IntersectionGraph& graph);

// --- growth ---------------------------------------------------------------

struct StopRule {
  enum class Kind { Exhaust, RadiusReached, CoveredBall };
  Kind kind = Kind::Exhaust;
  double radius = 0.0;      // L for RadiusReached, R for CoveredBall
  double resolution = 0.0;  // mesh for CoveredBall

  static StopRule exhaust() { return {}; }
  static StopRule radius_reached(double distance) { return {Kind::RadiusReached, distance, 0.0}; }
  static StopRule covered_ball(double radius, double resolution) { return {Kind::CoveredBall, radius, resolution}; }
};

enum class StopReason { Exhausted, RadiusReached, CoveredBallFound };

struct GrowthStep {
  std::size_t point_id;
  std::optional<std::size_t> discovered_from;  // nullopt for balls containing the seed
};

/// Breadth-first exploration of the component containing a seed point, one
/// whole ball at a time.
struct GrowthTrace {
  Point seed;
  std::vector<GrowthStep> steps;
  StopReason stop_reason = StopReason::Exhausted;
  double stop_parameter = 0.0;           // L or R of the rule that fired
  std::optional<Point> covered_center;   // witness for CoveredBallFound
  double max_center_distance = 0.0;      // from the seed, over discovered balls

  std::vector<std::size_t> discovered_ids() const;
};

/// Grows the component of `seed` in the active set at `lambda`. The stop rule
/// is evaluated after every newly discovered ball.
GrowthTrace grow_component(const MarkedConfiguration& config, double lambda, const Point& seed, const StopRule& stop);

/// Checks S(center, radius) against a covering net of mesh `resolution`; each
/// net point must lie within ball_radius - resolution of a member. A true
/// result therefore means the ball is genuinely covered.
bool ball_covered_by_cluster(const Space& space, const PointMatrix& members, const Point& center, double radius,
                             double resolution);

/// Reusable form of ball_covered_by_cluster: the net is built once at the
/// origin and carried to each centre by an isometry.
class CoverageTester {
 public:
  CoverageTester(const Space& space, double radius, double resolution);
  /// `members` are candidate ball centres; only those within
  /// radius + ball_radius of `center` matter.
  bool covered(const Point& center, std::span<const Point> members) const;

 private:
  Space space_;
  double radius_;
  double margin_;
  std::vector<Point> origin_net_;
};

// --- connectivity -----------------------------------------------------------

/// True iff one cluster has a ball meeting `region_a` and a ball meeting
/// `region_b`.
bool connects(const ActiveSet& active, const Window& region_a, const Window& region_b);
bool connects(const IntersectionGraph& graph, const ClusterLabeling& labeling, const Window& region_a,
              const Window& region_b);

/// Smallest number of balls in a chain of consecutively intersecting balls
/// from p to q; nullopt when p or q is uncovered or they lie in different
/// components.
std::optional<std::size_t> chemical_distance(const IntersectionGraph& graph, const Point& p, const Point& q);

// --- boundary connections ---------------------------------------------------

/// Centre distance below which two clusters' balls are less than one ball
/// diameter apart: 4 * ball_radius. Strict inequality.
double boundary_connection_threshold(const Space& space);

struct BoundaryConnection {
  std::size_t x1;  // config id in the first cluster
  std::size_t x2;  // config id in the second cluster
  /// Ends (y1, yn) of a chain outside both clusters; nullopt for a direct pair.
  std::optional<std::pair<std::size_t, std::size_t>> chain;
};

std::vector<BoundaryConnection> find_boundary_connections(const IntersectionGraph& graph,
                                                          const ClusterLabeling& labeling, std::size_t cluster_a,
                                                          std::size_t cluster_b);
std::size_t count_boundary_connections(const MarkedConfiguration& config, double lambda, std::size_t cluster_a,
                                       std::size_t cluster_b);

struct MergeVerification {
  std::vector<Point> bridges;
  MarkedConfiguration augmented;
  ClusterLabeling labeling;  // of `augmented` at the same lambda
  std::size_t merged_label = 0;
};

/// Adds at most two balls at geodesic midpoints of the gaps and relabels.
/// Throws InternalInvariantViolation if the two clusters stay apart.
MergeVerification merge_via_boundary_connection(const MarkedConfiguration& config, double lambda,
                                                const BoundaryConnection& connection);

// --- dumps --------------------------------------------------------------------

/// "point_id,cluster_id"
void write_cluster_csv(std::ostream& out, const IntersectionGraph& graph, const ClusterLabeling& labeling);
/// "step,point_id,discovered_from" (empty field for seed balls)
void write_growth_trace_csv(std::ostream& out, const GrowthTrace& trace);

}  // namespace boolperc
