#include "boolperc/clusters.hpp"

#include <algorithm>
#include <deque>
#include <ostream>

#include "boolperc/disjoint_sets.hpp"

namespace boolperc {

std::optional<std::size_t> IntersectionGraph::local_index(std::size_t config_id) const {
  const auto it = std::lower_bound(ids.begin(), ids.end(), config_id);
  if (it == ids.end() || *it != config_id) return std::nullopt;
  return static_cast<std::size_t>(it - ids.begin());
}

std::vector<std::size_t> IntersectionGraph::balls_covering(const Point& p) const {
  return index.query(p, space.ball_radius());
}

IntersectionGraph build_intersection_graph(const ActiveSet& active) {
  const MarkedConfiguration& config = active.config();
  IntersectionGraph graph{config.space, window_center(config.space, config.window), active.lambda(), active.ids(),
                          active.locations(), {}, {}, {}};
  graph.index = MetricIndex(graph.space, graph.locations);

  const double reach = 2.0 * graph.space.ball_radius();
  const std::size_t n = graph.size();
  graph.offsets.assign(n + 1, 0);
  std::vector<std::size_t> found;
  for (std::size_t i = 0; i < n; ++i) {
    found.clear();
    graph.index.query_into(graph.location(i), reach, found);
    std::sort(found.begin(), found.end());
    for (auto j : found)
      if (j != i) graph.adjacency.push_back(j);
    graph.offsets[i + 1] = graph.adjacency.size();
  }
  return graph;
}

const Cluster& ClusterLabeling::cluster(std::size_t wanted) const {
  const auto it = std::lower_bound(clusters.begin(), clusters.end(), wanted,
                                   [](const Cluster& c, std::size_t label) { return c.label < label; });
  if (it == clusters.end() || it->label != wanted)
    throw InvalidArgument("no cluster with label " + std::to_string(wanted));
  return *it;
}

ClusterLabeling label_clusters(const IntersectionGraph& graph) {
  const std::size_t n = graph.size();
  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : graph.neighbors(i))
      if (j > i) sets.unite(i, j);

  // Local indices ascend with config ids, so the first index seen per root is
  // the canonical (smallest-id) member.
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> cluster_of_root(n, kUnset);
  ClusterLabeling labeling;
  labeling.label.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = sets.find(i);
    if (cluster_of_root[root] == kUnset) {
      cluster_of_root[root] = labeling.clusters.size();
      labeling.clusters.push_back(Cluster{graph.ids[i], {}, 0.0});
    }
    Cluster& cluster = labeling.clusters[cluster_of_root[root]];
    labeling.label[i] = cluster.label;
    cluster.members.push_back(graph.ids[i]);
    cluster.max_distance_from_center = std::max(
        cluster.max_distance_from_center,
        detail::distance_unchecked(graph.space.kind(), graph.window_center, graph.locations.col(static_cast<Eigen::Index>(i))));
  }
  return labeling;
}

// --- growth -----------------------------------------------------------------

std::vector<std::size_t> GrowthTrace::discovered_ids() const {
  std::vector<std::size_t> ids;
  ids.reserve(steps.size());
  for (const auto& step : steps) ids.push_back(step.point_id);
  return ids;
}

CoverageTester::CoverageTester(const Space& space, double radius, double resolution)
    : space_(space), radius_(radius), margin_(space.ball_radius() - resolution) {
  if (!(radius > 0.0)) throw InvalidArgument("coverage test: radius must be positive");
  if (!(resolution > 0.0)) throw InvalidArgument("coverage test: resolution must be positive");
  if (resolution >= space.ball_radius())
    throw InvalidArgument("coverage test: resolution must be smaller than ball_radius");
  origin_net_ = covering_net(space, space.origin(), radius, resolution);
}

bool CoverageTester::covered(const Point& center, std::span<const Point> members) const {
  const SpaceKind kind = space_.kind();
  const double reach = radius_ + space_.ball_radius();
  std::vector<Point> near;
  for (const auto& m : members)
    if (detail::distance_unchecked(kind, center, m) <= reach) near.push_back(m);
  if (near.empty()) return false;

  const bool hyperbolic = space_.is_hyperbolic();
  const Eigen::Matrix3d boost =
      hyperbolic ? hyperboloid_translation(center.head<3>()) : Eigen::Matrix3d::Identity().eval();
  Point probe = center;
  std::size_t last_hit = 0;
  for (const auto& local : origin_net_) {
    if (hyperbolic) {
      probe.head<3>() = boost * local.head<3>();
      if (kind == SpaceKind::H2xR) probe(3) = center(3) + local(3);
    } else {
      probe = center + local;
    }
    // Neighbouring net points tend to be covered by the same ball.
    if (detail::distance_unchecked(kind, probe, near[last_hit]) <= margin_) continue;
    bool hit = false;
    for (std::size_t k = 0; k < near.size(); ++k) {
      if (detail::distance_unchecked(kind, probe, near[k]) <= margin_) {
        last_hit = k;
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

bool ball_covered_by_cluster(const Space& space, const PointMatrix& members, const Point& center, double radius,
                             double resolution) {
  const CoverageTester tester(space, radius, resolution);
  validate_point(space, center);
  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(members.cols()));
  for (Eigen::Index i = 0; i < members.cols(); ++i) points.emplace_back(members.col(i));
  return tester.covered(center, points);
}

GrowthTrace grow_component(const MarkedConfiguration& config, double lambda, const Point& seed, const StopRule& stop) {
  const Space& space = config.space;
  validate_point(space, seed);
  if (!window_contains(space, config.window, seed)) throw InvalidArgument("grow_component: seed point outside window");
  const ActiveSet active = restrict_to(config, lambda);
  const PointMatrix locations = active.locations();
  const MetricIndex index(space, locations);
  const double br = space.ball_radius();

  std::optional<CoverageTester> tester;
  if (stop.kind == StopRule::Kind::CoveredBall) tester.emplace(space, stop.radius, stop.resolution);
  if (stop.kind == StopRule::Kind::RadiusReached && !(stop.radius >= 0.0))
    throw InvalidArgument("grow_component: stop radius must be >= 0");

  GrowthTrace trace;
  trace.seed = seed;
  std::vector<char> discovered(active.size(), 0);
  std::deque<std::size_t> queue;
  std::vector<std::size_t> scratch;

  auto location = [&](std::size_t local) -> Point { return locations.col(static_cast<Eigen::Index>(local)); };

  // Evaluates the stop rule after `local` joins; true means stop.
  auto should_stop = [&](std::size_t local) {
    const Point c = location(local);
    const double d = distance(space, seed, c);
    trace.max_center_distance = std::max(trace.max_center_distance, d);
    switch (stop.kind) {
      case StopRule::Kind::Exhaust:
        return false;
      case StopRule::Kind::RadiusReached:
        if (d >= stop.radius) {
          trace.stop_reason = StopReason::RadiusReached;
          trace.stop_parameter = stop.radius;
          return true;
        }
        return false;
      case StopRule::Kind::CoveredBall: {
        // Only balls S(Y, R) within reach of the new ball can have changed.
        const double reach = stop.radius + br;
        std::vector<std::size_t> candidates = index.query(c, reach);
        for (auto y : candidates) {
          if (!discovered[y]) continue;
          const Point center = location(y);
          scratch.clear();
          index.query_into(center, reach, scratch);
          std::vector<Point> members;
          for (auto m : scratch)
            if (discovered[m]) members.push_back(location(m));
          if (tester->covered(center, members)) {
            trace.stop_reason = StopReason::CoveredBallFound;
            trace.stop_parameter = stop.radius;
            trace.covered_center = center;
            return true;
          }
        }
        return false;
      }
    }
    return false;
  };

  auto discover = [&](std::size_t local, std::optional<std::size_t> from) {
    discovered[local] = 1;
    trace.steps.push_back({active.ids()[local], from ? std::optional(active.ids()[*from]) : std::nullopt});
    queue.push_back(local);
    return should_stop(local);
  };

  for (auto local : index.query(seed, br))
    if (discover(local, std::nullopt)) return trace;

  while (!queue.empty()) {
    const std::size_t current = queue.front();
    queue.pop_front();
    for (auto next : index.query(location(current), 2.0 * br)) {
      if (discovered[next]) continue;
      if (discover(next, current)) return trace;
    }
  }
  trace.stop_reason = StopReason::Exhausted;
  return trace;
}

// --- connectivity -------------------------------------------------------------

bool connects(const IntersectionGraph& graph, const ClusterLabeling& labeling, const Window& region_a,
              const Window& region_b) {
  const double br = graph.space.ball_radius();
  std::vector<std::size_t> touches_a;
  for (std::size_t i = 0; i < graph.size(); ++i)
    if (distance_to_window(graph.space, region_a, graph.location(i)) <= br) touches_a.push_back(labeling.label[i]);
  std::sort(touches_a.begin(), touches_a.end());
  for (std::size_t i = 0; i < graph.size(); ++i)
    if (distance_to_window(graph.space, region_b, graph.location(i)) <= br &&
        std::binary_search(touches_a.begin(), touches_a.end(), labeling.label[i]))
      return true;
  return false;
}

bool connects(const ActiveSet& active, const Window& region_a, const Window& region_b) {
  const IntersectionGraph graph = build_intersection_graph(active);
  return connects(graph, label_clusters(graph), region_a, region_b);
}

std::optional<std::size_t> chemical_distance(const IntersectionGraph& graph, const Point& p, const Point& q) {
  const auto sources = graph.balls_covering(p);
  const auto targets = graph.balls_covering(q);
  if (sources.empty() || targets.empty()) return std::nullopt;

  constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> hops(graph.size(), kUnseen);
  std::vector<char> is_target(graph.size(), 0);
  for (auto t : targets) is_target[t] = 1;
  std::deque<std::size_t> queue;
  for (auto s : sources) {
    if (is_target[s]) return 1;
    hops[s] = 0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (auto v : graph.neighbors(u)) {
      if (hops[v] != kUnseen) continue;
      hops[v] = hops[u] + 1;
      if (is_target[v]) return hops[v] + 1;
      queue.push_back(v);
    }
  }
  return std::nullopt;
}

// --- boundary connections -----------------------------------------------------

double boundary_connection_threshold(const Space& space) { return 4.0 * space.ball_radius(); }

std::vector<BoundaryConnection> find_boundary_connections(const IntersectionGraph& graph,
                                                          const ClusterLabeling& labeling, std::size_t cluster_a,
                                                          std::size_t cluster_b) {
  if (cluster_a == cluster_b) throw InvalidArgument("boundary connections: the two clusters must differ");
  const Cluster& a = labeling.cluster(cluster_a);
  const Cluster& b = labeling.cluster(cluster_b);
  const double threshold = boundary_connection_threshold(graph.space);
  const SpaceKind kind = graph.space.kind();

  // For each member: nearby outside points as (cluster label, config id),
  // sorted, restricted to strict distance < threshold.
  auto outside_near = [&](std::size_t config_id) {
    const std::size_t local = *graph.local_index(config_id);
    const Point x = graph.location(local);
    std::vector<std::pair<std::size_t, std::size_t>> near;
    for (auto j : graph.index.query(x, threshold)) {
      const std::size_t label = labeling.label[j];
      if (label == cluster_a || label == cluster_b) continue;
      if (detail::distance_unchecked(kind, x, graph.locations.col(static_cast<Eigen::Index>(j))) < threshold)
        near.emplace_back(label, graph.ids[j]);
    }
    std::sort(near.begin(), near.end());
    return near;
  };

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> near_b;
  near_b.reserve(b.members.size());
  for (auto x2 : b.members) near_b.push_back(outside_near(x2));

  std::vector<BoundaryConnection> connections;
  for (auto x1 : a.members) {
    const Point p1 = graph.location(*graph.local_index(x1));
    const auto near_a = outside_near(x1);
    for (std::size_t k = 0; k < b.members.size(); ++k) {
      const std::size_t x2 = b.members[k];
      const Point p2 = graph.location(*graph.local_index(x2));
      if (detail::distance_unchecked(kind, p1, p2) < threshold) {
        connections.push_back({x1, x2, std::nullopt});
        continue;
      }
      // Outside points in one cluster are joined by a chain inside that
      // cluster, which avoids both a and b. Take the smallest shared label and
      // the smallest-id endpoints within it.
      const auto& nb = near_b[k];
      auto ia = near_a.begin();
      auto ib = nb.begin();
      while (ia != near_a.end() && ib != nb.end()) {
        if (ia->first < ib->first) {
          ++ia;
        } else if (ib->first < ia->first) {
          ++ib;
        } else {
          connections.push_back({x1, x2, std::pair{ia->second, ib->second}});
          break;
        }
      }
    }
  }
  return connections;
}

std::size_t count_boundary_connections(const MarkedConfiguration& config, double lambda, std::size_t cluster_a,
                                       std::size_t cluster_b) {
  const ActiveSet active = restrict_to(config, lambda);
  const IntersectionGraph graph = build_intersection_graph(active);
  return find_boundary_connections(graph, label_clusters(graph), cluster_a, cluster_b).size();
}

MergeVerification merge_via_boundary_connection(const MarkedConfiguration& config, double lambda,
                                                const BoundaryConnection& connection) {
  const Space& space = config.space;
  const Point x1 = config.location(connection.x1);
  const Point x2 = config.location(connection.x2);
  std::vector<Point> bridges;
  if (connection.chain) {
    bridges.push_back(midpoint(space, x1, config.location(connection.chain->first)));
    bridges.push_back(midpoint(space, x2, config.location(connection.chain->second)));
  } else {
    bridges.push_back(midpoint(space, x1, x2));
  }

  MergeVerification result{bridges, with_extra_points(config, bridges), {}, 0};
  const ActiveSet active = restrict_to(result.augmented, lambda);
  const IntersectionGraph graph = build_intersection_graph(active);
  result.labeling = label_clusters(graph);
  const auto l1 = graph.local_index(connection.x1);
  const auto l2 = graph.local_index(connection.x2);
  if (!l1 || !l2) throw InternalInvariantViolation("merge: connection endpoints are not active at this level");
  if (result.labeling.label[*l1] != result.labeling.label[*l2])
    throw InternalInvariantViolation("merge: bridging balls failed to join the clusters of points " +
                                     std::to_string(connection.x1) + " and " + std::to_string(connection.x2));
  result.merged_label = result.labeling.label[*l1];
  return result;
}

// --- dumps --------------------------------------------------------------------

void write_cluster_csv(std::ostream& out, const IntersectionGraph& graph, const ClusterLabeling& labeling) {
  out << "point_id,cluster_id\n";
  for (std::size_t i = 0; i < graph.size(); ++i) out << graph.ids[i] << ',' << labeling.label[i] << '\n';
}

void write_growth_trace_csv(std::ostream& out, const GrowthTrace& trace) {
  out << "step,point_id,discovered_from\n";
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    out << k << ',' << trace.steps[k].point_id << ',';
    if (trace.steps[k].discovered_from) out << *trace.steps[k].discovered_from;
    out << '\n';
  }
}

}  // namespace boolperc
