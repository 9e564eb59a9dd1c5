#include "boolperc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "boolperc/level_sweep.hpp"
#include "boolperc/parallel.hpp"
#include "boolperc/random.hpp"

namespace boolperc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::uint8_t> flags_for(const MarkedConfiguration& config, const SpanningRegion& region) {
  std::vector<std::uint8_t> flags(config.size());
  for (std::size_t i = 0; i < config.size(); ++i) flags[i] = spanning_flags(config.space, region, config.location(i));
  return flags;
}

void describe(EstimatorReport& report, const Space& space, const Window& window) {
  report.space = space.name();
  write_space(report.metadata, space);
  write_window(report.metadata, window);
}

void describe(EstimatorReport& report, const SweepPlan& plan) {
  describe(report, plan.space, plan.window);
  report.metadata.set("lambda_max", format_double(plan.lambda_max()));
  report.metadata.set("seed", std::to_string(plan.seed));
  report.metadata.set("trials", std::to_string(plan.trials));
  report.metadata.set("common_random_numbers", plan.common_random_numbers ? "true" : "false");
}

double smallest_step(const std::vector<double>& grid) {
  double step = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < grid.size(); ++i) step = std::min(step, grid[i] - grid[i - 1]);
  return std::isfinite(step) ? step : 0.0;
}

// Spanning-cluster count for every (trial, level).
std::vector<std::vector<std::size_t>> spanning_counts(const SweepPlan& plan, const SpanningRegion& region) {
  plan.validate();
  validate_region(plan.space, region);
  require_window_fits(plan.space, plan.window, region);
  const auto& grid = plan.lambdas;
  std::vector<std::vector<std::size_t>> counts(plan.trials, std::vector<std::size_t>(grid.size(), 0));

  if (plan.common_random_numbers) {
    if (plan.lambda_max() == 0.0) return counts;
    parallel_for(plan.trials, plan.threads, [&](std::size_t t) {
      const auto config = sample_configuration(plan.space, plan.window, plan.lambda_max(),
                                               trial_seed(plan.seed, Experiment::Spanning, t));
      LevelSweep sweep(config, flags_for(config, region), {spanning_mask(plan.space)});
      for (std::size_t i = 0; i < grid.size(); ++i) {
        sweep.advance_to(grid[i]);
        counts[t][i] = sweep.clusters_with(0);
      }
    });
    return counts;
  }

  parallel_for(plan.trials * grid.size(), plan.threads, [&](std::size_t job) {
    const std::size_t t = job / grid.size();
    const std::size_t i = job % grid.size();
    if (grid[i] == 0.0) return;
    const auto config =
        sample_configuration(plan.space, plan.window, grid[i], trial_seed(plan.seed, Experiment::Spanning, t, i + 1));
    counts[t][i] = spanning_cluster_count(config, grid[i], region);
  });
  return counts;
}

ThresholdResult first_reaching(const EstimatorReport& report, const std::string& experiment,
                               const std::vector<double>& grid, double target, const std::string& summary,
                               double param1, double param2, std::size_t trials, std::uint64_t seed) {
  ThresholdResult result;
  result.report = report;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& row : report.rows_for(experiment))
      if (row.lambda == grid[i]) worst = std::min(worst, row.estimate);
    if (worst >= target) {
      result.lambda = grid[i];
      result.lo = i > 0 ? grid[i - 1] : grid[i];
      result.hi = grid[i];
      break;
    }
  }
  ReportRow row{summary, result.lambda.value_or(kNaN), param1, param2, target, kNaN, trials, seed};
  if (result.lambda) row.half_width = 0.5 * (result.hi - result.lo);
  result.report.rows.push_back(row);
  return result;
}

}  // namespace

// --- regions ------------------------------------------------------------------

void validate_region(const Space&, const SpanningRegion& region) {
  if (!(region.r_inner >= 0.0) || !std::isfinite(region.r_inner))
    throw InvalidArgument("region: r_inner must be finite and >= 0");
  if (!(region.r_outer > region.r_inner) || !std::isfinite(region.r_outer))
    throw InvalidArgument("region: r_outer must be finite and greater than r_inner");
}

std::uint8_t spanning_flags(const Space& space, const SpanningRegion& region, const Point& center) {
  const double br = space.ball_radius();
  const Point o = space.origin();
  std::uint8_t flags = 0;
  if (space.kind() == SpaceKind::H2xR) {
    if (detail::hyperboloid_distance(o.head<3>(), center.head<3>()) <= region.r_inner + br) flags |= region_bits::kInner;
    if (center(3) + br >= region.r_outer) flags |= region_bits::kOuter;
    if (center(3) - br <= -region.r_outer) flags |= region_bits::kBottom;
    return flags;
  }
  const double d = detail::distance_unchecked(space.kind(), o, center);
  if (d <= region.r_inner + br) flags |= region_bits::kInner;
  if (d + br >= region.r_outer) flags |= region_bits::kOuter;
  return flags;
}

std::uint8_t spanning_mask(const Space& space) {
  return space.kind() == SpaceKind::H2xR ? (region_bits::kInner | region_bits::kOuter | region_bits::kBottom)
                                         : (region_bits::kInner | region_bits::kOuter);
}

Window inflated_window(const Space& space, const SpanningRegion& region) {
  validate_region(space, region);
  const double pad = 2.0 * space.ball_radius();
  if (space.kind() == SpaceKind::H2xR)
    return CylinderWindow{std::max(region.r_inner, region.r_outer) + pad, region.r_outer + pad};
  return BallWindow{space.origin(), region.r_outer + pad};
}

void require_window_fits(const Space& space, const Window& window, const SpanningRegion& region) {
  validate_window(space, window);
  const double pad = 2.0 * space.ball_radius();
  const double slack = 1e-12;
  if (const auto* ball = std::get_if<BallWindow>(&window)) {
    if (distance(space, ball->center, space.origin()) > 1e-9)
      throw InvalidArgument("spanning region: the window must be centred at the origin");
    if (ball->radius + slack < region.r_outer + pad)
      throw InvalidArgument("spanning region: window radius must be at least r_outer + 2 * ball_radius");
    return;
  }
  const auto& cylinder = std::get<CylinderWindow>(window);
  if (cylinder.height_half + slack < region.r_outer + pad)
    throw InvalidArgument("spanning region: cylinder height_half must be at least r_outer + 2 * ball_radius");
  if (cylinder.h2_radius + slack < region.r_inner + pad)
    throw InvalidArgument("spanning region: cylinder h2_radius must be at least r_inner + 2 * ball_radius");
}

void SweepPlan::validate() const {
  validate_window(space, window);
  if (lambdas.empty()) throw InvalidArgument("sweep: lambda grid is empty");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] >= 0.0) || !std::isfinite(lambdas[i]))
      throw InvalidArgument("sweep: lambda grid values must be finite and >= 0");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) throw InvalidArgument("sweep: lambda grid must be strictly ascending");
  }
  if (trials < 1) throw InvalidArgument("sweep: trials must be >= 1");
}

std::uint64_t trial_seed(std::uint64_t base, Experiment experiment, std::size_t trial, std::size_t level) {
  const auto id = static_cast<std::uint64_t>(experiment);
  return derive_seed(derive_seed(base, id, level), id, trial);
}

// --- single-configuration statistics -----------------------------------------

std::vector<std::size_t> spanning_labels(const IntersectionGraph& graph, const ClusterLabeling& labeling,
                                         const SpanningRegion& region) {
  const std::uint8_t mask = spanning_mask(graph.space);
  std::vector<std::uint8_t> cluster_flags(labeling.cluster_count(), 0);
  auto slot = [&](std::size_t label) {
    return static_cast<std::size_t>(
        std::lower_bound(labeling.clusters.begin(), labeling.clusters.end(), label,
                         [](const Cluster& c, std::size_t l) { return c.label < l; }) -
        labeling.clusters.begin());
  };
  for (std::size_t i = 0; i < graph.size(); ++i)
    cluster_flags[slot(labeling.label[i])] |= spanning_flags(graph.space, region, graph.location(i));
  std::vector<std::size_t> labels;
  for (std::size_t k = 0; k < labeling.cluster_count(); ++k)
    if ((cluster_flags[k] & mask) == mask) labels.push_back(labeling.clusters[k].label);
  return labels;
}

std::size_t spanning_cluster_count(const MarkedConfiguration& config, double lambda, const SpanningRegion& region) {
  validate_region(config.space, region);
  const IntersectionGraph graph = build_intersection_graph(restrict_to(config, lambda));
  return spanning_labels(graph, label_clusters(graph), region).size();
}

StabilityReport stability_check(const MarkedConfiguration& config, double lambda1, double lambda2,
                                const SpanningRegion& region) {
  if (lambda1 > lambda2) throw InvalidArgument("stability: lambda1 must not exceed lambda2");
  validate_region(config.space, region);
  const IntersectionGraph graph1 = build_intersection_graph(restrict_to(config, lambda1));
  const IntersectionGraph graph2 = build_intersection_graph(restrict_to(config, lambda2));
  const ClusterLabeling labels1 = label_clusters(graph1);
  const ClusterLabeling labels2 = label_clusters(graph2);

  // Coupling refinement: every lambda1 cluster lies inside one lambda2 cluster.
  auto outer_label = [&](std::size_t config_id) {
    const auto local = graph2.local_index(config_id);
    if (!local) throw InternalInvariantViolation("stability: lambda1 point inactive at lambda2");
    return labels2.label[*local];
  };
  for (const auto& cluster : labels1.clusters) {
    const std::size_t host = outer_label(cluster.members.front());
    for (auto id : cluster.members)
      if (outer_label(id) != host)
        throw InternalInvariantViolation("stability: lambda1 cluster " + std::to_string(cluster.label) +
                                         " is split across lambda2 clusters");
  }

  const auto spanning1 = spanning_labels(graph1, labels1, region);
  const auto spanning2 = spanning_labels(graph2, labels2, region);
  std::vector<std::size_t> hosts;
  for (auto label : spanning1) hosts.push_back(outer_label(labels1.cluster(label).members.front()));
  std::sort(hosts.begin(), hosts.end());

  StabilityReport report;
  report.n_spanning2 = spanning2.size();
  for (auto label : spanning2)
    if (std::binary_search(hosts.begin(), hosts.end(), label)) ++report.n_stable;
  if (report.n_spanning2 > 0)
    report.fraction = static_cast<double>(report.n_stable) / static_cast<double>(report.n_spanning2);
  return report;
}

ASetMembership a_set_membership(const MarkedConfiguration& config, const Point& z, double r, std::size_t n,
                                double lambda, double lambda_star, const SpanningRegion& region) {
  const Space& space = config.space;
  validate_point(space, z);
  if (!(r >= 0.0)) throw InvalidArgument("a-sets: r must be >= 0");
  if (n < 1) throw InvalidArgument("a-sets: n must be >= 1");
  if (!(lambda >= 0.0) || lambda > lambda_star) throw InvalidArgument("a-sets: need 0 <= lambda <= lambda_star");
  validate_region(space, region);

  const IntersectionGraph graph = build_intersection_graph(restrict_to(config, lambda_star));
  const ClusterLabeling labeling = label_clusters(graph);
  const auto spanning = spanning_labels(graph, labeling, region);
  if (spanning.empty())
    throw UndefinedGiant("a-sets: no spanning cluster at lambda_star = " + format_double(lambda_star) +
                         "; raise lambda_star or the window");
  std::size_t giant = spanning.front();
  for (auto label : spanning)
    if (labeling.cluster(label).members.size() > labeling.cluster(giant).members.size()) giant = label;

  const double br = space.ball_radius();
  const SpaceKind kind = space.kind();
  ASetMembership result;

  for (std::size_t i = 0; i < graph.size() && !result.in_a1; ++i)
    if (labeling.label[i] == giant && detail::distance_unchecked(kind, z, graph.location(i)) <= r + br)
      result.in_a1 = true;

  // A2: probe points of S(z, r + 1/2) covered by the giant cluster.
  const double probe_radius = r + 0.5;
  std::vector<std::vector<std::size_t>> probe_balls;
  for (const auto& probe : covering_net(space, z, probe_radius, kASetProbeSpacing * br)) {
    if (detail::distance_unchecked(kind, z, probe) > probe_radius) continue;
    auto balls = graph.balls_covering(probe);
    if (!balls.empty() && labeling.label[balls.front()] == giant) probe_balls.push_back(std::move(balls));
  }
  result.in_a2 = true;
  constexpr std::size_t kUnseen = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> hops(graph.size(), kUnseen);
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < probe_balls.size() && result.in_a2; ++s) {
    std::fill(hops.begin(), hops.end(), kUnseen);
    queue.clear();
    for (auto b : probe_balls[s]) {
      hops[b] = 0;
      queue.push_back(b);
    }
    // Chemical distance is hops + 1; anything at hops >= n - 1 already fails.
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      if (hops[u] + 2 >= n) continue;
      for (auto v : graph.neighbors(u))
        if (hops[v] == kUnseen) {
          hops[v] = hops[u] + 1;
          queue.push_back(v);
        }
    }
    for (std::size_t t = 0; t < probe_balls.size(); ++t) {
      std::size_t best = kUnseen;
      for (auto b : probe_balls[t]) best = std::min(best, hops[b]);
      if (best == kUnseen || best + 1 >= n) {
        result.in_a2 = false;
        break;
      }
    }
  }

  result.in_a3 = true;
  const double reach = r + 2.0 * static_cast<double>(n);
  for (std::size_t i = 0; i < config.size(); ++i) {
    const double mark = config.marks(static_cast<Eigen::Index>(i));
    if (mark > lambda && mark <= lambda_star && detail::distance_unchecked(kind, z, config.locations.col(static_cast<Eigen::Index>(i))) <= reach) {
      result.in_a3 = false;
      break;
    }
  }
  return result;
}

// --- estimators -----------------------------------------------------------------

ProbabilityEstimate crossing_probability(const Space& space, const Window& window, double lambda,
                                         const SpanningRegion& region, std::size_t trials, std::uint64_t seed,
                                         unsigned threads) {
  validate_region(space, region);
  require_window_fits(space, window, region);
  if (!(lambda >= 0.0)) throw InvalidArgument("crossing_probability: lambda must be >= 0");
  if (trials < 1) throw InvalidArgument("crossing_probability: trials must be >= 1");
  if (lambda == 0.0) return ProbabilityEstimate::from_counts(0, trials);
  std::vector<char> hit(trials, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    const auto config = sample_configuration(space, window, lambda, trial_seed(seed, Experiment::Crossing, t));
    hit[t] = spanning_cluster_count(config, lambda, region) > 0;
  });
  return ProbabilityEstimate::from_counts(static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1)), trials);
}

ProbabilityEstimate crossing_probability(const Space& space, double lambda, const SpanningRegion& region,
                                         std::size_t trials, std::uint64_t seed, unsigned threads) {
  return crossing_probability(space, inflated_window(space, region), lambda, region, trials, seed, threads);
}

std::vector<std::optional<double>> crossing_levels(const SweepPlan& plan, const SpanningRegion& region) {
  plan.validate();
  validate_region(plan.space, region);
  require_window_fits(plan.space, plan.window, region);
  std::vector<std::optional<double>> levels(plan.trials);
  if (plan.lambda_max() == 0.0) return levels;
  parallel_for(plan.trials, plan.threads, [&](std::size_t t) {
    const auto config = sample_configuration(plan.space, plan.window, plan.lambda_max(),
                                             trial_seed(plan.seed, Experiment::Crossing, t));
    LevelSweep sweep(config, flags_for(config, region), {spanning_mask(plan.space)});
    sweep.advance_to_end();
    levels[t] = sweep.first_level(0);
  });
  return levels;
}

namespace {

std::size_t count_at_or_below(const std::vector<std::optional<double>>& levels, double lambda) {
  return static_cast<std::size_t>(
      std::count_if(levels.begin(), levels.end(), [&](const auto& l) { return l && *l <= lambda; }));
}

// Crossing probability at one level from fresh configurations.
ProbabilityEstimate independent_crossing(const SweepPlan& plan, const SpanningRegion& region, double lambda,
                                         std::size_t level_index) {
  if (lambda == 0.0) return ProbabilityEstimate::from_counts(0, plan.trials);
  std::vector<char> hit(plan.trials, 0);
  parallel_for(plan.trials, plan.threads, [&](std::size_t t) {
    const auto config = sample_configuration(plan.space, plan.window, lambda,
                                             trial_seed(plan.seed, Experiment::Crossing, t, level_index));
    hit[t] = spanning_cluster_count(config, lambda, region) > 0;
  });
  return ProbabilityEstimate::from_counts(static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1)),
                                          plan.trials);
}

}  // namespace

EstimatorReport crossing_sweep(const SweepPlan& plan, const SpanningRegion& region) {
  plan.validate();
  validate_region(plan.space, region);
  require_window_fits(plan.space, plan.window, region);
  EstimatorReport report;
  describe(report, plan);
  if (plan.common_random_numbers) {
    const auto levels = crossing_levels(plan, region);
    for (double lambda : plan.lambdas)
      report.add("crossing", lambda, region.r_inner, region.r_outer,
                 ProbabilityEstimate::from_counts(count_at_or_below(levels, lambda), plan.trials), plan.seed);
  } else {
    for (std::size_t i = 0; i < plan.lambdas.size(); ++i)
      report.add("crossing", plan.lambdas[i], region.r_inner, region.r_outer,
                 independent_crossing(plan, region, plan.lambdas[i], i + 1), plan.seed);
  }
  return report;
}

LambdaInterval lambda_c_estimate(const SweepPlan& plan, const SpanningRegion& region, double threshold,
                                 double resolution) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("lambda_c: threshold must lie in (0, 1)");
  LambdaInterval result;
  result.report = crossing_sweep(plan, region);
  const auto& grid = plan.lambdas;
  if (resolution <= 0.0) resolution = 0.1 * smallest_step(grid);

  std::vector<std::optional<double>> levels;
  if (plan.common_random_numbers) levels = crossing_levels(plan, region);
  std::size_t evaluations = 0;
  auto probability = [&](double lambda) {
    if (plan.common_random_numbers)
      return ProbabilityEstimate::from_counts(count_at_or_below(levels, lambda), plan.trials);
    return independent_crossing(plan, region, lambda, grid.size() + 1 + evaluations++);
  };

  const auto rows = result.report.rows_for("crossing");
  std::optional<std::size_t> hi_index;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].estimate > threshold) {
      hi_index = i;
      break;
    }
  std::optional<std::size_t> lo_index;
  if (hi_index)
    for (std::size_t i = *hi_index; i-- > 0;)
      if (rows[i].estimate < threshold) {
        lo_index = i;
        break;
      }
  if (!hi_index || !lo_index)
    throw BracketingFailure("lambda_c: crossing probability does not cross " + format_double(threshold) +
                                " on the lambda grid",
                            result.report.to_csv());

  double lo = grid[*lo_index];
  double hi = grid[*hi_index];
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    const auto p = probability(mid);
    result.report.add("crossing_bisect", mid, region.r_inner, region.r_outer, p, plan.seed);
    if (p.estimate < threshold) {
      lo = mid;
    } else if (p.estimate > threshold) {
      hi = mid;
    } else {
      lo = hi = mid;
    }
  }
  result.lo = lo;
  result.hi = hi;
  result.report.rows.push_back(
      {"lambda_c", 0.5 * (lo + hi), lo, hi, threshold, 0.5 * (hi - lo), plan.trials, plan.seed});
  return result;
}

Window big_ball_window(const Space& space, double radius, double max_separation) {
  const double pad = 2.0 * space.ball_radius();
  if (space.kind() == SpaceKind::H2xR) return CylinderWindow{max_separation + radius + pad, radius + pad};
  return BallWindow{space.origin(), max_separation + radius + pad};
}

namespace {

void validate_big_balls(double radius, const std::vector<double>& separations) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("bb: R must be positive and finite");
  if (separations.empty()) throw InvalidArgument("bb: at least one separation required");
  if (separations.size() > 7) throw InvalidArgument("bb: at most 7 separations per sweep");
  for (double s : separations)
    if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("bb: separations must be finite and >= 0");
}

void require_big_balls_fit(const Space& space, const Window& window, double radius,
                           const std::vector<double>& separations) {
  validate_window(space, window);
  const double pad = 2.0 * space.ball_radius();
  const double far = *std::max_element(separations.begin(), separations.end());
  for (double s : {0.0, far}) {
    // Every ball meeting S(y, R) must have its centre inside the window.
    const Point y = point_along_axis(space, s);
    const double need = radius + pad;
    if (const auto* ball = std::get_if<BallWindow>(&window)) {
      if (distance(space, ball->center, y) + need > ball->radius + 1e-9)
        throw InvalidArgument("bb: window too small for separation " + format_double(s) + " and R " +
                              format_double(radius));
    } else {
      const auto& c = std::get<CylinderWindow>(window);
      if (s + need > c.h2_radius + 1e-9 || need > c.height_half + 1e-9)
        throw InvalidArgument("bb: cylinder too small for separation " + format_double(s) + " and R " +
                              format_double(radius));
    }
  }
}

std::vector<bool> big_ball_events(const MarkedConfiguration& config, double lambda, double radius,
                                  const std::vector<double>& separations) {
  const Space& space = config.space;
  const IntersectionGraph graph = build_intersection_graph(restrict_to(config, lambda));
  const ClusterLabeling labeling = label_clusters(graph);
  const Window a = BallWindow{space.origin(), radius};
  std::vector<bool> events;
  for (double s : separations) events.push_back(connects(graph, labeling, a, BallWindow{point_along_axis(space, s), radius}));
  return events;
}

}  // namespace

ProbabilityEstimate bb_connection_probability(const Space& space, double lambda, double radius, double separation,
                                              std::size_t trials, std::uint64_t seed, unsigned threads) {
  validate_big_balls(radius, {separation});
  if (!(lambda >= 0.0)) throw InvalidArgument("bb: lambda must be >= 0");
  if (trials < 1) throw InvalidArgument("bb: trials must be >= 1");
  const Window window = big_ball_window(space, radius, separation);
  if (lambda * window_volume(space, window) > 1e8)
    throw InvalidArgument("bb: separation and R give a window too large to sample");
  if (lambda == 0.0) return ProbabilityEstimate::from_counts(0, trials);
  std::vector<char> hit(trials, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    const auto config = sample_configuration(space, window, lambda, trial_seed(seed, Experiment::BigBall, t));
    hit[t] = big_ball_events(config, lambda, radius, {separation}).front();
  });
  return ProbabilityEstimate::from_counts(static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1)), trials);
}

EstimatorReport bb_sweep(const SweepPlan& plan, double radius, const std::vector<double>& separations) {
  plan.validate();
  validate_big_balls(radius, separations);
  require_big_balls_fit(plan.space, plan.window, radius, separations);
  const auto& grid = plan.lambdas;
  const std::size_t m = separations.size();
  // hit[t][i * m + k]
  std::vector<std::vector<char>> hit(plan.trials, std::vector<char>(grid.size() * m, 0));

  if (plan.common_random_numbers) {
    if (plan.lambda_max() > 0.0) {
      const Space& space = plan.space;
      const double reach = radius + space.ball_radius();
      std::vector<Point> targets;
      for (double s : separations) targets.push_back(point_along_axis(space, s));
      std::vector<std::uint8_t> masks;
      for (std::size_t k = 0; k < m; ++k) masks.push_back(static_cast<std::uint8_t>(1u | (1u << (k + 1))));
      parallel_for(plan.trials, plan.threads, [&](std::size_t t) {
        const auto config = sample_configuration(space, plan.window, plan.lambda_max(),
                                                 trial_seed(plan.seed, Experiment::BigBall, t));
        std::vector<std::uint8_t> flags(config.size(), 0);
        const Point o = space.origin();
        for (std::size_t p = 0; p < config.size(); ++p) {
          const Point c = config.location(p);
          if (distance(space, o, c) <= reach) flags[p] |= 1u;
          for (std::size_t k = 0; k < m; ++k)
            if (distance(space, targets[k], c) <= reach) flags[p] |= static_cast<std::uint8_t>(1u << (k + 1));
        }
        LevelSweep sweep(config, std::move(flags), masks);
        sweep.advance_to_end();
        for (std::size_t k = 0; k < m; ++k) {
          const auto level = sweep.first_level(k);
          for (std::size_t i = 0; i < grid.size(); ++i) hit[t][i * m + k] = level && *level <= grid[i];
        }
      });
    }
  } else {
    parallel_for(plan.trials * grid.size(), plan.threads, [&](std::size_t job) {
      const std::size_t t = job / grid.size();
      const std::size_t i = job % grid.size();
      if (grid[i] == 0.0) return;
      const auto config = sample_configuration(plan.space, plan.window, grid[i],
                                               trial_seed(plan.seed, Experiment::BigBall, t, i + 1));
      const auto events = big_ball_events(config, grid[i], radius, separations);
      for (std::size_t k = 0; k < m; ++k) hit[t][i * m + k] = events[k];
    });
  }

  EstimatorReport report;
  describe(report, plan);
  report.metadata.set("bb.radius", format_double(radius));
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t successes = 0;
      for (std::size_t t = 0; t < plan.trials; ++t) successes += hit[t][i * m + k] ? 1 : 0;
      report.add("bb", grid[i], radius, separations[k], ProbabilityEstimate::from_counts(successes, plan.trials),
                 plan.seed);
    }
  return report;
}

ThresholdResult lambda_bb_estimate(const SweepPlan& plan, double radius, const std::vector<double>& separations,
                                   double target) {
  if (!(target >= 0.0 && target <= 1.0)) throw InvalidArgument("lambda_bb: target must lie in [0, 1]");
  const EstimatorReport report = bb_sweep(plan, radius, separations);
  const double far = *std::max_element(separations.begin(), separations.end());
  return first_reaching(report, "bb", plan.lambdas, target, "lambda_bb", radius, far, plan.trials, plan.seed);
}

EstimatorReport unique_spanning_sweep(const SweepPlan& plan, const SpanningRegion& region) {
  const auto counts = spanning_counts(plan, region);
  EstimatorReport report;
  describe(report, plan);
  for (std::size_t i = 0; i < plan.lambdas.size(); ++i) {
    std::size_t unique = 0;
    for (const auto& row : counts) unique += row[i] == 1 ? 1 : 0;
    report.add("unique_spanning", plan.lambdas[i], region.r_inner, region.r_outer,
               ProbabilityEstimate::from_counts(unique, plan.trials), plan.seed);
  }
  return report;
}

ThresholdResult lambda_u_proxy(const SweepPlan& plan, const SpanningRegion& region, double target) {
  if (!(target >= 0.0 && target <= 1.0)) throw InvalidArgument("lambda_u: target must lie in [0, 1]");
  return first_reaching(unique_spanning_sweep(plan, region), "unique_spanning", plan.lambdas, target,
                        "lambda_u_proxy", region.r_inner, region.r_outer, plan.trials, plan.seed);
}

EstimatorReport multiplicity_histogram(const SweepPlan& plan, const SpanningRegion& region) {
  const auto counts = spanning_counts(plan, region);
  std::size_t largest = 0;
  for (const auto& row : counts)
    for (auto c : row) largest = std::max(largest, c);
  EstimatorReport report;
  describe(report, plan);
  report.metadata.set("region.r_inner", format_double(region.r_inner));
  report.metadata.set("region.r_outer", format_double(region.r_outer));
  for (std::size_t i = 0; i < plan.lambdas.size(); ++i)
    for (std::size_t k = 0; k <= largest; ++k) {
      std::size_t hits = 0;
      for (const auto& row : counts) hits += row[i] == k ? 1 : 0;
      report.add("multiplicity", plan.lambdas[i], static_cast<double>(k), region.r_outer,
                 ProbabilityEstimate::from_counts(hits, plan.trials), plan.seed);
    }
  return report;
}

EstimatorReport stability_experiment(const Space& space, const Window& window, double lambda1, double lambda2,
                                     const SpanningRegion& region, std::size_t trials, std::uint64_t seed,
                                     unsigned threads) {
  validate_region(space, region);
  require_window_fits(space, window, region);
  if (!(lambda1 > 0.0) || lambda1 > lambda2) throw InvalidArgument("stability: need 0 < lambda1 <= lambda2");
  if (trials < 1) throw InvalidArgument("stability: trials must be >= 1");
  std::vector<StabilityReport> results(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    const auto config = sample_configuration(space, window, lambda2, trial_seed(seed, Experiment::Stability, t));
    results[t] = stability_check(config, lambda1, lambda2, region);
  });
  std::size_t spanning = 0;
  std::size_t stable = 0;
  for (const auto& r : results) {
    spanning += r.n_spanning2;
    stable += r.n_stable;
  }
  EstimatorReport report;
  describe(report, space, window);
  report.metadata.set("seed", std::to_string(seed));
  report.metadata.set("configurations", std::to_string(trials));
  auto pooled = ProbabilityEstimate::from_counts(stable, spanning);
  if (spanning == 0) pooled.estimate = 1.0;
  report.add("stability", lambda2, lambda1, region.r_outer, pooled, seed);
  return report;
}

EstimatorReport a_set_experiment(const Space& space, const Window& window, double r, std::size_t n, double lambda,
                                 double lambda_star, const SpanningRegion& region, std::size_t trials,
                                 std::uint64_t seed, unsigned threads) {
  validate_region(space, region);
  require_window_fits(space, window, region);
  if (!(lambda_star > 0.0)) throw InvalidArgument("a-sets: lambda_star must be positive");
  if (trials < 1) throw InvalidArgument("a-sets: trials must be >= 1");
  std::vector<ASetMembership> results(trials);
  const Point z = window_center(space, window);
  parallel_for(trials, threads, [&](std::size_t t) {
    const auto config = sample_configuration(space, window, lambda_star, trial_seed(seed, Experiment::ASets, t));
    try {
      results[t] = a_set_membership(config, z, r, n, lambda, lambda_star, region);
    } catch (const UndefinedGiant& e) {
      throw UndefinedGiant(std::string(e.what()) + " (trial " + std::to_string(t) + ")");
    }
  });
  std::size_t a1 = 0, a2 = 0, a3 = 0;
  for (const auto& m : results) {
    a1 += m.in_a1;
    a2 += m.in_a2;
    a3 += m.in_a3;
  }
  EstimatorReport report;
  describe(report, space, window);
  report.metadata.set("seed", std::to_string(seed));
  report.metadata.set("lambda_star", format_double(lambda_star));
  const double nn = static_cast<double>(n);
  report.add("a1", lambda, r, nn, ProbabilityEstimate::from_counts(a1, trials), seed);
  report.add("a2", lambda, r, nn, ProbabilityEstimate::from_counts(a2, trials), seed);
  report.add("a3", lambda, r, nn, ProbabilityEstimate::from_counts(a3, trials), seed);
  return report;
}

double CoveredBallStats::frequency() const {
  const std::size_t large = covered + large_exhausted;
  return large ? static_cast<double>(covered) / static_cast<double>(large) : 0.0;
}

CoveredBallStats covered_ball_experiment(const Space& space, double lambda, double window_radius, double radius,
                                         double resolution, std::size_t trials, std::uint64_t seed,
                                         unsigned threads) {
  if (space.kind() == SpaceKind::H2xR) throw UnsupportedOperation("covered-ball experiment needs a ball window");
  if (!(lambda > 0.0)) throw InvalidArgument("covered-ball experiment: lambda must be positive");
  const Window window = BallWindow{space.origin(), window_radius};
  validate_window(space, window);
  const double edge = window_radius - 2.0 * space.ball_radius();
  std::vector<int> outcome(trials, 0);  // 1 covered, 2 large exhausted
  parallel_for(trials, threads, [&](std::size_t t) {
    const auto config = sample_configuration(space, window, lambda, trial_seed(seed, Experiment::Growth, t));
    const auto trace = grow_component(config, lambda, space.origin(), StopRule::covered_ball(radius, resolution));
    if (trace.stop_reason == StopReason::CoveredBallFound)
      outcome[t] = 1;
    else if (!trace.steps.empty() && trace.max_center_distance >= edge)
      outcome[t] = 2;
  });
  CoveredBallStats stats;
  stats.trials = trials;
  for (int o : outcome) {
    stats.covered += o == 1;
    stats.large_exhausted += o == 2;
  }
  return stats;
}

}  // namespace boolperc
