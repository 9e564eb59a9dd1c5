#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>

#include "boolperc/estimators.hpp"
#include "boolperc/random.hpp"
#include "support.hpp"

using namespace boolperc;

namespace {

SweepPlan e2_plan(std::vector<double> grid, std::size_t trials, std::uint64_t seed, const SpanningRegion& region) {
  SweepPlan plan;
  plan.space = Space::euclidean(2);
  plan.window = inflated_window(plan.space, region);
  plan.lambdas = std::move(grid);
  plan.trials = trials;
  plan.seed = seed;
  return plan;
}

// Spanning clusters by brute closure and direct region tests.
std::size_t brute_spanning(const MarkedConfiguration& c, double lambda, const SpanningRegion& r) {
  const auto ids = testsupport::ids_at(c, lambda);
  const auto reach = testsupport::closure(testsupport::brute_adjacency(c, ids));
  const double br = c.space.ball_radius();
  std::size_t n = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    bool root = true, inner = false, outer = false;
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (!reach[i][j]) continue;
      if (j < i) root = false;
      const double d = distance(c.space, c.space.origin(), c.location(ids[j]));
      inner = inner || d <= r.r_inner + br;
      outer = outer || d + br >= r.r_outer;
    }
    n += root && inner && outer;
  }
  return n;
}

}  // namespace

TEST_CASE("wilson interval endpoints solve the score equation") {
  const double z = kWilsonZ95;
  for (auto [s, n] : std::vector<std::pair<std::size_t, std::size_t>>{{0, 10}, {3, 10}, {10, 10}, {500, 1000}, {1, 7}}) {
    const double p = double(s) / double(n);
    const double center = (p + z * z / (2.0 * n)) / (1.0 + z * z / n);
    const double hw = wilson_half_width(s, n);
    for (double e : {center - hw, center + hw})
      CHECK((p - e) * (p - e) == doctest::Approx(z * z * e * (1.0 - e) / n).epsilon(1e-9));
  }
  CHECK(wilson_half_width(50, 100) > wilson_half_width(500, 1000));
}

TEST_CASE("spanning count matches brute force") {
  const SpanningRegion region{1.0, 4.0};
  const Space e2 = Space::euclidean(2);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto c = sample_configuration(e2, inflated_window(e2, region), 0.6, seed);
    for (double l : {0.0, 0.2, 0.4, 0.6}) REQUIRE(spanning_cluster_count(c, l, region) == brute_spanning(c, l, region));
  }
  const auto dense = sample_configuration(e2, inflated_window(e2, region), 5.0, 1);
  CHECK(spanning_cluster_count(dense, 5.0, region) == 1);
  CHECK_THROWS_AS(validate_region(e2, SpanningRegion{3.0, 2.0}), InvalidArgument);
}

TEST_CASE("crossing probability basics") {
  const SpanningRegion region{1.0, 6.0};
  const Space e2 = Space::euclidean(2);
  const auto zero = crossing_probability(e2, 0.0, region, 50, 1);
  CHECK(zero.estimate == 0.0);
  CHECK(zero.trials == 50);
  CHECK(crossing_probability(e2, 2.0, region, 50, 1).estimate == 1.0);
  CHECK_THROWS_AS(crossing_probability(e2, BallWindow{Point::Zero(2), 5.0}, 0.5, region, 10, 1), InvalidArgument);
}

TEST_CASE("common-random-number sweeps are monotone and match labelings") {
  const SpanningRegion region{1.0, 6.0};
  auto plan = e2_plan({0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, 80, 5, region);
  const auto report = crossing_sweep(plan, region);
  const auto rows = report.rows_for("crossing");
  REQUIRE(rows.size() == plan.lambdas.size());
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].estimate >= rows[i - 1].estimate);
  // Same configurations through the labeling route.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::size_t hits = 0;
    for (std::size_t t = 0; t < plan.trials; ++t) {
      const auto c = sample_configuration(plan.space, plan.window, plan.lambda_max(),
                                          trial_seed(plan.seed, Experiment::Crossing, t));
      hits += spanning_cluster_count(c, plan.lambdas[i], region) > 0;
    }
    CHECK(rows[i].estimate == doctest::Approx(double(hits) / double(plan.trials)));
  }
  plan.common_random_numbers = false;
  const auto independent = crossing_sweep(plan, region);
  for (const auto& row : independent.rows) {
    CHECK(row.estimate >= 0.0);
    CHECK(row.estimate <= 1.0);
  }
}

TEST_CASE("sweeps are deterministic and thread-count independent") {
  const SpanningRegion region{1.0, 6.0};
  auto plan = e2_plan({0.2, 0.4, 0.6}, 40, 9, region);
  plan.threads = 1;
  const std::string a = crossing_sweep(plan, region).to_csv();
  plan.threads = 3;
  CHECK(crossing_sweep(plan, region).to_csv() == a);
  plan.common_random_numbers = false;
  const std::string b = crossing_sweep(plan, region).to_csv();
  plan.threads = 1;
  CHECK(crossing_sweep(plan, region).to_csv() == b);
}

TEST_CASE("sweep plan validation") {
  const SpanningRegion region{1.0, 6.0};
  auto plan = e2_plan({0.3, 0.2}, 10, 1, region);
  CHECK_THROWS_AS(crossing_sweep(plan, region), InvalidArgument);
  plan.lambdas = {0.2};
  plan.trials = 0;
  CHECK_THROWS_AS(crossing_sweep(plan, region), InvalidArgument);
}

TEST_CASE("lambda_c brackets or reports the table") {
  const SpanningRegion region{1.0, 6.0};
  auto plan = e2_plan({0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, 100, 2, region);
  const auto interval = lambda_c_estimate(plan, region);
  CHECK(interval.lo < interval.hi);
  CHECK(interval.hi - interval.lo <= 0.01 + 1e-12);
  const auto levels = crossing_levels(plan, region);
  auto p = [&](double l) {
    double k = 0;
    for (const auto& v : levels) k += v && *v <= l;
    return k / double(levels.size());
  };
  CHECK(p(interval.lo) < 0.5);
  CHECK(p(interval.hi) > 0.5);
  CHECK(interval.report.rows_for("lambda_c").size() == 1);

  plan.lambdas = {0.01, 0.02};
  try {
    lambda_c_estimate(plan, region);
    FAIL("expected a bracketing failure");
  } catch (const BracketingFailure& e) {
    CHECK(e.table().find("experiment,space,lambda") == 0);
  }
}

TEST_CASE("big-ball connection") {
  const Space e2 = Space::euclidean(2);
  CHECK(bb_connection_probability(e2, 0.0, 2.0, 6.0, 20, 1).estimate == 0.0);
  CHECK(bb_connection_probability(e2, 3.0, 2.0, 3.0, 20, 1).estimate == 1.0);

  // A one-level CRN sweep samples the very same configurations.
  SweepPlan plan;
  plan.space = e2;
  plan.window = big_ball_window(e2, 2.0, 6.0);
  plan.lambdas = {0.5};
  plan.trials = 60;
  plan.seed = 4;
  const auto sweep = bb_sweep(plan, 2.0, {6.0});
  CHECK(sweep.rows.front().estimate == bb_connection_probability(e2, 0.5, 2.0, 6.0, 60, 4).estimate);

  plan.lambdas = {0.2, 0.3, 0.4, 0.5, 0.6};
  const auto multi = bb_sweep(plan, 2.0, {0.0, 3.0, 6.0});
  std::map<double, std::vector<double>> by_sep;
  for (const auto& row : multi.rows) by_sep[row.param2].push_back(row.estimate);
  for (const auto& [sep, est] : by_sep)
    for (std::size_t i = 1; i < est.size(); ++i) CHECK(est[i] >= est[i - 1]);
  // Nested targets: a farther ball is never easier to reach here.
  for (std::size_t i = 0; i < plan.lambdas.size(); ++i) CHECK(by_sep[0.0][i] >= by_sep[6.0][i] - 0.2);

  const auto first = lambda_bb_estimate(plan, 2.0, {3.0, 6.0}, 0.0);
  REQUIRE(first.lambda.has_value());
  CHECK(*first.lambda == plan.lambdas.front());
  const auto never = lambda_bb_estimate(plan, 2.0, {3.0, 6.0}, 1.0 + 0.0);
  if (!never.lambda) CHECK(std::isnan(never.report.rows.back().lambda));
  plan.window = BallWindow{Point::Zero(2), 5.0};
  CHECK_THROWS_AS(bb_sweep(plan, 2.0, {6.0}), InvalidArgument);
}

TEST_CASE("uniqueness and multiplicity") {
  const SpanningRegion region{1.0, 5.0};
  auto plan = e2_plan({0.1, 0.3, 0.6, 1.2}, 60, 6, region);
  const auto unique = unique_spanning_sweep(plan, region);
  CHECK(unique.rows.back().estimate == 1.0);
  const auto hist = multiplicity_histogram(plan, region);
  std::map<double, double> totals;
  for (const auto& row : hist.rows) totals[row.lambda] += row.estimate;
  for (const auto& [l, total] : totals) CHECK(total == doctest::Approx(1.0));
  for (const auto& row : hist.rows)
    if (row.param1 == 1.0) {
      const auto match = std::find_if(unique.rows.begin(), unique.rows.end(),
                                      [&](const ReportRow& u) { return u.lambda == row.lambda; });
      CHECK(match->estimate == row.estimate);
    }
  const auto proxy = lambda_u_proxy(plan, region, 0.99);
  REQUIRE(proxy.lambda.has_value());
}

TEST_CASE("h2xr multiplicity in cylinders") {
  const Space hr = Space::hyperbolic_plane_times_line();
  const SpanningRegion region{1.0, 2.0};
  SweepPlan plan;
  plan.space = hr;
  plan.window = CylinderWindow{3.0, 4.0};
  plan.lambdas = {0.2, 0.5};
  plan.trials = 10;
  plan.seed = 1;
  const auto hist = multiplicity_histogram(plan, region);
  CHECK(!hist.rows.empty());
  CHECK(hist.to_csv() == multiplicity_histogram(plan, region).to_csv());
}

TEST_CASE("stability check") {
  const SpanningRegion region{1.0, 6.0};
  const Space e2 = Space::euclidean(2);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto c = sample_configuration(e2, inflated_window(e2, region), 0.9, seed);
    const auto same = stability_check(c, 0.9, 0.9, region);
    if (same.n_spanning2 > 0) CHECK(same.fraction == 1.0);
    const auto report = stability_check(c, 0.6, 0.9, region);
    CHECK(report.n_stable <= report.n_spanning2);
    CHECK(report.n_spanning2 == brute_spanning(c, 0.9, region));
  }
  const auto pooled = stability_experiment(e2, inflated_window(e2, region), 0.6, 0.9, region, 20, 3);
  CHECK(pooled.rows.size() == 1);
  CHECK_THROWS_AS(stability_experiment(e2, inflated_window(e2, region), 0.9, 0.6, region, 20, 3), InvalidArgument);
}

TEST_CASE("A-set membership against brute force") {
  const SpanningRegion region{1.0, 5.0};
  const Space e2 = Space::euclidean(2);
  const double lambda_star = 1.0;
  RandomStream rng(12);
  std::size_t evaluated = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto c = sample_configuration(e2, inflated_window(e2, region), lambda_star, seed);
    const double lambda = rng.uniform(0.3, 1.0);
    const double r = rng.uniform(0.0, 2.0);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 8.0);
    Point z = sample_uniform_in_window(e2, BallWindow{Point::Zero(2), 2.0}, rng);

    const auto ids = testsupport::ids_at(c, lambda_star);
    const auto adj = testsupport::brute_adjacency(c, ids);
    const auto reach = testsupport::closure(adj);
    // Giant: largest spanning component, ties to the smallest id.
    std::optional<std::size_t> giant_root;
    std::size_t giant_size = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      bool root = true, inner = false, outer = false;
      std::size_t size = 0;
      for (std::size_t j = 0; j < ids.size(); ++j) {
        if (!reach[i][j]) continue;
        root = root && j >= i;
        ++size;
        const double d = c.location(ids[j]).norm();
        inner = inner || d <= region.r_inner + 1.0;
        outer = outer || d + 1.0 >= region.r_outer;
      }
      if (root && inner && outer && size > giant_size) {
        giant_root = i;
        giant_size = size;
      }
    }
    if (!giant_root) {
      CHECK_THROWS_AS(a_set_membership(c, z, r, n, lambda, lambda_star, region), UndefinedGiant);
      continue;
    }
    const auto got = a_set_membership(c, z, r, n, lambda, lambda_star, region);
    ++evaluated;

    bool a3 = true;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double m = c.marks(static_cast<Eigen::Index>(i));
      if (m > lambda && m <= lambda_star && (c.location(i) - z).norm() <= r + 2.0 * double(n)) a3 = false;
    }
    REQUIRE(got.in_a3 == a3);

    bool a1 = false;
    for (std::size_t j = 0; j < ids.size(); ++j)
      if (reach[*giant_root][j] && (c.location(ids[j]) - z).norm() <= r + 1.0) a1 = true;
    REQUIRE(got.in_a1 == a1);

    // A2 through all-pairs hop counts.
    const std::size_t inf = std::numeric_limits<std::size_t>::max() / 4;
    std::vector<std::vector<std::size_t>> hops(ids.size(), std::vector<std::size_t>(ids.size(), inf));
    for (std::size_t i = 0; i < ids.size(); ++i) {
      hops[i][i] = 0;
      for (std::size_t j = 0; j < ids.size(); ++j)
        if (adj[i][j]) hops[i][j] = 1;
    }
    for (std::size_t k = 0; k < ids.size(); ++k)
      for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = 0; j < ids.size(); ++j) hops[i][j] = std::min(hops[i][j], hops[i][k] + hops[k][j]);
    std::vector<std::vector<std::size_t>> covers;
    for (const auto& probe : covering_net(e2, z, r + 0.5, kASetProbeSpacing)) {
      if ((probe - z).norm() > r + 0.5) continue;
      std::vector<std::size_t> cov;
      for (std::size_t j = 0; j < ids.size(); ++j)
        if (reach[*giant_root][j] && (c.location(ids[j]) - probe).norm() <= 1.0) cov.push_back(j);
      if (!cov.empty()) covers.push_back(cov);
    }
    std::size_t sup = 0;
    for (const auto& s : covers)
      for (const auto& t : covers) {
        std::size_t best = inf;
        for (auto a : s)
          for (auto b : t) best = std::min(best, hops[a][b] + 1);
        sup = std::max(sup, best);
      }
    REQUIRE(got.in_a2 == (sup < n));
  }
  CHECK(evaluated >= 50);

  const auto c = sample_configuration(e2, inflated_window(e2, region), lambda_star, 1);
  CHECK(a_set_membership(c, Point::Zero(2), 1.0, 3, lambda_star, lambda_star, region).in_a3);
}

TEST_CASE("A-set experiment reports three rows") {
  const SpanningRegion region{1.0, 5.0};
  const Space e2 = Space::euclidean(2);
  const auto report = a_set_experiment(e2, inflated_window(e2, region), 1.0, 6, 0.8, 1.2, region, 20, 2);
  CHECK(report.rows.size() == 3);
  CHECK_THROWS_AS(a_set_experiment(e2, inflated_window(e2, region), 1.0, 6, 0.01, 0.02, region, 5, 2),
                  UndefinedGiant);
}

TEST_CASE("covered-ball growth experiment") {
  const auto stats = covered_ball_experiment(Space::euclidean(2), 1.0, 10.0, 2.0, 0.1, 20, 3);
  CHECK(stats.trials == 20);
  CHECK(stats.covered + stats.large_exhausted <= 20);
  CHECK(stats.frequency() >= 0.0);
  CHECK(stats.frequency() <= 1.0);
}
