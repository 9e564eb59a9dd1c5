#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "boolperc/point_process.hpp"
#include "support.hpp"

using namespace boolperc;

TEST_CASE("poisson count has mean lambda * area") {
  const Space e2 = Space::euclidean(2);
  const Window w = BallWindow{Point::Zero(2), 5.0};
  double total = 0.0;
  const int seeds = 2000;
  for (int s = 0; s < seeds; ++s) total += static_cast<double>(sample_configuration(e2, w, 1.0, s).size());
  const double expected = 25.0 * std::numbers::pi;
  CHECK(std::abs(total / seeds - expected) <= 3.0 * std::sqrt(expected / seeds));
}

TEST_CASE("sampling is deterministic and marks are uniform") {
  for (const auto& sc : testsupport::small_scenarios()) {
    const auto a = sample_configuration(sc.space, sc.window, sc.lambda_max, 77);
    const auto b = sample_configuration(sc.space, sc.window, sc.lambda_max, 77);
    REQUIRE(a.size() == b.size());
    CHECK(a.locations == b.locations);
    CHECK(a.marks == b.marks);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(window_contains(sc.space, sc.window, a.location(i)));
      CHECK(a.marks(static_cast<Eigen::Index>(i)) >= 0.0);
      CHECK(a.marks(static_cast<Eigen::Index>(i)) <= sc.lambda_max);
    }
  }
}

TEST_CASE("restriction matches a direct mark scan and is nested") {
  for (const auto& sc : testsupport::small_scenarios()) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto c = sample_configuration(sc.space, sc.window, sc.lambda_max, seed);
      std::vector<std::size_t> previous;
      for (double f : {0.2, 0.5, 0.9}) {
        const auto active = restrict_to(c, f * sc.lambda_max);
        REQUIRE(active.ids() == testsupport::ids_at(c, f * sc.lambda_max));
        REQUIRE(std::includes(active.ids().begin(), active.ids().end(), previous.begin(), previous.end()));
        previous = active.ids();
      }
      CHECK(restrict_to(c, sc.lambda_max).size() == c.size());
    }
  }
}

TEST_CASE("thinned intensity") {
  const Space e2 = Space::euclidean(2);
  const Window w = BallWindow{Point::Zero(2), 5.0};
  double total = 0.0;
  for (int s = 0; s < 1000; ++s) total += static_cast<double>(restrict_to(sample_configuration(e2, w, 2.0, s), 0.5).size());
  const double expected = 0.5 * 25.0 * std::numbers::pi;
  CHECK(std::abs(total / 1000 - expected) <= 4.0 * std::sqrt(expected / 1000));
}

TEST_CASE("argument checks") {
  const Space e2 = Space::euclidean(2);
  const Window w = BallWindow{Point::Zero(2), 2.0};
  CHECK_THROWS_AS(sample_configuration(e2, w, 0.0, 1), InvalidArgument);
  CHECK_THROWS_AS(sample_configuration(e2, BallWindow{Point::Zero(2), 1e5}, 1.0, 1), ResourceLimit);
  const auto c = sample_configuration(e2, w, 1.0, 1);
  CHECK_THROWS_AS(restrict_to(c, 1.5), InvalidArgument);
  CHECK_THROWS_AS(restrict_to(c, -0.1), InvalidArgument);
  const Space hr = Space::hyperbolic_plane_times_line();
  CHECK_THROWS_AS(sample_configuration(hr, BallWindow{hr.origin(), 1.0}, 1.0, 1), UnsupportedOperation);
}

TEST_CASE("configuration round trip through CSV and sidecar") {
  for (const auto& sc : testsupport::small_scenarios()) {
    const auto c = sample_configuration(sc.space, sc.window, sc.lambda_max, 5);
    std::stringstream csv, meta;
    write_configuration_csv(csv, c);
    write_configuration_metadata(meta, c);
    const auto d = read_configuration(csv, meta);
    CHECK(d.space == c.space);
    CHECK(d.seed == c.seed);
    CHECK(d.lambda_max == c.lambda_max);
    CHECK(d.locations == c.locations);
    CHECK(d.marks == c.marks);
    std::stringstream csv2;
    write_configuration_csv(csv2, d);
    std::stringstream csv1;
    write_configuration_csv(csv1, c);
    CHECK(csv1.str() == csv2.str());
  }
}

TEST_CASE("extra points are active everywhere") {
  const Space e2 = Space::euclidean(2);
  const auto c = sample_configuration(e2, BallWindow{Point::Zero(2), 3.0}, 1.0, 4);
  const auto d = with_extra_points(c, {Point::Zero(2)});
  CHECK(d.size() == c.size() + 1);
  CHECK(restrict_to(d, 0.0).size() >= 1);
}
