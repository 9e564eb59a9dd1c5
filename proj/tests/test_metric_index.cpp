#include <doctest.h>

#include "boolperc/metric_index.hpp"
#include "boolperc/random.hpp"
#include "support.hpp"

using namespace boolperc;

TEST_CASE("vantage-point queries match a linear scan") {
  RandomStream rng(3);
  for (const auto& sc : testsupport::small_scenarios()) {
    for (std::size_t n : {0u, 1u, 7u, 9u, 300u}) {
      PointMatrix pts(sc.space.coordinate_count(), static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i)
        pts.col(static_cast<Eigen::Index>(i)) = sample_uniform_in_window(sc.space, sc.window, rng);
      const MetricIndex index = metric_index_build(sc.space, pts);
      CHECK(index.size() == n);
      for (int q = 0; q < 50; ++q) {
        const Point c = sample_uniform_in_window(sc.space, sc.window, rng);
        const double r = rng.uniform(0.0, 3.0);
        std::vector<std::size_t> expected;
        for (std::size_t i = 0; i < n; ++i)
          if (distance(sc.space, c, pts.col(static_cast<Eigen::Index>(i))) <= r) expected.push_back(i);
        REQUIRE(metric_index_query(index, c, r) == expected);
      }
    }
  }
}

TEST_CASE("custom ids and duplicate points") {
  const Space e2 = Space::euclidean(2);
  PointMatrix pts(2, 12);
  pts.setZero();
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < 12; ++i) ids.push_back(100 + i);
  const MetricIndex index(e2, pts, ids);
  CHECK(index.query(Point::Zero(2), 0.0) == ids);
  Point far(2);
  far << 5, 5;
  CHECK(index.query(far, 1.0).empty());
}
