#include <doctest.h>

#include <set>

#include "boolperc/level_sweep.hpp"
#include "boolperc/random.hpp"
#include "support.hpp"

using namespace boolperc;

namespace {

// Clusters at `lambda` whose OR-ed flags contain `mask`, via a fresh labeling.
std::size_t labeled_count(const MarkedConfiguration& c, const std::vector<std::uint8_t>& flags, double lambda,
                          std::uint8_t mask) {
  const auto graph = build_intersection_graph(restrict_to(c, lambda));
  const auto labels = label_clusters(graph);
  std::size_t n = 0;
  for (const auto& cl : labels.clusters) {
    std::uint8_t f = 0;
    for (auto id : cl.members) f |= flags[id];
    n += (f & mask) == mask;
  }
  return n;
}

}  // namespace

TEST_CASE("level sweep agrees with per-level labelings") {
  RandomStream rng(99);
  for (const auto& sc : testsupport::small_scenarios()) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const auto c = testsupport::small_config(sc, seed);
      std::vector<std::uint8_t> flags(c.size());
      for (auto& f : flags) f = static_cast<std::uint8_t>(rng.next_u64() & 7u) & static_cast<std::uint8_t>(rng.next_u64() & 7u);
      const std::vector<std::uint8_t> targets{1, 3, 6, 0};
      LevelSweep sweep(c, flags, targets);

      std::set<double> marks(c.marks.data(), c.marks.data() + c.marks.size());
      std::vector<std::optional<double>> first(targets.size());
      for (double m : marks) {
        sweep.advance_to(m);
        REQUIRE(sweep.active_count() == testsupport::ids_at(c, m).size());
        REQUIRE(sweep.cluster_count() == label_clusters(build_intersection_graph(restrict_to(c, m))).cluster_count());
        for (std::size_t t = 0; t < targets.size(); ++t) {
          const std::size_t expected = labeled_count(c, flags, m, targets[t]);
          REQUIRE(sweep.clusters_with(t) == expected);
          if (expected > 0 && !first[t]) first[t] = m;
          REQUIRE(sweep.first_level(t) == first[t]);
        }
      }
      sweep.advance_to_end();
      CHECK(sweep.active_count() == c.size());
    }
  }
}

TEST_CASE("level sweep rejects decreasing levels") {
  const auto sc = testsupport::small_scenarios().front();
  const auto c = testsupport::small_config(sc, 1);
  LevelSweep sweep(c, std::vector<std::uint8_t>(c.size(), 0), {1});
  sweep.advance_to(0.2);
  CHECK_THROWS_AS(sweep.advance_to(0.1), InvalidArgument);
  CHECK_THROWS_AS(sweep.advance_to(sc.lambda_max * 2), InvalidArgument);
  CHECK_THROWS_AS(LevelSweep(c, std::vector<std::uint8_t>(c.size() + 1, 0), {1}), InvalidArgument);
}
