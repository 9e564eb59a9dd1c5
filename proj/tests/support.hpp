#pragma once

#include <vector>

#include "boolperc/clusters.hpp"
#include "boolperc/point_process.hpp"

namespace testsupport {

using namespace boolperc;

struct Scenario {
  Space space;
  Window window;
  double lambda_max;
};

// Small windows holding roughly 20-40 points at lambda_max.
inline std::vector<Scenario> small_scenarios() {
  return {
      {Space::euclidean(2), BallWindow{Point::Zero(2), 6.0}, 0.3},
      {Space::euclidean(3), BallWindow{Point::Zero(3), 4.0}, 0.12},
      {Space::hyperbolic_plane(), BallWindow{Space::hyperbolic_plane().origin(), 3.0}, 0.6},
      {Space::hyperbolic_plane_times_line(), CylinderWindow{2.0, 3.0}, 0.3},
      {Space::euclidean(2, 0.5), BallWindow{Point::Zero(2), 3.0}, 1.2},
  };
}

// Configuration with at most `cap` points; bumps the seed until it fits.
inline MarkedConfiguration small_config(const Scenario& s, std::uint64_t seed, std::size_t cap = 50) {
  for (std::uint64_t k = 0;; ++k) {
    auto c = sample_configuration(s.space, s.window, s.lambda_max, seed * 1000003ULL + k);
    if (c.size() <= cap) return c;
  }
}

// Dense adjacency of the active set at lambda, by direct distance checks.
inline std::vector<std::vector<char>> brute_adjacency(const MarkedConfiguration& c, const std::vector<std::size_t>& ids) {
  const std::size_t n = ids.size();
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j)
        adj[i][j] = distance(c.space, c.location(ids[i]), c.location(ids[j])) <= 2.0 * c.space.ball_radius();
  return adj;
}

// Transitive closure (Warshall).
inline std::vector<std::vector<char>> closure(std::vector<std::vector<char>> r) {
  const std::size_t n = r.size();
  for (std::size_t i = 0; i < n; ++i) r[i][i] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = 1;
  return r;
}

inline std::vector<std::size_t> ids_at(const MarkedConfiguration& c, double lambda) {
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.marks(static_cast<Eigen::Index>(i)) <= lambda) ids.push_back(i);
  return ids;
}

}  // namespace testsupport
