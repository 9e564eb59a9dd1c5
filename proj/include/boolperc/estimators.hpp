#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "boolperc/clusters.hpp"
#include "boolperc/point_process.hpp"
#include "boolperc/report.hpp"

namespace boolperc {

// Finite windows cannot see unbounded components. Every estimator here uses
// the same proxy: a cluster is *spanning* when one of its balls meets the
// inner region and one of its balls meets the outer region.
//
//   Ball windows (R^n, H2), centred at the origin:
//     inner = S(o, r_inner), outer = complement of S(o, r_outer).
//   Cylinder windows (H2 x R):
//     inner = the column {d_H2(o, u) <= r_inner}, and the cluster must touch
//     both height planes h = +r_outer and h = -r_outer.
struct SpanningRegion {
  double r_inner = 0.0;
  double r_outer = 0.0;
};

namespace region_bits {
inline constexpr std::uint8_t kInner = 1u << 0;
inline constexpr std::uint8_t kOuter = 1u << 1;  // also "top" on cylinders
inline constexpr std::uint8_t kBottom = 1u << 2;
}  // namespace region_bits

void validate_region(const Space& space, const SpanningRegion& region);
/// Region bits of the ball centred at `center`.
std::uint8_t spanning_flags(const Space& space, const SpanningRegion& region, const Point& center);
/// Bits a cluster needs to count as spanning.
std::uint8_t spanning_mask(const Space& space);

/// Sampling window for a region: the region inflated by 2 * ball_radius so
/// that balls centred just outside still take part.
Window inflated_window(const Space& space, const SpanningRegion& region);
/// Throws InvalidArgument unless `window` is centred at the origin and contains
/// the inflated region.
void require_window_fits(const Space& space, const Window& window, const SpanningRegion& region);

struct SweepPlan {
  Space space = Space::euclidean(2);
  Window window = BallWindow{Point::Zero(2), 1.0};
  std::vector<double> lambdas;  // strictly ascending, >= 0
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  bool common_random_numbers = true;
  unsigned threads = 0;  // 0 = machine parallelism

  double lambda_max() const { return lambdas.empty() ? 0.0 : lambdas.back(); }
  void validate() const;
};

/// Experiment ids mixed into per-trial seeds so different experiments on one
/// base seed never share streams.
enum class Experiment : std::uint64_t {
  Crossing = 1,
  BigBall = 2,
  Spanning = 3,
  Stability = 4,
  ASets = 5,
  Growth = 6,
  Multiplicity = 7,
};

/// Seed of trial `trial` (at grid level `level` for independent sweeps).
std::uint64_t trial_seed(std::uint64_t base, Experiment experiment, std::size_t trial, std::size_t level = 0);

// --- single-configuration statistics -------------------------------------

/// Number of spanning clusters of the active set at `lambda`.
std::size_t spanning_cluster_count(const MarkedConfiguration& config, double lambda, const SpanningRegion& region);

/// Labels of the spanning clusters of a labeling, ascending.
std::vector<std::size_t> spanning_labels(const IntersectionGraph& graph, const ClusterLabeling& labeling,
                                         const SpanningRegion& region);

struct StabilityReport {
  std::size_t n_spanning2 = 0;
  std::size_t n_stable = 0;
  /// n_stable / n_spanning2; 1 when there is no spanning lambda2 cluster.
  double fraction = 1.0;
};

/// For each spanning cluster at lambda2, is some spanning lambda1 cluster a
/// subset of it? Both levels come from the same configuration. Throws
/// InternalInvariantViolation if a lambda1 cluster is not contained in a
/// single lambda2 cluster.
StabilityReport stability_check(const MarkedConfiguration& config, double lambda1, double lambda2,
                                const SpanningRegion& region);

struct ASetMembership {
  bool in_a1 = false;
  bool in_a2 = false;
  bool in_a3 = false;
};

/// Probe spacing for the A2 supremum, as a fraction of ball_radius.
inline constexpr double kASetProbeSpacing = 0.25;

/// Membership of z in the three sets built around the giant cluster at
/// lambda_star (largest spanning cluster, ties to the smallest label):
///   A1(r):      S(z, r) meets the giant cluster;
///   A2(r, n):   the chemical distance between any two covered probe points
///               of S(z, r + 1/2) inside the giant cluster is < n;
///   A3(r, n, lambda): no point with mark in (lambda, lambda_star] lies in
///               S(z, r + 2n).
/// Throws UndefinedGiant when nothing spans at lambda_star.
ASetMembership a_set_membership(const MarkedConfiguration& config, const Point& z, double r, std::size_t n,
                                double lambda, double lambda_star, const SpanningRegion& region);

// --- Monte Carlo estimators -------------------------------------------------

/// P[some cluster meets S(o, r_inner) and reaches distance r_outer], sampled
/// in `window` (default: the inflated region).
ProbabilityEstimate crossing_probability(const Space& space, double lambda, const SpanningRegion& region,
                                         std::size_t trials, std::uint64_t seed, unsigned threads = 0);
ProbabilityEstimate crossing_probability(const Space& space, const Window& window, double lambda,
                                         const SpanningRegion& region, std::size_t trials, std::uint64_t seed,
                                         unsigned threads = 0);

/// Crossing probability at every grid level. With common random numbers every
/// trial is one configuration at lambda_max swept through all levels, so the
/// estimate is non-decreasing in lambda.
EstimatorReport crossing_sweep(const SweepPlan& plan, const SpanningRegion& region);

/// Per-trial smallest level at which the crossing event holds (nullopt: not
/// even at lambda_max). Common-random-numbers configurations of `plan`.
std::vector<std::optional<double>> crossing_levels(const SweepPlan& plan, const SpanningRegion& region);

struct LambdaInterval {
  double lo = 0.0;
  double hi = 0.0;
  EstimatorReport report;
};

/// Brackets the level where the crossing probability passes `threshold`,
/// then bisects until hi - lo <= resolution (0 = a tenth of the smallest grid
/// step). Throws BracketingFailure when the grid has no crossing.
LambdaInterval lambda_c_estimate(const SweepPlan& plan, const SpanningRegion& region, double threshold = 0.5,
                                 double resolution = 0.0);

/// P[S(o, R) <-> S(y, R)] with d(o, y) = separation.
ProbabilityEstimate bb_connection_probability(const Space& space, double lambda, double radius, double separation,
                                              std::size_t trials, std::uint64_t seed, unsigned threads = 0);

/// Window that holds both balls of the widest separation, inflated.
Window big_ball_window(const Space& space, double radius, double max_separation);

/// BB connection probability for each (lambda, separation).
EstimatorReport bb_sweep(const SweepPlan& plan, double radius, const std::vector<double>& separations);

struct ThresholdResult {
  std::optional<double> lambda;  // nullopt: target never reached on the grid
  double lo = 0.0;               // grid level before `lambda` (== lambda at the first level)
  double hi = 0.0;
  EstimatorReport report;
};

/// Smallest grid level where the minimum over separations of the BB
/// connection probability reaches `target`.
ThresholdResult lambda_bb_estimate(const SweepPlan& plan, double radius, const std::vector<double>& separations,
                                   double target = 0.99);

/// Frequency of exactly one spanning cluster at each grid level.
EstimatorReport unique_spanning_sweep(const SweepPlan& plan, const SpanningRegion& region);

/// Smallest grid level where the unique-spanning frequency reaches `target`.
ThresholdResult lambda_u_proxy(const SweepPlan& plan, const SpanningRegion& region, double target = 0.99);

/// Histogram of the number of spanning clusters per level: one row per
/// (lambda, k) with the frequency of exactly k spanning clusters.
EstimatorReport multiplicity_histogram(const SweepPlan& plan, const SpanningRegion& region);

/// Pools stability_check over `trials` configurations sampled at lambda2.
EstimatorReport stability_experiment(const Space& space, const Window& window, double lambda1, double lambda2,
                                     const SpanningRegion& region, std::size_t trials, std::uint64_t seed,
                                     unsigned threads = 0);

/// Frequencies of A1, A2, A3 membership of the origin.
EstimatorReport a_set_experiment(const Space& space, const Window& window, double r, std::size_t n, double lambda,
                                 double lambda_star, const SpanningRegion& region, std::size_t trials,
                                 std::uint64_t seed, unsigned threads = 0);

struct CoveredBallStats {
  std::size_t trials = 0;
  std::size_t covered = 0;         // stopped with CoveredBallFound
  std::size_t large_exhausted = 0; // exhausted with a ball within 2 * ball_radius of the window edge
  /// covered / (covered + large_exhausted); 0 when the denominator is 0.
  double frequency() const;
};

/// Grows the component of the origin in a ball window of `window_radius` with
/// stop rule CoveredBall(radius, resolution) and tallies how large components
/// end.
CoveredBallStats covered_ball_experiment(const Space& space, double lambda, double window_radius, double radius,
                                         double resolution, std::size_t trials, std::uint64_t seed,
                                         unsigned threads = 0);

}  // namespace boolperc
