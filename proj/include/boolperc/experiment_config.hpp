#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "boolperc/clusters.hpp"
#include "boolperc/estimators.hpp"
#include "boolperc/keyvalue.hpp"

namespace boolperc {

inline constexpr const char* kLibraryVersion = "0.1.0";

enum class ExperimentKind {
  Sample,
  Clusters,
  CrossingSweep,
  LambdaC,
  BbSweep,
  LambdaBb,
  Stability,
  ASets,
  HtimesrMultiplicity,
};

std::string experiment_name(ExperimentKind kind);

/// Everything needed to reproduce one run. Built from a flat key=value file;
/// see README for the grammar.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Sample;
  Space space = Space::euclidean(2);
  Window window = BallWindow{Point::Zero(2), 1.0};

  // sample / clusters
  double lambda_max = 0.0;
  double lambda = 0.0;
  std::optional<Point> growth_seed;
  StopRule growth_stop = StopRule::exhaust();

  // sweeps
  std::vector<double> lambda_grid;
  bool common_random_numbers = true;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string output_dir = ".";

  SpanningRegion region;
  double threshold = 0.5;
  double resolution = 0.0;
  double bb_radius = 0.0;
  std::vector<double> separations;
  double target = 0.99;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double a_r = 0.0;
  std::size_t a_n = 1;
  double a_lambda = 0.0;
  double a_lambda_star = 0.0;

  SweepPlan plan() const;
  /// Fully resolved configuration, defaults included, in the input grammar.
  KeyValues resolved() const;
};

/// Parses and statically validates a configuration. Throws ParseError (or
/// InvalidArgument / UnsupportedOperation) naming the offending field.
ExperimentConfig parse_experiment_config(const KeyValues& kv);
ExperimentConfig load_experiment_config(const std::string& path);

/// Checks that need no sampling: grids, regions, window fit, point budget.
void validate_experiment_config(const ExperimentConfig& config);

struct RunOverrides {
  std::optional<std::string> output_dir;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
};
void apply_overrides(ExperimentConfig& config, const RunOverrides& overrides);

/// Executes the experiment and writes its files into config.output_dir.
/// Returns the written paths (manifest last).
std::vector<std::string> run_experiment(const ExperimentConfig& config);

}  // namespace boolperc
