#include "boolperc/experiment_config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>

#include "boolperc/tolerances.hpp"

namespace boolperc {

namespace {

struct NamedKind {
  const char* name;
  ExperimentKind kind;
};

constexpr std::array<NamedKind, 9> kExperiments{{
    {"sample", ExperimentKind::Sample},
    {"clusters", ExperimentKind::Clusters},
    {"crossing-sweep", ExperimentKind::CrossingSweep},
    {"lambda-c", ExperimentKind::LambdaC},
    {"bb-sweep", ExperimentKind::BbSweep},
    {"lambda-bb", ExperimentKind::LambdaBb},
    {"stability", ExperimentKind::Stability},
    {"a-sets", ExperimentKind::ASets},
    {"htimesr-multiplicity", ExperimentKind::HtimesrMultiplicity},
}};

const std::set<std::string> kKnownKeys{
    "experiment",        "space.kind",          "space.dim",         "space.ball_radius",
    "window.kind",       "window.center",       "window.radius",     "window.h2_radius",
    "window.height_half", "lambda_max",         "lambda",            "growth.seed_point",
    "growth.stop",       "growth.radius",       "growth.resolution", "sweep.lambda_grid",
    "sweep.trials",      "sweep.common_random_numbers",               "seed",
    "threads",           "output.dir",          "region.r_inner",    "region.r_outer",
    "lambda_c.threshold", "lambda_c.resolution", "bb.radius",        "bb.separations",
    "bb.target",         "stability.lambda1",   "stability.lambda2", "a_sets.r",
    "a_sets.n",          "a_sets.lambda",       "a_sets.lambda_star",
};

bool is_sweep(ExperimentKind k) {
  return k != ExperimentKind::Sample && k != ExperimentKind::Clusters && k != ExperimentKind::Stability &&
         k != ExperimentKind::ASets;
}

bool uses_region(ExperimentKind k) {
  return k == ExperimentKind::CrossingSweep || k == ExperimentKind::LambdaC || k == ExperimentKind::Stability ||
         k == ExperimentKind::ASets || k == ExperimentKind::HtimesrMultiplicity;
}

bool uses_big_balls(ExperimentKind k) { return k == ExperimentKind::BbSweep || k == ExperimentKind::LambdaBb; }

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + format_double(values[i]);
  return out;
}

Point read_point(const KeyValues& kv, const std::string& key, const Space& space) {
  const auto coords = kv.get_double_list(key);
  if (static_cast<int>(coords.size()) != space.coordinate_count())
    throw ParseError(kv.line_of(key), key, "expected " + std::to_string(space.coordinate_count()) + " coordinates");
  Point p(space.coordinate_count());
  for (std::size_t i = 0; i < coords.size(); ++i) p(static_cast<Eigen::Index>(i)) = coords[i];
  if (!is_valid_point(space, p)) throw ParseError(kv.line_of(key), key, "not a point of " + space.name());
  return p;
}

std::size_t positive_count(const KeyValues& kv, const std::string& key, long long fallback) {
  const long long v = kv.get_int(key, fallback);
  if (v < 1) throw ParseError(kv.line_of(key), key, "must be >= 1");
  return static_cast<std::size_t>(v);
}

// Rewraps library validation errors with the field that caused them.
template <typename F>
void checked(const KeyValues& kv, const std::string& key, F&& f) {
  try {
    f();
  } catch (const ParseError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ParseError(kv.line_of(key), key, e.what());
  } catch (const UnsupportedOperation& e) {
    throw ParseError(kv.line_of(key), key, e.what());
  }
}

double largest_lambda(const ExperimentConfig& c) {
  switch (c.experiment) {
    case ExperimentKind::Sample:
    case ExperimentKind::Clusters:
      return c.lambda_max;
    case ExperimentKind::Stability:
      return c.lambda2;
    case ExperimentKind::ASets:
      return c.a_lambda_star;
    default:
      return c.lambda_grid.empty() ? 0.0 : c.lambda_grid.back();
  }
}

}  // namespace

std::string experiment_name(ExperimentKind kind) {
  for (const auto& e : kExperiments)
    if (e.kind == kind) return e.name;
  return "unknown";
}

SweepPlan ExperimentConfig::plan() const {
  SweepPlan p;
  p.space = space;
  p.window = window;
  p.lambdas = lambda_grid;
  p.trials = trials;
  p.seed = seed;
  p.common_random_numbers = common_random_numbers;
  p.threads = threads;
  return p;
}

KeyValues ExperimentConfig::resolved() const {
  KeyValues kv;
  kv.set("experiment", experiment_name(experiment));
  write_space(kv, space);
  write_window(kv, window);
  kv.set("seed", std::to_string(seed));
  kv.set("threads", std::to_string(threads));
  kv.set("output.dir", output_dir);
  switch (experiment) {
    case ExperimentKind::Sample:
      kv.set("lambda_max", format_double(lambda_max));
      break;
    case ExperimentKind::Clusters: {
      kv.set("lambda_max", format_double(lambda_max));
      kv.set("lambda", format_double(lambda));
      if (growth_seed) {
        std::vector<double> coords(growth_seed->data(), growth_seed->data() + growth_seed->size());
        kv.set("growth.seed_point", join(coords));
      }
      switch (growth_stop.kind) {
        case StopRule::Kind::Exhaust:
          kv.set("growth.stop", "exhaust");
          break;
        case StopRule::Kind::RadiusReached:
          kv.set("growth.stop", "radius");
          kv.set("growth.radius", format_double(growth_stop.radius));
          break;
        case StopRule::Kind::CoveredBall:
          kv.set("growth.stop", "covered_ball");
          kv.set("growth.radius", format_double(growth_stop.radius));
          kv.set("growth.resolution", format_double(growth_stop.resolution));
          break;
      }
      break;
    }
    default:
      break;
  }
  if (is_sweep(experiment)) {
    kv.set("sweep.lambda_grid", join(lambda_grid));
    kv.set("sweep.common_random_numbers", common_random_numbers ? "true" : "false");
  }
  if (experiment != ExperimentKind::Sample && experiment != ExperimentKind::Clusters)
    kv.set("sweep.trials", std::to_string(trials));
  if (uses_region(experiment)) {
    kv.set("region.r_inner", format_double(region.r_inner));
    kv.set("region.r_outer", format_double(region.r_outer));
  }
  if (experiment == ExperimentKind::LambdaC) {
    kv.set("lambda_c.threshold", format_double(threshold));
    kv.set("lambda_c.resolution", format_double(resolution));
  }
  if (uses_big_balls(experiment)) {
    kv.set("bb.radius", format_double(bb_radius));
    kv.set("bb.separations", join(separations));
    if (experiment == ExperimentKind::LambdaBb) kv.set("bb.target", format_double(target));
  }
  if (experiment == ExperimentKind::Stability) {
    kv.set("stability.lambda1", format_double(lambda1));
    kv.set("stability.lambda2", format_double(lambda2));
  }
  if (experiment == ExperimentKind::ASets) {
    kv.set("a_sets.r", format_double(a_r));
    kv.set("a_sets.n", std::to_string(a_n));
    kv.set("a_sets.lambda", format_double(a_lambda));
    kv.set("a_sets.lambda_star", format_double(a_lambda_star));
  }
  return kv;
}

ExperimentConfig parse_experiment_config(const KeyValues& kv) {
  for (const auto& [key, value] : kv.entries())
    if (!kKnownKeys.count(key)) throw ParseError(kv.line_of(key), key, "unknown field");

  ExperimentConfig c;
  const std::string name = kv.require("experiment");
  const auto it = std::find_if(kExperiments.begin(), kExperiments.end(),
                               [&](const NamedKind& e) { return name == e.name; });
  if (it == kExperiments.end()) throw ParseError(kv.line_of("experiment"), "experiment", "unknown experiment '" + name + "'");
  c.experiment = it->kind;
  const ExperimentKind k = c.experiment;

  c.space = read_space(kv);
  c.seed = kv.contains("seed") ? kv.get_u64("seed") : 0;
  {
    const long long t = kv.get_int("threads", 0);
    if (t < 0) throw ParseError(kv.line_of("threads"), "threads", "must be >= 0");
    c.threads = static_cast<unsigned>(t);
  }
  c.output_dir = kv.get("output.dir").value_or(".");
  if (c.output_dir.empty()) throw ParseError(kv.line_of("output.dir"), "output.dir", "must not be empty");

  if (k == ExperimentKind::Sample || k == ExperimentKind::Clusters) {
    c.window = read_window(kv, c.space);
    c.lambda_max = kv.get_double("lambda_max");
    if (!(c.lambda_max > 0.0) || !std::isfinite(c.lambda_max))
      throw ParseError(kv.line_of("lambda_max"), "lambda_max", "must be positive and finite");
    if (k == ExperimentKind::Clusters) {
      c.lambda = kv.get_double("lambda", c.lambda_max);
      if (!(c.lambda >= 0.0)) throw ParseError(kv.line_of("lambda"), "lambda", "must be >= 0");
      if (c.lambda > c.lambda_max)
        throw ParseError(kv.line_of("lambda"), "lambda", "exceeds lambda_max " + format_double(c.lambda_max));
      if (kv.contains("growth.seed_point")) c.growth_seed = read_point(kv, "growth.seed_point", c.space);
      const std::string stop = kv.get("growth.stop").value_or("exhaust");
      checked(kv, "growth.stop", [&] {
        if (stop == "exhaust") {
          c.growth_stop = StopRule::exhaust();
        } else if (stop == "radius") {
          c.growth_stop = StopRule::radius_reached(kv.get_double("growth.radius"));
        } else if (stop == "covered_ball") {
          c.growth_stop = StopRule::covered_ball(kv.get_double("growth.radius"),
                                                 kv.get_double("growth.resolution", 0.05 * c.space.ball_radius()));
        } else {
          throw ParseError(kv.line_of("growth.stop"), "growth.stop",
                           "unknown stop rule '" + stop + "' (expected exhaust, radius or covered_ball)");
        }
      });
    }
  }

  if (k != ExperimentKind::Sample && k != ExperimentKind::Clusters)
    c.trials = positive_count(kv, "sweep.trials", 100);

  if (is_sweep(k)) {
    c.lambda_grid = kv.get_double_list("sweep.lambda_grid");
    const std::size_t line = kv.line_of("sweep.lambda_grid");
    if (c.lambda_grid.empty()) throw ParseError(line, "sweep.lambda_grid", "must list at least one intensity");
    for (std::size_t i = 0; i < c.lambda_grid.size(); ++i) {
      if (!(c.lambda_grid[i] >= 0.0) || !std::isfinite(c.lambda_grid[i]))
        throw ParseError(line, "sweep.lambda_grid", "intensities must be finite and >= 0");
      if (i > 0 && !(c.lambda_grid[i] > c.lambda_grid[i - 1]))
        throw ParseError(line, "sweep.lambda_grid", "must be strictly ascending");
    }
    c.common_random_numbers = kv.get_bool("sweep.common_random_numbers", true);
    if (kv.contains("lambda_max")) {
      c.lambda_max = kv.get_double("lambda_max");
      for (double l : c.lambda_grid)
        if (l > c.lambda_max)
          throw ParseError(line, "sweep.lambda_grid",
                           "intensity " + format_double(l) + " exceeds lambda_max " + format_double(c.lambda_max));
    }
  }

  if (uses_region(k)) {
    c.region.r_inner = kv.get_double("region.r_inner", 0.0);
    c.region.r_outer = kv.get_double("region.r_outer");
    checked(kv, "region.r_outer", [&] { validate_region(c.space, c.region); });
  }

  if (k == ExperimentKind::LambdaC) {
    c.threshold = kv.get_double("lambda_c.threshold", 0.5);
    if (!(c.threshold > 0.0 && c.threshold < 1.0))
      throw ParseError(kv.line_of("lambda_c.threshold"), "lambda_c.threshold", "must lie in (0, 1)");
    c.resolution = kv.get_double("lambda_c.resolution", 0.0);
    if (!(c.resolution >= 0.0))
      throw ParseError(kv.line_of("lambda_c.resolution"), "lambda_c.resolution", "must be >= 0");
  }

  if (uses_big_balls(k)) {
    c.bb_radius = kv.get_double("bb.radius");
    if (!(c.bb_radius > 0.0)) throw ParseError(kv.line_of("bb.radius"), "bb.radius", "must be positive");
    c.separations = kv.get_double_list("bb.separations");
    if (c.separations.empty() || c.separations.size() > 7)
      throw ParseError(kv.line_of("bb.separations"), "bb.separations", "expected 1 to 7 separations");
    for (double s : c.separations)
      if (!(s >= 0.0)) throw ParseError(kv.line_of("bb.separations"), "bb.separations", "must be >= 0");
    c.target = kv.get_double("bb.target", 0.99);
    if (!(c.target >= 0.0 && c.target <= 1.0))
      throw ParseError(kv.line_of("bb.target"), "bb.target", "must lie in [0, 1]");
  }

  if (k == ExperimentKind::Stability) {
    c.lambda1 = kv.get_double("stability.lambda1");
    c.lambda2 = kv.get_double("stability.lambda2");
    if (!(c.lambda1 > 0.0)) throw ParseError(kv.line_of("stability.lambda1"), "stability.lambda1", "must be positive");
    if (c.lambda1 > c.lambda2)
      throw ParseError(kv.line_of("stability.lambda2"), "stability.lambda2", "must be >= stability.lambda1");
  }

  if (k == ExperimentKind::ASets) {
    c.a_r = kv.get_double("a_sets.r");
    if (!(c.a_r >= 0.0)) throw ParseError(kv.line_of("a_sets.r"), "a_sets.r", "must be >= 0");
    c.a_n = positive_count(kv, "a_sets.n", 1);
    c.a_lambda = kv.get_double("a_sets.lambda");
    c.a_lambda_star = kv.get_double("a_sets.lambda_star");
    if (!(c.a_lambda >= 0.0)) throw ParseError(kv.line_of("a_sets.lambda"), "a_sets.lambda", "must be >= 0");
    if (!(c.a_lambda_star > 0.0) || c.a_lambda > c.a_lambda_star)
      throw ParseError(kv.line_of("a_sets.lambda_star"), "a_sets.lambda_star",
                       "must be positive and >= a_sets.lambda");
  }

  if (k == ExperimentKind::Stability || k == ExperimentKind::ASets) {
    if (kv.contains("lambda_max")) {
      c.lambda_max = kv.get_double("lambda_max");
      const double top = largest_lambda(c);
      if (top > c.lambda_max)
        throw ParseError(kv.line_of("lambda_max"), "lambda_max",
                         "intensity " + format_double(top) + " exceeds lambda_max " + format_double(c.lambda_max));
    }
  }

  if (k == ExperimentKind::HtimesrMultiplicity && c.space.kind() != SpaceKind::H2xR)
    throw ParseError(kv.line_of("space.kind"), "space.kind", "htimesr-multiplicity needs space.kind = h2xr");

  // Window: explicit, or the smallest one the experiment accepts.
  if (k != ExperimentKind::Sample && k != ExperimentKind::Clusters) {
    if (kv.contains("window.kind")) {
      c.window = read_window(kv, c.space);
    } else if (uses_big_balls(k)) {
      c.window = big_ball_window(c.space, c.bb_radius, *std::max_element(c.separations.begin(), c.separations.end()));
    } else {
      c.window = inflated_window(c.space, c.region);
    }
  }
  if (is_sweep(k) && !kv.contains("lambda_max")) c.lambda_max = c.lambda_grid.back();
  if (k == ExperimentKind::Stability && !kv.contains("lambda_max")) c.lambda_max = c.lambda2;
  if (k == ExperimentKind::ASets && !kv.contains("lambda_max")) c.lambda_max = c.a_lambda_star;

  checked(kv, "window.kind", [&] { validate_experiment_config(c); });
  return c;
}

void validate_experiment_config(const ExperimentConfig& c) {
  validate_window(c.space, c.window);
  const ExperimentKind k = c.experiment;
  if (uses_region(k)) require_window_fits(c.space, c.window, c.region);
  if (uses_big_balls(k)) {
    // The sweep itself re-checks; probing it here keeps validate and run in step.
    SweepPlan probe = c.plan();
    probe.lambdas = {0.0};
    probe.trials = 1;
    bb_sweep(probe, c.bb_radius, c.separations);
  }
  if (k == ExperimentKind::Clusters && c.growth_seed && !window_contains(c.space, c.window, *c.growth_seed))
    throw InvalidArgument("growth.seed_point lies outside the window");
  const double expected = largest_lambda(c) * window_volume(c.space, c.window);
  if (expected > tolerance::kMaxExpectedPoints)
    throw InvalidArgument("expected point count " + format_double(expected) + " exceeds the budget of " +
                          format_double(tolerance::kMaxExpectedPoints));
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(KeyValues::parse_file(path));
}

void apply_overrides(ExperimentConfig& config, const RunOverrides& overrides) {
  if (overrides.output_dir) config.output_dir = *overrides.output_dir;
  if (overrides.threads) config.threads = *overrides.threads;
  if (overrides.seed) config.seed = *overrides.seed;
}

}  // namespace boolperc
