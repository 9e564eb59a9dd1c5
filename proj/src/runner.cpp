#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "boolperc/experiment_config.hpp"

namespace boolperc {

namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : root_(dir) { fs::create_directories(root_); }

  template <typename Writer>
  void write(const std::string& name, Writer&& writer) {
    const fs::path path = root_ / name;
    auto out = open_output(path);
    writer(out);
    out.close();
    if (!out) throw std::runtime_error("failed writing " + path.string());
    written_.push_back(path.string());
  }

  void report(const EstimatorReport& report) {
    write("report.csv", [&](std::ostream& out) { report.write_csv(out); });
    write("report.meta", [&](std::ostream& out) { report.write_metadata(out); });
  }

  std::vector<std::string> written() const { return written_; }

 private:
  fs::path root_;
  std::vector<std::string> written_;
};

MarkedConfiguration run_sample(const ExperimentConfig& c, OutputDir& out) {
  MarkedConfiguration config = sample_configuration(c.space, c.window, c.lambda_max, c.seed);
  out.write("configuration.csv", [&](std::ostream& s) { write_configuration_csv(s, config); });
  out.write("configuration.meta", [&](std::ostream& s) { write_configuration_metadata(s, config); });
  return config;
}

void run_clusters(const ExperimentConfig& c, OutputDir& out) {
  const MarkedConfiguration config = run_sample(c, out);
  const IntersectionGraph graph = build_intersection_graph(restrict_to(config, c.lambda));
  const ClusterLabeling labeling = label_clusters(graph);
  out.write("clusters.csv", [&](std::ostream& s) { write_cluster_csv(s, graph, labeling); });
  const Point seed = c.growth_seed.value_or(window_center(c.space, c.window));
  const GrowthTrace trace = grow_component(config, c.lambda, seed, c.growth_stop);
  out.write("growth.csv", [&](std::ostream& s) { write_growth_trace_csv(s, trace); });
}

void execute(const ExperimentConfig& c, OutputDir& out) {
  switch (c.experiment) {
    case ExperimentKind::Sample:
      run_sample(c, out);
      return;
    case ExperimentKind::Clusters:
      run_clusters(c, out);
      return;
    case ExperimentKind::CrossingSweep:
      out.report(crossing_sweep(c.plan(), c.region));
      return;
    case ExperimentKind::LambdaC:
      try {
        out.report(lambda_c_estimate(c.plan(), c.region, c.threshold, c.resolution).report);
      } catch (const BracketingFailure& e) {
        out.write("report.csv", [&](std::ostream& s) { s << e.table(); });
        throw;
      }
      return;
    case ExperimentKind::BbSweep:
      out.report(bb_sweep(c.plan(), c.bb_radius, c.separations));
      return;
    case ExperimentKind::LambdaBb:
      out.report(lambda_bb_estimate(c.plan(), c.bb_radius, c.separations, c.target).report);
      return;
    case ExperimentKind::Stability:
      out.report(stability_experiment(c.space, c.window, c.lambda1, c.lambda2, c.region, c.trials, c.seed, c.threads));
      return;
    case ExperimentKind::ASets:
      out.report(a_set_experiment(c.space, c.window, c.a_r, c.a_n, c.a_lambda, c.a_lambda_star, c.region, c.trials,
                                  c.seed, c.threads));
      return;
    case ExperimentKind::HtimesrMultiplicity:
      out.report(multiplicity_histogram(c.plan(), c.region));
      return;
  }
}

}  // namespace

std::vector<std::string> run_experiment(const ExperimentConfig& config) {
  validate_experiment_config(config);
  OutputDir out(config.output_dir);
  const auto start = std::chrono::steady_clock::now();
  std::string status = "ok";
  auto write_manifest = [&] {
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    KeyValues manifest = config.resolved();
    manifest.set("manifest.version", kLibraryVersion);
    manifest.set("manifest.status", status);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", seconds);
    manifest.set("manifest.wall_time_seconds", buf);
    out.write("manifest.txt", [&](std::ostream& s) { manifest.write(s); });
  };
  try {
    execute(config, out);
  } catch (const std::exception&) {
    status = "failed";
    write_manifest();
    throw;
  }
  write_manifest();
  return out.written();
}

}  // namespace boolperc
