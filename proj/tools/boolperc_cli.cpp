#include <CLI11.hpp>

#include <iostream>

#include "boolperc/experiment_config.hpp"

namespace {

using namespace boolperc;

struct Options {
  std::string config_path;
  RunOverrides overrides;
};

void add_common(CLI::App& cmd, Options& opts) {
  cmd.add_option("config", opts.config_path, "experiment configuration (key=value)")->required();
  cmd.add_option_function<std::string>("--output-dir", [&](const std::string& v) { opts.overrides.output_dir = v; },
                                       "directory for report files (overrides output.dir)");
  cmd.add_option_function<unsigned>("--threads", [&](unsigned v) { opts.overrides.threads = v; },
                                    "worker threads, 0 = all cores (overrides threads)");
  cmd.add_option_function<std::uint64_t>("--seed-override", [&](std::uint64_t v) { opts.overrides.seed = v; },
                                         "base seed (overrides seed)");
}

ExperimentConfig load(const Options& opts) {
  ExperimentConfig config = load_experiment_config(opts.config_path);
  apply_overrides(config, opts.overrides);
  validate_experiment_config(config);
  return config;
}

// 1: configuration, 2: estimator outcome, 3: anything else.
int report_error(const std::exception& e, int code) {
  std::cerr << "error: " << e.what() << '\n';
  return code;
}

template <typename Body>
int guarded(Body&& body, bool estimator_errors) {
  try {
    body();
    return 0;
  } catch (const InvalidArgument& e) {
    return report_error(e, 1);
  } catch (const UnsupportedOperation& e) {
    return report_error(e, 1);
  } catch (const ResourceLimit& e) {
    return report_error(e, 1);
  } catch (const EstimatorError& e) {
    if (!estimator_errors) return report_error(e, 3);
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    return report_error(e, 3);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson Boolean percolation experiments"};
  app.require_subcommand(1);
  Options run_opts;
  Options validate_opts;
  auto* run = app.add_subcommand("run", "execute an experiment and write its reports");
  auto* validate = app.add_subcommand("validate", "check a configuration without sampling");
  add_common(*run, run_opts);
  add_common(*validate, validate_opts);
  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) {
    return guarded(
        [&] {
          const ExperimentConfig config = load(validate_opts);
          std::cout << "OK\n";
          config.resolved().write(std::cout);
        },
        false);
  }
  return guarded(
      [&] {
        const ExperimentConfig config = load(run_opts);
        for (const auto& path : run_experiment(config)) std::cout << path << '\n';
      },
      true);
}
