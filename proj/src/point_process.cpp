#include "boolperc/point_process.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "boolperc/keyvalue.hpp"
#include "boolperc/random.hpp"
#include "boolperc/tolerances.hpp"

namespace boolperc {

PointMatrix ActiveSet::locations() const {
  PointMatrix out(config_->space.coordinate_count(), static_cast<Eigen::Index>(ids_.size()));
  for (std::size_t k = 0; k < ids_.size(); ++k)
    out.col(static_cast<Eigen::Index>(k)) = config_->locations.col(static_cast<Eigen::Index>(ids_[k]));
  return out;
}

MarkedConfiguration sample_configuration(const Space& space, const Window& window, double lambda_max,
                                         std::uint64_t seed) {
  if (!(lambda_max > 0.0) || !std::isfinite(lambda_max))
    throw InvalidArgument("sample_configuration: lambda_max must be positive and finite");
  const double expected = lambda_max * window_volume(space, window);
  if (!(expected <= tolerance::kMaxExpectedPoints))
    throw ResourceLimit("sample_configuration: expected point count " + format_double(expected) +
                        " exceeds the limit of 1e8");

  MarkedConfiguration config{space, window, lambda_max, seed, {}, {}};
  RandomStream rng(seed);
  const auto count = static_cast<Eigen::Index>(rng.poisson(expected));
  config.locations.resize(space.coordinate_count(), count);
  config.marks.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    config.locations.col(i) = sample_uniform_in_window(space, window, rng);
    config.marks(i) = lambda_max * rng.uniform();
  }
  return config;
}

ActiveSet restrict_to(const MarkedConfiguration& config, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("restrict: lambda must be >= 0");
  if (lambda > config.lambda_max)
    throw InvalidArgument("restrict: lambda " + format_double(lambda) + " exceeds lambda_max " +
                          format_double(config.lambda_max) + " (the coupling only extends downward)");
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < config.size(); ++i)
    if (config.marks(static_cast<Eigen::Index>(i)) <= lambda) ids.push_back(i);
  return ActiveSet(config, lambda, std::move(ids));
}

MarkedConfiguration with_extra_points(const MarkedConfiguration& config, const std::vector<Point>& extra) {
  MarkedConfiguration out = config;
  const Eigen::Index base = out.locations.cols();
  const auto added = static_cast<Eigen::Index>(extra.size());
  out.locations.conservativeResize(Eigen::NoChange, base + added);
  out.marks.conservativeResize(base + added);
  for (Eigen::Index k = 0; k < added; ++k) {
    validate_point(config.space, extra[static_cast<std::size_t>(k)]);
    out.locations.col(base + k) = extra[static_cast<std::size_t>(k)];
    out.marks(base + k) = 0.0;
  }
  return out;
}

void write_configuration_csv(std::ostream& out, const MarkedConfiguration& config) {
  const int coords = config.space.coordinate_count();
  out << "id";
  for (int c = 0; c < coords; ++c) out << ",coord" << c;
  out << ",mark\n";
  for (std::size_t i = 0; i < config.size(); ++i) {
    out << i;
    const auto col = static_cast<Eigen::Index>(i);
    for (int c = 0; c < coords; ++c) out << ',' << format_double(config.locations(c, col));
    out << ',' << format_double(config.marks(col)) << '\n';
  }
}

void write_configuration_metadata(std::ostream& out, const MarkedConfiguration& config) {
  KeyValues kv;
  write_space(kv, config.space);
  write_window(kv, config.window);
  kv.set("lambda_max", format_double(config.lambda_max));
  kv.set("seed", std::to_string(config.seed));
  kv.set("points", std::to_string(config.size()));
  kv.write(out);
}

MarkedConfiguration read_configuration(std::istream& csv, std::istream& metadata) {
  const KeyValues kv = KeyValues::parse(metadata);
  const Space space = read_space(kv);
  MarkedConfiguration config{space, read_window(kv, space), kv.get_double("lambda_max"), kv.get_u64("seed"), {}, {}};

  const int coords = space.coordinate_count();
  std::string line;
  if (!std::getline(csv, line)) throw ParseError(1, "", "configuration csv is empty");
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(csv, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(std::stod(field));
    if (static_cast<int>(row.size()) != coords + 2)
      throw ParseError(line_no, "", "expected " + std::to_string(coords + 2) + " columns");
    if (static_cast<std::size_t>(row[0]) != rows.size()) throw ParseError(line_no, "id", "ids must be 0, 1, 2, ...");
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  config.locations.resize(coords, n);
  config.marks.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (int c = 0; c < coords; ++c) config.locations(c, i) = row[static_cast<std::size_t>(c) + 1];
    config.marks(i) = row.back();
  }
  return config;
}

void save_configuration(const std::string& csv_path, const std::string& metadata_path,
                        const MarkedConfiguration& config) {
  std::ofstream csv(csv_path);
  std::ofstream meta(metadata_path);
  if (!csv || !meta) throw InvalidArgument("cannot write configuration to '" + csv_path + "'");
  write_configuration_csv(csv, config);
  write_configuration_metadata(meta, config);
}

MarkedConfiguration load_configuration(const std::string& csv_path, const std::string& metadata_path) {
  std::ifstream csv(csv_path);
  std::ifstream meta(metadata_path);
  if (!csv || !meta) throw InvalidArgument("cannot read configuration from '" + csv_path + "'");
  return read_configuration(csv, meta);
}

}  // namespace boolperc
