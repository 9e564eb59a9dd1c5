#include "boolperc/report.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace boolperc {

double wilson_half_width(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return 1.0;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  return z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
}

ProbabilityEstimate ProbabilityEstimate::from_counts(std::size_t successes, std::size_t trials) {
  ProbabilityEstimate p;
  p.successes = successes;
  p.trials = trials;
  p.estimate = trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
  p.half_width = wilson_half_width(successes, trials);
  return p;
}

void EstimatorReport::add(std::string experiment, double lambda, double param1, double param2,
                          const ProbabilityEstimate& p, std::uint64_t seed) {
  rows.push_back({std::move(experiment), lambda, param1, param2, p.estimate, p.half_width, p.trials, seed});
}

std::vector<ReportRow> EstimatorReport::rows_for(const std::string& experiment) const {
  std::vector<ReportRow> out;
  for (const auto& row : rows)
    if (row.experiment == experiment) out.push_back(row);
  return out;
}

void EstimatorReport::append(const EstimatorReport& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  for (const auto& [key, value] : other.metadata.entries())
    if (!metadata.contains(key)) metadata.set(key, value);
  if (space.empty()) space = other.space;
}

void EstimatorReport::write_csv(std::ostream& out) const {
  out << "experiment,space,lambda,param1,param2,estimate,half_width,trials,seed\n";
  for (const auto& row : rows) {
    out << row.experiment << ',' << space << ',' << format_double(row.lambda) << ',' << format_double(row.param1)
        << ',' << format_double(row.param2) << ',' << format_double(row.estimate) << ','
        << format_double(row.half_width) << ',' << row.trials << ',' << row.seed << '\n';
  }
}

std::string EstimatorReport::to_csv() const {
  std::ostringstream out;
  write_csv(out);
  return out.str();
}

}  // namespace boolperc
