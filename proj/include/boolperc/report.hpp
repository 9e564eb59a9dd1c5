#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "boolperc/keyvalue.hpp"

namespace boolperc {

inline constexpr double kWilsonZ95 = 1.959963984540054;

/// Half-width of the Wilson score interval for `successes` out of `trials`.
double wilson_half_width(std::size_t successes, std::size_t trials, double z = kWilsonZ95);

struct ProbabilityEstimate {
  std::size_t successes = 0;
  std::size_t trials = 0;
  double estimate = 0.0;
  double half_width = 0.0;

  static ProbabilityEstimate from_counts(std::size_t successes, std::size_t trials);
};

struct ReportRow {
  std::string experiment;
  double lambda = 0.0;
  double param1 = 0.0;
  double param2 = 0.0;
  double estimate = 0.0;
  double half_width = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Rows plus a flat metadata block (same format as configuration sidecars).
struct EstimatorReport {
  std::string space;
  KeyValues metadata;
  std::vector<ReportRow> rows;

  void add(std::string experiment, double lambda, double param1, double param2, const ProbabilityEstimate& p,
           std::uint64_t seed);
  std::vector<ReportRow> rows_for(const std::string& experiment) const;
  void append(const EstimatorReport& other);

  /// "experiment,space,lambda,param1,param2,estimate,half_width,trials,seed"
  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
  void write_metadata(std::ostream& out) const { metadata.write(out); }
};

}  // namespace boolperc
