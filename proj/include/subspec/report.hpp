#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "subspec/classification.hpp"
#include "subspec/cocycle.hpp"
#include "subspec/lyapunov.hpp"

namespace subspec {

inline constexpr const char* kReportSchema = "subspec-report/1";

struct AnalysisConfig {
  std::size_t grid = 1024;
  int level = 8;
  int depth = 6;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  SuspensionMode mode = SuspensionMode::Unit;
  std::vector<long double> heights;
  double lo = 0, hi = 1;
  int threads = 1;
  std::vector<double> scalar;
  std::string out;
  std::string format = "json";
  // Diagnostics without a slot in the short flag list.
  double epsilon = 0.02;
  std::string symbol;
  double window = 1000;
  double lambda = 0.5, p = 0.5;
  int terms = 200;

  SuspensionParams suspension(const Substitution& z) const;
  FrequencyGrid frequency_grid() const { return {lo, hi, grid}; }
};

/// Floats that may be -inf or nan become explicit string markers.
nlohmann::json number(long double x);

nlohmann::json substitution_json(const Substitution& z);
nlohmann::json matrix_json(const IntMatrix& m);
nlohmann::json perron_json(const PerronData& p);
nlohmann::json pisot_json(const PisotReport& r);
nlohmann::json exponent_json(const ExponentEstimate& e);
nlohmann::json dimension_json(const DimensionReport& d);
nlohmann::json density_json(const DensityGrid& g);

/// Substitution core plus classification.
nlohmann::json analysis_report(const Substitution& z, const AnalysisConfig& cfg);

struct LyapunovOutcome {
  std::optional<ExponentEstimate> estimate;  // absent when the criterion does not apply
  CriterionResult verdict;
};
LyapunovOutcome lyapunov_analysis(const Substitution& z, const AnalysisConfig& cfg);
nlohmann::json lyapunov_report(const Substitution& z, const LyapunovOutcome& o, const AnalysisConfig& cfg);
/// k,estimate,stderr,samples,seed
void write_exponent_csv(std::ostream& out, const ExponentEstimate& e);

}  // namespace subspec
