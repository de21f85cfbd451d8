#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nsdyn/ergodic.hpp"

namespace nsdyn::runner {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// Raised for malformed configs; maps to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  /// The config as given, with the effective seed written back.
  nlohmann::ordered_json raw;
  std::uint64_t seed = 0;
  std::optional<std::string> out_dir;
  std::string format = "json";
  int repeat = 1;
};

/// Checks the top-level schema ("schema": "v1", known fields only). System
/// and operation parameters are checked when the experiment runs, before any
/// computation.
ExperimentConfig parse_config(const nlohmann::ordered_json& config, std::optional<std::uint64_t> seed_override = {});

struct RunOutcome {
  nlohmann::ordered_json report;
  std::vector<std::pair<std::string, SumSeries>> series;
  /// A verdict certified a failure (bound violated, horizon exhausted, ...).
  bool certified_failure = false;
};

/// Runs one experiment. Throws ValidationError on bad parameters.
RunOutcome run(const ExperimentConfig& config);

/// CSV with columns n,value,error_bound.
void write_series_csv(std::ostream& out, const SumSeries& series);

struct CatalogEntry {
  std::string name;
  std::string description;
  nlohmann::ordered_json config;
};

const std::vector<CatalogEntry>& catalog();

/// Command line entry point; returns the process exit code
/// (0 ok, 2 invalid config, 3 certified failure, 4 I/O error).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nsdyn::runner
