#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tariffkit/econometrics/var.hpp"
#include "tariffkit/montecarlo.hpp"
#include "tariffkit/parallel.hpp"
#include "tariffkit/presets.hpp"

namespace tariffkit::cli {

inline constexpr std::uint64_t kDefaultMonteCarloSeed = 42;

enum class TableFormat { csv, json };

// Fully resolved parameters of one invocation: the preset is expanded first,
// then the config file block for the command, then command-line flags.
struct RunConfig {
  std::string command;
  std::string preset_name = "paper2018";
  PresetBundle bundle;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "out";
  TableFormat format = TableFormat::csv;
  Execution exec = Execution::parallel;
  int threads = 0;

  // simulate
  bool calibrate = false;

  // datagen
  std::string kind = "all";  // panel | series | iv | all
  double instrument_relevance = 0.0;  // > 0 adds an "instrument" column to the panel

  // estimate
  std::string method = "did";  // did | placebo | svar | shrunk | iv
  std::filesystem::path input;
  std::optional<std::size_t> lags;
  std::optional<InfoCriterion> criterion;
  std::size_t horizon = 24;
  double lambda = 0.2;
  std::vector<int> ordering;          // empty = exports first
  std::vector<std::string> variables;  // empty = every non-t, non-dummy column

  // montecarlo
  ExperimentConfig experiment;
};

/// Parses arguments (without the program name) into a RunConfig. Throws
/// ConfigError on unknown flags, bad values or an inconsistent config file.
/// Returns std::nullopt when help was requested (printed to `out`).
std::optional<RunConfig> parse_args(const std::vector<std::string>& args, std::ostream& out);

/// Executes a resolved configuration, writing files under config.out.
void run(const RunConfig& config, std::ostream& out);

/// parse_args + run with the exit-code contract: 0 success, 1 runtime or
/// numerical failure, 2 usage or configuration error. Diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tariffkit::cli
