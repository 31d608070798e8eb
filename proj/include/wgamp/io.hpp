#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wgamp/harness.hpp"
#include "wgamp/model.hpp"

namespace wgamp {

/// %.17g — enough digits for an exact double round trip.
std::string format_real(double value);

/// Writes contents to a temporary file next to `path`, then renames it into
/// place, so partially written outputs never appear under the final name.
void atomic_write_file(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

// --- problem instances: JSON header + CSV payloads -------------------------

struct LoadedProblem {
  ProblemInstance problem;
  std::map<std::string, std::uint64_t> seed_provenance;
};

/// Writes <stem>.json plus <stem>.A.csv / <stem>.y.csv / <stem>.x.csv
/// (truth only when present). `json_path` must end in ".json".
void save_problem(const ProblemInstance& problem, const std::string& json_path,
                  const std::map<std::string, std::uint64_t>& seed_provenance = {});

LoadedProblem load_problem(const std::string& json_path);

// --- sweep results and fitted curves ----------------------------------------

std::string results_csv(const std::vector<TrialRecord>& records);
std::vector<TrialRecord> parse_results_csv(const std::string& text);

std::string curves_csv(const std::vector<TransitionCurve>& curves);
std::vector<TransitionCurve> parse_curves_csv(const std::string& text);

// --- configuration files -----------------------------------------------------

/// Parses a sweep configuration from JSON text. Unknown keys are rejected.
SweepConfig sweep_config_from_json(const std::string& text);

struct GenConfig {
  int n = 0;
  int m = 0;
  int k = 0;
  WeightShape weight_shape = WeightShape::uniform;
  std::string weights_file;
  double theta_mean = 0.0;
  double theta_var = 1.0;
  double noise_var = 0.0;
  std::uint64_t seed = 0;
};

GenConfig gen_config_from_json(const std::string& text);

struct SolveConfig {
  std::string problem_path;
  std::string prior_weights = "uniform";  // uniform | gaussian | file
  std::string weights_file;
  double tau = 0.1;
  double theta_mean = 0.0;
  double theta_var = 1.0;
  std::optional<double> noise_var;  // absent: use the problem header value
  GampConfig gamp;
  EmConfig em;
};

SolveConfig solve_config_from_json(const std::string& text);

/// Applies `--set key=value` pairs onto JSON text. Keys use dotted paths
/// (e.g. gamp.damping); values are parsed as JSON when possible, else taken
/// as strings. Key validity is enforced by the config parser afterwards.
std::string apply_config_overrides(const std::string& text,
                                   const std::vector<std::pair<std::string, std::string>>& sets);

}  // namespace wgamp
