#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wgamp/em.hpp"
#include "wgamp/model.hpp"

namespace wgamp {

enum class SolverMode { genie_weighted, genie_unweighted, em_weighted };
enum class WeightShape { uniform, gaussian, file };

SolverMode solver_mode_from_string(const std::string& name);
std::string to_string(SolverMode mode);
WeightShape weight_shape_from_string(const std::string& name);
std::string to_string(WeightShape shape);

/// Phase-transition sweep over the (delta, rho) plane. Signals are drawn
/// from the weighted prior selected by weight_shape; solver_mode picks what
/// the reconstruction is allowed to know about them.
struct SweepConfig {
  int n = 500;
  std::vector<double> delta_grid;  // strictly increasing, values in (0, 1]
  std::vector<double> rho_grid;    // strictly increasing, values in (0, 1]
  int trials_per_point = 10;
  double success_nmse_tol = 1e-4;
  SolverMode solver_mode = SolverMode::genie_weighted;
  WeightShape weight_shape = WeightShape::uniform;
  std::uint64_t base_seed = 0;

  // Signal and measurement model.
  double theta_mean = 0.0;
  double theta_var = 1.0;
  double noise_var = 0.0;
  std::string weights_file;  // used when weight_shape == file

  // Wall-clock timing is inherently not reproducible; runtimes are recorded
  // as 0 unless explicitly requested, so reruns stay byte-identical.
  bool measure_runtime = false;
  int threads = 1;

  GampConfig gamp;
  EmConfig em;
};

void validate_sweep_config(const SweepConfig& config);

/// One reconstruction outcome at a grid point.
struct TrialRecord {
  double delta = 0.0;
  double rho = 0.0;
  int trial_index = 0;
  std::uint64_t seed = 0;
  int k_drawn = 0;  // realized support size
  double nmse = 0.0;
  bool success = false;
  int iterations = 0;
  double runtime_ms = 0.0;
};

/// Fitted logistic transition for one delta column. The success probability
/// decays in rho, so the 90%-success point sits below the 10% point.
struct TransitionCurve {
  double delta = 0.0;
  double rho_50 = 0.0;  // fitted midpoint
  double rho_10 = 0.0;  // 10% success
  double rho_90 = 0.0;  // 90% success
  bool fit_converged = false;
  int n_trials = 0;
};

/// Support weight profile. The gaussian shape concentrates the support
/// probability around the middle of the vector:
/// w_j = exp(-25 (j/n - 1/2)^2), j = 0..n-1.
Vector make_weights(int n, WeightShape shape);

/// m x n matrix with i.i.d. N(0, 1/m) entries; deterministic given the seed.
Matrix gen_matrix(int m, int n, std::uint64_t seed);

struct GeneratedSignal {
  Vector x;
  std::vector<int> support;
};

/// Draws x_j non-zero with probability weights[j] * tau, value
/// N(theta_mean, theta_var); deterministic given the seed.
GeneratedSignal gen_signal(int n, const Vector& weights, double tau, double theta_mean,
                           double theta_var, std::uint64_t seed);

struct TauCalibration {
  double tau = 0.0;
  bool clamped = false;  // expected support size falls below k
};

struct InfeasibleSparsityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// tau = k / sum(w), clamped so that max_j w_j tau <= 1. Throws
/// InfeasibleSparsityError when even the clamped tau misses the target
/// expected support size by more than 5%.
TauCalibration calibrate_tau(int k, const Vector& weights);

struct SuccessEval {
  double nmse = 0.0;
  bool success = false;
};

/// nmse = |x_hat - x|^2 / |x|^2; for a zero truth the squared norm of the
/// estimate is used directly.
SuccessEval evaluate_success(const Vector& x_hat, const Vector& x_true, double tol);

/// Per-trial seed, derived from the base seed and the grid position so the
/// record set is independent of the execution schedule.
std::uint64_t trial_seed(std::uint64_t base_seed, int delta_index, int rho_index,
                         int trial);

/// Runs every (delta, rho, trial) cell. Trials that cannot be set up or that
/// diverge are recorded as failures (nmse = inf), never aborting the sweep.
/// Records are ordered delta-major, then rho, then trial, regardless of the
/// thread count.
std::vector<TrialRecord> run_sweep(const SweepConfig& config);

/// As run_sweep, but cells already present in `existing` are reused.
std::vector<TrialRecord> run_sweep_resume(const SweepConfig& config,
                                          const std::vector<TrialRecord>& existing);

}  // namespace wgamp
