#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

namespace wgamp {

// Measurement matrices are stored dense row-major; experiments use
// unstructured Gaussian ensembles, so no operator abstraction is needed.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Linear measurement model y = A x + e with optional ground truth.
struct ProblemInstance {
  Matrix a;                      // m x n
  Vector y;                      // length m
  std::optional<Vector> truth;   // length n, when the signal is known
  double noise_var = 0.0;        // variance of e

  Index m() const { return a.rows(); }
  Index n() const { return a.cols(); }
};

/// Throws std::invalid_argument unless the instance is well formed:
/// positive dimensions, matching vector lengths, finite data, and a
/// strictly positive Frobenius norm.
void validate_problem(const ProblemInstance& problem);

/// Spike-and-slab prior with a Gaussian slab and per-entry support weights:
/// entry j is non-zero with probability weights[j] * tau, in which case it is
/// N(theta_mean, theta_var). weights[j] = 1 for all j recovers the plain
/// Bernoulli-Gauss prior.
struct WeightedBGPrior {
  Vector weights;      // per-entry, each in [0, 1]
  double tau;          // shared sparsity level in [0, 1]
  double theta_mean;   // slab mean
  double theta_var;    // slab variance, > 0

  WeightedBGPrior(Vector weights, double tau, double theta_mean, double theta_var);

  static WeightedBGPrior uniform(Index n, double tau, double theta_mean, double theta_var);

  Index n() const { return weights.size(); }
};

/// Additive white Gaussian noise measurement channel p(y|z) = N(y; z, noise_var).
/// Evaluation sites floor noise_var at the configured variance floor.
struct AwgnOutputChannel {
  double noise_var = 0.0;

  explicit AwgnOutputChannel(double noise_var_in) : noise_var(noise_var_in) {
    if (!(noise_var >= 0.0) || !std::isfinite(noise_var))
      throw std::invalid_argument("AwgnOutputChannel: noise_var must be finite and >= 0");
  }
};

/// All iteration-t quantities of the uniform-variance iteration, plus the
/// cached squared Frobenius norm of A (loop-invariant).
struct GampState {
  Vector x_mean;        // current signal estimate
  double x_var = 0.0;   // shared signal variance
  Vector q;             // length m
  Vector o;             // length m
  double v = 0.0;
  double s = 0.0;
  Vector r;             // length n
  Vector z_mean;        // length m
  Vector z_var;         // length m
  double u = 0.0;
  int iteration = 0;
  double a_frob_sq = 0.0;
};

struct GampConfig {
  int max_iterations = 300;
  double convergence_tol = 1e-6;
  double variance_floor = 1e-12;
  double damping = 0.0;  // convex-combination factor on x_mean / x_var, in [0, 1)
  // Divergence policy: throw (library use) or return a flagged result
  // (sweeps must record failures, not abort).
  bool throw_on_divergence = true;
  bool record_history = false;
};

/// Validates a GampConfig; throws std::invalid_argument on violation.
void validate_config(const GampConfig& config);

struct PriorMoments {
  Vector mean;           // E[x_j] per entry
  double mean_variance;  // (1/n) sum_j Var(x_j)
};

/// Prior mean vector and averaged per-entry variance, used to start the
/// iteration: E[x_j] = w_j tau theta_mean and
/// Var(x_j) = w_j tau (theta_var + theta_mean^2) - (w_j tau theta_mean)^2.
PriorMoments prior_moments(const WeightedBGPrior& prior);

}  // namespace wgamp
