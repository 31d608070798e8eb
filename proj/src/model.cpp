#include "wgamp/model.hpp"

#include <cmath>
#include <string>

namespace wgamp {

void validate_problem(const ProblemInstance& problem) {
  const Index m = problem.m();
  const Index n = problem.n();
  if (m < 1 || n < 1)
    throw std::invalid_argument("problem: m and n must be >= 1");
  if (problem.y.size() != m)
    throw std::invalid_argument("problem: dimension mismatch, y has length " +
                                std::to_string(problem.y.size()) + " but m = " +
                                std::to_string(m));
  if (problem.truth && problem.truth->size() != n)
    throw std::invalid_argument("problem: dimension mismatch, truth_x has length " +
                                std::to_string(problem.truth->size()) + " but n = " +
                                std::to_string(n));
  if (!problem.a.allFinite() || !problem.y.allFinite() ||
      (problem.truth && !problem.truth->allFinite()))
    throw std::invalid_argument("problem: non-finite data");
  if (!std::isfinite(problem.noise_var) || problem.noise_var < 0.0)
    throw std::invalid_argument("problem: noise_var must be finite and >= 0");
  if (!(problem.a.squaredNorm() > 0.0))
    throw std::invalid_argument("problem: zero matrix (Frobenius norm is 0)");
}

WeightedBGPrior::WeightedBGPrior(Vector weights_in, double tau_in, double theta_mean_in,
                                 double theta_var_in)
    : weights(std::move(weights_in)),
      tau(tau_in),
      theta_mean(theta_mean_in),
      theta_var(theta_var_in) {
  if (weights.size() < 1)
    throw std::invalid_argument("prior: weights must be non-empty");
  if (!weights.allFinite() || weights.minCoeff() < 0.0 || weights.maxCoeff() > 1.0)
    throw std::invalid_argument("prior: weights must lie in [0, 1]");
  if (!std::isfinite(tau) || tau < 0.0 || tau > 1.0)
    throw std::invalid_argument("prior: tau must lie in [0, 1]");
  if (weights.maxCoeff() * tau > 1.0)
    throw std::invalid_argument("prior: weights[j] * tau must not exceed 1");
  if (!std::isfinite(theta_mean))
    throw std::invalid_argument("prior: theta_mean must be finite");
  if (!std::isfinite(theta_var) || !(theta_var > 0.0))
    throw std::invalid_argument("prior: theta_var must be finite and > 0");
}

WeightedBGPrior WeightedBGPrior::uniform(Index n, double tau, double theta_mean,
                                         double theta_var) {
  return WeightedBGPrior(Vector::Ones(n), tau, theta_mean, theta_var);
}

void validate_config(const GampConfig& config) {
  if (config.max_iterations < 1)
    throw std::invalid_argument("config: max_iterations must be >= 1");
  if (!(config.convergence_tol > 0.0))
    throw std::invalid_argument("config: convergence_tol must be > 0");
  if (!(config.variance_floor > 0.0))
    throw std::invalid_argument("config: variance_floor must be > 0");
  if (!(config.damping >= 0.0) || config.damping >= 1.0)
    throw std::invalid_argument("config: damping must lie in [0, 1)");
}

PriorMoments prior_moments(const WeightedBGPrior& prior) {
  const Index n = prior.n();
  PriorMoments out;
  out.mean.resize(n);
  double var_sum = 0.0;
  for (Index j = 0; j < n; ++j) {
    const double p = prior.weights[j] * prior.tau;  // P(x_j != 0)
    out.mean[j] = p * prior.theta_mean;
    // Var = E[x^2] - E[x]^2 = p*(theta_var + theta_mean^2) - (p*theta_mean)^2,
    // rearranged so rounding cannot turn it negative.
    var_sum += p * prior.theta_var + p * (1.0 - p) * prior.theta_mean * prior.theta_mean;
  }
  out.mean_variance = var_sum / static_cast<double>(n);
  return out;
}

}  // namespace wgamp
