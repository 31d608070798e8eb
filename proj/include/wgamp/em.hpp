#pragma once

#include "wgamp/engine.hpp"
#include "wgamp/model.hpp"

namespace wgamp {

struct EmConfig {
  int max_em_iterations = 50;
  double em_tol = 1e-4;          // relative parameter-change stop
  double init_snr_guess = 100.0; // assumed signal-to-noise ratio at startup
  bool estimate_tau = true;
  bool estimate_theta_mean = true;
  bool estimate_theta_var = true;
  bool estimate_noise_var = true;
};

void validate_em_config(const EmConfig& config);

struct EmInit {
  WeightedBGPrior prior;
  AwgnOutputChannel channel;
  bool degenerate = false;  // observations were all zero
};

/// Moment-matching initial guess for the prior and noise parameters. The
/// weights are treated as known structure; tau starts at the value whose
/// expected support size is m/2.
EmInit em_init(const ProblemInstance& problem, const Vector& weights,
               const EmConfig& config);

struct EmUpdate {
  WeightedBGPrior prior;
  AwgnOutputChannel channel;
  bool empty_support = false;  // posterior support mass vanished; parameters kept
};

/// One M-step given a finished run: tau maximizes the weighted Bernoulli
/// likelihood of the posterior support probabilities (1-D concave problem,
/// solved by safeguarded Newton), the slab moments are posterior averages
/// over the support, and the noise variance is the mean squared residual
/// plus the posterior z variance. Parameters whose estimate flag is off pass
/// through unchanged.
EmUpdate em_update(const ProblemInstance& problem, const WeightedBGPrior& prior,
                   const AwgnOutputChannel& channel, const GampResult& gamp_result,
                   const EmConfig& config);

struct EmResult {
  GampResult gamp;
  WeightedBGPrior prior;
  AwgnOutputChannel channel;
  int em_iterations = 0;
  bool degenerate_init = false;
};

/// Alternates full solver runs and M-steps until the largest relative
/// parameter change drops below em_tol or max_em_iterations is reached.
/// Solver divergence is propagated as a flagged (non-converged) result.
EmResult em_run(const ProblemInstance& problem, const Vector& weights,
                const EmConfig& em_config, const GampConfig& gamp_config);

/// Maximizer of sum_j [pi_j log(w_j t) + (1 - pi_j) log(1 - w_j t)] over
/// t in (0, min(1, 1/max w)). Exposed for direct testing against a grid
/// search; entries with w_j = 0 do not contribute.
double solve_tau_update(const Vector& weights, const Vector& support_probs);

}  // namespace wgamp
