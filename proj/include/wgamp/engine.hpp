#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "wgamp/channels.hpp"
#include "wgamp/model.hpp"

namespace wgamp {

/// Thrown when the iteration produces non-finite state (library-mode policy).
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IterationStats {
  double delta_x = 0.0;  // relative change of the estimate
  double x_var = 0.0;
  double v = 0.0;
};

struct GampResult {
  Vector x_estimate;       // equals final_state.x_mean
  GampState final_state;
  int iterations_used = 0;
  bool converged = false;
  bool diverged = false;
  std::string diagnostic;
  std::vector<IterationStats> history;  // filled when config.record_history
};

/// Sets up iteration 0: prior mean estimate, averaged prior variance,
/// zeroed correction term, and the cached squared Frobenius norm of A.
GampState gamp_init(const ProblemInstance& problem, const WeightedBGPrior& prior);

/// Advances the state by exactly one iteration of the uniform-variance MMSE
/// sweep. Reads only the previous state and returns a fresh one; v, s and
/// x_var are floored at config.variance_floor. Throws DivergenceError when
/// any produced quantity is non-finite.
GampState gamp_iterate(const GampState& state, const ProblemInstance& problem,
                       const WeightedBGPrior& prior, const AwgnOutputChannel& channel,
                       const GampConfig& config);

/// Full run: iterates until the relative change of the estimate drops below
/// config.convergence_tol or max_iterations is reached. On divergence either
/// throws (throw_on_divergence) or returns a flagged, non-converged result
/// holding the last finite state.
GampResult gamp_run(const ProblemInstance& problem, const WeightedBGPrior& prior,
                    const AwgnOutputChannel& channel, const GampConfig& config = {});

}  // namespace wgamp
