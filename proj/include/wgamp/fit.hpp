#pragma once

#include <stdexcept>
#include <vector>

#include "wgamp/harness.hpp"

namespace wgamp {

/// Thrown when the outcomes are constant across all rho (no transition in range).
struct DegenerateDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitConfig {
  int max_iterations = 100;
  double tol = 1e-12;
  // Floor on beta (as a fraction of the smallest rho gap) used when the data
  // is completely separated and the MLE slope is unbounded.
  double beta_floor_scale = 1e-3;
};

struct LogisticFit {
  double rho0 = 0.0;  // midpoint of P(success | rho) = 1 / (1 + exp((rho - rho0)/beta))
  double beta = 0.0;  // > 0; larger is a wider transition
  bool converged = false;
};

/// Maximum-likelihood fit of the decaying logistic above on the Bernoulli
/// outcomes. Complete separation places rho0 at the midpoint between the
/// highest all-success rho and the lowest all-failure rho, with beta floored.
LogisticFit fit_logistic(const std::vector<double>& rho, const std::vector<bool>& success,
                         const FitConfig& config = {});

/// Fits one delta column of trial records and derives the 10% / 90% points:
/// rho_10 = rho0 + beta ln 9, rho_90 = rho0 - beta ln 9.
TransitionCurve fit_transition(const std::vector<TrialRecord>& column,
                               const FitConfig& config = {});

}  // namespace wgamp
