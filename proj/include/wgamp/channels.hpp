#pragma once

#include <utility>

#include <Eigen/Dense>

namespace wgamp {

/// Scalar posterior moments produced by the input channel for one entry.
struct InputChannelResult {
  double posterior_mean = 0.0;
  double posterior_var = 0.0;
  double support_prob = 0.0;  // posterior probability that the entry is non-zero
};

/// Scalar posterior moments of z given one observation.
struct OutputChannelResult {
  double posterior_mean = 0.0;
  double posterior_var = 0.0;
};

/// Gaussian log-density log N(x; mean, var).
double log_normal_pdf(double x, double mean, double var);

/// Posterior probability that an entry is non-zero, given the pseudo
/// measurement x ~ N(r, s) and the weighted spike-and-slab prior
/// (1 - w tau) delta(x) + w tau N(x; theta_mean, theta_var).
/// Evaluated through the log-evidence gap so extreme r / sqrt(s) neither
/// overflows nor underflows.
double input_support_prob(double r, double s, double w, double tau, double theta_mean,
                          double theta_var);

/// Posterior mean and variance of one entry under the weighted
/// Bernoulli-Gauss prior and pseudo measurement N(r, s).
InputChannelResult input_channel(double r, double s, double w, double tau,
                                 double theta_mean, double theta_var);

/// AWGN measurement channel: posterior moments of z given z ~ N(o, v) and
/// y = z + e, e ~ N(0, noise_var). Standard Gaussian conjugacy.
OutputChannelResult output_channel_awgn(double o, double v, double y, double noise_var);

struct OracleConfig {
  int order = 61;              // Gauss-Hermite order
  double log_gap_bound = 600;  // |log evidence gap| beyond which precision is suspect
};

struct OracleMoments {
  InputChannelResult moments;
  bool precision_ok = true;
};

/// Independent verification route for input_channel: the spike mass is
/// evaluated analytically and the slab component is integrated by
/// Gauss-Hermite quadrature with nodes placed against the product of the
/// prior slab and the pseudo-measurement Gaussian. Never touches the
/// closed-form channel expressions.
OracleMoments oracle_input_moments(double r, double s, double w, double tau,
                                   double theta_mean, double theta_var,
                                   const OracleConfig& config = {});

/// Nodes and weights for ∫ e^{-t^2} f(t) dt of the given order,
/// from the eigen-decomposition of the Jacobi matrix.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite(int order);

}  // namespace wgamp
