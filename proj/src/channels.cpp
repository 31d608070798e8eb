#include "wgamp/channels.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

namespace wgamp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112353;

double stable_sigmoid(double d) {
  if (d >= 0.0) return 1.0 / (1.0 + std::exp(-d));
  const double e = std::exp(d);
  return e / (1.0 + e);
}

void check_scalar_inputs(double r, double s, double w, double tau, double theta_mean,
                         double theta_var) {
  if (!(s > 0.0)) throw std::domain_error("input channel: s must be > 0");
  if (!(theta_var > 0.0)) throw std::domain_error("input channel: theta_var must be > 0");
  if (!std::isfinite(r) || !std::isfinite(s) || !std::isfinite(w) ||
      !std::isfinite(tau) || !std::isfinite(theta_mean) || !std::isfinite(theta_var))
    throw std::domain_error("input channel: non-finite input");
  const double wtau = w * tau;
  if (wtau < 0.0 || wtau > 1.0)
    throw std::domain_error("input channel: w * tau must lie in [0, 1]");
}

/// Log-odds of the non-zero component: log(w tau N(r; theta_mean, s + theta_var))
/// minus log((1 - w tau) N(r; 0, s)). Returns +inf / -inf at the pure-Gaussian
/// and pure-spike boundaries.
double support_logit(double r, double s, double w, double tau, double theta_mean,
                     double theta_var) {
  const double wtau = w * tau;
  if (wtau <= 0.0) return -std::numeric_limits<double>::infinity();
  if (wtau >= 1.0) return std::numeric_limits<double>::infinity();
  return std::log(wtau) - std::log1p(-wtau) +
         log_normal_pdf(r, theta_mean, s + theta_var) - log_normal_pdf(r, 0.0, s);
}

}  // namespace

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

double input_support_prob(double r, double s, double w, double tau, double theta_mean,
                          double theta_var) {
  check_scalar_inputs(r, s, w, tau, theta_mean, theta_var);
  const double d = support_logit(r, s, w, tau, theta_mean, theta_var);
  if (d == -std::numeric_limits<double>::infinity()) return 0.0;
  if (d == std::numeric_limits<double>::infinity()) return 1.0;
  return stable_sigmoid(d);
}

InputChannelResult input_channel(double r, double s, double w, double tau,
                                 double theta_mean, double theta_var) {
  check_scalar_inputs(r, s, w, tau, theta_mean, theta_var);
  const double wtau = w * tau;
  if (wtau <= 0.0) return {0.0, 0.0, 0.0};

  // Moments of the non-zero component: product of the slab and the pseudo
  // measurement is Gaussian with variance nu and mean gamma.
  const double inv_nu = 1.0 / theta_var + 1.0 / s;
  const double nu = 1.0 / inv_nu;
  const double gamma = (theta_mean / theta_var + r / s) * nu;

  InputChannelResult out;
  if (wtau >= 1.0) {
    out.support_prob = 1.0;
    out.posterior_mean = gamma;
    out.posterior_var = nu;
    return out;
  }
  const double pi = stable_sigmoid(support_logit(r, s, w, tau, theta_mean, theta_var));
  out.support_prob = pi;
  out.posterior_mean = pi * gamma;
  // Equivalent to pi*(nu + gamma^2) - (pi*gamma)^2 but free of the
  // cancellation that form has at small s.
  out.posterior_var = pi * nu + pi * (1.0 - pi) * gamma * gamma;
  return out;
}

OutputChannelResult output_channel_awgn(double o, double v, double y, double noise_var) {
  if (!(v > 0.0)) throw std::domain_error("output channel: v must be > 0");
  if (!(noise_var >= 0.0)) throw std::domain_error("output channel: noise_var must be >= 0");
  const double g = v / (v + noise_var);
  OutputChannelResult out;
  out.posterior_mean = o + g * (y - o);
  out.posterior_var = g * noise_var;  // v * noise_var / (v + noise_var)
  return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite(int order) {
  if (order < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
  static std::mutex cache_mutex;
  static std::map<int, std::pair<Eigen::VectorXd, Eigen::VectorXd>> cache;
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
  }

  // Golub-Welsch: eigenvalues of the symmetric tridiagonal Jacobi matrix with
  // zero diagonal and off-diagonal sqrt(k/2) are the nodes; the squared first
  // eigenvector components scaled by sqrt(pi) are the weights.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = std::sqrt(0.5 * k);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("gauss_hermite: eigen decomposition failed");

  Eigen::VectorXd nodes = solver.eigenvalues();
  Eigen::VectorXd weights(order);
  const double sqrt_pi = std::sqrt(3.141592653589793238462643383279502884);
  for (int i = 0; i < order; ++i) {
    const double first = solver.eigenvectors()(0, i);
    weights[i] = sqrt_pi * first * first;
  }
  auto result = std::make_pair(std::move(nodes), std::move(weights));
  std::lock_guard<std::mutex> lock(cache_mutex);
  cache[order] = result;
  return result;
}

OracleMoments oracle_input_moments(double r, double s, double w, double tau,
                                   double theta_mean, double theta_var,
                                   const OracleConfig& config) {
  check_scalar_inputs(r, s, w, tau, theta_mean, theta_var);
  const double wtau = w * tau;

  OracleMoments out;
  if (wtau <= 0.0) {
    out.moments = {0.0, 0.0, 0.0};
    return out;
  }

  // Node placement against the product measure N(gamma, nu); the integrand is
  // evaluated as raw log-densities, never through the closed-form channel.
  const double nu = 1.0 / (1.0 / theta_var + 1.0 / s);
  const double gamma = (theta_mean / theta_var + r / s) * nu;
  const auto [nodes, weights] = gauss_hermite(config.order);
  const int order = static_cast<int>(nodes.size());
  const double scale = std::sqrt(2.0 * nu);
  const double log_sqrt_pi = 0.5 * std::log(3.141592653589793238462643383279502884);

  // log of w_i/sqrt(pi) * slab(x_i) * like(x_i) / placement(x_i), summed by
  // log-sum-exp; then normalized node masses give the slab moments.
  std::vector<double> log_terms(order);
  std::vector<double> xs(order);
  double max_term = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < order; ++i) {
    const double x = gamma + scale * nodes[i];
    xs[i] = x;
    const double lt = std::log(weights[i]) - log_sqrt_pi +
                      log_normal_pdf(x, theta_mean, theta_var) + log_normal_pdf(x, r, s) -
                      log_normal_pdf(x, gamma, nu);
    log_terms[i] = lt;
    if (lt > max_term) max_term = lt;
  }
  double z_sum = 0.0;
  for (int i = 0; i < order; ++i) z_sum += std::exp(log_terms[i] - max_term);
  const double log_z1 = max_term + std::log(z_sum);  // slab evidence

  double m1 = 0.0, m2c = 0.0;
  for (int i = 0; i < order; ++i) {
    const double p = std::exp(log_terms[i] - log_z1);
    m1 += p * xs[i];
  }
  for (int i = 0; i < order; ++i) {
    const double p = std::exp(log_terms[i] - log_z1);
    const double d = xs[i] - m1;
    m2c += p * d * d;  // central second moment of the slab component
  }

  double pi;
  if (wtau >= 1.0) {
    pi = 1.0;
  } else {
    const double log_z0 = std::log1p(-wtau) + log_normal_pdf(r, 0.0, s);
    const double gap = std::log(wtau) + log_z1 - log_z0;
    pi = stable_sigmoid(gap);
    if (std::abs(gap) > config.log_gap_bound) out.precision_ok = false;
  }

  out.moments.support_prob = pi;
  out.moments.posterior_mean = pi * m1;
  out.moments.posterior_var = pi * m2c + pi * (1.0 - pi) * m1 * m1;
  return out;
}

}  // namespace wgamp
