#include "wgamp/em.hpp"

#include <algorithm>
#include <cmath>

#include "wgamp/channels.hpp"

namespace wgamp {

namespace {

double rel_change(double old_value, double new_value) {
  return std::abs(new_value - old_value) / std::max(std::abs(old_value), 1e-12);
}

}  // namespace

void validate_em_config(const EmConfig& config) {
  if (config.max_em_iterations < 1)
    throw std::invalid_argument("em config: max_em_iterations must be >= 1");
  if (!(config.em_tol > 0.0))
    throw std::invalid_argument("em config: em_tol must be > 0");
  if (!(config.init_snr_guess > 0.0))
    throw std::invalid_argument("em config: init_snr_guess must be > 0");
}

EmInit em_init(const ProblemInstance& problem, const Vector& weights,
               const EmConfig& config) {
  validate_problem(problem);
  validate_em_config(config);
  if (weights.size() != problem.n())
    throw std::invalid_argument("em_init: weights length does not match problem n");
  if (!weights.allFinite() || weights.minCoeff() < 0.0 || weights.maxCoeff() > 1.0)
    throw std::invalid_argument("em_init: weights must lie in [0, 1]");
  const double weight_sum = weights.sum();
  if (!(weight_sum > 0.0))
    throw std::invalid_argument("em_init: weights are all zero");

  const double m = static_cast<double>(problem.m());
  const double n = static_cast<double>(problem.n());
  const double y_sq = problem.y.squaredNorm();
  const double max_w = weights.maxCoeff();

  // tau such that the expected support size is m/2, kept inside the domain.
  double tau0 = 0.5 * m / weight_sum;
  tau0 = std::min({tau0, (1.0 - 1e-6) / max_w, 1.0});

  double noise_var0 = y_sq / ((config.init_snr_guess + 1.0) * m);
  const double frob = problem.a.squaredNorm();
  double theta_var0 =
      (y_sq - m * noise_var0) / (frob * (weight_sum * tau0) / n);
  theta_var0 = std::max(theta_var0, 1e-6);

  EmInit out{WeightedBGPrior(weights, tau0, 0.0, theta_var0),
             AwgnOutputChannel(noise_var0), false};
  if (y_sq == 0.0) out.degenerate = true;
  return out;
}

double solve_tau_update(const Vector& weights, const Vector& support_probs) {
  if (weights.size() != support_probs.size())
    throw std::invalid_argument("solve_tau_update: length mismatch");
  const Index n = weights.size();

  double max_w = 0.0, pi_sum = 0.0, w_sum = 0.0;
  for (Index j = 0; j < n; ++j) {
    if (weights[j] <= 0.0) continue;
    max_w = std::max(max_w, weights[j]);
    pi_sum += support_probs[j];
    w_sum += weights[j];
  }
  if (max_w <= 0.0) return 0.0;

  const double t_hi = 1.0 / max_w;
  // Derivative of the concave objective.
  const auto grad = [&](double t) {
    double g = pi_sum / t;
    for (Index j = 0; j < n; ++j) {
      if (weights[j] <= 0.0) continue;
      g -= (1.0 - support_probs[j]) * weights[j] / (1.0 - weights[j] * t);
    }
    return g;
  };
  const auto hess = [&](double t) {
    double h = -pi_sum / (t * t);
    for (Index j = 0; j < n; ++j) {
      if (weights[j] <= 0.0) continue;
      const double denom = 1.0 - weights[j] * t;
      h -= (1.0 - support_probs[j]) * weights[j] * weights[j] / (denom * denom);
    }
    return h;
  };

  double lo = t_hi * 1e-15;
  double hi = t_hi * (1.0 - 1e-12);
  if (grad(lo) <= 0.0) return 0.0;                       // vanishing support mass
  if (grad(hi) >= 0.0) return std::min(hi, 1.0);         // all mass on the slab

  // Newton from the constant-weight closed form, safeguarded by bisection.
  double t = std::clamp(pi_sum / w_sum, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double g = grad(t);
    if (g > 0.0)
      lo = t;
    else
      hi = t;
    const double h = hess(t);
    double next = t - g / h;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * t_hi) {
      t = next;
      break;
    }
    t = next;
  }
  return std::min(t, 1.0);
}

EmUpdate em_update(const ProblemInstance& problem, const WeightedBGPrior& prior,
                   const AwgnOutputChannel& channel, const GampResult& gamp_result,
                   const EmConfig& config) {
  const Index n = problem.n();
  const Index m = problem.m();
  const GampState& st = gamp_result.final_state;
  if (st.r.size() != n || !(st.s > 0.0))
    throw std::invalid_argument("em_update: result does not carry a usable (r, s) pair");

  // Per-entry posterior quantities at the final pseudo measurement.
  const double nu = 1.0 / (1.0 / prior.theta_var + 1.0 / st.s);
  Vector pis(n), gammas(n);
  double pi_sum = 0.0;
  for (Index j = 0; j < n; ++j) {
    pis[j] = input_support_prob(st.r[j], st.s, prior.weights[j], prior.tau,
                                prior.theta_mean, prior.theta_var);
    gammas[j] = (prior.theta_mean / prior.theta_var + st.r[j] / st.s) * nu;
    pi_sum += pis[j];
  }

  double tau = prior.tau;
  double theta_mean = prior.theta_mean;
  double theta_var = prior.theta_var;
  double noise_var = channel.noise_var;
  bool empty_support = pi_sum < 1e-12;

  if (!empty_support) {
    if (config.estimate_tau) tau = solve_tau_update(prior.weights, pis);
    if (config.estimate_theta_mean) theta_mean = pis.dot(gammas) / pi_sum;
    if (config.estimate_theta_var) {
      double acc = 0.0;
      for (Index j = 0; j < n; ++j) {
        const double d = gammas[j] - theta_mean;
        acc += pis[j] * (nu + d * d);
      }
      theta_var = std::max(acc / pi_sum, 1e-12);
    }
  }
  if (config.estimate_noise_var) {
    double acc = 0.0;
    for (Index l = 0; l < m; ++l) {
      const double res = problem.y[l] - st.z_mean[l];
      acc += res * res + st.z_var[l];
    }
    noise_var = acc / static_cast<double>(m);
  }

  return EmUpdate{WeightedBGPrior(prior.weights, tau, theta_mean, theta_var),
                  AwgnOutputChannel(noise_var), empty_support};
}

EmResult em_run(const ProblemInstance& problem, const Vector& weights,
                const EmConfig& em_config, const GampConfig& gamp_config) {
  validate_em_config(em_config);
  validate_config(gamp_config);

  EmInit init = em_init(problem, weights, em_config);
  WeightedBGPrior prior = init.prior;
  AwgnOutputChannel channel = init.channel;

  // Sweeps must record divergence, not abort on it.
  GampConfig run_config = gamp_config;
  run_config.throw_on_divergence = false;

  GampResult gamp;
  int iterations = 0;
  for (int i = 1; i <= em_config.max_em_iterations; ++i) {
    gamp = gamp_run(problem, prior, channel, run_config);
    iterations = i;
    if (gamp.diverged) break;

    const EmUpdate upd = em_update(problem, prior, channel, gamp, em_config);
    const double delta = std::max(
        {rel_change(prior.tau, upd.prior.tau),
         rel_change(prior.theta_mean, upd.prior.theta_mean),
         rel_change(prior.theta_var, upd.prior.theta_var),
         rel_change(channel.noise_var, upd.channel.noise_var)});
    prior = upd.prior;
    channel = upd.channel;
    if (delta <= em_config.em_tol) break;
  }

  return EmResult{std::move(gamp), std::move(prior), channel, iterations,
                  init.degenerate};
}

}  // namespace wgamp
