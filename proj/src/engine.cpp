#include "wgamp/engine.hpp"

#include <algorithm>
#include <cmath>

namespace wgamp {

namespace {

bool state_finite(const GampState& st) {
  return st.x_mean.allFinite() && st.q.allFinite() && st.o.allFinite() &&
         st.r.allFinite() && st.z_mean.allFinite() && st.z_var.allFinite() &&
         std::isfinite(st.x_var) && std::isfinite(st.v) && std::isfinite(st.s) &&
         std::isfinite(st.u);
}

}  // namespace

GampState gamp_init(const ProblemInstance& problem, const WeightedBGPrior& prior) {
  validate_problem(problem);
  if (prior.n() != problem.n())
    throw std::invalid_argument("gamp_init: prior length does not match problem n");

  const PriorMoments moments = prior_moments(prior);
  GampState st;
  st.x_mean = moments.mean;
  st.x_var = moments.mean_variance;
  st.q = Vector::Zero(problem.m());
  st.o = Vector::Zero(problem.m());
  st.r = Vector::Zero(problem.n());
  st.z_mean = Vector::Zero(problem.m());
  st.z_var = Vector::Zero(problem.m());
  st.iteration = 0;
  st.a_frob_sq = problem.a.squaredNorm();
  return st;
}

GampState gamp_iterate(const GampState& state, const ProblemInstance& problem,
                       const WeightedBGPrior& prior, const AwgnOutputChannel& channel,
                       const GampConfig& config) {
  validate_config(config);
  const Index m = problem.m();
  const Index n = problem.n();
  const double frob = state.a_frob_sq;
  const double floor = config.variance_floor;
  const double noise_var = std::max(channel.noise_var, floor);

  GampState next;
  next.a_frob_sq = frob;
  next.iteration = state.iteration + 1;

  // Shared variance of the intermediate measurement z = A x.
  const double v = std::max(frob / static_cast<double>(m) * state.x_var, floor);
  next.v = v;

  // Correction by the previous scaled residual keeps the pseudo prior on z
  // independent of the current estimate.
  next.o = problem.a * state.x_mean - v * state.q;

  next.z_mean.resize(m);
  next.z_var.resize(m);
  double u_sum = 0.0;
  for (Index l = 0; l < m; ++l) {
    const OutputChannelResult zr = output_channel_awgn(next.o[l], v, problem.y[l], noise_var);
    next.z_mean[l] = zr.posterior_mean;
    next.z_var[l] = zr.posterior_var;
    u_sum += (v - zr.posterior_var) / (v * v);
  }
  next.q = (next.z_mean - next.o) / v;
  const double u = u_sum / static_cast<double>(m);
  next.u = u;

  // s = [(1/n) ||A||_F^2 u]^-1, guarded against u -> 0 and floored below.
  const double denom = std::max(frob / static_cast<double>(n) * u, 1e-300);
  const double s = std::max(1.0 / denom, floor);
  next.s = s;

  next.r = state.x_mean + s * (problem.a.transpose() * next.q);

  Vector x_new(n);
  double var_sum = 0.0;
  for (Index j = 0; j < n; ++j) {
    const InputChannelResult xr = input_channel(next.r[j], s, prior.weights[j], prior.tau,
                                                prior.theta_mean, prior.theta_var);
    x_new[j] = xr.posterior_mean;
    var_sum += xr.posterior_var;
  }
  const double x_var_new = var_sum / static_cast<double>(n);

  const double d = config.damping;
  if (d > 0.0 && state.iteration > 0) {
    next.x_mean = (1.0 - d) * x_new + d * state.x_mean;
    next.x_var = std::max((1.0 - d) * x_var_new + d * state.x_var, floor);
  } else {
    next.x_mean = std::move(x_new);
    next.x_var = std::max(x_var_new, floor);
  }

  if (!state_finite(next))
    throw DivergenceError("gamp: non-finite state at iteration " +
                          std::to_string(next.iteration));
  return next;
}

GampResult gamp_run(const ProblemInstance& problem, const WeightedBGPrior& prior,
                    const AwgnOutputChannel& channel, const GampConfig& config) {
  validate_config(config);
  GampState state = gamp_init(problem, prior);

  GampResult result;
  for (int t = 1; t <= config.max_iterations; ++t) {
    GampState next;
    try {
      next = gamp_iterate(state, problem, prior, channel, config);
    } catch (const DivergenceError& err) {
      if (config.throw_on_divergence) throw;
      result.diverged = true;
      result.diagnostic = err.what();
      break;
    }
    const double delta = (next.x_mean - state.x_mean).norm() /
                         std::max(next.x_mean.norm(), 1e-12);
    state = std::move(next);
    if (config.record_history)
      result.history.push_back({delta, state.x_var, state.v});
    if (delta <= config.convergence_tol) {
      result.converged = true;
      break;
    }
  }

  result.iterations_used = state.iteration;
  result.x_estimate = state.x_mean;
  result.final_state = std::move(state);
  return result;
}

}  // namespace wgamp
