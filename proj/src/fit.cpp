#include "wgamp/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace wgamp {

namespace {

constexpr double kLn9 = 2.1972245773362196;

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double log_likelihood(const std::vector<double>& z, const std::vector<bool>& y,
                      double alpha, double beta) {
  double ll = 0.0;
  for (size_t i = 0; i < z.size(); ++i) {
    const double eta = alpha + beta * z[i];
    // log sigmoid(eta) for hits, log sigmoid(-eta) for misses.
    const double t = y[i] ? eta : -eta;
    ll += t >= 0.0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t));
  }
  return ll;
}

}  // namespace

LogisticFit fit_logistic(const std::vector<double>& rho, const std::vector<bool>& success,
                         const FitConfig& config) {
  if (rho.size() != success.size() || rho.empty())
    throw std::invalid_argument("fit_logistic: need matching, non-empty inputs");

  const size_t n = rho.size();
  size_t hits = 0;
  for (bool s : success) hits += s ? 1 : 0;
  if (hits == 0 || hits == n)
    throw DegenerateDataError("fit_logistic: outcomes are constant across all rho");

  std::set<double> distinct(rho.begin(), rho.end());
  if (distinct.size() < 2)
    throw std::invalid_argument("fit_logistic: need at least 2 distinct rho values");

  double min_gap = std::numeric_limits<double>::infinity();
  {
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (double v : distinct) {
      if (!std::isnan(prev)) min_gap = std::min(min_gap, v - prev);
      prev = v;
    }
  }
  const double beta_floor = std::max(config.beta_floor_scale * min_gap, 1e-12);

  // Standardize rho for conditioning of the Newton steps.
  double mu = 0.0;
  for (double v : rho) mu += v;
  mu /= static_cast<double>(n);
  double var = 0.0;
  for (double v : rho) var += (v - mu) * (v - mu);
  const double sd = std::sqrt(var / static_cast<double>(n));
  std::vector<double> z(n);
  for (size_t i = 0; i < n; ++i) z[i] = (rho[i] - mu) / sd;

  // Newton-Raphson with step halving on the standardized model
  // P(success) = sigmoid(alpha + beta z).
  double alpha = 0.0, beta = -1.0;
  double ll = log_likelihood(z, success, alpha, beta);
  bool proper = false;
  constexpr double kSlopeCap = 1e4;
  for (int it = 0; it < config.max_iterations; ++it) {
    double g0 = 0.0, g1 = 0.0, h00 = 0.0, h01 = 0.0, h11 = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double p = sigmoid(alpha + beta * z[i]);
      const double resid = (success[i] ? 1.0 : 0.0) - p;
      const double w = std::max(p * (1.0 - p), 1e-20);
      g0 += resid;
      g1 += resid * z[i];
      h00 += w;
      h01 += w * z[i];
      h11 += w * z[i] * z[i];
    }
    const double det = h00 * h11 - h01 * h01;
    if (!(std::abs(det) > 1e-300)) break;
    double step0 = (h11 * g0 - h01 * g1) / det;
    double step1 = (h00 * g1 - h01 * g0) / det;

    double scale = 1.0;
    double next_ll = -std::numeric_limits<double>::infinity();
    double na = alpha, nb = beta;
    for (int half = 0; half < 40; ++half) {
      na = alpha + scale * step0;
      nb = beta + scale * step1;
      next_ll = log_likelihood(z, success, na, nb);
      if (next_ll >= ll) break;
      scale *= 0.5;
    }
    const double move = std::abs(na - alpha) + std::abs(nb - beta);
    alpha = na;
    beta = nb;
    ll = next_ll;
    if (std::abs(beta) > kSlopeCap) break;  // heading to a separated solution
    if (move < config.tol) {
      proper = true;
      break;
    }
  }

  LogisticFit out;
  if (proper && beta < 0.0) {
    // Back to raw units: eta = a + b rho with b = beta/sd, a = alpha - beta mu/sd.
    const double b = beta / sd;
    const double a = alpha - beta * mu / sd;
    out.rho0 = -a / b;
    out.beta = -1.0 / b;
    out.converged = true;
    return out;
  }

  // Separation rule: midpoint between the highest all-success rho and the
  // lowest all-failure rho, with beta floored.
  std::map<double, std::pair<int, int>> per_rho;  // rho -> (hits, total)
  for (size_t i = 0; i < n; ++i) {
    auto& cell = per_rho[rho[i]];
    cell.first += success[i] ? 1 : 0;
    cell.second += 1;
  }
  double highest_all_success = -std::numeric_limits<double>::infinity();
  double lowest_all_failure = std::numeric_limits<double>::infinity();
  for (const auto& [value, cell] : per_rho) {
    if (cell.first == cell.second) highest_all_success = std::max(highest_all_success, value);
    if (cell.first == 0) lowest_all_failure = std::min(lowest_all_failure, value);
  }
  out.converged = false;
  out.beta = beta_floor;
  if (std::isfinite(highest_all_success) && std::isfinite(lowest_all_failure) &&
      highest_all_success < lowest_all_failure) {
    out.rho0 = 0.5 * (highest_all_success + lowest_all_failure);
  } else if (beta < 0.0) {
    const double b = beta / sd;
    const double a = alpha - beta * mu / sd;
    out.rho0 = -a / b;
    out.beta = std::max(-1.0 / b, beta_floor);
  } else {
    // Success does not decay in rho at all; report the central rho.
    out.rho0 = mu;
  }
  return out;
}

TransitionCurve fit_transition(const std::vector<TrialRecord>& column,
                               const FitConfig& config) {
  if (column.empty()) throw std::invalid_argument("fit_transition: empty column");
  const double delta = column.front().delta;
  std::vector<double> rho;
  std::vector<bool> success;
  rho.reserve(column.size());
  success.reserve(column.size());
  for (const TrialRecord& rec : column) {
    if (rec.delta != delta)
      throw std::invalid_argument("fit_transition: records span multiple delta values");
    rho.push_back(rec.rho);
    success.push_back(rec.success);
  }

  const LogisticFit fit = fit_logistic(rho, success, config);
  TransitionCurve curve;
  curve.delta = delta;
  curve.rho_50 = fit.rho0;
  curve.rho_10 = fit.rho0 + fit.beta * kLn9;
  curve.rho_90 = fit.rho0 - fit.beta * kLn9;
  curve.fit_converged = fit.converged;
  curve.n_trials = static_cast<int>(column.size());
  return curve;
}

}  // namespace wgamp
