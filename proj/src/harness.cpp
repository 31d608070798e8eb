#include "wgamp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <thread>
#include <tuple>

#include "wgamp/rng.hpp"

namespace wgamp {

SolverMode solver_mode_from_string(const std::string& name) {
  if (name == "genie_weighted") return SolverMode::genie_weighted;
  if (name == "genie_unweighted") return SolverMode::genie_unweighted;
  if (name == "em_weighted") return SolverMode::em_weighted;
  throw std::invalid_argument("unknown solver_mode: " + name);
}

std::string to_string(SolverMode mode) {
  switch (mode) {
    case SolverMode::genie_weighted: return "genie_weighted";
    case SolverMode::genie_unweighted: return "genie_unweighted";
    case SolverMode::em_weighted: return "em_weighted";
  }
  return "unknown";
}

WeightShape weight_shape_from_string(const std::string& name) {
  if (name == "uniform") return WeightShape::uniform;
  if (name == "gaussian") return WeightShape::gaussian;
  if (name == "file") return WeightShape::file;
  throw std::invalid_argument("unknown weight_shape: " + name);
}

std::string to_string(WeightShape shape) {
  switch (shape) {
    case WeightShape::uniform: return "uniform";
    case WeightShape::gaussian: return "gaussian";
    case WeightShape::file: return "file";
  }
  return "unknown";
}

namespace {

void require_grid(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw std::invalid_argument(std::string(name) + " is empty");
  double prev = 0.0;
  for (double v : grid) {
    if (!(v > 0.0) || v > 1.0)
      throw std::invalid_argument(std::string(name) + " values must lie in (0, 1]");
    if (!(v > prev))
      throw std::invalid_argument(std::string(name) + " must be strictly increasing");
    prev = v;
  }
}

Vector load_weights_file(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open weights file: " + path);
  std::vector<double> values;
  double v;
  while (in >> v) values.push_back(v);
  if (static_cast<int>(values.size()) != n)
    throw std::invalid_argument("weights file holds " + std::to_string(values.size()) +
                                " values, expected " + std::to_string(n));
  Vector w(n);
  for (int j = 0; j < n; ++j) w[j] = values[j];
  return w;
}

/// Builds a valid prior from a calibrated tau that may exceed 1: only the
/// product w_j * tau enters the model, so the excess scale is folded into
/// the weights.
WeightedBGPrior make_prior(const Vector& weights, double tau, double theta_mean,
                           double theta_var) {
  if (tau <= 1.0) return WeightedBGPrior(weights, tau, theta_mean, theta_var);
  return WeightedBGPrior(weights * tau, 1.0, theta_mean, theta_var);
}

}  // namespace

void validate_sweep_config(const SweepConfig& config) {
  if (config.n < 1) throw std::invalid_argument("sweep: n must be >= 1");
  require_grid(config.delta_grid, "delta_grid");
  require_grid(config.rho_grid, "rho_grid");
  if (config.trials_per_point < 1)
    throw std::invalid_argument("sweep: trials_per_point must be >= 1");
  if (!(config.success_nmse_tol > 0.0))
    throw std::invalid_argument("sweep: success_nmse_tol must be > 0");
  if (!(config.theta_var > 0.0))
    throw std::invalid_argument("sweep: theta_var must be > 0");
  if (!(config.noise_var >= 0.0))
    throw std::invalid_argument("sweep: noise_var must be >= 0");
  if (config.threads < 1) throw std::invalid_argument("sweep: threads must be >= 1");
  if (std::lround(config.delta_grid.front() * config.n) < 1)
    throw std::invalid_argument("sweep: smallest delta rounds to m = 0");
  if (config.weight_shape == WeightShape::file && config.weights_file.empty())
    throw std::invalid_argument("sweep: weight_shape 'file' needs weights_file");
  validate_config(config.gamp);
  validate_em_config(config.em);
}

Vector make_weights(int n, WeightShape shape) {
  if (n < 1) throw std::invalid_argument("make_weights: n must be >= 1");
  switch (shape) {
    case WeightShape::uniform:
      return Vector::Ones(n);
    case WeightShape::gaussian: {
      Vector w(n);
      for (int j = 0; j < n; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(n) - 0.5;
        w[j] = std::exp(-25.0 * t * t);
      }
      return w;
    }
    case WeightShape::file:
      throw std::invalid_argument("make_weights: file shape requires a path");
  }
  throw std::invalid_argument("make_weights: bad shape");
}

Matrix gen_matrix(int m, int n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("gen_matrix: dimensions must be >= 1");
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  Matrix a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = scale * rng.gaussian();
  return a;
}

GeneratedSignal gen_signal(int n, const Vector& weights, double tau, double theta_mean,
                           double theta_var, std::uint64_t seed) {
  if (weights.size() != n) throw std::invalid_argument("gen_signal: weights length != n");
  if (!(theta_var > 0.0)) throw std::invalid_argument("gen_signal: theta_var must be > 0");
  for (int j = 0; j < n; ++j)
    if (weights[j] * tau < 0.0 || weights[j] * tau > 1.0)
      throw std::invalid_argument("gen_signal: weights[j] * tau must lie in [0, 1]");

  Rng rng(seed);
  const double sd = std::sqrt(theta_var);
  GeneratedSignal out;
  out.x = Vector::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (rng.uniform01() < weights[j] * tau) {
      out.x[j] = rng.gaussian(theta_mean, sd);
      out.support.push_back(j);
    }
  }
  return out;
}

TauCalibration calibrate_tau(int k, const Vector& weights) {
  const int n = static_cast<int>(weights.size());
  if (k < 0 || k > n)
    throw std::invalid_argument("calibrate_tau: k must lie in [0, n]");
  if (k == 0) return {0.0, false};

  const double weight_sum = weights.sum();
  const double max_w = weights.maxCoeff();
  if (!(weight_sum > 0.0) || !(max_w > 0.0))
    throw InfeasibleSparsityError("calibrate_tau: weights are all zero");

  TauCalibration out;
  out.tau = static_cast<double>(k) / weight_sum;
  if (max_w * out.tau > 1.0) {
    out.tau = 1.0 / max_w;
    out.clamped = true;
  }
  const double expected_k = out.tau * weight_sum;
  if (std::abs(expected_k - k) > 0.05 * k)
    throw InfeasibleSparsityError("calibrate_tau: cannot reach k = " + std::to_string(k) +
                                  " (best expected support " + std::to_string(expected_k) +
                                  ")");
  return out;
}

SuccessEval evaluate_success(const Vector& x_hat, const Vector& x_true, double tol) {
  if (x_hat.size() != x_true.size())
    throw std::invalid_argument("evaluate_success: length mismatch");
  const double truth_sq = x_true.squaredNorm();
  SuccessEval out;
  out.nmse = truth_sq > 0.0 ? (x_hat - x_true).squaredNorm() / truth_sq
                            : x_hat.squaredNorm();
  out.success = out.nmse <= tol;
  return out;
}

std::uint64_t trial_seed(std::uint64_t base_seed, int delta_index, int rho_index,
                         int trial) {
  std::uint64_t h = base_seed;
  h = seed_chain(h, static_cast<std::uint64_t>(delta_index));
  h = seed_chain(h, static_cast<std::uint64_t>(rho_index));
  h = seed_chain(h, static_cast<std::uint64_t>(trial));
  return h;
}

namespace {

TrialRecord run_trial(const SweepConfig& config, const Vector& weights, int delta_index,
                      int rho_index, int trial) {
  const double delta = config.delta_grid[delta_index];
  const double rho = config.rho_grid[rho_index];
  TrialRecord rec;
  rec.delta = delta;
  rec.rho = rho;
  rec.trial_index = trial;
  rec.seed = trial_seed(config.base_seed, delta_index, rho_index, trial);

  const int n = config.n;
  const int m = static_cast<int>(std::lround(delta * n));
  const int k = static_cast<int>(std::lround(rho * m));

  try {
    const TauCalibration cal = calibrate_tau(k, weights);

    const std::uint64_t matrix_seed = seed_chain(rec.seed, 1);
    const std::uint64_t signal_seed = seed_chain(rec.seed, 2);
    const std::uint64_t noise_seed = seed_chain(rec.seed, 3);

    ProblemInstance problem;
    problem.a = gen_matrix(m, n, matrix_seed);
    GeneratedSignal sig = gen_signal(n, weights, cal.tau, config.theta_mean,
                                     config.theta_var, signal_seed);
    rec.k_drawn = static_cast<int>(sig.support.size());
    problem.y = problem.a * sig.x;
    problem.noise_var = config.noise_var;
    if (config.noise_var > 0.0) {
      Rng noise(noise_seed);
      const double sd = std::sqrt(config.noise_var);
      for (int l = 0; l < m; ++l) problem.y[l] += noise.gaussian(0.0, sd);
    }

    GampConfig gamp_config = config.gamp;
    gamp_config.throw_on_divergence = false;

    const auto t0 = std::chrono::steady_clock::now();
    Vector x_hat;
    int iterations = 0;
    switch (config.solver_mode) {
      case SolverMode::genie_weighted: {
        const GampResult res =
            gamp_run(problem,
                     make_prior(weights, cal.tau, config.theta_mean, config.theta_var),
                     AwgnOutputChannel(config.noise_var), gamp_config);
        x_hat = res.x_estimate;
        iterations = res.iterations_used;
        break;
      }
      case SolverMode::genie_unweighted: {
        // Average sparsity only; the structure is withheld from the solver.
        const double flat_tau = cal.tau * weights.sum() / static_cast<double>(n);
        const GampResult res =
            gamp_run(problem,
                     WeightedBGPrior::uniform(n, flat_tau, config.theta_mean,
                                              config.theta_var),
                     AwgnOutputChannel(config.noise_var), gamp_config);
        x_hat = res.x_estimate;
        iterations = res.iterations_used;
        break;
      }
      case SolverMode::em_weighted: {
        const EmResult res = em_run(problem, weights, config.em, gamp_config);
        x_hat = res.gamp.x_estimate;
        iterations = res.gamp.iterations_used;
        break;
      }
    }
    const auto t1 = std::chrono::steady_clock::now();
    if (config.measure_runtime)
      rec.runtime_ms =
          std::chrono::duration<double, std::milli>(t1 - t0).count();

    const SuccessEval eval = evaluate_success(x_hat, sig.x, config.success_nmse_tol);
    rec.nmse = eval.nmse;
    rec.success = eval.success;
    rec.iterations = iterations;
  } catch (const std::exception&) {
    // Setup or solver failure: keep the sweep going, mark the trial lost.
    rec.nmse = std::numeric_limits<double>::infinity();
    rec.success = false;
    rec.iterations = 0;
  }
  return rec;
}

}  // namespace

std::vector<TrialRecord> run_sweep(const SweepConfig& config) {
  return run_sweep_resume(config, {});
}

std::vector<TrialRecord> run_sweep_resume(const SweepConfig& config,
                                          const std::vector<TrialRecord>& existing) {
  validate_sweep_config(config);
  const Vector weights = config.weight_shape == WeightShape::file
                             ? load_weights_file(config.weights_file, config.n)
                             : make_weights(config.n, config.weight_shape);
  if (config.weight_shape == WeightShape::file &&
      (weights.minCoeff() < 0.0 || weights.maxCoeff() > 1.0))
    throw std::invalid_argument("sweep: file weights must lie in [0, 1]");

  std::map<std::tuple<double, double, int>, TrialRecord> done;
  for (const TrialRecord& rec : existing)
    done[{rec.delta, rec.rho, rec.trial_index}] = rec;

  const int d_count = static_cast<int>(config.delta_grid.size());
  const int r_count = static_cast<int>(config.rho_grid.size());
  const int trials = config.trials_per_point;
  const std::size_t total =
      static_cast<std::size_t>(d_count) * r_count * trials;

  std::vector<TrialRecord> records(total);
  std::vector<char> pending(total, 1);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const int di = static_cast<int>(idx / (static_cast<std::size_t>(r_count) * trials));
    const int ri = static_cast<int>((idx / trials) % r_count);
    const int t = static_cast<int>(idx % trials);
    auto it = done.find({config.delta_grid[di], config.rho_grid[ri], t});
    if (it != done.end()) {
      records[idx] = it->second;
      pending[idx] = 0;
    }
  }

  const auto work = [&](std::size_t idx) {
    const int di = static_cast<int>(idx / (static_cast<std::size_t>(r_count) * trials));
    const int ri = static_cast<int>((idx / trials) % r_count);
    const int t = static_cast<int>(idx % trials);
    records[idx] = run_trial(config, weights, di, ri, t);
  };

  if (config.threads <= 1) {
    for (std::size_t idx = 0; idx < total; ++idx)
      if (pending[idx]) work(idx);
  } else {
    std::atomic<std::size_t> cursor{0};
    const int worker_count = std::min<int>(config.threads, static_cast<int>(total));
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (int w = 0; w < worker_count; ++w) {
      workers.emplace_back([&] {
        for (std::size_t idx = cursor.fetch_add(1); idx < total;
             idx = cursor.fetch_add(1))
          if (pending[idx]) work(idx);
      });
    }
    for (std::thread& worker : workers) worker.join();
  }
  return records;
}

}  // namespace wgamp
