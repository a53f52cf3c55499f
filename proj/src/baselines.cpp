#include "slo/baselines.hpp"

#include <chrono>
#include <cmath>
#include <functional>

namespace slo {

void BpgConfig::validate() const {
  if (poly_degree_n < 2) throw ConfigError("bpg: polynomial degree must be at least 2");
  if (!(l_relative > 0.0) || !std::isfinite(l_relative)) throw ConfigError("bpg: L must be positive");
  if (!(eps0 > 0.0)) throw ConfigError("bpg: eps0 must be positive");
  if (max_doublings < 1) throw ConfigError("bpg: max_doublings must be positive");
}

double bpg_subproblem(const Vector& g, double l_relative, int n, double eps0, int max_doublings) {
  const double gn = g.norm();
  if (!(gn > 0.0)) throw ContractError("bpg_subproblem: g must be nonzero");
  if (n < 2 || !(l_relative > 0.0) || !(eps0 > 0.0))
    throw ContractError("bpg_subproblem: need n >= 2, L > 0, eps0 > 0");

  const double g2 = gn * gn;
  const double gpow = std::pow(gn, n);
  auto dp = [&](double rho) {
    return -g2 + l_relative * gpow * std::pow(rho, n - 1) + l_relative * g2 * rho;
  };

  double lo = 0.0, hi = 1.0;
  for (int i = 0; dp(hi) < 0.0; ++i) {
    if (i == max_doublings) throw BudgetError("bpg_subproblem: bracket expansion did not terminate");
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > eps0) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (dp(mid) < 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

Vector bpg_h_gradient(const Vector& x, int n) {
  return (std::pow(x.norm(), n - 2) + 1.0) * x;
}

Vector bpg_step(const Vector& x, const Vector& grad, const BpgConfig& config) {
  const Vector g = grad - config.l_relative * bpg_h_gradient(x, config.poly_degree_n);
  if (g.squaredNorm() == 0.0) return Vector::Zero(x.size());
  const double rho = bpg_subproblem(g, config.l_relative, config.poly_degree_n, config.eps0,
                                    config.max_doublings);
  return -rho * g;
}

Vector bpg_step(const Objective& f, const Vector& x, const BpgConfig& config) {
  return bpg_step(x, f.gradient(x), config);
}

namespace {

using Step = std::function<Vector(const Vector& x, const Vector& grad)>;

// Shared loop for the baselines. Records use epoch 1 and dist_from_anchor
// relative to x0.
RunResult iterate(const Objective& f, const Vector& x0, const Budgets& budgets, const Step& step,
                  bool detect_divergence) {
  if (x0.size() != f.dim()) throw DimensionError("baseline: start point has wrong dimension");
  require_finite(x0, "baseline start point");
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };

  RunResult res;
  std::int64_t evals = 0;
  Vector x = x0;
  double fx = f.value(x);
  Vector g = f.gradient(x);
  ++evals;
  require_finite(g, "baseline gradient");
  const double f_start = fx;
  res.trace.push_back({1, 0, fx, g.norm(), 0.0, evals, elapsed()});

  for (std::int64_t k = 0;; ++k) {
    if (g.norm() <= budgets.stop_grad_tol) {
      res.termination = Termination::GradientTolerance;
      break;
    }
    if (k >= budgets.max_iters) {
      res.termination = Termination::EpochBudget;
      break;
    }
    if (evals >= budgets.max_grad_evals) {
      res.termination = Termination::EvalBudget;
      break;
    }
    if (budgets.time_budget_s && elapsed() >= *budgets.time_budget_s) {
      res.termination = Termination::TimeBudget;
      break;
    }
    Vector next = step(x, g);
    if (!next.allFinite()) {
      if (!detect_divergence) require_finite(next, "baseline iterate");
      res.termination = Termination::Diverged;
      break;
    }
    const double fn = f.value(next);
    Vector gn = f.gradient(next);
    ++evals;
    const bool blown = !std::isfinite(fn) || !gn.allFinite() || fn > f_start + 1e12;
    if (blown && !detect_divergence) {
      require_finite(fn, "baseline value");
      require_finite(gn, "baseline gradient");
    }
    x = std::move(next);
    fx = fn;
    g = std::move(gn);
    res.trace.push_back({1, k + 1, fx, g.norm(), (x - x0).norm(), evals, elapsed()});
    if (blown) {
      res.termination = Termination::Diverged;
      break;
    }
  }
  res.final_point = x;
  res.final_grad_norm = g.norm();
  res.epochs_completed = 0;
  return res;
}

}  // namespace

RunResult gd_fixed(const Objective& f, const Vector& x0, double step, const Budgets& budgets) {
  if (!(step > 0.0)) throw ContractError("gd_fixed: step must be positive");
  return iterate(f, x0, budgets, [step](const Vector& x, const Vector& g) -> Vector {
    return x - step * g;
  }, true);
}

RunResult run_bpg(const Objective& f, const Vector& x0, const BpgConfig& config,
                  const Budgets& budgets) {
  config.validate();
  return iterate(f, x0, budgets, [&config](const Vector& x, const Vector& g) -> Vector {
    return bpg_step(x, g, config);
  }, false);
}

}  // namespace slo
