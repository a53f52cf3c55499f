#pragma once

#include "slo/core.hpp"

#include <cstdint>
#include <optional>

namespace slo {

/// Stopping rules shared by the baseline methods.
struct Budgets {
  std::int64_t max_iters = 1'000'000;
  std::int64_t max_grad_evals = 10'000'000;
  std::optional<double> time_budget_s;
  double stop_grad_tol = 0.0;  ///< stop once |grad| <= this
};

/// Bregman proximal gradient with h(x) = |x|^n/n + |x|^2/2.
struct BpgConfig {
  int poly_degree_n = 4;
  double l_relative = 1.0;
  double eps0 = 1e-16;  ///< bracket width of the scalar subproblem
  int max_doublings = 1000;

  void validate() const;
};

/// Positive root of p'(rho) = -|g|^2 + L |g|^n rho^(n-1) + L |g|^2 rho by
/// doubling then bisection; returns the midpoint of the final bracket.
///
/// Bisection also stops once the midpoint rounds onto a bracket end, since
/// a bracket narrower than eps0 may not be representable near the root.
double bpg_subproblem(const Vector& g, double l_relative, int n, double eps0,
                      int max_doublings = 1000);

/// grad h(x) = (|x|^(n-2) + 1) x.
Vector bpg_h_gradient(const Vector& x, int n);

/// Bregman step: x+ = -rho g with g = grad f(x) - L grad h(x).
Vector bpg_step(const Objective& f, const Vector& x, const BpgConfig& config);
Vector bpg_step(const Vector& x, const Vector& grad, const BpgConfig& config);

/// Fixed-step gradient descent. Stops with Termination::Diverged once f has
/// risen more than 1e12 above its starting value or an iterate is not finite.
RunResult gd_fixed(const Objective& f, const Vector& x0, double step, const Budgets& budgets);

RunResult run_bpg(const Objective& f, const Vector& x0, const BpgConfig& config,
                  const Budgets& budgets);

}  // namespace slo
