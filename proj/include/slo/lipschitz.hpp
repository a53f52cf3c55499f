#pragma once

#include "slo/core.hpp"

#include <cstdint>

namespace slo {

enum class EstimateMethod { Analytic, Sampled };

/// A local Lipschitz constant of the gradient (order 1) or Hessian (order 2)
/// over the ball B(center, radius).
struct LipschitzEstimate {
  int order = 1;
  double value = 1.0;  ///< always >= 1
  Vector center;
  double radius = 0.0;
  EstimateMethod method = EstimateMethod::Analytic;
  int n_samples = 0;
  std::uint64_t seed = 0;
  std::int64_t grad_evals = 0;  ///< gradient evaluations spent producing the estimate

  /// Value to hand to a solver: sampled estimates are biased low, so they are
  /// inflated by `safety`; analytic ones are used as is.
  double usable(double safety) const {
    return method == EstimateMethod::Sampled ? safety * value : value;
  }
};

struct EstimateOptions {
  int n_samples = 50;
  std::uint64_t seed = 0;
  bool force_sampling = false;  ///< ignore growth functions even if the objective has them
};

/// Gradient Lipschitz constant over B(center, radius).
///
/// With growth functions the value is growth.order1(|center - anchor| + radius)
/// floored at 1. Otherwise n_samples points are drawn uniformly from the ball
/// and the largest ratio |grad f(x) - grad f(x')| / |x - x'| over disjoint
/// sample pairs and sample/center pairs is returned, floored at 1.
LipschitzEstimate estimate_l1(const Objective& f, const Vector& center, double radius,
                              const EstimateOptions& opts = {});

/// Hessian Lipschitz constant over B(center, radius).
///
/// The sampled path compares Hessian-vector products along a random unit probe
/// per pair, each approximated by central differences of gradients with step
/// 1e-4 * radius.
LipschitzEstimate estimate_l2(const Objective& f, const Vector& center, double radius,
                              const EstimateOptions& opts = {});

/// Uniform sample from the Euclidean ball.
template <typename Rng>
Vector sample_ball(const Vector& center, double radius, Rng& rng);

}  // namespace slo

#include <cmath>
#include <random>

template <typename Rng>
slo::Vector slo::sample_ball(const Vector& center, double radius, Rng& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Index n = center.size();
  Vector dir(n);
  double norm = 0.0;
  do {
    for (Index i = 0; i < n; ++i) dir[i] = normal(rng);
    norm = dir.norm();
  } while (norm == 0.0);
  const double r = radius * std::pow(unif(rng), 1.0 / static_cast<double>(n));
  return center + (r / norm) * dir;
}
