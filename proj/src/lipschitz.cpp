#include "slo/lipschitz.hpp"

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

namespace slo {

namespace {

constexpr double kMinPairDistance = 1e-12;

void check_inputs(const Objective& f, const Vector& center, double radius) {
  if (center.size() != f.dim()) throw DimensionError("Lipschitz estimate: center dimension mismatch");
  if (!(radius > 0.0)) throw ContractError("Lipschitz estimate: radius must be positive");
  require_finite(center, "Lipschitz estimate center");
}

LipschitzEstimate analytic(int order, const GrowthFunctions& g, const Vector& center, double radius) {
  LipschitzEstimate est;
  est.order = order;
  est.center = center;
  est.radius = radius;
  est.method = EstimateMethod::Analytic;
  const double reach = (center - g.anchor).norm() + radius;
  const double raw = order == 1 ? g.order1(reach) : g.order2(reach);
  require_finite(raw, "growth function");
  est.value = std::max(1.0, raw);
  return est;
}

std::vector<std::pair<int, int>> sample_pairs(int n) {
  // Index n stands for the center.
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i + 1 < n; i += 2) pairs.emplace_back(i, i + 1);
  for (int i = 0; i < n; ++i) pairs.emplace_back(i, n);
  return pairs;
}

}  // namespace

LipschitzEstimate estimate_l1(const Objective& f, const Vector& center, double radius,
                              const EstimateOptions& opts) {
  check_inputs(f, center, radius);
  if (!opts.force_sampling) {
    if (auto g = f.growth(); g && g->order1) return analytic(1, *g, center, radius);
  }
  if (opts.n_samples < 2) throw ContractError("estimate_l1: need at least 2 samples");

  std::mt19937_64 rng(opts.seed);
  const int n = opts.n_samples;
  std::vector<Vector> pts;
  pts.reserve(n + 1);
  for (int i = 0; i < n; ++i) pts.push_back(sample_ball(center, radius, rng));
  pts.push_back(center);

  std::vector<Vector> grads;
  grads.reserve(n + 1);
  for (const Vector& p : pts) {
    grads.push_back(f.gradient(p));
    require_finite(grads.back(), "gradient during Lipschitz sampling");
  }

  double best = 0.0;
  bool any = false;
  for (auto [a, b] : sample_pairs(n)) {
    const double dist = (pts[a] - pts[b]).norm();
    if (dist < kMinPairDistance) continue;
    any = true;
    best = std::max(best, (grads[a] - grads[b]).norm() / dist);
  }
  if (!any) throw EstimationError("estimate_l1: every sample pair was degenerate");

  LipschitzEstimate est;
  est.order = 1;
  est.value = std::max(1.0, best);
  est.center = center;
  est.radius = radius;
  est.method = EstimateMethod::Sampled;
  est.n_samples = n;
  est.seed = opts.seed;
  est.grad_evals = n + 1;
  return est;
}

LipschitzEstimate estimate_l2(const Objective& f, const Vector& center, double radius,
                              const EstimateOptions& opts) {
  check_inputs(f, center, radius);
  if (!opts.force_sampling) {
    if (auto g = f.growth(); g && g->order2) return analytic(2, *g, center, radius);
  }
  if (opts.n_samples < 2) throw ContractError("estimate_l2: need at least 2 samples");

  std::mt19937_64 rng(opts.seed);
  const int n = opts.n_samples;
  std::vector<Vector> pts;
  pts.reserve(n + 1);
  for (int i = 0; i < n; ++i) pts.push_back(sample_ball(center, radius, rng));
  pts.push_back(center);

  const double h = 1e-4 * radius;
  std::int64_t evals = 0;
  auto hess_vec = [&](const Vector& x, const Vector& u) {
    const Vector up = f.gradient(x + h * u);
    const Vector down = f.gradient(x - h * u);
    evals += 2;
    Vector hv = (up - down) / (2.0 * h);
    require_finite(hv, "Hessian-vector product during Lipschitz sampling");
    return hv;
  };

  const Vector zero = Vector::Zero(center.size());
  double best = 0.0;
  bool any = false;
  for (auto [a, b] : sample_pairs(n)) {
    const Vector u = sample_ball(zero, 1.0, rng).normalized();
    const double dist = (pts[a] - pts[b]).norm();
    if (dist < kMinPairDistance) continue;
    any = true;
    best = std::max(best, (hess_vec(pts[a], u) - hess_vec(pts[b], u)).norm() / dist);
  }
  if (!any) throw EstimationError("estimate_l2: every sample pair was degenerate");

  LipschitzEstimate est;
  est.order = 2;
  est.value = std::max(1.0, best);
  est.center = center;
  est.radius = radius;
  est.method = EstimateMethod::Sampled;
  est.n_samples = n;
  est.seed = opts.seed;
  est.grad_evals = evals;
  return est;
}

}  // namespace slo
