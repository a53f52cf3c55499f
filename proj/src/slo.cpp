#include "slo/slo.hpp"

#include "slo/lipschitz.hpp"
#include "slo/subroutines.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace slo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double slack(double radius) { return 1e-12 * std::max(1.0, radius); }

}  // namespace

RunResult run_slo(const Objective& f, const Vector& x_start, const SloConfig& config,
                  const SloHooks& hooks) {
  config.validate();
  if (x_start.size() != f.dim()) throw DimensionError("run_slo: start point has wrong dimension");
  require_finite(x_start, "run_slo start point");

  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };

  const CountingObjective cf(f);
  const double D = config.radius_D;
  const double d = config.margin_d;
  const double tol = std::sqrt(config.epsilon);
  const Subroutine sub = config.subroutine;

  RunResult res;
  Vector x = x_start;
  double fx = cf.value(x);
  Vector g = cf.gradient(x);
  res.trace.push_back({1, 0, fx, g.norm(), 0.0, cf.gradient_evals(), elapsed()});

  Vector anchor = x;
  std::int64_t tau = 1;
  std::int64_t k = 0;
  bool need_estimate = true;
  double l1 = kNaN, l2 = kNaN;

  LsParams ls;
  ls.sigma = config.ls_sigma;
  ls.theta = config.ls_theta;
  ls.delta_bar = config.ls_delta_bar;
  ls.alpha = config.ls_alpha;
  ls.max_backtracks = config.ls_max_backtracks;

  for (;;) {
    if (g.norm() < tol) {
      res.termination = Termination::GradientTolerance;
      break;
    }
    if (need_estimate) {
      if (tau > config.max_epochs) {
        res.termination = Termination::EpochBudget;
        break;
      }
      EstimateOptions opts;
      opts.n_samples = config.lipschitz_samples;
      opts.force_sampling = config.lipschitz_source == LipschitzSource::Sampled;
      const double est_radius = sub == Subroutine::AcceleratedProjection ? 3.0 * D : D;
      if (sub == Subroutine::GradientProjection || sub == Subroutine::NormalizedGradient ||
          sub == Subroutine::AcceleratedProjection) {
        opts.seed = mix_seed(config.seed, 2 * static_cast<std::uint64_t>(tau));
        l1 = estimate_l1(cf, anchor, est_radius, opts).usable(config.lipschitz_safety);
      }
      if (sub == Subroutine::AcceleratedProjection) {
        opts.seed = mix_seed(config.seed, 2 * static_cast<std::uint64_t>(tau) + 1);
        l2 = estimate_l2(cf, anchor, est_radius, opts).usable(config.lipschitz_safety);
      }
      res.epochs.push_back({tau, l1, l2});
      need_estimate = false;
    }
    if (cf.gradient_evals() >= config.max_total_grad_evals) {
      res.termination = Termination::EvalBudget;
      break;
    }
    if (config.time_budget_s && elapsed() >= *config.time_budget_s) {
      res.termination = Termination::TimeBudget;
      break;
    }

    Vector next;
    switch (sub) {
      case Subroutine::GradientProjection:
        next = gradient_projection_step(x, g, anchor, 1.0 / l1, D);
        break;
      case Subroutine::NormalizedGradient:
        next = normalized_gradient_step(x, g, l1, d);
        break;
      case Subroutine::LineSearch:
        next = line_search_step(cf, x, fx, g, -g, ls).point;
        break;
      case Subroutine::AcceleratedProjection: {
        AgpCall call;
        next = a_agp(cf, x, l1, l2, anchor, D, config.epsilon, &call.detail, hooks.upg);
        if (hooks.on_agp) {
          call.epoch = tau;
          call.anchor = anchor;
          call.input = x;
          call.output = next;
          call.l1 = l1;
          call.l2 = l2;
          hooks.on_agp(call);
        }
        break;
      }
    }

    const double dist = (next - anchor).norm();
    if (dist > D + slack(D)) {
      std::ostringstream os;
      os << "run_slo: " << to_string(sub) << " produced a point at distance " << dist
         << " from the epoch anchor, beyond D = " << D;
      throw ContractError(os.str());
    }
    x = std::move(next);
    fx = cf.value(x);
    g = cf.gradient(x);
    ++k;
    res.trace.push_back({tau, k, fx, g.norm(), dist, cf.gradient_evals(), elapsed()});

    if (dist >= D - d - slack(D)) {
      res.epochs_completed = tau;
      ++tau;
      k = 0;
      anchor = x;
      need_estimate = true;
    }
  }

  res.final_point = x;
  res.final_grad_norm = g.norm();
  return res;
}

std::vector<double> check_epoch_descent(const RunResult& result, const SloConfig& config) {
  const auto& tr = result.trace;
  if (tr.empty() || tr.front().epoch != 1 || tr.front().iter != 0)
    throw FormatError("check_epoch_descent: trace must start with the initial point");
  for (std::size_t i = 1; i < tr.size(); ++i) {
    const bool same_epoch = tr[i].epoch == tr[i - 1].epoch && tr[i].iter == tr[i - 1].iter + 1;
    const bool new_epoch = tr[i].epoch == tr[i - 1].epoch + 1 && tr[i].iter == 1;
    if (!same_epoch && !new_epoch) throw FormatError("check_epoch_descent: malformed trace ordering");
  }

  const double root = std::sqrt(config.epsilon);
  double floor = 0.0;
  switch (config.subroutine) {
    case Subroutine::GradientProjection:
    case Subroutine::NormalizedGradient: floor = root * config.radius_D / 4.0; break;
    case Subroutine::AcceleratedProjection: floor = root * config.radius_D / 32.0; break;
    case Subroutine::LineSearch: break;
  }

  std::vector<double> margins;
  double f_anchor = tr.front().f_value;
  for (std::size_t i = 1; i < tr.size(); ++i) {
    const bool last_of_epoch = i + 1 == tr.size() || tr[i + 1].epoch != tr[i].epoch;
    if (!last_of_epoch || tr[i].epoch > result.epochs_completed) continue;
    double need = floor;
    if (config.subroutine == Subroutine::LineSearch)
      need = config.ls_sigma * config.ls_alpha * root * tr[i].dist_from_anchor;
    margins.push_back(f_anchor - tr[i].f_value - need);
    f_anchor = tr[i].f_value;
  }
  return margins;
}

}  // namespace slo
