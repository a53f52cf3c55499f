#include "slo/core.hpp"

#include <cmath>
#include <sstream>

namespace slo {

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    std::ostringstream os;
    os << what << ": non-finite entry";
    for (Index i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v[i])) {
        os << " at index " << i;
        break;
      }
    }
    throw EvaluationError(os.str());
  }
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw EvaluationError(std::string(what) + ": non-finite value");
}

double CountingObjective::value(const Vector& x) const {
  ++value_evals_;
  return base_->value(x);
}

Vector CountingObjective::gradient(const Vector& x) const {
  ++gradient_evals_;
  Vector g = base_->gradient(x);
  require_finite(g, "objective gradient");
  return g;
}

Vector finite_diff_gradient(const Objective& f, const Vector& x, double h) {
  if (!(h > 0.0)) throw ContractError("finite_diff_gradient: step must be positive");
  require_finite(x, "finite_diff_gradient point");
  Vector g(x.size());
  Vector probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f.value(probe);
    probe[i] = x[i] - h;
    const double down = f.value(probe);
    probe[i] = x[i];
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw EvaluationError("finite_diff_gradient: non-finite value probing coordinate " +
                            std::to_string(i));
    }
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

const char* to_string(Subroutine s) {
  switch (s) {
    case Subroutine::GradientProjection: return "gp";
    case Subroutine::NormalizedGradient: return "ngd";
    case Subroutine::LineSearch: return "ls";
    case Subroutine::AcceleratedProjection: return "agp";
  }
  return "?";
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::GradientTolerance: return "gradient_tolerance";
    case Termination::EpochBudget: return "epoch_budget";
    case Termination::EvalBudget: return "eval_budget";
    case Termination::TimeBudget: return "time_budget";
    case Termination::Diverged: return "diverged";
  }
  return "?";
}

namespace {

// Relative slack for comparisons against values the factories compute.
constexpr double kRel = 1e-12;

bool at_least(double value, double bound) { return value >= bound - kRel * std::abs(bound); }
bool same(double a, double b) { return std::abs(a - b) <= kRel * std::max(std::abs(a), std::abs(b)); }

[[noreturn]] void reject(const std::string& msg) { throw ConfigError(msg); }

}  // namespace

void SloConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) reject("epsilon must be positive");
  if (!(radius_D > 0.0) || !std::isfinite(radius_D)) reject("radius_D must be positive");
  if (!(margin_d >= 0.0) || !std::isfinite(margin_d)) reject("margin_d must be nonnegative");
  if (!(ls_sigma > 0.0 && ls_sigma < 1.0)) reject("ls_sigma must lie in (0,1)");
  if (!(ls_theta > 0.0 && ls_theta < 1.0)) reject("ls_theta must lie in (0,1)");
  if (!(ls_delta_bar > 0.0)) reject("ls_delta_bar must be positive");
  if (!(ls_alpha > 0.0 && ls_alpha <= 1.0)) reject("ls_alpha must lie in (0,1]");
  if (ls_max_backtracks < 1) reject("ls_max_backtracks must be positive");
  if (lipschitz_samples < 2) reject("lipschitz_samples must be at least 2");
  if (!(lipschitz_safety >= 1.0)) reject("lipschitz_safety must be at least 1");
  if (max_epochs < 1 || max_total_grad_evals < 1) reject("budgets must be positive");
  if (time_budget_s && !(*time_budget_s > 0.0)) reject("time budget must be positive");

  const double root = std::sqrt(epsilon);
  const double quarter = std::pow(epsilon, 0.25);
  switch (subroutine) {
    case Subroutine::GradientProjection:
      if (margin_d != 0.0) reject("gradient projection requires margin_d = 0");
      if (!at_least(radius_D, root / 2)) reject("gradient projection requires radius_D >= sqrt(eps)/2");
      break;
    case Subroutine::NormalizedGradient:
      if (!at_least(margin_d, root)) reject("normalized gradient requires margin_d >= sqrt(eps)");
      if (!at_least(radius_D, root / 2 + 2 * margin_d))
        reject("normalized gradient requires radius_D >= sqrt(eps)/2 + 2*margin_d");
      break;
    case Subroutine::LineSearch:
      if (!same(radius_D, ls_delta_bar) || !same(margin_d, ls_delta_bar))
        reject("line search requires radius_D = margin_d = ls_delta_bar");
      if (!(ls_delta_bar > root)) reject("line search requires ls_delta_bar > sqrt(eps)");
      break;
    case Subroutine::AcceleratedProjection:
      if (!same(margin_d, 2 * quarter)) reject("accelerated projection requires margin_d = 2 eps^(1/4)");
      if (!at_least(radius_D, 6 * quarter)) reject("accelerated projection requires radius_D >= 6 eps^(1/4)");
      break;
  }
}

SloConfig SloConfig::gradient_projection(double epsilon, double radius) {
  SloConfig c;
  c.subroutine = Subroutine::GradientProjection;
  c.epsilon = epsilon;
  c.radius_D = radius;
  c.margin_d = 0.0;
  c.validate();
  return c;
}

SloConfig SloConfig::normalized_gradient(double epsilon, double margin, double radius) {
  SloConfig c;
  c.subroutine = Subroutine::NormalizedGradient;
  c.epsilon = epsilon;
  c.margin_d = margin;
  c.radius_D = radius;
  c.validate();
  return c;
}

SloConfig SloConfig::line_search(double epsilon, double delta_bar, double sigma, double theta) {
  SloConfig c;
  c.subroutine = Subroutine::LineSearch;
  c.epsilon = epsilon;
  c.ls_delta_bar = delta_bar;
  c.radius_D = delta_bar;
  c.margin_d = delta_bar;
  c.ls_sigma = sigma;
  c.ls_theta = theta;
  c.validate();
  return c;
}

SloConfig SloConfig::accelerated_projection(double epsilon, double radius) {
  SloConfig c;
  c.subroutine = Subroutine::AcceleratedProjection;
  c.epsilon = epsilon;
  c.radius_D = radius;
  c.margin_d = 2.0 * std::pow(epsilon, 0.25);
  c.validate();
  return c;
}

}  // namespace slo
