#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace slo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  /// Short machine-readable category, e.g. "contract" or "budget".
  virtual const char* kind() const noexcept { return "error"; }
};

#define SLO_DECLARE_ERROR(Name, Kind)                              \
  class Name : public Error {                                      \
   public:                                                         \
    using Error::Error;                                            \
    const char* kind() const noexcept override { return Kind; }    \
  };

SLO_DECLARE_ERROR(ContractError, "contract")
SLO_DECLARE_ERROR(EvaluationError, "evaluation")
SLO_DECLARE_ERROR(ConfigError, "config")
SLO_DECLARE_ERROR(DimensionError, "dimension")
SLO_DECLARE_ERROR(DirectionError, "direction")
SLO_DECLARE_ERROR(BudgetError, "budget")
SLO_DECLARE_ERROR(EstimationError, "estimation")
SLO_DECLARE_ERROR(SizeError, "size")
SLO_DECLARE_ERROR(FormatError, "format")

#undef SLO_DECLARE_ERROR

/// Throws EvaluationError if any entry of v is NaN or infinite.
void require_finite(const Vector& v, const char* what);
void require_finite(double v, const char* what);

// ---------------------------------------------------------------------------
// Objective oracle
// ---------------------------------------------------------------------------

/// Analytic local Lipschitz bounds over balls B(anchor, r).
///
/// order1(r) bounds the gradient Lipschitz constant and order2(r) the Hessian
/// Lipschitz constant on B(anchor, r). Both must be nondecreasing in r; the
/// consumers floor them at 1.
struct GrowthFunctions {
  Vector anchor;
  std::function<double(double)> order1;
  std::function<double(double)> order2;
};

/// A smooth objective f: R^n -> R with its gradient.
///
/// Implementations must be pure: value and gradient depend only on x, and
/// concurrent calls from several threads are allowed.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual Index dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;

  /// Analytic growth functions, if the problem knows them.
  virtual std::optional<GrowthFunctions> growth() const { return std::nullopt; }
};

/// Objective assembled from callables. Mostly used by tests and examples.
class FunctionObjective final : public Objective {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;

  FunctionObjective(Index dim, ValueFn value, GradientFn gradient,
                    std::optional<GrowthFunctions> growth = std::nullopt)
      : dim_(dim), value_(std::move(value)), gradient_(std::move(gradient)),
        growth_(std::move(growth)) {}

  Index dim() const override { return dim_; }
  double value(const Vector& x) const override { return value_(x); }
  Vector gradient(const Vector& x) const override { return gradient_(x); }
  std::optional<GrowthFunctions> growth() const override { return growth_; }

 private:
  Index dim_;
  ValueFn value_;
  GradientFn gradient_;
  std::optional<GrowthFunctions> growth_;
};

/// Forwarding objective that counts evaluations. Gradients are checked for
/// finiteness; values are not, since trial points may legitimately overflow.
///
/// One instance belongs to one run; the counters are not synchronized.
class CountingObjective final : public Objective {
 public:
  explicit CountingObjective(const Objective& base) : base_(&base) {}

  Index dim() const override { return base_->dim(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  std::optional<GrowthFunctions> growth() const override { return base_->growth(); }

  std::int64_t gradient_evals() const { return gradient_evals_; }
  std::int64_t value_evals() const { return value_evals_; }

  /// Adds evaluations performed on the base objective outside this wrapper.
  void charge_gradients(std::int64_t n) { gradient_evals_ += n; }
  void charge_values(std::int64_t n) { value_evals_ += n; }

  const Objective& base() const { return *base_; }

 private:
  const Objective* base_;
  mutable std::int64_t gradient_evals_ = 0;
  mutable std::int64_t value_evals_ = 0;
};

/// Central finite-difference gradient, one coordinate at a time.
Vector finite_diff_gradient(const Objective& f, const Vector& x, double h);

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class Subroutine { GradientProjection, NormalizedGradient, LineSearch, AcceleratedProjection };

const char* to_string(Subroutine s);

/// How per-epoch Lipschitz constants are obtained.
enum class LipschitzSource {
  Auto,      ///< analytic growth functions when the objective has them, else sampling
  Sampled,   ///< always sample, even if growth functions exist
};

struct SloConfig {
  double epsilon = 1e-8;  ///< squared-gradient tolerance; stop once |grad| < sqrt(epsilon)
  double radius_D = 1.0;
  double margin_d = 0.0;
  Subroutine subroutine = Subroutine::GradientProjection;

  // Line search.
  double ls_sigma = 0.9;
  double ls_theta = 0.5;
  double ls_delta_bar = 1.0;
  double ls_alpha = 1.0;  ///< gradient-related constant of the search direction
  int ls_max_backtracks = 200;

  // Lipschitz estimation.
  LipschitzSource lipschitz_source = LipschitzSource::Auto;
  int lipschitz_samples = 50;
  double lipschitz_safety = 1.5;  ///< multiplier applied to sampled estimates

  // Budgets.
  std::int64_t max_epochs = 1'000'000;
  std::int64_t max_total_grad_evals = 10'000'000;
  std::optional<double> time_budget_s;

  std::uint64_t seed = 0;

  /// Throws ConfigError when the parameters violate the subroutine's requirements.
  void validate() const;

  static SloConfig gradient_projection(double epsilon, double radius);
  static SloConfig normalized_gradient(double epsilon, double margin, double radius);
  /// Line search uses D = d = delta_bar, so every epoch is one iteration.
  static SloConfig line_search(double epsilon, double delta_bar, double sigma = 0.9,
                               double theta = 0.5);
  /// margin is fixed to 2 epsilon^(1/4); radius must be at least 6 epsilon^(1/4).
  static SloConfig accelerated_projection(double epsilon, double radius);
};

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

struct IterationRecord {
  std::int64_t epoch = 1;
  std::int64_t iter = 0;
  double f_value = 0.0;
  double grad_norm = 0.0;
  double dist_from_anchor = 0.0;
  std::int64_t cum_grad_evals = 0;
  double elapsed_s = 0.0;
};

enum class Termination { GradientTolerance, EpochBudget, EvalBudget, TimeBudget, Diverged };

const char* to_string(Termination t);

/// Lipschitz constants an epoch ran with, after the safety factor. NaN when
/// the subroutine does not use them.
struct EpochSummary {
  std::int64_t epoch = 1;
  double l1 = 0.0;
  double l2 = 0.0;
};

struct RunResult {
  Vector final_point;
  double final_grad_norm = 0.0;
  Termination termination = Termination::GradientTolerance;
  std::vector<IterationRecord> trace;
  std::int64_t epochs_completed = 0;
  std::vector<EpochSummary> epochs;
};

/// splitmix64 finalizer; used to derive independent seeds from a base seed.
std::uint64_t splitmix64(std::uint64_t x);
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 0x9e3779b97f4a7c15ULL));
}

}  // namespace slo
