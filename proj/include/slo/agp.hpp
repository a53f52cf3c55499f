#pragma once

#include "slo/core.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace slo {

/// f_hat(x) = f(x) + alpha * |x - anchor|^2.
class AugmentedObjective final : public Objective {
 public:
  AugmentedObjective(const Objective& base, Vector anchor, double alpha);

  Index dim() const override { return base_->dim(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;

  const Vector& anchor() const { return anchor_; }
  double alpha() const { return alpha_; }

 private:
  const Objective* base_;
  Vector anchor_;
  double alpha_;
};

/// Closed ball X = {x : |x - center| <= inner_radius}. Its interior is tested
/// with strict inequality, so boundary points are not interior.
struct AgpRegion {
  Vector center;
  double inner_radius = 0.0;

  bool interior(const Vector& x) const { return (x - center).norm() < inner_radius; }
  Vector project(const Vector& x) const;
};

struct NcPair {
  Vector u;
  Vector v;
};

/// Scans j = 0, 1, ... and, for each j, u = y_hist[j] then u = w, returning
/// the first pair violating
///   f_hat(u) >= f_hat(x_j) + <grad f_hat(x_j), u - x_j> + alpha/2 |u - x_j|^2.
std::optional<NcPair> find_nc_pair(const Objective& f_hat, std::span<const Vector> x_hist,
                                   std::span<const Vector> y_hist, const Vector& w, double alpha);

struct Witness {
  Vector point;
  bool on_boundary = false;  ///< true only for the projected-z branch
};

/// Returns a witness point when the accelerated run has not made the progress
/// an alpha-strongly-convex function would guarantee, and nullopt otherwise.
std::optional<Witness> certify_progress(const Objective& f_hat, const AgpRegion& region,
                                        const Vector& y0, const Vector& yt, double l1_hat,
                                        double alpha, double kappa, std::int64_t t);

/// One AGP-UPG iteration, reported to an optional observer.
struct UpgStep {
  std::int64_t t = 0;
  double f_hat_y = 0.0;       ///< f_hat at the current y iterate
  double grad_norm_y = 0.0;   ///< |grad f_hat(y_t)|, NaN when not evaluated
  bool step_interior = true;  ///< whether the gradient step stayed in int(X)
  int certify = 0;            ///< 0 null, 1 interior witness, 2 boundary witness, -1 not run
  Vector y;                   ///< y_t
  Vector x;                   ///< momentum point x_t, empty when the loop ended at the gradient step
};

struct UpgOptions {
  std::int64_t min_iteration_cap = 10'000;
  double cap_factor = 10.0;
  std::function<void(const UpgStep&)> observer;
};

struct UpgOutcome {
  int flag = 0;  ///< 1..5
  std::optional<Vector> point;       ///< flags 1, 3, 5
  std::optional<Vector> nc_u, nc_v;  ///< flags 2, 4
  std::vector<Vector> y_history;     ///< flags 2, 4: y_0 .. y_t
  std::int64_t iters = 0;            ///< t at exit
  std::int64_t grad_evals = 0;
  std::int64_t value_evals = 0;
  /// 1 + max{0, sqrt(kappa) log(2 l1_hat psi / eps_hat)} with psi from the
  /// certification at iteration t-1 (1 when t = 1).
  double iteration_bound = 1.0;
};

/// Accelerated projected gradient on f_hat over X until a flag is raised.
///
/// Throws BudgetError when the iteration cap is exceeded and ContractError
/// when flag 2 or 4 is reached without a negative-curvature pair, which can
/// only happen if l1_hat underestimates the curvature of f_hat.
UpgOutcome agp_upg(const Objective& f_hat, const AgpRegion& region, const Vector& y0,
                   double eps_hat, double l1_hat, double alpha, const UpgOptions& opts = {});

struct AgpDetail {
  UpgOutcome outcome;
  double alpha = 0.0;
  double l1_hat = 0.0;
  enum class Choice { Point, BestHistory, CurvatureStep } choice = Choice::Point;
};

/// Accelerated gradient projection subroutine for one SLO iteration.
///
/// Requires |xbar - epoch_anchor| < radius_D - 2 eps^(1/4), l1, l2 >= 1 and
/// radius_D >= 6 eps^(1/4). The output stays within radius_D of epoch_anchor.
Vector a_agp(const Objective& f, const Vector& xbar, double l1, double l2,
             const Vector& epoch_anchor, double radius_D, double epsilon,
             AgpDetail* detail = nullptr, const UpgOptions& opts = {});

}  // namespace slo
