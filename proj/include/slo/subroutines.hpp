#pragma once

#include "slo/core.hpp"

namespace slo {

/// Projection of `y` onto the closed ball B(center, radius). Points already in
/// the ball (boundary included) are returned unchanged.
Vector project_ball(const Vector& y, const Vector& center, double radius);

/// Gradient projection step: Proj_{B(center, r)}(x - eta * grad).
Vector gradient_projection_step(const Vector& x, const Vector& grad, const Vector& center,
                                double eta, double r);
Vector a_gp(const Objective& f, const Vector& x, const Vector& center, double eta, double r);

/// Normalized gradient step: x - grad/l1 when |grad| <= l1*d, otherwise a step
/// of length d along -grad/|grad|.
Vector normalized_gradient_step(const Vector& x, const Vector& grad, double l1, double d);
Vector a_ng(const Objective& f, const Vector& x, double l1, double d);

struct LsParams {
  double sigma = 0.9;
  double theta = 0.5;
  double delta_bar = 1.0;
  double alpha = 1.0;  ///< gradient-related constant the direction must satisfy
  int max_backtracks = 200;
};

struct LineSearchResult {
  Vector point;
  double delta = 0.0;   ///< accepted multiplier on the direction
  int backtracks = 0;
  double f_value = 0.0; ///< f(point), as compared in the accepted Armijo test
  int value_evals = 0;
};

/// True when <grad, dir> <= -alpha |grad| |dir|. Evaluated in squared form so
/// that dir = -grad passes with alpha = 1 without rounding slack.
bool gradient_related(const Vector& grad, const Vector& dir, double alpha);

/// Backtracking Armijo search over delta in {delta_bar/|dir| * theta^j}.
///
/// Throws DirectionError if `dir` is zero or not gradient related, and
/// BudgetError once more than max_backtracks reductions were needed.
LineSearchResult line_search_step(const Objective& f, const Vector& x, double fx,
                                  const Vector& grad, const Vector& dir, const LsParams& params);
LineSearchResult a_ls(const Objective& f, const Vector& x, const Vector& dir, const LsParams& params);

}  // namespace slo
