#include "slo/subroutines.hpp"

#include <cmath>
#include <sstream>

namespace slo {

Vector project_ball(const Vector& y, const Vector& center, double radius) {
  const Vector offset = y - center;
  const double dist = offset.norm();
  if (dist <= radius) return y;
  return center + (radius / dist) * offset;
}

Vector gradient_projection_step(const Vector& x, const Vector& grad, const Vector& center,
                                double eta, double r) {
  if (!(eta > 0.0) || !(r > 0.0)) throw ContractError("a_gp: eta and r must be positive");
  // Projected points may land a rounding error outside the sphere.
  if ((x - center).norm() > r * (1.0 + 1e-12)) throw ContractError("a_gp: x lies outside B(center, r)");
  Vector out = project_ball(x - eta * grad, center, r);
  require_finite(out, "a_gp output");
  return out;
}

Vector a_gp(const Objective& f, const Vector& x, const Vector& center, double eta, double r) {
  return gradient_projection_step(x, f.gradient(x), center, eta, r);
}

Vector normalized_gradient_step(const Vector& x, const Vector& grad, double l1, double d) {
  if (!(l1 >= 1.0)) throw ContractError("a_ng: l1 must be at least 1");
  if (!(d > 0.0)) throw ContractError("a_ng: d must be positive");
  require_finite(grad, "a_ng gradient");
  const double gn = grad.norm();
  Vector out = gn <= l1 * d ? Vector(x - grad / l1) : Vector(x - (d / gn) * grad);
  require_finite(out, "a_ng output");
  return out;
}

Vector a_ng(const Objective& f, const Vector& x, double l1, double d) {
  return normalized_gradient_step(x, f.gradient(x), l1, d);
}

bool gradient_related(const Vector& grad, const Vector& dir, double alpha) {
  const double inner = grad.dot(dir);
  if (inner > 0.0) return false;
  return inner * inner >= alpha * alpha * grad.squaredNorm() * dir.squaredNorm();
}

LineSearchResult line_search_step(const Objective& f, const Vector& x, double fx,
                                  const Vector& grad, const Vector& dir, const LsParams& params) {
  if (!(params.sigma > 0.0 && params.sigma < 1.0) || !(params.theta > 0.0 && params.theta < 1.0) ||
      !(params.delta_bar > 0.0) || !(params.alpha > 0.0 && params.alpha <= 1.0)) {
    throw ContractError("a_ls: invalid parameters");
  }
  const double dn = dir.norm();
  if (!(dn > 0.0)) throw DirectionError("a_ls: search direction is zero");
  if (!gradient_related(grad, dir, params.alpha)) {
    std::ostringstream os;
    os << "a_ls: direction is not gradient related for alpha = " << params.alpha;
    throw DirectionError(os.str());
  }

  const double slope = grad.dot(dir);
  LineSearchResult res;
  double delta = params.delta_bar / dn;
  // The quotient can round up so that delta * |dir| lands just past delta_bar.
  while (delta * dn > params.delta_bar) delta = std::nextafter(delta, 0.0);
  for (int j = 0;; ++j) {
    Vector trial = x + delta * dir;
    const double ft = f.value(trial);
    ++res.value_evals;
    if (ft <= fx + params.sigma * delta * slope) {
      res.point = std::move(trial);
      res.delta = delta;
      res.backtracks = j;
      res.f_value = ft;
      return res;
    }
    if (j == params.max_backtracks) {
      std::ostringstream os;
      os << "a_ls: no Armijo step after " << j << " backtracks; last delta tried " << delta;
      throw BudgetError(os.str());
    }
    delta *= params.theta;
  }
}

LineSearchResult a_ls(const Objective& f, const Vector& x, const Vector& dir, const LsParams& params) {
  return line_search_step(f, x, f.value(x), f.gradient(x), dir, params);
}

}  // namespace slo
