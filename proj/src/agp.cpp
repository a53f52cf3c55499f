#include "slo/agp.hpp"

#include "slo/subroutines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace slo {

AugmentedObjective::AugmentedObjective(const Objective& base, Vector anchor, double alpha)
    : base_(&base), anchor_(std::move(anchor)), alpha_(alpha) {
  if (anchor_.size() != base.dim()) throw DimensionError("AugmentedObjective: anchor dimension mismatch");
}

double AugmentedObjective::value(const Vector& x) const {
  return base_->value(x) + alpha_ * (x - anchor_).squaredNorm();
}

Vector AugmentedObjective::gradient(const Vector& x) const {
  return base_->gradient(x) + 2.0 * alpha_ * (x - anchor_);
}

Vector AgpRegion::project(const Vector& x) const { return project_ball(x, center, inner_radius); }

namespace {

bool violates(const Objective& f_hat, const Vector& u, const Vector& v, double fv,
              const Vector& gv, double alpha) {
  const Vector diff = u - v;
  return f_hat.value(u) < fv + gv.dot(diff) + 0.5 * alpha * diff.squaredNorm();
}

struct Certification {
  std::optional<Witness> witness;
  double f_yt = 0.0;
  Vector grad_yt;  // empty when branch (a) fired
  double psi = std::numeric_limits<double>::quiet_NaN();
};

Certification certify(const Objective& f_hat, const AgpRegion& region, double f_y0,
                      const Vector& y0, const Vector& yt, double l1_hat, double alpha,
                      double kappa, std::int64_t t) {
  Certification c;
  c.f_yt = f_hat.value(yt);
  if (c.f_yt > f_y0) {
    c.witness = Witness{y0, false};
    return c;
  }
  c.grad_yt = f_hat.gradient(yt);
  Vector z = yt - c.grad_yt / l1_hat;
  if (!region.interior(z)) {
    c.witness = Witness{region.project(z), true};
    return c;
  }
  c.psi = f_y0 - f_hat.value(z) + 0.5 * alpha * (z - y0).squaredNorm();
  const double rhs = 2.0 * l1_hat * c.psi * std::exp(-static_cast<double>(t) / std::sqrt(kappa));
  if (c.grad_yt.squaredNorm() > rhs) c.witness = Witness{std::move(z), false};
  return c;
}

double lemma6_bound(double kappa, double l1_hat, double psi, double eps_hat) {
  if (!(psi > 0.0)) return 1.0;
  return 1.0 + std::max(0.0, std::sqrt(kappa) * std::log(2.0 * l1_hat * psi / eps_hat));
}

}  // namespace

std::optional<NcPair> find_nc_pair(const Objective& f_hat, std::span<const Vector> x_hist,
                                   std::span<const Vector> y_hist, const Vector& w, double alpha) {
  if (x_hist.size() != y_hist.size()) throw ContractError("find_nc_pair: history lengths differ");
  for (std::size_t j = 0; j < x_hist.size(); ++j) {
    const Vector& v = x_hist[j];
    const double fv = f_hat.value(v);
    const Vector gv = f_hat.gradient(v);
    if (violates(f_hat, y_hist[j], v, fv, gv, alpha)) return NcPair{y_hist[j], v};
    if (violates(f_hat, w, v, fv, gv, alpha)) return NcPair{w, v};
  }
  return std::nullopt;
}

std::optional<Witness> certify_progress(const Objective& f_hat, const AgpRegion& region,
                                        const Vector& y0, const Vector& yt, double l1_hat,
                                        double alpha, double kappa, std::int64_t t) {
  if (t < 1) throw ContractError("certify_progress: t must be at least 1");
  return certify(f_hat, region, f_hat.value(y0), y0, yt, l1_hat, alpha, kappa, t).witness;
}

UpgOutcome agp_upg(const Objective& f_hat_in, const AgpRegion& region, const Vector& y0,
                   double eps_hat, double l1_hat, double alpha, const UpgOptions& opts) {
  if (!(alpha > 0.0) || !(l1_hat >= alpha)) throw ContractError("agp_upg: need l1_hat >= alpha > 0");
  if (!(eps_hat > 0.0)) throw ContractError("agp_upg: eps_hat must be positive");
  if (!region.interior(y0)) throw ContractError("agp_upg: y0 must lie in the interior of X");

  CountingObjective f_hat(f_hat_in);
  const double kappa = l1_hat / alpha;
  const double sk = std::sqrt(kappa);
  const double omega = (sk - 1.0) / (sk + 1.0);

  UpgOutcome out;
  std::vector<Vector> xs{y0};
  std::vector<Vector> ys{y0};
  const double f_y0 = f_hat.value(y0);
  double cap = std::numeric_limits<double>::infinity();

  auto finish = [&](UpgOutcome& o, std::int64_t t) -> UpgOutcome& {
    o.iters = t;
    o.grad_evals = f_hat.gradient_evals();
    o.value_evals = f_hat.value_evals();
    return o;
  };
  auto nc_or_throw = [&](std::size_t t, const Vector& w, int flag) {
    auto nc = find_nc_pair(f_hat, std::span<const Vector>(xs.data(), t),
                           std::span<const Vector>(ys.data(), t), w, alpha);
    if (!nc) {
      std::ostringstream os;
      os << "agp_upg: flag " << flag << " at t = " << t
         << " but no negative-curvature pair exists; l1_hat is likely underestimated";
      throw ContractError(os.str());
    }
    out.flag = flag;
    out.nc_u = std::move(nc->u);
    out.nc_v = std::move(nc->v);
    out.y_history = ys;
  };

  for (std::int64_t t = 1;; ++t) {
    UpgStep step;
    step.t = t;
    const Vector y_tilde = xs.back() - f_hat.gradient(xs.back()) / l1_hat;

    if (!region.interior(y_tilde)) {
      Vector yt = region.project(y_tilde);
      const double f_yt = f_hat.value(yt);
      ys.push_back(yt);
      step.f_hat_y = f_yt;
      step.grad_norm_y = std::numeric_limits<double>::quiet_NaN();
      step.step_interior = false;
      step.certify = -1;
      step.y = yt;
      if (opts.observer) opts.observer(step);
      if (f_yt <= f_y0) {
        out.flag = 1;
        out.point = std::move(yt);
      } else {
        nc_or_throw(static_cast<std::size_t>(t), y0, 2);
      }
      return finish(out, t);
    }

    ys.push_back(y_tilde);
    const Vector& yt = ys.back();
    xs.push_back(yt + omega * (yt - ys[ys.size() - 2]));

    Certification c = certify(f_hat, region, f_y0, y0, yt, l1_hat, alpha, kappa, t);
    step.f_hat_y = c.f_yt;
    step.grad_norm_y = c.grad_yt.size() ? c.grad_yt.norm() : std::numeric_limits<double>::quiet_NaN();
    step.certify = c.witness ? (c.witness->on_boundary ? 2 : 1) : 0;
    step.y = yt;
    step.x = xs.back();
    if (opts.observer) opts.observer(step);

    if (c.witness) {
      if (c.witness->on_boundary) {
        out.flag = 3;
        out.point = std::move(c.witness->point);
      } else {
        nc_or_throw(static_cast<std::size_t>(t), c.witness->point, 4);
      }
      return finish(out, t);
    }
    if (c.grad_yt.norm() <= std::sqrt(eps_hat)) {
      out.flag = 5;
      out.point = yt;
      return finish(out, t);
    }

    // Null certification at step t bounds the index of the next step.
    out.iteration_bound = lemma6_bound(kappa, l1_hat, c.psi, eps_hat);
    if (!std::isfinite(cap)) {
      cap = std::max(static_cast<double>(opts.min_iteration_cap), opts.cap_factor * out.iteration_bound);
    }
    if (static_cast<double>(t) >= cap) {
      std::ostringstream os;
      os << "agp_upg: iteration cap " << cap << " reached; last f_hat(y) = " << c.f_yt
         << ", |grad f_hat(y)| = " << c.grad_yt.norm() << ", psi = " << c.psi
         << "; l1_hat or alpha is likely mis-estimated";
      throw BudgetError(os.str());
    }
  }
}

Vector a_agp(const Objective& f, const Vector& xbar, double l1, double l2,
             const Vector& epoch_anchor, double radius_D, double epsilon, AgpDetail* detail,
             const UpgOptions& opts) {
  if (!(l1 >= 1.0) || !(l2 >= 1.0)) throw ContractError("a_agp: l1 and l2 must be at least 1");
  if (!(epsilon > 0.0)) throw ContractError("a_agp: epsilon must be positive");
  const double quarter = std::pow(epsilon, 0.25);
  if (radius_D < 6.0 * quarter * (1.0 - 1e-12)) throw ContractError("a_agp: radius_D < 6 eps^(1/4)");
  const AgpRegion region{epoch_anchor, radius_D - 2.0 * quarter};
  if (!region.interior(xbar)) throw ContractError("a_agp: xbar must lie in the interior of X");

  const double alpha = 2.0 * std::sqrt(l2) * quarter;
  const double l1_hat = l1 + 2.0 * alpha;
  const AugmentedObjective f_hat(f, xbar, alpha);
  UpgOutcome res = agp_upg(f_hat, region, xbar, epsilon / 100.0, l1_hat, alpha, opts);

  AgpDetail local;
  AgpDetail& d = detail ? *detail : local;
  d.alpha = alpha;
  d.l1_hat = l1_hat;

  Vector result;
  if (res.point) {
    d.choice = AgpDetail::Choice::Point;
    result = *res.point;
  } else {
    const Vector& u = *res.nc_u;
    const Vector& v = *res.nc_v;
    const double gap = (u - v).norm();
    if (!(gap > 0.0)) throw ContractError("a_agp: degenerate negative-curvature pair with u = v");

    // b1: best of y_1 .. y_{t-1} and u.
    Vector b1 = u;
    double f_b1 = f.value(u);
    for (std::size_t j = 1; j + 1 < res.y_history.size(); ++j) {
      const double fj = f.value(res.y_history[j]);
      if (fj < f_b1) {
        f_b1 = fj;
        b1 = res.y_history[j];
      }
    }
    const double threshold = f.value(xbar) - alpha * alpha * alpha / (64.0 * l2 * l2);
    if (f_b1 <= threshold) {
      d.choice = AgpDetail::Choice::BestHistory;
      result = std::move(b1);
    } else {
      const Vector shift = (alpha / (l2 * gap)) * (u - v);
      Vector plus = u + shift;
      Vector minus = u - shift;
      d.choice = AgpDetail::Choice::CurvatureStep;
      result = f.value(plus) <= f.value(minus) ? std::move(plus) : std::move(minus);
    }
  }
  d.outcome = std::move(res);
  require_finite(result, "a_agp output");
  return result;
}

}  // namespace slo
