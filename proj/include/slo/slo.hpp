#pragma once

#include "slo/agp.hpp"
#include "slo/core.hpp"

#include <functional>
#include <vector>

namespace slo {

/// One call of the accelerated subroutine inside run_slo.
struct AgpCall {
  std::int64_t epoch = 1;
  Vector anchor;
  Vector input;
  Vector output;
  double l1 = 1.0;
  double l2 = 1.0;
  AgpDetail detail;
};

struct SloHooks {
  std::function<void(const AgpCall&)> on_agp;
  UpgOptions upg;
};

/// Sequential local optimization: epochs of the configured subroutine, each
/// confined to B(anchor, radius_D) with Lipschitz constants fixed per epoch.
///
/// The trace starts with the initial point as (epoch 1, iter 0); every later
/// record is the k-th iterate of its epoch with its distance from that epoch's
/// anchor. The anchor of epoch tau + 1 is the last record of epoch tau.
RunResult run_slo(const Objective& f, const Vector& x_start, const SloConfig& config,
                  const SloHooks& hooks = {});

/// For every closed epoch, f(anchor) - f(next anchor) minus the guaranteed
/// per-epoch drop. Entries below -1e-10 indicate a violated descent floor.
///
/// Line search epochs are single steps; their floor is
/// sigma * alpha * sqrt(eps) * |step|.
std::vector<double> check_epoch_descent(const RunResult& result, const SloConfig& config);

}  // namespace slo
