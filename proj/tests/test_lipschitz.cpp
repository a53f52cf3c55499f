#include "slo/lipschitz.hpp"
#include "slo/problems.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace slo;

namespace {

EstimateOptions sampled(int n, std::uint64_t seed) {
  EstimateOptions o;
  o.n_samples = n;
  o.seed = seed;
  o.force_sampling = true;
  return o;
}

}  // namespace

TEST_CASE("quadratic gradient ratios are all one") {
  AnalyticProblem q(AnalyticKind::Quadratic, 3);
  const auto est = estimate_l1(q, Vector::Constant(3, 0.2), 2.0, sampled(100, 1));
  CHECK(est.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(est.method == EstimateMethod::Sampled);
  CHECK(est.grad_evals == 101);
}

TEST_CASE("linear objective is floored at one") {
  AnalyticProblem lin(AnalyticKind::Linear, 2, 5.0);
  CHECK(estimate_l1(lin, Vector::Zero(2), 1.0, sampled(20, 2)).value == 1.0);
  CHECK(estimate_l2(lin, Vector::Zero(2), 1.0, sampled(20, 2)).value == 1.0);
}

TEST_CASE("sampled quartic constant on the unit ball") {
  AnalyticProblem q(AnalyticKind::Quartic, 2);
  const auto est = estimate_l1(q, Vector::Zero(2), 1.0, sampled(2000, 3));
  CHECK(est.value >= 1.5);
  CHECK(est.value <= 3.0);
}

TEST_CASE("sampled Hessian constant of a quadratic is floored") {
  AnalyticProblem q(AnalyticKind::Quadratic, 3);
  CHECK(estimate_l2(q, Vector::Zero(3), 1.0, sampled(50, 4)).value == doctest::Approx(1.0));
}

TEST_CASE("sampled Hessian constant of the 1-D quartic stays below 6") {
  AnalyticProblem q(AnalyticKind::Quartic, 1);
  const auto est = estimate_l2(q, Vector::Zero(1), 1.0, sampled(2000, 5));
  CHECK(est.value <= 6.0 + 1e-2);
  CHECK(est.value > 3.0);
}

TEST_CASE("analytic path uses the growth functions") {
  AnalyticProblem q(AnalyticKind::Quartic, 1);
  const auto l2 = estimate_l2(q, Vector::Zero(1), 2.0);
  CHECK(l2.value == doctest::Approx(12.0));
  CHECK(l2.method == EstimateMethod::Analytic);
  CHECK(l2.grad_evals == 0);
  const auto l1 = estimate_l1(q, testutil::scalar(1.0), 1.0);
  CHECK(l1.value == doctest::Approx(12.0));
}

TEST_CASE("sampled estimates never exceed the analytic ones") {
  AnalyticProblem q(AnalyticKind::Quartic, 3);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Vector c = uniform_point(3, 1.0, s);
    for (double r : {0.1, 0.5, 2.0}) {
      CHECK(estimate_l1(q, c, r, sampled(50, s)).value <= estimate_l1(q, c, r).value);
      CHECK(estimate_l2(q, c, r, sampled(50, s)).value <= estimate_l2(q, c, r).value * (1 + 1e-6));
    }
  }
}

TEST_CASE("analytic estimates grow with the radius") {
  AnalyticProblem q(AnalyticKind::Quartic, 2);
  const Vector c = testutil::vec({0.3, -0.4});
  double prev1 = 0, prev2 = 0;
  for (double r = 0.1; r < 5; r *= 1.7) {
    const double v1 = estimate_l1(q, c, r).value, v2 = estimate_l2(q, c, r).value;
    CHECK(v1 >= prev1);
    CHECK(v2 >= prev2);
    prev1 = v1;
    prev2 = v2;
  }
}

TEST_CASE("sampling is deterministic in the seed") {
  const auto planted = generate_planted_tensor(3, 3, 2, 1.0, 2.0, 1);
  const Vector c = uniform_point(6, 0.5, 2);
  CHECK(estimate_l1(planted.problem, c, 1.0, sampled(30, 9)).value ==
        estimate_l1(planted.problem, c, 1.0, sampled(30, 9)).value);
  CHECK(estimate_l2(planted.problem, c, 1.0, sampled(30, 9)).value ==
        estimate_l2(planted.problem, c, 1.0, sampled(30, 9)).value);
}

TEST_CASE("safety factor applies only to sampled values") {
  LipschitzEstimate a;
  a.value = 2.0;
  a.method = EstimateMethod::Analytic;
  CHECK(a.usable(1.5) == 2.0);
  a.method = EstimateMethod::Sampled;
  CHECK(a.usable(1.5) == 3.0);
}

TEST_CASE("degenerate balls and bad inputs") {
  AnalyticProblem q(AnalyticKind::Quadratic, 2);
  CHECK_THROWS_AS(estimate_l1(q, Vector::Zero(2), 1e-14, sampled(10, 1)), EstimationError);
  CHECK_THROWS_AS(estimate_l1(q, Vector::Zero(2), 0.0, sampled(10, 1)), ContractError);
  CHECK_THROWS_AS(estimate_l1(q, Vector::Zero(3), 1.0, sampled(10, 1)), DimensionError);
  CHECK_THROWS_AS(estimate_l1(q, Vector::Zero(2), 1.0, sampled(1, 1)), ContractError);
}

TEST_CASE("ball samples stay in the ball") {
  std::mt19937_64 rng(3);
  const Vector c = testutil::vec({1.0, 2.0, 3.0});
  for (int i = 0; i < 500; ++i) CHECK((sample_ball(c, 0.7, rng) - c).norm() <= 0.7 * (1 + 1e-15));
}
