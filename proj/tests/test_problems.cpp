#include "slo/problems.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace slo;
using testutil::rel_error;

namespace {

Vector unit(Index n, Index i) {
  Vector e = Vector::Zero(n);
  e[i] = 1.0;
  return e;
}

// Reference value by explicit enumeration of every multi-index.
double brute_value(const SymmetricTensor& t, const Vector& x, int rank) {
  const int d = t.dim, k = t.order;
  double total = 0.0;
  std::vector<int> idx(k, 0);
  for (std::size_t flat = 0; flat < t.size(); ++flat) {
    std::size_t rem = flat;
    for (int s = k - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(rem % d);
      rem /= d;
    }
    double model = 0.0;
    for (int i = 0; i < rank; ++i) {
      double p = 1.0;
      for (int s = 0; s < k; ++s) p *= x[i * d + idx[s]];
      model += p;
    }
    const double r = t.entries[flat] - model;
    total += r * r;
  }
  return total;
}

}  // namespace

TEST_CASE("single basis component gives a single unit entry") {
  const auto t = tensor_from_components({unit(2, 0)}, 3);
  REQUIRE(t.size() == 8);
  CHECK(t.at({0, 0, 0}) == 1.0);
  double rest = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) rest += std::abs(t.entries[i]);
  CHECK(rest == 0.0);
}

TEST_CASE("two orthonormal components give two diagonal entries") {
  const auto t = tensor_from_components({unit(2, 0), unit(2, 1)}, 3);
  CHECK(t.at({0, 0, 0}) == 1.0);
  CHECK(t.at({1, 1, 1}) == 1.0);
  CHECK(t.frobenius_norm() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("tensor entries match a brute-force triple loop") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  std::vector<Vector> comps(2, Vector(3));
  for (auto& c : comps)
    for (Index j = 0; j < 3; ++j) c[j] = n(rng);
  const auto t = tensor_from_components(comps, 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        double expect = 0.0;
        for (const auto& x : comps) expect += x[a] * x[b] * x[c];
        CHECK(t.at({a, b, c}) == doctest::Approx(expect).epsilon(1e-14));
      }
  CHECK(t.asymmetry() == 0.0);
}

TEST_CASE("tensor size cap") {
  CHECK_THROWS_AS(tensor_from_components({Vector::Ones(8)}, 5, 1000), SizeError);
}

TEST_CASE("tensor objective at the planted point and at zero") {
  const auto planted = generate_planted_tensor(3, 3, 2, 1.0, 2.0, 5);
  const auto& p = planted.problem;
  Vector x(p.dim());
  for (int i = 0; i < 2; ++i) x.segment(i * 3, 3) = planted.components[i];
  CHECK(p.value(x) <= 1e-20);
  CHECK(p.gradient(x).norm() <= 1e-12);

  SymTensorProblem single(tensor_from_components({unit(2, 0)}, 3), 1);
  CHECK(single.value(Vector::Zero(2)) == 1.0);
}

TEST_CASE("tensor objective matches enumeration and finite differences") {
  const auto planted = generate_planted_tensor(3, 3, 2, 1.0, 2.0, 9);
  const auto& p = planted.problem;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Vector x = uniform_point(p.dim(), 1.0, s) - Vector::Constant(p.dim(), 0.5);
    CHECK(p.value(x) == doctest::Approx(brute_value(p.tensor(), x, 2)).epsilon(1e-12));
    CHECK(rel_error(p.gradient(x), finite_diff_gradient(p, x, 1e-5)) <= 1e-6);
  }
}

TEST_CASE("tensor objective is invariant under block permutation") {
  const auto planted = generate_planted_tensor(4, 3, 3, 1.0, 2.0, 2);
  const auto& p = planted.problem;
  const Vector x = uniform_point(p.dim(), 1.0, 4);
  Vector y(p.dim());
  y << x.segment(8, 4), x.segment(0, 4), x.segment(4, 4);
  CHECK(std::abs(p.value(x) - p.value(y)) <= 1e-12 * std::max(1.0, p.value(x)));
}

TEST_CASE("odd order absorbs the sign of a component") {
  const auto planted = generate_planted_tensor(3, 3, 2, 1.0, 2.0, 3);
  std::vector<Vector> flipped = planted.components;
  flipped[1] = -flipped[1];
  SymTensorProblem p(tensor_from_components(flipped, 3), 2);
  Vector x(6);
  x << flipped[0], flipped[1];
  CHECK(p.value(x) <= 1e-24);
}

TEST_CASE("planted components are orthonormal when scales are one") {
  const auto planted = generate_planted_tensor(2, 3, 2, 1.0, 1.0, 21);
  Matrix c(2, 2);
  c << planted.components[0], planted.components[1];
  CHECK((c.transpose() * c - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("planted tensors are deterministic in the seed") {
  const auto a = generate_planted_tensor(4, 3, 2, 1.0, 2.0, 77);
  const auto b = generate_planted_tensor(4, 3, 2, 1.0, 2.0, 77);
  CHECK(a.problem.tensor().entries == b.problem.tensor().entries);
  CHECK_THROWS_AS(generate_planted_tensor(2, 3, 3, 1.0, 2.0, 1), DimensionError);
}

TEST_CASE("large planted tensor has zero loss at the plant") {
  const auto planted = generate_planted_tensor(8, 5, 5, 1.0, 2.0, 1);
  CHECK(planted.problem.tensor().size() == 32768);
  Vector x(planted.problem.dim());
  for (int i = 0; i < 5; ++i) x.segment(i * 8, 8) = planted.components[i];
  CHECK(planted.problem.value(x) <= 1e-18);
}

TEST_CASE("tensor text round trip keeps every entry") {
  const auto planted = generate_planted_tensor(3, 3, 2, 1.0, 2.0, 8);
  std::stringstream ss;
  write_tensor(ss, planted.problem);
  const auto back = read_tensor(ss);
  CHECK(back.tensor().entries == planted.problem.tensor().entries);
  CHECK(back.rank() == 2);
  std::stringstream bad("3,3\n1\n");
  CHECK_THROWS_AS(read_tensor(bad), FormatError);
}

TEST_CASE("identity autoencoder has zero loss and gradient") {
  const Matrix x = gaussian_matrix(3, 7, 1);
  LinearNetProblem p({3, 3, 3}, x, std::nullopt, NetMode::Autoencoder);
  const Vector w = p.flatten({Matrix::Identity(3, 3), Matrix::Identity(3, 3)});
  CHECK(p.value(w) <= 1e-24);
  CHECK(p.gradient(w).norm() <= 1e-12);
}

TEST_CASE("supervised planted weights give zero loss") {
  const std::vector<int> widths{4, 3, 2, 1};
  const Matrix x = gaussian_matrix(4, 10, 3);
  const auto planted = generate_planted_labels(widths, x, 4);
  LinearNetProblem p(widths, x, planted.labels, NetMode::Supervised);
  CHECK(p.value(p.flatten(planted.weights)) <= 1e-20);
}

TEST_CASE("one identity layer copies the data") {
  const Matrix x = gaussian_matrix(2, 5, 6);
  LinearNetProblem p({2, 2}, x, x, NetMode::Supervised);
  CHECK(p.value(p.flatten({Matrix::Identity(2, 2)})) == 0.0);
}

TEST_CASE("a 22-15-10-5-1 network has the expected weight sizes") {
  const std::vector<int> widths{22, 15, 10, 5, 1};
  const Matrix x = gaussian_matrix(22, 30, 2);
  const auto planted = generate_planted_labels(widths, x, 3);
  REQUIRE(planted.weights.size() == 4);
  CHECK(planted.weights[0].rows() == 15);
  CHECK(planted.weights[0].cols() == 22);
  CHECK(planted.weights[3].rows() == 1);
  CHECK(planted.weights[3].cols() == 5);
  LinearNetProblem p(widths, x, planted.labels, NetMode::Supervised);
  CHECK(p.dim() == 15 * 22 + 10 * 15 + 5 * 10 + 5);
}

TEST_CASE("network gradients match finite differences") {
  const std::vector<int> widths{4, 3, 2, 1};
  const Matrix x = gaussian_matrix(4, 10, 13);
  const auto planted = generate_planted_labels(widths, x, 14);
  LinearNetProblem sup(widths, x, planted.labels, NetMode::Supervised);
  LinearNetProblem ae({4, 2, 4}, x, std::nullopt, NetMode::Autoencoder);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Vector w = uniform_point(sup.dim(), 1.0, s);
    CHECK(rel_error(sup.gradient(w), finite_diff_gradient(sup, w, 1e-5)) <= 1e-6);
    const Vector v = uniform_point(ae.dim(), 1.0, s + 100);
    CHECK(rel_error(ae.gradient(v), finite_diff_gradient(ae, v, 1e-5)) <= 1e-6);
  }
}

TEST_CASE("flatten and unflatten are inverse") {
  const Matrix x = gaussian_matrix(3, 4, 1);
  LinearNetProblem p({3, 2, 3}, x, std::nullopt, NetMode::Autoencoder);
  const Vector w = uniform_point(p.dim(), 1.0, 3);
  CHECK(p.flatten(p.unflatten(w)) == w);
}

TEST_CASE("network shape errors") {
  const Matrix x = gaussian_matrix(3, 4, 1);
  CHECK_THROWS_AS(LinearNetProblem({3, 2}, x, std::nullopt, NetMode::Supervised), DimensionError);
  CHECK_THROWS_AS(LinearNetProblem({3, 2}, x, std::nullopt, NetMode::Autoencoder), DimensionError);
  CHECK_THROWS_AS(LinearNetProblem({4, 2}, x, Matrix(2, 4), NetMode::Supervised), DimensionError);
  LinearNetProblem ok({3, 3}, x, std::nullopt, NetMode::Autoencoder);
  CHECK_THROWS_AS(ok.value(Vector::Zero(2)), DimensionError);
}

TEST_CASE("analytic problems") {
  AnalyticProblem quad(AnalyticKind::Quadratic, 2);
  AnalyticProblem quart(AnalyticKind::Quartic, 2);
  AnalyticProblem neg(AnalyticKind::NegQuadratic, 2);
  AnalyticProblem lin(AnalyticKind::Linear, 2, 3.0);
  const Vector x = testutil::vec({1.0, 2.0});
  CHECK(quad.value(x) == 2.5);
  CHECK(quart.value(x) == doctest::Approx(6.25));
  CHECK(neg.value(x) == -2.5);
  CHECK(lin.value(x) == 9.0);
  for (const Objective* f : {static_cast<const Objective*>(&quad), static_cast<const Objective*>(&quart),
                             static_cast<const Objective*>(&neg), static_cast<const Objective*>(&lin)})
    CHECK(rel_error(f->gradient(x), finite_diff_gradient(*f, x, 1e-5)) <= 1e-6);
}

TEST_CASE("quartic growth functions follow the analytic formulas") {
  AnalyticProblem q(AnalyticKind::Quartic, 2, 1.0, testutil::vec({3.0, 4.0}));
  const auto g = q.growth();
  REQUIRE(g);
  CHECK(g->order1(1.0) == doctest::Approx(3 * 36.0));
  CHECK(g->order2(1.0) == doctest::Approx(36.0));
  AnalyticProblem q0(AnalyticKind::Quartic, 1);
  CHECK(q0.growth()->order1(0.1) == 1.0);
  CHECK(q0.growth()->order2(0.1) == 1.0);
}

TEST_CASE("quartic growth dominates sampled gradient ratios") {
  AnalyticProblem q(AnalyticKind::Quartic, 3);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0, 1);
  const double r = 1.5;
  const double bound = q.growth()->order1(r);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Vector a(3), b(3);
    for (Index j = 0; j < 3; ++j) {
      a[j] = n(rng);
      b[j] = n(rng);
    }
    a *= r * std::cbrt(u(rng)) / a.norm();
    b *= r * std::cbrt(u(rng)) / b.norm();
    worst = std::max(worst, (q.gradient(a) - q.gradient(b)).norm() / (a - b).norm());
  }
  CHECK(worst <= bound);
}

TEST_CASE("bundled values are nonnegative") {
  const auto planted = generate_planted_tensor(3, 3, 2, 1.0, 2.0, 1);
  const Matrix x = gaussian_matrix(3, 5, 1);
  LinearNetProblem ae({3, 2, 3}, x, std::nullopt, NetMode::Autoencoder);
  for (std::uint64_t s = 0; s < 20; ++s) {
    CHECK(planted.problem.value(uniform_point(6, 3.0, s)) >= 0.0);
    CHECK(ae.value(uniform_point(ae.dim(), 3.0, s)) >= 0.0);
  }
}

TEST_CASE("csv reader skips a header and rejects ragged rows") {
  std::stringstream ok("a,b\n1,2\n3,4\n5,6\n");
  const Matrix m = read_csv_matrix(ok);
  CHECK(m.rows() == 3);
  CHECK(m(2, 1) == 6.0);
  std::stringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(read_csv_matrix(ragged), FormatError);
}

TEST_CASE("uniform initial points lie in the box") {
  const Vector x = uniform_point(50, 0.1, 3);
  CHECK(x.minCoeff() >= 0.0);
  CHECK(x.maxCoeff() <= 0.1);
  CHECK(uniform_point(5, 0.1, 3) == uniform_point(5, 0.1, 3));
}
