#pragma once

#include "slo/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace slo {

// ---------------------------------------------------------------------------
// Symmetric tensor decomposition
// ---------------------------------------------------------------------------

/// Dense k-way array with d^k entries stored in row-major order.
struct SymmetricTensor {
  int dim = 0;
  int order = 0;
  std::vector<double> entries;

  std::size_t size() const { return entries.size(); }
  double at(const std::vector<int>& index) const;
  /// Maximum deviation between an entry and its sorted-index counterpart.
  double asymmetry() const;
  double frobenius_norm() const;
};

/// Largest tensor (in entries) the library will allocate by default.
inline constexpr std::size_t kDefaultTensorEntryCap = std::size_t{1} << 22;

/// T = sum_i x_i (x) ... (x) x_i, exactly symmetric: every entry is computed
/// from its sorted multi-index, so permuted indices share the same arithmetic.
SymmetricTensor tensor_from_components(const std::vector<Vector>& components, int order,
                                       std::size_t entry_cap = kDefaultTensorEntryCap);

/// f(x) = || T - sum_{i=1}^m x_i^{(x)k} ||_F^2 over x = (x_1, ..., x_m).
class SymTensorProblem final : public Objective {
 public:
  SymTensorProblem(SymmetricTensor tensor, int rank);

  Index dim() const override { return static_cast<Index>(rank_) * tensor_.dim; }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  std::optional<GrowthFunctions> growth() const override;

  const SymmetricTensor& tensor() const { return tensor_; }
  int rank() const { return rank_; }
  int order() const { return tensor_.order; }
  int component_dim() const { return tensor_.dim; }

  /// L with L*h -+ f convex for h(x) = |x|^{2k}/(2k) + |x|^2/2.
  double relative_smoothness_bound() const;

 private:
  void check_dim(const Vector& x) const;
  // Residual entries T - model(x), row-major.
  std::vector<double> residual(const Vector& x) const;

  SymmetricTensor tensor_;
  int rank_;
  double tensor_norm_;
};

struct PlantedTensor {
  SymTensorProblem problem;
  std::vector<Vector> components;
};

/// Orthonormal directions (QR of seeded Gaussian vectors) scaled by
/// Unif[scale_low, scale_high] scalars.
PlantedTensor generate_planted_tensor(int dim, int order, int rank, double scale_low,
                                      double scale_high, std::uint64_t seed);

/// Text format: first line "d,k,m", then the d^k entries in row-major order,
/// one per line, with 17 significant digits.
void write_tensor(std::ostream& os, const SymTensorProblem& problem);
SymTensorProblem read_tensor(std::istream& is);

// ---------------------------------------------------------------------------
// Deep linear networks
// ---------------------------------------------------------------------------

enum class NetMode { Autoencoder, Supervised };

/// f(W) = || Target - W_m ... W_1 X ||_F^2 with identity activations.
///
/// `widths` lists layer widths from input to output, so W_i has shape
/// widths[i] x widths[i-1]. The decision vector stacks W_1, ..., W_m, each in
/// column-major order.
class LinearNetProblem final : public Objective {
 public:
  LinearNetProblem(std::vector<int> widths, Matrix data_x, std::optional<Matrix> labels_y,
                   NetMode mode);

  Index dim() const override { return n_params_; }
  double value(const Vector& w) const override;
  Vector gradient(const Vector& w) const override;
  std::optional<GrowthFunctions> growth() const override;

  std::vector<Matrix> unflatten(const Vector& w) const;
  Vector flatten(const std::vector<Matrix>& weights) const;

  int layers() const { return static_cast<int>(widths_.size()) - 1; }
  const std::vector<int>& widths() const { return widths_; }
  NetMode mode() const { return mode_; }
  const Matrix& data() const { return x_; }
  const Matrix& target() const { return mode_ == NetMode::Autoencoder ? x_ : y_; }

  /// L with L*h -+ f convex for h(w) = |w|^{2m}/(2m) + |w|^2/2.
  double relative_smoothness_bound() const;

 private:
  void check_dim(const Vector& w) const;

  std::vector<int> widths_;
  Matrix x_;
  Matrix y_;
  NetMode mode_;
  Index n_params_ = 0;
  // Suprema of the degree-m and degree-2m parts of f on the unit sphere.
  double cross_bound_ = 0.0;
  double square_bound_ = 0.0;
};

struct PlantedLabels {
  Matrix labels;
  std::vector<Matrix> weights;
};

/// Y = W*_m ... W*_1 X for seeded Gaussian planted weights.
PlantedLabels generate_planted_labels(const std::vector<int>& widths, const Matrix& data_x,
                                      std::uint64_t seed);

// ---------------------------------------------------------------------------
// Analytic test functions
// ---------------------------------------------------------------------------

enum class AnalyticKind { Quadratic, Quartic, NegQuadratic, Linear };

/// Quadratic: |x|^2/2.  Quartic: |x|^4/4.  NegQuadratic: -|x|^2/2.
/// Linear: slope * sum_i x_i.
class AnalyticProblem final : public Objective {
 public:
  AnalyticProblem(AnalyticKind kind, Index dim, double slope = 1.0);
  AnalyticProblem(AnalyticKind kind, Index dim, double slope, Vector anchor);

  Index dim() const override { return dim_; }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  std::optional<GrowthFunctions> growth() const override;

  AnalyticKind kind() const { return kind_; }

 private:
  AnalyticKind kind_;
  Index dim_;
  double slope_;
  Vector anchor_;
};

// ---------------------------------------------------------------------------
// Data helpers
// ---------------------------------------------------------------------------

Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed);
/// Entries drawn independently from Unif[0, scale].
Vector uniform_point(Index dim, double scale, std::uint64_t seed);
/// Reads a numeric CSV (comma separated, optional non-numeric header row).
Matrix read_csv_matrix(std::istream& is);

}  // namespace slo
