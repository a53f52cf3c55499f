#include "slo/problems.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace slo {

namespace {

std::size_t checked_power(int base, int exponent, std::size_t cap) {
  std::size_t n = 1;
  for (int s = 0; s < exponent; ++s) {
    if (n > cap / static_cast<std::size_t>(base)) {
      throw SizeError("tensor with " + std::to_string(base) + "^" + std::to_string(exponent) +
                      " entries exceeds the entry cap of " + std::to_string(cap));
    }
    n *= static_cast<std::size_t>(base);
  }
  return n;
}

// Row-major odometer over {0..d-1}^k.
bool advance(std::vector<int>& idx, int d) {
  for (int s = static_cast<int>(idx.size()) - 1; s >= 0; --s) {
    if (++idx[s] < d) return true;
    idx[s] = 0;
  }
  return false;
}

template <typename Vec>
double rank_one_entry(const Vec& comp, const std::vector<int>& sorted_idx) {
  double p = 1.0;
  for (int j : sorted_idx) p *= comp[j];
  return p;
}

// Sums of the rank-one terms x_i^{(x)k}, entry by entry, using sorted indices.
template <typename Component>
std::vector<double> model_entries(int d, int k, int m, Component&& component) {
  const std::size_t n = checked_power(d, k, std::numeric_limits<std::size_t>::max());
  std::vector<double> out(n, 0.0);
  std::vector<int> idx(k, 0);
  std::vector<int> sorted(k);
  std::size_t e = 0;
  do {
    std::copy(idx.begin(), idx.end(), sorted.begin());
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (int i = 0; i < m; ++i) sum += rank_one_entry(component(i), sorted);
    out[e++] = sum;
  } while (advance(idx, d));
  return out;
}

// Homogeneous-form bound: a degree-q form with sup |p| <= c on the unit sphere
// has |grad^s p(x)| <= q!/(q-s)! * c * |x|^(q-s).
double falling(int q, int s) {
  double r = 1.0;
  for (int i = 0; i < s; ++i) r *= (q - i);
  return r;
}

double form_derivative_bound(int q, int s, double c, double radius) {
  if (s > q || c == 0.0) return 0.0;
  return falling(q, s) * c * std::pow(radius, q - s);
}

}  // namespace

// ---------------------------------------------------------------------------

double SymmetricTensor::at(const std::vector<int>& index) const {
  if (static_cast<int>(index.size()) != order) throw DimensionError("tensor index has wrong order");
  std::size_t e = 0;
  for (int j : index) {
    if (j < 0 || j >= dim) throw DimensionError("tensor index out of range");
    e = e * dim + j;
  }
  return entries[e];
}

double SymmetricTensor::asymmetry() const {
  double worst = 0.0;
  std::vector<int> idx(order, 0);
  std::size_t e = 0;
  do {
    std::vector<int> sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    worst = std::max(worst, std::abs(entries[e] - at(sorted)));
    ++e;
  } while (advance(idx, dim));
  return worst;
}

double SymmetricTensor::frobenius_norm() const {
  double s = 0.0;
  for (double v : entries) s += v * v;
  return std::sqrt(s);
}

SymmetricTensor tensor_from_components(const std::vector<Vector>& components, int order,
                                       std::size_t entry_cap) {
  if (components.empty()) throw DimensionError("tensor_from_components: no components");
  if (order < 1) throw DimensionError("tensor_from_components: order must be >= 1");
  const Index d = components.front().size();
  if (d < 1) throw DimensionError("tensor_from_components: empty component");
  for (const Vector& c : components) {
    if (c.size() != d) throw DimensionError("tensor_from_components: component lengths differ");
    require_finite(c, "tensor component");
  }
  checked_power(static_cast<int>(d), order, entry_cap);

  SymmetricTensor t;
  t.dim = static_cast<int>(d);
  t.order = order;
  t.entries = model_entries(t.dim, order, static_cast<int>(components.size()),
                            [&](int i) -> const Vector& { return components[i]; });
  return t;
}

// ---------------------------------------------------------------------------

SymTensorProblem::SymTensorProblem(SymmetricTensor tensor, int rank)
    : tensor_(std::move(tensor)), rank_(rank) {
  if (rank_ < 1) throw DimensionError("SymTensorProblem: rank must be >= 1");
  if (tensor_.dim < 1 || tensor_.order < 1) throw DimensionError("SymTensorProblem: empty tensor");
  const std::size_t expect =
      checked_power(tensor_.dim, tensor_.order, std::numeric_limits<std::size_t>::max());
  if (tensor_.entries.size() != expect) throw DimensionError("SymTensorProblem: entry count mismatch");
  tensor_norm_ = tensor_.frobenius_norm();
}

void SymTensorProblem::check_dim(const Vector& x) const {
  if (x.size() != dim()) {
    throw DimensionError("SymTensorProblem: expected dimension " + std::to_string(dim()) +
                         ", got " + std::to_string(x.size()));
  }
}

std::vector<double> SymTensorProblem::residual(const Vector& x) const {
  const int d = tensor_.dim;
  std::vector<double> r = model_entries(d, tensor_.order, rank_, [&](int i) {
    return x.segment(static_cast<Index>(i) * d, d);
  });
  for (std::size_t e = 0; e < r.size(); ++e) r[e] = tensor_.entries[e] - r[e];
  return r;
}

double SymTensorProblem::value(const Vector& x) const {
  check_dim(x);
  double s = 0.0;
  for (double v : residual(x)) s += v * v;
  return s;
}

Vector SymTensorProblem::gradient(const Vector& x) const {
  check_dim(x);
  const int d = tensor_.dim;
  const int k = tensor_.order;
  const std::vector<double> r = residual(x);

  // d/dx_i ||R||^2 = -2 sum_s R contracted with x_i on every mode except s.
  Vector g = Vector::Zero(dim());
  std::vector<int> idx(k, 0);
  std::vector<double> prefix(k + 1), suffix(k + 1);
  std::size_t e = 0;
  do {
    const double re = r[e++];
    if (re == 0.0) continue;
    for (int i = 0; i < rank_; ++i) {
      const auto xi = x.segment(static_cast<Index>(i) * d, d);
      prefix[0] = 1.0;
      for (int s = 0; s < k; ++s) prefix[s + 1] = prefix[s] * xi[idx[s]];
      suffix[k] = 1.0;
      for (int s = k - 1; s >= 0; --s) suffix[s] = suffix[s + 1] * xi[idx[s]];
      for (int s = 0; s < k; ++s) {
        g[static_cast<Index>(i) * d + idx[s]] -= 2.0 * re * prefix[s] * suffix[s + 1];
      }
    }
  } while (advance(idx, d));
  return g;
}

std::optional<GrowthFunctions> SymTensorProblem::growth() const {
  // f = |T|^2 - 2 P1 + P2 with P1 of degree k (sup <= |T|_F on the unit
  // sphere) and P2 of degree 2k (sup <= 1).
  const int k = tensor_.order;
  const double tn = tensor_norm_;
  GrowthFunctions g;
  g.anchor = Vector::Zero(dim());
  g.order1 = [k, tn](double r) {
    return 2.0 * form_derivative_bound(k, 2, tn, r) + form_derivative_bound(2 * k, 2, 1.0, r);
  };
  g.order2 = [k, tn](double r) {
    return 2.0 * form_derivative_bound(k, 3, tn, r) + form_derivative_bound(2 * k, 3, 1.0, r);
  };
  return g;
}

double SymTensorProblem::relative_smoothness_bound() const {
  // |hess f(x)| <= 2k(k-1)|T| R^{k-2} + 2k(2k-1) R^{2k-2} while
  // hess h(x) >= (R^{2k-2} + 1) I, and R^{k-2} <= R^{2k-2} + 1.
  const double k = tensor_.order;
  return 2.0 * k * (2.0 * k - 1.0) + 2.0 * k * (k - 1.0) * tensor_norm_;
}

PlantedTensor generate_planted_tensor(int dim, int order, int rank, double scale_low,
                                      double scale_high, std::uint64_t seed) {
  if (dim < 1 || order < 1 || rank < 1) throw DimensionError("generate_planted_tensor: bad shape");
  if (rank > dim) {
    throw DimensionError("generate_planted_tensor: rank " + std::to_string(rank) +
                         " exceeds dimension " + std::to_string(dim));
  }
  if (!(scale_low <= scale_high)) throw ConfigError("generate_planted_tensor: empty scale range");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix gauss(dim, rank);
  for (Index c = 0; c < rank; ++c)
    for (Index r = 0; r < dim; ++r) gauss(r, c) = normal(rng);
  const Eigen::HouseholderQR<Matrix> qr(gauss);
  const Matrix q = qr.householderQ() * Matrix::Identity(dim, rank);

  std::uniform_real_distribution<double> scale(scale_low, scale_high);
  std::vector<Vector> comps;
  comps.reserve(rank);
  for (Index c = 0; c < rank; ++c) {
    const double s = scale_low == scale_high ? scale_low : scale(rng);
    comps.emplace_back(s * q.col(c));
  }
  SymmetricTensor t = tensor_from_components(comps, order);
  return PlantedTensor{SymTensorProblem(std::move(t), rank), std::move(comps)};
}

void write_tensor(std::ostream& os, const SymTensorProblem& problem) {
  const SymmetricTensor& t = problem.tensor();
  os << t.dim << ',' << t.order << ',' << problem.rank() << '\n';
  os << std::setprecision(17);
  for (double v : t.entries) os << v << '\n';
}

SymTensorProblem read_tensor(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw FormatError("tensor file: missing header");
  std::replace(header.begin(), header.end(), ',', ' ');
  std::istringstream hs(header);
  int d = 0, k = 0, m = 0;
  if (!(hs >> d >> k >> m) || d < 1 || k < 1 || m < 1)
    throw FormatError("tensor file: header must be 'd,k,m'");
  SymmetricTensor t;
  t.dim = d;
  t.order = k;
  const std::size_t n = checked_power(d, k, kDefaultTensorEntryCap);
  t.entries.resize(n);
  for (std::size_t e = 0; e < n; ++e) {
    if (!(is >> t.entries[e])) throw FormatError("tensor file: expected " + std::to_string(n) + " entries");
  }
  return SymTensorProblem(std::move(t), m);
}

// ---------------------------------------------------------------------------

LinearNetProblem::LinearNetProblem(std::vector<int> widths, Matrix data_x,
                                   std::optional<Matrix> labels_y, NetMode mode)
    : widths_(std::move(widths)), x_(std::move(data_x)), mode_(mode) {
  if (widths_.size() < 2) throw DimensionError("LinearNetProblem: need at least one layer");
  for (int w : widths_)
    if (w < 1) throw DimensionError("LinearNetProblem: widths must be positive");
  if (x_.rows() != widths_.front()) {
    throw DimensionError("LinearNetProblem: data has " + std::to_string(x_.rows()) +
                         " features but the first layer expects " + std::to_string(widths_.front()));
  }
  if (mode_ == NetMode::Supervised) {
    if (!labels_y) throw DimensionError("LinearNetProblem: supervised mode needs labels");
    y_ = std::move(*labels_y);
    if (y_.rows() != widths_.back() || y_.cols() != x_.cols())
      throw DimensionError("LinearNetProblem: label shape does not match the output layer");
  } else if (widths_.back() != widths_.front()) {
    throw DimensionError("LinearNetProblem: autoencoder output width must equal the input width");
  }
  for (std::size_t i = 1; i < widths_.size(); ++i)
    n_params_ += static_cast<Index>(widths_[i]) * widths_[i - 1];

  const int m = layers();
  const double xs = x_.size() ? Eigen::JacobiSVD<Matrix>(x_).singularValues()(0) : 0.0;
  const double per_layer = std::pow(static_cast<double>(m), -0.5 * m);
  cross_bound_ = target().norm() * xs * per_layer;
  square_bound_ = xs * xs * per_layer * per_layer;
}

void LinearNetProblem::check_dim(const Vector& w) const {
  if (w.size() != n_params_) {
    throw DimensionError("LinearNetProblem: expected " + std::to_string(n_params_) +
                         " parameters, got " + std::to_string(w.size()));
  }
}

std::vector<Matrix> LinearNetProblem::unflatten(const Vector& w) const {
  check_dim(w);
  std::vector<Matrix> ws;
  Index offset = 0;
  for (std::size_t i = 1; i < widths_.size(); ++i) {
    const Index rows = widths_[i], cols = widths_[i - 1];
    ws.emplace_back(Eigen::Map<const Matrix>(w.data() + offset, rows, cols));
    offset += rows * cols;
  }
  return ws;
}

Vector LinearNetProblem::flatten(const std::vector<Matrix>& weights) const {
  if (weights.size() + 1 != widths_.size()) throw DimensionError("flatten: wrong layer count");
  Vector w(n_params_);
  Index offset = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].rows() != widths_[i + 1] || weights[i].cols() != widths_[i])
      throw DimensionError("flatten: layer " + std::to_string(i + 1) + " has the wrong shape");
    Eigen::Map<Matrix>(w.data() + offset, weights[i].rows(), weights[i].cols()) = weights[i];
    offset += weights[i].size();
  }
  return w;
}

double LinearNetProblem::value(const Vector& w) const {
  const std::vector<Matrix> ws = unflatten(w);
  Matrix a = x_;
  for (const Matrix& wi : ws) a = wi * a;
  return (target() - a).squaredNorm();
}

Vector LinearNetProblem::gradient(const Vector& w) const {
  const std::vector<Matrix> ws = unflatten(w);
  std::vector<Matrix> acts;
  acts.reserve(ws.size() + 1);
  acts.push_back(x_);
  for (const Matrix& wi : ws) acts.push_back(wi * acts.back());

  Vector g(n_params_);
  Matrix back = -2.0 * (target() - acts.back());
  Index offset = n_params_;
  for (std::size_t i = ws.size(); i-- > 0;) {
    offset -= ws[i].size();
    Eigen::Map<Matrix>(g.data() + offset, ws[i].rows(), ws[i].cols()) =
        back * acts[i].transpose();
    if (i > 0) back = ws[i].transpose() * back;
  }
  return g;
}

std::optional<GrowthFunctions> LinearNetProblem::growth() const {
  const int m = layers();
  const double c1 = cross_bound_, c2 = square_bound_;
  GrowthFunctions g;
  g.anchor = Vector::Zero(n_params_);
  g.order1 = [m, c1, c2](double r) {
    return 2.0 * form_derivative_bound(m, 2, c1, r) + form_derivative_bound(2 * m, 2, c2, r);
  };
  g.order2 = [m, c1, c2](double r) {
    return 2.0 * form_derivative_bound(m, 3, c1, r) + form_derivative_bound(2 * m, 3, c2, r);
  };
  return g;
}

double LinearNetProblem::relative_smoothness_bound() const {
  const double m = layers();
  const double bound = 2.0 * m * (2.0 * m - 1.0) * square_bound_ + 2.0 * m * (m - 1.0) * cross_bound_;
  return std::max(bound, 1.0);
}

PlantedLabels generate_planted_labels(const std::vector<int>& widths, const Matrix& data_x,
                                      std::uint64_t seed) {
  if (widths.size() < 2) throw DimensionError("generate_planted_labels: need at least one layer");
  if (data_x.rows() != widths.front())
    throw DimensionError("generate_planted_labels: data rows do not match the input width");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  PlantedLabels out;
  Matrix a = data_x;
  for (std::size_t i = 1; i < widths.size(); ++i) {
    Matrix w(widths[i], widths[i - 1]);
    const double scale = 1.0 / std::sqrt(static_cast<double>(widths[i - 1]));
    for (Index c = 0; c < w.cols(); ++c)
      for (Index r = 0; r < w.rows(); ++r) w(r, c) = scale * normal(rng);
    a = w * a;
    out.weights.push_back(std::move(w));
  }
  out.labels = std::move(a);
  return out;
}

// ---------------------------------------------------------------------------

AnalyticProblem::AnalyticProblem(AnalyticKind kind, Index dim, double slope)
    : AnalyticProblem(kind, dim, slope, Vector::Zero(dim)) {}

AnalyticProblem::AnalyticProblem(AnalyticKind kind, Index dim, double slope, Vector anchor)
    : kind_(kind), dim_(dim), slope_(slope), anchor_(std::move(anchor)) {
  if (dim_ < 1) throw DimensionError("AnalyticProblem: dimension must be positive");
  if (anchor_.size() != dim_) throw DimensionError("AnalyticProblem: anchor dimension mismatch");
}

double AnalyticProblem::value(const Vector& x) const {
  if (x.size() != dim_) throw DimensionError("AnalyticProblem: dimension mismatch");
  switch (kind_) {
    case AnalyticKind::Quadratic: return 0.5 * x.squaredNorm();
    case AnalyticKind::Quartic: {
      const double s = x.squaredNorm();
      return 0.25 * s * s;
    }
    case AnalyticKind::NegQuadratic: return -0.5 * x.squaredNorm();
    case AnalyticKind::Linear: return slope_ * x.sum();
  }
  return 0.0;
}

Vector AnalyticProblem::gradient(const Vector& x) const {
  if (x.size() != dim_) throw DimensionError("AnalyticProblem: dimension mismatch");
  switch (kind_) {
    case AnalyticKind::Quadratic: return x;
    case AnalyticKind::Quartic: return x.squaredNorm() * x;
    case AnalyticKind::NegQuadratic: return -x;
    case AnalyticKind::Linear: return Vector::Constant(dim_, slope_);
  }
  return Vector::Zero(dim_);
}

std::optional<GrowthFunctions> AnalyticProblem::growth() const {
  GrowthFunctions g;
  g.anchor = anchor_;
  const double base = anchor_.norm();
  if (kind_ == AnalyticKind::Quartic) {
    g.order1 = [base](double r) { return std::max(1.0, 3.0 * (base + r) * (base + r)); };
    g.order2 = [base](double r) { return std::max(1.0, 6.0 * (base + r)); };
  } else {
    g.order1 = [](double) { return 1.0; };
    g.order2 = [](double) { return 1.0; };
  }
  return g;
}

// ---------------------------------------------------------------------------

Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = normal(rng);
  return m;
}

Vector uniform_point(Index dim, double scale, std::uint64_t seed) {
  if (!(scale >= 0.0)) throw ConfigError("uniform_point: scale must be nonnegative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector x(dim);
  for (Index i = 0; i < dim; ++i) x[i] = scale * unif(rng);
  return x;
}

Matrix read_csv_matrix(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw FormatError("csv: non-numeric cell in row " + std::to_string(rows.size() + 1));
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size()) throw FormatError("csv: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("csv: no data");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

}  // namespace slo
