#pragma once

#include "slo/baselines.hpp"
#include "slo/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace slo {

enum class ProblemKind { Tensor, Autoencoder, Supervised, Quartic };
enum class Method { GD, BPG, PGD, NGD, LS, AGP };

const char* to_string(ProblemKind k);
const char* to_string(Method m);
ProblemKind parse_problem(const std::string& name);
Method parse_method(const std::string& name);

struct ProblemSpec {
  ProblemKind kind = ProblemKind::Tensor;
  // Tensor shape: dimension d, order k, rank m; planted scales Unif[low, high].
  int dim = 4;
  int order = 3;
  int rank = 2;
  double scale_low = 1.0;
  double scale_high = 2.0;
  // Networks: layer widths from input to output, and the number of samples.
  std::vector<int> widths{8, 5, 3, 1};
  int samples = 50;
  std::string data_csv;  ///< optional; one sample per row
  // Quartic dimension.
  int quartic_dim = 1;
};

struct ProblemInstance {
  std::unique_ptr<Objective> objective;
  std::optional<double> f_star;  ///< known optimal value for planted problems
  int bpg_degree = 4;
  double bpg_l = 1.0;            ///< certified relative-smoothness constant
};

/// Builds the problem; the instance depends only on `spec` and `seed`.
ProblemInstance make_problem(const ProblemSpec& spec, std::uint64_t seed);

struct ExperimentSpec {
  ProblemSpec problem;
  std::vector<Method> methods{Method::GD, Method::BPG, Method::PGD, Method::NGD, Method::LS,
                              Method::AGP};
  int rounds = 1;
  std::uint64_t seed = 0;
  double init_scale = 0.1;  ///< initial points drawn from Unif[0, init_scale]^n

  double epsilon = 1e-8;
  double radius = 1.0;
  std::optional<double> margin;  ///< normalized gradient margin, default sqrt(epsilon)
  std::int64_t budget_evals = 100'000;
  std::optional<double> budget_seconds;

  double gd_step = 1e-3;
  std::optional<double> bpg_l;
  LipschitzSource lipschitz = LipschitzSource::Auto;
  int lipschitz_samples = 50;

  std::string out_dir = "out";
  bool svg = false;
  bool agp_trace = false;

  /// Checks ranges and every method's configuration; throws ConfigError.
  void validate() const;
};

/// Applies one key=value setting; keys match the long CLI flag names.
void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value);
/// Reads a flat key=value file. Blank lines and lines starting with '#' are skipped.
void load_config(ExperimentSpec& spec, std::istream& is);

struct MethodSummary {
  std::string method;
  double grad_best = 0.0;
  double grad_avg = 0.0;
  double gap_best = 0.0;
  double gap_avg = 0.0;
  int rounds_ok = 0;
  std::vector<std::string> errors;
};

struct ExperimentResult {
  std::vector<MethodSummary> summary;
  std::vector<std::string> csv_paths;
  double f_star = 0.0;
};

inline constexpr const char* kTraceHeader =
    "round,epoch,iter,grad_evals,elapsed_s,f_value,grad_norm,dist_from_anchor";

/// Runs every method for every round and writes <method>_round<r>.csv traces,
/// summary.csv and summary.txt into spec.out_dir.
///
/// Round r starts all methods from one point drawn with seed base + r. A
/// method's own randomness is seeded with mix_seed(base + r, method index).
ExperimentResult run_experiment(const ExperimentSpec& spec);

void write_trace_csv(std::ostream& os, int round, const std::vector<IterationRecord>& trace);

/// Per-round minima parsed from one trace CSV.
struct TraceMinima {
  std::string method;
  int round = 0;
  double min_grad = 0.0;
  double min_f = 0.0;
};
TraceMinima read_trace_minima(const std::string& path);

/// Best and average of the per-round minima, grouped by the method prefix of
/// each file name. Gaps use f_star when given, else the smallest value seen.
std::vector<MethodSummary> summarize(const std::vector<std::string>& csv_paths,
                                     std::optional<double> f_star = std::nullopt);

void write_summary_csv(std::ostream& os, const std::vector<MethodSummary>& rows);
void write_summary_text(std::ostream& os, const std::vector<MethodSummary>& rows);

/// Line chart of f and grad_norm (log10 scale) against gradient evaluations.
void write_trace_svg(std::ostream& os, const std::string& title,
                     const std::vector<IterationRecord>& trace);

}  // namespace slo
