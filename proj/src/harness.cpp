#include "slo/harness.hpp"

#include "slo/problems.hpp"
#include "slo/slo.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace slo {

namespace fs = std::filesystem;

const char* to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::Tensor: return "tensor";
    case ProblemKind::Autoencoder: return "autoencoder";
    case ProblemKind::Supervised: return "supervised";
    case ProblemKind::Quartic: return "quartic";
  }
  return "?";
}

const char* to_string(Method m) {
  switch (m) {
    case Method::GD: return "gd";
    case Method::BPG: return "bpg";
    case Method::PGD: return "pgd";
    case Method::NGD: return "ngd";
    case Method::LS: return "ls";
    case Method::AGP: return "agp";
  }
  return "?";
}

ProblemKind parse_problem(const std::string& name) {
  for (auto k : {ProblemKind::Tensor, ProblemKind::Autoencoder, ProblemKind::Supervised,
                 ProblemKind::Quartic})
    if (name == to_string(k)) return k;
  throw ConfigError("unknown problem '" + name + "'");
}

Method parse_method(const std::string& name) {
  for (auto m : {Method::GD, Method::BPG, Method::PGD, Method::NGD, Method::LS, Method::AGP})
    if (name == to_string(m)) return m;
  throw ConfigError("unknown method '" + name + "'");
}

// ---------------------------------------------------------------------------
// Problems
// ---------------------------------------------------------------------------

ProblemInstance make_problem(const ProblemSpec& spec, std::uint64_t seed) {
  ProblemInstance inst;
  switch (spec.kind) {
    case ProblemKind::Tensor: {
      auto planted = generate_planted_tensor(spec.dim, spec.order, spec.rank, spec.scale_low,
                                             spec.scale_high, mix_seed(seed, 101));
      auto p = std::make_unique<SymTensorProblem>(std::move(planted.problem));
      inst.bpg_degree = 2 * spec.order;
      inst.bpg_l = p->relative_smoothness_bound();
      inst.objective = std::move(p);
      inst.f_star = 0.0;
      break;
    }
    case ProblemKind::Autoencoder:
    case ProblemKind::Supervised: {
      const auto& w = spec.widths;
      if (w.size() < 2) throw ConfigError("widths must list at least two layers");
      Matrix x;
      if (!spec.data_csv.empty()) {
        std::ifstream in(spec.data_csv);
        if (!in) throw ConfigError("cannot open data file '" + spec.data_csv + "'");
        x = read_csv_matrix(in).transpose();
        if (x.rows() != w.front())
          throw ConfigError("data file has " + std::to_string(x.rows()) +
                            " features but the input width is " + std::to_string(w.front()));
      } else {
        x = gaussian_matrix(w.front(), spec.samples, mix_seed(seed, 102));
      }
      std::unique_ptr<LinearNetProblem> p;
      if (spec.kind == ProblemKind::Autoencoder) {
        if (w.front() != w.back()) throw ConfigError("autoencoder widths must start and end equal");
        p = std::make_unique<LinearNetProblem>(w, x, std::nullopt, NetMode::Autoencoder);
      } else {
        auto labels = generate_planted_labels(w, x, mix_seed(seed, 103));
        p = std::make_unique<LinearNetProblem>(w, x, std::move(labels.labels), NetMode::Supervised);
        inst.f_star = 0.0;
      }
      inst.bpg_degree = 2 * p->layers();
      inst.bpg_l = p->relative_smoothness_bound();
      inst.objective = std::move(p);
      break;
    }
    case ProblemKind::Quartic:
      inst.objective = std::make_unique<AnalyticProblem>(AnalyticKind::Quartic, spec.quartic_dim);
      inst.f_star = 0.0;
      inst.bpg_degree = 4;
      inst.bpg_l = 1.0;
      break;
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

namespace {

SloConfig slo_config(const ExperimentSpec& spec, Method m) {
  SloConfig c;
  switch (m) {
    case Method::PGD: c = SloConfig::gradient_projection(spec.epsilon, spec.radius); break;
    case Method::NGD:
      c = SloConfig::normalized_gradient(spec.epsilon, spec.margin.value_or(std::sqrt(spec.epsilon)),
                                         spec.radius);
      break;
    case Method::LS: c = SloConfig::line_search(spec.epsilon, spec.radius); break;
    case Method::AGP: c = SloConfig::accelerated_projection(spec.epsilon, spec.radius); break;
    default: throw ConfigError("not an SLO method");
  }
  c.max_total_grad_evals = spec.budget_evals;
  c.time_budget_s = spec.budget_seconds;
  c.lipschitz_source = spec.lipschitz;
  c.lipschitz_samples = spec.lipschitz_samples;
  c.validate();
  return c;
}

Budgets baseline_budgets(const ExperimentSpec& spec) {
  Budgets b;
  b.max_iters = std::numeric_limits<std::int64_t>::max();
  b.max_grad_evals = spec.budget_evals;
  b.time_budget_s = spec.budget_seconds;
  b.stop_grad_tol = std::sqrt(spec.epsilon);
  return b;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("setting '" + key + "' expects a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long out = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("setting '" + key + "' expects an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("setting '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string trim(std::string s) {
  s.erase(0, s.find_first_not_of(" \t\r"));
  s.erase(s.find_last_not_of(" \t\r") + 1);
  return s;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (rounds < 1) throw ConfigError("rounds must be at least 1");
  if (methods.empty()) throw ConfigError("no methods selected");
  if (!(init_scale >= 0.0)) throw ConfigError("init-scale must be nonnegative");
  if (budget_evals < 1) throw ConfigError("budget-evals must be positive");
  if (budget_seconds && !(*budget_seconds > 0.0)) throw ConfigError("budget-seconds must be positive");
  if (!(gd_step > 0.0)) throw ConfigError("gd-step must be positive");
  if (bpg_l && !(*bpg_l > 0.0)) throw ConfigError("bpg-l must be positive");
  const auto& p = problem;
  if (p.kind == ProblemKind::Tensor && (p.dim < 1 || p.order < 2 || p.rank < 1))
    throw ConfigError("tensor needs dim >= 1, order >= 2, rank >= 1");
  if (p.kind == ProblemKind::Quartic && p.quartic_dim < 1) throw ConfigError("quartic dim must be positive");
  if ((p.kind == ProblemKind::Autoencoder || p.kind == ProblemKind::Supervised) && p.samples < 1)
    throw ConfigError("samples must be positive");
  for (Method m : methods) {
    if (m == Method::GD || m == Method::BPG) continue;
    (void)slo_config(*this, m);
  }
  if (std::find(methods.begin(), methods.end(), Method::BPG) != methods.end()) {
    BpgConfig b;
    b.l_relative = bpg_l.value_or(1.0);
    b.validate();
  }
}

void apply_setting(ExperimentSpec& s, const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in);
  const std::string v = trim(value_in);
  auto& p = s.problem;
  if (key == "problem") p.kind = parse_problem(v);
  else if (key == "method" || key == "methods") {
    s.methods.clear();
    for (const auto& name : split_list(v)) {
      if (name == "all") {
        s.methods = {Method::GD, Method::BPG, Method::PGD, Method::NGD, Method::LS, Method::AGP};
        break;
      }
      s.methods.push_back(parse_method(name));
    }
  }
  else if (key == "epsilon") s.epsilon = parse_double(key, v);
  else if (key == "radius") s.radius = parse_double(key, v);
  else if (key == "margin") s.margin = parse_double(key, v);
  else if (key == "rounds") s.rounds = static_cast<int>(parse_int(key, v));
  else if (key == "seed") s.seed = static_cast<std::uint64_t>(parse_int(key, v));
  else if (key == "budget-evals") s.budget_evals = parse_int(key, v);
  else if (key == "budget-seconds") s.budget_seconds = parse_double(key, v);
  else if (key == "out") s.out_dir = v;
  else if (key == "init-scale") s.init_scale = parse_double(key, v);
  else if (key == "svg") s.svg = parse_bool(key, v);
  else if (key == "agp-trace") s.agp_trace = parse_bool(key, v);
  else if (key == "gd-step") s.gd_step = parse_double(key, v);
  else if (key == "bpg-l") s.bpg_l = parse_double(key, v);
  else if (key == "dim") { p.dim = static_cast<int>(parse_int(key, v)); p.quartic_dim = p.dim; }
  else if (key == "order") p.order = static_cast<int>(parse_int(key, v));
  else if (key == "rank") p.rank = static_cast<int>(parse_int(key, v));
  else if (key == "scale-low") p.scale_low = parse_double(key, v);
  else if (key == "scale-high") p.scale_high = parse_double(key, v);
  else if (key == "widths") {
    p.widths.clear();
    for (const auto& item : split_list(v)) p.widths.push_back(static_cast<int>(parse_int(key, item)));
  }
  else if (key == "samples") p.samples = static_cast<int>(parse_int(key, v));
  else if (key == "data-csv") p.data_csv = v;
  else if (key == "lipschitz") {
    if (v == "auto") s.lipschitz = LipschitzSource::Auto;
    else if (v == "sampled") s.lipschitz = LipschitzSource::Sampled;
    else throw ConfigError("lipschitz must be 'auto' or 'sampled'");
  }
  else if (key == "lipschitz-samples") s.lipschitz_samples = static_cast<int>(parse_int(key, v));
  else throw ConfigError("unknown setting '" + key + "'");
}

void load_config(ExperimentSpec& spec, std::istream& is) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    apply_setting(spec, t.substr(0, eq), t.substr(eq + 1));
  }
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_trace_csv(std::ostream& os, int round, const std::vector<IterationRecord>& trace) {
  os << kTraceHeader << '\n';
  for (const auto& r : trace) {
    os << round << ',' << r.epoch << ',' << r.iter << ',' << r.cum_grad_evals << ','
       << num(r.elapsed_s) << ',' << num(r.f_value) << ',' << num(r.grad_norm) << ','
       << num(r.dist_from_anchor) << '\n';
  }
}

TraceMinima read_trace_minima(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open trace '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || trim(line) != kTraceHeader)
    throw FormatError("trace '" + path + "' does not have the expected header");

  TraceMinima m;
  const std::string stem = fs::path(path).stem().string();
  const auto pos = stem.rfind("_round");
  if (pos == std::string::npos) throw FormatError("trace file name '" + stem + "' lacks _round<r>");
  m.method = stem.substr(0, pos);
  m.min_grad = std::numeric_limits<double>::infinity();
  m.min_f = std::numeric_limits<double>::infinity();
  int rows = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_list(line);
    if (cells.size() != 8) throw FormatError("trace '" + path + "' has a row with wrong column count");
    m.round = static_cast<int>(parse_int("round", cells[0]));
    m.min_f = std::min(m.min_f, parse_double("f_value", cells[5]));
    m.min_grad = std::min(m.min_grad, parse_double("grad_norm", cells[6]));
    ++rows;
  }
  if (rows == 0) throw FormatError("trace '" + path + "' has no records");
  return m;
}

namespace {

std::vector<MethodSummary> aggregate(const std::vector<TraceMinima>& runs, double f_star,
                                     const std::vector<std::string>& order) {
  std::vector<MethodSummary> out;
  for (const auto& name : order) {
    MethodSummary s;
    s.method = name;
    s.grad_best = s.gap_best = std::numeric_limits<double>::infinity();
    double gsum = 0.0, fsum = 0.0;
    for (const auto& r : runs) {
      if (r.method != name) continue;
      const double gap = r.min_f - f_star;
      s.grad_best = std::min(s.grad_best, r.min_grad);
      s.gap_best = std::min(s.gap_best, gap);
      gsum += r.min_grad;
      fsum += gap;
      ++s.rounds_ok;
    }
    if (s.rounds_ok > 0) {
      s.grad_avg = gsum / s.rounds_ok;
      s.gap_avg = fsum / s.rounds_ok;
    } else {
      s.grad_best = s.grad_avg = s.gap_best = s.gap_avg = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(std::move(s));
  }
  return out;
}

double best_observed(const std::vector<TraceMinima>& runs) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : runs) best = std::min(best, r.min_f);
  return best;
}

}  // namespace

std::vector<MethodSummary> summarize(const std::vector<std::string>& csv_paths,
                                     std::optional<double> f_star) {
  std::vector<TraceMinima> runs;
  std::vector<std::string> order;
  for (const auto& p : csv_paths) {
    runs.push_back(read_trace_minima(p));
    if (std::find(order.begin(), order.end(), runs.back().method) == order.end())
      order.push_back(runs.back().method);
  }
  if (runs.empty()) throw FormatError("summarize: no trace files");
  return aggregate(runs, f_star.value_or(best_observed(runs)), order);
}

void write_summary_csv(std::ostream& os, const std::vector<MethodSummary>& rows) {
  os << "method,grad_best,grad_avg,gap_best,gap_avg,rounds_ok,errors\n";
  for (const auto& r : rows) {
    os << r.method << ',' << num(r.grad_best) << ',' << num(r.grad_avg) << ',' << num(r.gap_best)
       << ',' << num(r.gap_avg) << ',' << r.rounds_ok << ',' << r.errors.size() << '\n';
  }
}

void write_summary_text(std::ostream& os, const std::vector<MethodSummary>& rows) {
  auto sci = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return std::string(buf);
  };
  os << std::left << std::setw(8) << "method" << std::right << std::setw(12) << "grad best"
     << std::setw(12) << "grad avg" << std::setw(12) << "gap best" << std::setw(12) << "gap avg"
     << std::setw(8) << "ok" << std::setw(8) << "errors" << '\n';
  for (const auto& r : rows) {
    os << std::left << std::setw(8) << r.method << std::right << std::setw(12) << sci(r.grad_best)
       << std::setw(12) << sci(r.grad_avg) << std::setw(12) << sci(r.gap_best) << std::setw(12)
       << sci(r.gap_avg) << std::setw(8) << r.rounds_ok << std::setw(8) << r.errors.size() << '\n';
  }
  for (const auto& r : rows)
    for (const auto& e : r.errors) os << r.method << ": " << e << '\n';
}

void write_trace_svg(std::ostream& os, const std::string& title,
                     const std::vector<IterationRecord>& trace) {
  constexpr double W = 640, H = 400, pad = 50;
  double xmax = 1;
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  auto lg = [](double v) { return std::log10(std::max(std::abs(v), 1e-300)); };
  for (const auto& r : trace) {
    xmax = std::max(xmax, static_cast<double>(r.cum_grad_evals));
    for (double v : {lg(r.f_value), lg(r.grad_norm)}) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (!(ymax > ymin)) ymax = ymin + 1;
  auto px = [&](double x) { return pad + (W - 2 * pad) * x / xmax; };
  auto py = [&](double y) { return H - pad - (H - 2 * pad) * (y - ymin) / (ymax - ymin); };
  auto line = [&](auto get, const char* color) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (const auto& r : trace) os << px(static_cast<double>(r.cum_grad_evals)) << ',' << py(get(r)) << ' ';
    os << "\"/>\n";
  };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << pad << "\" y=\"25\" font-size=\"14\">" << title << "</text>\n"
     << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
     << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << H - pad
     << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\" font-size=\"12\">gradient evaluations (max "
     << xmax << ")</text>\n"
     << "<text x=\"5\" y=\"" << pad - 8 << "\" font-size=\"12\">log10: " << ymin << " .. " << ymax << "</text>\n";
  line([&](const IterationRecord& r) { return lg(r.f_value); }, "steelblue");
  line([&](const IterationRecord& r) { return lg(r.grad_norm); }, "firebrick");
  os << "<text x=\"" << W - 160 << "\" y=\"25\" font-size=\"12\" fill=\"steelblue\">f</text>\n"
     << "<text x=\"" << W - 120 << "\" y=\"25\" font-size=\"12\" fill=\"firebrick\">|grad f|</text>\n"
     << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Experiment
// ---------------------------------------------------------------------------

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const ProblemInstance inst = make_problem(spec.problem, spec.seed);
  const Objective& f = *inst.objective;
  fs::create_directories(spec.out_dir);

  std::vector<std::string> order;
  for (Method m : spec.methods) order.push_back(to_string(m));
  std::map<std::string, std::vector<std::string>> errors;
  std::vector<TraceMinima> runs;
  ExperimentResult result;

  auto open = [](const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw FormatError("cannot write '" + p.string() + "'");
    return out;
  };

  for (int r = 0; r < spec.rounds; ++r) {
    const std::uint64_t round_seed = spec.seed + static_cast<std::uint64_t>(r);
    const Vector x0 = uniform_point(f.dim(), spec.init_scale, round_seed);
    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
      const Method m = spec.methods[mi];
      const std::string name = to_string(m);
      std::vector<std::string> upg_rows;
      RunResult run;
      try {
        switch (m) {
          case Method::GD: run = gd_fixed(f, x0, spec.gd_step, baseline_budgets(spec)); break;
          case Method::BPG: {
            BpgConfig b;
            b.poly_degree_n = inst.bpg_degree;
            b.l_relative = spec.bpg_l.value_or(inst.bpg_l);
            run = run_bpg(f, x0, b, baseline_budgets(spec));
            break;
          }
          default: {
            SloConfig c = slo_config(spec, m);
            c.seed = mix_seed(round_seed, mi);
            SloHooks hooks;
            if (m == Method::AGP && spec.agp_trace) {
              std::int64_t call = 0;
              hooks.upg.observer = [&](const UpgStep& s) {
                upg_rows.push_back(std::to_string(r) + ',' + std::to_string(call) + ',' +
                                   std::to_string(s.t) + ',' + num(s.f_hat_y) + ',' +
                                   num(s.grad_norm_y) + ',' + (s.step_interior ? "1" : "0") + ',' +
                                   std::to_string(s.certify));
              };
              hooks.on_agp = [&](const AgpCall&) { ++call; };
            }
            run = run_slo(f, x0, c, hooks);
          }
        }
      } catch (const Error& e) {
        errors[name].push_back("round " + std::to_string(r) + ": " + e.kind() + ": " + e.what());
        continue;
      }

      const fs::path csv = fs::path(spec.out_dir) / (name + "_round" + std::to_string(r) + ".csv");
      {
        auto out = open(csv);
        write_trace_csv(out, r, run.trace);
      }
      result.csv_paths.push_back(csv.string());
      runs.push_back(read_trace_minima(csv.string()));
      if (spec.svg) {
        auto out = open(fs::path(spec.out_dir) / (name + "_round" + std::to_string(r) + ".svg"));
        write_trace_svg(out, to_string(spec.problem.kind) + std::string(" / ") + name +
                                 " / round " + std::to_string(r), run.trace);
      }
      if (!upg_rows.empty()) {
        auto out = open(fs::path(spec.out_dir) / ("agp_round" + std::to_string(r) + "_upg.csv"));
        out << "round,call,t,f_hat_y,grad_norm_y,step_interior,certify\n";
        for (const auto& row : upg_rows) out << row << '\n';
      }
    }
  }

  result.f_star = inst.f_star ? *inst.f_star : best_observed(runs);
  result.summary = aggregate(runs, result.f_star, order);
  for (auto& s : result.summary) s.errors = errors[s.method];
  {
    auto out = open(fs::path(spec.out_dir) / "summary.csv");
    write_summary_csv(out, result.summary);
  }
  {
    auto out = open(fs::path(spec.out_dir) / "summary.txt");
    write_summary_text(out, result.summary);
  }
  return result;
}

}  // namespace slo
