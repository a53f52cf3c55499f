// Command line front end for the experiment harness.
//
//   slo_bench run --problem tensor --method ls,agp --rounds 5 --out runs/
//   slo_bench summarize runs/*.csv

#include "slo/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

int main(int argc, char** argv) {
  CLI::App app{"Sequential local optimization benchmarks"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment and write traces and a summary");
  std::string config_path;
  run->add_option("--config", config_path, "key=value file; flags given on the command line win");

  // Every setting is taken as text and routed through apply_setting so that
  // flags and config files share one parser.
  const std::vector<std::pair<std::string, std::string>> settings = {
      {"problem", "tensor | autoencoder | supervised | quartic"},
      {"method", "comma separated subset of gd,bpg,pgd,ngd,ls,agp, or all"},
      {"epsilon", "target precision (stop once |grad| < sqrt(epsilon))"},
      {"radius", "epoch radius D (also the line-search step cap)"},
      {"margin", "normalized gradient margin d"},
      {"rounds", "number of rounds"},
      {"seed", "base seed"},
      {"budget-evals", "gradient evaluations per run"},
      {"budget-seconds", "wall-clock seconds per run"},
      {"out", "output directory"},
      {"init-scale", "initial points are Unif[0, c]"},
      {"svg", "also write an SVG chart per trace (true/false)"},
      {"agp-trace", "dump AGP inner iterations (true/false)"},
      {"gd-step", "fixed step of gd"},
      {"bpg-l", "relative smoothness constant of bpg"},
      {"dim", "tensor or quartic dimension"},
      {"order", "tensor order k"},
      {"rank", "tensor rank m"},
      {"scale-low", "smallest planted component scale"},
      {"scale-high", "largest planted component scale"},
      {"widths", "network widths from input to output, comma separated"},
      {"samples", "number of synthetic samples"},
      {"data-csv", "network data, one sample per row"},
      {"lipschitz", "auto | sampled"},
      {"lipschitz-samples", "sample count for sampled Lipschitz estimates"},
  };
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> opts;
  for (const auto& [key, help] : settings) opts[key] = run->add_option("--" + key, raw[key], help);

  auto* sum = app.add_subcommand("summarize", "best/average table from existing trace CSVs");
  std::vector<std::string> paths;
  double f_star = 0.0;
  sum->add_option("csv", paths, "trace files")->required();
  auto* fstar_opt = sum->add_option("--f-star", f_star, "optimal value; default is the best seen");
  std::string sum_out;
  sum->add_option("--out", sum_out, "write summary.csv here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      slo::ExperimentSpec spec;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw slo::ConfigError("cannot open config '" + config_path + "'");
        slo::load_config(spec, in);
      }
      for (const auto& [key, help] : settings)
        if (opts[key]->count() > 0) slo::apply_setting(spec, key, raw[key]);
      const auto result = slo::run_experiment(spec);
      slo::write_summary_text(std::cout, result.summary);
      std::cout << "traces and summary written to " << spec.out_dir << '\n';
    } else {
      std::optional<double> fs;
      if (fstar_opt->count() > 0) fs = f_star;
      const auto rows = slo::summarize(paths, fs);
      if (sum_out.empty()) {
        slo::write_summary_csv(std::cout, rows);
      } else {
        std::ofstream out(sum_out);
        if (!out) throw slo::FormatError("cannot write '" + sum_out + "'");
        slo::write_summary_csv(out, rows);
      }
      slo::write_summary_text(std::cerr, rows);
    }
  } catch (const slo::Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
