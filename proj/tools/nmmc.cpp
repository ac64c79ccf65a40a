// Command-line front end: prepare, oracle, run, baseline, slope.

#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "experiment.hpp"

namespace {

using namespace nmmc;
using namespace nmmc::tool;

std::string output_dir(const ExperimentConfig& cfg, const std::string& override_dir) {
  return override_dir.empty() ? cfg.output_dir : override_dir;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directed-graph sampling with history-dependent random walks"};
  app.require_subcommand(1);

  auto* prepare = app.add_subcommand("prepare", "Clean a dataset and extract its working node set");
  std::string prepare_config, input, synthetic, mode = "lscc", prepare_out = "prepared";
  std::size_t seeds = 300;
  std::uint64_t seed_sampling = 1;
  prepare->add_option("--config", prepare_config, "Experiment config; its [dataset] section is used");
  prepare->add_option("--input", input, "SNAP edge list");
  prepare->add_option("--synthetic", synthetic, "Generated graph instead of a file")->check(CLI::IsMember({"crawl"}));
  prepare->add_option("--mode", mode, "Working set")->check(CLI::IsMember({"full", "lscc", "reachable"}));
  prepare->add_option("--seeds", seeds, "Seed count for reachable mode");
  prepare->add_option("--seed", seed_sampling, "RNG seed for seed sampling");
  prepare->add_option("--out", prepare_out, "Output directory");

  auto* oracle = app.add_subcommand("oracle", "Reference distribution of a target on a graph");
  std::string oracle_graph, oracle_target = "uniform", oracle_pi, oracle_out;
  oracle->add_option("--graph", oracle_graph, "Edge list of the working graph")->required()->check(CLI::ExistingFile);
  oracle->add_option("--target", oracle_target, "Target")->check(CLI::IsMember({"uniform", "indegree", "evc", "custom"}));
  oracle->add_option("--pi", oracle_pi, "node,probability CSV for the custom target")->check(CLI::ExistingFile);
  oracle->add_option("--out", oracle_out, "Output CSV (default: stdout)");

  auto* run_cmd = app.add_subcommand("run", "Run the history-dependent walkers");
  std::string run_config, run_out;
  run_cmd->add_option("config", run_config, "Experiment config")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run_out, "Output directory (overrides [output] dir)");

  auto* baseline = app.add_subcommand("baseline", "Run the MH and DURW baselines");
  std::string baseline_config, baseline_out;
  baseline->add_option("config", baseline_config, "Experiment config")->required()->check(CLI::ExistingFile);
  baseline->add_option("--out", baseline_out, "Output directory (overrides [output] dir)");

  auto* slope = app.add_subcommand("slope", "Log-log slope of a metrics CSV");
  std::string slope_file;
  double tail = 0.5;
  slope->add_option("metrics", slope_file, "Metrics CSV")->required()->check(CLI::ExistingFile);
  slope->add_option("--tail", tail, "Fraction of checkpoints used for the fit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*prepare) {
      DatasetSection d;
      if (!prepare_config.empty()) {
        d = load_config(prepare_config).dataset;
      } else {
        if (input.empty() == synthetic.empty()) throw InvalidArgument("prepare needs exactly one of --input, --synthetic or --config");
        d.path = input;
        d.synthetic = synthetic;
      }
      if (prepare->count("--mode")) d.mode = parse_working_mode(mode);
      if (prepare->count("--seeds")) d.seeds = seeds;
      if (prepare->count("--seed")) d.seed_sampling = seed_sampling;
      for (const auto& line : cmd_prepare(d, prepare_out)) std::cout << line << '\n';
    } else if (*oracle) {
      const auto loaded = load_edge_list(oracle_graph);
      TargetSpec target;
      if (oracle_target == "custom") {
        if (oracle_pi.empty()) throw InvalidArgument("the custom target needs --pi");
        std::ifstream in(oracle_pi);
        target = TargetSpec::custom(read_distribution_csv(in, loaded.graph.num_nodes(), &loaded.map));
      } else {
        target = oracle_target == "uniform" ? TargetSpec::uniform()
                 : oracle_target == "indegree" ? TargetSpec::in_degree()
                                               : TargetSpec::evc();
      }
      const auto result = cmd_oracle(loaded.graph, target);
      if (oracle_out.empty()) {
        write_oracle_csv(std::cout, result, &loaded.map);
      } else {
        auto out = open_output(oracle_out);
        write_oracle_csv(out, result, &loaded.map);
        std::cout << "eigenvalue " << result.eigenvalue << '\n';
      }
    } else if (*run_cmd) {
      const auto cfg = load_config(run_config);
      for (const auto& s : cmd_run(cfg, output_dir(cfg, run_out))) {
        std::cout << s.tag << ": tvd " << s.final_tvd;
        if (s.final_nrmse) std::cout << ", nrmse " << *s.final_nrmse;
        std::cout << ", unique queries " << s.unique_queries << " -> " << s.file.string() << '\n';
      }
    } else if (*baseline) {
      const auto cfg = load_config(baseline_config);
      const auto result = cmd_baseline(cfg, output_dir(cfg, baseline_out));
      for (const auto& s : result.jobs)
        std::cout << s.tag << ": tvd " << s.final_tvd << ", query cost " << s.unique_queries << " -> " << s.file.string() << '\n';
      if (!result.comparison.empty()) {
        std::cout << "w c_jump budget nmmc_tvd durw_tvd\n";
        for (const auto& row : result.comparison)
          std::cout << row.w << ' ' << row.c_jump << ' ' << row.budget << ' ' << row.nmmc_tvd << ' ' << row.durw_tvd << '\n';
      }
    } else if (*slope) {
      const auto fit = cmd_slope(slope_file, tail);
      std::cout << "slope " << fit.slope << " intercept " << fit.intercept << " points " << fit.points << '\n';
      if (fit.clamped > 0) std::cerr << "warning: " << fit.clamped << " zero TVD values clamped to " << tvd_log_clamp << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
