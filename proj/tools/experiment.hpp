#pragma once

// Experiment configuration and the commands behind the nmmc tool.
//
// Configuration files use INI syntax with the sections [dataset], [run],
// [baseline] and [output]. Comma-separated values of run.p, run.schedule,
// baseline.w and baseline.c_jump expand into a sweep.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nmmc/nmmc.hpp"

namespace nmmc::tool {

namespace fs = std::filesystem;

enum class WorkingMode { Full, Lscc, Reachable };

struct DatasetSection {
  std::string path;
  std::string synthetic;  ///< "crawl" builds the layered crawl graph instead of reading a file
  std::uint64_t synthetic_seed = 1;
  WorkingMode mode = WorkingMode::Lscc;
  std::size_t seeds = 300;
  std::uint64_t seed_sampling = 1;
};

struct RunSection {
  std::string target = "uniform";
  std::string target_file;
  std::string proposal = "srw";
  double p_follow = 0.95;
  bool dynamic = false;
  std::vector<double> p{0.01};
  std::vector<WeightSchedule> schedules{WeightSchedule::constant()};
  std::size_t agents = 1;
  std::uint64_t steps = 1000;
  std::uint64_t seed = 1;
  InDegreeMode indegree = InDegreeMode::Exact;
  std::uint64_t checkpoint_stride = 0;
  std::size_t log_checkpoints = 0;
  MergeMode merge = MergeMode::Pooled;
  bool shared_c = false;
  std::size_t repetitions = 1;
};

struct BaselineSection {
  std::vector<std::string> methods;
  std::vector<double> w{1.0};
  std::vector<double> c_jump{10.0};
  std::uint64_t steps = 100000;
  std::uint64_t seed = 1;
  std::uint64_t checkpoint_stride = 0;
  std::size_t log_checkpoints = 50;
  bool compare = false;
};

struct ExperimentConfig {
  DatasetSection dataset;
  RunSection run;
  BaselineSection baseline;
  std::string output_dir = "out";
  /// Every key as written, "section.key" -> trimmed value; the hash input.
  std::map<std::string, std::string> raw;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  if (items.empty()) throw InvalidArgument("empty list '" + value + "'");
  return items;
}

inline double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double x = std::stod(value, &used);
    if (used == value.size() && std::isfinite(x)) return x;
  } catch (const std::logic_error&) {
  }
  throw InvalidArgument(key + ": '" + value + "' is not a number");
}

inline std::uint64_t to_count(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    if (!value.empty() && value.front() != '-') {
      const auto x = std::stoull(value, &used);
      if (used == value.size()) return x;
    }
  } catch (const std::logic_error&) {
  }
  throw InvalidArgument(key + ": '" + value + "' is not a non-negative integer");
}

inline bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw InvalidArgument(key + ": '" + value + "' is not a boolean");
}

}  // namespace detail

/// "constant", "polyA" (w_k = (k+1)^A) or "subexp".
inline WeightSchedule parse_schedule(const std::string& name) {
  if (name == "constant") return WeightSchedule::constant();
  if (name == "subexp") return WeightSchedule::sub_exponential();
  if (name.rfind("poly", 0) == 0) return WeightSchedule::polynomial(detail::to_double("schedule", name.substr(4)));
  throw InvalidArgument("unknown schedule '" + name + "'");
}

inline WorkingMode parse_working_mode(const std::string& name) {
  if (name == "full") return WorkingMode::Full;
  if (name == "lscc") return WorkingMode::Lscc;
  if (name == "reachable") return WorkingMode::Reachable;
  throw InvalidArgument("unknown working-set mode '" + name + "' (expected full, lscc or reachable)");
}

/// Relative dataset.path and run.target_file are resolved against `base_dir`.
inline ExperimentConfig parse_config(std::istream& in, const fs::path& base_dir = {}) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InvalidArgument("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  static const std::map<std::string, std::set<std::string>> allowed = {
      {"dataset", {"path", "synthetic", "synthetic_seed", "mode", "seeds", "seed_sampling"}},
      {"run",
       {"target", "target_file", "proposal", "p_follow", "mode", "p", "schedule", "agents", "steps", "seed", "indegree",
        "checkpoint_stride", "log_checkpoints", "merge", "shared_c", "repetitions"}},
      {"baseline", {"methods", "w", "c_jump", "steps", "seed", "checkpoint_stride", "log_checkpoints", "compare"}},
      {"output", {"dir"}},
  };

  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    const auto keys = allowed.find(section);
    if (keys == allowed.end()) {
      if (body.empty()) throw InvalidArgument("key '" + section + "' outside of a section");
      throw InvalidArgument("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!keys->second.count(key)) throw InvalidArgument("unknown key '" + key + "' in [" + section + "]");
      cfg.raw[section + "." + key] = detail::trim(value.data());
    }
  }

  for (const auto& [name, value] : cfg.raw) {
    auto& d = cfg.dataset;
    auto& r = cfg.run;
    auto& b = cfg.baseline;
    if (value.empty()) throw InvalidArgument(name + " has an empty value");
    if (name == "dataset.path") d.path = value;
    else if (name == "dataset.synthetic") {
      if (value != "crawl") throw InvalidArgument("dataset.synthetic: unknown generator '" + value + "'");
      d.synthetic = value;
    } else if (name == "dataset.synthetic_seed") d.synthetic_seed = detail::to_count(name, value);
    else if (name == "dataset.mode") d.mode = parse_working_mode(value);
    else if (name == "dataset.seeds") d.seeds = detail::to_count(name, value);
    else if (name == "dataset.seed_sampling") d.seed_sampling = detail::to_count(name, value);
    else if (name == "run.target") {
      if (value != "uniform" && value != "indegree" && value != "evc" && value != "custom")
        throw InvalidArgument("run.target: unknown target '" + value + "'");
      r.target = value;
    } else if (name == "run.target_file") r.target_file = value;
    else if (name == "run.proposal") {
      if (value != "srw" && value != "teleport") throw InvalidArgument("run.proposal: expected srw or teleport");
      r.proposal = value;
    } else if (name == "run.p_follow") r.p_follow = detail::to_double(name, value);
    else if (name == "run.mode") {
      if (value != "static" && value != "dynamic") throw InvalidArgument("run.mode: expected static or dynamic");
      r.dynamic = value == "dynamic";
    } else if (name == "run.p") {
      r.p.clear();
      for (const auto& item : detail::split_list(value)) r.p.push_back(detail::to_double(name, item));
    } else if (name == "run.schedule") {
      r.schedules.clear();
      for (const auto& item : detail::split_list(value)) r.schedules.push_back(parse_schedule(item));
    } else if (name == "run.agents") r.agents = detail::to_count(name, value);
    else if (name == "run.steps") r.steps = detail::to_count(name, value);
    else if (name == "run.seed") r.seed = detail::to_count(name, value);
    else if (name == "run.indegree") {
      if (value != "exact" && value != "online") throw InvalidArgument("run.indegree: expected exact or online");
      r.indegree = value == "online" ? InDegreeMode::OnlineEstimate : InDegreeMode::Exact;
    } else if (name == "run.checkpoint_stride") r.checkpoint_stride = detail::to_count(name, value);
    else if (name == "run.log_checkpoints") r.log_checkpoints = detail::to_count(name, value);
    else if (name == "run.merge") {
      if (value != "pooled" && value != "averaged") throw InvalidArgument("run.merge: expected pooled or averaged");
      r.merge = value == "averaged" ? MergeMode::Averaged : MergeMode::Pooled;
    } else if (name == "run.shared_c") r.shared_c = detail::to_bool(name, value);
    else if (name == "run.repetitions") r.repetitions = detail::to_count(name, value);
    else if (name == "baseline.methods") {
      b.methods = detail::split_list(value);
      for (const auto& m : b.methods)
        if (m != "mh-max" && m != "mh-srw" && m != "durw") throw InvalidArgument("baseline.methods: unknown method '" + m + "'");
    } else if (name == "baseline.w") {
      b.w.clear();
      for (const auto& item : detail::split_list(value)) b.w.push_back(detail::to_double(name, item));
    } else if (name == "baseline.c_jump") {
      b.c_jump.clear();
      for (const auto& item : detail::split_list(value)) b.c_jump.push_back(detail::to_double(name, item));
    } else if (name == "baseline.steps") b.steps = detail::to_count(name, value);
    else if (name == "baseline.seed") b.seed = detail::to_count(name, value);
    else if (name == "baseline.checkpoint_stride") b.checkpoint_stride = detail::to_count(name, value);
    else if (name == "baseline.log_checkpoints") b.log_checkpoints = detail::to_count(name, value);
    else if (name == "baseline.compare") b.compare = detail::to_bool(name, value);
    else if (name == "output.dir") cfg.output_dir = value;
  }

  const auto& d = cfg.dataset;
  const auto& r = cfg.run;
  if (d.path.empty() == d.synthetic.empty()) throw InvalidArgument("[dataset] needs exactly one of path and synthetic");
  if (d.mode == WorkingMode::Reachable && d.seeds == 0) throw InvalidArgument("dataset.seeds must be >= 1");
  if (r.target == "custom" && r.target_file.empty()) throw InvalidArgument("run.target = custom needs run.target_file");
  if (r.target != "custom" && !r.target_file.empty()) throw InvalidArgument("run.target_file is only used with run.target = custom");
  if (r.agents < 1) throw InvalidArgument("run.agents must be >= 1");
  if (r.steps < 1) throw InvalidArgument("run.steps must be >= 1");
  if (r.repetitions < 1) throw InvalidArgument("run.repetitions must be >= 1");
  for (double p : r.p)
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("run.p values must lie in [0, 1]");
  if (r.proposal == "teleport" && !(r.p_follow > 0.0 && r.p_follow < 1.0)) throw InvalidArgument("run.p_follow must lie in (0, 1)");
  if (r.proposal == "teleport" && r.target == "evc") throw InvalidArgument("the evc target needs run.proposal = srw");
  for (double w : cfg.baseline.w)
    if (!(w > 0.0)) throw InvalidArgument("baseline.w values must be positive");
  for (double c : cfg.baseline.c_jump)
    if (!(c >= 1.0)) throw InvalidArgument("baseline.c_jump values must be >= 1");
  if (cfg.baseline.steps < 1) throw InvalidArgument("baseline.steps must be >= 1");

  for (auto* file : {&cfg.dataset.path, &cfg.run.target_file}) {
    if (file->empty()) continue;
    if (fs::path(*file).is_relative() && !base_dir.empty()) *file = (base_dir / *file).lexically_normal().string();
    if (!fs::exists(*file)) throw IoError("file not found: " + *file);
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  return parse_config(in, fs::path(path).parent_path());
}

/// FNV-1a over "key=value" lines in key order, plus any extra lines, as 16 hex digits.
inline std::string config_hash(const std::map<std::string, std::string>& raw, const std::vector<std::string>& extra = {}) {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    h ^= '\n';
    h *= 1099511628211ULL;
  };
  for (const auto& [k, v] : raw) feed(k + "=" + v);
  for (const auto& e : extra) feed(e);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

/// The graph a run works on, with its ids and the teleport seeds (working indices).
struct WorkingSet {
  DirectedGraph full;
  NodeMap full_map;
  MappedGraph working;  ///< map sends working indices to original ids
  std::vector<node_t> seeds;
  std::string label;
};

inline WorkingSet build_working_set(const DatasetSection& d) {
  WorkingSet ws;
  if (!d.synthetic.empty()) {
    Rng rng(d.synthetic_seed);
    ws.full = layered_crawl_graph(CrawlGraphShape{}, rng);
    ws.full_map = NodeMap::identity(ws.full.num_nodes());
  } else {
    auto loaded = load_edge_list(d.path);
    ws.full = std::move(loaded.graph);
    ws.full_map = std::move(loaded.map);
  }

  auto lscc = largest_scc(ws.full);
  switch (d.mode) {
    case WorkingMode::Full:
      ws.working = {ws.full, NodeMap::identity(ws.full.num_nodes())};
      ws.label = "Graph";
      break;
    case WorkingMode::Lscc:
      ws.working = lscc;
      ws.label = "LSCC";
      break;
    case WorkingMode::Reachable: {
      std::vector<node_t> pool;
      for (std::size_t k = 0; k < lscc.graph.num_nodes(); ++k)
        pool.push_back(static_cast<node_t>(lscc.map.to_original(static_cast<node_t>(k))));
      if (d.seeds > pool.size())
        throw InvalidArgument("dataset.seeds = " + std::to_string(d.seeds) + " exceeds the LSCC size " + std::to_string(pool.size()));
      Rng rng(d.seed_sampling);
      std::vector<node_t> seeds;
      std::sample(pool.begin(), pool.end(), std::back_inserter(seeds), static_cast<std::ptrdiff_t>(d.seeds), rng);
      ws.working = reachable_set(ws.full, seeds);
      std::vector<node_t> local(ws.full.num_nodes(), static_cast<node_t>(-1));
      for (std::size_t k = 0; k < ws.working.graph.num_nodes(); ++k)
        local[ws.working.map.to_original(static_cast<node_t>(k))] = static_cast<node_t>(k);
      for (node_t s : seeds) ws.seeds.push_back(local[s]);
      std::sort(ws.seeds.begin(), ws.seeds.end());
      ws.label = "Reachable";
      break;
    }
  }
  ws.working.map = ws.working.map.compose(ws.full_map);
  return ws;
}

inline std::string count_line(const std::string& label, const DirectedGraph& g) {
  return label + ": " + std::to_string(g.num_nodes()) + " nodes, " + std::to_string(g.num_edges()) + " edges";
}

inline std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

/**
 * Writes graph.txt (cleaned input), working.txt (working subgraph), nodemap.csv
 * and, for reachable mode, seeds.txt into `out_dir`. Returns the summary lines.
 */
inline std::vector<std::string> cmd_prepare(const DatasetSection& d, const fs::path& out_dir) {
  const auto ws = build_working_set(d);
  fs::create_directories(out_dir);
  {
    auto out = open_output(out_dir / "graph.txt");
    write_edge_list(out, ws.full, ws.full_map);
  }
  {
    auto out = open_output(out_dir / "working.txt");
    write_edge_list(out, ws.working.graph, ws.working.map);
  }
  {
    auto out = open_output(out_dir / "nodemap.csv");
    out << "index,original\n";
    for (std::size_t k = 0; k < ws.working.graph.num_nodes(); ++k) out << k << ',' << ws.working.map.to_original(static_cast<node_t>(k)) << '\n';
  }
  std::vector<std::string> lines{count_line("Graph", ws.full)};
  const auto lscc = largest_scc(ws.full);
  lines.push_back(count_line("LSCC", lscc.graph));
  if (d.mode == WorkingMode::Reachable) {
    auto out = open_output(out_dir / "seeds.txt");
    for (node_t s : ws.seeds) out << ws.working.map.to_original(s) << '\n';
    lines.push_back(count_line("Reachable", ws.working.graph) + " from " + std::to_string(ws.seeds.size()) + " seeds");
  }
  return lines;
}

inline TargetSpec make_target(const RunSection& r, const MappedGraph& working) {
  if (r.target == "uniform") return TargetSpec::uniform();
  if (r.target == "indegree") return TargetSpec::in_degree();
  if (r.target == "evc") return TargetSpec::evc();
  std::ifstream in(r.target_file);
  if (!in) throw IoError("cannot open " + r.target_file);
  return TargetSpec::custom(read_distribution_csv(in, working.graph.num_nodes(), &working.map));
}

struct OracleOutput {
  std::vector<double> vector;
  double eigenvalue = 0.0;
  double c_true = 0.0;  ///< 0 for the adjacency spectrum
};

/**
 * Reference distribution of `target` on `g`: the adjacency spectrum for evc,
 * otherwise the leading left eigenpair of the simple-random-walk transient kernel.
 */
inline OracleOutput cmd_oracle(const DirectedGraph& g, const TargetSpec& target) {
  OracleOutput out;
  if (target.kind == TargetKind::Evc) {
    auto r = evc(g);
    out.vector = std::move(r.vector);
    out.eigenvalue = r.eigenvalue;
    return out;
  }
  AcceptanceModel model(g, ProposalChain::simple_random_walk(), target);
  auto r = left_leading_eigen(transient_kernel(model));
  out.vector = std::move(r.vector);
  out.eigenvalue = r.eigenvalue;
  out.c_true = model.c_true();
  return out;
}

inline void write_oracle_csv(std::ostream& out, const OracleOutput& result, const NodeMap* map) {
  out.precision(17);
  out << "# eigenvalue=" << result.eigenvalue << '\n';
  if (result.c_true > 0.0) out << "# c_true=" << result.c_true << '\n';
  write_distribution_csv(out, result.vector, map);
}

struct JobSummary {
  std::string tag;
  std::string hash;
  double final_tvd = 0.0;
  std::optional<double> final_nrmse;
  double unique_queries = 0.0;
  fs::path file;
};

inline ProposalChain make_chain(const RunSection& r, const WorkingSet& ws, std::size_t seed_count, std::uint64_t seed_sampling) {
  if (r.proposal == "srw") return ProposalChain::simple_random_walk();
  std::vector<node_t> seeds = ws.seeds;
  if (seeds.empty()) {
    std::vector<node_t> all(ws.working.graph.num_nodes());
    std::iota(all.begin(), all.end(), node_t{0});
    Rng rng(seed_sampling);
    std::sample(all.begin(), all.end(), std::back_inserter(seeds), static_cast<std::ptrdiff_t>(std::min(seed_count, all.size())), rng);
  }
  return ProposalChain::teleporting(std::move(seeds), r.p_follow);
}

struct RunJob {
  double p;
  WeightSchedule schedule;
  std::string tag;
};

inline std::vector<RunJob> expand_runs(const RunSection& r) {
  std::vector<RunJob> jobs;
  const std::vector<double> ps = r.dynamic ? r.p : std::vector<double>{0.0};
  for (double p : ps)
    for (const auto& s : r.schedules) {
      std::string tag = r.target + (r.dynamic ? "_dynamic_p" + format_number(p) : "_static") + "_" + s.name();
      if (r.indegree == InDegreeMode::OnlineEstimate) tag += "_online";
      jobs.push_back({p, s, tag});
    }
  return jobs;
}

inline RunConfig make_run_config(const RunSection& r, const RunJob& job, const TargetSpec& target, const ProposalChain& chain) {
  RunConfig rc;
  rc.target = target;
  rc.chain = chain;
  rc.schedule = job.schedule;
  rc.dynamic = r.dynamic;
  rc.p = job.p;
  rc.agents = r.agents;
  rc.steps = r.steps;
  rc.indegree_mode = r.indegree;
  rc.checkpoint_stride = r.checkpoint_stride;
  rc.log_checkpoints = r.log_checkpoints;
  rc.merge = r.merge;
  rc.shared_c = r.shared_c;
  return rc;
}

/// Runs every (p, schedule) combination R times. Writes run_<tag>.csv (mean over
/// repetitions, NRMSE when R >= 2), run_<tag>_r<k>.csv per repetition when R > 1,
/// and estimate_<tag>.csv with the final merged distribution of the first repetition.
inline std::vector<JobSummary> cmd_run(const ExperimentConfig& cfg, const fs::path& out_dir) {
  const auto ws = build_working_set(cfg.dataset);
  const auto& r = cfg.run;
  const auto target = make_target(r, ws.working);
  const auto chain = make_chain(r, ws, cfg.dataset.seeds, cfg.dataset.seed_sampling);
  const auto reference = resolve_target(ws.working.graph, target);
  fs::create_directories(out_dir);

  std::vector<JobSummary> summaries;
  for (const auto& job : expand_runs(r)) {
    const std::string hash = config_hash(cfg.raw, {"job=" + job.tag});
    std::vector<RunResult> reps;
    for (std::size_t k = 0; k < r.repetitions; ++k) {
      auto rc = make_run_config(r, job, target, chain);
      rc.seed = r.seed + k;
      rc.config_hash = hash;
      rc.keep_estimates = r.repetitions > 1;
      reps.push_back(run(ws.working.graph, rc, reference));
      if (r.repetitions > 1) {
        auto out = open_output(out_dir / ("run_" + job.tag + "_r" + std::to_string(k) + ".csv"));
        write_metrics_csv(out, reps.back().log);
      }
    }

    MetricsLog aggregate;
    aggregate.config_hash = hash;
    aggregate.seed = r.seed;
    const double R = static_cast<double>(reps.size());
    for (std::size_t row = 0; row < reps.front().log.rows.size(); ++row) {
      MetricsRow m;
      m.step = reps.front().log.rows[row].step;
      double absorptions = 0.0;
      for (const auto& rep : reps) {
        const auto& x = rep.log.rows[row];
        m.tvd += x.tvd / R;
        m.unique_queries += x.unique_queries / R;
        m.unique_query_pct += x.unique_query_pct / R;
        m.c_max = std::max(m.c_max, x.c_max);
        absorptions += static_cast<double>(x.absorptions) / R;
      }
      m.absorptions = static_cast<std::uint64_t>(std::llround(absorptions));
      if (reps.size() >= 2) {
        std::vector<std::vector<double>> estimates;
        for (const auto& rep : reps) estimates.push_back(rep.checkpoint_estimates[row]);
        m.nrmse = nrmse(estimates, reference);
      }
      aggregate.rows.push_back(m);
    }
    JobSummary s;
    s.tag = job.tag;
    s.hash = hash;
    s.file = out_dir / ("run_" + job.tag + ".csv");
    {
      auto out = open_output(s.file);
      write_metrics_csv(out, aggregate);
    }
    {
      auto out = open_output(out_dir / ("estimate_" + job.tag + ".csv"));
      out << "# config_hash=" << hash << '\n' << "# seed=" << r.seed << '\n';
      write_distribution_csv(out, reps.front().estimate, &ws.working.map);
    }
    s.final_tvd = aggregate.rows.back().tvd;
    s.final_nrmse = aggregate.rows.back().nrmse;
    s.unique_queries = aggregate.rows.back().unique_queries;
    summaries.push_back(std::move(s));
  }
  return summaries;
}

struct ComparisonRow {
  double w = 0.0;
  double c_jump = 0.0;
  double budget = 0.0;
  double nmmc_tvd = 0.0;
  double durw_tvd = 0.0;
};

struct BaselineOutput {
  std::vector<JobSummary> jobs;
  std::vector<ComparisonRow> comparison;
};

/**
 * Runs the configured baselines. With baseline.compare, the first run job is
 * executed as well and every DURW configuration is stopped at the NMMC run's
 * final query count; comparison.csv lists both TVDs at that budget.
 */
inline BaselineOutput cmd_baseline(const ExperimentConfig& cfg, const fs::path& out_dir) {
  const auto& b = cfg.baseline;
  if (b.methods.empty()) throw InvalidArgument("baseline.methods is not set");
  const auto ws = build_working_set(cfg.dataset);
  const auto target = make_target(cfg.run, ws.working);
  const auto reference = resolve_target(ws.working.graph, target);
  fs::create_directories(out_dir);

  BaselineOutput output;
  std::optional<RunResult> nmmc_run;
  if (b.compare) {
    const auto job = expand_runs(cfg.run).front();
    auto rc = make_run_config(cfg.run, job, target, make_chain(cfg.run, ws, cfg.dataset.seeds, cfg.dataset.seed_sampling));
    rc.seed = cfg.run.seed;
    rc.config_hash = config_hash(cfg.raw, {"job=" + job.tag});
    nmmc_run = run(ws.working.graph, rc, reference);
  }

  const std::optional<UndirectedView> view =
      std::any_of(b.methods.begin(), b.methods.end(), [](const std::string& m) { return m != "durw"; })
          ? std::optional<UndirectedView>(UndirectedView(ws.working.graph))
          : std::nullopt;
  for (const auto& method : b.methods) {
    if (method == "durw") {
      if (target.kind != TargetKind::Uniform) throw InvalidArgument("DURW estimates the uniform distribution only");
      for (double w : b.w)
        for (double c : b.c_jump) {
          JobSummary s;
          s.tag = "durw_w" + format_number(w) + "_c" + format_number(c);
          s.hash = config_hash(cfg.raw, {"job=" + s.tag});
          DurwConfig dc;
          dc.w = w;
          dc.c_jump = c;
          dc.max_steps = b.steps;
          dc.seed = b.seed;
          dc.checkpoint_stride = b.checkpoint_stride;
          dc.log_checkpoints = b.log_checkpoints;
          dc.config_hash = s.hash;
          if (nmmc_run) dc.budget = nmmc_run->log.rows.back().unique_queries;
          const auto result = durw_run(ws.working.graph, reference, dc);
          s.file = out_dir / ("baseline_" + s.tag + ".csv");
          auto out = open_output(s.file);
          write_metrics_csv(out, result.log);
          s.final_tvd = result.log.rows.back().tvd;
          s.unique_queries = result.query_cost;
          output.jobs.push_back(s);
          if (nmmc_run)
            output.comparison.push_back({w, c, dc.budget, nmmc_run->log.rows.back().tvd, s.final_tvd});
        }
      continue;
    }
    MhConfig mc;
    mc.variant = method == "mh-max" ? MhVariant::MaxDegree : MhVariant::SimpleRandomWalk;
    mc.steps = b.steps;
    mc.seed = b.seed;
    mc.checkpoint_stride = b.checkpoint_stride;
    mc.log_checkpoints = b.log_checkpoints;
    JobSummary s;
    s.tag = method;
    s.hash = config_hash(cfg.raw, {"job=" + s.tag});
    mc.config_hash = s.hash;
    const auto result = mh_run(*view, reference, mc);
    s.file = out_dir / ("baseline_" + s.tag + ".csv");
    auto out = open_output(s.file);
    write_metrics_csv(out, result.log);
    s.final_tvd = result.log.rows.back().tvd;
    s.unique_queries = result.query_cost;
    output.jobs.push_back(s);
  }

  if (!output.comparison.empty()) {
    auto out = open_output(out_dir / "comparison.csv");
    out << "# config_hash=" << config_hash(cfg.raw, {"job=comparison"}) << '\n' << "# seed=" << cfg.run.seed << '\n';
    out << "w,c_jump,budget,nmmc_tvd,durw_tvd\n";
    out.precision(17);
    for (const auto& row : output.comparison)
      out << row.w << ',' << row.c_jump << ',' << row.budget << ',' << row.nmmc_tvd << ',' << row.durw_tvd << '\n';
  }
  return output;
}

inline SlopeFit cmd_slope(const std::string& metrics_path, double tail_fraction) {
  std::ifstream in(metrics_path);
  if (!in) throw IoError("cannot open " + metrics_path);
  return loglog_slope(read_metrics_csv(in), tail_fraction);
}

}  // namespace nmmc::tool
