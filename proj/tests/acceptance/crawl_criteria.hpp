#pragma once

// Criteria measured on a peer-to-peer crawl graph. acceptance runs them on the
// synthetic layered crawl graph, acceptance_datasets on the real snapshot.

#include <algorithm>
#include <string>
#include <vector>

#include "experiment.hpp"
#include "report.hpp"

namespace nmmc::acceptance {

inline RunConfig crawl_run(double p, WeightSchedule schedule, std::uint64_t steps, std::uint64_t seed) {
  RunConfig c;
  c.dynamic = true;
  c.p = p;
  c.schedule = schedule;
  c.agents = 100;
  c.steps = steps;
  c.seed = seed;
  return c;
}

/// TVD at t = 1e5 with p = 0 (c stuck at its initial value) exceeds the p = 0.01 TVD.
inline void check_p_zero(Report& report, const std::string& label, const DirectedGraph& lscc) {
  const auto zero = run(lscc, crawl_run(0.0, WeightSchedule::polynomial(3), 100000, 11));
  const auto small = run(lscc, crawl_run(0.01, WeightSchedule::polynomial(3), 100000, 11));
  const double t0 = zero.log.rows.back().tvd, t1 = small.log.rows.back().tvd;
  report.line("dynamic p=0 vs p=0.01 (" + label + ")", t0 > t1, fmt("TVD(p=0) %.4f, TVD(p=0.01) %.4f at t=1e5", t0, t1));
}

/// TVD(p=0.01) < TVD(p=0.1) < TVD(p=1) at t = 1e4, mean of 5 seeds, for at least 3 of 4 alpha.
inline void check_p_ordering(Report& report, const std::string& label, const DirectedGraph& lscc) {
  const Stopwatch clock;
  int ordered = 0;
  for (double alpha : {1.0, 3.0, 5.0, 10.0}) {
    double mean[3] = {0, 0, 0};
    const double ps[3] = {0.01, 0.1, 1.0};
    for (int k = 0; k < 3; ++k)
      for (std::uint64_t seed = 1; seed <= 5; ++seed)
        mean[k] += run(lscc, crawl_run(ps[k], WeightSchedule::polynomial(alpha), 10000, seed)).log.rows.back().tvd / 5;
    const bool ok = mean[0] < mean[1] && mean[1] < mean[2];
    ordered += ok;
    Report::note(fmt("poly%g: TVD p=0.01 %.4f, p=0.1 %.4f, p=1 %.4f%s", alpha, mean[0], mean[1], mean[2], ok ? "" : " (not ordered)"));
  }
  const double secs = clock.seconds();
  report.line("p-ordering (" + label + ")", ordered >= 3 && secs < 600,
              fmt("%d/4 schedules ordered, %.0f s", ordered, secs));
}

/// Teleporting proposal on the set reachable from 300 LSCC seeds: size and decreasing TVD.
inline void check_reachable(Report& report, const std::string& label, const tool::DatasetSection& dataset,
                            std::size_t expected_size) {
  auto d = dataset;
  d.mode = tool::WorkingMode::Reachable;
  d.seeds = 300;
  const auto ws = tool::build_working_set(d);
  const std::size_t size = ws.working.graph.num_nodes();
  report.line("reachable-set size (" + label + ")", size == expected_size,
              fmt("%zu nodes from %zu seeds, expected %zu", size, ws.seeds.size(), expected_size));

  auto c = crawl_run(0.01, WeightSchedule::polynomial(3), 20000, 5);
  c.chain = ProposalChain::teleporting(ws.seeds, 0.95);
  c.log_checkpoints = 20;
  const auto r = run(ws.working.graph, c);
  const auto fit = loglog_slope(r.log, 1.0);
  const double first = r.log.rows.front().tvd, last = r.log.rows.back().tvd;
  std::size_t rises = 0;
  for (std::size_t k = 1; k < r.log.rows.size(); ++k) rises += r.log.rows[k].tvd > r.log.rows[k - 1].tvd;
  report.line("non-SCC TVD decreasing (" + label + ")", last < 0.5 * first && fit.slope < 0 && rises == 0,
              fmt("TVD %.4f at t=%llu -> %.4f at t=%llu, slope %.3f, %zu rises over %zu checkpoints", first,
                  static_cast<unsigned long long>(r.log.rows.front().step), last,
                  static_cast<unsigned long long>(r.log.rows.back().step), fit.slope, rises, r.log.rows.size()));
}

/// NMMC against DURW at the NMMC run's unique-query budget, w x c_jump grid.
inline void check_durw_comparison(Report& report, const std::string& label, const DirectedGraph& lscc) {
  const std::vector<double> uniform(lscc.num_nodes(), 1.0 / static_cast<double>(lscc.num_nodes()));
  for (double alpha : {3.0, 5.0, 10.0}) {
    const auto nmmc = run(lscc, crawl_run(0.01, WeightSchedule::polynomial(alpha), 10000, 21));
    const double budget = nmmc.log.rows.back().unique_queries, nmmc_tvd = nmmc.log.rows.back().tvd;
    int wins = 0, total = 0;
    std::string cells;
    for (double w : {0.1, 1.0, 10.0})
      for (double cj : {10.0, 77.0}) {
        DurwConfig dc;
        dc.w = w;
        dc.c_jump = cj;
        dc.max_steps = 100000000;
        dc.budget = budget;
        dc.seed = 21;
        const double durw = durw_run(lscc, uniform, dc).log.rows.back().tvd;
        wins += nmmc_tvd < durw;
        ++total;
        cells += fmt(" (%g,%g):%.3f", w, cj, durw);
      }
    Report::note(fmt("poly%g: NMMC TVD %.4f at %.0f queries; DURW", alpha, nmmc_tvd, budget) + cells);
    report.line(fmt("NMMC vs DURW poly%g (", alpha) + label + ")", 2 * wins >= total,
                fmt("NMMC lower on %d/%d grid points", wins, total));
  }
}

}  // namespace nmmc::acceptance
