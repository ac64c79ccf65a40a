#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

using namespace nmmc;

namespace {

Agent make_agent(std::size_t n, node_t start, std::uint64_t seed) {
  Agent a;
  a.current = start;
  a.measure = EmpiricalMeasure(n);
  a.measure.record(start, WeightSchedule::constant());
  a.rng.seed(seed);
  return a;
}

std::set<node_t> support(const EmpiricalMeasure& m) {
  std::set<node_t> s;
  for (node_t i = 0; i < m.num_nodes(); ++i)
    if (m.mass(i) > 0.0) s.insert(i);
  return s;
}

}  // namespace

TEST(RunConfig, Validation) {
  RunConfig c;
  EXPECT_NO_THROW(c.validate());
  c.agents = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.agents = 1;
  c.steps = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.steps = 1;
  c.p = 1.5;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.p = -0.1;
  EXPECT_THROW(run(fixture::three_cycle(), c), InvalidArgument);
}

TEST(CheckpointSteps, SortedAndEndsAtFinalStep) {
  EXPECT_EQ(checkpoint_steps(10, 0, 0), (std::vector<std::uint64_t>{10}));
  EXPECT_EQ(checkpoint_steps(10, 4, 0), (std::vector<std::uint64_t>{4, 8, 10}));
  const auto log = checkpoint_steps(100000, 0, 30);
  EXPECT_EQ(log.front(), 1u);
  EXPECT_EQ(log.back(), 100000u);
  EXPECT_TRUE(std::is_sorted(log.begin(), log.end()));
  EXPECT_GE(log.size(), 25u);
}

TEST(Engine, ThreeCycleAcceptsEveryProposal) {
  for (bool dynamic : {false, true}) {
    RunConfig c;
    c.dynamic = dynamic;
    c.agents = 4;
    c.steps = 2999;
    c.seed = 7;
    const auto r = run(fixture::three_cycle(), c);
    EXPECT_EQ(r.c_true, 1.0);
    EXPECT_EQ(r.log.rows.back().absorptions, 0u);
    EXPECT_EQ(r.log.rows.back().tvd, 0.0) << "dynamic=" << dynamic;
    for (double x : r.final_c) EXPECT_EQ(x, 1.0);
  }
}

TEST(Engine, ForcedRejectionRedistributesFromHistory) {
  Rng rng(3);
  const auto g = random_strongly_connected(12, 30, rng);
  const AcceptanceModel model(g, ProposalChain::simple_random_walk(), TargetSpec::in_degree());
  node_t from = 0, to = 0;
  bool found = false;
  model.for_each_proposable_pair([&](node_t i, node_t j) {
    if (!found && model.b(i, j) < model.c_true()) {
      from = i;
      to = j;
      found = true;
    }
  });
  ASSERT_TRUE(found);
  SharedKnowledge shared(g.num_nodes());
  auto agent = make_agent(g.num_nodes(), from, 1);
  step_static_with(agent, model, shared, WeightSchedule::constant(), InDegreeMode::Exact, to, 1.0);
  EXPECT_EQ(agent.current, from);
  EXPECT_EQ(agent.absorptions, 1u);
  EXPECT_EQ(agent.measure.steps(), 2u);
  EXPECT_FALSE(shared.visited(to));

  // u = 0 always accepts.
  step_static_with(agent, model, shared, WeightSchedule::constant(), InDegreeMode::Exact, to, 0.0);
  EXPECT_EQ(agent.current, to);
  EXPECT_TRUE(shared.visited(to));
}

TEST(Engine, DynamicUpdateRule) {
  const auto g = fixture::complete_digraph(3);
  const AcceptanceModel model(g, ProposalChain::simple_random_walk(), TargetSpec::uniform());
  SharedKnowledge shared(3);
  auto agent = make_agent(3, 0, 1);
  double c = 0.5;
  // u1 > p: no update, b / c = 2 so the move is accepted anyway.
  step_dynamic_with(agent, c, model, shared, WeightSchedule::constant(), InDegreeMode::Exact, 0.1, 1, 0.2, 0.99);
  EXPECT_EQ(c, 0.5);
  EXPECT_EQ(agent.current, node_t{1});
  step_dynamic_with(agent, c, model, shared, WeightSchedule::constant(), InDegreeMode::Exact, 0.1, 2, 0.05, 0.99);
  EXPECT_EQ(c, 1.0);
  EXPECT_EQ(agent.current, node_t{2});
}

TEST(Engine, RedistributionStaysInPreviousSupport) {
  for (const auto& g : fixture::small_graph_suite(5, 10, 30, 21)) {
    RunConfig c;
    c.target = TargetSpec::in_degree();
    c.dynamic = true;
    c.agents = 3;
    c.seed = 5;
    Simulation sim(g, c);
    for (int t = 0; t < 3000; ++t) {
      std::vector<std::set<node_t>> before;
      std::vector<std::uint64_t> absorbed;
      for (const auto& a : sim.agents()) {
        before.push_back(support(a.measure));
        absorbed.push_back(a.absorptions);
      }
      sim.tick();
      for (std::size_t k = 0; k < sim.agents().size(); ++k) {
        const auto& a = sim.agents()[k];
        if (a.absorptions > absorbed[k]) {
          ASSERT_TRUE(before[k].count(a.current));
        }
        ASSERT_GT(a.measure.mass(a.current), 0.0);
      }
    }
  }
}

TEST(Engine, UniqueQueriesMonotoneAndBounded) {
  for (const auto& g : fixture::small_graph_suite(5, 10, 40, 22)) {
    RunConfig c;
    c.agents = 5;
    c.seed = 9;
    Simulation sim(g, c);
    std::uint64_t prev = sim.shared().unique_queries();
    for (int t = 0; t < 2000; ++t) {
      sim.tick();
      const auto q = sim.shared().unique_queries();
      ASSERT_GE(q, prev);
      ASSERT_LE(q, g.num_nodes());
      prev = q;
    }
    std::uint64_t visited = 0;
    for (node_t i = 0; i < g.num_nodes(); ++i) visited += sim.shared().visited(i);
    EXPECT_EQ(visited, prev);
  }
}

TEST(Engine, RunningConstantNonDecreasingAndBounded) {
  for (const auto& g : fixture::small_graph_suite(5, 10, 20, 23)) {
    RunConfig c;
    c.target = TargetSpec::in_degree();
    c.dynamic = true;
    c.p = 1.0;
    c.agents = 2;
    c.seed = 4;
    Simulation sim(g, c);
    std::vector<double> prev(c.agents, 1.0);
    for (int t = 0; t < 50000; ++t) {
      sim.tick();
      for (std::size_t k = 0; k < c.agents; ++k) {
        const double ct = sim.agents()[k].c;
        ASSERT_GE(ct, prev[k]);
        ASSERT_LE(ct, std::max(1.0, sim.model().c_true()) + 1e-12);
        prev[k] = ct;
      }
    }
    // With p = 1 every proposed pair is observed; a long run sees the maximum.
    EXPECT_NEAR(sim.max_c(), std::max(1.0, sim.model().c_true()), 1e-12);
  }
}

TEST(Engine, SharedConstantIsCommon) {
  Rng rng(8);
  const auto g = random_strongly_connected(15, 40, rng);
  RunConfig c;
  c.target = TargetSpec::in_degree();
  c.dynamic = true;
  c.shared_c = true;
  c.agents = 6;
  c.steps = 5000;
  const auto r = run(g, c);
  for (double x : r.final_c) EXPECT_EQ(x, r.final_c.front());
  EXPECT_GE(r.final_c.front(), 1.0);
}

TEST(SharedKnowledge, InDegreeEstimates) {
  SharedKnowledge s(3);
  EXPECT_EQ(s.in_degree_estimates()[2], 1.0);
  s.discover_edge(0, 2);
  s.discover_edge(0, 2);
  EXPECT_EQ(s.in_degree_estimates()[2], 1.0);
  s.discover_edge(1, 2);
  EXPECT_EQ(s.in_degree_estimates()[2], 2.0);
  EXPECT_EQ(s.discovered_edges(), 2u);
  EXPECT_TRUE(s.visit(1));
  EXPECT_FALSE(s.visit(1));
  EXPECT_EQ(s.unique_queries(), 1u);
}

TEST(Engine, OnlineInDegreeNeverExceedsTruthAndConverges) {
  for (const auto& g : fixture::small_graph_suite(5, 8, 20, 24)) {
    RunConfig c;
    c.target = TargetSpec::in_degree();
    c.indegree_mode = InDegreeMode::OnlineEstimate;
    c.dynamic = true;
    c.agents = 4;
    c.seed = 2;
    Simulation sim(g, c);
    for (int t = 0; t < 20000; ++t) {
      sim.tick();
      if (t % 1000 != 0) continue;
      for (node_t j = 0; j < g.num_nodes(); ++j)
        ASSERT_LE(sim.shared().in_degree_estimates()[j], static_cast<double>(g.in_degree(j)));
    }
    ASSERT_EQ(sim.shared().discovered_edges(), g.num_edges());
    for (node_t j = 0; j < g.num_nodes(); ++j)
      EXPECT_EQ(sim.shared().in_degree_estimates()[j], static_cast<double>(g.in_degree(j)));
  }
}

TEST(Engine, SingleStepRun) {
  RunConfig c;
  c.steps = 1;
  const auto r = run(fixture::complete_digraph(5), c);
  ASSERT_EQ(r.log.rows.size(), 1u);
  EXPECT_EQ(r.log.rows[0].step, 1u);
  EXPECT_LE(r.log.rows[0].tvd, 1.0);
  EXPECT_GE(r.log.rows[0].tvd, 0.0);
}

TEST(Engine, ReproducibleForFixedSeed) {
  Rng rng(12);
  const auto g = random_strongly_connected(25, 80, rng);
  RunConfig c;
  c.target = TargetSpec::in_degree();
  c.schedule = WeightSchedule::polynomial(3);
  c.dynamic = true;
  c.agents = 5;
  c.steps = 3000;
  c.log_checkpoints = 10;
  c.seed = 99;
  const auto a = run(g, c), b = run(g, c);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.log, b.log);
  c.seed = 100;
  EXPECT_NE(run(g, c).estimate, a.estimate);
}

TEST(Engine, MoreAgentsReduceError) {
  Rng rng(13);
  const auto g = random_strongly_connected(20, 60, rng);
  double single = 0.0, many = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RunConfig c;
    c.schedule = WeightSchedule::polynomial(3);
    c.steps = 2000;
    c.seed = seed;
    single += run(g, c).log.rows.back().tvd;
    c.agents = 100;
    many += run(g, c).log.rows.back().tvd;
  }
  EXPECT_LT(many, single);
}

TEST(Engine, ConvergesOnSmallGraph) {
  Rng rng(14);
  const auto g = random_strongly_connected(20, fixture::suite_chords(20), rng);
  RunConfig c;
  c.target = TargetSpec::in_degree();
  c.schedule = WeightSchedule::polynomial(3);
  c.agents = 10;
  c.steps = 100000;
  c.seed = 3;
  EXPECT_LT(run(g, c).log.rows.back().tvd, 0.05);
}

TEST(Engine, InitialMeasureAndStartNodes) {
  const auto g = fixture::complete_digraph(6);
  RunConfig c;
  c.initial_measure = {{2, 0.5}, {4, 0.5}};
  c.agents = 8;
  Simulation sim(g, c);
  for (const auto& a : sim.agents()) EXPECT_TRUE(a.current == 2 || a.current == 4);
  EXPECT_EQ(sim.shared().unique_queries(), 2u);

  RunConfig s;
  s.start_nodes = {1, 3};
  s.agents = 3;
  Simulation fixed(g, s);
  EXPECT_EQ(fixed.agents()[0].current, node_t{1});
  EXPECT_EQ(fixed.agents()[1].current, node_t{3});
  EXPECT_EQ(fixed.agents()[2].current, node_t{1});
  s.start_nodes = {9};
  EXPECT_THROW(Simulation(g, s), InvalidArgument);
}

TEST(Engine, TeleportingChainOnReachableSet) {
  // 0 -> 1 -> 2 with 2 a sink; teleports return to the seed.
  const DirectedGraph g(3, {{0, 1}, {1, 2}});
  RunConfig c;
  c.chain = ProposalChain::teleporting({0}, 0.9);
  c.schedule = WeightSchedule::polynomial(3);
  c.agents = 10;
  c.steps = 20000;
  c.seed = 1;
  c.start_nodes = {0};
  const auto r = run(g, c);
  EXPECT_LT(r.log.rows.back().tvd, 0.05);
}
