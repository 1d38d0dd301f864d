#include "fastinf/epidemic.hpp"
#include "fastinf/generators.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace fastinf;
namespace fs = std::filesystem;

namespace {

Graph make(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> edges) {
  std::vector<std::pair<NodeId, NodeId>> e(edges);
  return Graph::from_edges(n, e);
}

SimulationConfig config(double beta, std::uint32_t runs, std::uint32_t horizon = 10, std::uint64_t seed = 1) {
  SimulationConfig c;
  c.beta = beta;
  c.runs = runs;
  c.horizon = horizon;
  c.master_seed = seed;
  return c;
}

std::uint32_t eccentricity(const Graph& g, NodeId s) {
  auto d = oracle::distances(g);
  int e = 0;
  for (int x : d[s]) e = std::max(e, x);
  return static_cast<std::uint32_t>(e);
}

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("fastinf-test-" + name + "-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(SimulateRun, ZeroBetaNeverSpreads) {
  auto g = barabasi_albert(50, 2, 1);
  auto rng = derive_stream(1, 0, 0);
  auto trace = simulate_run(g, 0, config(0.0, 1), rng);
  EXPECT_EQ(trace.final_size, 1u);
  EXPECT_EQ(trace.halting_step, 1u);
  for (auto c : trace.ever_infected) EXPECT_EQ(c, 1u);
}

TEST(SimulateRun, CertainTransmissionFloodsInEccentricitySteps) {
  auto g = barabasi_albert(60, 2, 4);
  SirWorkspace ws(g.node_count());
  for (NodeId s : {NodeId{0}, NodeId{17}, NodeId{59}}) {
    auto rng = derive_stream(9, s, 0);
    const auto ecc = eccentricity(g, s);
    auto trace = simulate_run(g, s, config(1.0, 1), rng, ws, 40);
    EXPECT_EQ(trace.final_size, g.node_count());
    EXPECT_EQ(trace.ever_infected[ecc - 1], g.node_count());
    EXPECT_LT(trace.ever_infected[ecc - 2], g.node_count());
    // the last wave recovers one step after it is infected
    EXPECT_EQ(trace.halting_step, ecc + 1);
  }
}

TEST(SimulateRun, CumulativeCountsNonDecreasingAndBounded) {
  auto g = erdos_renyi(80, 0.06, 3);
  SirWorkspace ws(g.node_count());
  for (std::uint64_t run = 0; run < 200; ++run) {
    auto rng = derive_stream(5, 0, run);
    auto trace = simulate_run(g, static_cast<NodeId>(run % 80), config(0.3, 1), rng, ws, 25);
    ASSERT_EQ(trace.ever_infected.size(), 25u);
    std::uint32_t prev = 1;
    for (auto c : trace.ever_infected) {
      EXPECT_GE(c, prev);
      EXPECT_LE(c, trace.final_size);
      prev = c;
    }
  }
}

TEST(SimulateRun, RecoveryBelowOneKeepsNodesInfectious) {
  // mu < 1: a seed on an edge keeps trying until it recovers, so
  // P(transmit) = beta / (1 - (1 - beta)(1 - mu)).
  auto g = make(2, {{0, 1}});
  auto c = config(0.2, 40000, 5);
  c.mu = 0.5;
  auto set = influence_curves(g, c, std::vector<NodeId>{0}, 1);
  const double p = 0.2 / (1.0 - 0.8 * 0.5);
  EXPECT_NEAR(set.curves[0].q_inf(), (1.0 + p) / 2.0, 4 * set.curves[0].q_inf_stderr());
}

TEST(Exact, PathOfThree) {
  auto g = make(3, {{0, 1}, {1, 2}});
  auto ex = exact_influence_small(g, 0, 0.5, 1.0, 5);
  EXPECT_NEAR(ex.q_inf, 1.75 / 3.0, 1e-15);
  EXPECT_NEAR(ex.q[0], 1.5 / 3.0, 1e-15);
  EXPECT_NEAR(ex.q[1], 1.75 / 3.0, 1e-15);
}

TEST(Exact, ZeroAndOneBeta) {
  auto g = make(6, {{0, 1}, {1, 2}, {3, 4}});
  auto none = exact_influence_small(g, 1, 0.0, 1.0, 4);
  for (double q : none.q) EXPECT_DOUBLE_EQ(q, 1.0 / 6.0);
  auto all = exact_influence_small(g, 1, 1.0, 1.0, 4);
  EXPECT_DOUBLE_EQ(all.q_inf, 3.0 / 6.0);
}

TEST(Exact, Refusals) {
  auto big = erdos_renyi(kExactMaxNodes + 1, 0.3, 1);
  EXPECT_THROW(exact_influence_small(big, 0, 0.5, 1.0, 3), std::invalid_argument);
  auto g = make(3, {{0, 1}, {1, 2}});
  EXPECT_THROW(exact_influence_small(g, 0, 0.5, 0.5, 3), std::invalid_argument);
}

TEST(Exact, AgreesWithPercolationEnumeration) {
  // Two independent exact derivations: frontier-state propagation and bond
  // percolation over all 2^L edge states.
  std::mt19937_64 rng(123);
  int checked = 0;
  while (checked < 25) {
    const std::size_t n = 3 + rng() % 6;
    auto g = erdos_renyi(n, 0.45, rng());
    if (g.edge_count() > 14 || g.edge_count() == 0) continue;
    const double beta = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const NodeId seed = static_cast<NodeId>(rng() % n);
    auto ex = exact_influence_small(g, seed, beta, 1.0, 8);
    auto perc = oracle::percolation_influence(g, seed, beta, 8);
    for (std::size_t t = 0; t < 8; ++t) EXPECT_NEAR(ex.q[t], perc.q[t], 1e-12);
    EXPECT_NEAR(ex.q_inf, perc.q_inf, 1e-12);
    ++checked;
  }
}

TEST(MonteCarlo, StarHubFirstStep) {
  auto g = make(4, {{0, 1}, {0, 2}, {0, 3}});
  auto set = influence_curves(g, config(0.5, 20000, 3), std::vector<NodeId>{0}, 1);
  const auto& c = set.curves[0];
  EXPECT_NEAR(c.q(1), 0.625, 4 * c.q_stderr(1));
}

TEST(MonteCarlo, PathOfThreeLateTime) {
  auto g = make(3, {{0, 1}, {1, 2}});
  auto set = influence_curves(g, config(0.5, 20000, 3), std::vector<NodeId>{0}, 1);
  EXPECT_NEAR(set.curves[0].q_inf(), 1.75 / 3.0, 4 * set.curves[0].q_inf_stderr());
}

TEST(MonteCarlo, CertainTransmissionReachesComponent) {
  auto g = make(7, {{0, 1}, {1, 2}, {2, 3}, {4, 5}});
  auto set = influence_curves(g, config(1.0, 5, 10), {}, 1);
  EXPECT_DOUBLE_EQ(set.curves[0].q_inf(), 4.0 / 7.0);
  EXPECT_DOUBLE_EQ(set.curves[4].q_inf(), 2.0 / 7.0);
  EXPECT_DOUBLE_EQ(set.curves[6].q_inf(), 1.0 / 7.0);
}

TEST(MonteCarlo, AgreesWithExactOracle) {
  // |MC - exact| < 4 SE where SE uses the exact per-run variance.
  std::mt19937_64 rng(2024);
  const std::uint32_t runs = 4000, horizon = 8;
  int graphs = 0;
  while (graphs < 20) {
    const std::size_t n = 4 + rng() % 7;
    auto g = erdos_renyi(n, 0.35, rng());
    if (g.edge_count() == 0) continue;
    const double beta = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    auto set = influence_curves(g, config(beta, runs, horizon, rng()), {}, 1);
    for (NodeId s = 0; s < n; ++s) {
      auto ex = exact_influence_small(g, s, beta, 1.0, horizon);
      const auto& c = set.curves[s];
      for (std::uint32_t t = 1; t <= horizon; ++t) {
        const double se = std::sqrt(ex.q_var[t - 1] / runs);
        EXPECT_LE(std::abs(c.q(t) - ex.q[t - 1]), 4 * se + 1e-12) << "graph " << graphs << " seed " << s << " t " << t;
      }
      EXPECT_LE(std::abs(c.q_inf() - ex.q_inf), 4 * std::sqrt(ex.q_inf_var / runs) + 1e-12);
    }
    ++graphs;
  }
}

TEST(MonteCarlo, InvariantsOnRandomGraphs) {
  auto g = barabasi_albert(150, 2, 8);
  auto set = influence_curves(g, config(0.15, 200, 30), {}, 2);
  const double floor = 1.0 / 150.0;
  for (const auto& c : set.curves) {
    double prev = floor;
    for (std::uint32_t t = 1; t <= 30; ++t) {
      EXPECT_GE(c.q(t), prev);
      EXPECT_LE(c.q(t), 1.0);
      prev = c.q(t);
    }
    EXPECT_GE(c.q_inf(), c.q(30));
  }
}

TEST(MonteCarlo, MonotoneInBeta) {
  // Same master seed for both levels; draws are consumed in frontier order,
  // so runs are correlated but not pathwise coupled. Compare within the
  // joint Monte Carlo error.
  auto g = erdos_renyi(60, 0.08, 12);
  auto lo = influence_curves(g, config(0.1, 2000, 10, 7), {}, 1);
  auto hi = influence_curves(g, config(0.2, 2000, 10, 7), {}, 1);
  for (NodeId s = 0; s < 60; ++s) {
    const double se = std::hypot(lo.curves[s].q_inf_stderr(), hi.curves[s].q_inf_stderr());
    EXPECT_GE(hi.curves[s].q_inf(), lo.curves[s].q_inf() - 4 * se) << "seed " << s;
  }
}

TEST(MonteCarlo, HaltedRunsMatchLateTime) {
  auto g = make(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  auto set = influence_curves(g, config(0.6, 500, 10), {}, 1);
  for (const auto& c : set.curves) EXPECT_DOUBLE_EQ(c.q(10), c.q_inf());
}

TEST(MonteCarlo, DeterministicAcrossWorkers) {
  auto g = barabasi_albert(300, 2, 2);
  auto c = config(0.12, 50, 15, 99);
  auto one = influence_curves(g, c, {}, 1);
  for (unsigned w : {2u, 3u, 7u}) {
    auto many = influence_curves(g, c, {}, w);
    EXPECT_EQ(one.curves, many.curves);
    EXPECT_EQ(one.fingerprint, many.fingerprint);
  }
  auto other_seed = influence_curves(g, config(0.12, 50, 15, 100), {}, 1);
  EXPECT_NE(one.curves, other_seed.curves);
}

TEST(MonteCarlo, SubsetOfSeedsMatchesFullRun) {
  auto g = barabasi_albert(100, 2, 6);
  auto c = config(0.2, 40, 10);
  auto full = influence_curves(g, c, {}, 1);
  const std::vector<NodeId> pick{5, 50, 99};
  auto part = influence_curves(g, c, pick, 1);
  for (std::size_t i = 0; i < pick.size(); ++i) EXPECT_EQ(part.curves[i], full.curves[pick[i]]);
}

TEST(Config, LambdaRatio) {
  auto c = SimulationConfig::from_lambda_ratio(2.0, 0.1);
  EXPECT_DOUBLE_EQ(c.beta, 0.2);
  EXPECT_THROW(SimulationConfig::from_lambda_ratio(10.0, 0.2), ConfigError);
  auto bad = config(0.5, 0);
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Fingerprint, SensitiveToEveryInput) {
  auto g = make(3, {{0, 1}, {1, 2}});
  auto base = influence_fingerprint(g, config(0.5, 10));
  EXPECT_EQ(base, influence_fingerprint(g, config(0.5, 10)));
  EXPECT_NE(base, influence_fingerprint(g, config(0.4, 10)));
  EXPECT_NE(base, influence_fingerprint(g, config(0.5, 11)));
  EXPECT_NE(base, influence_fingerprint(g, config(0.5, 10, 11)));
  EXPECT_NE(base, influence_fingerprint(g, config(0.5, 10, 10, 2)));
  EXPECT_NE(base, influence_fingerprint(make(3, {{0, 1}, {0, 2}}), config(0.5, 10)));
}

TEST(Cache, RoundTripAndHit) {
  auto dir = scratch_dir("cache");
  InfluenceCache cache(dir);
  auto g = barabasi_albert(40, 2, 3);
  auto c = config(0.3, 30, 12);
  bool hit = true;
  auto first = cached_influence_curves(g, c, &cache, 1, &hit);
  EXPECT_FALSE(hit);
  EXPECT_TRUE(fs::exists(cache.path_for(first.fingerprint)));
  auto second = cached_influence_curves(g, c, &cache, 1, &hit);
  EXPECT_TRUE(hit);
  EXPECT_EQ(first.curves, second.curves);
  fs::remove_all(dir);
}

TEST(Cache, CorruptFileIsIgnored) {
  auto dir = scratch_dir("corrupt");
  InfluenceCache cache(dir);
  auto g = make(3, {{0, 1}, {1, 2}});
  auto c = config(0.5, 10, 4);
  const auto fp = influence_fingerprint(g, c);
  std::ofstream(cache.path_for(fp)) << "garbage\n";
  EXPECT_FALSE(cache.load(fp, c));
  bool hit = true;
  cached_influence_curves(g, c, &cache, 1, &hit);
  EXPECT_FALSE(hit);
  fs::remove_all(dir);
}

TEST(InfluenceCsv, Layout) {
  auto g = make(2, {{0, 1}});
  auto set = influence_curves(g, config(1.0, 2, 2), {}, 1);
  std::ostringstream out;
  write_influence_csv(g, set, out);
  EXPECT_EQ(out.str(),
            "node_label,t,q,stderr\n"
            "0,1,1,0\n0,2,1,0\n0,inf,1,0\n"
            "1,1,1,0\n1,2,1,0\n1,inf,1,0\n");
}
