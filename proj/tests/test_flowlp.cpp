#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "support/lp_oracle.hpp"
#include "uwc/flowlp.hpp"

using namespace uwc;

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

LinearProgram to_library_lp(const oracle::StandardLp& s) {
  LinearProgram lp;
  lp.objective = s.c;
  lp.eq = to_matrix(s.eq);
  if (s.eq.empty()) lp.eq = Matrix(0, s.c.size());
  lp.eq_rhs = s.eq_rhs;
  lp.le = to_matrix(s.le);
  if (s.le.empty()) lp.le = Matrix(0, s.c.size());
  lp.le_rhs = s.le_rhs;
  return lp;
}

struct RandomTransport {
  std::vector<std::vector<double>> cost;
  std::vector<double> supplies, demands;
};

RandomTransport random_transport(std::mt19937_64& g, std::size_t max_src, std::size_t max_snk) {
  std::uniform_int_distribution<std::size_t> sd(1, max_src), td(1, max_snk);
  std::uniform_real_distribution<double> cu(0.1, 10.0), wu(0.1, 5.0);
  RandomTransport t;
  const std::size_t s = sd(g), k = td(g);
  t.cost.assign(s, std::vector<double>(k));
  for (auto& r : t.cost)
    for (auto& v : r) v = cu(g);
  double total = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    t.supplies.push_back(wu(g));
    total += t.supplies.back();
  }
  std::vector<double> split(k);
  double ss = 0.0;
  for (auto& v : split) ss += (v = wu(g));
  for (std::size_t j = 0; j < k; ++j) t.demands.push_back(split[j] / ss * total);
  // Make the balance exact up to rounding in the last sink.
  double rest = total;
  for (std::size_t j = 0; j + 1 < k; ++j) rest -= t.demands[j];
  t.demands.back() = std::max(0.0, rest);
  return t;
}

}  // namespace

TEST(Transportation, SingleArc) {
  const auto sol = solve_transportation({to_matrix({{7}}), {1}, {1}});
  EXPECT_DOUBLE_EQ(sol.objective, 7.0);
}

TEST(Transportation, DiagonalMatching) {
  const auto sol = solve_transportation({to_matrix({{0, 10}, {10, 0}}), {1, 1}, {1, 1}});
  EXPECT_NEAR(sol.objective, 0.0, 1e-12);
}

TEST(Transportation, FractionalExample) {
  // Frozen from vertex enumeration: x11 = 1, x12 = 0.5, x22 = 0.5 -> 2.5
  const std::vector<std::vector<double>> c{{1, 2}, {3, 1}};
  const auto ref = oracle::vertex_enumeration(oracle::transportation_lp(c, {1.5, 0.5}, {1, 1}));
  ASSERT_TRUE(ref.feasible);
  EXPECT_NEAR(ref.objective, 2.5, 1e-12);
  const auto sol = solve_transportation({to_matrix(c), {1.5, 0.5}, {1, 1}});
  EXPECT_NEAR(sol.objective, 2.5, 1e-9);
  EXPECT_NEAR(sol.flow(0, 0), 1.0, 1e-9);
  EXPECT_NEAR(sol.flow(0, 1), 0.5, 1e-9);
  EXPECT_NEAR(sol.flow(1, 0), 0.0, 1e-9);
  EXPECT_NEAR(sol.flow(1, 1), 0.5, 1e-9);
}

TEST(Transportation, UnbalancedIsRejected) {
  EXPECT_THROW(solve_transportation({to_matrix({{1, 1}}), {2}, {1, 0.5}}), ValidationError);
}

TEST(Transportation, ZeroSupplyAndDemandAreReinstated) {
  const auto sol = solve_transportation({to_matrix({{1, 5, 2}, {4, 4, 4}}), {2, 0}, {1, 0, 1}});
  EXPECT_NEAR(sol.objective, 3.0, 1e-12);
  EXPECT_EQ(sol.flow.rows(), 2u);
  EXPECT_EQ(sol.flow.cols(), 3u);
  EXPECT_EQ(sol.flow(1, 0), 0.0);
  EXPECT_EQ(sol.flow(0, 1), 0.0);
}

TEST(Transportation, SmallInstancesMatchVertexEnumeration) {
  std::mt19937_64 g(101);
  for (int trial = 0; trial < 60; ++trial) {
    const auto t = random_transport(g, 4, 3);
    const auto ref = oracle::vertex_enumeration(oracle::transportation_lp(t.cost, t.supplies, t.demands));
    ASSERT_TRUE(ref.feasible);
    const auto sol = solve_transportation({to_matrix(t.cost), t.supplies, t.demands});
    EXPECT_NEAR(sol.objective, ref.objective, 1e-7 * std::max(1.0, ref.objective));
  }
}

TEST(Transportation, RandomInstancesMatchSimplexAndCertify) {
  std::mt19937_64 g(202);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = random_transport(g, 8, 3);
    TransportationProblem p{to_matrix(t.cost), t.supplies, t.demands};
    const auto sol = solve_transportation(p);
    const auto lp = solve_lp(to_library_lp(oracle::transportation_lp(t.cost, t.supplies, t.demands)));
    EXPECT_NEAR(sol.objective, lp.objective, 1e-7 * std::max(1.0, lp.objective));
    const auto cert = certify_flow(transportation_network(p, sol));
    EXPECT_TRUE(cert.optimal) << "reduced cost " << cert.worst_reduced_cost << " conservation "
                              << cert.worst_conservation;
  }
}

TEST(Transportation, DuplicatedSinkLeavesObjective) {
  std::mt19937_64 g(303);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = random_transport(g, 6, 3);
    const auto base = solve_transportation({to_matrix(t.cost), t.supplies, t.demands});
    auto cost = t.cost;
    for (auto& r : cost) r.push_back(r[0]);
    auto demands = t.demands;
    demands.push_back(demands[0] * 0.3);
    demands[0] *= 0.7;
    const auto dup = solve_transportation({to_matrix(cost), t.supplies, demands});
    EXPECT_NEAR(dup.objective, base.objective, 1e-9 * std::max(1.0, base.objective));
  }
}

TEST(Transportation, ScalingCostsScalesObjective) {
  std::mt19937_64 g(404);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = random_transport(g, 6, 3);
    TransportationProblem p{to_matrix(t.cost), t.supplies, t.demands};
    const auto base = solve_transportation(p);
    const double s = 3.7;
    auto scaled_cost = t.cost;
    for (auto& r : scaled_cost)
      for (auto& v : r) v *= s;
    TransportationProblem ps{to_matrix(scaled_cost), t.supplies, t.demands};
    const auto scaled = solve_transportation(ps);
    EXPECT_NEAR(scaled.objective, s * base.objective, 1e-9 * s * std::max(1.0, base.objective));
    // The original optimal flow stays optimal under the scaled costs.
    EXPECT_TRUE(certify_flow(transportation_network(ps, base)).optimal);
  }
}

TEST(BoundedTransportation, LineExamples) {
  // points {0,1,2,9,10}, sinks at 1 and 10, z = 1
  const std::vector<std::vector<double>> c{{1, 10}, {0, 9}, {1, 8}, {8, 1}, {9, 0}};
  const std::vector<double> w(5, 1.0);

  const auto ref1 = oracle::integral_split_min(c, {2, 2}, {3, 3});
  ASSERT_TRUE(ref1);
  EXPECT_DOUBLE_EQ(*ref1, 3.0);
  BoundedTransportationProblem p1{to_matrix(c), w, {2, 2}, {3, 3}};
  const auto s1 = solve_bounded_transportation(p1);
  EXPECT_NEAR(s1.objective, 3.0, 1e-9);
  EXPECT_NEAR(s1.sink_totals[0], 3.0, 1e-9);
  EXPECT_NEAR(s1.sink_totals[1], 2.0, 1e-9);
  EXPECT_TRUE(certify_flow(bounded_transportation_network(p1, s1)).optimal);

  const auto ref2 = oracle::integral_split_min(c, {4, 1}, {5, 5});
  ASSERT_TRUE(ref2);
  EXPECT_DOUBLE_EQ(*ref2, 10.0);
  BoundedTransportationProblem p2{to_matrix(c), w, {4, 1}, {5, 5}};
  const auto s2 = solve_bounded_transportation(p2);
  EXPECT_NEAR(s2.objective, 10.0, 1e-9);
  EXPECT_TRUE(certify_flow(bounded_transportation_network(p2, s2)).optimal);
}

TEST(BoundedTransportation, VacuousBoundsMatchNearestSink) {
  std::mt19937_64 g(505);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = random_transport(g, 8, 3);
    double total = 0.0, nearest = 0.0;
    for (std::size_t i = 0; i < t.supplies.size(); ++i) {
      total += t.supplies[i];
      nearest += t.supplies[i] * *std::min_element(t.cost[i].begin(), t.cost[i].end());
    }
    const std::size_t k = t.demands.size();
    const auto sol = solve_bounded_transportation(
        {to_matrix(t.cost), t.supplies, std::vector<double>(k, 0.0), std::vector<double>(k, total)});
    EXPECT_NEAR(sol.objective, nearest, 1e-9 * std::max(1.0, nearest));
  }
}

TEST(BoundedTransportation, IntegralInstancesMatchSplitEnumeration) {
  std::mt19937_64 g(606);
  std::uniform_real_distribution<double> cu(0.0, 10.0);
  std::uniform_int_distribution<int> bd(0, 4);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 5, k = 2 + trial % 2;
    std::vector<std::vector<double>> c(n, std::vector<double>(k));
    for (auto& r : c)
      for (auto& v : r) v = cu(g);
    std::vector<double> lo(k), hi(k);
    for (std::size_t i = 0; i < k; ++i) {
      lo[i] = bd(g) % 3;
      hi[i] = lo[i] + bd(g);
    }
    const auto ref = oracle::integral_split_min(c, lo, hi);
    BoundedTransportationProblem p{to_matrix(c), std::vector<double>(n, 1.0), lo, hi};
    if (!ref) {
      EXPECT_THROW(solve_bounded_transportation(p), InfeasibleError);
      continue;
    }
    const auto sol = solve_bounded_transportation(p);
    EXPECT_NEAR(sol.objective, *ref, 1e-9 * std::max(1.0, *ref));
    EXPECT_TRUE(certify_flow(bounded_transportation_network(p, sol)).optimal);
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(BoundedTransportation, InfeasibleBounds) {
  const auto c = to_matrix({{1, 2}, {2, 1}});
  EXPECT_THROW(solve_bounded_transportation({c, {1, 1}, {2, 1}, {3, 3}}), InfeasibleError);
  EXPECT_THROW(solve_bounded_transportation({c, {1, 1}, {0, 0}, {0.5, 0.5}}), InfeasibleError);
}

// Many sources, several sinks, tie-heavy integer costs: the transportation
// solver must agree with the generic min-cost flow on the same network.
TEST(BoundedTransportation, LargeInstancesMatchGenericMinCostFlow) {
  std::mt19937_64 g(404);
  std::uniform_int_distribution<int> ci(0, 6);
  std::uniform_real_distribution<double> cu(0.0, 50.0), wu(0.1, 4.0), fu(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t ns = 20 + trial * 3, nt = 2 + trial % 7;
    const bool ties = trial % 2 == 0;
    BoundedTransportationProblem p{Matrix(ns, nt), std::vector<double>(ns), {}, {}};
    double total = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      total += (p.supplies[s] = wu(g));
      for (std::size_t t = 0; t < nt; ++t) p.cost(s, t) = ties ? ci(g) : cu(g);
    }
    const double share = total / static_cast<double>(nt);
    for (std::size_t t = 0; t < nt; ++t) {
      p.lower.push_back(trial % 3 == 0 ? share : 0.9 * share * fu(g));
      p.upper.push_back(trial % 3 == 0 ? share : (t == 0 ? kInf : share * (1.0 + 2.0 * fu(g))));
    }
    const auto sol = solve_bounded_transportation(p);

    FlowNetwork net(ns + nt + 1);
    for (std::size_t s = 0; s < ns; ++s) {
      net.balance[s] = p.supplies[s];
      for (std::size_t t = 0; t < nt; ++t) net.add_arc(s, ns + t, p.cost(s, t), 0.0, kInf);
    }
    net.balance[ns + nt] = -total;
    for (std::size_t t = 0; t < nt; ++t) net.add_arc(ns + t, ns + nt, 0.0, p.lower[t], p.upper[t]);
    const double ref = solve_min_cost_flow(net);

    EXPECT_NEAR(sol.objective, ref, 1e-9 * std::max(1.0, ref)) << "trial " << trial;
    EXPECT_TRUE(certify_flow(bounded_transportation_network(p, sol)).optimal) << "trial " << trial;
    for (std::size_t t = 0; t < nt; ++t) {
      EXPECT_GE(sol.sink_totals[t], p.lower[t] - 1e-9 * total);
      EXPECT_LE(sol.sink_totals[t], p.upper[t] + 1e-9 * total);
    }
    for (std::size_t s = 0; s < ns; ++s) {
      double row = 0.0;
      for (std::size_t t = 0; t < nt; ++t) {
        EXPECT_GE(sol.flow(s, t), 0.0);
        row += sol.flow(s, t);
      }
      EXPECT_NEAR(row, p.supplies[s], 1e-9 * total);
    }
  }
}

TEST(MinCostFlow, LowerBoundsAreHonored) {
  FlowNetwork net;
  net.nodes = 3;
  net.balance = {2, 0, -2};
  net.add_arc(0, 2, 1.0, 0.0, kInf);
  net.add_arc(0, 1, 5.0, 1.0, kInf);  // forced one unit on the expensive path
  net.add_arc(1, 2, 0.0, 0.0, kInf);
  const double obj = solve_min_cost_flow(net);
  EXPECT_NEAR(obj, 6.0, 1e-12);
  EXPECT_NEAR(net.arcs[1].flow, 1.0, 1e-12);
  EXPECT_TRUE(certify_flow(net).optimal);
}

TEST(MinCostFlow, CapacityInfeasibility) {
  FlowNetwork net;
  net.nodes = 2;
  net.balance = {3, -3};
  net.add_arc(0, 1, 1.0, 0.0, 2.0);
  EXPECT_THROW(solve_min_cost_flow(net), InfeasibleError);
}

TEST(MinCostFlow, CertificateRejectsSuboptimalFlow) {
  FlowNetwork net;
  net.nodes = 2;
  net.balance = {1, -1};
  net.add_arc(0, 1, 1.0, 0.0, kInf);
  net.add_arc(0, 1, 3.0, 0.0, kInf);
  net.arcs[1].flow = 1.0;  // all flow on the expensive arc
  EXPECT_FALSE(certify_flow(net).optimal);
  solve_min_cost_flow(net);
  EXPECT_TRUE(certify_flow(net).optimal);
}

TEST(Simplex, TrivialPrograms) {
  {
    // min x s.t. -x <= -3
    LinearProgram lp;
    lp.objective = {1.0};
    lp.eq = Matrix(0, 1);
    lp.le = Matrix(1, 1, -1.0);
    lp.le_rhs = {-3.0};
    const auto s = solve_lp(lp);
    EXPECT_NEAR(s.x[0], 3.0, 1e-12);
    EXPECT_NEAR(s.objective, 3.0, 1e-12);
  }
  {
    LinearProgram lp;
    lp.objective = {1.0, 1.0};
    lp.eq = Matrix(1, 2, 1.0);
    lp.eq_rhs = {1.0};
    lp.le = Matrix(0, 2);
    EXPECT_NEAR(solve_lp(lp).objective, 1.0, 1e-12);
  }
}

TEST(Simplex, ThreeVariableProgramMatchesVertexEnumeration) {
  // min -x - 2y + z  s.t. x + y + z = 4, x + 3y <= 6, y - z <= 1
  oracle::StandardLp s;
  s.c = {-1, -2, 1};
  s.eq = {{1, 1, 1}};
  s.eq_rhs = {4};
  s.le = {{1, 3, 0}, {0, 1, -1}};
  s.le_rhs = {6, 1};
  const auto ref = oracle::vertex_enumeration(s);
  ASSERT_TRUE(ref.feasible);
  const auto sol = solve_lp(to_library_lp(s));
  EXPECT_NEAR(sol.objective, ref.objective, 1e-7);
}

TEST(Simplex, RandomProgramsMatchVertexEnumeration) {
  std::mt19937_64 g(707);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.5, 3.0);
  int compared = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 2 + trial % 5, me = trial % 3, ml = 1 + trial % 3;
    oracle::StandardLp s;
    s.c.resize(n);
    for (auto& v : s.c) v = pos(g) * (u(g) > -0.3 ? 1.0 : -1.0);
    // A positive bounding row keeps every program bounded.
    s.le.push_back(std::vector<double>(n, 1.0));
    s.le_rhs.push_back(5.0 + pos(g));
    for (std::size_t r = 0; r < ml; ++r) {
      std::vector<double> row(n);
      for (auto& v : row) v = u(g);
      s.le.push_back(row);
      s.le_rhs.push_back(u(g) + 0.5);
    }
    for (std::size_t r = 0; r < me; ++r) {
      std::vector<double> row(n);
      for (auto& v : row) v = pos(g);
      s.eq.push_back(row);
      s.eq_rhs.push_back(pos(g));
    }
    const auto ref = oracle::vertex_enumeration(s);
    const auto lp = to_library_lp(s);
    if (!ref.feasible) {
      EXPECT_THROW(solve_lp(lp), InfeasibleError) << "trial " << trial;
      continue;
    }
    const auto sol = solve_lp(lp);
    EXPECT_NEAR(sol.objective, ref.objective, 1e-7 * std::max(1.0, std::abs(ref.objective))) << "trial " << trial;
    EXPECT_LT(lp_violation(lp, sol.x), 1e-7);
    ++compared;
  }
  EXPECT_GT(compared, 60);
}

TEST(Simplex, DetectsUnboundedAndInfeasible) {
  LinearProgram unb;
  unb.objective = {-1.0, 0.0};
  unb.eq = Matrix(0, 2);
  unb.le = Matrix(1, 2);
  unb.le(0, 1) = 1.0;
  unb.le_rhs = {1.0};
  EXPECT_THROW(solve_lp(unb), UnboundedError);

  LinearProgram inf;
  inf.objective = {1.0};
  inf.eq = Matrix(1, 1, 1.0);
  inf.eq_rhs = {-1.0};
  inf.le = Matrix(0, 1);
  EXPECT_THROW(solve_lp(inf), InfeasibleError);
}

TEST(Simplex, VariableCap) {
  LinearProgram lp;
  lp.objective.assign(kMaxLpVariables + 1, 1.0);
  lp.eq = Matrix(0, kMaxLpVariables + 1);
  lp.le = Matrix(0, kMaxLpVariables + 1);
  EXPECT_THROW(solve_lp(lp), ResourceLimitError);
}
