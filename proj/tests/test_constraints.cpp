#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "support/instances.hpp"
#include "support/lp_oracle.hpp"
#include "uwc/constraints.hpp"

using namespace uwc;

namespace {

const std::vector<std::size_t> kCenters110{1, 4};  // line sites at coordinates 1 and 10

// Independent LP for min-cost sigma under any spec, solved by vertex enumeration.
oracle::StandardLp assignment_lp(const MetricSpace& space, const WeightedSet& b, const std::vector<std::size_t>& c,
                                 const ConstraintSpec& spec, int z) {
  const std::size_t n = b.size(), k = c.size();
  oracle::StandardLp lp;
  lp.c.resize(n * k);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t i = 0; i < k; ++i) lp.c[x * k + i] = space.cost(b.sites[x], c[i], z);
  for (std::size_t x = 0; x < n; ++x) {
    oracle::Row r(n * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) r[x * k + i] = 1.0;
    lp.eq.push_back(r);
    lp.eq_rhs.push_back(b.weights[x]);
  }
  const auto cluster_row = [&](std::size_t i, auto coef) {
    oracle::Row r(n * k, 0.0);
    for (std::size_t x = 0; x < n; ++x) r[x * k + i] = coef(x);
    return r;
  };
  if (const auto* bal = std::get_if<Balanced>(&spec)) {
    for (std::size_t i = 0; i < k; ++i) {
      lp.le.push_back(cluster_row(i, [](std::size_t) { return 1.0; }));
      lp.le_rhs.push_back(bal->upper[i]);
      lp.le.push_back(cluster_row(i, [](std::size_t) { return -1.0; }));
      lp.le_rhs.push_back(-bal->lower[i]);
    }
  } else if (const auto* fp = std::get_if<FixedProfile>(&spec)) {
    const auto& g = fp->profile;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < g.label_count(); ++j) {
        lp.eq.push_back(cluster_row(i, [&](std::size_t x) {
          return !g.is_labeled() || b.labels[x] == j ? 1.0 : 0.0;
        }));
        lp.eq_rhs.push_back(g.is_labeled() ? g.at(i, j) : g[i]);
      }
  } else if (const auto* fb = std::get_if<FractionBounds>(&spec)) {
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < fb->m; ++j) {
        lp.le.push_back(cluster_row(i, [&](std::size_t x) { return fb->lo(i, j) - (b.labels[x] == j ? 1.0 : 0.0); }));
        lp.le_rhs.push_back(0.0);
        lp.le.push_back(cluster_row(i, [&](std::size_t x) { return (b.labels[x] == j ? 1.0 : 0.0) - fb->hi(i, j); }));
        lp.le_rhs.push_back(0.0);
      }
  }
  return lp;
}

WeightedSet labeled_line() {
  auto inst = fixtures::line5();
  inst.labels = std::vector<std::size_t>{0, 0, 0, 1, 1};
  return full_weighted_set(inst);
}

}  // namespace

TEST(AssignmentCost, SinglePoint) {
  const auto s = MetricSpace::euclidean(1, {0, 4});
  WeightedSet b{{0}, {1.0}, {}};
  Assignment a;
  a.entries = {{0, 0, 1.0}};
  const std::vector<std::size_t> c{1};
  EXPECT_DOUBLE_EQ(assignment_cost(s, b, a, c, 1), 4.0);
  EXPECT_DOUBLE_EQ(assignment_cost(s, b, a, c, 2), 16.0);
}

TEST(AssignmentCost, LineVoronoi) {
  const auto inst = fixtures::line5();
  const auto b = full_weighted_set(inst);
  const auto v = voronoi_cost(inst.space, b, kCenters110, 1);
  EXPECT_DOUBLE_EQ(v.cost, 3.0);
  EXPECT_DOUBLE_EQ(assignment_cost(inst.space, b, v.assignment, kCenters110, 1), 3.0);
}

TEST(AssignmentCost, RejectsNonConservingAssignment) {
  const auto inst = fixtures::line5();
  const auto b = full_weighted_set(inst);
  Assignment a;
  a.entries = {{0, 0, 1.0}};
  EXPECT_THROW(assignment_cost(inst.space, b, a, kCenters110, 1), ValidationError);
}

TEST(ProfileCost, LineExamples) {
  const auto inst = fixtures::line5();
  const auto b = full_weighted_set(inst);
  EXPECT_NEAR(profile_cost(inst.space, b, kCenters110, ClusterProfile::plain({3, 2}), 1).cost, 3.0, 1e-12);
  EXPECT_NEAR(profile_cost(inst.space, b, kCenters110, ClusterProfile::plain({5, 0}), 1).cost, 19.0, 1e-12);
  EXPECT_NEAR(profile_cost(inst.space, b, kCenters110, ClusterProfile::plain({0, 5}), 1).cost, 28.0, 1e-12);
  EXPECT_THROW(profile_cost(inst.space, b, kCenters110, ClusterProfile::plain({3, 3}), 1), ValidationError);
}

TEST(VoronoiProfile, Examples) {
  const auto inst = fixtures::line5();
  const auto b = full_weighted_set(inst);
  const auto g = voronoi_profile(inst.space, b, kCenters110, 1);
  EXPECT_EQ(std::vector<double>(g.values().begin(), g.values().end()), (std::vector<double>{3, 2}));
  const std::vector<std::size_t> same{2, 2};
  const auto tie = voronoi_profile(inst.space, b, same, 1);
  EXPECT_EQ(std::vector<double>(tie.values().begin(), tie.values().end()), (std::vector<double>{5, 0}));
  WeightedSet one{{3}, {2.5}, {}};
  const std::vector<std::size_t> c{0};
  EXPECT_DOUBLE_EQ(voronoi_profile(inst.space, one, c, 1)[0], 2.5);
}

TEST(LabeledProfileCost, SingleLabelReducesToPlain) {
  const auto inst = fixtures::line5();
  const auto b = full_weighted_set(inst);
  const auto plain = profile_cost(inst.space, b, kCenters110, ClusterProfile::plain({2.5, 2.5}), 2).cost;
  const auto lab = labeled_profile_cost(inst.space, b, kCenters110, ClusterProfile::labeled(2, 1, {2.5, 2.5}), 2).cost;
  EXPECT_NEAR(plain, lab, 1e-12);
}

TEST(LabeledProfileCost, NearestRoutingIsSumOfVoronoi) {
  const auto b = labeled_line();
  const auto inst = fixtures::line5();
  // label 0 = {0,1,2} all nearest to 1; label 1 = {9,10} nearest to 10
  const auto g = ClusterProfile::labeled(2, 2, {3, 0, 0, 2});
  EXPECT_NEAR(labeled_profile_cost(inst.space, b, kCenters110, g, 1).cost, 3.0, 1e-12);
}

TEST(LabeledProfileCost, CrossingDemandsMatchJointLp) {
  const auto b = labeled_line();
  const auto inst = fixtures::line5();
  const auto g = ClusterProfile::labeled(2, 2, {1, 1, 2, 1});
  const auto got = labeled_profile_cost(inst.space, b, kCenters110, g, 1);
  const auto ref = oracle::vertex_enumeration(assignment_lp(inst.space, b, kCenters110, FixedProfile{g}, 1));
  ASSERT_TRUE(ref.feasible);
  EXPECT_NEAR(got.cost, ref.objective, 1e-9);
  EXPECT_TRUE(check_feasibility(got.assignment, b, FixedProfile{g}, 2).empty());
}

TEST(OptimalFeasibleCost, BalancedExamples) {
  const auto inst = fixtures::line5();
  const auto b = full_weighted_set(inst);
  const auto r = optimal_feasible_cost(inst.space, b, kCenters110, Balanced{{2, 2}, {3, 3}}, 1);
  EXPECT_NEAR(r.cost, 3.0, 1e-12);
  EXPECT_NEAR(r.realized[0], 3.0, 1e-12);
  EXPECT_NEAR(r.realized[1], 2.0, 1e-12);
  const auto vac = optimal_feasible_cost(inst.space, b, kCenters110, Balanced{{0, 0}, {5, 5}}, 1);
  EXPECT_NEAR(vac.cost, voronoi_cost(inst.space, b, kCenters110, 1).cost, 1e-12);
}

TEST(OptimalFeasibleCost, FractionExampleMatchesVertexEnumeration) {
  const auto b = labeled_line();
  const auto inst = fixtures::line5();
  const std::vector<double> lo{0.2, 0.2}, hi{0.8, 0.8};
  const auto spec = FractionBounds::per_cluster(lo, hi, 2);
  const auto ref = oracle::vertex_enumeration(assignment_lp(inst.space, b, kCenters110, spec, 1));
  ASSERT_TRUE(ref.feasible);
  const auto got = optimal_feasible_cost(inst.space, b, kCenters110, spec, 1);
  EXPECT_NEAR(got.cost, ref.objective, 1e-7);
  EXPECT_NEAR(ref.objective, 10.0, 1e-9);  // frozen oracle value
  EXPECT_TRUE(check_feasibility(got.assignment, b, spec, 2).empty());
}

TEST(OptimalFeasibleCost, MatchesVertexEnumerationOnSmallInstances) {
  std::mt19937_64 g(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    fixtures::RandomSpec rs;
    rs.n_min = 2;
    rs.n_max = trial % 3 == 2 ? 4 : 6;
    rs.z = 1 + trial % 2;
    rs.labels = trial % 3 == 2 ? 2 : 0;
    const auto inst = fixtures::random_instance(g, rs);
    const auto b = full_weighted_set(inst);
    const std::vector<std::size_t> c{inst.facilities[0], inst.facilities[1]};
    const double w = b.total_weight();
    ConstraintSpec spec;
    if (trial % 3 == 0) {
      const double l0 = u(g) * w * 0.5, l1 = u(g) * w * 0.4;
      spec = Balanced{{l0, l1}, {l0 + u(g) * w, l1 + u(g) * w}};
    } else if (trial % 3 == 1) {
      const double a = u(g);
      spec = FixedProfile{ClusterProfile::plain({a * w, w - a * w})};
    } else {
      const std::vector<double> lo{0.2 * u(g), 0.2 * u(g)}, hi{0.7 + 0.3 * u(g), 0.7 + 0.3 * u(g)};
      spec = FractionBounds::per_cluster(lo, hi, 2);
    }
    const auto ref = oracle::vertex_enumeration(assignment_lp(inst.space, b, c, spec, inst.z));
    if (!ref.feasible) {
      EXPECT_THROW(optimal_feasible_cost(inst.space, b, c, spec, inst.z), InfeasibleError) << "trial " << trial;
      continue;
    }
    const auto got = optimal_feasible_cost(inst.space, b, c, spec, inst.z);
    EXPECT_NEAR(got.cost, ref.objective, 1e-6 * std::max(1.0, ref.objective)) << "trial " << trial;
    EXPECT_TRUE(check_feasibility(got.assignment, b, spec, 2).empty()) << "trial " << trial;
    ++checked;
  }
  EXPECT_GT(checked, 30);
}

TEST(Invariants, VoronoiProfileCostEqualsVoronoiCost) {
  std::mt19937_64 g(23);
  for (int trial = 0; trial < 100; ++trial) {
    fixtures::RandomSpec rs;
    rs.n_max = 30;
    rs.f_max = 8;
    rs.k = 2 + trial % 3;
    rs.z = 1 + trial % 2;
    const auto inst = fixtures::random_instance(g, rs);
    const auto b = full_weighted_set(inst);
    const std::vector<std::size_t> c(inst.facilities.begin(), inst.facilities.begin() + static_cast<long>(rs.k));
    const auto v = voronoi_cost(inst.space, b, c, inst.z);
    const auto p = profile_cost(inst.space, b, c, v.realized, inst.z);
    EXPECT_NEAR(p.cost, v.cost, 1e-9 * std::max(1.0, v.cost));
  }
}

TEST(Invariants, AnyProfileCostsAtLeastVoronoi) {
  std::mt19937_64 g(29);
  std::exponential_distribution<double> e(1.0);
  for (int trial = 0; trial < 60; ++trial) {
    fixtures::RandomSpec rs;
    rs.k = 3;
    rs.n_max = 20;
    const auto inst = fixtures::random_instance(g, rs);
    const auto b = full_weighted_set(inst);
    const std::vector<std::size_t> c(inst.facilities.begin(), inst.facilities.begin() + 3);
    std::vector<double> t(3);
    double s = 0.0;
    for (auto& v : t) s += (v = e(g));
    for (auto& v : t) v *= b.total_weight() / s;
    const double pc = profile_cost(inst.space, b, c, ClusterProfile::plain(t), inst.z).cost;
    EXPECT_GE(pc, voronoi_cost(inst.space, b, c, inst.z).cost - 1e-9);
  }
}

TEST(Invariants, WideningBalancedBoundsNeverIncreasesCost) {
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = fixtures::random_instance(g, {});
    const auto b = full_weighted_set(inst);
    const std::vector<std::size_t> c{inst.facilities[0], inst.facilities[1]};
    const double w = b.total_weight();
    const double l0 = 0.3 * w * u(g), l1 = 0.3 * w * u(g);
    Balanced tight{{l0, l1}, {l0 + 0.6 * w, l1 + 0.6 * w}};
    Balanced wide{{l0 * u(g), l1 * u(g)}, {tight.upper[0] + u(g), tight.upper[1] + u(g)}};
    const double ct = optimal_feasible_cost(inst.space, b, c, tight, inst.z).cost;
    const double cw = optimal_feasible_cost(inst.space, b, c, wide, inst.z).cost;
    EXPECT_LE(cw, ct + 1e-9 * std::max(1.0, ct));
  }
}

TEST(Invariants, VacuousFractionBoundsEqualUnconstrained) {
  std::mt19937_64 g(37);
  for (int trial = 0; trial < 40; ++trial) {
    fixtures::RandomSpec rs;
    rs.labels = 2 + trial % 2;
    rs.k = 2;
    const auto inst = fixtures::random_instance(g, rs);
    const auto b = full_weighted_set(inst);
    const std::vector<std::size_t> c{inst.facilities[0], inst.facilities[1]};
    FractionBounds fb{2, rs.labels, std::vector<double>(2 * rs.labels, 0.0), std::vector<double>(2 * rs.labels, 1.0)};
    const double got = optimal_feasible_cost(inst.space, b, c, fb, inst.z).cost;
    EXPECT_NEAR(got, voronoi_cost(inst.space, b, c, inst.z).cost, 1e-7);
  }
}

TEST(Invariants, ScalingDistancesScalesCostsByPowerZ) {
  std::mt19937_64 g(41);
  const double s = 2.5;
  for (int trial = 0; trial < 40; ++trial) {
    fixtures::RandomSpec rs;
    rs.z = 1 + trial % 2;
    rs.labels = 2;
    const auto inst = fixtures::random_instance(g, rs);
    auto scaled = inst;
    std::vector<double> coords(inst.space.raw().begin(), inst.space.raw().end());
    for (auto& v : coords) v *= s;
    scaled.space = MetricSpace::euclidean(2, coords);
    const auto b = full_weighted_set(inst);
    const std::vector<std::size_t> c{inst.facilities[0], inst.facilities[1]};
    const double f = rs.z == 1 ? s : s * s;
    const double w = b.total_weight();
    const std::vector<ConstraintSpec> specs{
        Unconstrained{}, Balanced{{0.2 * w, 0.2 * w}, {0.7 * w, 0.7 * w}},
        FixedProfile{ClusterProfile::plain({0.4 * w, 0.6 * w})},
        FractionBounds::per_cluster(std::vector<double>{0.1, 0.1}, std::vector<double>{0.9, 0.9}, 2)};
    for (const auto& spec : specs) {
      const double base = optimal_feasible_cost(inst.space, b, c, spec, inst.z).cost;
      const double sc = optimal_feasible_cost(scaled.space, b, c, spec, inst.z).cost;
      const double tol = std::holds_alternative<FractionBounds>(spec) ? 1e-7 : 1e-9;
      EXPECT_NEAR(sc, f * base, tol * std::max(1.0, f * base));
    }
  }
}

TEST(CheckFeasibility, Examples) {
  const auto inst = fixtures::line5();
  const auto b = full_weighted_set(inst);
  const auto v = voronoi_cost(inst.space, b, kCenters110, 1);
  EXPECT_TRUE(check_feasibility(v.assignment, b, Unconstrained{}, 2).empty());

  Assignment all_first;
  for (std::size_t x = 0; x < 5; ++x) all_first.entries.push_back({x, 0, 1.0});
  const auto viol = check_feasibility(all_first, b, Balanced{{0, 0}, {4, 5}}, 2);
  ASSERT_EQ(viol.size(), 1u);
  EXPECT_NE(viol[0].find("upper"), std::string::npos);

  // Proportional split: every point split 0.5/0.5 meets alpha = beta = label share.
  const auto lb = labeled_line();
  Assignment half;
  for (std::size_t x = 0; x < 5; ++x) {
    half.entries.push_back({x, 0, 0.5});
    half.entries.push_back({x, 1, 0.5});
  }
  FractionBounds exact{2, 2, {0.6, 0.4, 0.6, 0.4}, {0.6, 0.4, 0.6, 0.4}};
  EXPECT_TRUE(check_feasibility(half, lb, exact, 2).empty());
}

TEST(ConstraintSpec, Validation) {
  EXPECT_THROW(validate_spec(Balanced{{2, 1}, {1, 1}}, 2), ValidationError);
  EXPECT_THROW(validate_spec(Balanced{{0}, {1}}, 2), ValidationError);
  EXPECT_THROW(validate_spec(FractionBounds{2, 1, {0.5, 0.5}, {0.4, 0.6}}, 2), ValidationError);
  EXPECT_NO_THROW(validate_spec(Unconstrained{}, 3));
}

TEST(ConstraintSpec, LDiversityReadings) {
  const auto at_least = FractionBounds::l_diversity(2, 3, 4.0, DiversityReading::at_least);
  EXPECT_DOUBLE_EQ(at_least.lo(1, 2), 0.25);
  EXPECT_DOUBLE_EQ(at_least.hi(1, 2), 1.0);
  const auto at_most = FractionBounds::l_diversity(2, 3, 4.0, DiversityReading::at_most);
  EXPECT_DOUBLE_EQ(at_most.lo(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(at_most.hi(0, 0), 0.25);
}

TEST(ConstraintSpec, Symmetry) {
  EXPECT_TRUE(is_symmetric(Unconstrained{}));
  EXPECT_TRUE(is_symmetric(Balanced{{1, 1}, {3, 3}}));
  EXPECT_FALSE(is_symmetric(Balanced{{4, 1}, {5, 5}}));
  EXPECT_FALSE(is_symmetric(FixedProfile{ClusterProfile::plain({3, 2})}));
}
