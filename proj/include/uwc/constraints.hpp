#pragma once

// Constraint families and the cost functionals over them:
//   assignment_cost        cost of a fixed fractional assignment
//   profile_cost           min cost over assignments consistent with a profile
//   optimal_feasible_cost  min cost over assignments satisfying a constraint
// Profiles and balanced bounds reduce to (bounded) transportation; fraction
// bounds are solved as a dense LP.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "uwc/errors.hpp"
#include "uwc/flowlp.hpp"
#include "uwc/model.hpp"

namespace uwc {

struct Unconstrained {};

struct FixedProfile {
  ClusterProfile profile;
};

/// Per-cluster lower/upper bounds on total assigned weight.
struct Balanced {
  std::vector<double> lower;
  std::vector<double> upper;
};

enum class DiversityReading {
  at_least,  // every label carries at least 1/l of each cluster
  at_most,   // no label carries more than 1/l of any cluster
};

/// Bounds alpha(i,j) <= (weight of label j in cluster i) / (weight of cluster i) <= beta(i,j).
/// Stored cluster-major with m labels.
struct FractionBounds {
  std::size_t k = 0;
  std::size_t m = 0;
  std::vector<double> alpha;
  std::vector<double> beta;

  double lo(std::size_t i, std::size_t j) const { return alpha[i * m + j]; }
  double hi(std::size_t i, std::size_t j) const { return beta[i * m + j]; }

  /// Same (alpha_i, beta_i) for every label of cluster i.
  static FractionBounds per_cluster(std::span<const double> alpha_i, std::span<const double> beta_i, std::size_t m) {
    if (alpha_i.size() != beta_i.size()) throw ValidationError("fraction bounds: alpha/beta length mismatch");
    FractionBounds fb{alpha_i.size(), m, {}, {}};
    for (std::size_t i = 0; i < fb.k; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        fb.alpha.push_back(alpha_i[i]);
        fb.beta.push_back(beta_i[i]);
      }
    return fb;
  }

  static FractionBounds l_diversity(std::size_t k, std::size_t m, double l, DiversityReading reading) {
    if (!(l > 0.0)) throw ValidationError("l-diversity needs l > 0");
    const double frac = std::min(1.0, 1.0 / l);
    FractionBounds fb{k, m, {}, {}};
    fb.alpha.assign(k * m, reading == DiversityReading::at_least ? frac : 0.0);
    fb.beta.assign(k * m, reading == DiversityReading::at_least ? 1.0 : frac);
    return fb;
  }
};

using ConstraintSpec = std::variant<Unconstrained, FixedProfile, Balanced, FractionBounds>;

/// Structural checks that do not depend on the weighted set.
inline void validate_spec(const ConstraintSpec& spec, std::size_t k) {
  if (const auto* fp = std::get_if<FixedProfile>(&spec)) {
    if (fp->profile.k() != k) throw ValidationError("profile length does not match k");
  } else if (const auto* b = std::get_if<Balanced>(&spec)) {
    if (b->lower.size() != k || b->upper.size() != k) throw ValidationError("balanced bounds need k entries each");
    for (std::size_t i = 0; i < k; ++i)
      if (!(b->lower[i] >= 0.0) || !(b->upper[i] >= b->lower[i]))
        throw ValidationError("balanced bounds need 0 <= l_i <= u_i");
  } else if (const auto* f = std::get_if<FractionBounds>(&spec)) {
    if (f->k != k || f->alpha.size() != f->k * f->m || f->beta.size() != f->k * f->m)
      throw ValidationError("fraction bounds have wrong dimensions");
    for (std::size_t t = 0; t < f->alpha.size(); ++t)
      if (!(f->alpha[t] >= 0.0) || !(f->beta[t] >= f->alpha[t]) || !(f->beta[t] <= 1.0))
        throw ValidationError("fraction bounds need 0 <= alpha <= beta <= 1");
  }
}

/// True when permuting cluster indices leaves the constraint unchanged.
inline bool is_symmetric(const ConstraintSpec& spec) {
  if (std::holds_alternative<Unconstrained>(spec)) return true;
  if (const auto* b = std::get_if<Balanced>(&spec)) {
    for (std::size_t i = 1; i < b->lower.size(); ++i)
      if (b->lower[i] != b->lower[0] || b->upper[i] != b->upper[0]) return false;
    return true;
  }
  if (const auto* f = std::get_if<FractionBounds>(&spec)) {
    for (std::size_t i = 1; i < f->k; ++i)
      for (std::size_t j = 0; j < f->m; ++j)
        if (f->lo(i, j) != f->lo(0, j) || f->hi(i, j) != f->hi(0, j)) return false;
    return true;
  }
  return false;
}

/// D(x, c_i)^z for every point of b and center of c.
inline Matrix cost_matrix(const MetricSpace& space, const WeightedSet& b, std::span<const std::size_t> centers, int z) {
  Matrix m(b.size(), centers.size());
  for (std::size_t x = 0; x < b.size(); ++x)
    for (std::size_t i = 0; i < centers.size(); ++i) m(x, i) = space.cost(b.sites[x], centers[i], z);
  return m;
}

/// psi: sum over entries of mass * D(x, c_i)^z.
inline double assignment_cost(const MetricSpace& space, const WeightedSet& b, const Assignment& sigma,
                              std::span<const std::size_t> centers, int z) {
  if (auto err = sigma.conservation_error(b.weights); !err.empty())
    throw ValidationError("assignment does not conserve weights: " + err);
  double acc = 0.0;
  for (const auto& e : sigma.entries) {
    if (e.cluster >= centers.size()) throw ValidationError("assignment references a missing cluster");
    acc += e.mass * space.cost(b.sites[e.point], centers[e.cluster], z);
  }
  return acc;
}

struct CostResult {
  double cost = 0.0;
  Assignment assignment;
  ClusterProfile realized;  // plain cluster totals of the assignment
};

namespace detail {

inline Assignment assignment_from_flow(const Matrix& flow, std::span<const std::size_t> point_ids) {
  Assignment a;
  for (std::size_t r = 0; r < flow.rows(); ++r)
    for (std::size_t c = 0; c < flow.cols(); ++c)
      if (flow(r, c) > 0.0) a.entries.push_back({point_ids.empty() ? r : point_ids[r], c, flow(r, c)});
  return a;
}

inline CostResult finish(Assignment a, double cost, std::size_t k) {
  auto totals = a.cluster_totals(k);
  return {cost, std::move(a), ClusterProfile::plain(std::move(totals))};
}

}  // namespace detail

/// Each point goes wholly to its nearest center; ties to the lowest cluster index.
inline CostResult voronoi_cost(const MetricSpace& space, const WeightedSet& b, std::span<const std::size_t> centers,
                               int z) {
  if (centers.empty()) throw ValidationError("voronoi_cost: no centers");
  Assignment a;
  double cost = 0.0;
  for (std::size_t x = 0; x < b.size(); ++x) {
    std::size_t best = 0;
    double bc = space.cost(b.sites[x], centers[0], z);
    for (std::size_t i = 1; i < centers.size(); ++i) {
      const double c = space.cost(b.sites[x], centers[i], z);
      if (c < bc) {
        bc = c;
        best = i;
      }
    }
    a.entries.push_back({x, best, b.weights[x]});
    cost += b.weights[x] * bc;
  }
  return detail::finish(std::move(a), cost, centers.size());
}

inline ClusterProfile voronoi_profile(const MetricSpace& space, const WeightedSet& b,
                                      std::span<const std::size_t> centers, int z) {
  return voronoi_cost(space, b, centers, z).realized;
}

/// cost_z(B, C, Gamma) for a plain profile.
inline CostResult profile_cost(const MetricSpace& space, const WeightedSet& b, std::span<const std::size_t> centers,
                               const ClusterProfile& gamma, int z) {
  if (gamma.is_labeled()) throw ValidationError("profile_cost expects a plain profile; use labeled_profile_cost");
  if (gamma.k() != centers.size()) throw ValidationError("profile length does not match the number of centers");
  if (auto err = gamma.consistency_error(b); !err.empty()) throw ValidationError("inconsistent profile: " + err);
  TransportationProblem p{cost_matrix(space, b, centers, z), b.weights,
                          std::vector<double>(gamma.values().begin(), gamma.values().end())};
  auto sol = solve_transportation(p);
  return detail::finish(detail::assignment_from_flow(sol.flow, {}), sol.objective, centers.size());
}

/// Sum over labels of independent transportation solves between X_j and C.
inline CostResult labeled_profile_cost(const MetricSpace& space, const WeightedSet& b,
                                       std::span<const std::size_t> centers, const ClusterProfile& gamma, int z) {
  if (!gamma.is_labeled()) return profile_cost(space, b, centers, gamma, z);
  if (gamma.k() != centers.size()) throw ValidationError("profile length does not match the number of centers");
  if (auto err = gamma.consistency_error(b); !err.empty()) throw ValidationError("inconsistent profile: " + err);
  const std::size_t m = gamma.label_count();
  Assignment all;
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<std::size_t> ids;
    WeightedSet part;
    for (std::size_t x = 0; x < b.size(); ++x)
      if ((b.labeled() ? b.labels[x] : 0) == j) {
        ids.push_back(x);
        part.sites.push_back(b.sites[x]);
        part.weights.push_back(b.weights[x]);
      }
    if (ids.empty()) continue;
    TransportationProblem p{cost_matrix(space, part, centers, z), part.weights, gamma.label_column(j)};
    auto sol = solve_transportation(p);
    auto a = detail::assignment_from_flow(sol.flow, ids);
    all.entries.insert(all.entries.end(), a.entries.begin(), a.entries.end());
    total += sol.objective;
  }
  return detail::finish(std::move(all), total, centers.size());
}

/// Fraction-bounded assignment as an LP over sigma(x, i).
inline CostResult fraction_bounded_cost(const MetricSpace& space, const WeightedSet& b,
                                        std::span<const std::size_t> centers, const FractionBounds& fb, int z) {
  if (!b.labeled()) throw ValidationError("fraction bounds require a labeled point set");
  const std::size_t n = b.size(), k = centers.size();
  if (fb.k != k) throw ValidationError("fraction bounds do not match the number of centers");
  if (b.label_count() > fb.m) throw ValidationError("point labels exceed the fraction-bound label count");
  const Matrix cost = cost_matrix(space, b, centers, z);

  LinearProgram lp;
  lp.objective.assign(n * k, 0.0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t i = 0; i < k; ++i) lp.objective[x * k + i] = cost(x, i);
  lp.eq = Matrix(n, n * k, 0.0);
  lp.eq_rhs = b.weights;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t i = 0; i < k; ++i) lp.eq(x, x * k + i) = 1.0;

  // alpha * sum_x sigma(x,i) - sum_{x in X_j} sigma(x,i) <= 0
  // sum_{x in X_j} sigma(x,i) - beta * sum_x sigma(x,i) <= 0
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < fb.m; ++j) {
      if (fb.lo(i, j) > 0.0) {
        std::vector<double> r(n * k, 0.0);
        for (std::size_t x = 0; x < n; ++x) r[x * k + i] = fb.lo(i, j) - (b.labels[x] == j ? 1.0 : 0.0);
        rows.push_back(std::move(r));
      }
      if (fb.hi(i, j) < 1.0) {
        std::vector<double> r(n * k, 0.0);
        for (std::size_t x = 0; x < n; ++x) r[x * k + i] = (b.labels[x] == j ? 1.0 : 0.0) - fb.hi(i, j);
        rows.push_back(std::move(r));
      }
    }
  lp.le = Matrix(rows.size(), n * k, 0.0);
  lp.le_rhs.assign(rows.size(), 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < n * k; ++c) lp.le(r, c) = rows[r][c];

  const auto sol = solve_lp(lp);
  // Clean sub-tolerance noise and restore exact per-point conservation.
  Assignment a;
  double total = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += std::max(0.0, sol.x[x * k + i]);
    for (std::size_t i = 0; i < k; ++i) {
      const double v = std::max(0.0, sol.x[x * k + i]);
      if (v <= 0.0) continue;
      const double mass = s > 0.0 ? v * b.weights[x] / s : 0.0;
      a.entries.push_back({x, i, mass});
      total += mass * cost(x, i);
    }
  }
  return detail::finish(std::move(a), total, k);
}

/// Psi(B, C): minimum cost over assignments satisfying the constraint.
inline CostResult optimal_feasible_cost(const MetricSpace& space, const WeightedSet& b,
                                        std::span<const std::size_t> centers, const ConstraintSpec& spec, int z) {
  validate_spec(spec, centers.size());
  return std::visit(
      [&](const auto& s) -> CostResult {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Unconstrained>) {
          return voronoi_cost(space, b, centers, z);
        } else if constexpr (std::is_same_v<T, FixedProfile>) {
          return labeled_profile_cost(space, b, centers, s.profile, z);
        } else if constexpr (std::is_same_v<T, Balanced>) {
          BoundedTransportationProblem p{cost_matrix(space, b, centers, z), b.weights, s.lower, s.upper};
          auto sol = solve_bounded_transportation(p);
          return detail::finish(detail::assignment_from_flow(sol.flow, {}), sol.objective, centers.size());
        } else {
          return fraction_bounded_cost(space, b, centers, s, z);
        }
      },
      spec);
}

/// Violations of the constraint by sigma, at 1e-7 absolute per constraint.
inline std::vector<std::string> check_feasibility(const Assignment& sigma, const WeightedSet& b,
                                                  const ConstraintSpec& spec, std::size_t k) {
  constexpr double tol = 1e-7;
  std::vector<std::string> out;
  for (const auto& e : sigma.entries) {
    if (e.point >= b.size() || e.cluster >= k) {
      out.push_back("assignment entry out of range");
      return out;
    }
    if (e.mass < -tol) out.push_back("negative mass on point " + std::to_string(e.point));
  }
  const auto per_point = sigma.point_totals(b.size());
  for (std::size_t x = 0; x < b.size(); ++x)
    if (std::abs(per_point[x] - b.weights[x]) > tol)
      out.push_back("point " + std::to_string(x) + " mass " + std::to_string(per_point[x]) + " != weight " +
                    std::to_string(b.weights[x]));
  const auto totals = sigma.cluster_totals(k);

  if (const auto* fp = std::get_if<FixedProfile>(&spec)) {
    const auto& g = fp->profile;
    if (!g.is_labeled()) {
      for (std::size_t i = 0; i < k; ++i)
        if (std::abs(totals[i] - g[i]) > tol)
          out.push_back("cluster " + std::to_string(i) + " total " + std::to_string(totals[i]) + " != profile " +
                        std::to_string(g[i]));
    } else {
      std::vector<double> t(k * g.label_count(), 0.0);
      for (const auto& e : sigma.entries) t[e.cluster * g.label_count() + (b.labeled() ? b.labels[e.point] : 0)] += e.mass;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < g.label_count(); ++j)
          if (std::abs(t[i * g.label_count() + j] - g.at(i, j)) > tol)
            out.push_back("cluster " + std::to_string(i) + " label " + std::to_string(j) + " total differs from profile");
    }
  } else if (const auto* bal = std::get_if<Balanced>(&spec)) {
    for (std::size_t i = 0; i < k; ++i) {
      if (totals[i] < bal->lower[i] - tol)
        out.push_back("cluster " + std::to_string(i) + " total " + std::to_string(totals[i]) + " below lower bound " +
                      std::to_string(bal->lower[i]));
      if (totals[i] > bal->upper[i] + tol)
        out.push_back("cluster " + std::to_string(i) + " total " + std::to_string(totals[i]) + " above upper bound " +
                      std::to_string(bal->upper[i]));
    }
  } else if (const auto* fb = std::get_if<FractionBounds>(&spec)) {
    if (!b.labeled()) {
      out.push_back("fraction bounds require labels");
      return out;
    }
    std::vector<double> t(k * fb->m, 0.0);
    for (const auto& e : sigma.entries) t[e.cluster * fb->m + b.labels[e.point]] += e.mass;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < fb->m; ++j) {
        const double part = t[i * fb->m + j];
        if (part < fb->lo(i, j) * totals[i] - tol)
          out.push_back("cluster " + std::to_string(i) + " label " + std::to_string(j) + " below fraction " +
                        std::to_string(fb->lo(i, j)));
        if (part > fb->hi(i, j) * totals[i] + tol)
          out.push_back("cluster " + std::to_string(i) + " label " + std::to_string(j) + " above fraction " +
                        std::to_string(fb->hi(i, j)));
      }
  }
  return out;
}

}  // namespace uwc
