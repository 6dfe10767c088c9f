#pragma once

// Weighted summary S and its composition with J into a universal weak coreset.
//
// S is built by stratified sampling: points are clustered around a D^z seed,
// each cluster is split into geometric cost rings around its center, and
// every ring is either kept whole (when small) or replaced by s i.i.d.
// weight-proportional draws carrying w(R)/s each. Ring weight, and therefore
// total weight, is conserved.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uwc/candidates.hpp"
#include "uwc/errors.hpp"
#include "uwc/model.hpp"
#include "uwc/random.hpp"

namespace uwc {

struct Ring {
  std::vector<std::size_t> members;  // point positions in the instance
  double low = 0.0;                  // band in cost units D^z; the inner ring is [0, high]
  double high = 0.0;                 // rings j >= 1 are (low, high]
  double weight = 0.0;
};

struct RingDecomposition {
  std::vector<std::size_t> centers;            // seed center site per cluster
  std::vector<double> average_cost;            // Delta_i = cost / weight
  std::vector<std::vector<Ring>> rings;        // per cluster, inner ring first

  std::size_t ring_count() const {
    std::size_t n = 0;
    for (const auto& r : rings) n += r.size();
    return n;
  }
};

/// Splits a subset of points into per-cluster cost rings around `centers`.
/// Rings beyond `ring_budget` in a cluster are merged into the last kept ring.
inline RingDecomposition ring_decomposition_subset(const ClusteringInstance& inst, std::span<const std::size_t> subset,
                                                   std::span<const std::size_t> centers, int z,
                                                   std::size_t ring_budget = 32) {
  if (centers.empty()) throw ValidationError("ring decomposition needs at least one center");
  ring_budget = std::max<std::size_t>(ring_budget, 2);
  RingDecomposition rd;
  rd.centers.assign(centers.begin(), centers.end());
  const std::size_t k = centers.size();
  std::vector<std::vector<std::size_t>> members(k);
  std::vector<std::vector<double>> costs(k);
  for (std::size_t pos : subset) {
    const std::size_t site = inst.points[pos];
    std::size_t best = 0;
    double bc = inst.space.cost(site, centers[0], z);
    for (std::size_t i = 1; i < k; ++i) {
      const double c = inst.space.cost(site, centers[i], z);
      if (c < bc) {
        bc = c;
        best = i;
      }
    }
    members[best].push_back(pos);
    costs[best].push_back(bc);
  }
  rd.average_cost.assign(k, 0.0);
  rd.rings.assign(k, {});
  for (std::size_t i = 0; i < k; ++i) {
    if (members[i].empty()) continue;
    double w = 0.0, c = 0.0;
    for (std::size_t t = 0; t < members[i].size(); ++t) {
      w += inst.weights[members[i][t]];
      c += inst.weights[members[i][t]] * costs[i][t];
    }
    const double delta = c / w;
    rd.average_cost[i] = delta;
    if (!(delta > 0.0)) {
      Ring r{members[i], 0.0, 0.0, w};
      rd.rings[i].push_back(std::move(r));
      continue;
    }
    // ring 0: cost <= delta; ring j >= 1: 2^{j-1} delta < cost <= 2^j delta.
    std::map<std::size_t, Ring> by_index;
    for (std::size_t t = 0; t < members[i].size(); ++t) {
      std::size_t j = 0;
      if (costs[i][t] > delta) {
        j = static_cast<std::size_t>(std::max(1.0, std::ceil(std::log2(costs[i][t] / delta))));
        // Guard the band edges against log2 rounding.
        while (j > 1 && costs[i][t] <= std::ldexp(delta, static_cast<int>(j) - 1)) --j;
        while (costs[i][t] > std::ldexp(delta, static_cast<int>(j))) ++j;
      }
      auto& r = by_index[j];
      r.members.push_back(members[i][t]);
      r.weight += inst.weights[members[i][t]];
      r.low = j == 0 ? 0.0 : std::ldexp(delta, static_cast<int>(j) - 1);
      r.high = std::ldexp(delta, static_cast<int>(j));
    }
    for (auto& [j, r] : by_index) {
      if (rd.rings[i].size() < ring_budget) {
        rd.rings[i].push_back(std::move(r));
      } else {
        auto& last = rd.rings[i].back();
        last.members.insert(last.members.end(), r.members.begin(), r.members.end());
        last.weight += r.weight;
        last.high = r.high;
      }
    }
  }
  return rd;
}

inline RingDecomposition ring_decomposition(const ClusteringInstance& inst, std::span<const std::size_t> centers,
                                            int z, std::size_t ring_budget = 32) {
  const auto all = detail::all_positions(inst);
  return ring_decomposition_subset(inst, all, centers, z, ring_budget);
}

struct SummaryParams {
  double c0 = 4.0;
  double delta = 0.05;
  std::uint64_t seed = 2;
  std::optional<std::size_t> samples_per_ring;  // overrides the formula
  std::optional<std::size_t> candidate_bound;   // |J| used in the sample-size formula; default |J|
  std::size_t ring_budget = 32;                 // per cluster; R = k * ring_budget
};

/// ceil(c0 * eps^{-2z} * (k ln|J| + ln(R / delta))), with R = k * ring_budget.
inline std::size_t samples_per_ring(const SummaryParams& p, std::size_t k, double eps, int z, std::size_t j_size) {
  if (p.samples_per_ring) return std::max<std::size_t>(1, *p.samples_per_ring);
  if (!(eps > 0.0)) throw ValidationError("epsilon must be positive");
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  const double j = static_cast<double>(std::max<std::size_t>(j_size, 2));
  const double rings = static_cast<double>(k * std::max<std::size_t>(p.ring_budget, 2));
  const double s = p.c0 * std::pow(eps, -2.0 * z) * (static_cast<double>(k) * std::log(j) + std::log(rings / p.delta));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(s)));
}

struct Summary {
  std::vector<std::size_t> points;  // positions in the instance, ascending
  std::vector<double> weights;
  std::size_t samples_per_ring = 0;
  std::size_t rings = 0;
};

namespace detail {

inline void sample_rings(const ClusteringInstance& inst, const RingDecomposition& rd, std::size_t s,
                         std::uint64_t seed, std::map<std::size_t, double>& out) {
  for (std::size_t i = 0; i < rd.rings.size(); ++i)
    for (std::size_t r = 0; r < rd.rings[i].size(); ++r) {
      const Ring& ring = rd.rings[i][r];
      // Members are distinct positions, so this is the distinct-point count.
      if (ring.members.size() <= s) {
        for (std::size_t pos : ring.members) out[pos] += inst.weights[pos];
        continue;
      }
      Rng rng(derive_seed(seed, {i, r}));
      std::vector<double> w(ring.members.size());
      for (std::size_t t = 0; t < w.size(); ++t) w[t] = inst.weights[ring.members[t]];
      const DiscreteSampler sampler(w);
      std::map<std::size_t, std::size_t> counts;
      for (std::size_t d = 0; d < s; ++d) ++counts[ring.members[sampler(rng)]];
      for (const auto& [pos, c] : counts)
        out[pos] += ring.weight * static_cast<double>(c) / static_cast<double>(s);
    }
}

inline Summary summary_over(const ClusteringInstance& inst, std::span<const std::size_t> subset, std::size_t j_size,
                            double eps, const SummaryParams& params, std::uint64_t seed,
                            std::map<std::size_t, double>& acc) {
  const std::size_t s = samples_per_ring(params, inst.k, eps, inst.z, params.candidate_bound.value_or(j_size));
  const std::size_t t = std::min(inst.k, inst.facilities.size());
  const auto centers = dz_seed_subset(inst, subset, t, inst.z, derive_seed(seed, {0xa11}));
  const auto rd = ring_decomposition_subset(inst, subset, centers, inst.z, params.ring_budget);
  sample_rings(inst, rd, s, derive_seed(seed, {0x5a3}), acc);
  Summary out;
  out.samples_per_ring = s;
  out.rings = rd.ring_count();
  return out;
}

inline void flatten(const std::map<std::size_t, double>& acc, Summary& out) {
  for (const auto& [pos, w] : acc) {
    out.points.push_back(pos);
    out.weights.push_back(w);
  }
}

}  // namespace detail

/// (S, v) for the whole point set.
inline Summary build_summary(const ClusteringInstance& inst, std::span<const std::size_t> candidates, double eps,
                             const SummaryParams& params) {
  if (candidates.empty()) throw ValidationError("build_summary needs a nonempty candidate set");
  std::map<std::size_t, double> acc;
  const auto all = detail::all_positions(inst);
  auto out = detail::summary_over(inst, all, candidates.size(), eps, params, params.seed, acc);
  detail::flatten(acc, out);
  return out;
}

/// Independent summaries of every label class, unioned. Per-label weight is conserved.
inline Summary build_summary_labeled(const ClusteringInstance& inst, std::span<const std::size_t> candidates,
                                     double eps, const SummaryParams& params) {
  if (!inst.labels) throw ValidationError("build_summary_labeled needs a labeled instance");
  if (candidates.empty()) throw ValidationError("build_summary_labeled needs a nonempty candidate set");
  const std::size_t m = inst.label_count();
  if (m == 1) return build_summary(inst, candidates, eps, params);
  std::map<std::size_t, double> acc;
  Summary out;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<std::size_t> subset;
    for (std::size_t x = 0; x < inst.size(); ++x)
      if ((*inst.labels)[x] == j) subset.push_back(x);
    if (subset.empty()) continue;
    auto part = detail::summary_over(inst, subset, candidates.size(), eps, params,
                                     derive_seed(params.seed, {0x1abe1, j}), acc);
    out.samples_per_ring = part.samples_per_ring;
    out.rings += part.rings;
  }
  detail::flatten(acc, out);
  return out;
}

enum class CoresetMode { metric, euclidean_kmeans };

inline const char* to_string(CoresetMode m) { return m == CoresetMode::metric ? "metric" : "euclidean_kmeans"; }

struct CoresetMetadata {
  double alpha = 0.0;
  int z = 1;
  double epsilon = 0.0;
  double delta = 0.0;
  CoresetMode mode = CoresetMode::metric;
  std::uint64_t candidate_seed = 0;
  std::uint64_t summary_seed = 0;
  std::size_t eta = 0;
  double mix = 0.5;
  double c0 = 4.0;
  std::size_t samples_per_ring = 0;
  std::size_t ring_budget = 32;
  std::size_t candidate_bound = 0;
  std::size_t rings = 0;
};

/// (J, S, v). J is a list of facility sites (metric mode) or synthetic
/// coordinates (euclidean_kmeans mode); S lists point positions.
struct WeakCoreset {
  std::vector<std::size_t> centers;
  std::vector<std::vector<double>> synthetic_centers;
  std::vector<std::size_t> summary_points;
  std::vector<double> summary_weights;
  CoresetMetadata meta;

  std::size_t candidate_count() const { return synthetic_centers.empty() ? centers.size() : synthetic_centers.size(); }
  std::size_t size() const { return candidate_count() + summary_points.size(); }
};

/// Approximation factor of J: 3^z in general metrics, 2^z when every point
/// is a facility, 1 for Euclidean k-means candidates.
inline double coreset_alpha(const ClusteringInstance& inst, CoresetMode mode) {
  if (mode == CoresetMode::euclidean_kmeans) return 1.0;
  const bool inside = inst.points_within_facilities();
  if (inst.z == 1) return inside ? 2.0 : 3.0;
  return inside ? 4.0 : 9.0;
}

struct CoresetSeeds {
  std::uint64_t candidates = 1;
  std::uint64_t summary = 2;
};

inline WeakCoreset build_universal_weak_coreset(const ClusteringInstance& inst, double eps, double delta,
                                                CoresetMode mode, const CoresetSeeds& seeds,
                                                CandidateParams cparams = {}, SummaryParams sparams = {}) {
  if (auto v = validate_instance(inst); !v.empty()) throw ValidationError("invalid instance: " + v.front().message);
  if (mode == CoresetMode::euclidean_kmeans && (inst.space.kind() != MetricKind::euclidean || inst.z != 2))
    throw ValidationError("euclidean_kmeans mode needs a euclidean metric and z = 2");
  cparams.seed = seeds.candidates;
  sparams.seed = seeds.summary;
  sparams.delta = delta;

  WeakCoreset cs;
  std::size_t bound = 0;
  if (mode == CoresetMode::metric) {
    cs.centers = build_candidates_metric(inst, eps, cparams);
    bound = resolved_eta(cparams, inst.k, eps) + inst.k;
  } else {
    cs.synthetic_centers = build_candidates_euclidean_means(inst, eps, cparams);
    bound = cparams.euclidean_max_candidates;
  }
  if (!sparams.candidate_bound) sparams.candidate_bound = bound;
  // The summary formula only needs |J|; pass a placeholder list of that size.
  std::vector<std::size_t> j_ids(cs.candidate_count());
  const Summary s = inst.labeled() && inst.label_count() > 1 ? build_summary_labeled(inst, j_ids, eps, sparams)
                                                              : build_summary(inst, j_ids, eps, sparams);
  cs.summary_points = s.points;
  cs.summary_weights = s.weights;

  auto& m = cs.meta;
  m.alpha = coreset_alpha(inst, mode);
  m.z = inst.z;
  m.epsilon = eps;
  m.delta = delta;
  m.mode = mode;
  m.candidate_seed = seeds.candidates;
  m.summary_seed = seeds.summary;
  m.eta = resolved_eta(cparams, inst.k, eps);
  m.mix = cparams.mix;
  m.c0 = sparams.c0;
  m.samples_per_ring = s.samples_per_ring;
  m.ring_budget = sparams.ring_budget;
  m.candidate_bound = *sparams.candidate_bound;
  m.rings = s.rings;
  return cs;
}

/// Metric space, candidate sites and weighted summary ready for solving.
/// Synthetic centers are appended to the space as new sites.
struct ResolvedCoreset {
  MetricSpace space;
  std::vector<std::size_t> candidates;
  WeightedSet summary;
};

inline ResolvedCoreset resolve_coreset(const ClusteringInstance& inst, const WeakCoreset& cs) {
  ResolvedCoreset r;
  if (cs.synthetic_centers.empty()) {
    r.space = inst.space;
    r.candidates = cs.centers;
    for (std::size_t c : r.candidates)
      if (c >= inst.space.size()) throw ValidationError("coreset candidate site out of range");
  } else {
    r.space = inst.space.with_appended_sites(cs.synthetic_centers);
    for (std::size_t t = 0; t < cs.synthetic_centers.size(); ++t) r.candidates.push_back(inst.space.size() + t);
  }
  r.summary = weighted_subset(inst, cs.summary_points, cs.summary_weights);
  return r;
}

}  // namespace uwc
