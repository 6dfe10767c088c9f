#pragma once

// Candidate-center set J. Metric mode draws a D^z seed of k facilities, then
// eta points from a mixture of weight-proportional and D^z-proportional
// sampling, and keeps the nearest facility of each draw. Euclidean k-means
// mode replaces facilities by means of small multisets of sampled points.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "uwc/errors.hpp"
#include "uwc/model.hpp"
#include "uwc/random.hpp"

namespace uwc {

struct CandidateParams {
  std::optional<std::size_t> eta;  // default: ceil((k/eps)^2 * ln(2 + k/eps))
  double mix = 0.5;                // probability that a draw is weight-proportional
  std::uint64_t seed = 1;
  std::optional<std::size_t> euclidean_subset_size;  // default: ceil(2/eps)
  std::optional<std::size_t> euclidean_base_size;    // default: ceil(4k/eps)
  std::size_t euclidean_max_candidates = 4096;
};

inline std::size_t default_eta(std::size_t k, double eps) {
  const double r = static_cast<double>(k) / eps;
  return static_cast<std::size_t>(std::ceil(r * r * std::log(2.0 + r)));
}

inline std::size_t resolved_eta(const CandidateParams& p, std::size_t k, double eps) {
  return std::max(p.eta.value_or(default_eta(k, eps)), k);
}

inline std::size_t resolved_subset_size(const CandidateParams& p, double eps) {
  return std::max<std::size_t>(1, p.euclidean_subset_size.value_or(static_cast<std::size_t>(std::ceil(2.0 / eps))));
}

inline std::size_t resolved_base_size(const CandidateParams& p, std::size_t k, double eps) {
  return std::max<std::size_t>(
      1, p.euclidean_base_size.value_or(static_cast<std::size_t>(std::ceil(4.0 * static_cast<double>(k) / eps))));
}

namespace detail {

inline void check_candidate_params(const CandidateParams& p, double eps) {
  if (!(eps > 0.0)) throw ValidationError("epsilon must be positive");
  if (!(p.mix >= 0.0 && p.mix <= 1.0)) throw ValidationError("mix must lie in [0, 1]");
}

/// min_c D(x, c)^z over the given centers for every point of the subset.
inline std::vector<double> dz_mass(const ClusteringInstance& inst, std::span<const std::size_t> subset,
                                   std::span<const std::size_t> centers, int z) {
  std::vector<double> mass(subset.size());
  for (std::size_t t = 0; t < subset.size(); ++t) {
    const std::size_t site = inst.points[subset[t]];
    double best = kInf;
    for (std::size_t c : centers) best = std::min(best, inst.space.cost(site, c, z));
    mass[t] = inst.weights[subset[t]] * best;
  }
  return mass;
}

inline std::vector<std::size_t> all_positions(const ClusteringInstance& inst) {
  std::vector<std::size_t> v(inst.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
  return v;
}

}  // namespace detail

/// Adaptive D^z seeding of t distinct facilities over a subset of point
/// positions. Draws that map onto an already chosen facility are redrawn up
/// to 100 times; after that the unchosen facility farthest from the chosen
/// set is taken.
inline std::vector<std::size_t> dz_seed_subset(const ClusteringInstance& inst, std::span<const std::size_t> subset,
                                               std::size_t t, int z, std::uint64_t seed) {
  if (t > inst.facilities.size())
    throw ValidationError("dz_seed: requested " + std::to_string(t) + " centers from " +
                          std::to_string(inst.facilities.size()) + " facilities");
  if (subset.empty() && t > 0) throw ValidationError("dz_seed: empty point set");
  Rng rng(seed);
  std::vector<std::size_t> chosen;
  std::vector<double> base(subset.size());
  for (std::size_t i = 0; i < subset.size(); ++i) base[i] = inst.weights[subset[i]];
  const DiscreteSampler uniform(base);

  std::vector<double> mass;  // running min D^z times weight
  while (chosen.size() < t) {
    const bool first = chosen.empty();
    std::optional<DiscreteSampler> adaptive;
    if (!first) {
      double total = 0.0;
      for (double v : mass) total += v;
      if (total > 0.0) adaptive.emplace(mass);
    }
    std::optional<std::size_t> pick;
    for (int attempt = 0; attempt <= 100 && !pick; ++attempt) {
      const std::size_t draw = adaptive ? (*adaptive)(rng) : uniform(rng);
      const std::size_t f = nearest_facility(inst.space, inst.points[subset[draw]], inst.facilities).facility;
      if (std::find(chosen.begin(), chosen.end(), f) == chosen.end()) pick = f;
    }
    if (!pick) {
      double far = -1.0;
      for (std::size_t f : inst.facilities) {
        if (std::find(chosen.begin(), chosen.end(), f) != chosen.end()) continue;
        double d = kInf;
        for (std::size_t c : chosen) d = std::min(d, inst.space.distance(f, c));
        if (d > far || (d == far && f < *pick)) {
          far = d;
          pick = f;
        }
      }
    }
    chosen.push_back(*pick);
    const std::size_t c = *pick;
    if (first) {
      mass = detail::dz_mass(inst, subset, chosen, z);
    } else {
      for (std::size_t i = 0; i < subset.size(); ++i)
        mass[i] = std::min(mass[i], inst.weights[subset[i]] * inst.space.cost(inst.points[subset[i]], c, z));
    }
  }
  return chosen;
}

inline std::vector<std::size_t> dz_seed(const ClusteringInstance& inst, std::size_t t, int z, std::uint64_t seed) {
  const auto all = detail::all_positions(inst);
  return dz_seed_subset(inst, all, t, z, seed);
}

namespace detail {

/// eta point positions from the weight / D^z mixture around seed centers.
inline std::vector<std::size_t> mixed_draws(const ClusteringInstance& inst, std::span<const std::size_t> seed_centers,
                                            std::size_t count, double mix, Rng& rng) {
  const auto all = all_positions(inst);
  const DiscreteSampler uniform(inst.weights);
  const auto mass = dz_mass(inst, all, seed_centers, inst.z);
  const DiscreteSampler adaptive(mass);
  const bool has_mass = adaptive.total() > 0.0;
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const bool use_uniform = rng.uniform() < mix || !has_mass;
    out.push_back(use_uniform ? uniform(rng) : adaptive(rng));
  }
  return out;
}

}  // namespace detail

/// J as a sorted, deduplicated list of facility sites.
inline std::vector<std::size_t> build_candidates_metric(const ClusteringInstance& inst, double eps,
                                                        const CandidateParams& params) {
  detail::check_candidate_params(params, eps);
  const std::size_t eta = resolved_eta(params, inst.k, eps);
  const auto seed_centers = dz_seed(inst, inst.k, inst.z, derive_seed(params.seed, {0x5eed}));
  Rng rng(derive_seed(params.seed, {0xd4a5}));
  std::vector<std::size_t> j(seed_centers.begin(), seed_centers.end());
  for (std::size_t pos : detail::mixed_draws(inst, seed_centers, eta, params.mix, rng))
    j.push_back(nearest_facility(inst.space, inst.points[pos], inst.facilities).facility);
  std::sort(j.begin(), j.end());
  j.erase(std::unique(j.begin(), j.end()), j.end());
  return j;
}

/// Means of every size-s multiset of `base` (combinations with repetition),
/// deduplicated and in first-seen order. When the count would exceed
/// max_candidates, the base points themselves are kept and the rest is filled
/// with means of uniformly random multisets.
inline std::vector<std::vector<double>> multiset_means(std::span<const std::vector<double>> base_points,
                                                       std::size_t s, std::size_t max_candidates, Rng& rng) {
  std::vector<std::vector<double>> out;
  if (base_points.empty() || s == 0) return out;
  // Repeated base points generate no new means.
  std::vector<std::vector<double>> base;
  {
    std::map<std::vector<double>, char> uniq;
    for (const auto& p : base_points)
      if (uniq.emplace(p, 0).second) base.push_back(p);
  }
  const std::size_t dim = base[0].size();
  std::map<std::vector<double>, char> seen;
  const auto emit = [&](std::span<const std::size_t> idx) {
    std::vector<double> mean(dim, 0.0);
    for (std::size_t i : idx)
      for (std::size_t d = 0; d < dim; ++d) mean[d] += base[i][d];
    for (auto& v : mean) v /= static_cast<double>(idx.size());
    if (seen.emplace(mean, 0).second) out.push_back(std::move(mean));
  };

  // C(b + s - 1, s), saturating.
  const std::size_t b = base.size();
  double count = 1.0;
  for (std::size_t i = 1; i <= s; ++i) count = count * static_cast<double>(b - 1 + i) / static_cast<double>(i);

  if (count <= static_cast<double>(max_candidates)) {
    std::vector<std::size_t> idx(s, 0);
    for (;;) {
      emit(idx);
      std::size_t pos = s;
      while (pos > 0 && idx[pos - 1] == b - 1) --pos;
      if (pos == 0) break;
      const std::size_t v = idx[pos - 1] + 1;
      for (std::size_t q = pos - 1; q < s; ++q) idx[q] = v;
    }
    return out;
  }
  for (std::size_t i = 0; i < b && out.size() < max_candidates; ++i) {
    std::vector<std::size_t> idx(s, i);
    emit(idx);
  }
  const std::size_t attempts = 4 * max_candidates;
  for (std::size_t a = 0; a < attempts && out.size() < max_candidates; ++a) {
    std::vector<std::size_t> idx(s);
    for (auto& i : idx) i = rng.index(b);
    std::sort(idx.begin(), idx.end());
    emit(idx);
  }
  return out;
}

/// Synthetic Euclidean centers for k-means: means of multisets drawn from a
/// sampled base set. Returns coordinates; callers append them as sites.
inline std::vector<std::vector<double>> build_candidates_euclidean_means(const ClusteringInstance& inst, double eps,
                                                                         const CandidateParams& params) {
  detail::check_candidate_params(params, eps);
  if (inst.space.kind() != MetricKind::euclidean) throw ValidationError("euclidean candidates need a euclidean metric");
  if (inst.z != 2) throw ValidationError("euclidean candidates are defined for k-means (z = 2) only");
  const std::size_t base_size = resolved_base_size(params, inst.k, eps);
  const std::size_t s = resolved_subset_size(params, eps);
  const auto seed_centers = dz_seed(inst, inst.k, inst.z, derive_seed(params.seed, {0x5eed}));
  Rng rng(derive_seed(params.seed, {0xe0c1}));
  std::vector<std::vector<double>> base;
  for (std::size_t pos : detail::mixed_draws(inst, seed_centers, base_size, params.mix, rng)) {
    auto c = inst.space.coords(inst.points[pos]);
    base.emplace_back(c.begin(), c.end());
  }
  return multiset_means(base, s, params.euclidean_max_candidates, rng);
}

}  // namespace uwc
