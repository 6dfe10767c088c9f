#pragma once

// Enumerate center tuples from J, score each by the optimal feasible
// assignment cost on the weighted summary, keep the cheapest, then re-solve
// the assignment on the full instance.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "uwc/constraints.hpp"
#include "uwc/coreset.hpp"
#include "uwc/errors.hpp"
#include "uwc/model.hpp"

namespace uwc {

struct EnumerationMode {
  bool ordered = false;
  bool allow_repeats = false;
};

/// Number of tuples the mode emits, saturating at SIZE_MAX.
inline std::size_t tuple_count(std::size_t n, std::size_t k, EnumerationMode mode) {
  constexpr double cap = static_cast<double>(std::numeric_limits<std::size_t>::max());
  double c = 1.0;
  if (mode.allow_repeats) {
    if (mode.ordered) {
      for (std::size_t i = 0; i < k; ++i) c *= static_cast<double>(n);
    } else {
      for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n + i - 1) / static_cast<double>(i);
    }
  } else {
    if (k > n) return 0;
    if (mode.ordered) {
      for (std::size_t i = 0; i < k; ++i) c *= static_cast<double>(n - i);
    } else {
      for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    }
  }
  return c >= cap ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(std::llround(c));
}

/// Visits index tuples into [0, n) in lexicographic order. The visitor
/// returns false to stop early.
inline void for_each_index_tuple(std::size_t n, std::size_t k, EnumerationMode mode,
                                 const std::function<bool(std::span<const std::size_t>)>& visit) {
  if (k == 0 || n == 0) return;
  if (!mode.allow_repeats && k > n) return;
  std::vector<std::size_t> idx(k);
  std::vector<char> used(n, 0);

  // Smallest admissible value at position p given the prefix.
  const auto first_at = [&](std::size_t p) -> std::size_t {
    if (!mode.ordered) return p == 0 ? 0 : (mode.allow_repeats ? idx[p - 1] : idx[p - 1] + 1);
    if (mode.allow_repeats) return 0;
    std::size_t v = 0;
    while (v < n && used[v]) ++v;
    return v;
  };
  const auto next_at = [&](std::size_t v) -> std::size_t {
    ++v;
    if (mode.ordered && !mode.allow_repeats)
      while (v < n && used[v]) ++v;
    return v;
  };
  // Largest value at position p that can still be completed (unordered distinct).
  const auto limit_at = [&](std::size_t p) -> std::size_t {
    if (!mode.ordered && !mode.allow_repeats) return n - (k - p);
    return n - 1;
  };

  std::size_t p = 0;
  idx[0] = first_at(0);
  for (;;) {
    if (idx[p] <= limit_at(p) && idx[p] < n) {
      if (p + 1 == k) {
        if (!visit(idx)) return;
        idx[p] = next_at(idx[p]);
        continue;
      }
      if (mode.ordered && !mode.allow_repeats) used[idx[p]] = 1;
      ++p;
      idx[p] = first_at(p);
      continue;
    }
    if (p == 0) return;
    --p;
    if (mode.ordered && !mode.allow_repeats) used[idx[p]] = 0;
    idx[p] = next_at(idx[p]);
  }
}

/// All tuples of elements of J (in J's order) for the given mode.
inline std::vector<std::vector<std::size_t>> enumerate_center_tuples(std::span<const std::size_t> j, std::size_t k,
                                                                     EnumerationMode mode) {
  if (!mode.allow_repeats && k > j.size())
    throw ValidationError("cannot choose " + std::to_string(k) + " distinct centers from " + std::to_string(j.size()));
  std::vector<std::vector<std::size_t>> out;
  for_each_index_tuple(j.size(), k, mode, [&](std::span<const std::size_t> idx) {
    std::vector<std::size_t> t;
    for (std::size_t i : idx) t.push_back(j[i]);
    out.push_back(std::move(t));
    return true;
  });
  return out;
}

struct SolveOptions {
  std::optional<bool> ordered;  // default: unordered iff the constraint is symmetric
  bool allow_repeats = false;
  std::size_t workers = 1;
  std::optional<double> cost_target;  // stop at the first tuple (in order) with summary cost <= target
};

inline EnumerationMode enumeration_mode(const ConstraintSpec& spec, const SolveOptions& opt) {
  return {opt.ordered.value_or(!is_symmetric(spec)), opt.allow_repeats};
}

struct TupleSearchResult {
  std::vector<std::size_t> centers;
  double cost = kInf;
  std::size_t rank = 0;
  std::size_t evaluated = 0;
  bool found = false;
};

/// Deterministic parallel min-search over enumerated tuples. Ties on cost go
/// to the lowest enumeration rank; the result is independent of the worker
/// count. With a target, the lowest-rank tuple meeting it wins.
inline TupleSearchResult search_tuples(std::span<const std::size_t> candidates, std::size_t k, EnumerationMode mode,
                                       std::size_t workers, std::optional<double> target,
                                       const std::function<std::optional<double>(std::span<const std::size_t>)>& score) {
  workers = std::max<std::size_t>(1, workers);
  std::vector<TupleSearchResult> partial(workers);
  std::atomic<std::size_t> cutoff{std::numeric_limits<std::size_t>::max()};
  std::exception_ptr failure;
  std::mutex failure_mu;

  const auto run = [&](std::size_t w) {
    try {
      std::size_t rank = 0;
      TupleSearchResult& best = partial[w];
      std::vector<std::size_t> tuple(k);
      for_each_index_tuple(candidates.size(), k, mode, [&](std::span<const std::size_t> idx) {
        const std::size_t r = rank++;
        if (r > cutoff.load(std::memory_order_relaxed)) return false;
        if (r % workers != w) return true;
        for (std::size_t i = 0; i < k; ++i) tuple[i] = candidates[idx[i]];
        ++best.evaluated;
        const auto c = score(tuple);
        if (!c) return true;
        if (!best.found || *c < best.cost) {
          best = {tuple, *c, r, best.evaluated, true};
        }
        if (target && *c <= *target) {
          std::size_t cur = cutoff.load();
          while (r < cur && !cutoff.compare_exchange_weak(cur, r)) {
          }
          return false;
        }
        return true;
      });
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  TupleSearchResult out;
  const std::size_t cut = cutoff.load();
  if (cut != std::numeric_limits<std::size_t>::max()) {
    // Lowest-rank tuple meeting the target. Every rank below the cut-off was
    // evaluated, so the answer does not depend on the schedule; re-score it.
    std::size_t rank = 0;
    for_each_index_tuple(candidates.size(), k, mode, [&](std::span<const std::size_t> idx) {
      if (rank++ != cut) return true;
      for (std::size_t i = 0; i < k; ++i) out.centers.push_back(candidates[idx[i]]);
      return false;
    });
    out.cost = *score(out.centers);
    out.rank = cut;
    out.found = true;
    out.evaluated = cut + 1;
    return out;
  }
  for (const auto& p : partial) {
    out.evaluated += p.evaluated;
    if (!p.found) continue;
    if (!out.found || p.cost < out.cost || (p.cost == out.cost && p.rank < out.rank)) {
      const std::size_t ev = out.evaluated;
      out = p;
      out.evaluated = ev;
    }
  }
  return out;
}

struct SolveResult {
  std::vector<std::size_t> centers;  // sites (synthetic centers have sites past the instance space)
  std::vector<std::vector<double>> center_coords;  // filled for synthetic centers
  double cost_on_summary = 0.0;
  double cost_on_full = 0.0;
  Assignment assignment_on_full;
  ClusterProfile realized_profile;
  std::size_t tuples_evaluated = 0;
  double wall_seconds = 0.0;
};

/// Exact optimal feasible assignment of the full instance to the given centers.
inline CostResult finalize_assignment(const MetricSpace& space, const ClusteringInstance& inst,
                                      std::span<const std::size_t> centers, const ConstraintSpec& spec) {
  if (centers.size() != inst.k) throw ValidationError("finalize_assignment needs exactly k centers");
  return optimal_feasible_cost(space, full_weighted_set(inst), centers, spec, inst.z);
}

inline CostResult finalize_assignment(const ClusteringInstance& inst, std::span<const std::size_t> centers,
                                      const ConstraintSpec& spec) {
  return finalize_assignment(inst.space, inst, centers, spec);
}

/// Scores a tuple by optimal_feasible_cost; nullopt when infeasible.
inline std::optional<double> feasible_cost_or_none(const MetricSpace& space, const WeightedSet& b,
                                                   std::span<const std::size_t> centers, const ConstraintSpec& spec,
                                                   int z) {
  try {
    return optimal_feasible_cost(space, b, centers, spec, z).cost;
  } catch (const InfeasibleError&) {
    return std::nullopt;
  }
}

inline SolveResult solve_constrained(const WeakCoreset& coreset, const ClusteringInstance& inst,
                                     const ConstraintSpec& spec, const SolveOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  if (coreset.meta.z != inst.z)
    throw ValidationError("coreset was built for z = " + std::to_string(coreset.meta.z) + " but instance has z = " +
                          std::to_string(inst.z));
  if (std::holds_alternative<FractionBounds>(spec) && !inst.labeled())
    throw ValidationError("fraction constraints need a labeled instance");
  validate_spec(spec, inst.k);
  const auto rc = resolve_coreset(inst, coreset);
  const auto mode = enumeration_mode(spec, opt);
  if (!mode.allow_repeats && inst.k > rc.candidates.size())
    throw ValidationError("candidate set has fewer than k distinct centers");

  const auto best = search_tuples(rc.candidates, inst.k, mode, opt.workers, opt.cost_target,
                                  [&](std::span<const std::size_t> c) {
                                    return feasible_cost_or_none(rc.space, rc.summary, c, spec, inst.z);
                                  });
  if (!best.found) throw InfeasibleError("no center tuple admits a feasible assignment on the summary");

  auto fin = finalize_assignment(rc.space, inst, best.centers, spec);
  SolveResult r;
  r.centers = best.centers;
  if (!coreset.synthetic_centers.empty())
    for (std::size_t c : best.centers) {
      auto co = rc.space.coords(c);
      r.center_coords.emplace_back(co.begin(), co.end());
    }
  r.cost_on_summary = best.cost;
  r.cost_on_full = fin.cost;
  r.assignment_on_full = std::move(fin.assignment);
  r.realized_profile = std::move(fin.realized);
  r.tuples_evaluated = best.evaluated;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

/// Degenerate coreset: J = F, S = X, v = w.
inline WeakCoreset identity_coreset(const ClusteringInstance& inst) {
  WeakCoreset cs;
  cs.centers = inst.facilities;
  std::sort(cs.centers.begin(), cs.centers.end());
  for (std::size_t x = 0; x < inst.size(); ++x) {
    cs.summary_points.push_back(x);
    cs.summary_weights.push_back(inst.weights[x]);
  }
  cs.meta.alpha = 1.0;
  cs.meta.z = inst.z;
  return cs;
}

}  // namespace uwc
