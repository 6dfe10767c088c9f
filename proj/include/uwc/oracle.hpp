#pragma once

// Ground truth and statistical verification of coreset guarantees.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "uwc/constraints.hpp"
#include "uwc/coreset.hpp"
#include "uwc/errors.hpp"
#include "uwc/meta.hpp"
#include "uwc/model.hpp"
#include "uwc/random.hpp"

namespace uwc {

struct OracleOptions {
  std::size_t ceiling = 1'000'000;  // maximum number of tuples solved
  std::optional<bool> ordered;
  bool allow_repeats = false;
  std::size_t workers = 1;
};

struct OracleResult {
  std::vector<std::size_t> centers;
  double cost = 0.0;
  Assignment assignment;
  ClusterProfile realized_profile;
  std::size_t tuples = 0;
};

/// Exact optimum over all admissible center tuples from F.
inline OracleResult brute_force_opt(const ClusteringInstance& inst, const ConstraintSpec& spec,
                                    const OracleOptions& opt = {}) {
  if (auto v = validate_instance(inst); !v.empty()) throw ValidationError("invalid instance: " + v.front().message);
  validate_spec(spec, inst.k);
  std::vector<std::size_t> f = inst.facilities;
  std::sort(f.begin(), f.end());
  const EnumerationMode mode{opt.ordered.value_or(!is_symmetric(spec)), opt.allow_repeats};
  const std::size_t count = tuple_count(f.size(), inst.k, mode);
  if (count > opt.ceiling)
    throw ResourceLimitError("brute force needs " + std::to_string(count) + " solves; ceiling is " +
                             std::to_string(opt.ceiling));
  const WeightedSet full = full_weighted_set(inst);
  const auto best = search_tuples(f, inst.k, mode, opt.workers, std::nullopt, [&](std::span<const std::size_t> c) {
    return feasible_cost_or_none(inst.space, full, c, spec, inst.z);
  });
  if (!best.found) throw InfeasibleError("no center tuple admits a feasible assignment");
  auto sol = optimal_feasible_cost(inst.space, full, best.centers, spec, inst.z);
  return {best.centers, best.cost, std::move(sol.assignment), std::move(sol.realized), count};
}

struct TrialRecord {
  std::vector<std::size_t> centers;
  std::vector<double> profile;
  bool voronoi_profile = false;
  double cost_full = 0.0;
  double cost_summary = 0.0;
  double ratio = 1.0;
};

struct VerificationReport {
  std::size_t trials = 0;
  std::size_t passed = 0;
  double window_low = 0.0;
  double window_high = 0.0;
  double required_fraction = 0.95;
  double worst_ratio = 1.0;  // ratio farthest from 1
  std::vector<TrialRecord> records;

  double pass_fraction() const { return trials == 0 ? 1.0 : static_cast<double>(passed) / static_cast<double>(trials); }
  bool verdict() const { return pass_fraction() >= required_fraction; }
};

/// Profile drawn uniformly from the simplex (normalized exponentials) scaled to the total weight.
inline std::vector<double> random_profile(std::size_t k, double total, Rng& rng) {
  std::vector<double> e(k);
  double s = 0.0;
  for (auto& v : e) {
    v = rng.exponential();
    s += v;
  }
  for (auto& v : e) v = v / s * total;
  return e;
}

namespace detail {

inline double cost_ratio(double full, double summary) {
  if (full == summary) return 1.0;
  if (summary <= 0.0) return kInf;
  return full / summary;
}

inline bool farther_from_one(double a, double b) {
  const auto dist = [](double r) { return r >= 1.0 ? r - 1.0 : 1.0 / std::max(r, 1e-300) - 1.0; };
  return dist(a) > dist(b);
}

}  // namespace detail

/// Property (B): profile costs on (X, w) and (S, v) agree for random
/// (C subset of J, Gamma). Even trials use the Voronoi profile of C on X,
/// odd trials a random consistent profile. Passing ratios lie in
/// [1 - window, 1 + window].
inline VerificationReport verify_property_b(const ClusteringInstance& inst, const WeakCoreset& cs, std::size_t trials,
                                            double window, std::uint64_t seed, std::size_t workers = 1,
                                            double required_fraction = 0.95) {
  const auto rc = resolve_coreset(inst, cs);
  if (rc.candidates.size() < inst.k) throw ValidationError("coreset has fewer than k candidates");
  const WeightedSet full = full_weighted_set(inst);
  const double total = full.total_weight();
  const double summary_total = rc.summary.total_weight();

  VerificationReport rep;
  rep.trials = trials;
  rep.window_low = 1.0 - window;
  rep.window_high = 1.0 + window;
  rep.required_fraction = required_fraction;
  rep.records.resize(trials);

  const auto run_trial = [&](std::size_t t) {
    Rng rng(derive_seed(seed, {t}));
    TrialRecord rec;
    std::vector<std::size_t> pool = rc.candidates;
    for (std::size_t i = 0; i < inst.k; ++i) std::swap(pool[i], pool[i + rng.index(pool.size() - i)]);
    rec.centers.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(inst.k));
    std::sort(rec.centers.begin(), rec.centers.end());
    rec.voronoi_profile = t % 2 == 0;
    if (rec.voronoi_profile) {
      auto v = voronoi_profile(rc.space, full, rec.centers, inst.z);
      rec.profile.assign(v.values().begin(), v.values().end());
    } else {
      rec.profile = random_profile(inst.k, total, rng);
    }
    const auto gamma_full = ClusterProfile::plain(rec.profile);
    // Rescale to the summary's own total so that both problems are balanced
    // to machine precision.
    std::vector<double> ps = rec.profile;
    for (auto& v : ps) v *= summary_total / total;
    rec.cost_full = profile_cost(rc.space, full, rec.centers, gamma_full, inst.z).cost;
    rec.cost_summary = profile_cost(rc.space, rc.summary, rec.centers, ClusterProfile::plain(ps), inst.z).cost;
    rec.ratio = detail::cost_ratio(rec.cost_full, rec.cost_summary);
    rep.records[t] = std::move(rec);
  };

  workers = std::max<std::size_t>(1, workers);
  if (workers == 1) {
    for (std::size_t t = 0; t < trials; ++t) run_trial(t);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < trials; t += workers) run_trial(t);
      });
    for (auto& th : pool) th.join();
  }
  for (const auto& r : rep.records) {
    if (r.ratio >= rep.window_low && r.ratio <= rep.window_high) ++rep.passed;
    if (detail::farther_from_one(r.ratio, rep.worst_ratio)) rep.worst_ratio = r.ratio;
  }
  return rep;
}

struct PropertyAReport {
  double best_over_candidates = 0.0;
  double best_over_facilities = 0.0;
  double ratio = 1.0;
  double alpha = 0.0;
  double epsilon = 0.0;
  std::vector<std::size_t> candidate_centers;
  std::vector<std::size_t> optimal_centers;

  bool passes() const { return ratio <= alpha + epsilon; }
};

/// Property (A): best feasible full-data cost over tuples from J against the
/// brute-force optimum over F.
inline PropertyAReport verify_property_a(const ClusteringInstance& inst, const WeakCoreset& cs,
                                         const ConstraintSpec& spec, const OracleOptions& opt = {}) {
  const auto rc = resolve_coreset(inst, cs);
  const auto opt_f = brute_force_opt(inst, spec, opt);
  const EnumerationMode mode{opt.ordered.value_or(!is_symmetric(spec)), opt.allow_repeats};
  if (tuple_count(rc.candidates.size(), inst.k, mode) > opt.ceiling)
    throw ResourceLimitError("candidate enumeration exceeds the ceiling");
  const WeightedSet full = full_weighted_set(inst);
  const auto best = search_tuples(rc.candidates, inst.k, mode, opt.workers, std::nullopt,
                                  [&](std::span<const std::size_t> c) {
                                    return feasible_cost_or_none(rc.space, full, c, spec, inst.z);
                                  });
  PropertyAReport rep;
  rep.alpha = cs.meta.alpha;
  rep.epsilon = cs.meta.epsilon;
  rep.best_over_facilities = opt_f.cost;
  rep.optimal_centers = opt_f.centers;
  if (!best.found) {
    rep.best_over_candidates = kInf;
    rep.ratio = kInf;
    return rep;
  }
  rep.best_over_candidates = best.cost;
  rep.candidate_centers = best.centers;
  rep.ratio = detail::cost_ratio(best.cost, opt_f.cost);
  return rep;
}

}  // namespace uwc
