#pragma once

// Command implementations behind the `uwc` executable. Each command returns
// a process exit code: 0 success/pass, 1 failed verification or I/O error,
// 2 infeasible, 3 validation error, 4 resource ceiling.

#include <chrono>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>

#include "uwc/coreset.hpp"
#include "uwc/errors.hpp"
#include "uwc/generate.hpp"
#include "uwc/io.hpp"
#include "uwc/meta.hpp"
#include "uwc/oracle.hpp"

namespace uwc::cli {

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::optional<int> z;
  bool check_triangle = false;
};

inline ClusteringInstance load_instance(const std::string& path, const GlobalOptions& g, std::ostream& err) {
  auto inst = io::read_instance(path);
  if (g.z) {
    if (*g.z != 1 && *g.z != 2) throw ValidationError("--z must be 1 or 2");
    inst.z = *g.z;
  }
  if (inst.space.kind() == MetricKind::explicit_matrix) {
    if (g.check_triangle) {
      auto v = exhaustive_triangle_violations(inst.space);
      if (!v.empty()) throw ValidationError("triangle inequality violated: " + v.front().message);
    } else {
      auto v = sample_triangle_violations(inst.space, 1000, g.seed);
      if (!v.empty())
        err << "warning: " << v.size() << " of 1000 sampled triples violate the triangle inequality ("
            << v.front().message << ")\n";
    }
  }
  return inst;
}

struct GenerateOptions {
  std::string kind = "planar-blobs";
  std::size_t n = 100;
  std::size_t facilities = 20;
  std::size_t k = 3;
  std::size_t m = 1;
  std::string out;
};

inline int cmd_generate(const GenerateOptions& o, const GlobalOptions& g, std::ostream& out) {
  GenerateParams p;
  p.kind = parse_generator_kind(o.kind);
  p.n = o.n;
  p.facilities = o.facilities;
  p.k = o.k;
  p.m = o.m;
  p.z = g.z.value_or(1);
  p.seed = g.seed;
  const auto inst = generate(p);
  io::write_text(o.out, io::dump(io::instance_to_json(inst)));
  out << "wrote " << o.out << ": n=" << inst.size() << " |F|=" << inst.facilities.size() << " k=" << inst.k
      << " z=" << inst.z << " labels=" << (inst.labeled() ? inst.label_count() : 0) << "\n";
  return 0;
}

struct CoresetOptions {
  std::string instance;
  std::string out;
  double epsilon = 0.2;
  double delta = 0.05;
  std::string mode = "metric";
  std::optional<std::size_t> eta;
  double mix = 0.5;
  double c0 = 4.0;
  std::optional<std::size_t> samples_per_ring;
  std::size_t ring_budget = 32;
  std::optional<std::size_t> subset_size;
  std::optional<std::size_t> base_size;
  std::size_t max_candidates = 4096;
};

inline int cmd_coreset(const CoresetOptions& o, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const auto inst = load_instance(o.instance, g, err);
  CoresetMode mode;
  if (o.mode == "metric") mode = CoresetMode::metric;
  else if (o.mode == "euclidean_kmeans" || o.mode == "euclidean-kmeans") mode = CoresetMode::euclidean_kmeans;
  else throw ValidationError("unknown coreset mode " + o.mode);
  CandidateParams cp;
  cp.eta = o.eta;
  cp.mix = o.mix;
  cp.euclidean_subset_size = o.subset_size;
  cp.euclidean_base_size = o.base_size;
  cp.euclidean_max_candidates = o.max_candidates;
  SummaryParams sp;
  sp.c0 = o.c0;
  sp.samples_per_ring = o.samples_per_ring;
  sp.ring_budget = o.ring_budget;
  const CoresetSeeds seeds{derive_seed(g.seed, {1}), derive_seed(g.seed, {2})};
  const auto start = std::chrono::steady_clock::now();
  const auto cs = build_universal_weak_coreset(inst, o.epsilon, o.delta, mode, seeds, cp, sp);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_text(o.out, io::dump(io::coreset_to_json(cs)));
  out << "|J|=" << cs.candidate_count() << " |S|=" << cs.summary_points.size() << " alpha=" << cs.meta.alpha
      << " samples_per_ring=" << cs.meta.samples_per_ring << " rings=" << cs.meta.rings << " build_time=" << std::fixed
      << std::setprecision(3) << secs << "s\n";
  return 0;
}

struct SolveCmdOptions {
  std::string instance;
  std::string coreset;
  std::string constraint;
  std::string out;
  std::string csv;
  std::optional<bool> ordered;
  bool repeats = false;
  std::optional<double> cost_target;
  bool at_most_diversity = false;
  bool timing = false;
};

inline ConstraintSpec load_constraint(const std::string& path, const ClusteringInstance& inst, bool at_most_diversity) {
  auto j = io::parse_json(io::read_text(path), path);
  if (at_most_diversity && j.value("type", std::string()) == "ldiversity") j["direction"] = "at_most";
  return io::constraint_from_json(j, inst.k, inst.label_count());
}

inline int cmd_solve(const SolveCmdOptions& o, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const auto inst = load_instance(o.instance, g, err);
  const auto cs = io::read_coreset(o.coreset);
  const auto spec = load_constraint(o.constraint, inst, o.at_most_diversity);
  SolveOptions so;
  so.ordered = o.ordered;
  so.allow_repeats = o.repeats;
  so.workers = g.workers;
  so.cost_target = o.cost_target;
  const auto r = solve_constrained(cs, inst, spec, so);
  const auto j = io::solve_result_to_json(r, o.timing);
  if (!o.out.empty()) io::write_text(o.out, io::dump(j));
  if (!o.csv.empty()) io::write_text(o.csv, io::assignment_to_csv(r.assignment_on_full));

  out << std::setprecision(10);
  out << "cluster  center        total weight\n";
  const auto totals = r.realized_profile.values();
  for (std::size_t i = 0; i < r.centers.size(); ++i) {
    out << std::left << std::setw(9) << i << std::setw(14);
    if (r.center_coords.empty()) {
      out << r.centers[i];
    } else {
      std::string c = "(";
      for (std::size_t d = 0; d < r.center_coords[i].size(); ++d)
        c += (d ? "," : "") + std::to_string(r.center_coords[i][d]);
      out << c + ")";
    }
    out << totals[i] << "\n";
  }
  out << std::right << "cost_on_summary " << r.cost_on_summary << "\n"
      << "cost_on_full    " << r.cost_on_full << "\n"
      << "tuples          " << r.tuples_evaluated << "\n"
      << "time            " << std::fixed << std::setprecision(3) << r.wall_seconds << "s\n";
  return 0;
}

struct OracleCmdOptions {
  std::string instance;
  std::string constraint;
  std::string out;
  std::size_t ceiling = 1'000'000;
  std::optional<bool> ordered;
  bool repeats = false;
  bool at_most_diversity = false;
};

inline int cmd_oracle(const OracleCmdOptions& o, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const auto inst = load_instance(o.instance, g, err);
  const ConstraintSpec spec =
      o.constraint.empty() ? ConstraintSpec{Unconstrained{}} : load_constraint(o.constraint, inst, o.at_most_diversity);
  OracleOptions oo;
  oo.ceiling = o.ceiling;
  oo.ordered = o.ordered;
  oo.allow_repeats = o.repeats;
  oo.workers = g.workers;
  const auto r = brute_force_opt(inst, spec, oo);
  const auto j = io::oracle_result_to_json(r);
  if (!o.out.empty()) io::write_text(o.out, io::dump(j));
  out << std::setprecision(12) << "optimal cost " << r.cost << " centers";
  for (std::size_t c : r.centers) out << ' ' << c;
  out << " (" << r.tuples << " tuples)\n";
  return 0;
}

struct VerifyOptions {
  std::string instance;
  std::string coreset;
  std::string constraint;
  std::string which = "B";
  std::string out;
  std::size_t trials = 500;
  double epsilon = 0.25;  // ratio window half-width
  double threshold = 0.95;
  std::size_t ceiling = 1'000'000;
};

inline int cmd_verify(const VerifyOptions& o, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const auto inst = load_instance(o.instance, g, err);
  const auto cs = io::read_coreset(o.coreset);
  if (o.which != "A" && o.which != "B" && o.which != "both") throw ValidationError("--which must be A, B or both");
  io::json j = io::json::object();
  bool pass = true;
  if (o.which == "B" || o.which == "both") {
    const auto rep = verify_property_b(inst, cs, o.trials, o.epsilon, g.seed, g.workers, o.threshold);
    j["B"] = io::report_to_json(rep);
    pass = pass && rep.verdict();
    out << "property B: " << rep.passed << "/" << rep.trials << " ratios in [" << rep.window_low << ", "
        << rep.window_high << "], worst " << rep.worst_ratio << " -> " << (rep.verdict() ? "PASS" : "FAIL") << "\n";
  }
  if (o.which == "A" || o.which == "both") {
    const ConstraintSpec spec =
        o.constraint.empty() ? ConstraintSpec{Unconstrained{}} : load_constraint(o.constraint, inst, false);
    OracleOptions oo;
    oo.ceiling = o.ceiling;
    oo.workers = g.workers;
    const auto rep = verify_property_a(inst, cs, spec, oo);
    j["A"] = io::report_to_json(rep);
    pass = pass && rep.passes();
    out << "property A: ratio " << rep.ratio << " vs alpha+eps " << rep.alpha + rep.epsilon << " -> "
        << (rep.passes() ? "PASS" : "FAIL") << "\n";
  }
  if (!o.out.empty()) io::write_text(o.out, io::dump(j));
  return pass ? 0 : 1;
}

/// Runs a command body, translating exceptions into exit codes.
template <typename F>
int guarded(F&& body, std::ostream& err) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace uwc::cli
