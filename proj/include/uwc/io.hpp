#pragma once

// JSON file formats for instances, coresets, constraints and reports.
//
// Instance:
//   {"metric": "euclidean", "dim": d,
//    "points": [{"coords": [...], "weight": w, "label": j?}, ...],
//    "facilities": [{"coords": [...]}, ...], "k": k, "z": z}
//   {"metric": "explicit", "distance_matrix": [row-major n*n],
//    "points": [{"index": i, "weight": w, "label": j?}, ...],
//    "facilities": [{"index": i}, ...], "k": k, "z": z}
// A euclidean facility whose coordinates equal a point's coordinates shares
// that point's site, so X subset F is expressible in both kinds.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uwc/constraints.hpp"
#include "uwc/coreset.hpp"
#include "uwc/errors.hpp"
#include "uwc/meta.hpp"
#include "uwc/model.hpp"
#include "uwc/oracle.hpp"

namespace uwc::io {

using nlohmann::json;

inline constexpr std::uintmax_t kMaxInstanceBytes = 100ull * 1024 * 1024;

inline std::string read_text(const std::string& path, std::uintmax_t max_bytes = kMaxInstanceBytes) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw Error("cannot read " + path + ": " + ec.message());
  if (size > max_bytes)
    throw ValidationError(path + " is " + std::to_string(size) + " bytes; files above " + std::to_string(max_bytes) +
                          " bytes are rejected");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("failed writing " + path);
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(what + ": " + e.what());
  }
}

/// Canonical serialization: sorted keys, 2-space indent, trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

template <typename T>
T field(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key)) throw ValidationError(ctx + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(ctx + ": bad \"" + key + "\": " + e.what());
  }
}

// --- instances ---------------------------------------------------------------

inline ClusteringInstance instance_from_json(const json& j) {
  const std::string ctx = "instance";
  ClusteringInstance inst;
  const auto metric = field<std::string>(j, "metric", ctx);
  inst.k = field<std::size_t>(j, "k", ctx);
  inst.z = field<int>(j, "z", ctx);
  const auto& pts = j.at("points");
  const auto& fac = j.at("facilities");
  if (!pts.is_array() || !fac.is_array()) throw ValidationError(ctx + ": points and facilities must be arrays");

  std::vector<std::size_t> labels;
  bool any_label = false, all_label = true;
  for (const auto& p : pts) {
    inst.weights.push_back(field<double>(p, "weight", "point"));
    if (p.contains("label")) {
      any_label = true;
      labels.push_back(p.at("label").get<std::size_t>());
    } else {
      all_label = false;
    }
  }
  if (any_label && !all_label) throw ValidationError(ctx + ": either every point or no point carries a label");
  if (any_label) inst.labels = std::move(labels);

  if (metric == "euclidean") {
    const auto dim = field<std::size_t>(j, "dim", ctx);
    std::vector<double> coords;
    std::map<std::vector<double>, std::size_t> site_of;
    for (const auto& p : pts) {
      auto c = field<std::vector<double>>(p, "coords", "point");
      if (c.size() != dim) throw ValidationError(ctx + ": point coordinate dimension mismatch");
      const std::size_t site = inst.points.size();
      site_of.emplace(c, site);
      inst.points.push_back(site);
      coords.insert(coords.end(), c.begin(), c.end());
    }
    std::size_t next = inst.points.size();
    for (const auto& f : fac) {
      auto c = field<std::vector<double>>(f, "coords", "facility");
      if (c.size() != dim) throw ValidationError(ctx + ": facility coordinate dimension mismatch");
      if (auto it = site_of.find(c); it != site_of.end()) {
        inst.facilities.push_back(it->second);
      } else {
        site_of.emplace(c, next);
        inst.facilities.push_back(next++);
        coords.insert(coords.end(), c.begin(), c.end());
      }
    }
    inst.space = MetricSpace::euclidean(dim, std::move(coords));
  } else if (metric == "explicit") {
    const auto& dm = j.at("distance_matrix");
    std::vector<double> flat;
    std::size_t n = 0;
    if (!dm.empty() && dm.front().is_array()) {
      n = dm.size();
      for (const auto& row : dm) {
        auto r = row.get<std::vector<double>>();
        if (r.size() != n) throw ValidationError(ctx + ": distance matrix rows must have n entries");
        flat.insert(flat.end(), r.begin(), r.end());
      }
    } else {
      flat = dm.get<std::vector<double>>();
      n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(flat.size()))));
      if (n * n != flat.size()) throw ValidationError(ctx + ": distance matrix is not square");
    }
    inst.space = MetricSpace::explicit_matrix(n, std::move(flat));
    for (const auto& p : pts) inst.points.push_back(field<std::size_t>(p, "index", "point"));
    for (const auto& f : fac) inst.facilities.push_back(field<std::size_t>(f, "index", "facility"));
  } else {
    throw ValidationError(ctx + ": metric must be \"euclidean\" or \"explicit\"");
  }
  if (auto v = validate_instance(inst); !v.empty()) throw ValidationError("invalid instance: " + v.front().message);
  return inst;
}

inline json instance_to_json(const ClusteringInstance& inst) {
  json j;
  j["k"] = inst.k;
  j["z"] = inst.z;
  json pts = json::array(), fac = json::array();
  const bool euclid = inst.space.kind() == MetricKind::euclidean;
  for (std::size_t x = 0; x < inst.size(); ++x) {
    json p;
    if (euclid) {
      auto c = inst.space.coords(inst.points[x]);
      p["coords"] = std::vector<double>(c.begin(), c.end());
    } else {
      p["index"] = inst.points[x];
    }
    p["weight"] = inst.weights[x];
    if (inst.labels) p["label"] = (*inst.labels)[x];
    pts.push_back(std::move(p));
  }
  for (std::size_t f : inst.facilities) {
    json o;
    if (euclid) {
      auto c = inst.space.coords(f);
      o["coords"] = std::vector<double>(c.begin(), c.end());
    } else {
      o["index"] = f;
    }
    fac.push_back(std::move(o));
  }
  j["points"] = std::move(pts);
  j["facilities"] = std::move(fac);
  if (euclid) {
    j["metric"] = "euclidean";
    j["dim"] = inst.space.dim();
  } else {
    j["metric"] = "explicit";
    auto raw = inst.space.raw();
    j["distance_matrix"] = std::vector<double>(raw.begin(), raw.end());
  }
  return j;
}

inline ClusteringInstance read_instance(const std::string& path) {
  return instance_from_json(parse_json(read_text(path), path));
}

// --- coresets ------------------------------------------------------------------

inline json coreset_to_json(const WeakCoreset& cs) {
  json j;
  if (cs.synthetic_centers.empty()) {
    j["J"] = cs.centers;
  } else {
    j["J"] = cs.synthetic_centers;
  }
  json s = json::array();
  for (std::size_t t = 0; t < cs.summary_points.size(); ++t)
    s.push_back({{"point", cs.summary_points[t]}, {"weight", cs.summary_weights[t]}});
  j["S"] = std::move(s);
  const auto& m = cs.meta;
  j["alpha"] = m.alpha;
  j["z"] = m.z;
  j["epsilon"] = m.epsilon;
  j["delta"] = m.delta;
  j["seed"] = {{"candidates", m.candidate_seed}, {"summary", m.summary_seed}};
  j["mode"] = to_string(m.mode);
  j["params"] = {{"eta", m.eta},
                 {"mix", m.mix},
                 {"c0", m.c0},
                 {"samples_per_ring", m.samples_per_ring},
                 {"ring_budget", m.ring_budget},
                 {"candidate_bound", m.candidate_bound},
                 {"rings", m.rings}};
  return j;
}

inline WeakCoreset coreset_from_json(const json& j) {
  const std::string ctx = "coreset";
  WeakCoreset cs;
  auto& m = cs.meta;
  m.alpha = field<double>(j, "alpha", ctx);
  m.z = field<int>(j, "z", ctx);
  m.epsilon = field<double>(j, "epsilon", ctx);
  m.delta = field<double>(j, "delta", ctx);
  const auto mode = field<std::string>(j, "mode", ctx);
  if (mode == "metric") m.mode = CoresetMode::metric;
  else if (mode == "euclidean_kmeans") m.mode = CoresetMode::euclidean_kmeans;
  else throw ValidationError(ctx + ": unknown mode " + mode);
  const auto& seed = j.at("seed");
  m.candidate_seed = field<std::uint64_t>(seed, "candidates", ctx);
  m.summary_seed = field<std::uint64_t>(seed, "summary", ctx);
  const auto& p = j.at("params");
  m.eta = field<std::size_t>(p, "eta", ctx);
  m.mix = field<double>(p, "mix", ctx);
  m.c0 = field<double>(p, "c0", ctx);
  m.samples_per_ring = field<std::size_t>(p, "samples_per_ring", ctx);
  m.ring_budget = field<std::size_t>(p, "ring_budget", ctx);
  m.candidate_bound = field<std::size_t>(p, "candidate_bound", ctx);
  m.rings = field<std::size_t>(p, "rings", ctx);
  const auto& jj = j.at("J");
  if (m.mode == CoresetMode::metric) cs.centers = jj.get<std::vector<std::size_t>>();
  else cs.synthetic_centers = jj.get<std::vector<std::vector<double>>>();
  for (const auto& e : j.at("S")) {
    cs.summary_points.push_back(field<std::size_t>(e, "point", ctx));
    const double w = field<double>(e, "weight", ctx);
    if (!(w > 0.0)) throw ValidationError(ctx + ": summary weights must be positive");
    cs.summary_weights.push_back(w);
  }
  return cs;
}

inline WeakCoreset read_coreset(const std::string& path) {
  return coreset_from_json(parse_json(read_text(path), path));
}

// --- constraints ------------------------------------------------------------------

/// Parses a constraint file for an instance with k clusters and m labels.
///   {"type": "unconstrained"}
///   {"type": "profile", "gamma": [t_1..t_k] | [[t_11..t_1m], ...]}
///   {"type": "balanced", "l": [...], "u": [...]}
///   {"type": "fractions", "alpha": [k] | [[m] x k], "beta": same}
///   {"type": "ldiversity", "l": value, "direction": "at_least" | "at_most"}
inline ConstraintSpec constraint_from_json(const json& j, std::size_t k, std::size_t m) {
  const std::string ctx = "constraint";
  const auto type = field<std::string>(j, "type", ctx);
  ConstraintSpec spec;
  if (type == "unconstrained") {
    spec = Unconstrained{};
  } else if (type == "profile") {
    const auto& g = j.at("gamma");
    if (!g.empty() && g.front().is_array()) {
      std::vector<double> vals;
      std::size_t labels = g.front().size();
      for (const auto& row : g) {
        auto r = row.get<std::vector<double>>();
        if (r.size() != labels) throw ValidationError(ctx + ": ragged labeled profile");
        vals.insert(vals.end(), r.begin(), r.end());
      }
      spec = FixedProfile{ClusterProfile::labeled(g.size(), labels, std::move(vals))};
    } else {
      spec = FixedProfile{ClusterProfile::plain(g.get<std::vector<double>>())};
    }
  } else if (type == "balanced") {
    spec = Balanced{field<std::vector<double>>(j, "l", ctx), field<std::vector<double>>(j, "u", ctx)};
  } else if (type == "fractions") {
    const auto& a = j.at("alpha");
    const auto& b = j.at("beta");
    if (!a.empty() && a.front().is_array()) {
      FractionBounds fb{a.size(), a.front().size(), {}, {}};
      for (const auto& row : a) {
        auto r = row.get<std::vector<double>>();
        if (r.size() != fb.m) throw ValidationError(ctx + ": ragged alpha matrix");
        fb.alpha.insert(fb.alpha.end(), r.begin(), r.end());
      }
      for (const auto& row : b) {
        auto r = row.get<std::vector<double>>();
        if (r.size() != fb.m) throw ValidationError(ctx + ": ragged beta matrix");
        fb.beta.insert(fb.beta.end(), r.begin(), r.end());
      }
      spec = fb;
    } else {
      spec = FractionBounds::per_cluster(a.get<std::vector<double>>(), b.get<std::vector<double>>(), m);
    }
  } else if (type == "ldiversity") {
    const auto dir = j.value("direction", std::string("at_least"));
    DiversityReading reading;
    if (dir == "at_least") reading = DiversityReading::at_least;
    else if (dir == "at_most") reading = DiversityReading::at_most;
    else throw ValidationError(ctx + ": direction must be at_least or at_most");
    spec = FractionBounds::l_diversity(k, m, field<double>(j, "l", ctx), reading);
  } else {
    throw ValidationError(ctx + ": unknown type " + type);
  }
  validate_spec(spec, k);
  return spec;
}

inline json constraint_to_json(const ConstraintSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Unconstrained>) {
          return {{"type", "unconstrained"}};
        } else if constexpr (std::is_same_v<T, FixedProfile>) {
          const auto& g = s.profile;
          if (!g.is_labeled())
            return {{"type", "profile"}, {"gamma", std::vector<double>(g.values().begin(), g.values().end())}};
          json rows = json::array();
          for (std::size_t i = 0; i < g.k(); ++i) {
            std::vector<double> r;
            for (std::size_t jj = 0; jj < g.label_count(); ++jj) r.push_back(g.at(i, jj));
            rows.push_back(r);
          }
          return {{"type", "profile"}, {"gamma", rows}};
        } else if constexpr (std::is_same_v<T, Balanced>) {
          return {{"type", "balanced"}, {"l", s.lower}, {"u", s.upper}};
        } else {
          json a = json::array(), b = json::array();
          for (std::size_t i = 0; i < s.k; ++i) {
            std::vector<double> ra, rb;
            for (std::size_t jj = 0; jj < s.m; ++jj) {
              ra.push_back(s.lo(i, jj));
              rb.push_back(s.hi(i, jj));
            }
            a.push_back(ra);
            b.push_back(rb);
          }
          return {{"type", "fractions"}, {"alpha", a}, {"beta", b}};
        }
      },
      spec);
}

inline ConstraintSpec read_constraint(const std::string& path, std::size_t k, std::size_t m) {
  return constraint_from_json(parse_json(read_text(path), path), k, m);
}

// --- reports ------------------------------------------------------------------------

inline json assignment_to_json(const Assignment& a) {
  json out = json::array();
  for (const auto& e : a.entries) out.push_back({{"point", e.point}, {"cluster", e.cluster}, {"mass", e.mass}});
  return out;
}

inline std::string assignment_to_csv(const Assignment& a) {
  std::ostringstream ss;
  ss.precision(17);
  ss << "point,cluster,mass\n";
  for (const auto& e : a.entries) ss << e.point << ',' << e.cluster << ',' << e.mass << '\n';
  return ss.str();
}

inline json solve_result_to_json(const SolveResult& r, bool with_timing) {
  json j;
  if (r.center_coords.empty()) j["centers"] = r.centers;
  else j["centers"] = r.center_coords;
  j["cost_on_summary"] = r.cost_on_summary;
  j["cost_on_full"] = r.cost_on_full;
  j["realized_profile"] = std::vector<double>(r.realized_profile.values().begin(), r.realized_profile.values().end());
  j["tuples_evaluated"] = r.tuples_evaluated;
  j["assignment"] = assignment_to_json(r.assignment_on_full);
  if (with_timing) j["wall_seconds"] = r.wall_seconds;
  return j;
}

inline json oracle_result_to_json(const OracleResult& r) {
  return {{"centers", r.centers},
          {"cost", r.cost},
          {"tuples", r.tuples},
          {"realized_profile", std::vector<double>(r.realized_profile.values().begin(),
                                                   r.realized_profile.values().end())},
          {"assignment", assignment_to_json(r.assignment)}};
}

inline json ratio_json(double r) {
  if (std::isfinite(r)) return r;
  return "inf";
}

inline json report_to_json(const VerificationReport& rep) {
  json recs = json::array();
  for (const auto& r : rep.records)
    recs.push_back({{"centers", r.centers},
                    {"profile", r.profile},
                    {"voronoi_profile", r.voronoi_profile},
                    {"cost_full", r.cost_full},
                    {"cost_summary", r.cost_summary},
                    {"ratio", ratio_json(r.ratio)}});
  return {{"property", "B"},
          {"trials", rep.trials},
          {"passed", rep.passed},
          {"pass_fraction", rep.pass_fraction()},
          {"window", {rep.window_low, rep.window_high}},
          {"required_fraction", rep.required_fraction},
          {"worst_ratio", ratio_json(rep.worst_ratio)},
          {"verdict", rep.verdict()},
          {"records", recs}};
}

inline json report_to_json(const PropertyAReport& rep) {
  return {{"property", "A"},
          {"best_over_candidates", ratio_json(rep.best_over_candidates)},
          {"best_over_facilities", rep.best_over_facilities},
          {"ratio", ratio_json(rep.ratio)},
          {"alpha", rep.alpha},
          {"epsilon", rep.epsilon},
          {"candidate_centers", rep.candidate_centers},
          {"optimal_centers", rep.optimal_centers},
          {"verdict", rep.passes()}};
}

}  // namespace uwc::io
