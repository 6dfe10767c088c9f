#pragma once

// Instance representation shared by every other module: a metric space over
// dense site indices, a weighted clustering instance whose points and
// facilities are sites of that space, cluster profiles and fractional
// assignments.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uwc/errors.hpp"
#include "uwc/random.hpp"

namespace uwc {

/// Relative tolerance used for weight conservation and profile totals.
inline constexpr double kRelTol = 1e-9;

enum class MetricKind { euclidean, explicit_matrix };

/// Distance oracle over sites 0..size()-1.
class MetricSpace {
 public:
  MetricSpace() = default;

  /// coords is row-major, one row of `dim` values per site.
  static MetricSpace euclidean(std::size_t dim, std::vector<double> coords) {
    if (dim == 0) throw ValidationError("euclidean metric needs dim >= 1");
    if (coords.size() % dim != 0) throw ValidationError("coordinate count is not a multiple of dim");
    for (double c : coords)
      if (!std::isfinite(c)) throw ValidationError("non-finite coordinate");
    MetricSpace s;
    s.kind_ = MetricKind::euclidean;
    s.dim_ = dim;
    s.sites_ = coords.size() / dim;
    s.values_ = std::move(coords);
    return s;
  }

  /// matrix is row-major n x n. Symmetry and zero diagonal are enforced here;
  /// the triangle inequality is only spot-checked (see sample_triangle_violations).
  static MetricSpace explicit_matrix(std::size_t n, std::vector<double> matrix) {
    if (matrix.size() != n * n) throw ValidationError("distance matrix is not n x n");
    for (std::size_t a = 0; a < n; ++a) {
      if (matrix[a * n + a] != 0.0) throw ValidationError("distance matrix diagonal must be zero");
      for (std::size_t b = 0; b < n; ++b) {
        const double d = matrix[a * n + b];
        if (!std::isfinite(d) || d < 0.0) throw ValidationError("distance entries must be finite and nonnegative");
        if (std::abs(d - matrix[b * n + a]) > 1e-12) throw ValidationError("distance matrix is not symmetric");
      }
    }
    MetricSpace s;
    s.kind_ = MetricKind::explicit_matrix;
    s.sites_ = n;
    s.values_ = std::move(matrix);
    return s;
  }

  MetricKind kind() const { return kind_; }
  std::size_t size() const { return sites_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> raw() const { return values_; }

  std::span<const double> coords(std::size_t site) const {
    if (kind_ != MetricKind::euclidean) throw std::logic_error("coords() on an explicit metric");
    check(site);
    return {values_.data() + site * dim_, dim_};
  }

  double distance(std::size_t a, std::size_t b) const {
    check(a);
    check(b);
    if (a == b) return 0.0;
    if (kind_ == MetricKind::explicit_matrix) return values_[a * sites_ + b];
    const double* pa = values_.data() + a * dim_;
    const double* pb = values_.data() + b * dim_;
    double acc = 0.0;
    for (std::size_t t = 0; t < dim_; ++t) {
      const double diff = pa[t] - pb[t];
      acc += diff * diff;
    }
    return std::sqrt(acc);
  }

  /// D(a,b)^z for z in {1,2}; z=2 avoids the sqrt round trip on Euclidean sites.
  double cost(std::size_t a, std::size_t b, int z) const {
    if (z == 2 && kind_ == MetricKind::euclidean) {
      check(a);
      check(b);
      const double* pa = values_.data() + a * dim_;
      const double* pb = values_.data() + b * dim_;
      double acc = 0.0;
      for (std::size_t t = 0; t < dim_; ++t) {
        const double diff = pa[t] - pb[t];
        acc += diff * diff;
      }
      return acc;
    }
    const double d = distance(a, b);
    return z == 1 ? d : d * d;
  }

  /// Returns a copy with extra Euclidean sites appended; used for synthetic centers.
  MetricSpace with_appended_sites(std::span<const std::vector<double>> extra) const {
    if (kind_ != MetricKind::euclidean) throw ValidationError("synthetic sites require a euclidean metric");
    std::vector<double> coords = values_;
    for (const auto& p : extra) {
      if (p.size() != dim_) throw ValidationError("synthetic site has wrong dimension");
      coords.insert(coords.end(), p.begin(), p.end());
    }
    return euclidean(dim_, std::move(coords));
  }

 private:
  void check(std::size_t site) const {
    if (site >= sites_) throw std::out_of_range("site index " + std::to_string(site) + " out of range");
  }

  MetricKind kind_ = MetricKind::euclidean;
  std::size_t dim_ = 0;
  std::size_t sites_ = 0;
  std::vector<double> values_;
};

/// Weighted points, facilities and k over a shared metric space.
/// Points and facilities are site indices; they may overlap.
struct ClusteringInstance {
  MetricSpace space;
  std::vector<std::size_t> points;
  std::vector<double> weights;
  std::vector<std::size_t> facilities;
  std::size_t k = 1;
  int z = 1;
  std::optional<std::vector<std::size_t>> labels;

  std::size_t size() const { return points.size(); }
  bool labeled() const { return labels.has_value(); }

  std::size_t label_count() const {
    if (!labels || labels->empty()) return 1;
    return *std::max_element(labels->begin(), labels->end()) + 1;
  }

  double total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

  /// True when every point site is also a facility site.
  bool points_within_facilities() const {
    std::vector<char> is_facility(space.size(), 0);
    for (std::size_t f : facilities)
      if (f < is_facility.size()) is_facility[f] = 1;
    return std::all_of(points.begin(), points.end(),
                       [&](std::size_t p) { return p < is_facility.size() && is_facility[p]; });
  }
};

/// A weighted subset of sites, the common input of every cost functional.
/// labels is empty for unlabeled sets.
struct WeightedSet {
  std::vector<std::size_t> sites;
  std::vector<double> weights;
  std::vector<std::size_t> labels;

  std::size_t size() const { return sites.size(); }
  bool labeled() const { return !labels.empty(); }
  double total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
  std::size_t label_count() const {
    return labels.empty() ? 1 : *std::max_element(labels.begin(), labels.end()) + 1;
  }
};

inline WeightedSet full_weighted_set(const ClusteringInstance& inst) {
  WeightedSet b{inst.points, inst.weights, {}};
  if (inst.labels) b.labels = *inst.labels;
  return b;
}

/// Subset of the instance's points given by positions, carrying weights v.
inline WeightedSet weighted_subset(const ClusteringInstance& inst, std::span<const std::size_t> positions,
                                   std::span<const double> weights) {
  if (positions.size() != weights.size()) throw ValidationError("subset weights do not match positions");
  WeightedSet b;
  b.sites.reserve(positions.size());
  for (std::size_t p : positions) {
    if (p >= inst.size()) throw ValidationError("subset position out of range");
    b.sites.push_back(inst.points[p]);
    if (inst.labels) b.labels.push_back((*inst.labels)[p]);
  }
  b.weights.assign(weights.begin(), weights.end());
  return b;
}

/// Per-cluster weight targets. Plain profiles have k values; labeled
/// profiles have k*m values stored cluster-major: value(i, j) = t_{i,j}.
class ClusterProfile {
 public:
  ClusterProfile() = default;

  static ClusterProfile plain(std::vector<double> totals) {
    ClusterProfile p;
    p.k_ = totals.size();
    p.m_ = 1;
    p.labeled_ = false;
    p.values_ = std::move(totals);
    p.check_nonnegative();
    return p;
  }

  static ClusterProfile labeled(std::size_t k, std::size_t m, std::vector<double> values) {
    if (values.size() != k * m) throw ValidationError("labeled profile needs k*m values");
    ClusterProfile p;
    p.k_ = k;
    p.m_ = m;
    p.labeled_ = true;
    p.values_ = std::move(values);
    p.check_nonnegative();
    return p;
  }

  bool is_labeled() const { return labeled_; }
  std::size_t k() const { return k_; }
  std::size_t label_count() const { return m_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_.at(i); }
  double at(std::size_t cluster, std::size_t label) const { return values_.at(cluster * m_ + label); }

  /// Demands (t_{1,j}, ..., t_{k,j}) for one label.
  std::vector<double> label_column(std::size_t label) const {
    std::vector<double> col(k_);
    for (std::size_t i = 0; i < k_; ++i) col[i] = at(i, label);
    return col;
  }

  double total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

  /// Empty string when consistent with the weighted set, else a description.
  std::string consistency_error(const WeightedSet& b) const {
    const double w = b.total_weight();
    const double tol = kRelTol * std::max(w, 1e-300);
    if (!labeled_) {
      if (std::abs(total() - w) > tol)
        return "profile total " + std::to_string(total()) + " differs from weight " + std::to_string(w);
      return {};
    }
    std::vector<double> per_label(m_, 0.0);
    for (std::size_t x = 0; x < b.size(); ++x) {
      const std::size_t j = b.labeled() ? b.labels[x] : 0;
      if (j >= m_) return "point label exceeds profile label count";
      per_label[j] += b.weights[x];
    }
    for (std::size_t j = 0; j < m_; ++j) {
      double t = 0.0;
      for (std::size_t i = 0; i < k_; ++i) t += at(i, j);
      if (std::abs(t - per_label[j]) > kRelTol * std::max(w, 1e-300))
        return "profile total for label " + std::to_string(j) + " differs from label weight";
    }
    return {};
  }

 private:
  void check_nonnegative() const {
    for (double v : values_)
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("profile values must be finite and nonnegative");
  }

  std::size_t k_ = 0;
  std::size_t m_ = 1;
  bool labeled_ = false;
  std::vector<double> values_;
};

struct AssignmentEntry {
  std::size_t point;
  std::size_t cluster;
  double mass;
};

/// Sparse fractional assignment sigma: points x clusters -> mass.
struct Assignment {
  std::vector<AssignmentEntry> entries;

  std::vector<double> cluster_totals(std::size_t k) const {
    std::vector<double> t(k, 0.0);
    for (const auto& e : entries) t.at(e.cluster) += e.mass;
    return t;
  }

  std::vector<double> point_totals(std::size_t n) const {
    std::vector<double> t(n, 0.0);
    for (const auto& e : entries) t.at(e.point) += e.mass;
    return t;
  }

  /// Empty string when masses are nonnegative and conserve every point weight.
  std::string conservation_error(std::span<const double> weights) const {
    for (const auto& e : entries) {
      if (e.point >= weights.size()) return "assignment references point " + std::to_string(e.point);
      if (!(e.mass >= 0.0)) return "negative mass on point " + std::to_string(e.point);
    }
    const auto totals = point_totals(weights.size());
    for (std::size_t x = 0; x < weights.size(); ++x) {
      if (std::abs(totals[x] - weights[x]) > kRelTol * weights[x] + 1e-300)
        return "point " + std::to_string(x) + " assigned mass " + std::to_string(totals[x]) + " but has weight " +
               std::to_string(weights[x]);
    }
    return {};
  }
};

// --- operations -----------------------------------------------------------

inline double distance(const MetricSpace& space, std::size_t a, std::size_t b) { return space.distance(a, b); }

struct NearestFacility {
  std::size_t facility;
  double distance;
};

/// Closest site among candidates; ties go to the lowest site index.
inline NearestFacility nearest_facility(const MetricSpace& space, std::size_t x,
                                        std::span<const std::size_t> candidates) {
  if (candidates.empty()) throw ValidationError("nearest_facility: empty facility list");
  NearestFacility best{candidates[0], space.distance(x, candidates[0])};
  for (std::size_t f : candidates.subspan(1)) {
    const double d = space.distance(x, f);
    if (d < best.distance || (d == best.distance && f < best.facility)) best = {f, d};
  }
  return best;
}

struct Violation {
  std::string code;
  std::string message;
};

/// Samples random site triples and reports triangle-inequality violations
/// (d(a,c) > d(a,b) + d(b,c) + 1e-9). Only meaningful for explicit matrices.
inline std::vector<Violation> sample_triangle_violations(const MetricSpace& space, std::size_t samples,
                                                         std::uint64_t seed) {
  std::vector<Violation> out;
  if (space.size() < 3) return out;
  Rng rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t a = rng.index(space.size()), b = rng.index(space.size()), c = rng.index(space.size());
    if (space.distance(a, c) > space.distance(a, b) + space.distance(b, c) + 1e-9)
      out.push_back({"triangle", "d(" + std::to_string(a) + "," + std::to_string(c) + ") exceeds path via " +
                                     std::to_string(b)});
  }
  return out;
}

/// O(n^3) exhaustive triangle check.
inline std::vector<Violation> exhaustive_triangle_violations(const MetricSpace& space, std::size_t max_reports = 10) {
  std::vector<Violation> out;
  const std::size_t n = space.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        if (space.distance(a, c) > space.distance(a, b) + space.distance(b, c) + 1e-9) {
          out.push_back({"triangle", "d(" + std::to_string(a) + "," + std::to_string(c) + ") exceeds path via " +
                                         std::to_string(b)});
          if (out.size() >= max_reports) return out;
        }
  return out;
}

/// Lists violated instance invariants; empty means valid.
inline std::vector<Violation> validate_instance(const ClusteringInstance& inst) {
  std::vector<Violation> out;
  const auto add = [&](std::string code, std::string msg) { out.push_back({std::move(code), std::move(msg)}); };

  if (inst.points.empty()) add("no-points", "instance has no points");
  if (inst.weights.size() != inst.points.size())
    add("weight-count", "weights (" + std::to_string(inst.weights.size()) + ") do not match points (" +
                            std::to_string(inst.points.size()) + ")");
  for (std::size_t x = 0; x < inst.weights.size(); ++x)
    if (!(inst.weights[x] > 0.0) || !std::isfinite(inst.weights[x]))
      add("nonpositive-weight", "point " + std::to_string(x) + " has nonpositive weight");
  if (inst.facilities.empty()) add("no-facilities", "instance has no facilities");
  if (inst.k == 0) add("k-zero", "k must be positive");
  if (inst.k > inst.facilities.size())
    add("k-exceeds-facilities", "k = " + std::to_string(inst.k) + " exceeds facility count " +
                                    std::to_string(inst.facilities.size()));
  if (inst.z != 1 && inst.z != 2) add("bad-z", "z must be 1 or 2");
  for (std::size_t p : inst.points)
    if (p >= inst.space.size()) add("point-site", "point site " + std::to_string(p) + " outside the metric space");
  for (std::size_t f : inst.facilities)
    if (f >= inst.space.size()) add("facility-site", "facility site " + std::to_string(f) + " outside the metric space");
  {
    std::vector<std::size_t> sorted = inst.facilities;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      add("duplicate-facility", "facility list contains duplicates");
  }
  if (inst.labels && inst.labels->size() != inst.points.size())
    add("label-count", "labels do not match points");
  return out;
}

}  // namespace uwc
