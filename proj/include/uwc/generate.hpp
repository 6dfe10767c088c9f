#pragma once

// Synthetic instance generators.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "uwc/errors.hpp"
#include "uwc/model.hpp"
#include "uwc/random.hpp"

namespace uwc {

enum class GeneratorKind { planar_blobs, line, random_metric };

struct GenerateParams {
  GeneratorKind kind = GeneratorKind::planar_blobs;
  std::size_t n = 100;
  std::size_t facilities = 20;
  std::size_t k = 3;
  std::size_t m = 1;  // labels; 1 means unlabeled
  int z = 1;
  std::uint64_t seed = 1;
};

inline GeneratorKind parse_generator_kind(const std::string& s) {
  if (s == "planar-blobs") return GeneratorKind::planar_blobs;
  if (s == "line") return GeneratorKind::line;
  if (s == "random-metric") return GeneratorKind::random_metric;
  throw ValidationError("unknown generator kind " + s);
}

namespace detail {

inline void assign_labels(ClusteringInstance& inst, std::size_t m, Rng& rng) {
  if (m <= 1) return;
  std::vector<std::size_t> labels(inst.size());
  // Every label appears at least once when n >= m.
  for (std::size_t x = 0; x < labels.size(); ++x) labels[x] = x < m ? x : rng.index(m);
  inst.labels = std::move(labels);
}

}  // namespace detail

/// Points on a line at the repeating pattern 0, 1, 2, 9, 10 (period 20),
/// unit weights, every point also a facility. n = 5 gives the canonical
/// five-point instance.
inline ClusteringInstance generate_line(std::size_t n, std::size_t k, int z) {
  static constexpr double pattern[] = {0, 1, 2, 9, 10};
  std::vector<double> coords;
  for (std::size_t i = 0; i < n; ++i) coords.push_back(pattern[i % 5] + 20.0 * static_cast<double>(i / 5));
  ClusteringInstance inst;
  inst.space = MetricSpace::euclidean(1, std::move(coords));
  for (std::size_t i = 0; i < n; ++i) {
    inst.points.push_back(i);
    inst.facilities.push_back(i);
  }
  inst.weights.assign(n, 1.0);
  inst.k = k;
  inst.z = z;
  return inst;
}

/// k Gaussian blobs in the plane; facilities are a random subset of points.
inline ClusteringInstance generate_planar_blobs(const GenerateParams& p) {
  Rng rng(p.seed);
  const std::size_t blobs = std::max<std::size_t>(1, p.k);
  std::vector<double> centers;
  for (std::size_t b = 0; b < blobs; ++b) {
    centers.push_back(100.0 * rng.uniform());
    centers.push_back(100.0 * rng.uniform());
  }
  std::vector<double> coords;
  for (std::size_t x = 0; x < p.n; ++x) {
    const std::size_t b = rng.index(blobs);
    const double spread = 3.0 + 2.0 * static_cast<double>(b % 3);
    coords.push_back(centers[2 * b] + spread * rng.normal());
    coords.push_back(centers[2 * b + 1] + spread * rng.normal());
  }
  ClusteringInstance inst;
  inst.space = MetricSpace::euclidean(2, std::move(coords));
  for (std::size_t x = 0; x < p.n; ++x) inst.points.push_back(x);
  inst.weights.assign(p.n, 1.0);
  std::vector<std::size_t> perm = inst.points;
  const std::size_t nf = std::min(p.facilities, p.n);
  for (std::size_t i = 0; i < nf; ++i) std::swap(perm[i], perm[i + rng.index(perm.size() - i)]);
  inst.facilities.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(nf));
  std::sort(inst.facilities.begin(), inst.facilities.end());
  inst.k = p.k;
  inst.z = p.z;
  detail::assign_labels(inst, p.m, rng);
  return inst;
}

/// Random symmetric weights in [1, 10] closed under shortest paths, so the
/// triangle inequality holds exactly. Points are sites [0, n), facilities
/// sites [n, n + facilities).
inline ClusteringInstance generate_random_metric(const GenerateParams& p) {
  Rng rng(p.seed);
  const std::size_t total = p.n + p.facilities;
  std::vector<double> d(total * total, 0.0);
  for (std::size_t a = 0; a < total; ++a)
    for (std::size_t b = a + 1; b < total; ++b) d[a * total + b] = d[b * total + a] = 1.0 + 9.0 * rng.uniform();
  for (std::size_t via = 0; via < total; ++via)
    for (std::size_t a = 0; a < total; ++a)
      for (std::size_t b = 0; b < total; ++b)
        d[a * total + b] = std::min(d[a * total + b], d[a * total + via] + d[via * total + b]);
  ClusteringInstance inst;
  inst.space = MetricSpace::explicit_matrix(total, std::move(d));
  for (std::size_t x = 0; x < p.n; ++x) inst.points.push_back(x);
  for (std::size_t f = 0; f < p.facilities; ++f) inst.facilities.push_back(p.n + f);
  inst.weights.assign(p.n, 1.0);
  inst.k = p.k;
  inst.z = p.z;
  detail::assign_labels(inst, p.m, rng);
  return inst;
}

inline ClusteringInstance generate(const GenerateParams& p) {
  if (p.n == 0 || p.k == 0) throw ValidationError("generator needs n > 0 and k > 0");
  switch (p.kind) {
    case GeneratorKind::line: {
      auto inst = generate_line(p.n, p.k, p.z);
      Rng rng(p.seed);
      detail::assign_labels(inst, p.m, rng);
      return inst;
    }
    case GeneratorKind::random_metric:
      return generate_random_metric(p);
    case GeneratorKind::planar_blobs:
    default:
      return generate_planar_blobs(p);
  }
}

}  // namespace uwc
