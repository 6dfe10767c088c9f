#pragma once

// Hand-rolled generators for property tests and fixed reference instances.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "uwc/model.hpp"

namespace fixtures {

/// Points {0,1,2,9,10} on a line, unit weights, F = X.
inline uwc::ClusteringInstance line5(std::size_t k = 2, int z = 1) {
  uwc::ClusteringInstance inst;
  inst.space = uwc::MetricSpace::euclidean(1, {0, 1, 2, 9, 10});
  inst.points = {0, 1, 2, 3, 4};
  inst.facilities = {0, 1, 2, 3, 4};
  inst.weights.assign(5, 1.0);
  inst.k = k;
  inst.z = z;
  return inst;
}

struct RandomSpec {
  std::size_t n_min = 3, n_max = 10;
  std::size_t f_min = 2, f_max = 6;
  std::size_t k = 2;
  int z = 1;
  std::size_t labels = 0;     // 0: unlabeled
  bool integer_weights = false;
  bool x_in_f = false;        // facilities drawn from the points
};

/// Random planar instance with separate facility sites (or F drawn from X).
inline uwc::ClusteringInstance random_instance(std::mt19937_64& g, const RandomSpec& s) {
  std::uniform_int_distribution<std::size_t> nd(s.n_min, s.n_max), fd(s.f_min, s.f_max);
  std::uniform_real_distribution<double> coord(0.0, 20.0), weight(0.5, 3.0);
  const std::size_t n = nd(g);
  std::size_t nf = std::max(fd(g), s.k);
  if (s.x_in_f) nf = std::min(nf, n);
  std::vector<double> coords;
  const std::size_t sites = s.x_in_f ? n : n + nf;
  for (std::size_t i = 0; i < 2 * sites; ++i) coords.push_back(coord(g));
  uwc::ClusteringInstance inst;
  inst.space = uwc::MetricSpace::euclidean(2, std::move(coords));
  for (std::size_t x = 0; x < n; ++x) {
    inst.points.push_back(x);
    inst.weights.push_back(s.integer_weights ? 1.0 : weight(g));
  }
  if (s.x_in_f) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), g);
    inst.facilities.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(nf));
    std::sort(inst.facilities.begin(), inst.facilities.end());
  } else {
    for (std::size_t f = 0; f < nf; ++f) inst.facilities.push_back(n + f);
  }
  inst.k = s.k;
  inst.z = s.z;
  if (s.labels > 0) {
    std::vector<std::size_t> lab(n);
    std::uniform_int_distribution<std::size_t> ld(0, s.labels - 1);
    for (std::size_t x = 0; x < n; ++x) lab[x] = x < s.labels ? x : ld(g);
    inst.labels = lab;
  }
  return inst;
}

}  // namespace fixtures
