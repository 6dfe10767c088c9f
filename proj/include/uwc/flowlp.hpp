#pragma once

// Exact solvers for the assignment subproblems:
//  - min-cost flow with arc lower/upper bounds (successive shortest paths
//    with Dijkstra over reduced costs, real-valued capacities),
//  - transportation and bounded transportation with few sinks (successive
//    shortest paths over the sink graph, one source at a time),
//  - a dense two-phase simplex with Bland's rule for small LPs.
// Every flow solution can be certified optimal by recomputing node
// potentials on the residual graph (certify_flow).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uwc/errors.hpp"

namespace uwc {


/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw std::invalid_argument("Matrix: data size mismatch");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// --- generic min-cost flow --------------------------------------------------

struct FlowArc {
  std::size_t from;
  std::size_t to;
  double cost;
  double lower;
  double upper;  // may be kInf
  double flow = 0.0;
};

/// Min-cost flow network with node balances (supply > 0, demand < 0).
struct FlowNetwork {
  std::size_t nodes = 0;
  std::vector<double> balance;
  std::vector<FlowArc> arcs;

  explicit FlowNetwork(std::size_t n = 0) : nodes(n), balance(n, 0.0) {}

  std::size_t add_arc(std::size_t from, std::size_t to, double cost, double lower, double upper) {
    arcs.push_back({from, to, cost, lower, upper, 0.0});
    return arcs.size() - 1;
  }

  double objective() const {
    double acc = 0.0;
    for (const auto& a : arcs) acc += a.cost * a.flow;
    return acc;
  }
};

struct FlowCertificate {
  bool optimal = false;
  double worst_reduced_cost = 0.0;   // most negative reduced cost on a residual arc
  double worst_conservation = 0.0;   // largest |inflow - outflow - balance|
  std::vector<double> potentials;
};

/// Certifies a flow by complementary slackness. Potentials come from
/// Bellman-Ford on the residual graph (virtual root at distance 0 to every
/// node), so they exist iff the residual graph has no negative cycle. With
/// reduced cost rc(u,v) = c + p(u) - p(v): every residual arc has rc >= -tol,
/// i.e. arcs below their upper bound have rc >= -tol and arcs above their
/// lower bound have rc <= tol.
inline FlowCertificate certify_flow(const FlowNetwork& net, double tol = 1e-9) {
  FlowCertificate cert;
  double scale = 1.0, flow_scale = 1.0;
  for (const auto& a : net.arcs) {
    scale = std::max(scale, std::abs(a.cost));
    if (std::isfinite(a.upper)) flow_scale = std::max(flow_scale, std::abs(a.upper));
    flow_scale = std::max(flow_scale, std::abs(a.flow));
  }
  for (double b : net.balance) flow_scale = std::max(flow_scale, std::abs(b));
  const double cap_eps = 1e-12 * flow_scale;
  const double cost_tol = tol * scale;

  std::vector<double> excess(net.nodes, 0.0);
  for (const auto& a : net.arcs) {
    excess[a.from] -= a.flow;
    excess[a.to] += a.flow;
  }
  for (std::size_t v = 0; v < net.nodes; ++v)
    cert.worst_conservation = std::max(cert.worst_conservation, std::abs(excess[v] + net.balance[v]));

  struct Residual {
    std::size_t from, to;
    double cost;
  };
  std::vector<Residual> residual;
  bool bounds_ok = true;
  for (const auto& a : net.arcs) {
    if (a.flow < a.lower - cap_eps || a.flow > a.upper + cap_eps) bounds_ok = false;
    if (a.flow < a.upper - cap_eps) residual.push_back({a.from, a.to, a.cost});
    if (a.flow > a.lower + cap_eps) residual.push_back({a.to, a.from, -a.cost});
  }

  std::vector<double> p(net.nodes, 0.0);
  bool converged = false;
  const double relax_eps = 1e-14 * scale;
  for (std::size_t pass = 0; pass <= net.nodes + 1; ++pass) {
    bool changed = false;
    for (const auto& r : residual) {
      if (p[r.from] + r.cost < p[r.to] - relax_eps) {
        p[r.to] = p[r.from] + r.cost;
        changed = true;
      }
    }
    if (!changed) {
      converged = true;
      break;
    }
  }
  // Shortest-path distances d satisfy d(v) <= d(u) + c; use potential = d so
  // that rc = c + p(u) - p(v) >= 0 on residual arcs.
  double worst = 0.0;
  for (const auto& r : residual) worst = std::min(worst, r.cost + p[r.from] - p[r.to]);
  cert.worst_reduced_cost = worst;
  cert.potentials = std::move(p);
  const double cons_tol = 1e-9 * flow_scale;
  cert.optimal = converged && bounds_ok && worst >= -cost_tol && cert.worst_conservation <= cons_tol;
  return cert;
}

/// Solves min-cost flow in place (fills arc flows). Throws InfeasibleError
/// when balances cannot be routed within arc bounds.
inline double solve_min_cost_flow(FlowNetwork& net) {
  for (const auto& a : net.arcs) {
    if (!std::isfinite(a.cost)) throw ValidationError("min-cost flow: non-finite arc cost");
    if (!(a.lower >= 0.0) || !std::isfinite(a.lower) || a.upper < a.lower)
      throw ValidationError("min-cost flow: invalid arc bounds");
  }
  const std::size_t n = net.nodes;
  const std::size_t source = n, sink = n + 1, total_nodes = n + 2;

  // Lower-bound elimination: pre-route each arc's lower bound.
  std::vector<double> b = net.balance;
  for (const auto& a : net.arcs) {
    b[a.from] -= a.lower;
    b[a.to] += a.lower;
  }

  struct Edge {
    std::size_t to;
    std::size_t rev;
    double cap;
    double cost;
  };
  std::vector<std::vector<Edge>> g(total_nodes);
  std::vector<std::pair<std::size_t, std::size_t>> handle(net.arcs.size());
  const auto add_edge = [&](std::size_t u, std::size_t v, double cap, double cost) {
    g[u].push_back({v, g[v].size(), cap, cost});
    g[v].push_back({u, g[u].size() - 1, 0.0, -cost});
    return std::pair{u, g[u].size() - 1};
  };
  for (std::size_t i = 0; i < net.arcs.size(); ++i) {
    const auto& a = net.arcs[i];
    handle[i] = add_edge(a.from, a.to, a.upper - a.lower, a.cost);
  }
  double required = 0.0, scale = 1.0;
  for (std::size_t v = 0; v < n; ++v) {
    if (b[v] > 0) {
      add_edge(source, v, b[v], 0.0);
      required += b[v];
    } else if (b[v] < 0) {
      add_edge(v, sink, -b[v], 0.0);
    }
    scale = std::max(scale, std::abs(b[v]));
  }
  const double cap_eps = 1e-13 * scale;

  // Initial potentials by Bellman-Ford from the super source (costs may be negative).
  std::vector<double> pot(total_nodes, 0.0);
  {
    std::vector<double> dist(total_nodes, kInf);
    dist[source] = 0.0;
    for (std::size_t pass = 0; pass < total_nodes; ++pass) {
      bool changed = false;
      for (std::size_t u = 0; u < total_nodes; ++u) {
        if (dist[u] == kInf) continue;
        for (const auto& e : g[u])
          if (e.cap > cap_eps && dist[u] + e.cost < dist[e.to]) {
            dist[e.to] = dist[u] + e.cost;
            changed = true;
          }
      }
      if (!changed) break;
    }
    for (std::size_t v = 0; v < total_nodes; ++v) pot[v] = dist[v] == kInf ? 0.0 : dist[v];
  }

  double sent = 0.0;
  std::vector<double> dist(total_nodes);
  std::vector<std::size_t> prev_node(total_nodes), prev_edge(total_nodes);
  std::vector<char> done(total_nodes);
  using Item = std::pair<double, std::size_t>;
  while (required - sent > cap_eps) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(done.begin(), done.end(), 0);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[source] = 0.0;
    pq.push({0.0, source});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (done[u]) continue;
      done[u] = 1;
      for (std::size_t ei = 0; ei < g[u].size(); ++ei) {
        const Edge& e = g[u][ei];
        if (e.cap <= cap_eps) continue;
        const double rc = std::max(0.0, e.cost + pot[u] - pot[e.to]);
        if (d + rc < dist[e.to]) {
          dist[e.to] = d + rc;
          prev_node[e.to] = u;
          prev_edge[e.to] = ei;
          pq.push({dist[e.to], e.to});
        }
      }
    }
    if (dist[sink] == kInf) break;
    for (std::size_t v = 0; v < total_nodes; ++v) pot[v] += std::min(dist[v], dist[sink]);

    double push = kInf;
    for (std::size_t v = sink; v != source; v = prev_node[v]) push = std::min(push, g[prev_node[v]][prev_edge[v]].cap);
    push = std::min(push, required - sent);
    for (std::size_t v = sink; v != source; v = prev_node[v]) {
      Edge& e = g[prev_node[v]][prev_edge[v]];
      e.cap -= push;
      if (e.cap < cap_eps) e.cap = 0.0;
      g[v][e.rev].cap += push;
    }
    sent += push;
  }
  if (required - sent > 1e-9 * std::max(1.0, required))
    throw InfeasibleError("min-cost flow: balances cannot be routed within the arc bounds");

  for (std::size_t i = 0; i < net.arcs.size(); ++i) {
    auto [u, ei] = handle[i];
    const Edge& e = g[u][ei];
    auto& a = net.arcs[i];
    a.flow = a.lower + g[e.to][e.rev].cap;
  }
  return net.objective();
}

// --- transportation -----------------------------------------------------------

struct TransportationProblem {
  Matrix cost;                  // sources x sinks
  std::vector<double> supplies;
  std::vector<double> demands;
};

struct TransportationSolution {
  Matrix flow;
  double objective = 0.0;
  std::vector<double> sink_totals;
};

struct BoundedTransportationProblem {
  Matrix cost;
  std::vector<double> supplies;
  std::vector<double> lower;   // per sink
  std::vector<double> upper;   // per sink, may be kInf
};

namespace detail {

inline void check_costs(const Matrix& cost, std::size_t sources, std::size_t sinks) {
  if (cost.rows() != sources || cost.cols() != sinks) throw ValidationError("cost matrix dimensions mismatch");
  for (double c : cost.data())
    if (!std::isfinite(c)) throw ValidationError("non-finite cost entry");
}

inline void check_nonnegative(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError(std::string(what) + " must be finite and nonnegative");
}

/// Transportation with per-sink [lower, upper] totals, tuned for many sources
/// and few sinks. Sources are added one at a time and routed along shortest
/// paths in the residual graph. Any such path alternates sinks and sources, so
/// it is found on the k-node sink graph whose arc a -> b costs
/// min over x with flow(x, a) > 0 of cost(x, b) - cost(x, a), kept in lazy
/// heaps. Lower bounds are handled lexicographically: while some sink is below
/// its lower bound only those sinks may end a path, which is the big-M
/// formulation of the lower bounds without the big M.
inline TransportationSolution few_sinks_transport(const Matrix& cost, std::span<const double> supplies,
                                                  std::span<const double> lower, std::span<const double> upper) {
  const std::size_t ns = supplies.size(), nt = lower.size();
  TransportationSolution sol;
  sol.flow = Matrix(ns, nt, 0.0);
  sol.sink_totals.assign(nt, 0.0);
  double total = 0.0, cmax = 0.0;
  for (double v : supplies) total += v;
  for (double c : cost.data()) cmax = std::max(cmax, std::abs(c));
  const double flow_eps = 1e-13 * std::max(total, 1e-300);
  const double cost_eps = 1e-12 * std::max(cmax, 1e-300);
  if (nt == 0) {
    if (total > 0.0) throw InfeasibleError("transportation: supply but no sinks");
    return sol;
  }

  // heap[a * nt + b]: sources with flow into a, keyed by cost(x, b) - cost(x, a).
  using Entry = std::pair<double, std::size_t>;
  using Heap = std::priority_queue<Entry, std::vector<Entry>, std::greater<>>;
  std::vector<Heap> heap(nt * nt);
  Matrix& f = sol.flow;
  const auto start_flow = [&](std::size_t x, std::size_t a) {
    for (std::size_t b = 0; b < nt; ++b)
      if (b != a) heap[a * nt + b].push({cost(x, b) - cost(x, a), x});
  };
  // Cheapest live exchange a -> b; kInf when none.
  const auto exchange = [&](std::size_t a, std::size_t b) -> const Entry* {
    Heap& h = heap[a * nt + b];
    while (!h.empty() && f(h.top().second, a) <= flow_eps) h.pop();
    return h.empty() ? nullptr : &h.top();
  };

  std::vector<double> dist(nt);
  std::vector<std::size_t> pred(nt);  // nt marks the entering source
  std::vector<std::size_t> via(nt);
  for (std::size_t x = 0; x < ns; ++x) {
    double remaining = supplies[x];
    while (remaining > flow_eps) {
      for (std::size_t b = 0; b < nt; ++b) {
        dist[b] = cost(x, b);
        pred[b] = nt;
      }
      // Bellman-Ford on the sink graph; strict improvements only, so
      // round-off cycles cannot loop.
      for (std::size_t round = 0; round + 1 < nt; ++round) {
        bool changed = false;
        for (std::size_t a = 0; a < nt; ++a)
          for (std::size_t b = 0; b < nt; ++b) {
            if (a == b) continue;
            const Entry* e = exchange(a, b);
            if (!e) continue;
            if (dist[a] + e->first < dist[b] - cost_eps) {
              dist[b] = dist[a] + e->first;
              pred[b] = a;
              via[b] = e->second;
              changed = true;
            }
          }
        if (!changed) break;
      }
      std::size_t term = nt;
      bool mandatory = false;
      for (std::size_t b = 0; b < nt; ++b)
        if (sol.sink_totals[b] < lower[b] - flow_eps && (!mandatory || dist[b] < dist[term])) {
          term = b;
          mandatory = true;
        }
      if (!mandatory)
        for (std::size_t b = 0; b < nt; ++b)
          if (sol.sink_totals[b] < upper[b] - flow_eps && (term == nt || dist[b] < dist[term])) term = b;
      if (term == nt) {
        if (remaining > 1e-9 * std::max(total, 1e-300))
          throw InfeasibleError("transportation: supply exceeds the sink upper bounds");
        // Round-off residue: give it to the cheapest sink.
        term = static_cast<std::size_t>(std::min_element(dist.begin(), dist.end()) - dist.begin());
        mandatory = false;
      }

      double push = remaining;
      const double room = (mandatory ? lower[term] : upper[term]) - sol.sink_totals[term];
      if (room > 0.0) push = std::min(push, room);
      std::size_t steps = 0;
      for (std::size_t b = term; pred[b] != nt; b = pred[b]) {
        push = std::min(push, f(via[b], pred[b]));
        if (++steps > nt) throw Error("transportation: cyclic shortest-path tree");
      }

      std::size_t b = term;
      for (; pred[b] != nt; b = pred[b]) {
        const std::size_t a = pred[b], y = via[b];
        f(y, a) -= push;
        if (f(y, a) <= flow_eps) f(y, a) = 0.0;
        if (f(y, b) <= flow_eps) start_flow(y, b);
        f(y, b) += push;
      }
      if (f(x, b) <= flow_eps) start_flow(x, b);
      f(x, b) += push;
      sol.sink_totals[term] += push;
      remaining -= push;
    }
  }
  for (std::size_t t = 0; t < nt; ++t)
    if (sol.sink_totals[t] < lower[t] - 1e-9 * std::max(total, 1e-300))
      throw InfeasibleError("transportation: supply cannot reach the sink lower bounds");
  sol.objective = 0.0;
  for (std::size_t x = 0; x < ns; ++x)
    for (std::size_t t = 0; t < nt; ++t) sol.objective += f(x, t) * cost(x, t);
  return sol;
}

}  // namespace detail

/// Balanced transportation: row sums = supplies, column sums = demands.
inline TransportationSolution solve_transportation(const TransportationProblem& p) {
  const std::size_t ns = p.supplies.size(), nt = p.demands.size();
  detail::check_costs(p.cost, ns, nt);
  detail::check_nonnegative(p.supplies, "supplies");
  detail::check_nonnegative(p.demands, "demands");
  const double s = std::accumulate(p.supplies.begin(), p.supplies.end(), 0.0);
  const double d = std::accumulate(p.demands.begin(), p.demands.end(), 0.0);
  if (std::abs(s - d) > 1e-9 * std::max({s, d, 1e-300}))
    throw ValidationError("transportation problem is unbalanced: supply " + std::to_string(s) + " vs demand " +
                          std::to_string(d));
  // Absorb the sub-tolerance imbalance into the last nonzero sink.
  std::vector<double> demands = p.demands;
  for (std::size_t t = nt; t-- > 0;)
    if (demands[t] > 0.0) {
      demands[t] = std::max(0.0, demands[t] + s - d);
      break;
    }
  return detail::few_sinks_transport(p.cost, p.supplies, demands, demands);
}

/// Transportation where sink totals are free within [lower, upper].
inline TransportationSolution solve_bounded_transportation(const BoundedTransportationProblem& p) {
  const std::size_t ns = p.supplies.size(), nt = p.lower.size();
  if (p.upper.size() != nt) throw ValidationError("bounded transportation: lower/upper size mismatch");
  detail::check_costs(p.cost, ns, nt);
  detail::check_nonnegative(p.supplies, "supplies");
  detail::check_nonnegative(p.lower, "lower bounds");
  for (std::size_t t = 0; t < nt; ++t)
    if (!(p.upper[t] >= p.lower[t])) throw ValidationError("bounded transportation: upper < lower");
  const double s = std::accumulate(p.supplies.begin(), p.supplies.end(), 0.0);
  const double l = std::accumulate(p.lower.begin(), p.lower.end(), 0.0);
  const double u = std::accumulate(p.upper.begin(), p.upper.end(), 0.0);
  const double tol = 1e-9 * std::max(s, 1e-300);
  if (l > s + tol || u < s - tol)
    throw InfeasibleError("bounded transportation infeasible: need sum(lower) <= supply <= sum(upper)");
  // Nudge bounds by the tolerance so that exact-sum instances stay feasible
  // under floating-point summation.
  std::vector<double> lower = p.lower, upper = p.upper;
  if (l > s) {
    const double f = s / l;
    for (auto& x : lower) x *= f;
  }
  if (u < s) {
    const double f = s / u;
    for (auto& x : upper) x *= f;
  }
  return detail::few_sinks_transport(p.cost, p.supplies, lower, upper);
}

/// Rebuilds the flow network of a transportation solution for certification.
inline FlowNetwork transportation_network(const TransportationProblem& p, const TransportationSolution& sol) {
  const std::size_t ns = p.supplies.size(), nt = p.demands.size();
  FlowNetwork net(ns + nt);
  for (std::size_t s = 0; s < ns; ++s) net.balance[s] = p.supplies[s];
  for (std::size_t t = 0; t < nt; ++t) net.balance[ns + t] = -p.demands[t];
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t t = 0; t < nt; ++t) {
      auto id = net.add_arc(s, ns + t, p.cost(s, t), 0.0, kInf);
      net.arcs[id].flow = sol.flow(s, t);
    }
  return net;
}

inline FlowNetwork bounded_transportation_network(const BoundedTransportationProblem& p,
                                                  const TransportationSolution& sol) {
  const std::size_t ns = p.supplies.size(), nt = p.lower.size();
  FlowNetwork net(ns + nt + 1);
  double total = 0.0;
  for (std::size_t s = 0; s < ns; ++s) {
    net.balance[s] = p.supplies[s];
    total += p.supplies[s];
  }
  net.balance[ns + nt] = -total;
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t t = 0; t < nt; ++t) {
      auto id = net.add_arc(s, ns + t, p.cost(s, t), 0.0, kInf);
      net.arcs[id].flow = sol.flow(s, t);
    }
  for (std::size_t t = 0; t < nt; ++t) {
    auto id = net.add_arc(ns + t, ns + nt, 0.0, p.lower[t], p.upper[t]);
    net.arcs[id].flow = sol.sink_totals[t];
  }
  return net;
}

// --- dense simplex -----------------------------------------------------------

/// minimize c.x  s.t.  eq * x = eq_rhs,  le * x <= le_rhs,  x >= lower.
/// lower may be empty (all zero) or contain -kInf for free variables.
struct LinearProgram {
  std::vector<double> objective;
  Matrix eq;
  std::vector<double> eq_rhs;
  Matrix le;
  std::vector<double> le_rhs;
  std::vector<double> lower;
};

struct LpSolution {
  std::vector<double> x;
  double objective = 0.0;
};

inline constexpr std::size_t kMaxLpVariables = 20000;

namespace detail {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0) {}
  double& at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double& obj(std::size_t c) { return at(rows_, c); }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double pv = at(pr, pc);
    double* prow = &t_[pr * (cols_ + 1)];
    for (std::size_t c = 0; c <= cols_; ++c) prow[c] /= pv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      double* row = &t_[r * (cols_ + 1)];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) row[c] -= f * prow[c];
      row[pc] = 0.0;
    }
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> t_;
};

enum class SimplexStatus { optimal, unbounded };

/// Bland's rule: lowest-index improving column, lowest-index basic variable
/// among minimum-ratio ties. Columns with allowed[c] == 0 never enter.
inline SimplexStatus run_simplex(Tableau& t, std::vector<std::size_t>& basis, const std::vector<char>& allowed,
                                 double eps) {
  for (;;) {
    std::size_t enter = t.cols();
    for (std::size_t c = 0; c < t.cols(); ++c)
      if (allowed[c] && t.obj(c) < -eps) {
        enter = c;
        break;
      }
    if (enter == t.cols()) return SimplexStatus::optimal;
    std::size_t leave = t.rows();
    double best = kInf;
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a > eps) {
        const double ratio = std::max(0.0, t.rhs(r)) / a;
        const double tie = 1e-12 * std::max(1.0, std::abs(ratio));
        if (leave == t.rows() || ratio < best - tie || (ratio <= best + tie && basis[r] < basis[leave])) {
          best = ratio;
          leave = r;
        }
      }
    }
    if (leave == t.rows()) return SimplexStatus::unbounded;
    t.pivot(leave, enter);
    basis[leave] = enter;
  }
}

}  // namespace detail

/// Dense two-phase simplex. Throws InfeasibleError / UnboundedError, and
/// ResourceLimitError above kMaxLpVariables structural variables.
inline LpSolution solve_lp(const LinearProgram& p) {
  const std::size_t n = p.objective.size();
  const bool has_eq = p.eq.rows() > 0, has_le = p.le.rows() > 0;
  if ((has_eq && p.eq.cols() != n) || p.eq.rows() != p.eq_rhs.size() || (has_le && p.le.cols() != n) ||
      p.le.rows() != p.le_rhs.size() || (!p.lower.empty() && p.lower.size() != n))
    throw ValidationError("linear program: inconsistent dimensions");

  // Column map: x_j = lower_j + y_j, or y_j^+ - y_j^- for free variables.
  std::vector<double> lower(n, 0.0);
  if (!p.lower.empty()) lower = p.lower;
  std::vector<std::size_t> pos_col(n), neg_col(n, SIZE_MAX);
  std::size_t ny = 0;
  for (std::size_t j = 0; j < n; ++j) {
    pos_col[j] = ny++;
    if (lower[j] == -kInf) neg_col[j] = ny++;
    else if (!std::isfinite(lower[j])) throw ValidationError("linear program: invalid lower bound");
  }
  if (ny > kMaxLpVariables)
    throw ResourceLimitError("linear program has " + std::to_string(ny) + " variables; limit is " +
                             std::to_string(kMaxLpVariables));

  const std::size_t me = p.eq.rows(), ml = p.le.rows(), m = me + ml;
  // Shifted right-hand sides.
  std::vector<double> rhs(m);
  auto shifted = [&](const Matrix& a, std::size_t r, double b) {
    double v = b;
    for (std::size_t j = 0; j < n; ++j)
      if (std::isfinite(lower[j])) v -= a(r, j) * lower[j];
    return v;
  };
  for (std::size_t r = 0; r < me; ++r) rhs[r] = shifted(p.eq, r, p.eq_rhs[r]);
  for (std::size_t r = 0; r < ml; ++r) rhs[me + r] = shifted(p.le, r, p.le_rhs[r]);

  // Columns: y (ny) | slack per le row (ml) | artificial per row needing one.
  std::vector<char> needs_art(m, 1);
  for (std::size_t r = 0; r < ml; ++r) needs_art[me + r] = rhs[me + r] >= 0.0 ? 0 : 1;
  std::vector<std::size_t> art_col(m, SIZE_MAX);
  std::size_t ncols = ny + ml;
  for (std::size_t r = 0; r < m; ++r)
    if (needs_art[r]) art_col[r] = ncols++;

  double scale = 1.0;
  for (double v : p.eq.data()) scale = std::max(scale, std::abs(v));
  for (double v : p.le.data()) scale = std::max(scale, std::abs(v));
  for (double v : rhs) scale = std::max(scale, std::abs(v));
  const double eps = 1e-11 * scale;

  detail::Tableau t(m, ncols);
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) {
    const Matrix& a = r < me ? p.eq : p.le;
    const std::size_t ar = r < me ? r : r - me;
    const double sign = rhs[r] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      t.at(r, pos_col[j]) = sign * a(ar, j);
      if (neg_col[j] != SIZE_MAX) t.at(r, neg_col[j]) = -sign * a(ar, j);
    }
    if (r >= me) t.at(r, ny + (r - me)) = sign;
    t.rhs(r) = sign * rhs[r];
    if (needs_art[r]) {
      t.at(r, art_col[r]) = 1.0;
      basis[r] = art_col[r];
    } else {
      basis[r] = ny + (r - me);
    }
  }

  std::vector<char> allowed(ncols, 1);
  // Phase 1: minimize the sum of artificials, expressed in nonbasic terms.
  bool any_art = std::any_of(needs_art.begin(), needs_art.end(), [](char c) { return c != 0; });
  if (any_art) {
    for (std::size_t r = 0; r < m; ++r)
      if (needs_art[r])
        for (std::size_t c = 0; c <= ncols; ++c)
          if (c != art_col[r]) t.at(m, c) -= t.at(r, c);
    detail::run_simplex(t, basis, allowed, eps);
    const double infeas = -t.at(m, ncols);
    if (infeas > 1e-9 * scale) throw InfeasibleError("linear program is infeasible");
    // Drive artificials out of the basis; rows where that is impossible are redundant.
    std::vector<char> is_art(ncols, 0);
    for (std::size_t r = 0; r < m; ++r)
      if (needs_art[r]) is_art[art_col[r]] = 1;
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_art[basis[r]]) continue;
      for (std::size_t c = 0; c < ncols; ++c)
        if (!is_art[c] && std::abs(t.at(r, c)) > eps) {
          t.pivot(r, c);
          basis[r] = c;
          break;
        }
    }
    for (std::size_t c = 0; c < ncols; ++c)
      if (is_art[c]) allowed[c] = 0;
  }

  // Phase 2 objective row in terms of the current basis.
  std::vector<double> cy(ncols, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    cy[pos_col[j]] = p.objective[j];
    if (neg_col[j] != SIZE_MAX) cy[neg_col[j]] = -p.objective[j];
  }
  for (std::size_t c = 0; c <= ncols; ++c) t.at(m, c) = c < ncols ? cy[c] : 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const double cb = cy[basis[r]];
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c <= ncols; ++c) t.at(m, c) -= cb * t.at(r, c);
  }
  if (detail::run_simplex(t, basis, allowed, eps) == detail::SimplexStatus::unbounded)
    throw UnboundedError("linear program is unbounded");

  std::vector<double> y(ncols, 0.0);
  for (std::size_t r = 0; r < m; ++r) y[basis[r]] = std::max(0.0, t.at(r, ncols));
  LpSolution sol;
  sol.x.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double base = std::isfinite(lower[j]) ? lower[j] : 0.0;
    sol.x[j] = base + y[pos_col[j]] - (neg_col[j] != SIZE_MAX ? y[neg_col[j]] : 0.0);
  }
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.objective += p.objective[j] * sol.x[j];
  return sol;
}

/// Largest absolute constraint violation of x (equalities, inequalities, bounds).
inline double lp_violation(const LinearProgram& p, std::span<const double> x) {
  double worst = 0.0;
  for (std::size_t r = 0; r < p.eq.rows(); ++r) {
    double v = -p.eq_rhs[r];
    for (std::size_t j = 0; j < x.size(); ++j) v += p.eq(r, j) * x[j];
    worst = std::max(worst, std::abs(v));
  }
  for (std::size_t r = 0; r < p.le.rows(); ++r) {
    double v = -p.le_rhs[r];
    for (std::size_t j = 0; j < x.size(); ++j) v += p.le(r, j) * x[j];
    worst = std::max(worst, v);
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double lb = p.lower.empty() ? 0.0 : p.lower[j];
    if (std::isfinite(lb)) worst = std::max(worst, lb - x[j]);
  }
  return worst;
}

}  // namespace uwc
