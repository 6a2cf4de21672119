#include "wpath/flow.hpp"

#include "wpath/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace wpath {

namespace {

int find_root(std::vector<int>& parent, int v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

void require_connected(const FlowNetwork& net) {
  std::vector<int> parent(net.n);
  std::iota(parent.begin(), parent.end(), 0);
  int parts = net.n;
  for (const FlowEdge& e : net.edges) {
    const int a = find_root(parent, e.tail);
    const int b = find_root(parent, e.head);
    if (a != b) {
      parent[a] = b;
      --parts;
    }
  }
  if (parts != 1) throw Error(ErrorCode::Disconnected, "network is not connected");
}

// Residual arc k of edge e: k even is forward, k odd is backward.
struct Residual {
  const FlowNetwork& net;
  std::vector<long long>& f;
  int from(int k) const { return k % 2 == 0 ? net.edges[k / 2].tail : net.edges[k / 2].head; }
  int to(int k) const { return k % 2 == 0 ? net.edges[k / 2].head : net.edges[k / 2].tail; }
  long long cap(int k) const { return k % 2 == 0 ? net.edges[k / 2].cap - f[k / 2] : f[k / 2]; }
  long long cost(int k) const { return k % 2 == 0 ? net.edges[k / 2].cost : -net.edges[k / 2].cost; }
  void push(int k, long long amount) { f[k / 2] += k % 2 == 0 ? amount : -amount; }
};

// BFS over residual arcs from `start`; reverse walks arcs backwards.
// Returns the arc path to the first vertex accepted by `goal`, or an empty path.
template <class Goal>
std::vector<int> residual_path(const Residual& res, int start, bool reverse, Goal goal, int* reached) {
  const int n = res.net.n;
  std::vector<std::vector<int>> adj(n);
  const int arcs = static_cast<int>(res.net.edges.size()) * 2;
  for (int k = 0; k < arcs; ++k) {
    if (res.cap(k) <= 0) continue;
    adj[reverse ? res.to(k) : res.from(k)].push_back(k);
  }
  std::vector<int> via(n, -2);
  via[start] = -1;
  std::deque<int> queue{start};
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    if (v != start && goal(v)) {
      std::vector<int> path;
      for (int u = v; via[u] >= 0; u = reverse ? res.to(via[u]) : res.from(via[u])) path.push_back(via[u]);
      *reached = v;
      return path;
    }
    for (int k : adj[v]) {
      const int u = reverse ? res.from(k) : res.to(k);
      if (via[u] != -2) continue;
      via[u] = k;
      queue.push_back(u);
    }
  }
  return {};
}

// One negative residual cycle as a list of arcs, or empty.
std::vector<int> negative_cycle(const Residual& res) {
  const int n = res.net.n;
  const int arcs = static_cast<int>(res.net.edges.size()) * 2;
  std::vector<long long> dist(n, 0);
  std::vector<int> pred(n, -1);
  int last = -1;
  for (int round = 0; round < n; ++round) {
    last = -1;
    for (int k = 0; k < arcs; ++k) {
      if (res.cap(k) <= 0) continue;
      const int a = res.from(k);
      const int b = res.to(k);
      if (dist[a] + res.cost(k) < dist[b]) {
        dist[b] = dist[a] + res.cost(k);
        pred[b] = k;
        last = b;
      }
    }
    if (last < 0) return {};
  }
  int v = last;
  for (int i = 0; i < n; ++i) v = res.from(pred[v]);
  std::vector<int> cycle;
  int u = v;
  do {
    cycle.push_back(pred[u]);
    u = res.from(pred[u]);
  } while (u != v);
  return cycle;
}

long long bottleneck(const Residual& res, const std::vector<int>& arcs) {
  long long b = INT64_MAX;
  for (int k : arcs) b = std::min(b, res.cap(k));
  return b;
}

double default_eps(const FlowNetwork& net) {
  return 1.0 / (10.0 * static_cast<double>(net.edges.size()) * flow_width(net));
}

FlowNetwork with_return_edge(const FlowNetwork& net, long long return_cost, bool zero_costs) {
  FlowNetwork circ = net;
  if (zero_costs)
    for (FlowEdge& e : circ.edges) e.cost = 0;
  long long out_s = 0;
  for (const FlowEdge& e : net.edges)
    if (e.tail == net.s) out_s += e.cap;
  FlowEdge back;
  back.tail = net.t;
  back.head = net.s;
  back.cap = out_s + 1;
  back.cost = return_cost;
  circ.edges.push_back(back);
  return circ;
}

FlowSolution solve_circulation(const FlowNetwork& net, const FlowNetwork& circ, const FlowOptions& opts) {
  FlowOptions o = opts;
  if (!(o.eps > 0.0)) o.eps = default_eps(net);
  FlowSolution lp = solve_generalized_mcf(circ, 0.0, o);
  FlowSolution out;
  out.report = lp.report;
  out.eps = lp.eps;
  out.slack = lp.slack;
  const std::vector<long long> f = round_flow(lp.flow, circ, true, &out.cycles_canceled);
  const Index m = static_cast<Index>(net.edges.size());
  out.flow.resize(m);
  out.cost = 0.0;
  for (Index e = 0; e < m; ++e) {
    out.flow[e] = static_cast<double>(f[e]);
    out.cost += static_cast<double>(net.edges[e].cost) * out.flow[e];
  }
  out.value = static_cast<double>(f[m]);
  out.approximate = false;
  return out;
}

}  // namespace

bool FlowNetwork::lossless() const {
  return std::all_of(edges.begin(), edges.end(), [](const FlowEdge& e) { return e.gnum == e.gden; });
}

void validate(const FlowNetwork& net) {
  if (net.n < 2) throw Error(ErrorCode::MalformedNetwork, "need at least two vertices");
  if (net.s < 0 || net.s >= net.n || net.t < 0 || net.t >= net.n || net.s == net.t)
    throw Error(ErrorCode::MalformedNetwork, "source and sink must be distinct vertices");
  if (net.edges.empty()) throw Error(ErrorCode::MalformedNetwork, "network has no edges");
  for (const FlowEdge& e : net.edges) {
    if (e.tail < 0 || e.tail >= net.n || e.head < 0 || e.head >= net.n)
      throw Error(ErrorCode::MalformedNetwork, "edge endpoint out of range");
    if (e.tail == e.head) throw Error(ErrorCode::MalformedNetwork, "self loop");
    if (e.cap < 1) throw Error(ErrorCode::MalformedNetwork, "capacity must be a positive integer");
    if (e.gnum < 1 || e.gden < 1 || e.gnum > e.gden)
      throw Error(ErrorCode::MalformedNetwork, "multiplier must lie in (0, 1]");
  }
}

double flow_width(const FlowNetwork& net) {
  long long U = 1;
  for (const FlowEdge& e : net.edges) U = std::max({U, e.cap, std::abs(e.cost), e.gnum, e.gden});
  return static_cast<double>(U);
}

SparseMat build_incidence(const FlowNetwork& net) {
  validate(net);
  require_connected(net);
  std::vector<Eigen::Triplet<double>> tr;
  for (Index i = 0; i < static_cast<Index>(net.edges.size()); ++i) {
    const FlowEdge& e = net.edges[i];
    if (e.head != net.s) tr.emplace_back(i, vertex_column(net, e.head), e.gamma());
    if (e.tail != net.s) tr.emplace_back(i, vertex_column(net, e.tail), -1.0);
  }
  return make_sparse(static_cast<Index>(net.edges.size()), net.n - 1, tr);
}

double flow_penalty(const FlowNetwork& net, double eps, Mode mode) {
  if (mode == Mode::Practical && net.lossless()) {
    double total = 0.0;
    for (const FlowEdge& e : net.edges) total += std::abs(static_cast<double>(e.cost));
    return 4.0 * (1.0 + total);
  }
  const double m = static_cast<double>(net.edges.size());
  const double U = flow_width(net);
  return 256.0 * std::pow(m, 5) * std::pow(U, 5) / (eps * eps);
}

ReducedLP build_flow_lp(const FlowNetwork& net, double F, double eps, Mode mode) {
  const SparseMat B = build_incidence(net);
  if (!(eps > 0.0)) throw Error(ErrorCode::PreconditionFailed, "eps must be positive");
  const Index m = B.rows();
  const Index k = B.cols();
  const double md = static_cast<double>(m);
  const double U = flow_width(net);
  if (!(F >= 0.0 && F <= md * U * U)) throw Error(ErrorCode::BadTarget, "target flow outside [0, m U^2]");
  ReducedLP R;
  R.M = flow_penalty(net, eps, mode);
  R.F = F;
  R.edges = m;
  R.slacks = k;

  std::vector<Eigen::Triplet<double>> tr;
  for (Index j = 0; j < B.outerSize(); ++j)
    for (SparseMat::InnerIterator it(B, j); it; ++it) tr.emplace_back(it.row(), j, it.value());
  for (Index v = 0; v < k; ++v) {
    tr.emplace_back(m + v, v, 1.0);
    tr.emplace_back(m + k + v, v, -1.0);
  }
  SparseMat A = make_sparse(m + 2 * k, k, tr);
  Vec b = Vec::Zero(k);
  b[vertex_column(net, net.t)] = F;
  Vec c(m + 2 * k);
  std::vector<Bound> lo, hi;
  Vec xcap(m);
  for (Index e = 0; e < m; ++e) {
    c[e] = static_cast<double>(net.edges[e].cost);
    xcap[e] = static_cast<double>(net.edges[e].cap);
    lo.push_back(Bound::finite(0.0));
    hi.push_back(Bound::finite(xcap[e]));
  }
  const Vec half = 0.5 * xcap;
  const Vec r = B.transpose() * half;
  // With the exact penalty any box around the start works; a tight one keeps the barrier well scaled.
  const bool exact = mode == Mode::Practical && net.lossless();
  const double base = exact ? 1.0 + r.cwiseAbs().maxCoeff() + F : 2.0 * md * U * U;
  const double top = exact ? 4.0 * base : 4.0 * md * U * U;
  for (Index v = 0; v < 2 * k; ++v) {
    c[m + v] = R.M;
    lo.push_back(Bound::finite(0.0));
    hi.push_back(Bound::finite(top));
  }

  Vec x0(m + 2 * k);
  x0.head(m) = half;
  for (Index v = 0; v < k; ++v) {
    x0[m + v] = base + std::max(-r[v], 0.0);
    x0[m + k + v] = base + std::max(r[v], 0.0);
  }
  x0[m + vertex_column(net, net.t)] += F;
  R.lp = make_lp(std::move(A), std::move(b), std::move(c), std::move(lo), std::move(hi), false);
  if (!interior(R.lp, x0)) throw Error(ErrorCode::BadTarget, "starting point is not interior");
  R.x0 = std::move(x0);
  return R;
}

FlowSolution solve_generalized_mcf(const FlowNetwork& net, double F, const FlowOptions& opts) {
  validate(net);
  const double eps = opts.eps > 0.0 ? opts.eps : default_eps(net);
  const double m = static_cast<double>(net.edges.size());
  const double U = flow_width(net);
  if (opts.mode == Mode::Practical && eps < 1e-3 / std::pow(m * U, 3))
    throw Error(ErrorCode::PreconditionFailed, "eps below 1e-3/(m^3 U^3)");
  const ReducedLP R = build_flow_lp(net, F, eps, opts.mode);
  const WeightParams p = weight_params(R.lp.m(), R.lp.n(), opts.mode);
  const SolveResult res = lp_solve(R.lp, R.x0, eps, p, opts.seed, opts.solve);
  FlowSolution out;
  out.report = res.report;
  out.eps = eps;
  out.flow = res.x.head(R.edges);
  out.slack = res.x.tail(2 * R.slacks).sum();
  out.value = F;
  out.cost = 0.0;
  for (Index e = 0; e < R.edges; ++e) out.cost += static_cast<double>(net.edges[e].cost) * out.flow[e];
  out.approximate = true;
  if (out.slack >= eps) throw Error(ErrorCode::TargetInfeasible, "slack variables remain above eps");
  return out;
}

FlowSolution solve_max_flow(const FlowNetwork& net, const FlowOptions& opts) {
  validate(net);
  if (!net.lossless()) throw Error(ErrorCode::UnsupportedFeature, "max flow needs multipliers equal to 1");
  return solve_circulation(net, with_return_edge(net, -1, true), opts);
}

FlowSolution solve_min_cost_flow(const FlowNetwork& net, const FlowOptions& opts) {
  validate(net);
  if (!net.lossless()) throw Error(ErrorCode::UnsupportedFeature, "min cost flow needs multipliers equal to 1");
  long long total = 0;
  for (const FlowEdge& e : net.edges) total += std::abs(e.cost);
  // A unit of extra flow is worth more than any change in routing cost.
  return solve_circulation(net, with_return_edge(net, -(total + 1), false), opts);
}

std::vector<long long> round_flow(const Vec& x_lp, const FlowNetwork& net, bool circulation, int* cycles_canceled) {
  validate(net);
  if (!net.lossless()) throw Error(ErrorCode::UnsupportedFeature, "rounding needs multipliers equal to 1");
  const int m = static_cast<int>(net.edges.size());
  if (x_lp.size() != m) throw Error(ErrorCode::ShapeMismatch, "one flow value per edge expected");
  std::vector<long long> f(m);
  for (int e = 0; e < m; ++e) {
    const double v = std::clamp(x_lp[e], 0.0, static_cast<double>(net.edges[e].cap));
    f[e] = std::llround(v);
  }
  Residual res{net, f};
  auto conserved = [&](int v) { return circulation || (v != net.s && v != net.t); };
  std::vector<long long> excess(net.n, 0);
  auto recount = [&] {
    std::fill(excess.begin(), excess.end(), 0);
    for (int e = 0; e < m; ++e) {
      excess[net.edges[e].head] += f[e];
      excess[net.edges[e].tail] -= f[e];
    }
  };
  recount();
  for (int guard = 0;; ++guard) {
    int v = -1;
    for (int u = 0; u < net.n && v < 0; ++u)
      if (conserved(u) && excess[u] != 0) v = u;
    if (v < 0) break;
    if (guard > 4 * m * net.n) throw Error(ErrorCode::RoundingFailed, "conservation repair did not terminate");
    const bool surplus = excess[v] > 0;
    int u = -1;
    auto goal = [&](int w) { return !conserved(w) || (surplus ? excess[w] < 0 : excess[w] > 0); };
    const std::vector<int> path = residual_path(res, v, !surplus, goal, &u);
    if (path.empty()) throw Error(ErrorCode::RoundingFailed, "no residual path to restore conservation");
    long long amount = std::min(std::abs(excess[v]), bottleneck(res, path));
    if (conserved(u)) amount = std::min(amount, std::abs(excess[u]));
    for (int k : path) res.push(k, amount);
    recount();
  }
  int canceled = 0;
  for (;;) {
    const std::vector<int> cycle = negative_cycle(res);
    if (cycle.empty()) break;
    if (canceled >= m) throw Error(ErrorCode::RoundingFailed, "negative cycles remain after m cancellations");
    const long long amount = bottleneck(res, cycle);
    for (int k : cycle) res.push(k, amount);
    ++canceled;
  }
  if (cycles_canceled) *cycles_canceled = canceled;
  return f;
}

}  // namespace wpath
