#ifndef WPATH_FLOW_HPP
#define WPATH_FLOW_HPP

#include "wpath/common.hpp"
#include "wpath/lp.hpp"
#include "wpath/pathfollow.hpp"

#include <cstdint>
#include <vector>

namespace wpath {

struct FlowEdge {
  int tail = 0;
  int head = 0;
  long long cap = 1;
  long long cost = 0;
  long long gnum = 1;  // multiplier gnum/gden, 0 < gamma <= 1
  long long gden = 1;
  double gamma() const { return static_cast<double>(gnum) / static_cast<double>(gden); }
};

// Vertices are 0..n-1.
struct FlowNetwork {
  int n = 0;
  int s = 0;
  int t = 1;
  std::vector<FlowEdge> edges;
  bool lossless() const;
};

// Throws MalformedNetwork for bad endpoints, self loops, capacities or multipliers.
void validate(const FlowNetwork& net);

// max(capacity, |cost|, multiplier numerators and denominators), at least 1.
double flow_width(const FlowNetwork& net);

// Column of vertex v != s in the incidence matrix.
inline int vertex_column(const FlowNetwork& net, int v) { return v < net.s ? v : v - 1; }

// |E| x (n-1): +gamma at the head column, -1 at the tail column; s has no column.
SparseMat build_incidence(const FlowNetwork& net);

// min q^T x + M (1^T y + 1^T z)  s.t.  B^T x + y - z = F e_t,  0 <= x <= c,  0 <= y, z <= 4 m U^2.
// Practical mode on lossless networks shrinks the y, z box to 4(1 + |B^T c/2|_inf + F).
struct ReducedLP {
  BoxedLP lp;
  Vec x0;
  double M = 0.0;
  double F = 0.0;
  Index edges = 0;
  Index slacks = 0;  // n - 1
};

// M = 256 m^5 U^5 / eps^2 in paper mode. Practical mode on lossless networks
// uses the exact penalty 4(1 + sum |q_e|) instead.
double flow_penalty(const FlowNetwork& net, double eps, Mode mode);

ReducedLP build_flow_lp(const FlowNetwork& net, double F, double eps, Mode mode = Mode::Paper);

struct FlowSolution {
  Vec flow;  // per edge of the input network
  double value = 0.0;
  double cost = 0.0;
  bool approximate = true;
  double eps = 0.0;
  double slack = 0.0;  // 1^T y + 1^T z at the LP solution
  int cycles_canceled = 0;
  SolveReport report;
};

struct FlowOptions {
  Mode mode = Mode::Practical;
  double eps = 0.0;  // 0: 1/(10 m U)
  std::uint64_t seed = 0;
  SolveOptions solve;
};

FlowSolution solve_generalized_mcf(const FlowNetwork& net, double F, const FlowOptions& opts = {});
FlowSolution solve_max_flow(const FlowNetwork& net, const FlowOptions& opts = {});
FlowSolution solve_min_cost_flow(const FlowNetwork& net, const FlowOptions& opts = {});

// Rounds a near-integral flow on a lossless network, restores conservation
// along residual paths, then cancels negative cycles (at most one per edge).
// Conservation is enforced at every vertex but s and t, or at every vertex
// when circulation is set. Throws RoundingFailed if either stage cannot finish.
std::vector<long long> round_flow(const Vec& x_lp, const FlowNetwork& net, bool circulation = false,
                                  int* cycles_canceled = nullptr);

}  // namespace wpath

#endif
