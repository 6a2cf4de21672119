#ifndef WPATH_TESTS_FIXTURES_HPP
#define WPATH_TESTS_FIXTURES_HPP

#include "wpath/flow.hpp"
#include "wpath/lp.hpp"
#include "wpath/linalg.hpp"

#include <random>
#include <vector>

namespace fixture {

using namespace wpath;

inline SparseMat random_matrix(std::mt19937_64& rng, Index m, Index n) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<Eigen::Triplet<double>> tr;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) tr.emplace_back(i, j, U(rng));
  return make_sparse(m, n, tr);
}

inline Vec random_positive(std::mt19937_64& rng, Index m, double lo = 0.2, double hi = 5.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  Vec v(m);
  for (Index i = 0; i < m; ++i) v[i] = U(rng);
  return v;
}

struct Instance {
  BoxedLP lp;
  Vec x0;
  Vec lo, hi;
};

// Dense random A, finite boxes, b = A^T x0 for an interior x0.
inline Instance random_lp(std::mt19937_64& rng, Index m, Index n) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  SparseMat A = random_matrix(rng, m, n);
  Instance inst;
  inst.x0.resize(m);
  inst.lo.resize(m);
  inst.hi.resize(m);
  Vec c(m);
  std::vector<Bound> lo, hi;
  for (Index i = 0; i < m; ++i) {
    const double l = U(rng);
    const double u = l + 0.5 + std::abs(U(rng));
    inst.lo[i] = l;
    inst.hi[i] = u;
    lo.push_back(Bound::finite(l));
    hi.push_back(Bound::finite(u));
    inst.x0[i] = l + (u - l) * (0.2 + 0.3 * (U(rng) + 1.0));
    c[i] = U(rng);
  }
  Vec b = A.transpose() * inst.x0;
  inst.lp = make_lp(std::move(A), std::move(b), std::move(c), std::move(lo), std::move(hi));
  return inst;
}

// Connected s-t network: a Hamiltonian path 0 -> n-1 plus random extra arcs.
inline FlowNetwork random_network(std::mt19937_64& rng, int n, int m, long long max_cap, long long max_cost) {
  FlowNetwork net;
  net.n = n;
  net.s = 0;
  net.t = n - 1;
  auto cap = [&] { return 1 + static_cast<long long>(rng() % static_cast<unsigned long long>(max_cap)); };
  auto cost = [&] { return static_cast<long long>(rng() % static_cast<unsigned long long>(max_cost + 1)); };
  for (int v = 0; v + 1 < n; ++v) net.edges.push_back({v, v + 1, cap(), cost(), 1, 1});
  while (static_cast<int>(net.edges.size()) < m) {
    const int a = static_cast<int>(rng() % static_cast<unsigned long long>(n));
    const int b = static_cast<int>(rng() % static_cast<unsigned long long>(n));
    if (a == b) continue;
    net.edges.push_back({a, b, cap(), cost(), 1, 1});
  }
  return net;
}

}  // namespace fixture

#endif
