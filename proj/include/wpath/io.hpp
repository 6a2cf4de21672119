#ifndef WPATH_IO_HPP
#define WPATH_IO_HPP

#include "wpath/common.hpp"
#include "wpath/flow.hpp"
#include "wpath/linalg.hpp"
#include "wpath/lp.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wpath {

enum class DimacsKind { Max, Min };

struct DimacsFile {
  FlowNetwork net;
  DimacsKind kind = DimacsKind::Max;
  std::optional<double> supply;  // set when s and t come from `n id flow` lines
};

// DIMACS max / min flow text, 1-based vertices. Min-cost arcs are
// `a u v low cap cost [gnum gden]`; the two trailing columns give gamma = gnum/gden.
// Throws ParseError (with the line number) or UnsupportedFeature for low != 0.
DimacsFile parse_dimacs_flow(const std::string& text);
std::string emit_dimacs_flow(const DimacsFile& file);

struct LpFile {
  BoxedLP lp;
  std::optional<Vec> x0;
};

// {"m", "n", "A": [[i, j, v], ...], "b", "c", "l", "u", "x0"?}; null bounds are infinite.
LpFile parse_lp_json(const std::string& text);
std::string emit_lp_json(const BoxedLP& lp, const Vec* x0 = nullptr);

// Bench family: a path s -> t through every vertex plus random extra arcs.
FlowNetwork generate_flow_network(int n, int m, long long max_cap, long long max_cost, std::uint64_t seed);

enum class Command { SolveLp, MaxFlow, MinCostFlow, GenMcf, Bench };
enum class Format { Json, Text };

struct RunConfig {
  Command command = Command::SolveLp;
  std::string input;
  double eps = 0.0;  // 0: 1e-4 for LPs, 1/(10 m U) for flows
  Mode mode = Mode::Practical;
  std::uint64_t seed = 0;
  Backend backend = Backend::Auto;
  Format format = Format::Json;
  long long max_iters = 0;
  std::optional<double> flow;  // gen-mcf target, overrides the file
  std::vector<int> sizes = {16, 32, 64, 128};  // bench
};

// Exit code 0 on success, 2 on unreadable or malformed input, 3 on solver failure.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace wpath

#endif
