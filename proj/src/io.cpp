#include "wpath/io.hpp"

#include "wpath/pathfollow.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace wpath {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

template <typename T>
T number(const std::string& tok, int line) {
  T v{};
  const char* end = tok.data() + tok.size();
  const auto [p, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || p != end) parse_fail(line, "expected a number, got '" + tok + "'");
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Json& field(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  return j.at(key);
}

Vec vector_field(const Json& j, const char* key, Index expect) {
  const Json& a = field(j, key);
  if (!a.is_array()) throw Error(ErrorCode::ParseError, std::string("'") + key + "' must be an array");
  if (static_cast<Index>(a.size()) != expect)
    throw Error(ErrorCode::ShapeMismatch, std::string("'") + key + "' has length " + std::to_string(a.size()) +
                                              ", expected " + std::to_string(expect));
  Vec v(expect);
  for (Index i = 0; i < expect; ++i) {
    if (!a[i].is_number()) throw Error(ErrorCode::ParseError, std::string("'") + key + "' entries must be numbers");
    v[i] = a[i].get<double>();
  }
  return v;
}

std::vector<Bound> bound_field(const Json& j, const char* key, Index expect) {
  const Json& a = field(j, key);
  if (!a.is_array()) throw Error(ErrorCode::ParseError, std::string("'") + key + "' must be an array");
  if (static_cast<Index>(a.size()) != expect)
    throw Error(ErrorCode::ShapeMismatch, std::string("'") + key + "' must have one entry per row of A");
  std::vector<Bound> out;
  for (const Json& e : a) {
    if (e.is_null()) out.push_back(Bound::unbounded());
    else if (e.is_number()) out.push_back(Bound::finite(e.get<double>()));
    else throw Error(ErrorCode::ParseError, std::string("'") + key + "' entries must be numbers or null");
  }
  return out;
}

Json bound_json(const std::vector<Bound>& bs) {
  Json a = Json::array();
  for (const Bound& b : bs) a.push_back(b.infinite ? Json(nullptr) : Json(b.value));
  return a;
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::SolveLp: return "solve-lp";
    case Command::MaxFlow: return "max-flow";
    case Command::MinCostFlow: return "min-cost-flow";
    case Command::GenMcf: return "gen-mcf";
    case Command::Bench: return "bench";
  }
  return "unknown";
}

void add_report(Json& j, const SolveReport& r) {
  j["iterations"] = r.iterations;
  j["solves"] = r.solves;
  j["final_delta"] = r.final_delta;
  j["gap_bound"] = r.gap_bound;
  j["certificate"] = r.certificate;
  j["infeasibility"] = r.infeasibility;
  j["t"] = r.t;
  if (!r.warning.empty()) j["warning"] = r.warning;
}

void write_text(const Json& j, std::ostream& out) {
  for (const auto& [key, val] : j.items()) {
    out << key << ":";
    if (val.is_array()) {
      for (const Json& e : val) out << " " << e.dump();
    } else {
      out << " " << (val.is_string() ? val.get<std::string>() : val.dump());
    }
    out << "\n";
  }
}

int run_bench(const RunConfig& cfg, SolveOptions so, std::ostream& out) {
  out << "n,m,iterations,solves\n";
  for (int n : cfg.sizes) {
    const int m = 4 * n;
    const FlowNetwork net = generate_flow_network(n, m, 20, 20, cfg.seed + static_cast<std::uint64_t>(n));
    const FlowSolution sol = solve_min_cost_flow(net, {cfg.mode, cfg.eps, cfg.seed, so});
    out << n << "," << m << "," << sol.report.iterations << "," << sol.report.solves << "\n";
  }
  return 0;
}

}  // namespace

DimacsFile parse_dimacs_flow(const std::string& text) {
  DimacsFile f;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool have_p = false;
  long long n = 0, m = 0;
  int s = -1, t = -1;
  int src = -1, snk = -1;
  double demand = 0.0;
  while (std::getline(in, raw)) {
    ++line;
    const std::vector<std::string> tok = split(raw);
    if (tok.empty() || tok[0] == "c") continue;
    const std::string& kind = tok[0];
    if (kind == "p") {
      if (have_p) parse_fail(line, "second problem line");
      if (tok.size() != 4) parse_fail(line, "problem line must be 'p max|min N M'");
      if (tok[1] == "max") f.kind = DimacsKind::Max;
      else if (tok[1] == "min") f.kind = DimacsKind::Min;
      else parse_fail(line, "unknown problem type '" + tok[1] + "'");
      n = number<long long>(tok[2], line);
      m = number<long long>(tok[3], line);
      if (n < 2 || m < 0 || n > (1LL << 30)) parse_fail(line, "bad problem size");
      f.net.n = static_cast<int>(n);
      have_p = true;
      continue;
    }
    if (!have_p) parse_fail(line, "expected the problem line first");
    auto vertex = [&](const std::string& s_) {
      const long long v = number<long long>(s_, line);
      if (v < 1 || v > n) parse_fail(line, "vertex " + s_ + " out of range");
      return static_cast<int>(v - 1);
    };
    if (kind == "n") {
      if (tok.size() != 3) parse_fail(line, "node line must be 'n id s|t|flow'");
      const int v = vertex(tok[1]);
      if (tok[2] == "s") {
        s = v;
      } else if (tok[2] == "t") {
        t = v;
      } else {
        const double flow = number<double>(tok[2], line);
        if (flow > 0.0) {
          if (src >= 0) throw Error(ErrorCode::UnsupportedFeature, "line " + std::to_string(line) + ": several sources");
          src = v;
        } else if (flow < 0.0) {
          if (snk >= 0) throw Error(ErrorCode::UnsupportedFeature, "line " + std::to_string(line) + ": several sinks");
          snk = v;
          demand = -flow;
        }
      }
    } else if (kind == "a") {
      FlowEdge e;
      if (f.kind == DimacsKind::Max) {
        if (tok.size() != 4) parse_fail(line, "max-flow arc must be 'a u v cap'");
        e.cap = number<long long>(tok[3], line);
      } else {
        if (tok.size() != 6 && tok.size() != 8) parse_fail(line, "min-cost arc must be 'a u v low cap cost [gnum gden]'");
        if (number<long long>(tok[3], line) != 0)
          throw Error(ErrorCode::UnsupportedFeature, "line " + std::to_string(line) + ": lower bounds must be 0");
        e.cap = number<long long>(tok[4], line);
        e.cost = number<long long>(tok[5], line);
        if (tok.size() == 8) {
          e.gnum = number<long long>(tok[6], line);
          e.gden = number<long long>(tok[7], line);
        }
      }
      e.tail = vertex(tok[1]);
      e.head = vertex(tok[2]);
      f.net.edges.push_back(e);
    } else {
      parse_fail(line, "unknown line type '" + kind + "'");
    }
  }
  if (!have_p) throw Error(ErrorCode::ParseError, "missing problem line");
  if (static_cast<long long>(f.net.edges.size()) != m)
    throw Error(ErrorCode::ParseError, "problem line announces " + std::to_string(m) + " arcs, found " +
                                           std::to_string(f.net.edges.size()));
  if (s >= 0 || t >= 0) {
    if (s < 0 || t < 0) throw Error(ErrorCode::ParseError, "need both 'n id s' and 'n id t'");
    if (src >= 0 || snk >= 0) throw Error(ErrorCode::ParseError, "mixing s/t and supply node lines");
  } else {
    if (src < 0 || snk < 0) throw Error(ErrorCode::ParseError, "no source and sink given");
    s = src;
    t = snk;
    f.supply = demand;
  }
  f.net.s = s;
  f.net.t = t;
  validate(f.net);
  return f;
}

std::string emit_dimacs_flow(const DimacsFile& file) {
  const FlowNetwork& net = file.net;
  const bool max = file.kind == DimacsKind::Max;
  std::ostringstream out;
  out << "p " << (max ? "max" : "min") << " " << net.n << " " << net.edges.size() << "\n";
  if (file.supply) {
    out << std::setprecision(17);
    out << "n " << net.s + 1 << " " << *file.supply << "\n";
    out << "n " << net.t + 1 << " " << -*file.supply << "\n";
  } else {
    out << "n " << net.s + 1 << " s\n";
    out << "n " << net.t + 1 << " t\n";
  }
  for (const FlowEdge& e : net.edges) {
    out << "a " << e.tail + 1 << " " << e.head + 1;
    if (max) {
      if (e.cost != 0 || e.gnum != 1 || e.gden != 1)
        throw Error(ErrorCode::UnsupportedFeature, "max-flow files carry neither costs nor multipliers");
      out << " " << e.cap << "\n";
      continue;
    }
    out << " 0 " << e.cap << " " << e.cost;
    if (e.gnum != 1 || e.gden != 1) out << " " << e.gnum << " " << e.gden;
    out << "\n";
  }
  return out.str();
}

LpFile parse_lp_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "top level must be an object");
  const Json& jm = field(j, "m");
  const Json& jn = field(j, "n");
  if (!jm.is_number_integer() || !jn.is_number_integer() || jm.get<long long>() < 1 || jn.get<long long>() < 0)
    throw Error(ErrorCode::ParseError, "'m' and 'n' must be non-negative integers");
  const Index m = jm.get<Index>();
  const Index n = jn.get<Index>();
  const Json& ja = field(j, "A");
  if (!ja.is_array()) throw Error(ErrorCode::ParseError, "'A' must be an array of [i, j, v] triplets");
  std::vector<Eigen::Triplet<double>> tr;
  for (const Json& t : ja) {
    if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number_integer() || !t[2].is_number())
      throw Error(ErrorCode::ParseError, "'A' entries must be [i, j, v] with integer i, j");
    const Index i = t[0].get<Index>();
    const Index c = t[1].get<Index>();
    if (i < 0 || i >= m || c < 0 || c >= n) throw Error(ErrorCode::ShapeMismatch, "triplet index outside m x n");
    tr.emplace_back(i, c, t[2].get<double>());
  }
  LpFile f;
  Vec b = vector_field(j, "b", n);
  Vec c = vector_field(j, "c", m);
  std::vector<Bound> lo = bound_field(j, "l", m);
  std::vector<Bound> hi = bound_field(j, "u", m);
  f.lp = make_lp(make_sparse(m, n, tr), std::move(b), std::move(c), std::move(lo), std::move(hi));
  if (j.contains("x0") && !j.at("x0").is_null()) f.x0 = vector_field(j, "x0", m);
  return f;
}

std::string emit_lp_json(const BoxedLP& lp, const Vec* x0) {
  Json j;
  j["m"] = lp.m();
  j["n"] = lp.n();
  Json a = Json::array();
  for (Index col = 0; col < lp.A.outerSize(); ++col)
    for (SparseMat::InnerIterator it(lp.A, col); it; ++it) a.push_back(Json::array({it.row(), it.col(), it.value()}));
  j["A"] = std::move(a);
  j["b"] = vec_json(lp.b);
  j["c"] = vec_json(lp.c);
  j["l"] = bound_json(lp.lower);
  j["u"] = bound_json(lp.upper);
  if (x0) j["x0"] = vec_json(*x0);
  return j.dump(1) + "\n";
}

FlowNetwork generate_flow_network(int n, int m, long long max_cap, long long max_cost, std::uint64_t seed) {
  if (n < 2 || m < n - 1 || max_cap < 1 || max_cost < 0)
    throw Error(ErrorCode::PreconditionFailed, "need n >= 2, m >= n - 1, max_cap >= 1, max_cost >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long long> cap(1, max_cap);
  std::uniform_int_distribution<long long> cost(0, max_cost);
  std::uniform_int_distribution<int> vert(0, n - 1);
  FlowNetwork net;
  net.n = n;
  net.s = 0;
  net.t = n - 1;
  for (int v = 0; v + 1 < n; ++v) net.edges.push_back({v, v + 1, cap(rng), cost(rng), 1, 1});
  while (static_cast<int>(net.edges.size()) < m) {
    const int a = vert(rng);
    const int b = vert(rng);
    if (a != b) net.edges.push_back({a, b, cap(rng), cost(rng), 1, 1});
  }
  return net;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  if (!(cfg.eps >= 0.0) || !std::isfinite(cfg.eps)) {
    err << "error: --eps must be positive\n";
    return 2;
  }
  SolveOptions so;
  so.backend = cfg.backend;
  so.max_iters = cfg.max_iters;

  if (cfg.command == Command::Bench) {
    try {
      return run_bench(cfg, so, out);
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return 3;
    }
  }

  LpFile lp_file;
  DimacsFile flow_file;
  double target = 0.0;
  try {
    const std::string text = read_file(cfg.input);
    if (cfg.command == Command::SolveLp) {
      lp_file = parse_lp_json(text);
      if (!lp_file.x0)
        throw Error(ErrorCode::ParseError, "no 'x0': supply a strictly interior point with A^T x0 = b");
    } else {
      flow_file = parse_dimacs_flow(text);
      if (cfg.command == Command::GenMcf) {
        if (cfg.flow) target = *cfg.flow;
        else if (flow_file.supply) target = *flow_file.supply;
        else throw Error(ErrorCode::ParseError, "gen-mcf needs a target: pass --flow or use 'n id flow' lines");
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  Json j;
  j["schema"] = 1;
  j["command"] = command_name(cfg.command);
  j["mode"] = cfg.mode == Mode::Paper ? "paper" : "practical";
  j["seed"] = cfg.seed;
  try {
    if (cfg.command == Command::SolveLp) {
      const BoxedLP& lp = lp_file.lp;
      const double eps = cfg.eps > 0.0 ? cfg.eps : 1e-4;
      const WeightParams p = weight_params(lp.m(), lp.n(), cfg.mode);
      const SolveResult res = lp_solve(lp, *lp_file.x0, eps, p, cfg.seed, so);
      j["eps"] = eps;
      j["objective"] = res.report.objective;
      add_report(j, res.report);
      j["x"] = vec_json(res.x);
    } else {
      const FlowOptions fo{cfg.mode, cfg.eps, cfg.seed, so};
      const FlowNetwork& net = flow_file.net;
      FlowSolution sol;
      if (cfg.command == Command::MaxFlow) sol = solve_max_flow(net, fo);
      else if (cfg.command == Command::MinCostFlow) sol = solve_min_cost_flow(net, fo);
      else sol = solve_generalized_mcf(net, target, fo);
      j["eps"] = sol.eps;
      j["objective"] = sol.report.objective;
      j["value"] = sol.value;
      j["cost"] = sol.cost;
      j["approximate"] = sol.approximate;
      j["slack"] = sol.slack;
      j["cycles_canceled"] = sol.cycles_canceled;
      add_report(j, sol.report);
      j["flow"] = vec_json(sol.flow);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  j["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (cfg.format == Format::Json) out << j.dump(2) << "\n";
  else write_text(j, out);
  return 0;
}

}  // namespace wpath
