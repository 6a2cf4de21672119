#include "wpath/io.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char** argv) {
  using namespace wpath;
  CLI::App app{"Weighted path finding LP and flow solver"};
  app.require_subcommand(1);

  RunConfig cfg;
  double flow = 0.0;
  const std::map<std::string, Mode> modes{{"practical", Mode::Practical}, {"paper", Mode::Paper}};
  const std::map<std::string, Backend> backends{{"auto", Backend::Auto}, {"direct", Backend::Direct}, {"cg", Backend::ConjugateGradient}};
  const std::map<std::string, Format> formats{{"json", Format::Json}, {"text", Format::Text}};

  auto common = [&](CLI::App* sub) {
    sub->add_option("--eps", cfg.eps, "target accuracy");
    sub->add_option("--mode", cfg.mode, "paper or practical")->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--backend", cfg.backend, "auto, direct or cg")
        ->transform(CLI::CheckedTransformer(backends, CLI::ignore_case));
    sub->add_option("--max-iters", cfg.max_iters, "iteration limit, 0 for none");
  };
  auto with_input = [&](CLI::App* sub) {
    common(sub);
    sub->add_option("input", cfg.input, "input file")->required();
    sub->add_option("--format", cfg.format, "json or text")->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  };

  CLI::App* lp = app.add_subcommand("solve-lp", "solve a JSON boxed LP from its interior point x0");
  with_input(lp);
  CLI::App* mf = app.add_subcommand("max-flow", "exact s-t maximum flow of a DIMACS network");
  with_input(mf);
  CLI::App* mc = app.add_subcommand("min-cost-flow", "exact minimum cost maximum flow of a DIMACS network");
  with_input(mc);
  CLI::App* gm = app.add_subcommand("gen-mcf", "approximate generalized minimum cost flow");
  with_input(gm);
  CLI::Option* flow_opt = gm->add_option("--flow", flow, "flow to deliver to t");
  CLI::App* bench = app.add_subcommand("bench", "iteration counts on random min-cost-flow instances, as CSV");
  common(bench);
  bench->add_option("--sizes", cfg.sizes, "vertex counts")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (lp->parsed()) cfg.command = Command::SolveLp;
  else if (mf->parsed()) cfg.command = Command::MaxFlow;
  else if (mc->parsed()) cfg.command = Command::MinCostFlow;
  else if (gm->parsed()) cfg.command = Command::GenMcf;
  else cfg.command = Command::Bench;
  if (flow_opt->count() > 0) cfg.flow = flow;

  return run(cfg, std::cout, std::cerr);
}
