#include "idsolve/cli.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "idsolve/hugin.hpp"
#include "idsolve/io.hpp"
#include "idsolve/lazy.hpp"
#include "idsolve/oracle.hpp"

namespace idsolve::cli {

namespace {

Evidence parse_evidence(const InfluenceDiagram& id, const std::vector<std::string>& specs) {
  Evidence ev;
  for (const auto& s : specs) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ModelError("evidence must be VAR=state, got '" + s + "'");
    std::string name = s.substr(0, eq);
    std::string state = s.substr(eq + 1);
    auto v = id.find_var(name);
    if (!v) throw ModelError("evidence on unknown variable '" + name + "'");
    const auto& states = id.var(*v).states;
    int idx = -1;
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i] == state) idx = static_cast<int>(i);
    if (idx < 0) {
      try {
        std::size_t pos = 0;
        int n = std::stoi(state, &pos);
        if (pos == state.size() && n >= 0 && n < id.card(*v)) idx = n;
      } catch (...) {
      }
    }
    if (idx < 0)
      throw ModelError("unknown state '" + state + "' for variable '" + name + "'");
    ev[*v] = idx;
  }
  return ev;
}

SolveReport run_engine(const InfluenceDiagram& id, const Evidence& ev, const std::string& engine,
                       bool no_prune, bool force_divide) {
  SolveReport r;
  r.engine = engine;
  if (engine == "lazy") {
    LazyOptions opt;
    opt.prune = !no_prune;
    opt.force_divide = force_divide;
    auto res = solve_lazy(id, ev, opt);
    r.meu = res.strategy.meu;
    r.rules = res.strategy.rules;
    r.ops = res.ops;
    r.divisions_introduced = res.divisions.introduced;
    r.divisions_executed = res.ops.div;
  } else if (engine == "hugin") {
    auto res = solve_hugin(id, ev);
    r.meu = res.strategy.meu;
    r.rules = res.strategy.rules;
    r.ops = res.prop_ops;
    r.divisions_executed = res.prop_ops.div;
    r.has_compile = true;
    r.compile_ops = res.compile_ops;
  } else if (engine == "ve") {
    auto res = bucket_eliminate(id, ev);
    r.meu = res.strategy.meu;
    r.rules = res.strategy.rules;
    r.ops = res.ops;
    r.divisions_introduced = res.divisions.introduced;
    r.divisions_executed = res.ops.div;
  } else if (engine == "brute") {
    auto res = brute_force_solve(id, ev);
    r.meu = res.strategy.meu;
    r.rules = res.strategy.rules;
  } else {
    throw ModelError("unknown engine '" + engine + "'");
  }
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"influence diagram solver"};
  app.require_subcommand(1);

  std::string file, engine = "lazy";
  std::vector<std::string> evidence_specs;
  bool json = false, dump_tree_flag = false, no_prune = false, force_divide = false;

  auto* solve = app.add_subcommand("solve", "solve a model with one engine");
  solve->add_option("file", file, "model file")->required();
  solve->add_option("--engine", engine, "lazy|hugin|ve|brute")->capture_default_str();
  solve->add_option("--evidence", evidence_specs, "VAR=state (repeatable)");
  solve->add_flag("--json", json, "emit the report as JSON");
  solve->add_flag("--dump-tree", dump_tree_flag, "print the strong junction tree");
  solve->add_flag("--no-prune", no_prune, "disable relevance and barren pruning (lazy)");
  solve->add_flag("--force-divide", force_divide, "execute divisions at introduction (lazy)");

  auto* compare = app.add_subcommand("compare", "run all engines and compare");
  compare->add_option("file", file, "model file")->required();
  compare->add_option("--evidence", evidence_specs, "VAR=state (repeatable)");
  compare->add_flag("--dump-tree", dump_tree_flag, "print the strong junction tree");

  std::vector<const char*> argv;
  argv.push_back("idsolve");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    InfluenceDiagram id = parse_model_file(file);
    Evidence ev = parse_evidence(id, evidence_specs);

    if (dump_tree_flag) {
      auto part = information_partition(id);
      auto moral = moral_graph(id);
      auto order = strong_elimination_order(moral, id, part);
      auto tree = build_strong_tree(moral, order);
      std::cout << dump_tree(tree, id);
    }

    if (solve->parsed()) {
      SolveReport r = run_engine(id, ev, engine, no_prune, force_divide);
      std::cout << (json ? report_json(r, id) : report_text(r, id));
      return 0;
    }

    // compare: every engine, one table, agreement check
    std::vector<SolveReport> reports;
    for (const char* e : {"ve", "lazy", "hugin"})
      reports.push_back(run_engine(id, ev, e, false, false));
    bool brute_ok = true;
    try {
      reports.push_back(run_engine(id, ev, "brute", false, false));
    } catch (const ModelError&) {
      brute_ok = false;  // state space above the brute-force cap
    }

    std::printf("%-8s %-14s %8s %8s %8s %8s %8s %10s %10s %10s\n", "engine", "meu", "mul", "add",
                "div", "max", "total", "div.intro", "div.exec", "compile");
    for (const auto& r : reports) {
      char meu[32];
      std::snprintf(meu, sizeof meu, "%.9g", r.meu);
      if (r.engine == "brute") {
        std::printf("%-8s %-14s %8s %8s %8s %8s %8s %10s %10s %10s\n", r.engine.c_str(), meu, "-",
                    "-", "-", "-", "-", "-", "-", "-");
      } else {
        std::printf("%-8s %-14s %8lld %8lld %8lld %8lld %8lld %10lld %10lld %10lld\n",
                    r.engine.c_str(), meu, r.ops.mul, r.ops.add, r.ops.div, r.ops.max,
                    r.ops.total(), r.divisions_introduced, r.divisions_executed,
                    r.has_compile ? r.compile_ops.total() : 0LL);
      }
    }
    if (!brute_ok) std::printf("brute    skipped: state space above the enumeration cap\n");

    double ref = reports[0].meu;
    for (const auto& r : reports)
      if (std::fabs(r.meu - ref) > 1e-9) {
        std::printf("DISAGREEMENT: %s meu %.12g differs from %s meu %.12g\n", r.engine.c_str(),
                    r.meu, reports[0].engine.c_str(), ref);
        return 3;
      }
    std::printf("agreement: all engines within 1e-9\n");
    return 0;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const PotentialError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace idsolve::cli
