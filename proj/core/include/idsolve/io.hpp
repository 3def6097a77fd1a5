#pragma once

#include <string>

#include "idsolve/model.hpp"
#include "idsolve/strategy.hpp"

namespace idsolve {

// Line-oriented model format, sections in order:
//   @variables   <name> chance|decision <state,list>
//   @arcs        <parent> -> <child>
//   @cpt <heads...> | <parents...>   one number row per parent configuration
//   @utility <name> | <vars...>      row-major block, first listed slowest
//   @order       decision names in temporal order
// '#' starts a comment. Diagnostics carry line numbers.
InfluenceDiagram parse_model(const std::string& text);
InfluenceDiagram parse_model_file(const std::string& path);

// Canonical rendering; parse(serialize(parse(x))) yields an identical model.
std::string serialize_model(const InfluenceDiagram& id);

struct SolveReport {
  std::string engine;
  double meu = 0.0;
  std::vector<DecisionRule> rules;
  OpCounter ops;
  long long divisions_introduced = 0;
  long long divisions_executed = 0;
  bool has_compile = false;
  OpCounter compile_ops;
};

std::string report_text(const SolveReport& r, const InfluenceDiagram& id);
std::string report_json(const SolveReport& r, const InfluenceDiagram& id);

}  // namespace idsolve
