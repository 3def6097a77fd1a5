#pragma once

#include <cstdint>
#include <vector>

#include "idsolve/model.hpp"

namespace idsolve {

// Optimal choice for one decision as a table over its rule domain.
struct DecisionRule {
  VarId decision = -1;
  std::vector<VarId> domain;  // sorted; the relevant past
  std::vector<int> table;     // winning state per domain configuration
  std::vector<std::uint8_t> tie;
  bool arbitrary = false;  // barren decision: any alternative is optimal
};

struct Strategy {
  std::vector<DecisionRule> rules;  // ordered as decision_order
  double meu = 0.0;
};

// Expands an argmax table onto a (super)set domain; the rule is constant
// over the added variables.
DecisionRule broadcast_rule(const InfluenceDiagram& id, VarId decision,
                            const std::vector<VarId>& from_dom, const std::vector<int>& winners,
                            const std::vector<std::uint8_t>& ties,
                            const std::vector<VarId>& to_dom, bool arbitrary);

}  // namespace idsolve
