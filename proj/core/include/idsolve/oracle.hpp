#pragma once

#include "idsolve/eliminate.hpp"
#include "idsolve/jtree.hpp"
#include "idsolve/strategy.hpp"

namespace idsolve {

// Exhaustive perfect-recall solver: maximizes over the full observed past at
// each decision by walking every joint configuration. The rule tables are
// projected onto the relevant past afterwards; the projection asserts that
// the optimal full-past rule is constant over the dropped variables.
struct BruteForceResult {
  Strategy strategy;               // rules over the relevant past V_D
  std::vector<DecisionRule> full;  // rules over the full observed past
};

BruteForceResult brute_force_solve(const InfluenceDiagram& id, const Evidence& ev,
                                   std::int64_t config_cap = 10'000'000);

// Direct variable elimination over the live potential sets in the given
// strong order: no tree, no pruning, divisions executed at introduction.
struct BucketResult {
  Strategy strategy;
  OpCounter ops;
  DivisionLedger divisions;
};

BucketResult bucket_eliminate(const InfluenceDiagram& id, const StrongEliminationOrder& order,
                              const Evidence& ev);
BucketResult bucket_eliminate(const InfluenceDiagram& id, const Evidence& ev);

// Expected total utility of an arbitrary strategy under the (restricted)
// joint, by exhaustive enumeration. Rule domains must be observed before
// their decision.
double evaluate_strategy(const InfluenceDiagram& id, const Evidence& ev,
                         const std::vector<DecisionRule>& rules);

}  // namespace idsolve
