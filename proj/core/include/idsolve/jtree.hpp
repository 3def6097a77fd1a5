#pragma once

#include <string>
#include <vector>

#include "idsolve/model.hpp"

namespace idsolve {

// Total elimination order, eliminated-first at position 0. Its reverse
// respects the temporal order: later information sets are eliminated first.
struct StrongEliminationOrder {
  std::vector<VarId> order;
  std::vector<int> position;  // position[v] = index of v in order
};

// Optional tie-break permutation for min-fill (tests perturb it to check
// that the solved value is order-independent). ranking[v] gives the
// preference key; lower wins among equal fill counts.
StrongEliminationOrder strong_elimination_order(const UndirectedGraph& moral,
                                                const InfluenceDiagram& id,
                                                const InformationPartition& part,
                                                const std::vector<int>* tie_ranking = nullptr);

struct StrongJunctionTree {
  std::vector<std::vector<VarId>> cliques;      // sorted member lists
  std::vector<int> parent;                      // parent clique index; -1 at root
  std::vector<std::vector<VarId>> separators;   // intersection with parent
  std::vector<std::vector<int>> children_of;    // child clique indices
  int root = -1;                                // strong root
  std::vector<int> rank;                        // construction numbering

  bool contains(int clique, VarId v) const;
};

StrongJunctionTree build_strong_tree(const UndirectedGraph& moral,
                                     const StrongEliminationOrder& order);

// Each model potential bound to the lowest-numbered clique covering its
// domain; potentials are never combined here.
struct CliqueBinding {
  std::vector<std::vector<int>> prob_blocks;  // per clique: indices into prob_blocks
  std::vector<std::vector<int>> utilities;    // per clique: indices into utilities
};

CliqueBinding assign_potentials(const InfluenceDiagram& id, const StrongJunctionTree& tree);

// Variables preceding d in the clique containing d closest to the root:
// the decision-rule domain for d. Sorted by id.
std::vector<VarId> relevant_past(const StrongJunctionTree& tree, const InfluenceDiagram& id,
                                 const InformationPartition& part, VarId d);

// Indented debug dump, one clique per line with separator annotations.
std::string dump_tree(const StrongJunctionTree& tree, const InfluenceDiagram& id);

}  // namespace idsolve
