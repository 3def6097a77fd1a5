#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "idsolve/potential.hpp"

namespace idsolve {

class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

enum class VarKind { Chance, Decision };

struct Variable {
  VarId id = -1;
  std::string name;
  VarKind kind = VarKind::Chance;
  std::vector<std::string> states;
};

// One probability block: a CPT, or a joint over several chance variables
// (head of size > 1). Table layout: tail configurations slowest, head
// configurations fastest, each in listed order.
struct ProbabilityBlock {
  std::vector<VarId> head;
  std::vector<VarId> tail;
  std::vector<double> table;
};

struct UtilityBlock {
  std::string name;
  std::vector<VarId> domain;
  std::vector<double> table;
};

// Chance variables grouped by the decision they inform first. sets[k] is
// observed between decisions k and k+1; the last set is never observed.
struct InformationPartition {
  std::vector<std::vector<VarId>> sets;
};

using Evidence = std::map<VarId, int>;

struct UndirectedGraph {
  int n = 0;
  std::vector<std::set<int>> adj;

  explicit UndirectedGraph(int nodes = 0) : n(nodes), adj(static_cast<std::size_t>(nodes)) {}
  void connect(int a, int b) {
    if (a == b) return;
    adj[static_cast<std::size_t>(a)].insert(b);
    adj[static_cast<std::size_t>(b)].insert(a);
  }
  bool edge(int a, int b) const { return adj[static_cast<std::size_t>(a)].count(b) > 0; }
};

class InfluenceDiagram : public DomainInfo {
 public:
  std::vector<Variable> variables;
  // All stored arcs. Arcs into chance variables are probabilistic, arcs into
  // decision variables are informational. No-forgetting arcs are never
  // materialized.
  std::vector<std::vector<VarId>> parents;
  std::vector<ProbabilityBlock> prob_blocks;
  std::vector<UtilityBlock> utilities;
  std::vector<VarId> decision_order;

  int card(VarId v) const override {
    return static_cast<int>(variables[static_cast<std::size_t>(v)].states.size());
  }
  const Variable& var(VarId v) const { return variables[static_cast<std::size_t>(v)]; }
  int num_vars() const { return static_cast<int>(variables.size()); }
  bool is_decision(VarId v) const { return var(v).kind == VarKind::Decision; }
  bool is_chance(VarId v) const { return var(v).kind == VarKind::Chance; }
  std::optional<VarId> find_var(const std::string& name) const;

  // Validates every structural invariant; throws ModelError naming the first
  // violation. Called by the builders; cheap enough to re-run.
  void validate() const;

  std::vector<std::set<VarId>> children() const;
  std::set<VarId> descendants(VarId v) const;
};

InformationPartition information_partition(const InfluenceDiagram& id);

// Precedence blocks of the temporal order: I0 < D1 < I1 < ... block(v) is
// 2k for chance in set k and 2j-1 for the j-th decision (1-based).
std::vector<int> precedence_blocks(const InfluenceDiagram& id,
                                   const InformationPartition& part);
inline bool strictly_precedes(const std::vector<int>& block, VarId a, VarId b) {
  return block[static_cast<std::size_t>(a)] < block[static_cast<std::size_t>(b)];
}

// Moralization: informational arcs dropped, every probability-block and
// utility domain completed to a clique, directions dropped.
UndirectedGraph moral_graph(const InfluenceDiagram& id);

// Evidence legality for a full-strategy solve: only initially observed
// variables (the first information set) may be instantiated.
void check_evidence(const InfluenceDiagram& id, const InformationPartition& part,
                    const Evidence& ev);

// Model potentials in canonical form (probability blocks with head split,
// then utilities), restricted by the given evidence.
struct ModelPotentials {
  std::vector<PPot> probabilities;
  std::vector<PPot> utilities;
};
ModelPotentials model_potentials(const InfluenceDiagram& id, const Evidence& ev);

}  // namespace idsolve
