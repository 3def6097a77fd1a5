#pragma once

#include <set>
#include <vector>

#include "idsolve/eliminate.hpp"
#include "idsolve/jtree.hpp"
#include "idsolve/strategy.hpp"

namespace idsolve {

struct LazyOptions {
  bool prune = true;          // relevance and barren pruning (Alg. 5.4 style)
  bool force_divide = false;  // execute divisions at introduction
  bool unity_detection = true;
  bool reverse_children = false;  // permute child-visit order (test hook)
};

struct LazyResult {
  Strategy strategy;
  OpCounter ops;
  DivisionLedger divisions;
  StrongJunctionTree tree;
  std::vector<std::vector<VarId>> unity_events;  // domains of skipped unity marginals
};

// Keeps potentials that can matter for the separator: anything with a
// variable d-connected to S or to a utility, every evidence-carrying
// likelihood term, and every pending divisor of a surviving utility; then
// recursively drops probability potentials whose heads are all barren.
LiveSet relevant_potentials(const LiveSet& live, const std::set<VarId>& separator,
                            const InfluenceDiagram& id);

// One absorption: prunes the live set and eliminates everything outside the
// separator, in the on-line internal order.
struct MessageSink {
  std::vector<std::pair<VarId, ArgmaxRecord>>* records = nullptr;
};

LiveSet absorb(LiveSet live, const std::set<VarId>& separator, const InfluenceDiagram& id,
               const InformationPartition& part, const LazyOptions& opt, ElimContext& cx,
               MessageSink sink);

LazyResult solve_lazy(const InfluenceDiagram& id, const Evidence& ev,
                      const LazyOptions& opt = {});

}  // namespace idsolve
