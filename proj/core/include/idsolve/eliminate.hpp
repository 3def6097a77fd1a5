#pragma once

#include <optional>
#include <set>
#include <vector>

#include "idsolve/model.hpp"
#include "idsolve/potential.hpp"

namespace idsolve {

// Live decomposed potential sets during a solve.
struct LiveSet {
  std::vector<PPot> probs;
  std::vector<PPot> utils;
};

struct DivisionLedger {
  long long introduced = 0;  // cells of postponed quotients at introduction
};

struct ElimContext {
  const InfluenceDiagram* id = nullptr;
  OpCounter* ctr = nullptr;
  DivisionLedger* divisions = nullptr;
  // Execute each introduced division at once instead of postponing it
  // (the direct variable-elimination discipline, and --force-divide).
  bool immediate_divide = false;
  // Permit the distributed product form when its predicted scalar-op cost is
  // strictly smaller than the combined form. Off, every elimination combines
  // the utility sum first.
  bool allow_distribute = true;
  // Structural unity rule; force-disabled by the verification build of the
  // acceptance suite.
  bool unity_detection = true;
  // Observed structural-unity events, for instrumentation.
  std::vector<std::vector<VarId>>* unity_log = nullptr;
};

// Removes the variable y from the live sets: all potentials mentioning y
// (directly or through a pending divisor) are replaced by the marginal pair.
// Returns the argmax record when y is a decision that met a utility.
std::optional<ArgmaxRecord> eliminate_variable(LiveSet& live, VarId y, ElimContext& cx);

// Folds the remaining scalar potentials into the final expected utility.
// Pending divisors cancel against identical scalar factors; leftovers are
// executed.
double finalize_scalars(LiveSet& live, ElimContext& cx);

// Internal elimination order for one batch: temporal blocks latest-first;
// within a block probabilistic barren variables go first unless eliminating
// a non-barren variable shrinks a utility domain without waking a barren
// one; remaining ties by min-fill on the live domain graph, then lowest id.
std::vector<VarId> choose_internal_order(const std::set<VarId>& vars, const LiveSet& live,
                                         const InfluenceDiagram& id,
                                         const std::vector<int>& blocks);

// Variables occurring in any live domain or pending divisor.
std::set<VarId> live_vars(const LiveSet& live);

}  // namespace idsolve
