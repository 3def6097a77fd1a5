#pragma once

#include "idsolve/jtree.hpp"
#include "idsolve/strategy.hpp"

namespace idsolve {

// Eager strong-junction-tree baseline: clique potentials are combined up
// front, messages are (probability marginal, combined marginal) pairs, and
// every received utility message is divided by its probability part.
// Compilation cost is tallied separately from propagation cost.
struct HuginResult {
  Strategy strategy;
  OpCounter compile_ops;
  OpCounter prop_ops;
  StrongJunctionTree tree;
};

HuginResult solve_hugin(const InfluenceDiagram& id, const Evidence& ev);

}  // namespace idsolve
