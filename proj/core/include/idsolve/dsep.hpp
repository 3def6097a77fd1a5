#pragma once

#include <set>
#include <vector>

#include "idsolve/potential.hpp"

namespace idsolve {

// Directed domain graph induced by a set of potentials.
//
// Probability potentials contribute tail -> head arcs. A multi-variable head
// gets one latent root feeding every head member (the joint came from a
// common source). A potential whose pedigree was broken by evidence gets an
// observed sink fed by its whole domain, preserving the likelihood coupling
// of the sliced table. Utility potentials get one observed sink each with
// arcs from every domain variable, which makes "relevant for the utility"
// expressible as plain d-connection.
struct DomainGraph {
  int n_vars = 0;  // real variables are nodes 0..n_vars-1
  std::vector<std::vector<int>> parents;
  std::vector<std::vector<int>> children;
  std::vector<int> utility_sinks;       // node index per utility potential
  std::vector<std::uint8_t> observed;   // synthetic observation marks

  int add_node();
};

DomainGraph build_domain_graph(const std::vector<PPot>& potentials, int n_vars);

// All variables d-connected to some target given the instantiated set.
// Linear-time reachability over active trails; synthetic nodes are used
// internally and never returned.
std::set<VarId> d_connected_targets(const std::vector<PPot>& potentials,
                                    const std::set<VarId>& targets,
                                    const std::set<VarId>& instantiated, int n_vars);

// Same reachability, but seeded from the separator and from every utility
// sink: the message must stay correct for the joint of the separator and for
// every utility expectation flowing through it.
std::set<VarId> relevance_connected(const std::vector<PPot>& potentials,
                                    const std::set<VarId>& separator, int n_vars);

struct BarrenSets {
  std::set<VarId> barren;
  std::set<VarId> probabilistic_barren;  // superset of barren
};

// Barren: outside `required`, only barren descendants, and no directed path
// into any utility domain. Probabilistic barren drops the utility condition.
BarrenSets classify_barren(const std::vector<PPot>& probabilities,
                           const std::vector<PPot>& utilities,
                           const std::set<VarId>& required, int n_vars);

}  // namespace idsolve
