#include "idsolve/dsep.hpp"

#include <algorithm>
#include <queue>

namespace idsolve {

int DomainGraph::add_node() {
  parents.emplace_back();
  children.emplace_back();
  observed.push_back(0);
  return static_cast<int>(parents.size()) - 1;
}

DomainGraph build_domain_graph(const std::vector<PPot>& potentials, int n_vars) {
  DomainGraph g;
  g.n_vars = n_vars;
  g.parents.assign(static_cast<std::size_t>(n_vars), {});
  g.children.assign(static_cast<std::size_t>(n_vars), {});
  g.observed.assign(static_cast<std::size_t>(n_vars), 0);

  auto arc = [&g](int p, int c) {
    g.parents[static_cast<std::size_t>(c)].push_back(p);
    g.children[static_cast<std::size_t>(p)].push_back(c);
  };

  for (const auto& p : potentials) {
    if (p->is_probability()) {
      if (p->unity) continue;  // constant one carries no dependence
      std::vector<VarId> tail;
      for (VarId v : p->dom)
        if (!p->head_var(v)) tail.push_back(v);
      for (VarId t : tail)
        for (VarId h : p->head) arc(t, h);
      if (p->head.size() > 1) {
        int latent = g.add_node();
        for (VarId h : p->head) arc(latent, h);
      }
      if (!p->cpt_derived && !p->dom.empty()) {
        int sink = g.add_node();
        g.observed[static_cast<std::size_t>(sink)] = 1;
        for (VarId v : p->dom) arc(v, sink);
      }
    } else {
      int sink = g.add_node();
      g.observed[static_cast<std::size_t>(sink)] = 1;
      g.utility_sinks.push_back(sink);
      for (VarId v : p->dom) arc(v, sink);
    }
  }
  return g;
}

namespace {

// Active-trail reachability from a source set given observations
// (Geiger/Verma/Pearl). Visits (node, direction) pairs once.
std::vector<std::uint8_t> reachable(const DomainGraph& g, const std::vector<int>& sources,
                                    const std::vector<std::uint8_t>& obs) {
  std::size_t n = g.parents.size();
  // observed nodes and their ancestors open colliders
  std::vector<std::uint8_t> anc_obs(n, 0);
  {
    std::queue<int> q;
    for (std::size_t i = 0; i < n; ++i)
      if (obs[i]) {
        anc_obs[i] = 1;
        q.push(static_cast<int>(i));
      }
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int p : g.parents[static_cast<std::size_t>(u)])
        if (!anc_obs[static_cast<std::size_t>(p)]) {
          anc_obs[static_cast<std::size_t>(p)] = 1;
          q.push(p);
        }
    }
  }

  enum { kUp = 0, kDown = 1 };  // up: entered from a child; down: from a parent
  std::vector<std::uint8_t> seen(n * 2, 0), marked(n, 0);
  std::queue<std::pair<int, int>> q;
  for (int s : sources) q.emplace(s, kUp);
  while (!q.empty()) {
    auto [y, d] = q.front();
    q.pop();
    auto& slot = seen[static_cast<std::size_t>(y) * 2 + static_cast<std::size_t>(d)];
    if (slot) continue;
    slot = 1;
    std::size_t yi = static_cast<std::size_t>(y);
    if (!obs[yi]) marked[yi] = 1;
    if (d == kUp && !obs[yi]) {
      for (int p : g.parents[yi]) q.emplace(p, kUp);
      for (int c : g.children[yi]) q.emplace(c, kDown);
    } else if (d == kDown) {
      if (!obs[yi])
        for (int c : g.children[yi]) q.emplace(c, kDown);
      if (anc_obs[yi])
        for (int p : g.parents[yi]) q.emplace(p, kUp);
    }
  }
  return marked;
}

}  // namespace

std::set<VarId> d_connected_targets(const std::vector<PPot>& potentials,
                                    const std::set<VarId>& targets,
                                    const std::set<VarId>& instantiated, int n_vars) {
  DomainGraph g = build_domain_graph(potentials, n_vars);
  std::vector<std::uint8_t> obs = g.observed;
  for (VarId v : instantiated) obs[static_cast<std::size_t>(v)] = 1;
  std::vector<int> sources(targets.begin(), targets.end());
  auto marked = reachable(g, sources, obs);
  std::set<VarId> out;
  for (VarId v = 0; v < n_vars; ++v)
    if (marked[static_cast<std::size_t>(v)]) out.insert(v);
  for (VarId t : targets) out.insert(t);  // targets count as connected to themselves
  return out;
}

std::set<VarId> relevance_connected(const std::vector<PPot>& potentials,
                                    const std::set<VarId>& separator, int n_vars) {
  DomainGraph g = build_domain_graph(potentials, n_vars);
  std::set<VarId> src = separator;
  for (const auto& p : potentials)
    if (p->is_utility()) src.insert(p->dom.begin(), p->dom.end());
  std::vector<int> sources(src.begin(), src.end());
  auto marked = reachable(g, sources, g.observed);
  std::set<VarId> out;
  for (VarId v = 0; v < n_vars; ++v)
    if (marked[static_cast<std::size_t>(v)]) out.insert(v);
  out.insert(src.begin(), src.end());
  return out;
}

BarrenSets classify_barren(const std::vector<PPot>& probabilities,
                           const std::vector<PPot>& utilities,
                           const std::set<VarId>& required, int n_vars) {
  // children via probability tails only
  std::vector<std::set<VarId>> ch(static_cast<std::size_t>(n_vars));
  for (const auto& p : probabilities) {
    if (p->unity) continue;
    for (VarId v : p->dom) {
      if (p->head_var(v)) continue;
      for (VarId h : p->head) ch[static_cast<std::size_t>(v)].insert(h);
    }
  }

  // variables with a directed path into some utility domain
  std::vector<std::uint8_t> utility_reach(static_cast<std::size_t>(n_vars), 0);
  {
    std::vector<std::set<VarId>> pa(static_cast<std::size_t>(n_vars));
    for (VarId v = 0; v < n_vars; ++v)
      for (VarId c : ch[static_cast<std::size_t>(v)]) pa[static_cast<std::size_t>(c)].insert(v);
    std::queue<VarId> q;
    for (const auto& u : utilities)
      for (VarId v : u->dom)
        if (v < n_vars && !utility_reach[static_cast<std::size_t>(v)]) {
          utility_reach[static_cast<std::size_t>(v)] = 1;
          q.push(v);
        }
    while (!q.empty()) {
      VarId v = q.front();
      q.pop();
      for (VarId p : pa[static_cast<std::size_t>(v)])
        if (!utility_reach[static_cast<std::size_t>(p)]) {
          utility_reach[static_cast<std::size_t>(p)] = 1;
          q.push(p);
        }
    }
  }

  auto fixpoint = [&](bool use_utilities) {
    std::set<VarId> barren;
    bool changed = true;
    while (changed) {
      changed = false;
      for (VarId v = 0; v < n_vars; ++v) {
        if (barren.count(v) || required.count(v)) continue;
        if (use_utilities && utility_reach[static_cast<std::size_t>(v)]) continue;
        bool all_barren = true;
        for (VarId c : ch[static_cast<std::size_t>(v)])
          if (!barren.count(c)) {
            all_barren = false;
            break;
          }
        if (all_barren) {
          barren.insert(v);
          changed = true;
        }
      }
    }
    return barren;
  };

  BarrenSets out;
  out.barren = fixpoint(true);
  out.probabilistic_barren = fixpoint(false);
  return out;
}

}  // namespace idsolve
