#include "idsolve/jtree.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace idsolve {

bool StrongJunctionTree::contains(int clique, VarId v) const {
  const auto& c = cliques[static_cast<std::size_t>(clique)];
  return std::binary_search(c.begin(), c.end(), v);
}

StrongEliminationOrder strong_elimination_order(const UndirectedGraph& moral,
                                                const InfluenceDiagram& id,
                                                const InformationPartition& part,
                                                const std::vector<int>* tie_ranking) {
  int n = id.num_vars();
  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) adj[static_cast<std::size_t>(v)] = moral.adj[static_cast<std::size_t>(v)];

  auto fill_count = [&adj](int v) {
    const auto& nb = adj[static_cast<std::size_t>(v)];
    int fills = 0;
    for (auto i = nb.begin(); i != nb.end(); ++i) {
      auto j = i;
      for (++j; j != nb.end(); ++j)
        if (!adj[static_cast<std::size_t>(*i)].count(*j)) fills++;
    }
    return fills;
  };

  auto eliminate = [&adj](int v) {
    const auto nb = adj[static_cast<std::size_t>(v)];
    for (auto i = nb.begin(); i != nb.end(); ++i) {
      auto j = i;
      for (++j; j != nb.end(); ++j) {
        adj[static_cast<std::size_t>(*i)].insert(*j);
        adj[static_cast<std::size_t>(*j)].insert(*i);
      }
    }
    for (int u : nb) adj[static_cast<std::size_t>(u)].erase(v);
    adj[static_cast<std::size_t>(v)].clear();
  };

  auto key = [&](VarId v) { return tie_ranking ? (*tie_ranking)[static_cast<std::size_t>(v)] : v; };

  // blocks in elimination order: last information set, last decision, ...
  std::vector<std::vector<VarId>> blocks;
  std::size_t n_dec = id.decision_order.size();
  for (std::size_t k = part.sets.size(); k-- > 0;) {
    blocks.push_back(part.sets[k]);
    if (k > 0 && k <= n_dec) blocks.push_back({id.decision_order[k - 1]});
  }

  StrongEliminationOrder out;
  out.position.assign(static_cast<std::size_t>(n), -1);
  for (auto& block : blocks) {
    std::vector<VarId> pending = block;
    while (!pending.empty()) {
      VarId best = pending.front();
      int best_fill = fill_count(best);
      for (std::size_t i = 1; i < pending.size(); ++i) {
        int f = fill_count(pending[i]);
        if (f < best_fill || (f == best_fill && key(pending[i]) < key(best))) {
          best = pending[i];
          best_fill = f;
        }
      }
      eliminate(best);
      out.position[static_cast<std::size_t>(best)] = static_cast<int>(out.order.size());
      out.order.push_back(best);
      pending.erase(std::find(pending.begin(), pending.end(), best));
    }
  }
  return out;
}

StrongJunctionTree build_strong_tree(const UndirectedGraph& moral,
                                     const StrongEliminationOrder& order) {
  int n = static_cast<int>(order.order.size());

  // elimination cliques: each vertex with its not-yet-eliminated neighbors
  std::vector<std::vector<VarId>> cand(static_cast<std::size_t>(n));
  std::vector<int> next(static_cast<std::size_t>(n), -1);  // earliest later member
  {
    std::vector<std::set<int>> work(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
      work[static_cast<std::size_t>(v)] = moral.adj[static_cast<std::size_t>(v)];
    for (VarId v : order.order) {
      auto vi = static_cast<std::size_t>(v);
      std::vector<VarId> clique{v};
      const auto nb = work[vi];
      for (int u : nb) clique.push_back(u);
      std::sort(clique.begin(), clique.end());
      cand[vi] = clique;
      int best = -1;
      for (int u : nb)
        if (best < 0 || order.position[static_cast<std::size_t>(u)] <
                            order.position[static_cast<std::size_t>(best)])
          best = u;
      next[vi] = best;
      for (auto i = nb.begin(); i != nb.end(); ++i) {
        auto j = i;
        for (++j; j != nb.end(); ++j) {
          work[static_cast<std::size_t>(*i)].insert(*j);
          work[static_cast<std::size_t>(*j)].insert(*i);
        }
      }
      for (int u : nb) work[static_cast<std::size_t>(u)].erase(v);
      work[vi].clear();
    }
  }

  // candidate tree: the clique of v hangs under the clique of its earliest
  // later neighbor; the separator is exactly cand[v] minus v, which that
  // neighbor's clique contains
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  std::vector<std::set<int>> kids(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v)
    if (next[static_cast<std::size_t>(v)] >= 0) {
      parent[static_cast<std::size_t>(v)] = next[static_cast<std::size_t>(v)];
      kids[static_cast<std::size_t>(next[static_cast<std::size_t>(v)])].insert(v);
    }

  // contract subset edges until only maximal cliques remain
  std::vector<bool> alive(static_cast<std::size_t>(n), true);
  auto subset = [](const std::vector<VarId>& a, const std::vector<VarId>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (VarId v : order.order) {
      auto vi = static_cast<std::size_t>(v);
      if (!alive[vi]) continue;
      int p = parent[vi];
      if (p < 0) continue;
      auto pi = static_cast<std::size_t>(p);
      if (subset(cand[vi], cand[pi])) {
        // child vanishes into its parent
        alive[vi] = false;
        kids[pi].erase(static_cast<int>(v));
        for (int c : kids[vi]) {
          parent[static_cast<std::size_t>(c)] = p;
          kids[pi].insert(c);
        }
        kids[vi].clear();
        changed = true;
      } else if (subset(cand[pi], cand[vi])) {
        // parent vanishes into this child
        alive[pi] = false;
        kids[pi].erase(static_cast<int>(v));
        parent[vi] = parent[pi];
        if (parent[vi] >= 0) {
          kids[static_cast<std::size_t>(parent[vi])].erase(p);
          kids[static_cast<std::size_t>(parent[vi])].insert(static_cast<int>(v));
        }
        for (int c : kids[pi]) {
          parent[static_cast<std::size_t>(c)] = static_cast<int>(v);
          kids[vi].insert(c);
        }
        kids[pi].clear();
        changed = true;
      }
    }
  }

  // surviving candidates, numbered by highest member elimination position
  std::vector<int> nodes;
  for (int v = 0; v < n; ++v)
    if (alive[static_cast<std::size_t>(v)]) nodes.push_back(v);
  auto hi_pos = [&](int v) {
    int h = -1;
    for (VarId u : cand[static_cast<std::size_t>(v)])
      h = std::max(h, order.position[static_cast<std::size_t>(u)]);
    return h;
  };
  std::sort(nodes.begin(), nodes.end(), [&](int a, int b) {
    int ha = hi_pos(a), hb = hi_pos(b);
    if (ha != hb) return ha < hb;
    bool ra = parent[static_cast<std::size_t>(a)] < 0;
    bool rb = parent[static_cast<std::size_t>(b)] < 0;
    if (ra != rb) return rb;  // a parentless clique outranks its peers
    return cand[static_cast<std::size_t>(a)] < cand[static_cast<std::size_t>(b)];
  });

  StrongJunctionTree tree;
  int k = static_cast<int>(nodes.size());
  std::vector<int> index(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < k; ++i) index[static_cast<std::size_t>(nodes[static_cast<std::size_t>(i)])] = i;

  tree.cliques.resize(static_cast<std::size_t>(k));
  tree.parent.assign(static_cast<std::size_t>(k), -1);
  tree.separators.assign(static_cast<std::size_t>(k), {});
  tree.children_of.assign(static_cast<std::size_t>(k), {});
  tree.rank.resize(static_cast<std::size_t>(k));
  tree.root = k - 1;

  for (int i = 0; i < k; ++i) {
    auto ii = static_cast<std::size_t>(i);
    tree.rank[ii] = i;
    tree.cliques[ii] = cand[static_cast<std::size_t>(nodes[ii])];
  }
  for (int i = 0; i < k; ++i) {
    auto ii = static_cast<std::size_t>(i);
    int p = parent[static_cast<std::size_t>(nodes[ii])];
    int pidx = p < 0 ? -1 : index[static_cast<std::size_t>(p)];
    if (i == k - 1) pidx = -1;  // the last clique is the strong root
    if (pidx < 0 && i < k - 1) pidx = k - 1;  // disconnected piece joins the root
    tree.parent[ii] = pidx;
    if (pidx >= 0) {
      std::vector<VarId> sep;
      const auto& pc = tree.cliques[static_cast<std::size_t>(pidx)];
      for (VarId u : tree.cliques[ii])
        if (std::binary_search(pc.begin(), pc.end(), u)) sep.push_back(u);
      tree.separators[ii] = sep;
      tree.children_of[static_cast<std::size_t>(pidx)].push_back(i);
    }
  }
  for (auto& ch : tree.children_of) std::sort(ch.begin(), ch.end());
  return tree;
}

CliqueBinding assign_potentials(const InfluenceDiagram& id, const StrongJunctionTree& tree) {
  CliqueBinding binding;
  binding.prob_blocks.assign(tree.cliques.size(), {});
  binding.utilities.assign(tree.cliques.size(), {});

  auto home = [&tree](const std::vector<VarId>& dom) {
    for (std::size_t c = 0; c < tree.cliques.size(); ++c) {
      const auto& cl = tree.cliques[c];
      bool inside = std::all_of(dom.begin(), dom.end(), [&](VarId v) {
        return std::binary_search(cl.begin(), cl.end(), v);
      });
      if (inside) return static_cast<int>(c);
    }
    throw ModelError("internal: potential fits no clique (triangulation bug)");
  };

  for (std::size_t i = 0; i < id.prob_blocks.size(); ++i) {
    std::vector<VarId> dom = id.prob_blocks[i].head;
    dom.insert(dom.end(), id.prob_blocks[i].tail.begin(), id.prob_blocks[i].tail.end());
    binding.prob_blocks[static_cast<std::size_t>(home(dom))].push_back(static_cast<int>(i));
  }
  for (std::size_t i = 0; i < id.utilities.size(); ++i)
    binding.utilities[static_cast<std::size_t>(home(id.utilities[i].domain))].push_back(
        static_cast<int>(i));
  return binding;
}

std::vector<VarId> relevant_past(const StrongJunctionTree& tree, const InfluenceDiagram& id,
                                 const InformationPartition& part, VarId d) {
  // clique containing d closest to the root, by walking up from the root
  int best = -1, best_depth = 0;
  std::vector<int> depth(tree.cliques.size(), 0);
  std::function<void(int, int)> dfs = [&](int c, int dep) {
    depth[static_cast<std::size_t>(c)] = dep;
    if (tree.contains(c, d) && (best < 0 || dep < best_depth)) {
      best = c;
      best_depth = dep;
    }
    for (int ch : tree.children_of[static_cast<std::size_t>(c)]) dfs(ch, dep + 1);
  };
  dfs(tree.root, 0);
  if (best < 0) throw ModelError("decision variable appears in no clique");

  auto block = precedence_blocks(id, part);
  std::vector<VarId> past;
  for (VarId v : tree.cliques[static_cast<std::size_t>(best)])
    if (v != d && strictly_precedes(block, v, d)) past.push_back(v);
  return past;
}

std::string dump_tree(const StrongJunctionTree& tree, const InfluenceDiagram& id) {
  std::ostringstream os;
  std::function<void(int, int)> walk = [&](int c, int indent) {
    for (int i = 0; i < indent; ++i) os << "  ";
    os << "clique " << c << " {";
    const auto& cl = tree.cliques[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < cl.size(); ++i)
      os << (i ? " " : "") << id.var(cl[i]).name;
    os << "}";
    if (tree.parent[static_cast<std::size_t>(c)] >= 0) {
      os << "  sep {";
      const auto& sep = tree.separators[static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < sep.size(); ++i)
        os << (i ? " " : "") << id.var(sep[i]).name;
      os << "}";
    } else {
      os << "  (strong root)";
    }
    os << "\n";
    for (int ch : tree.children_of[static_cast<std::size_t>(c)]) walk(ch, indent + 1);
  };
  walk(tree.root, 0);
  return os.str();
}

}  // namespace idsolve
