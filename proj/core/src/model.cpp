#include "idsolve/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

namespace idsolve {

std::optional<VarId> InfluenceDiagram::find_var(const std::string& name) const {
  for (const auto& v : variables)
    if (v.name == name) return v.id;
  return std::nullopt;
}

std::vector<std::set<VarId>> InfluenceDiagram::children() const {
  std::vector<std::set<VarId>> ch(static_cast<std::size_t>(num_vars()));
  for (VarId v = 0; v < num_vars(); ++v)
    for (VarId p : parents[static_cast<std::size_t>(v)]) ch[static_cast<std::size_t>(p)].insert(v);
  return ch;
}

std::set<VarId> InfluenceDiagram::descendants(VarId v) const {
  auto ch = children();
  std::set<VarId> out;
  std::queue<VarId> q;
  q.push(v);
  while (!q.empty()) {
    VarId cur = q.front();
    q.pop();
    for (VarId c : ch[static_cast<std::size_t>(cur)])
      if (out.insert(c).second) q.push(c);
  }
  return out;
}

namespace {

// Cycle check. Joint probability blocks are condensed into one super-node so
// that "tail -> every head member" arcs cannot fabricate intra-block cycles.
void check_acyclic(const InfluenceDiagram& id) {
  int n = id.num_vars();
  std::vector<int> group(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) group[static_cast<std::size_t>(i)] = i;
  for (const auto& b : id.prob_blocks)
    for (VarId h : b.head) group[static_cast<std::size_t>(h)] = b.head.front();

  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  for (VarId v = 0; v < n; ++v)
    for (VarId p : id.parents[static_cast<std::size_t>(v)]) {
      int a = group[static_cast<std::size_t>(p)];
      int b = group[static_cast<std::size_t>(v)];
      if (a != b) adj[static_cast<std::size_t>(a)].insert(b);
    }

  std::vector<int> state(static_cast<std::size_t>(n), 0);
  std::function<void(int)> dfs = [&](int u) {
    state[static_cast<std::size_t>(u)] = 1;
    for (int w : adj[static_cast<std::size_t>(u)]) {
      if (state[static_cast<std::size_t>(w)] == 1) throw ModelError("cycle detected");
      if (state[static_cast<std::size_t>(w)] == 0) dfs(w);
    }
    state[static_cast<std::size_t>(u)] = 2;
  };
  for (int u = 0; u < n; ++u)
    if (state[static_cast<std::size_t>(u)] == 0 && group[static_cast<std::size_t>(u)] == u) dfs(u);
}

}  // namespace

void InfluenceDiagram::validate() const {
  int n = num_vars();
  for (VarId v = 0; v < n; ++v) {
    const Variable& var_ = var(v);
    if (var_.id != v) throw ModelError("variable ids must be dense 0..V-1");
    if (var_.states.empty()) throw ModelError("variable '" + var_.name + "' has no states");
    std::set<std::string> labels(var_.states.begin(), var_.states.end());
    if (labels.size() != var_.states.size())
      throw ModelError("duplicate state label in variable '" + var_.name + "'");
  }
  for (VarId v = 0; v < n; ++v)
    for (VarId i = v + 1; i < n; ++i)
      if (var(v).name == var(i).name) throw ModelError("duplicate variable name '" + var(v).name + "'");

  check_acyclic(*this);

  // each chance variable heads exactly one probability block
  std::vector<int> headed(static_cast<std::size_t>(n), 0);
  for (const auto& b : prob_blocks) {
    for (VarId h : b.head) {
      if (!is_chance(h)) throw ModelError("decision variable in a probability head");
      headed[static_cast<std::size_t>(h)]++;
    }
    std::int64_t head_card = 1, tail_card = 1;
    for (VarId h : b.head) head_card *= card(h);
    for (VarId t : b.tail) tail_card *= card(t);
    if (static_cast<std::int64_t>(b.table.size()) != head_card * tail_card)
      throw ModelError("table size mismatch for probability block");
    for (double x : b.table)
      if (x < 0.0) throw ModelError("negative probability entry");
    for (std::int64_t r = 0; r < tail_card; ++r) {
      double s = 0.0;
      for (std::int64_t c = 0; c < head_card; ++c)
        s += b.table[static_cast<std::size_t>(r * head_card + c)];
      if (std::fabs(s - 1.0) > 1e-9)
        throw ModelError("probability row " + std::to_string(r) + " sums to " +
                         std::to_string(s) + ", expected 1");
    }
    // stored parents of each head member must equal the block tail
    for (VarId h : b.head) {
      std::set<VarId> ps(parents[static_cast<std::size_t>(h)].begin(),
                         parents[static_cast<std::size_t>(h)].end());
      std::set<VarId> ts(b.tail.begin(), b.tail.end());
      for (VarId other : b.head) ps.erase(other);
      if (ps != ts)
        throw ModelError("parents of '" + var(h).name + "' disagree with its probability block");
    }
  }
  for (VarId v = 0; v < n; ++v)
    if (is_chance(v) && headed[static_cast<std::size_t>(v)] != 1)
      throw ModelError("chance variable '" + var(v).name + "' must head exactly one probability block");

  for (const auto& u : utilities) {
    std::int64_t sz = 1;
    for (VarId d : u.domain) sz *= card(d);
    if (static_cast<std::int64_t>(u.table.size()) != sz)
      throw ModelError("table size mismatch for utility '" + u.name + "'");
  }

  // decision order: complete, unique, consistent with informational arcs
  std::vector<VarId> decisions;
  for (VarId v = 0; v < n; ++v)
    if (is_decision(v)) decisions.push_back(v);
  if (decision_order.size() != decisions.size())
    throw ModelError("decision order must list every decision exactly once");
  std::set<VarId> seen;
  for (VarId d : decision_order) {
    if (!is_decision(d) || !seen.insert(d).second)
      throw ModelError("decision order must list every decision exactly once");
  }
  std::vector<int> pos(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < decision_order.size(); ++i)
    pos[static_cast<std::size_t>(decision_order[i])] = static_cast<int>(i);
  for (VarId d : decision_order)
    for (VarId p : parents[static_cast<std::size_t>(d)])
      if (is_decision(p) && pos[static_cast<std::size_t>(p)] >= pos[static_cast<std::size_t>(d)])
        throw ModelError("decision order inconsistent with informational arcs");

  // temporal consistency: a variable observed before decision D cannot be a
  // descendant of D (or of any later decision)
  auto part = information_partition(*this);
  for (std::size_t j = 0; j < decision_order.size(); ++j) {
    auto desc = descendants(decision_order[j]);
    // sets 0..j are observed no later than decision j (0-based)
    for (std::size_t k = 0; k <= j && k < part.sets.size(); ++k)
      for (VarId x : part.sets[k])
        if (desc.count(x))
          throw ModelError("variable '" + var(x).name +
                           "' is observed before a decision it depends on");
  }
}

InformationPartition information_partition(const InfluenceDiagram& id) {
  InformationPartition part;
  std::size_t n_dec = id.decision_order.size();
  part.sets.assign(n_dec + 1, {});
  std::vector<int> first_observer(static_cast<std::size_t>(id.num_vars()), -1);
  for (std::size_t j = 0; j < n_dec; ++j) {
    VarId d = id.decision_order[j];
    for (VarId p : id.parents[static_cast<std::size_t>(d)]) {
      if (!id.is_chance(p)) continue;
      int& fo = first_observer[static_cast<std::size_t>(p)];
      if (fo < 0) fo = static_cast<int>(j);
    }
  }
  for (VarId v = 0; v < id.num_vars(); ++v) {
    if (!id.is_chance(v)) continue;
    int fo = first_observer[static_cast<std::size_t>(v)];
    part.sets[fo < 0 ? n_dec : static_cast<std::size_t>(fo)].push_back(v);
  }
  return part;
}

std::vector<int> precedence_blocks(const InfluenceDiagram& id,
                                   const InformationPartition& part) {
  std::vector<int> block(static_cast<std::size_t>(id.num_vars()), -1);
  for (std::size_t k = 0; k < part.sets.size(); ++k)
    for (VarId v : part.sets[k]) block[static_cast<std::size_t>(v)] = static_cast<int>(2 * k);
  for (std::size_t j = 0; j < id.decision_order.size(); ++j)
    block[static_cast<std::size_t>(id.decision_order[j])] = static_cast<int>(2 * j + 1);
  return block;
}

UndirectedGraph moral_graph(const InfluenceDiagram& id) {
  UndirectedGraph g(id.num_vars());
  auto clique = [&g](const std::vector<VarId>& vars) {
    for (std::size_t i = 0; i < vars.size(); ++i)
      for (std::size_t j = i + 1; j < vars.size(); ++j) g.connect(vars[i], vars[j]);
  };
  for (const auto& b : id.prob_blocks) {
    std::vector<VarId> dom = b.head;
    dom.insert(dom.end(), b.tail.begin(), b.tail.end());
    clique(dom);
  }
  for (const auto& u : id.utilities) clique(u.domain);
  return g;
}

void check_evidence(const InfluenceDiagram& id, const InformationPartition& part,
                    const Evidence& ev) {
  for (const auto& [v, s] : ev) {
    if (v < 0 || v >= id.num_vars()) throw ModelError("evidence on unknown variable");
    if (!id.is_chance(v))
      throw ModelError("evidence on decision variable '" + id.var(v).name + "'");
    if (s < 0 || s >= id.card(v))
      throw ModelError("evidence state out of range for '" + id.var(v).name + "'");
    bool initial = !part.sets.empty() &&
                   std::find(part.sets[0].begin(), part.sets[0].end(), v) != part.sets[0].end();
    if (!id.decision_order.empty() && !initial)
      throw ModelError("variable '" + id.var(v).name +
                       "' cannot be instantiated: it is not observed before the first decision");
  }
}

ModelPotentials model_potentials(const InfluenceDiagram& id, const Evidence& ev) {
  std::vector<std::pair<VarId, int>> evv(ev.begin(), ev.end());
  OpCounter free_ctr;  // restriction is free; counter unused
  ModelPotentials out;
  for (const auto& b : id.prob_blocks) {
    std::vector<VarId> vars = b.tail;  // tail slowest, head fastest (file layout)
    vars.insert(vars.end(), b.head.begin(), b.head.end());
    PPot p = make_probability(vars, b.head, b.table, id);
    out.probabilities.push_back(restrict_potential(p, evv, id, free_ctr));
  }
  for (const auto& u : id.utilities) {
    PPot p = make_utility(u.domain, u.table, id);
    out.utilities.push_back(restrict_potential(p, evv, id, free_ctr));
  }
  return out;
}

}  // namespace idsolve
