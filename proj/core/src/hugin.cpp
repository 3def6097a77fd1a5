#include "idsolve/hugin.hpp"

#include <algorithm>
#include <functional>

#include "idsolve/lazy.hpp"

namespace idsolve {

namespace {

// Flat clique tables. The eager engine works on full clique domains and
// never elides anything, so plain arrays are enough.
struct Table {
  std::vector<VarId> dom;  // sorted
  std::vector<double> v;
};

std::vector<std::int64_t> strides_of(const std::vector<VarId>& dom, const InfluenceDiagram& id) {
  std::vector<std::int64_t> s(dom.size());
  std::int64_t acc = 1;
  for (int i = static_cast<int>(dom.size()) - 1; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = acc;
    acc *= id.card(dom[static_cast<std::size_t>(i)]);
  }
  return s;
}

// Walks the cells of `dom`, tracking the offset into a table over sub-domain
// `sub` (sub ⊆ dom). Calls fn(cell, sub_offset).
template <typename Fn>
void walk(const std::vector<VarId>& dom, const std::vector<VarId>& sub,
          const InfluenceDiagram& id, Fn fn) {
  std::vector<std::int64_t> sub_self = strides_of(sub, id);
  std::vector<std::int64_t> stride(dom.size(), 0);
  for (std::size_t i = 0; i < dom.size(); ++i) {
    auto it = std::lower_bound(sub.begin(), sub.end(), dom[i]);
    if (it != sub.end() && *it == dom[i])
      stride[i] = sub_self[static_cast<std::size_t>(it - sub.begin())];
  }
  std::vector<int> state(dom.size(), 0);
  std::int64_t n = table_size(dom, id);
  std::int64_t off = 0;
  for (std::int64_t cell = 0; cell < n; ++cell) {
    fn(cell, off);
    for (int i = static_cast<int>(dom.size()) - 1; i >= 0; --i) {
      auto ii = static_cast<std::size_t>(i);
      state[ii]++;
      off += stride[ii];
      if (state[ii] < id.card(dom[ii])) break;
      off -= stride[ii] * id.card(dom[ii]);
      state[ii] = 0;
    }
  }
}

Table filled(const std::vector<VarId>& dom, const InfluenceDiagram& id, double x) {
  Table t;
  t.dom = dom;
  t.v.assign(static_cast<std::size_t>(table_size(dom, id)), x);
  return t;
}

// free broadcast of a potential onto the clique domain
Table broadcast(const std::vector<VarId>& dom, const PPot& p, const InfluenceDiagram& id) {
  Table t;
  t.dom = dom;
  t.v.resize(static_cast<std::size_t>(table_size(dom, id)));
  walk(dom, p->dom, id, [&](std::int64_t cell, std::int64_t off) {
    t.v[static_cast<std::size_t>(cell)] = p->table[static_cast<std::size_t>(off)];
  });
  return t;
}

void mul_into(Table& t, const std::vector<VarId>& sub, const std::vector<double>& src,
              const InfluenceDiagram& id, OpCounter& ctr) {
  walk(t.dom, sub, id, [&](std::int64_t cell, std::int64_t off) {
    t.v[static_cast<std::size_t>(cell)] *= src[static_cast<std::size_t>(off)];
    ctr.mul++;
  });
}

void add_into(Table& t, const std::vector<VarId>& sub, const std::vector<double>& src,
              const InfluenceDiagram& id, OpCounter& ctr) {
  walk(t.dom, sub, id, [&](std::int64_t cell, std::int64_t off) {
    t.v[static_cast<std::size_t>(cell)] += src[static_cast<std::size_t>(off)];
    ctr.add++;
  });
}

Table reduce_sum(const Table& t, VarId y, const InfluenceDiagram& id, OpCounter& ctr) {
  std::vector<VarId> rest;
  for (VarId v : t.dom)
    if (v != y) rest.push_back(v);
  Table out = filled(rest, id, 0.0);
  int cy = id.card(y);
  std::vector<std::int64_t> self = strides_of(t.dom, id);
  std::int64_t ys = 0;
  for (std::size_t i = 0; i < t.dom.size(); ++i)
    if (t.dom[i] == y) ys = self[i];
  // iterate rest cells tracking the base offset into t
  std::vector<std::int64_t> rest_stride(rest.size(), 0);
  for (std::size_t i = 0; i < rest.size(); ++i) {
    auto it = std::lower_bound(t.dom.begin(), t.dom.end(), rest[i]);
    rest_stride[i] = self[static_cast<std::size_t>(it - t.dom.begin())];
  }
  std::vector<int> state(rest.size(), 0);
  std::int64_t n = table_size(rest, id);
  std::int64_t off = 0;
  for (std::int64_t cell = 0; cell < n; ++cell) {
    double acc = t.v[static_cast<std::size_t>(off)];
    for (int s = 1; s < cy; ++s) {
      acc += t.v[static_cast<std::size_t>(off + s * ys)];
      ctr.add++;
    }
    out.v[static_cast<std::size_t>(cell)] = acc;
    for (int i = static_cast<int>(rest.size()) - 1; i >= 0; --i) {
      auto ii = static_cast<std::size_t>(i);
      state[ii]++;
      off += rest_stride[ii];
      if (state[ii] < id.card(rest[ii])) break;
      off -= rest_stride[ii] * id.card(rest[ii]);
      state[ii] = 0;
    }
  }
  return out;
}

Table reduce_max(const Table& t, VarId y, const InfluenceDiagram& id, OpCounter& ctr,
                 ArgmaxRecord* rec) {
  std::vector<VarId> rest;
  for (VarId v : t.dom)
    if (v != y) rest.push_back(v);
  Table out = filled(rest, id, 0.0);
  if (rec) {
    rec->decision = y;
    rec->dom = rest;
    rec->winner.assign(out.v.size(), 0);
    rec->tie.assign(out.v.size(), 0);
  }
  int cy = id.card(y);
  std::vector<std::int64_t> self = strides_of(t.dom, id);
  std::int64_t ys = 0;
  for (std::size_t i = 0; i < t.dom.size(); ++i)
    if (t.dom[i] == y) ys = self[i];
  std::vector<std::int64_t> rest_stride(rest.size(), 0);
  for (std::size_t i = 0; i < rest.size(); ++i) {
    auto it = std::lower_bound(t.dom.begin(), t.dom.end(), rest[i]);
    rest_stride[i] = self[static_cast<std::size_t>(it - t.dom.begin())];
  }
  std::vector<int> state(rest.size(), 0);
  std::int64_t n = table_size(rest, id);
  std::int64_t off = 0;
  for (std::int64_t cell = 0; cell < n; ++cell) {
    double best = t.v[static_cast<std::size_t>(off)];
    int win = 0;
    bool tie = false;
    for (int s = 1; s < cy; ++s) {
      double val = t.v[static_cast<std::size_t>(off + s * ys)];
      ctr.max++;
      if (val > best) {
        best = val;
        win = s;
        tie = false;
      } else if (val == best) {
        tie = true;
      }
    }
    out.v[static_cast<std::size_t>(cell)] = best;
    if (rec) {
      rec->winner[static_cast<std::size_t>(cell)] = win;
      rec->tie[static_cast<std::size_t>(cell)] = tie ? 1 : 0;
    }
    for (int i = static_cast<int>(rest.size()) - 1; i >= 0; --i) {
      auto ii = static_cast<std::size_t>(i);
      state[ii]++;
      off += rest_stride[ii];
      if (state[ii] < id.card(rest[ii])) break;
      off -= rest_stride[ii] * id.card(rest[ii]);
      state[ii] = 0;
    }
  }
  return out;
}

Table divide_tables(const Table& num, const Table& den, OpCounter& ctr) {
  Table out = num;
  for (std::size_t i = 0; i < out.v.size(); ++i) {
    double d = den.v[i];
    double n = out.v[i];
    if (d == 0.0) {
      if (n != 0.0) throw PotentialError("nonzero/zero division in separator message");
      out.v[i] = 0.0;
    } else {
      out.v[i] = n / d;
    }
    ctr.div++;
  }
  return out;
}

}  // namespace

HuginResult solve_hugin(const InfluenceDiagram& id, const Evidence& ev) {
  id.validate();
  auto part = information_partition(id);
  check_evidence(id, part, ev);

  auto moral = moral_graph(id);
  auto order = strong_elimination_order(moral, id, part);
  HuginResult result;
  result.tree = build_strong_tree(moral, order);
  const StrongJunctionTree& tree = result.tree;
  CliqueBinding binding = assign_potentials(id, tree);
  ModelPotentials pots = model_potentials(id, ev);

  // ---- compilation: combine bound potentials per clique ------------------
  std::size_t nc = tree.cliques.size();
  std::vector<Table> phi(nc), psi(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    std::vector<VarId> dom;
    for (VarId v : tree.cliques[c])
      if (!ev.count(v)) dom.push_back(v);

    const auto& pb = binding.prob_blocks[c];
    if (pb.empty()) {
      phi[c] = filled(dom, id, 1.0);  // all-ones at zero cost
    } else {
      phi[c] = broadcast(dom, pots.probabilities[static_cast<std::size_t>(pb[0])], id);
      for (std::size_t i = 1; i < pb.size(); ++i) {
        const PPot& p = pots.probabilities[static_cast<std::size_t>(pb[i])];
        mul_into(phi[c], p->dom, p->table, id, result.compile_ops);
      }
    }
    const auto& ub = binding.utilities[c];
    if (ub.empty()) {
      psi[c] = filled(dom, id, 0.0);  // zero table at zero cost
    } else {
      psi[c] = broadcast(dom, pots.utilities[static_cast<std::size_t>(ub[0])], id);
      for (std::size_t i = 1; i < ub.size(); ++i) {
        const PPot& p = pots.utilities[static_cast<std::size_t>(ub[i])];
        add_into(psi[c], p->dom, p->table, id, result.compile_ops);
      }
    }
  }

  // ---- collect toward the strong root ------------------------------------
  OpCounter& ctr = result.prop_ops;
  std::vector<std::pair<VarId, ArgmaxRecord>> records;

  auto reduce_all = [&](Table t, const std::set<VarId>& keep, bool record) {
    std::vector<VarId> elim;
    for (VarId v : t.dom)
      if (!keep.count(v)) elim.push_back(v);
    std::sort(elim.begin(), elim.end(), [&](VarId a, VarId b) {
      return order.position[static_cast<std::size_t>(a)] <
             order.position[static_cast<std::size_t>(b)];
    });
    for (VarId y : elim) {
      if (id.is_chance(y)) {
        t = reduce_sum(t, y, id, ctr);
      } else if (record) {
        ArgmaxRecord rec;
        t = reduce_max(t, y, id, ctr, &rec);
        records.emplace_back(y, std::move(rec));
      } else {
        t = reduce_max(t, y, id, ctr, nullptr);
      }
    }
    return t;
  };

  std::function<void(int)> collect = [&](int c) {
    std::vector<int> kids = tree.children_of[static_cast<std::size_t>(c)];
    std::sort(kids.begin(), kids.end());
    for (int k : kids) collect(k);
    if (c == tree.root) return;
    auto ci = static_cast<std::size_t>(c);
    int parent = tree.parent[ci];
    auto pi = static_cast<std::size_t>(parent);

    std::set<VarId> s;
    for (VarId v : tree.separators[ci])
      if (!ev.count(v)) s.insert(v);

    // probability marginal of the clique
    Table phi_msg = reduce_all(phi[ci], s, false);
    // utility marginal of the combined table; argmax rules fall out here
    Table prod = phi[ci];
    mul_into(prod, psi[ci].dom, psi[ci].v, id, ctr);
    Table psi_msg = reduce_all(std::move(prod), s, true);

    Table quot = divide_tables(psi_msg, phi_msg, ctr);
    mul_into(phi[pi], phi_msg.dom, phi_msg.v, id, ctr);
    add_into(psi[pi], quot.dom, quot.v, id, ctr);
  };
  collect(tree.root);

  auto ri = static_cast<std::size_t>(tree.root);
  Table root = phi[ri];
  mul_into(root, psi[ri].dom, psi[ri].v, id, ctr);
  root = reduce_all(std::move(root), {}, true);
  result.strategy.meu = root.v.empty() ? 0.0 : root.v[0];

  for (VarId d : id.decision_order) {
    auto past = relevant_past(tree, id, part, d);
    past.erase(std::remove_if(past.begin(), past.end(),
                              [&](VarId v) { return ev.count(v) > 0; }),
               past.end());
    auto it = std::find_if(records.begin(), records.end(),
                           [&](const auto& r) { return r.first == d; });
    if (it == records.end()) {
      result.strategy.rules.push_back(broadcast_rule(id, d, {}, {}, {}, past, true));
    } else {
      const ArgmaxRecord& rec = it->second;
      result.strategy.rules.push_back(
          broadcast_rule(id, d, rec.dom, rec.winner, rec.tie, past, false));
    }
  }
  return result;
}

}  // namespace idsolve
