#include "idsolve/lazy.hpp"

#include <algorithm>
#include <functional>

#include "idsolve/dsep.hpp"

namespace idsolve {

DecisionRule broadcast_rule(const InfluenceDiagram& id, VarId decision,
                            const std::vector<VarId>& from_dom, const std::vector<int>& winners,
                            const std::vector<std::uint8_t>& ties,
                            const std::vector<VarId>& to_dom, bool arbitrary) {
  DecisionRule rule;
  rule.decision = decision;
  rule.domain = to_dom;
  rule.arbitrary = arbitrary;
  std::int64_t n = table_size(to_dom, id);
  rule.table.assign(static_cast<std::size_t>(n), 0);
  rule.tie.assign(static_cast<std::size_t>(n), arbitrary ? 1 : 0);
  if (arbitrary || winners.empty()) return rule;
  for (VarId v : from_dom)
    if (std::find(to_dom.begin(), to_dom.end(), v) == to_dom.end())
      throw ModelError("internal: rule domain exceeds the relevant past");

  // stride of each to_dom variable inside the source table (0 when absent)
  std::vector<std::int64_t> src_stride(to_dom.size(), 0);
  {
    std::vector<std::int64_t> self(from_dom.size());
    std::int64_t acc = 1;
    for (int i = static_cast<int>(from_dom.size()) - 1; i >= 0; --i) {
      self[static_cast<std::size_t>(i)] = acc;
      acc *= id.card(from_dom[static_cast<std::size_t>(i)]);
    }
    for (std::size_t i = 0; i < to_dom.size(); ++i) {
      auto it = std::find(from_dom.begin(), from_dom.end(), to_dom[i]);
      if (it != from_dom.end())
        src_stride[i] = self[static_cast<std::size_t>(it - from_dom.begin())];
    }
  }
  std::vector<int> state(to_dom.size(), 0);
  std::int64_t src = 0;
  for (std::int64_t cell = 0; cell < n; ++cell) {
    rule.table[static_cast<std::size_t>(cell)] = winners[static_cast<std::size_t>(src)];
    rule.tie[static_cast<std::size_t>(cell)] = ties[static_cast<std::size_t>(src)];
    for (int i = static_cast<int>(to_dom.size()) - 1; i >= 0; --i) {
      auto ii = static_cast<std::size_t>(i);
      state[ii]++;
      src += src_stride[ii];
      if (state[ii] < id.card(to_dom[ii])) break;
      src -= src_stride[ii] * id.card(to_dom[ii]);
      state[ii] = 0;
    }
  }
  return rule;
}

LiveSet relevant_potentials(const LiveSet& live, const std::set<VarId>& separator,
                            const InfluenceDiagram& id) {
  std::vector<PPot> all = live.probs;
  all.insert(all.end(), live.utils.begin(), live.utils.end());
  std::set<VarId> connected = relevance_connected(all, separator, id.num_vars());

  std::set<const Potential*> required_divisors;
  for (const auto& u : live.utils)
    for (const auto& d : u->divisors) required_divisors.insert(d.get());

  LiveSet out;
  out.utils = live.utils;  // utilities are always relevant through their sink
  for (const auto& p : live.probs) {
    bool keep = false;
    if (required_divisors.count(p.get())) keep = true;
    if (!p->cpt_derived && !p->unity) keep = true;  // evidence likelihood term
    for (VarId v : p->dom)
      if (connected.count(v)) keep = true;
    if (p->dom.empty() && !p->unity) keep = true;  // scalar mass
    if (keep) out.probs.push_back(p);
  }

  // recursively drop potentials whose head variables are all barren
  bool changed = true;
  while (changed) {
    changed = false;
    std::set<VarId> required = separator;
    for (const auto& u : out.utils) {
      required.insert(u->dom.begin(), u->dom.end());
      for (const auto& d : u->divisors) required.insert(d->dom.begin(), d->dom.end());
    }
    BarrenSets bs = classify_barren(out.probs, out.utils, required, id.num_vars());
    for (auto it = out.probs.begin(); it != out.probs.end(); ++it) {
      const PPot& p = *it;
      if (p->unity || !p->cpt_derived || p->head.empty()) continue;
      if (required_divisors.count(p.get())) continue;
      bool all_barren = std::all_of(p->head.begin(), p->head.end(),
                                    [&](VarId h) { return bs.barren.count(h) > 0; });
      if (all_barren) {
        out.probs.erase(it);
        changed = true;
        break;
      }
    }
  }
  return out;
}

LiveSet absorb(LiveSet live, const std::set<VarId>& separator, const InfluenceDiagram& id,
               const InformationPartition& part, const LazyOptions& opt, ElimContext& cx,
               MessageSink sink) {
  if (opt.prune) live = relevant_potentials(live, separator, id);

  std::set<VarId> eliminate;
  for (VarId v : live_vars(live))
    if (!separator.count(v)) eliminate.insert(v);

  auto blocks = precedence_blocks(id, part);
  std::vector<VarId> order = choose_internal_order(eliminate, live, id, blocks);
  for (VarId y : order) {
    auto rec = eliminate_variable(live, y, cx);
    if (rec && sink.records) sink.records->emplace_back(y, std::move(*rec));
  }
  return live;
}

LazyResult solve_lazy(const InfluenceDiagram& id, const Evidence& ev, const LazyOptions& opt) {
  id.validate();
  auto part = information_partition(id);
  check_evidence(id, part, ev);

  auto moral = moral_graph(id);
  auto order = strong_elimination_order(moral, id, part);
  LazyResult result;
  result.tree = build_strong_tree(moral, order);
  const StrongJunctionTree& tree = result.tree;
  CliqueBinding binding = assign_potentials(id, tree);

  ModelPotentials pots = model_potentials(id, ev);

  ElimContext cx;
  cx.id = &id;
  cx.ctr = &result.ops;
  cx.divisions = &result.divisions;
  cx.immediate_divide = opt.force_divide;
  cx.allow_distribute = true;
  cx.unity_detection = opt.unity_detection;
  cx.unity_log = &result.unity_events;

  std::vector<std::pair<VarId, ArgmaxRecord>> records;
  MessageSink sink{&records};

  auto clique_live = [&](int c) {
    LiveSet live;
    for (int i : binding.prob_blocks[static_cast<std::size_t>(c)])
      live.probs.push_back(pots.probabilities[static_cast<std::size_t>(i)]);
    for (int i : binding.utilities[static_cast<std::size_t>(c)])
      live.utils.push_back(pots.utilities[static_cast<std::size_t>(i)]);
    return live;
  };

  // collect toward the strong root
  std::function<LiveSet(int)> collect = [&](int c) {
    LiveSet live = clique_live(c);
    std::vector<int> kids = tree.children_of[static_cast<std::size_t>(c)];
    std::sort(kids.begin(), kids.end());
    if (opt.reverse_children) std::reverse(kids.begin(), kids.end());
    for (int k : kids) {
      LiveSet msg = collect(k);
      live.probs.insert(live.probs.end(), msg.probs.begin(), msg.probs.end());
      live.utils.insert(live.utils.end(), msg.utils.begin(), msg.utils.end());
    }
    if (c == tree.root) return live;
    const auto& sep = tree.separators[static_cast<std::size_t>(c)];
    std::set<VarId> s(sep.begin(), sep.end());
    return absorb(std::move(live), s, id, part, opt, cx, sink);
  };

  LiveSet root_live = collect(tree.root);
  root_live = absorb(std::move(root_live), {}, id, part, opt, cx, sink);
  result.strategy.meu = finalize_scalars(root_live, cx);

  // assemble rules on the relevant past of each decision
  for (VarId d : id.decision_order) {
    auto past = relevant_past(tree, id, part, d);
    past.erase(std::remove_if(past.begin(), past.end(),
                              [&](VarId v) { return ev.count(v) > 0; }),
               past.end());
    auto it = std::find_if(records.begin(), records.end(),
                           [&](const auto& r) { return r.first == d; });
    if (it == records.end() || it->second.arbitrary) {
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
