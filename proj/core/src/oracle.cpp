#include "idsolve/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>

#include "idsolve/lazy.hpp"

namespace idsolve {

namespace {

// Full temporal ordering: first information set, first decision, second set...
std::vector<VarId> full_order(const InfluenceDiagram& id, const InformationPartition& part) {
  std::vector<VarId> order;
  for (std::size_t k = 0; k < part.sets.size(); ++k) {
    std::vector<VarId> set = part.sets[k];
    std::sort(set.begin(), set.end());
    order.insert(order.end(), set.begin(), set.end());
    if (k < id.decision_order.size()) order.push_back(id.decision_order[k]);
  }
  return order;
}

double value_at(const PPot& p, const std::vector<int>& config, const InfluenceDiagram& id) {
  std::int64_t idx = 0;
  for (VarId v : p->dom) idx = idx * id.card(v) + config[static_cast<std::size_t>(v)];
  return p->table[static_cast<std::size_t>(idx)];
}

std::int64_t cell_of(const std::vector<VarId>& dom, const std::vector<int>& config,
                     const InfluenceDiagram& id) {
  std::int64_t idx = 0;
  for (VarId v : dom) idx = idx * id.card(v) + config[static_cast<std::size_t>(v)];
  return idx;
}

}  // namespace

BruteForceResult brute_force_solve(const InfluenceDiagram& id, const Evidence& ev,
                                   std::int64_t config_cap) {
  id.validate();
  auto part = information_partition(id);
  check_evidence(id, part, ev);

  std::int64_t configs = 1;
  for (VarId v = 0; v < id.num_vars(); ++v) {
    if (ev.count(v)) continue;
    configs *= id.card(v);
    if (configs > config_cap) throw ModelError("state space exceeds the brute-force cap");
  }

  ModelPotentials pots = model_potentials(id, Evidence{});  // unrestricted
  std::vector<VarId> order = full_order(id, part);

  // per decision: full observed past, value table unused, optimal-state masks
  struct DecisionTable {
    std::vector<VarId> past;  // sorted by id
    std::vector<std::uint32_t> optimal;  // bitmask of maximizing states
    std::vector<int> winner;
    std::vector<std::uint8_t> tie;
  };
  std::map<VarId, DecisionTable> tables;
  {
    std::vector<VarId> seen;
    for (VarId v : order) {
      if (id.is_decision(v)) {
        DecisionTable t;
        t.past = seen;
        std::sort(t.past.begin(), t.past.end());
        std::int64_t n = table_size(t.past, id);
        t.optimal.assign(static_cast<std::size_t>(n), 0);
        t.winner.assign(static_cast<std::size_t>(n), 0);
        t.tie.assign(static_cast<std::size_t>(n), 0);
        tables[v] = std::move(t);
      }
      seen.push_back(v);
    }
  }

  std::vector<int> config(static_cast<std::size_t>(id.num_vars()), 0);
  std::function<double(std::size_t)> walk = [&](std::size_t pos) -> double {
    if (pos == order.size()) {
      double w = 1.0;
      for (const auto& p : pots.probabilities) w *= value_at(p, config, id);
      double u = 0.0;
      for (const auto& q : pots.utilities) u += value_at(q, config, id);
      return w * u;
    }
    VarId v = order[pos];
    auto vi = static_cast<std::size_t>(v);
    if (id.is_chance(v)) {
      auto it = ev.find(v);
      if (it != ev.end()) {
        config[vi] = it->second;
        return walk(pos + 1);
      }
      double s = 0.0;
      for (int x = 0; x < id.card(v); ++x) {
        config[vi] = x;
        s += walk(pos + 1);
      }
      config[vi] = 0;
      return s;
    }
    DecisionTable& t = tables[v];
    std::int64_t cell = cell_of(t.past, config, id);
    double best = 0.0;
    std::uint32_t mask = 0;
    int win = 0;
    bool tie = false;
    for (int x = 0; x < id.card(v); ++x) {
      config[vi] = x;
      double val = walk(pos + 1);
      if (x == 0 || val > best) {
        best = val;
        mask = 1u << x;
        win = x;
        tie = false;
      } else if (val == best) {
        mask |= 1u << x;
        tie = true;
      }
    }
    config[vi] = 0;
    auto ci = static_cast<std::size_t>(cell);
    t.optimal[ci] = mask;
    t.winner[ci] = win;
    t.tie[ci] = tie ? 1 : 0;
    return best;
  };

  BruteForceResult result;
  result.strategy.meu = walk(0);

  // relevant past from the strong junction tree, for the projected rules
  auto moral = moral_graph(id);
  auto elim = strong_elimination_order(moral, id, part);
  auto tree = build_strong_tree(moral, elim);

  for (VarId d : id.decision_order) {
    const DecisionTable& t = tables[d];
    DecisionRule full;
    full.decision = d;
    full.domain = t.past;
    full.table = t.winner;
    full.tie = t.tie;
    result.full.push_back(full);

    std::vector<VarId> past = relevant_past(tree, id, part, d);
    // drop evidence variables: their single observed state carries no choice
    past.erase(std::remove_if(past.begin(), past.end(),
                              [&](VarId v) { return ev.count(v) > 0; }),
               past.end());

    // project: intersect the optimal-state masks over the dropped variables
    DecisionRule rule;
    rule.decision = d;
    rule.domain = past;
    std::int64_t n = table_size(past, id);
    rule.table.assign(static_cast<std::size_t>(n), 0);
    rule.tie.assign(static_cast<std::size_t>(n), 0);

    std::vector<std::uint32_t> meet(static_cast<std::size_t>(n), ~0u);
    std::vector<int> sub(t.past.size(), 0);
    std::int64_t full_n = table_size(t.past, id);
    std::vector<int> cfg(static_cast<std::size_t>(id.num_vars()), 0);
    for (std::int64_t cell = 0; cell < full_n; ++cell) {
      // decode the full-past cell
      std::int64_t rem = cell;
      bool skip = false;
      for (std::size_t i = t.past.size(); i-- > 0;) {
        VarId v = t.past[i];
        int c = static_cast<int>(rem % id.card(v));
        rem /= id.card(v);
        sub[i] = c;
        cfg[static_cast<std::size_t>(v)] = c;
        auto eit = ev.find(v);
        if (eit != ev.end() && eit->second != c) skip = true;
      }
      if (skip) continue;  // unreachable under evidence
      std::int64_t pcell = cell_of(past, cfg, id);
      meet[static_cast<std::size_t>(pcell)] &= t.optimal[static_cast<std::size_t>(cell)];
    }
    for (std::int64_t c = 0; c < n; ++c) {
      std::uint32_t m = meet[static_cast<std::size_t>(c)];
      if (m == 0)
        throw ModelError("internal: optimal full-past rule is not constant over V_D");
      int win = 0;
      while (!(m & (1u << win))) win++;
      rule.table[static_cast<std::size_t>(c)] = win;
      rule.tie[static_cast<std::size_t>(c)] = (m & (m - 1)) ? 1 : 0;
    }
    result.strategy.rules.push_back(std::move(rule));
  }
  return result;
}

BucketResult bucket_eliminate(const InfluenceDiagram& id, const StrongEliminationOrder& order,
                              const Evidence& ev) {
  id.validate();
  auto part = information_partition(id);
  check_evidence(id, part, ev);

  ModelPotentials pots = model_potentials(id, ev);
  LiveSet live;
  live.probs = pots.probabilities;
  live.utils = pots.utilities;

  BucketResult result;
  ElimContext cx;
  cx.id = &id;
  cx.ctr = &result.ops;
  cx.divisions = &result.divisions;
  cx.immediate_divide = true;
  cx.allow_distribute = false;
  cx.unity_detection = true;

  std::vector<std::pair<VarId, ArgmaxRecord>> records;
  for (VarId y : order.order) {
    if (ev.count(y)) continue;
    auto rec = eliminate_variable(live, y, cx);
    if (rec) records.emplace_back(y, std::move(*rec));
  }
  result.strategy.meu = finalize_scalars(live, cx);

  for (VarId d : id.decision_order) {
    auto it = std::find_if(records.begin(), records.end(),
                           [&](const auto& r) { return r.first == d; });
    if (it == records.end() || it->second.arbitrary) {
      DecisionRule rule;
      rule.decision = d;
      rule.arbitrary = true;
      rule.table = {0};
      rule.tie = {1};
      result.strategy.rules.push_back(rule);
    } else {
      const ArgmaxRecord& rec = it->second;
      DecisionRule rule;
      rule.decision = d;
      rule.domain = rec.dom;
      rule.table = rec.winner;
      rule.tie = rec.tie;
      result.strategy.rules.push_back(rule);
    }
  }
  return result;
}

BucketResult bucket_eliminate(const InfluenceDiagram& id, const Evidence& ev) {
  auto part = information_partition(id);
  auto moral = moral_graph(id);
  auto order = strong_elimination_order(moral, id, part);
  return bucket_eliminate(id, order, ev);
}

double evaluate_strategy(const InfluenceDiagram& id, const Evidence& ev,
                         const std::vector<DecisionRule>& rules) {
  auto part = information_partition(id);
  ModelPotentials pots = model_potentials(id, Evidence{});
  std::vector<VarId> order = full_order(id, part);

  std::map<VarId, const DecisionRule*> by_decision;
  for (const auto& r : rules) by_decision[r.decision] = &r;

  std::vector<int> config(static_cast<std::size_t>(id.num_vars()), 0);
  std::function<double(std::size_t)> walk = [&](std::size_t pos) -> double {
    if (pos == order.size()) {
      double w = 1.0;
      for (const auto& p : pots.probabilities) w *= value_at(p, config, id);
      double u = 0.0;
      for (const auto& q : pots.utilities) u += value_at(q, config, id);
      return w * u;
    }
    VarId v = order[pos];
    auto vi = static_cast<std::size_t>(v);
    if (id.is_chance(v)) {
      auto it = ev.find(v);
      if (it != ev.end()) {
        config[vi] = it->second;
        return walk(pos + 1);
      }
      double s = 0.0;
      for (int x = 0; x < id.card(v); ++x) {
        config[vi] = x;
        s += walk(pos + 1);
      }
      config[vi] = 0;
      return s;
    }
    auto it = by_decision.find(v);
    if (it == by_decision.end()) throw ModelError("strategy lacks a rule for a decision");
    const DecisionRule& r = *it->second;
    int choice = r.arbitrary ? 0
                             : r.table[static_cast<std::size_t>(cell_of(r.domain, config, id))];
    config[vi] = choice;
    double out = walk(pos + 1);
    config[vi] = 0;
    return out;
  };
  return walk(0);
}

}  // namespace idsolve
