#include "idsolve/eliminate.hpp"

#include <algorithm>
#include <cassert>

#include "idsolve/dsep.hpp"

namespace idsolve {

namespace {

// Total order on potentials so that frame processing is independent of the
// order in which messages arrived.
bool canonical_less(const PPot& a, const PPot& b) {
  if (a->dom != b->dom) return a->dom < b->dom;
  if (a->kind != b->kind) return a->kind < b->kind;
  if (a->unity != b->unity) return static_cast<int>(a->unity) < static_cast<int>(b->unity);
  if (a->head != b->head) return a->head < b->head;
  if (a->table != b->table) return a->table < b->table;
  return a->divisors.size() < b->divisors.size();
}

bool contains_ptr(const std::vector<PPot>& set, const PPot& p) {
  return std::find(set.begin(), set.end(), p) != set.end();
}

std::int64_t cells(const std::vector<VarId>& dom, const DomainInfo& info) {
  return table_size(dom, info);
}

std::vector<VarId> dom_minus(const std::vector<VarId>& dom, VarId y) {
  std::vector<VarId> out;
  for (VarId v : dom)
    if (v != y) out.push_back(v);
  return out;
}

struct Frames {
  std::vector<PPot> probs;    // every probability potential containing y
  std::vector<PPot> factors;  // the non-unity ones, canonical order
  std::vector<PPot> utils;    // utilities touching y, canonical order
  std::vector<VarId> prob_dom;
};

Frames take_frames(LiveSet& live, VarId y) {
  Frames f;
  auto rest_p = std::partition(live.probs.begin(), live.probs.end(),
                               [&](const PPot& p) { return !p->has_var(y); });
  f.probs.assign(rest_p, live.probs.end());
  live.probs.erase(rest_p, live.probs.end());

  auto touches = [&](const PPot& u) {
    if (u->has_var(y)) return true;
    for (const auto& d : u->divisors)
      if (d->has_var(y)) return true;
    return false;
  };
  auto rest_u = std::partition(live.utils.begin(), live.utils.end(),
                               [&](const PPot& u) { return !touches(u); });
  f.utils.assign(rest_u, live.utils.end());
  live.utils.erase(rest_u, live.utils.end());

  for (const auto& p : f.probs) {
    if (!p->unity) f.factors.push_back(p);
    f.prob_dom = dom_union(f.prob_dom, p->dom);
  }
  std::sort(f.factors.begin(), f.factors.end(), canonical_less);
  std::sort(f.utils.begin(), f.utils.end(), canonical_less);
  return f;
}

// One utility term of the elimination, after divisor resolution against the
// local factor list.
struct Term {
  PPot util;
  std::vector<PPot> factors;    // local factors this term still multiplies
  std::vector<PPot> executed;   // divisors that must be divided in
  std::vector<PPot> surviving;  // divisors passing through (single-term only)
};

std::vector<Term> make_terms(const Frames& f, bool single_may_pass) {
  std::vector<Term> terms;
  bool single = f.utils.size() == 1;
  for (const auto& u : f.utils) {
    Term t;
    t.util = u;
    for (const auto& fac : f.factors)
      if (!contains_ptr(u->divisors, fac)) t.factors.push_back(fac);
    for (const auto& d : u->divisors) {
      if (d->unity) continue;  // unity divisor: division never needed
      if (contains_ptr(f.factors, d)) continue;  // cancels against the product
      if (single && single_may_pass)
        t.surviving.push_back(d);
      else
        t.executed.push_back(d);
    }
    terms.push_back(std::move(t));
  }
  return terms;
}

// Predicted scalar-op cost of the combined (sum-first) route; mirrors
// run_combined exactly.
long long cost_combined(const Frames& f, VarId y, const DomainInfo& info, bool y_chance,
                        bool phi_numeric) {
  long long c = 0;
  // shared probability product
  std::vector<VarId> pi;
  bool have_pi = false;
  if (!f.factors.empty() && (phi_numeric || !f.utils.empty())) {
    pi = f.factors[0]->dom;
    for (std::size_t i = 1; i < f.factors.size(); ++i) {
      pi = dom_union(pi, f.factors[i]->dom);
      c += cells(pi, info);
    }
    have_pi = true;
  }
  if (phi_numeric && have_pi)
    c += cells(dom_minus(pi, y), info) * (info.card(y) - 1);  // sum or max marginal
  if (f.utils.empty()) return c;

  std::vector<VarId> acc;
  bool first = true;
  for (const auto& u : f.utils) {
    std::vector<VarId> ud = u->dom;
    for (const auto& d : u->divisors) {
      if (d->unity) continue;
      ud = dom_union(ud, d->dom);
      c += cells(ud, info);  // executed division
    }
    if (first) {
      acc = ud;
      first = false;
    } else {
      acc = dom_union(acc, ud);
      c += cells(acc, info);
    }
  }
  if (have_pi) {
    acc = dom_union(acc, pi);
    c += cells(acc, info);
  }
  c += cells(dom_minus(acc, y), info) * (info.card(y) - 1);
  (void)y_chance;
  return c;
}

// Predicted cost of the distributed (per-term) route; mirrors
// run_distributed exactly.
long long cost_distributed(const Frames& f, VarId y, const DomainInfo& info,
                           bool phi_numeric) {
  long long c = 0;
  std::vector<VarId> pi;
  bool have_pi = false;
  if (!f.factors.empty()) {
    pi = f.factors[0]->dom;
    std::vector<VarId> acc = pi;
    bool needed = phi_numeric;
    // the full product is materialized when phi is numeric or some term
    // multiplies every factor
    auto terms = make_terms(f, true);
    for (const auto& t : terms)
      if (t.factors.size() == f.factors.size() && !f.factors.empty()) needed = true;
    if (needed) {
      for (std::size_t i = 1; i < f.factors.size(); ++i) {
        acc = dom_union(acc, f.factors[i]->dom);
        c += cells(acc, info);
      }
      pi = acc;
      have_pi = true;
    }
  }
  if (phi_numeric && have_pi)
    c += cells(dom_minus(pi, y), info) * (info.card(y) - 1);

  auto terms = make_terms(f, true);
  std::vector<VarId> sum_dom;
  bool first = true;
  for (const auto& t : terms) {
    std::vector<VarId> ud = t.util->dom;
    for (const auto& d : t.executed) {
      ud = dom_union(ud, d->dom);
      c += cells(ud, info);
    }
    std::vector<VarId> td = ud;
    if (t.factors.size() == f.factors.size() && have_pi) {
      if (!t.factors.empty()) {
        td = dom_union(td, pi);
        c += cells(td, info);
      }
    } else {
      for (const auto& fac : t.factors) {
        td = dom_union(td, fac->dom);
        c += cells(td, info);
      }
    }
    if (first) {
      sum_dom = td;
      first = false;
    } else {
      sum_dom = dom_union(sum_dom, td);
      c += cells(sum_dom, info);
    }
  }
  if (!terms.empty()) c += cells(dom_minus(sum_dom, y), info) * (info.card(y) - 1);
  return c;
}

PPot chain_multiply(const std::vector<PPot>& factors, const DomainInfo& info, OpCounter& ctr) {
  PPot acc = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) acc = multiply(acc, factors[i], info, ctr);
  return acc;
}

// Probability max-marginal: the generalized marginalization of a decision
// from a probability potential. Such a potential is constant over the
// decision (all of the decision's descendants are gone by then), so the max
// is a slice and the normalization pedigree survives.
PPot prob_max_out(const PPot& p, VarId d, const DomainInfo& info, OpCounter& ctr) {
  auto fake = std::make_shared<Potential>(*p);
  fake->kind = PotKind::Utility;
  fake->head.clear();
  auto [m, rec] = max_out(fake, d, info, ctr);
  (void)rec;
  auto out = std::make_shared<Potential>(*m);
  out->kind = PotKind::Probability;
  for (VarId h : p->head)
    if (h != d) out->head.push_back(h);
  out->cpt_derived = p->cpt_derived;
  return out;
}

}  // namespace

std::set<VarId> live_vars(const LiveSet& live) {
  std::set<VarId> vars;
  for (const auto& p : live.probs) vars.insert(p->dom.begin(), p->dom.end());
  for (const auto& u : live.utils) {
    vars.insert(u->dom.begin(), u->dom.end());
    for (const auto& d : u->divisors) vars.insert(d->dom.begin(), d->dom.end());
  }
  return vars;
}

std::optional<ArgmaxRecord> eliminate_variable(LiveSet& live, VarId y, ElimContext& cx) {
  const InfluenceDiagram& id = *cx.id;
  OpCounter& ctr = *cx.ctr;
  bool y_chance = id.is_chance(y);
  Frames f = take_frames(live, y);

  // ---- probability marginal -------------------------------------------
  std::vector<VarId> heads;
  bool derived = true;
  for (const auto& fac : f.factors) {
    heads = dom_union(heads, fac->head);
    derived = derived && fac->cpt_derived;
  }
  bool predicted_unity =
      cx.unity_detection && derived && heads.size() == 1 && heads[0] == y && y_chance;

  PPot pi;  // materialized product of the non-unity factors
  auto ensure_pi = [&]() {
    if (!pi && !f.factors.empty()) pi = chain_multiply(f.factors, id, ctr);
    return pi;
  };

  PPot phi;
  if (f.factors.empty()) {
    phi = make_unity(dom_minus(f.prob_dom, y));
  } else if (y_chance) {
    if (predicted_unity) {
      phi = make_unity(dom_minus(f.prob_dom, y));
      if (cx.unity_log) cx.unity_log->push_back(phi->dom);
    } else {
      ensure_pi();
      phi = sum_out(pi, y, id, ctr, cx.unity_detection);
      if (phi->unity && cx.unity_log) cx.unity_log->push_back(phi->dom);
    }
  } else {
    // A probability potential can reach a decision elimination only with the
    // decision in its tail, constant over it (every descendant of the
    // decision has been eliminated). M applies max to it.
    ensure_pi();
    phi = prob_max_out(pi, y, id, ctr);
  }

  // ---- utility marginal ------------------------------------------------
  std::optional<ArgmaxRecord> record;
  PPot psi;
  if (!f.utils.empty()) {
    for (const auto& u : f.utils)
      if (!u->has_var(y))
        throw PotentialError("internal: pending divisor outlived its utility domain");

    bool phi_numeric = !f.factors.empty() && !predicted_unity;
    bool distribute = false;
    if (cx.allow_distribute) {
      long long cc = cost_combined(f, y, id, y_chance, phi_numeric);
      long long cd = cost_distributed(f, y, id, phi_numeric);
      distribute = cd < cc;
    }

    auto exec_divisions = [&](PPot u, const std::vector<PPot>& divs) {
      PPot out = u;
      if (!divs.empty()) {
        auto stripped = std::make_shared<Potential>(*out);
        stripped->divisors.clear();
        out = stripped;
        for (const auto& d : divs) out = divide(out, d, id, ctr);
      }
      return out;
    };

    PPot total;
    if (!distribute) {
      // combined: execute every division, sum the utilities, multiply once
      PPot acc;
      for (const auto& u : f.utils) {
        std::vector<PPot> divs;
        for (const auto& d : u->divisors)
          if (!d->unity) divs.push_back(d);
        PPot t = exec_divisions(u, divs);
        if (!u->divisors.empty()) {
          auto clean = std::make_shared<Potential>(*t);
          clean->divisors.clear();
          t = clean;
        }
        acc = acc ? add(acc, t, id, ctr) : t;
      }
      if (!f.factors.empty()) {
        ensure_pi();
        total = multiply(pi, acc, id, ctr);
      } else {
        total = acc;
      }
    } else {
      auto terms = make_terms(f, true);
      PPot acc;
      std::vector<PPot> pass;
      for (const auto& t : terms) {
        PPot u = exec_divisions(t.util, t.executed);
        {
          auto clean = std::make_shared<Potential>(*u);
          clean->divisors.clear();
          u = clean;
        }
        PPot prod;
        if (t.factors.size() == f.factors.size() && !t.factors.empty()) {
          ensure_pi();
          prod = multiply(pi, u, id, ctr);
        } else {
          prod = u;
          for (const auto& fac : t.factors) prod = multiply(prod, fac, id, ctr);
        }
        pass = t.surviving;  // nonempty only in the single-term case
        acc = acc ? add(acc, prod, id, ctr) : prod;
      }
      if (!pass.empty()) {
        auto with = std::make_shared<Potential>(*acc);
        with->divisors = pass;
        acc = with;
      }
      total = acc;
    }

    if (y_chance) {
      psi = sum_out(total, y, id, ctr, false);
    } else {
      auto [m, rec] = max_out(total, y, id, ctr);
      psi = m;
      record = std::move(rec);
    }

    // Alg. 5.3 step 3: pair the utility with the probability marginal
    if (!phi->unity) {
      if (cx.divisions)
        cx.divisions->introduced += cells(dom_union(psi->dom, phi->dom), id);
      if (cx.immediate_divide) {
        psi = divide(psi, phi, id, ctr);
      } else {
        auto pending = std::make_shared<Potential>(*psi);
        pending->divisors.push_back(phi);
        psi = pending;
      }
    }
  } else if (!y_chance) {
    // barren decision: any alternative is optimal
    ArgmaxRecord rec;
    rec.decision = y;
    rec.winner = {0};
    rec.tie = {1};
    rec.arbitrary = true;
    record = std::move(rec);
  }

  live.probs.push_back(phi);
  if (psi) live.utils.push_back(psi);
  return record;
}

double finalize_scalars(LiveSet& live, ElimContext& cx) {
  const InfluenceDiagram& id = *cx.id;
  OpCounter& ctr = *cx.ctr;

  std::vector<PPot> factors;
  for (const auto& p : live.probs) {
    if (p->unity) continue;
    if (!p->scalar())
      throw PotentialError("internal: non-scalar probability potential at finalization");
    factors.push_back(p);
  }
  std::sort(factors.begin(), factors.end(), canonical_less);

  std::vector<PPot> utils = live.utils;
  std::sort(utils.begin(), utils.end(), canonical_less);

  PPot total;
  for (const auto& u : utils) {
    if (!u->scalar()) throw PotentialError("internal: non-scalar utility at finalization");
    std::vector<PPot> local = factors;
    PPot term = u;
    std::vector<PPot> divs;
    for (const auto& d : u->divisors) {
      if (d->unity) continue;
      auto it = std::find(local.begin(), local.end(), d);
      if (it != local.end())
        local.erase(it);  // cancels against the identical factor
      else
        divs.push_back(d);
    }
    {
      auto clean = std::make_shared<Potential>(*term);
      clean->divisors.clear();
      term = clean;
    }
    for (const auto& d : divs) term = divide(term, d, id, ctr);
    for (const auto& fac : local) term = multiply(term, fac, id, ctr);
    total = total ? add(total, term, id, ctr) : term;
  }
  live.probs.clear();
  live.utils.clear();
  return total ? total->table[0] : 0.0;
}

std::vector<VarId> choose_internal_order(const std::set<VarId>& vars, const LiveSet& live,
                                         const InfluenceDiagram& id,
                                         const std::vector<int>& blocks) {
  // structural simulation of the live sets: domains and heads only
  struct Struct {
    std::vector<VarId> dom, head;
    bool is_prob;
  };
  std::vector<Struct> sim;
  for (const auto& p : live.probs)
    if (!p->unity) sim.push_back({p->dom, p->head, true});
  for (const auto& u : live.utils) {
    std::vector<VarId> dom = u->dom;
    for (const auto& d : u->divisors) dom = dom_union(dom, d->dom);
    sim.push_back({dom, {}, false});
  }

  auto to_pots = [&](const std::vector<Struct>& s) {
    std::pair<std::vector<PPot>, std::vector<PPot>> out;
    for (const auto& x : s) {
      auto p = std::make_shared<Potential>();
      p->dom = x.dom;
      p->head = x.head;
      p->kind = x.is_prob ? PotKind::Probability : PotKind::Utility;
      if (x.is_prob)
        out.first.push_back(p);
      else
        out.second.push_back(p);
    }
    return out;
  };

  auto eliminate_sim = [](std::vector<Struct>& s, VarId y) {
    std::vector<VarId> pd, ph, ud;
    bool any_p = false, any_u = false;
    std::vector<Struct> rest;
    for (auto& x : s) {
      bool hit = std::binary_search(x.dom.begin(), x.dom.end(), y);
      if (!hit) {
        rest.push_back(x);
        continue;
      }
      if (x.is_prob) {
        pd = dom_union(pd, x.dom);
        ph = dom_union(ph, x.head);
        any_p = true;
      } else {
        ud = dom_union(ud, x.dom);
        any_u = true;
      }
    }
    std::vector<VarId> phi_dom, phi_head;
    if (any_p) {
      phi_dom = pd;
      phi_dom.erase(std::remove(phi_dom.begin(), phi_dom.end(), y), phi_dom.end());
      phi_head = ph;
      phi_head.erase(std::remove(phi_head.begin(), phi_head.end(), y), phi_head.end());
      rest.push_back({phi_dom, phi_head, true});
    }
    if (any_u) {
      std::vector<VarId> psi_dom = dom_union(pd, ud);
      psi_dom.erase(std::remove(psi_dom.begin(), psi_dom.end(), y), psi_dom.end());
      rest.push_back({psi_dom, {}, false});
    }
    s = rest;
  };

  std::set<VarId> remaining = vars;
  std::vector<VarId> order;
  while (!remaining.empty()) {
    int max_block = -1;
    for (VarId v : remaining) max_block = std::max(max_block, blocks[static_cast<std::size_t>(v)]);
    std::vector<VarId> legal;
    for (VarId v : remaining)
      if (blocks[static_cast<std::size_t>(v)] == max_block) legal.push_back(v);
    std::sort(legal.begin(), legal.end());

    // barren classification relative to what stays behind
    std::set<VarId> required;
    for (const auto& x : sim)
      for (VarId v : x.dom)
        if (!remaining.count(v)) required.insert(v);
    auto [probs_v, utils_v] = to_pots(sim);
    BarrenSets bs = classify_barren(probs_v, utils_v, required, id.num_vars());

    VarId pick = -1;
    std::vector<VarId> pb;
    for (VarId v : legal)
      if (bs.probabilistic_barren.count(v)) pb.push_back(v);

    if (!pb.empty()) {
      pick = pb.front();
      for (VarId y : legal) {
        if (bs.probabilistic_barren.count(y)) continue;
        // does eliminating y shrink some utility it touches?
        std::vector<VarId> union_dom;
        std::int64_t max_util_cells = 0;
        bool in_util = false;
        for (const auto& x : sim) {
          if (!std::binary_search(x.dom.begin(), x.dom.end(), y)) continue;
          union_dom = dom_union(union_dom, x.dom);
          if (!x.is_prob) {
            in_util = true;
            max_util_cells = std::max(max_util_cells, table_size(x.dom, id));
          }
        }
        if (!in_util) continue;
        std::vector<VarId> res = union_dom;
        res.erase(std::remove(res.begin(), res.end(), y), res.end());
        if (table_size(res, id) >= max_util_cells) continue;
        // ...without waking a barren variable
        std::vector<Struct> after = sim;
        eliminate_sim(after, y);
        auto [ap, au] = to_pots(after);
        std::set<VarId> req2 = required;
        BarrenSets bs2 = classify_barren(ap, au, req2, id.num_vars());
        bool woke = false;
        for (VarId b : bs.barren)
          if (remaining.count(b) && b != y && !bs2.barren.count(b)) {
            woke = true;
            break;
          }
        if (!woke) {
          pick = y;
          break;
        }
      }
    } else {
      // min-fill on the live domain graph, lowest id on ties
      std::set<VarId> nodes;
      for (const auto& x : sim) nodes.insert(x.dom.begin(), x.dom.end());
      auto adjacent = [&](VarId a, VarId b) {
        for (const auto& x : sim)
          if (std::binary_search(x.dom.begin(), x.dom.end(), a) &&
              std::binary_search(x.dom.begin(), x.dom.end(), b))
            return true;
        return false;
      };
      int best_fill = -1;
      for (VarId v : legal) {
        std::vector<VarId> nb;
        for (VarId w : nodes)
          if (w != v && adjacent(v, w)) nb.push_back(w);
        int fill = 0;
        for (std::size_t i = 0; i < nb.size(); ++i)
          for (std::size_t j = i + 1; j < nb.size(); ++j)
            if (!adjacent(nb[i], nb[j])) fill++;
        if (best_fill < 0 || fill < best_fill) {
          best_fill = fill;
          pick = v;
        }
      }
    }

    if (pick < 0) pick = legal.front();
    order.push_back(pick);
    remaining.erase(pick);
    eliminate_sim(sim, pick);
  }
  return order;
}

}  // namespace idsolve
