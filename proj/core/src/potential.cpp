#include "idsolve/potential.hpp"

#include <algorithm>
#include <cmath>

namespace idsolve {

bool Potential::has_var(VarId v) const {
  return std::binary_search(dom.begin(), dom.end(), v);
}

bool Potential::head_var(VarId v) const {
  return std::binary_search(head.begin(), head.end(), v);
}

std::int64_t table_size(const std::vector<VarId>& vars, const DomainInfo& info) {
  std::int64_t n = 1;
  for (VarId v : vars) n *= info.card(v);
  return n;
}

std::vector<VarId> dom_union(const std::vector<VarId>& a, const std::vector<VarId>& b) {
  std::vector<VarId> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

namespace {

// Strides of `vars` (sorted, first slowest) inside their own table.
std::vector<std::int64_t> self_strides(const std::vector<VarId>& vars, const DomainInfo& info) {
  std::vector<std::int64_t> s(vars.size());
  std::int64_t acc = 1;
  for (int i = static_cast<int>(vars.size()) - 1; i >= 0; --i) {
    s[i] = acc;
    acc *= info.card(vars[i]);
  }
  return s;
}

// Stride of each result variable inside an operand table (0 when absent).
std::vector<std::int64_t> project_strides(const std::vector<VarId>& result,
                                          const std::vector<VarId>& operand,
                                          const DomainInfo& info) {
  std::vector<std::int64_t> op_strides = self_strides(operand, info);
  std::vector<std::int64_t> out(result.size(), 0);
  for (std::size_t i = 0; i < result.size(); ++i) {
    auto it = std::lower_bound(operand.begin(), operand.end(), result[i]);
    if (it != operand.end() && *it == result[i])
      out[i] = op_strides[static_cast<std::size_t>(it - operand.begin())];
  }
  return out;
}

// Walks all configurations of `vars`, keeping operand offsets in sync.
struct CellWalker {
  const DomainInfo& info;
  const std::vector<VarId>& vars;
  std::vector<int> state;

  CellWalker(const DomainInfo& i, const std::vector<VarId>& v)
      : info(i), vars(v), state(v.size(), 0) {}

  bool advance(std::vector<std::int64_t>& offsets,
               const std::vector<std::vector<std::int64_t>>& strides) {
    for (int i = static_cast<int>(vars.size()) - 1; i >= 0; --i) {
      state[static_cast<std::size_t>(i)]++;
      for (std::size_t k = 0; k < offsets.size(); ++k)
        offsets[k] += strides[k][static_cast<std::size_t>(i)];
      if (state[static_cast<std::size_t>(i)] < info.card(vars[static_cast<std::size_t>(i)]))
        return true;
      for (std::size_t k = 0; k < offsets.size(); ++k)
        offsets[k] -= strides[k][static_cast<std::size_t>(i)] *
                      info.card(vars[static_cast<std::size_t>(i)]);
      state[static_cast<std::size_t>(i)] = 0;
    }
    return false;
  }
};

// Reindexes `values` given over `vars` (listed order, first slowest) into the
// canonical sorted layout.
std::vector<double> canonicalize(const std::vector<VarId>& vars,
                                 const std::vector<double>& values,
                                 const std::vector<VarId>& sorted,
                                 const DomainInfo& info) {
  if (vars == sorted) return values;
  std::vector<std::int64_t> src_strides = self_strides(vars, info);
  // stride of each sorted var inside the source layout
  std::vector<std::int64_t> strides(sorted.size(), 0);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    auto it = std::find(vars.begin(), vars.end(), sorted[i]);
    strides[i] = src_strides[static_cast<std::size_t>(it - vars.begin())];
  }
  std::vector<double> out(values.size());
  CellWalker walk(info, sorted);
  std::vector<std::int64_t> off{0};
  std::vector<std::vector<std::int64_t>> sv{strides};
  std::int64_t cell = 0;
  do {
    out[static_cast<std::size_t>(cell++)] = values[static_cast<std::size_t>(off[0])];
  } while (walk.advance(off, sv));
  return out;
}

std::vector<VarId> sorted_unique(std::vector<VarId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

PPot make_probability(std::vector<VarId> vars, std::vector<VarId> head_vars,
                      std::vector<double> values, const DomainInfo& info) {
  auto sorted = sorted_unique(vars);
  if (sorted.size() != vars.size()) throw PotentialError("duplicate variable in domain");
  if (static_cast<std::int64_t>(values.size()) != table_size(sorted, info))
    throw PotentialError("table size mismatch");
  auto p = std::make_shared<Potential>();
  p->kind = PotKind::Probability;
  p->dom = sorted;
  p->head = sorted_unique(std::move(head_vars));
  p->table = canonicalize(vars, values, sorted, info);
  return p;
}

PPot make_utility(std::vector<VarId> vars, std::vector<double> values,
                  const DomainInfo& info) {
  auto sorted = sorted_unique(vars);
  if (sorted.size() != vars.size()) throw PotentialError("duplicate variable in domain");
  if (static_cast<std::int64_t>(values.size()) != table_size(sorted, info))
    throw PotentialError("table size mismatch");
  auto p = std::make_shared<Potential>();
  p->kind = PotKind::Utility;
  p->dom = sorted;
  p->table = canonicalize(vars, values, sorted, info);
  p->cpt_derived = false;
  return p;
}

PPot make_unity(std::vector<VarId> vars) {
  auto p = std::make_shared<Potential>();
  p->kind = PotKind::Probability;
  p->dom = sorted_unique(std::move(vars));
  p->unity = true;
  return p;
}

PPot make_scalar_utility(double value) {
  auto p = std::make_shared<Potential>();
  p->kind = PotKind::Utility;
  p->table = {value};
  p->cpt_derived = false;
  return p;
}

PPot multiply(const PPot& a, const PPot& b, const DomainInfo& info, OpCounter& ctr) {
  if (a->is_utility() && b->is_utility())
    throw PotentialError("utility*utility is undefined; utilities combine by add");
  if (a->is_probability() && a->unity) {
    if (b->is_probability() && b->unity) return make_unity(dom_union(a->dom, b->dom));
    return b;
  }
  if (b->is_probability() && b->unity) return a;

  auto out = std::make_shared<Potential>();
  out->kind = (a->is_utility() || b->is_utility()) ? PotKind::Utility : PotKind::Probability;
  out->dom = dom_union(a->dom, b->dom);
  if (out->is_probability()) {
    out->head = dom_union(a->head, b->head);
    out->cpt_derived = a->cpt_derived && b->cpt_derived;
  } else {
    out->cpt_derived = false;
    const Potential& u = a->is_utility() ? *a : *b;
    out->divisors = u.divisors;
  }
  out->table.resize(static_cast<std::size_t>(table_size(out->dom, info)));

  std::vector<std::vector<std::int64_t>> strides{project_strides(out->dom, a->dom, info),
                                                 project_strides(out->dom, b->dom, info)};
  std::vector<std::int64_t> off{0, 0};
  CellWalker walk(info, out->dom);
  std::int64_t cell = 0;
  do {
    out->table[static_cast<std::size_t>(cell++)] =
        a->table[static_cast<std::size_t>(off[0])] * b->table[static_cast<std::size_t>(off[1])];
    ctr.mul++;
  } while (walk.advance(off, strides));
  return out;
}

PPot add(const PPot& a, const PPot& b, const DomainInfo& info, OpCounter& ctr) {
  if (!a->is_utility() || !b->is_utility())
    throw PotentialError("add requires two utility potentials");
  if (!a->divisors.empty() || !b->divisors.empty())
    throw PotentialError("cannot add utilities with pending divisors");

  auto out = std::make_shared<Potential>();
  out->kind = PotKind::Utility;
  out->cpt_derived = false;
  out->dom = dom_union(a->dom, b->dom);
  out->table.resize(static_cast<std::size_t>(table_size(out->dom, info)));

  std::vector<std::vector<std::int64_t>> strides{project_strides(out->dom, a->dom, info),
                                                 project_strides(out->dom, b->dom, info)};
  std::vector<std::int64_t> off{0, 0};
  CellWalker walk(info, out->dom);
  std::int64_t cell = 0;
  do {
    out->table[static_cast<std::size_t>(cell++)] =
        a->table[static_cast<std::size_t>(off[0])] + b->table[static_cast<std::size_t>(off[1])];
    ctr.add++;
  } while (walk.advance(off, strides));
  return out;
}

PPot divide(const PPot& num, const PPot& den, const DomainInfo& info, OpCounter& ctr) {
  if (!num->is_utility() || !den->is_probability())
    throw PotentialError("divide expects utility / probability");
  if (den->unity) return num;

  auto out = std::make_shared<Potential>();
  out->kind = PotKind::Utility;
  out->cpt_derived = false;
  out->dom = dom_union(num->dom, den->dom);
  out->divisors = num->divisors;
  out->table.resize(static_cast<std::size_t>(table_size(out->dom, info)));

  std::vector<std::vector<std::int64_t>> strides{project_strides(out->dom, num->dom, info),
                                                 project_strides(out->dom, den->dom, info)};
  std::vector<std::int64_t> off{0, 0};
  CellWalker walk(info, out->dom);
  std::int64_t cell = 0;
  do {
    double n = num->table[static_cast<std::size_t>(off[0])];
    double d = den->table[static_cast<std::size_t>(off[1])];
    double q;
    if (d == 0.0) {
      if (n != 0.0) throw PotentialError("nonzero/zero division: inconsistent model or evidence");
      q = 0.0;
    } else {
      q = n / d;
    }
    out->table[static_cast<std::size_t>(cell++)] = q;
    ctr.div++;
  } while (walk.advance(off, strides));
  return out;
}

PPot sum_out(const PPot& p, VarId x, const DomainInfo& info, OpCounter& ctr, bool structural) {
  if (!p->has_var(x)) throw PotentialError("sum_out: variable not in domain");
  if (p->unity) throw PotentialError("sum_out on a unity potential; callers skip these");

  std::vector<VarId> rest;
  for (VarId v : p->dom)
    if (v != x) rest.push_back(v);

  bool head_hit = p->head_var(x);
  if (structural && p->is_probability() && p->cpt_derived && head_hit && p->head.size() == 1)
    return make_unity(rest);

  auto out = std::make_shared<Potential>();
  out->kind = p->kind;
  out->dom = rest;
  if (p->is_probability()) {
    for (VarId v : p->head)
      if (v != x) out->head.push_back(v);
    // Summing a tail variable past a live head breaks the normalization
    // pedigree: the remaining heads no longer sum to one per tail config.
    out->cpt_derived = p->cpt_derived && head_hit;
  } else {
    out->cpt_derived = false;
    out->divisors = p->divisors;
  }
  out->table.assign(static_cast<std::size_t>(table_size(rest, info)), 0.0);

  int cx = info.card(x);
  // strides of the remaining variables and of x inside p's table
  std::vector<std::int64_t> rest_in_src = project_strides(rest, p->dom, info);
  std::int64_t x_stride = project_strides({x}, p->dom, info)[0];

  CellWalker walk(info, rest);
  std::vector<std::int64_t> off{0};
  std::vector<std::vector<std::int64_t>> sv{rest_in_src};
  std::int64_t cell = 0;
  do {
    double acc = p->table[static_cast<std::size_t>(off[0])];
    for (int s = 1; s < cx; ++s) {
      acc += p->table[static_cast<std::size_t>(off[0] + s * x_stride)];
      ctr.add++;
    }
    out->table[static_cast<std::size_t>(cell++)] = acc;
  } while (walk.advance(off, sv));
  return out;
}

std::pair<PPot, ArgmaxRecord> max_out(const PPot& p, VarId d, const DomainInfo& info,
                                      OpCounter& ctr) {
  if (!p->has_var(d)) throw PotentialError("max_out: variable not in domain");
  if (!p->is_utility()) throw PotentialError("max_out expects a utility potential");
  for (const auto& dv : p->divisors)
    if (dv->has_var(d)) throw PotentialError("max_out across a pending divisor");

  std::vector<VarId> rest;
  for (VarId v : p->dom)
    if (v != d) rest.push_back(v);

  auto out = std::make_shared<Potential>();
  out->kind = PotKind::Utility;
  out->cpt_derived = false;
  out->dom = rest;
  out->divisors = p->divisors;
  out->table.resize(static_cast<std::size_t>(table_size(rest, info)));

  ArgmaxRecord rec;
  rec.decision = d;
  rec.dom = rest;
  rec.winner.resize(out->table.size());
  rec.tie.assign(out->table.size(), 0);

  int cd = info.card(d);
  std::vector<std::int64_t> rest_strides = project_strides(rest, p->dom, info);
  std::int64_t d_stride = project_strides({d}, p->dom, info)[0];

  CellWalker walk(info, rest);
  std::vector<std::int64_t> off{0};
  std::vector<std::vector<std::int64_t>> sv{rest_strides};
  std::int64_t cell = 0;
  do {
    double best = p->table[static_cast<std::size_t>(off[0])];
    int win = 0;
    bool tie = false;
    for (int s = 1; s < cd; ++s) {
      double v = p->table[static_cast<std::size_t>(off[0] + s * d_stride)];
      ctr.max++;
      if (v > best) {
        best = v;
        win = s;
        tie = false;
      } else if (v == best) {
        tie = true;
      }
    }
    out->table[static_cast<std::size_t>(cell)] = best;
    rec.winner[static_cast<std::size_t>(cell)] = win;
    rec.tie[static_cast<std::size_t>(cell)] = tie ? 1 : 0;
    cell++;
  } while (walk.advance(off, sv));
  return {out, rec};
}

PPot restrict_potential(const PPot& p, const std::vector<std::pair<VarId, int>>& ev,
                        const DomainInfo& info, OpCounter& ctr) {
  (void)ctr;  // slicing is free
  std::vector<std::pair<VarId, int>> hits;
  for (const auto& [v, s] : ev)
    if (p->has_var(v)) hits.emplace_back(v, s);
  if (hits.empty()) return p;
  if (p->is_utility() && !p->divisors.empty())
    throw PotentialError("restrict on a utility with pending divisors");

  std::vector<VarId> rest;
  bool head_hit = false;
  for (VarId v : p->dom) {
    bool inst = std::any_of(hits.begin(), hits.end(), [&](auto& h) { return h.first == v; });
    if (!inst)
      rest.push_back(v);
    else if (p->head_var(v))
      head_hit = true;
  }

  auto out = std::make_shared<Potential>();
  out->kind = p->kind;
  out->dom = rest;
  if (p->is_probability()) {
    for (VarId v : p->head)
      if (std::binary_search(rest.begin(), rest.end(), v)) out->head.push_back(v);
    out->cpt_derived = p->cpt_derived && !head_hit;
    if (p->unity) {  // tail-only instantiation preserves unity
      out->unity = true;
      out->cpt_derived = p->cpt_derived;
      return out;
    }
  } else {
    out->cpt_derived = false;
  }

  std::int64_t base = 0;
  std::vector<std::int64_t> strides = self_strides(p->dom, info);
  for (const auto& [v, s] : hits) {
    auto it = std::lower_bound(p->dom.begin(), p->dom.end(), v);
    base += s * strides[static_cast<std::size_t>(it - p->dom.begin())];
  }
  out->table.resize(static_cast<std::size_t>(table_size(rest, info)));

  std::vector<std::int64_t> rest_strides = project_strides(rest, p->dom, info);
  CellWalker walk(info, rest);
  std::vector<std::int64_t> off{base};
  std::vector<std::vector<std::int64_t>> sv{rest_strides};
  std::int64_t cell = 0;
  do {
    out->table[static_cast<std::size_t>(cell++)] = p->table[static_cast<std::size_t>(off[0])];
  } while (walk.advance(off, sv));
  return out;
}

}  // namespace idsolve
