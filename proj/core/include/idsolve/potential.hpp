#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace idsolve {

using VarId = int;

// Cardinality lookup used by the table algebra. Kept abstract so potentials
// do not depend on the full diagram type.
struct DomainInfo {
  virtual ~DomainInfo() = default;
  virtual int card(VarId v) const = 0;
};

// Scalar arithmetic tally for one solve. One unit per scalar multiply, add,
// divide or pairwise max-comparison; structural copies and lookups are free.
struct OpCounter {
  long long mul = 0;
  long long add = 0;
  long long div = 0;
  long long max = 0;

  long long total() const { return mul + add + div + max; }
  OpCounter& operator+=(const OpCounter& o) {
    mul += o.mul;
    add += o.add;
    div += o.div;
    max += o.max;
    return *this;
  }
};

class PotentialError : public std::runtime_error {
 public:
  explicit PotentialError(const std::string& what) : std::runtime_error(what) {}
};

enum class PotKind { Probability, Utility };

struct Potential;
using PPot = std::shared_ptr<const Potential>;

// Discrete table over a sorted variable domain, row-major with the first
// (lowest-id) variable varying slowest. Probability potentials carry a
// head/tail split; `unity` marks a table that is identically 1 and is then
// never allocated. `cpt_derived` tracks whether the potential is a product /
// head-marginal of CPTs with no evidence entered on head variables; that
// pedigree is what licenses the structural unity rule.
struct Potential {
  PotKind kind = PotKind::Probability;
  std::vector<VarId> dom;   // sorted ascending
  std::vector<VarId> head;  // subset of dom, sorted; probability kind only
  std::vector<double> table;
  bool unity = false;
  bool cpt_derived = true;
  // Pending divisors (utility kind only): probability potentials whose
  // division into this table has been postponed.
  std::vector<PPot> divisors;

  bool is_probability() const { return kind == PotKind::Probability; }
  bool is_utility() const { return kind == PotKind::Utility; }
  bool scalar() const { return dom.empty(); }
  bool has_var(VarId v) const;
  bool head_var(VarId v) const;
};

// Construction helpers. Tables are given over `vars` in the listed order
// (first slowest) and are reindexed to the sorted canonical layout.
PPot make_probability(std::vector<VarId> vars, std::vector<VarId> head_vars,
                      std::vector<double> values, const DomainInfo& info);
PPot make_utility(std::vector<VarId> vars, std::vector<double> values,
                  const DomainInfo& info);
PPot make_unity(std::vector<VarId> vars);
PPot make_scalar_utility(double value);

std::int64_t table_size(const std::vector<VarId>& vars, const DomainInfo& info);
std::vector<VarId> dom_union(const std::vector<VarId>& a, const std::vector<VarId>& b);

// Winning alternatives recorded when a decision is maximized out.
struct ArgmaxRecord {
  VarId decision = -1;
  std::vector<VarId> dom;  // sorted; remaining variables after the max
  std::vector<int> winner;
  std::vector<std::uint8_t> tie;
  bool arbitrary = false;  // barren decision: no utility constrained the max
};

// --- potential algebra -----------------------------------------------------
//
// All operations are pure; `ctr` receives one unit per scalar operation
// actually evaluated. Unity operands short-circuit at zero cost.

PPot multiply(const PPot& a, const PPot& b, const DomainInfo& info, OpCounter& ctr);
PPot add(const PPot& a, const PPot& b, const DomainInfo& info, OpCounter& ctr);

// Cell-wise quotient with 0/0 -> 0; nonzero/0 raises. One division per
// evaluated result cell; division by unity is free.
PPot divide(const PPot& num, const PPot& den, const DomainInfo& info, OpCounter& ctr);

// Sums x out of p. When `structural` is set and p is a CPT-derived
// probability potential whose head is exactly {x}, the result is flagged
// unity and no table is allocated.
PPot sum_out(const PPot& p, VarId x, const DomainInfo& info, OpCounter& ctr,
             bool structural = true);

// Maximizes d out of p, recording winners. Ties break toward the lowest
// state index and are flagged.
std::pair<PPot, ArgmaxRecord> max_out(const PPot& p, VarId d, const DomainInfo& info,
                                      OpCounter& ctr);

// Instantiates evidence variables by slicing; zero arithmetic. Slicing a head
// variable of a probability potential clears the cpt_derived pedigree.
PPot restrict_potential(const PPot& p, const std::vector<std::pair<VarId, int>>& ev,
                        const DomainInfo& info, OpCounter& ctr);

}  // namespace idsolve
