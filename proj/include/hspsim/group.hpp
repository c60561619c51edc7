#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hspsim/rational.hpp"

namespace hspsim {

// Finite group given by its full multiplication table.  Element ids are
// 0..N-1 and the identity is always id 0.
class FiniteGroup {
 public:
  // Validates the table exhaustively: identity, inverses, associativity,
  // Latin-square rows/columns.  Throws UsageError naming the failing triple.
  explicit FiniteGroup(std::vector<std::vector<int>> table,
                       std::vector<std::string> names = {});

  int order() const { return n_; }
  int identity() const { return 0; }
  int mul(int a, int b) const { return table_[static_cast<size_t>(a) * n_ + b]; }
  int inv(int a) const { return inverse_[a]; }
  const std::string& name(int a) const { return names_[a]; }

  bool operator==(const FiniteGroup& other) const {
    return n_ == other.n_ && table_ == other.table_;
  }

 private:
  int n_ = 0;
  std::vector<int> table_;    // row-major N*N
  std::vector<int> inverse_;  // N
  std::vector<std::string> names_;
};

// Grammar: "Z:<n>" cyclic, "Z2^<k>" elementary abelian, "D:<n>" dihedral of
// order 2n, "S:<n>" symmetric (n <= 4), "Q8", or an inline JSON document
// {"order": N, "table": [[...]]}.
FiniteGroup build_group(const std::string& spec);

struct Subgroup {
  std::vector<int> members;  // sorted, contains 0
  int parent_order = 0;

  int order() const { return static_cast<int>(members.size()); }
  bool contains(int g) const;
  bool is_subset_of(const Subgroup& other) const;
  bool operator==(const Subgroup& other) const {
    return parent_order == other.parent_order && members == other.members;
  }
};

// Closure of a seed set under product and inverse.
std::vector<int> closure(const FiniteGroup& G, const std::vector<int>& seed);

bool is_closed_subgroup(const FiniteGroup& G, const std::vector<int>& sorted_members);

// Validates membership list (sorted, identity, closure) and wraps it.
Subgroup make_subgroup(const FiniteGroup& G, std::vector<int> members);

Subgroup trivial_subgroup(const FiniteGroup& G);
Subgroup whole_group(const FiniteGroup& G);

// All r subgroups, ordered size-descending with lexicographic member-list
// tie-break, plus a fixed left transversal each.  K_1 = G, K_r = {1_G}.
struct SubgroupCatalog {
  FiniteGroup group;
  std::vector<Subgroup> subgroups;
  std::vector<std::vector<int>> transversals;

  int size() const { return static_cast<int>(subgroups.size()); }
  // 0-based position, or -1 when absent.
  int index_of(const Subgroup& K) const;
};

SubgroupCatalog enumerate_subgroups(const FiniteGroup& G, int order_cap = 64);

// Minimal element id of each left coset, ascending.
std::vector<int> left_transversal(const FiniteGroup& G, const Subgroup& K);

// A valid transversal with per-coset representatives picked by a seeded RNG.
std::vector<int> random_left_transversal(const FiniteGroup& G, const Subgroup& K,
                                         std::uint64_t seed);

bool is_left_transversal(const FiniteGroup& G, const Subgroup& K,
                         const std::vector<int>& T);

// |K n H| / |K| as an exact rational.
Rational coset_overlap(const Subgroup& K, const Subgroup& H);

// Greedy generating set; every added generator at least doubles the closure,
// so the result has at most ceil(log2 |K|) elements.  Trivial subgroup -> {}.
std::vector<int> generating_set(const FiniteGroup& G, const Subgroup& K);

bool is_cyclic(const FiniteGroup& G, const Subgroup& K);

// The cyclic members of a catalog, order preserved (so still size-descending
// with the trivial subgroup last).
SubgroupCatalog cyclic_subcatalog(const SubgroupCatalog& catalog);

}  // namespace hspsim
