#pragma once

#include <map>
#include <string>
#include <vector>

#include "hspsim/group.hpp"

namespace hspsim {

// Exact count of oracle invocations, partitioned by algorithm phase.
struct QueryLedger {
  long long total = 0;
  std::map<std::string, long long> phases;

  void charge(const std::string& phase, long long n = 1) {
    phases[phase] += n;
    total += n;
  }
};

// Black-box strictly H-periodic labeling with query accounting.  The label of
// coset gH is the index of its minimal element among the sorted coset minima,
// so f(1_G) = 0 always.  Downstream distributions are provably independent of
// the labeling; the dense-simulator relabeling test exercises that.
//
// The ledger is the only mutable state; confine each oracle to one task so
// recorded totals stay exact.
class HiddenOracle {
 public:
  HiddenOracle(const FiniteGroup& G, Subgroup H);

  // The oracle proper: returns f(g) and charges one query.
  int query(int g, const std::string& phase = "query");

  // Bulk accounting for simulated circuit phases (state preparation charges s
  // queries, its inverse another s during amplitude amplification).
  void charge(const std::string& phase, long long n) { ledger_.charge(phase, n); }

  // Uncharged access for classical preprocessing and tests.
  int peek_label(int g) const;
  const std::vector<int>& labels() const { return labels_; }
  int label_count() const { return label_count_; }

  const Subgroup& hidden() const { return hidden_; }
  const FiniteGroup& group() const { return group_; }
  const QueryLedger& ledger() const { return ledger_; }

 private:
  FiniteGroup group_;
  Subgroup hidden_;
  std::vector<int> labels_;
  int label_count_ = 0;
  QueryLedger ledger_;
};

HiddenOracle make_hidden_oracle(const FiniteGroup& G, const Subgroup& H);

// Returns X n H by comparing f(x) against f(1_G); charges exactly |X|+1
// queries to phase "sanitize".
std::vector<int> sanitize_output(HiddenOracle& oracle, const std::vector<int>& X);

}  // namespace hspsim
