#include "hspsim/oracle.hpp"

#include <algorithm>

#include "hspsim/errors.hpp"

namespace hspsim {

HiddenOracle::HiddenOracle(const FiniteGroup& G, Subgroup H) : group_(G), hidden_(std::move(H)) {
  if (hidden_.parent_order != G.order() || !is_closed_subgroup(G, hidden_.members))
    throw UsageError("hidden oracle: H is not a subgroup of G");
  labels_.assign(G.order(), -1);
  // Ascending scan visits cosets in order of their minimal element, which is
  // exactly the canonical label order.
  for (int g = 0; g < G.order(); ++g) {
    if (labels_[g] >= 0) continue;
    for (int h : hidden_.members) labels_[G.mul(g, h)] = label_count_;
    ++label_count_;
  }
}

int HiddenOracle::query(int g, const std::string& phase) {
  if (g < 0 || g >= group_.order())
    throw UsageError("oracle query: element id out of range: " + std::to_string(g));
  ledger_.charge(phase, 1);
  return labels_[g];
}

int HiddenOracle::peek_label(int g) const {
  if (g < 0 || g >= group_.order())
    throw UsageError("oracle label: element id out of range: " + std::to_string(g));
  return labels_[g];
}

HiddenOracle make_hidden_oracle(const FiniteGroup& G, const Subgroup& H) {
  return HiddenOracle(G, H);
}

std::vector<int> sanitize_output(HiddenOracle& oracle, const std::vector<int>& X) {
  const int reference = oracle.query(oracle.group().identity(), "sanitize");
  std::vector<int> kept;
  for (int x : X)
    if (oracle.query(x, "sanitize") == reference) kept.push_back(x);
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace hspsim
