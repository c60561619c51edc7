#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "hspsim/cascade.hpp"

namespace hspsim {

// Smallest even s with 4r/2^(s/2) <= eps, i.e. 2*ceil(log2(4r/eps)).
int choose_s_bounded(int r, const Rational& eps);

// ceil(2*log2(4r^3)); callers escalate (doubling) if the bias vector leaves
// [0,1].
int choose_s_exact(int r);

using RationalMatrix = std::vector<std::vector<Rational>>;

// Row = hidden subgroup H, column = cascade outcome K_mu, entries exact.
// Requires the candidate list to be size-descending with the trivial subgroup
// last, which makes every row sum to exactly 1.
struct ConditionalMatrix {
  CatalogRef candidates;
  int s = 0;
  RationalMatrix rows;

  int size() const { return static_cast<int>(rows.size()); }
};

// Classical preprocessing: simulates the cascade once per candidate hidden
// subgroup.  Charges no external ledger.
ConditionalMatrix build_conditional_matrix(const FiniteGroup& G, CatalogRef candidates, int s);

// Exact inverse by rational Gauss-Jordan elimination with partial pivoting on
// magnitude.  Throws EscalationNeeded when singular (s too small).
RationalMatrix invert_exact(const RationalMatrix& m);

struct ExactPlan {
  std::vector<Rational> y;  // entries in {1/4, 3/4}
  std::vector<Rational> x;  // M^-1 y, validated componentwise in [0,1]
  int s = 0;
  CatalogRef candidates;
};

// x = M^-1 y; throws EscalationNeeded when some x_mu leaves [0,1].
ExactPlan solve_bias_vector(const ConditionalMatrix& m, const std::vector<Rational>& y);
ExactPlan solve_bias_vector(const ConditionalMatrix& m, const RationalMatrix& m_inverse,
                            const std::vector<Rational>& y);

// sum_mu x_mu M[row][mu]: the exact probability that the ExactTest ancilla
// measures 1 when row's subgroup is hidden.  Equals y[row] by construction.
Rational exact_test_probability(const ConditionalMatrix& m, const std::vector<Rational>& x,
                                int row);

// One amplitude-amplification iteration: p -> p(3-4p)^2, the rational form of
// sin^2(3 arcsin sqrt(p)).  Sends 1/4 to 1 and 3/4 to 0.
Rational amplify_once(const Rational& p);

struct EngineOptions {
  int s_override = 0;  // 0 = choose_s_exact(r)
  int s_cap = 4096;    // escalation ceiling
};

struct RoundTranscript {
  int live_lo = 0;   // live candidate range [live_lo, live_hi) before the round
  int live_hi = 0;
  int split = 0;     // Y_3/4 = [live_lo, split), Y_1/4 = everything else
  std::vector<Rational> y;
  std::vector<Rational> x;
  Rational p;
  Rational amplified;
  int bit = 0;
  long long queries = 0;
};

// Classical preprocessing for the whole binary search: M, its inverse, and a
// validated plan for every live range the midpoint search can reach.  The
// escalation check runs here, before any oracle is touched, so the per-round
// query count of the search itself is fixed.
struct SearchPlan {
  CatalogRef candidates;
  int s = 0;
  ConditionalMatrix matrix;
  RationalMatrix inverse;
  std::map<std::pair<int, int>, ExactPlan> range_plans;
};

SearchPlan build_search_plan(CatalogRef candidates, const EngineOptions& opts = {});

struct IdentifyResult {
  Subgroup subgroup;
  std::vector<int> generators;  // sanitized generating set
  int rounds = 0;
  int s = 0;
  std::vector<RoundTranscript> transcript;
};

// Exact identification: one amplification round per binary-search split,
// 3s queries each (A, A^-1, A), then generating_set + sanitize_output.
// Total: 3s*ceil(log2 r) + |X| + 1.  Deterministic, zero failure probability.
IdentifyResult identify_subgroup(const SearchPlan& plan, HiddenOracle& oracle);
IdentifyResult identify_subgroup(const FiniteGroup& G, HiddenOracle& oracle,
                                 const EngineOptions& opts = {});

struct DecisionPlan {
  CatalogRef candidates;  // full catalog, or cyclic-only for the one-sided variant
  bool one_sided = false;
  int s = 0;
  ConditionalMatrix matrix;
  ExactPlan plan;
};

// Y_3/4 = {trivial subgroup}: one round decides non-triviality with certainty.
DecisionPlan build_decide_plan(CatalogRef catalog, const EngineOptions& opts = {});

// Cyclic candidates only, y = 1/4 on the trivial subgroup and 3/4 elsewhere;
// exact on trivial and cyclic hidden subgroups, one-sided otherwise.
DecisionPlan build_one_sided_plan(const SubgroupCatalog& full_catalog,
                                  const EngineOptions& opts = {});

struct DecisionResult {
  bool nontrivial = false;
  bool deterministic = true;  // false iff one-sided with a non-cyclic hidden subgroup
  int bit = 0;
  Rational p;
  Rational amplified;
  int s = 0;
};

DecisionResult decide_trivial(const DecisionPlan& plan, HiddenOracle& oracle);
DecisionResult decide_trivial(const FiniteGroup& G, HiddenOracle& oracle,
                              const EngineOptions& opts = {});
DecisionResult one_sided_trivial(const DecisionPlan& plan, HiddenOracle& oracle,
                                 std::uint64_t seed);
DecisionResult one_sided_trivial(const FiniteGroup& G, HiddenOracle& oracle, std::uint64_t seed,
                                 const EngineOptions& opts = {});

}  // namespace hspsim
