#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "hspsim/group.hpp"
#include "hspsim/oracle.hpp"
#include "hspsim/rational.hpp"

namespace hspsim {

using CatalogRef = std::shared_ptr<const SubgroupCatalog>;

// One counter-tagged tensor-power term of the global state:
//   c * |nu>|ell> (x) phi^{(x)s}   (up to the global |H|^(-s/2) factor).
// phi is a length-N rational vector over the group-element basis, kept in
// canonical scale: its first nonzero coordinate is 1, with the extracted
// scale's s-th power folded into the coefficient.
struct Branch {
  int nu = 0;
  int ell = 0;
  Rational coeff;
  std::vector<Rational> phi;
};

// The full state as a branch list.  The test operators map tensor-power
// branches to tensor-power branches (project / keep / subtract), so this
// form is closed under the whole cascade.  Probabilities only ever need
// <phi,psi>^s, which keeps everything rational.
struct BranchState {
  int s = 0;
  int hidden_order = 1;
  CatalogRef candidates;
  std::vector<Branch> branches;  // merged: unique (nu, ell, phi) keys
};

struct OutcomeDistribution {
  std::map<int, Rational> prob;  // nu -> probability, nonzero entries only
  CatalogRef candidates;
};

// The conditioned-and-translated reduction of the (2+2s)-register initial
// state: a single branch (nu=0, ell=0, c=1, phi = indicator of H).  Charges
// exactly s queries to the ledger phase "prepare".  Exactness of the
// reduction is asserted against dense_reference_distribution.
BranchState prepare_initial(const FiniteGroup& G, HiddenOracle& oracle, int s,
                            CatalogRef candidates);

// Single-couplet coset projector, built from the transversal:
// (Pi_K phi)(tk) = (1/|K|) sum_{k' in K} phi(t k').  Idempotent.
std::vector<Rational> projector_apply(const FiniteGroup& G, const Subgroup& K,
                                      const std::vector<int>& transversal,
                                      const std::vector<Rational>& phi);

// One Test_mu (mu is 1-based): each branch splits into fire / keep / subtract,
// with the counter operator mapping (0,0) -> (mu,1) and (nu,ell) -> (nu,ell+1)
// for ell > 0.  Branches are canonicalized, merged, and pruned; the global
// norm is preserved exactly.
BranchState apply_test(const BranchState& state, int mu);

// Test_r ... Test_1 in candidate order.  Validates the size-descending
// ordering; uses no oracle queries.
BranchState run_cascade(BranchState state);

// Prob[nu] = |H|^(-s) sum_ell sum_{b,b' in block (nu,ell)} c_b c_b' <phi_b,phi_b'>^s.
OutcomeDistribution first_register_distribution(const BranchState& state);

// Exact inner product <a,b> of two states over the same group/couplet count.
Rational state_inner(const BranchState& a, const BranchState& b);
Rational squared_norm(const BranchState& state);
Rational squared_distance(const BranchState& a, const BranchState& b);

// Deterministic exact sampling: a GMP Mersenne-Twister draw over the common
// denominator of the probabilities.
int sample_outcome(const OutcomeDistribution& dist, std::uint64_t seed);

// count draws from one seeded stream (the statistically sound way to collect
// frequencies; independently seeded single draws correlate).
std::vector<int> sample_outcomes(const OutcomeDistribution& dist, std::uint64_t seed, int count);

}  // namespace hspsim
