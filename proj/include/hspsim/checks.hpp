#pragma once

#include <string>
#include <vector>

#include "hspsim/dense.hpp"
#include "hspsim/engine.hpp"

namespace hspsim {

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string detail;  // counterexample on failure, brief stats otherwise
};

struct VerifyOptions {
  std::vector<int> lemma_s = {2, 4, 6};
  std::vector<int> theorem2_s = {8, 12, 16};
  int dense_s_max = 8;
  long long dense_cap = 0;  // 0 = default_dense_cap()
  std::uint64_t seed = 1;
  EngineOptions engine;
  bool include_dense = true;
};

// The groups every full verification sweep covers.
std::vector<std::string> builtin_catalog_specs();

// Structural checks: axioms, catalog completeness spot-check, ordering,
// transversal bijections.
CheckResult check_group_structure(const CatalogRef& catalog, std::uint64_t seed);
CheckResult check_generating_sets(const CatalogRef& catalog);
// Strict periodicity of every oracle plus sanitize accounting.
CheckResult check_oracle_model(const CatalogRef& catalog);
// Norm preservation after every test of every cascade.
CheckResult check_unitarity(const CatalogRef& catalog, int s);
// Test_mu fires deterministically when H = K_mu.
CheckResult check_lemma1(const CatalogRef& catalog, int s);
// Test_mu fires with probability 1 iff K_mu is contained in H; before H's own
// test no candidate fires deterministically.
CheckResult check_periodicity_law(const CatalogRef& catalog, int s);
// ||Test_mu Psi - Psi||^2 = 2 overlap^s <= 4/2^s when K_mu is not contained in H.
CheckResult check_lemma2(const CatalogRef& catalog, const std::vector<int>& s_values);
// Prefix drift bound ||Psi_j - Psi||^2 <= (2j)^2/2^s before H's own test.
CheckResult check_lemma3(const CatalogRef& catalog, const std::vector<int>& s_values);
// Prob[H|H] >= 1 - 4r/2^(s/2), exact (floor(s/2) when s is odd).
CheckResult check_theorem2(const CatalogRef& catalog, const std::vector<int>& s_values);
// M M^-1 = I, Delta entry bounds, and for every reachable binary-search
// partition: x in [0,1]^r, Mx = y, and sum_mu x_mu M[nu][mu] = y_nu.
CheckResult check_plan_exactness(const CatalogRef& catalog, const EngineOptions& opts);
// Amplification fixed points and float agreement with sin^2(3 arcsin sqrt p).
CheckResult check_amplification();
// identify_subgroup returns exactly H for every H, with the exact ledger law.
CheckResult check_identify(const CatalogRef& catalog, const EngineOptions& opts);
CheckResult check_decide_trivial(const CatalogRef& catalog, const EngineOptions& opts);
// Trivial/cyclic guarantees asserted; non-cyclic error rates reported only.
CheckResult check_one_sided(const CatalogRef& catalog, const EngineOptions& opts,
                            int sample_seeds);
// Branch representation vs dense reference, canonical + randomized
// transversals + relabeled oracle, on every instance within the cap.
CheckResult check_dense_equivalence(const CatalogRef& catalog, int s_max, long long cap,
                                    std::uint64_t seed);
// Seeded empirical frequencies within 3 binomial standard deviations.
CheckResult check_sampling(const OutcomeDistribution& dist, int samples, std::uint64_t seed);

// The full named suite for one group.
std::vector<CheckResult> verify_group(const FiniteGroup& G, const VerifyOptions& opts);

}  // namespace hspsim
