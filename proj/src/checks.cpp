#include "hspsim/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "hspsim/errors.hpp"

namespace hspsim {

namespace {

std::string subgroup_str(const Subgroup& K) {
  std::string out = "{";
  for (size_t i = 0; i < K.members.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(K.members[i]);
  }
  return out + "}";
}

CheckResult fail(std::string name, std::string detail) {
  return CheckResult{std::move(name), false, std::move(detail)};
}

CheckResult pass(std::string name, std::string detail = "") {
  return CheckResult{std::move(name), true, std::move(detail)};
}

Rational rational_pow2_inverse(int k) { return Rational(1) / Rational(pow2(k)); }

}  // namespace

std::vector<std::string> builtin_catalog_specs() {
  return {"Z:2", "Z:3", "Z:4", "Z:5", "Z:6", "Z:7", "Z:8",
          "Z2^2", "Z2^3", "S:3", "D:4", "Q8"};
}

CheckResult check_group_structure(const CatalogRef& catalog, std::uint64_t seed) {
  const std::string name = "group-structure";
  const auto& G = catalog->group;
  const int r = catalog->size();
  if (catalog->subgroups.front().order() != G.order())
    return fail(name, "first candidate is not the whole group");
  if (catalog->subgroups.back().order() != 1)
    return fail(name, "last candidate is not the trivial subgroup");
  for (int i = 0; i + 1 < r; ++i) {
    const auto& a = catalog->subgroups[i];
    const auto& b = catalog->subgroups[i + 1];
    if (a.order() < b.order() || (a.order() == b.order() && !(a.members < b.members)))
      return fail(name, "catalog ordering violated at position " + std::to_string(i));
  }
  for (int i = 0; i < r; ++i) {
    const auto& K = catalog->subgroups[i];
    if (!is_closed_subgroup(G, K.members))
      return fail(name, "catalog entry is not a subgroup: " + subgroup_str(K));
    if (G.order() % K.order() != 0)
      return fail(name, "Lagrange violated by " + subgroup_str(K));
    if (!is_left_transversal(G, K, catalog->transversals[i]))
      return fail(name, "stored transversal invalid for " + subgroup_str(K));
  }
  // Completeness spot-check: closures of random pairs must already be listed.
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, G.order() - 1);
  for (int trial = 0; trial < 32; ++trial) {
    const auto sub = make_subgroup(G, closure(G, {pick(rng), pick(rng)}));
    if (catalog->index_of(sub) < 0)
      return fail(name, "catalog is missing " + subgroup_str(sub));
  }
  return pass(name, std::to_string(r) + " subgroups");
}

CheckResult check_generating_sets(const CatalogRef& catalog) {
  const std::string name = "generating-sets";
  const auto& G = catalog->group;
  for (const auto& K : catalog->subgroups) {
    const auto gens = generating_set(G, K);
    if (K.order() == 1 && !gens.empty()) return fail(name, "trivial subgroup got generators");
    const auto closed = closure(G, gens);
    if (closed != K.members)
      return fail(name, "closure of generators differs for " + subgroup_str(K));
    const int bound = K.order() == 1 ? 0 : ceil_log2(BigInt(K.order()));
    if (static_cast<int>(gens.size()) > bound)
      return fail(name, "generating set too large for " + subgroup_str(K));
  }
  return pass(name);
}

CheckResult check_oracle_model(const CatalogRef& catalog) {
  const std::string name = "oracle-model";
  const auto& G = catalog->group;
  for (const auto& H : catalog->subgroups) {
    HiddenOracle oracle(G, H);
    // Strictness: same label iff same left coset.
    for (int g = 0; g < G.order(); ++g)
      for (int h = 0; h < G.order(); ++h) {
        const bool same_coset = [&] {
          // g,h in the same left coset of H iff g^-1 h in H.
          return H.contains(G.mul(G.inv(g), h));
        }();
        if ((oracle.peek_label(g) == oracle.peek_label(h)) != same_coset)
          return fail(name, "labeling not strictly periodic for H=" + subgroup_str(H));
      }
    if (oracle.peek_label(G.identity()) != 0)
      return fail(name, "f(1_G) is not the label of H itself");
    // Sanitize accounting: X n H with exactly |X|+1 queries.
    std::vector<int> X;
    for (int g = 0; g < G.order(); g += 2) X.push_back(g);
    const long long before = oracle.ledger().total;
    const auto kept = sanitize_output(oracle, X);
    if (oracle.ledger().total - before != static_cast<long long>(X.size()) + 1)
      return fail(name, "sanitize_output charged the wrong number of queries");
    for (int x : X) {
      const bool in_h = H.contains(x);
      const bool in_kept = std::binary_search(kept.begin(), kept.end(), x);
      if (in_h != in_kept) return fail(name, "sanitize_output returned the wrong set");
    }
  }
  return pass(name);
}

CheckResult check_unitarity(const CatalogRef& catalog, int s) {
  const std::string name = "unitarity";
  const auto& G = catalog->group;
  for (const auto& H : catalog->subgroups) {
    HiddenOracle oracle(G, H);
    BranchState state = prepare_initial(G, oracle, s, catalog);
    if (squared_norm(state) != 1)
      return fail(name, "initial norm differs from 1 for H=" + subgroup_str(H));
    for (int mu = 1; mu <= catalog->size(); ++mu) {
      state = apply_test(state, mu);
      if (squared_norm(state) != 1)
        return fail(name, "norm broken after Test_" + std::to_string(mu) +
                              " with H=" + subgroup_str(H));
    }
  }
  return pass(name, "s=" + std::to_string(s));
}

CheckResult check_lemma1(const CatalogRef& catalog, int s) {
  const std::string name = "lemma1-exact-fire";
  const auto& G = catalog->group;
  for (int mu = 1; mu <= catalog->size(); ++mu) {
    HiddenOracle oracle(G, catalog->subgroups[mu - 1]);
    BranchState state = apply_test(prepare_initial(G, oracle, s, catalog), mu);
    const OutcomeDistribution dist = first_register_distribution(state);
    if (dist.prob.size() != 1 || !dist.prob.count(mu) || dist.prob.at(mu) != 1)
      return fail(name, "Test_" + std::to_string(mu) + " did not fire deterministically");
  }
  return pass(name, std::to_string(catalog->size()) + " subgroups, s=" + std::to_string(s));
}

CheckResult check_periodicity_law(const CatalogRef& catalog, int s) {
  const std::string name = "periodicity-law";
  const auto& G = catalog->group;
  for (const auto& H : catalog->subgroups) {
    const int hidden_pos = catalog->index_of(H);
    for (int mu = 1; mu <= catalog->size(); ++mu) {
      const auto& K = catalog->subgroups[mu - 1];
      HiddenOracle oracle(G, H);
      const BranchState state = apply_test(prepare_initial(G, oracle, s, catalog), mu);
      const OutcomeDistribution dist = first_register_distribution(state);
      const bool fired_surely = dist.prob.count(mu) && dist.prob.at(mu) == 1;
      if (fired_surely != K.is_subset_of(H))
        return fail(name, "Test fired deterministically iff-violation for K=" +
                              subgroup_str(K) + " H=" + subgroup_str(H));
      // Size-descending order: no candidate before H's own test may contain H,
      // so none of them can fire with certainty.
      if (mu - 1 < hidden_pos && fired_surely)
        return fail(name, "a test before H's own fired deterministically, H=" +
                              subgroup_str(H));
    }
  }
  return pass(name, "s=" + std::to_string(s));
}

CheckResult check_lemma2(const CatalogRef& catalog, const std::vector<int>& s_values) {
  const std::string name = "lemma2-distance";
  const auto& G = catalog->group;
  int checked = 0;
  for (int s : s_values) {
    for (int mu = 1; mu <= catalog->size(); ++mu) {
      const auto& K = catalog->subgroups[mu - 1];
      for (const auto& H : catalog->subgroups) {
        if (K.is_subset_of(H)) continue;  // f would be K-periodic
        HiddenOracle oracle(G, H);
        const BranchState initial = prepare_initial(G, oracle, s, catalog);
        const BranchState tested = apply_test(initial, mu);
        const Rational d2 = squared_distance(tested, initial);
        const Rational expected = 2 * rat_pow(coset_overlap(K, H), static_cast<unsigned long>(s));
        if (d2 != expected)
          return fail(name, "distance mismatch for K=" + subgroup_str(K) +
                                " H=" + subgroup_str(H) + " s=" + std::to_string(s) + ": got " +
                                rat_str(d2) + ", expected " + rat_str(expected));
        if (d2 > 4 * rational_pow2_inverse(s))
          return fail(name, "distance above 4/2^s for K=" + subgroup_str(K) +
                                " H=" + subgroup_str(H));
        ++checked;
      }
    }
  }
  return pass(name, std::to_string(checked) + " (K,H,s) triples");
}

CheckResult check_lemma3(const CatalogRef& catalog, const std::vector<int>& s_values) {
  const std::string name = "lemma3-prefix-drift";
  const auto& G = catalog->group;
  int checked = 0;
  for (int s : s_values) {
    for (const auto& H : catalog->subgroups) {
      const int hidden_pos = catalog->index_of(H);  // tests 1..hidden_pos precede H's own
      if (hidden_pos == 0) continue;
      HiddenOracle oracle(G, H);
      const BranchState initial = prepare_initial(G, oracle, s, catalog);
      BranchState state = initial;
      for (int j = 1; j <= hidden_pos; ++j) {
        state = apply_test(state, j);
        const Rational d2 = squared_distance(state, initial);
        const Rational bound = Rational(4L * j * j) / Rational(pow2(s));
        if (d2 > bound)
          return fail(name, "drift " + rat_str(d2) + " above (2j)^2/2^s at j=" +
                                std::to_string(j) + " H=" + subgroup_str(H) +
                                " s=" + std::to_string(s));
        ++checked;
      }
    }
  }
  return pass(name, std::to_string(checked) + " prefixes");
}

CheckResult check_theorem2(const CatalogRef& catalog, const std::vector<int>& s_values) {
  const std::string name = "theorem2-success-bound";
  const auto& G = catalog->group;
  const int r = catalog->size();
  for (int s : s_values) {
    for (const auto& H : catalog->subgroups) {
      HiddenOracle oracle(G, H);
      const OutcomeDistribution dist =
          first_register_distribution(run_cascade(prepare_initial(G, oracle, s, catalog)));
      const int mu = catalog->index_of(H) + 1;
      const Rational p = dist.prob.count(mu) ? dist.prob.at(mu) : Rational(0);
      // 2^(s/2) >= 2^floor(s/2) keeps the bound rational for odd s.
      const Rational bound = 1 - Rational(4L * r) * rational_pow2_inverse(s / 2);
      if (p < bound)
        return fail(name, "Prob[H|H]=" + rat_str(p) + " below bound " + rat_str(bound) +
                              " for H=" + subgroup_str(H) + " s=" + std::to_string(s));
    }
  }
  return pass(name, std::to_string(r) + " rows x " + std::to_string(s_values.size()) +
                        " s values");
}

CheckResult check_plan_exactness(const CatalogRef& catalog, const EngineOptions& opts) {
  const std::string name = "plan-exactness";
  const int r = catalog->size();
  if (r < 2) return pass(name, "degenerate catalog");
  const SearchPlan plan = build_search_plan(catalog, opts);
  const auto& M = plan.matrix.rows;

  for (int i = 0; i < r; ++i) {
    Rational sum(0);
    for (int j = 0; j < r; ++j) {
      if (sgn(M[i][j]) < 0 || M[i][j] > 1)
        return fail(name, "M entry outside [0,1] at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      sum += M[i][j];
    }
    if (sum != 1) return fail(name, "row " + std::to_string(i) + " sums to " + rat_str(sum));
  }
  if (M[0][0] != 1) return fail(name, "whole-group row is not (1,0,...,0)");

  // M * M^-1 = I exactly.
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      Rational acc(0);
      for (int k = 0; k < r; ++k) acc += M[i][k] * plan.inverse[k][j];
      if (acc != Rational(i == j ? 1 : 0))
        return fail(name, "M*M^-1 differs from I at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
    }

  // Delta = I - M entry bounds, valid at the non-escalated choose_s_exact.
  if (plan.s == choose_s_exact(r)) {
    const Rational limit = rat(1, static_cast<long>(r) * r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        const Rational delta = Rational(i == j ? 1 : 0) - M[i][j];
        if (abs(delta) > limit)
          return fail(name, "Delta entry above 1/r^2 at (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
      }
  }

  for (const auto& [range, node] : plan.range_plans) {
    for (int i = 0; i < r; ++i) {
      if (sgn(node.x[i]) < 0 || node.x[i] > 1)
        return fail(name, "x outside [0,1] for range [" + std::to_string(range.first) + "," +
                              std::to_string(range.second) + ")");
      const Rational probe = exact_test_probability(plan.matrix, node.x, i);
      if (probe != node.y[i])
        return fail(name, "ExactTest probability differs from y at row " + std::to_string(i));
    }
  }
  return pass(name, std::to_string(plan.range_plans.size()) + " partitions, s=" +
                        std::to_string(plan.s));
}

CheckResult check_amplification() {
  const std::string name = "amplification";
  if (amplify_once(rat(1, 4)) != 1) return fail(name, "1/4 did not amplify to 1");
  if (amplify_once(rat(3, 4)) != 0) return fail(name, "3/4 did not amplify to 0");
  if (amplify_once(Rational(0)) != 0 || amplify_once(Rational(1)) != 1)
    return fail(name, "fixed points broken");
  for (const auto& p : {Rational(0), rat(1, 4), rat(1, 2), rat(3, 4), Rational(1)}) {
    const double pd = p.get_d();
    const double trig = std::pow(std::sin(3.0 * std::asin(std::sqrt(pd))), 2.0);
    const double poly = amplify_once(p).get_d();
    if (std::abs(trig - poly) > 1e-12)
      return fail(name, "trig identity drift " + std::to_string(std::abs(trig - poly)) +
                            " at p=" + rat_str(p));
  }
  return pass(name);
}

CheckResult check_identify(const CatalogRef& catalog, const EngineOptions& opts) {
  const std::string name = "identify-exact";
  const auto& G = catalog->group;
  const int r = catalog->size();
  const SearchPlan plan = build_search_plan(catalog, opts);
  const int rounds_expected = r == 1 ? 0 : ceil_log2(BigInt(r));
  for (const auto& H : catalog->subgroups) {
    HiddenOracle oracle(G, H);
    const IdentifyResult res = identify_subgroup(plan, oracle);
    if (!(res.subgroup == H))
      return fail(name, "identified " + subgroup_str(res.subgroup) + " instead of " +
                            subgroup_str(H));
    if (closure(G, res.generators) != H.members)
      return fail(name, "generators do not generate H=" + subgroup_str(H));
    if (res.rounds != rounds_expected)
      return fail(name, "used " + std::to_string(res.rounds) + " rounds for H=" +
                            subgroup_str(H) + ", expected " + std::to_string(rounds_expected));
    const long long expected_total =
        r == 1 ? 0
               : 3LL * plan.s * rounds_expected +
                     static_cast<long long>(res.generators.size()) + 1;
    if (oracle.ledger().total != expected_total)
      return fail(name, "ledger total " + std::to_string(oracle.ledger().total) +
                            " differs from law value " + std::to_string(expected_total) +
                            " for H=" + subgroup_str(H));
  }
  return pass(name, std::to_string(r) + " subgroups, s=" + std::to_string(plan.s));
}

CheckResult check_decide_trivial(const CatalogRef& catalog, const EngineOptions& opts) {
  const std::string name = "decide-trivial";
  const auto& G = catalog->group;
  if (catalog->size() < 2) return pass(name, "degenerate catalog");
  const DecisionPlan plan = build_decide_plan(catalog, opts);
  for (const auto& H : catalog->subgroups) {
    HiddenOracle oracle(G, H);
    const DecisionResult res = decide_trivial(plan, oracle);
    if (res.nontrivial != (H.order() > 1))
      return fail(name, "wrong answer for H=" + subgroup_str(H));
    if (!res.deterministic) return fail(name, "decision unexpectedly probabilistic");
    if (oracle.ledger().total != 3LL * plan.s)
      return fail(name, "ledger total differs from 3s for H=" + subgroup_str(H));
  }
  return pass(name, "s=" + std::to_string(plan.s));
}

CheckResult check_one_sided(const CatalogRef& catalog, const EngineOptions& opts,
                            int sample_seeds) {
  const std::string name = "one-sided-trivial";
  const auto& G = catalog->group;
  if (catalog->size() < 2) return pass(name, "degenerate catalog");
  const DecisionPlan plan = build_one_sided_plan(*catalog, opts);
  std::ostringstream report;
  for (const auto& H : catalog->subgroups) {
    const bool cyclic = is_cyclic(G, H);
    if (cyclic) {
      for (int seed = 0; seed < sample_seeds; ++seed) {
        HiddenOracle oracle(G, H);
        const DecisionResult res = one_sided_trivial(plan, oracle, seed);
        if (!res.deterministic)
          return fail(name, "cyclic H=" + subgroup_str(H) + " was not deterministic");
        if (res.nontrivial != (H.order() > 1))
          return fail(name, "wrong answer for cyclic H=" + subgroup_str(H));
        if (oracle.ledger().total != 3LL * plan.s)
          return fail(name, "ledger total differs from 3s for H=" + subgroup_str(H));
      }
    } else {
      // One-sided regime: the failure probability is this exact rational;
      // report it, never assert it.
      HiddenOracle oracle(G, H);
      const DecisionResult res = one_sided_trivial(plan, oracle, 0);
      int wrong = 0;
      for (int seed = 0; seed < sample_seeds; ++seed) {
        HiddenOracle o2(G, H);
        if (!one_sided_trivial(plan, o2, seed).nontrivial) ++wrong;
      }
      report << " " << subgroup_str(H) << ": error prob " << rat_str(res.amplified) << ", "
             << wrong << "/" << sample_seeds << " sampled errors;";
    }
  }
  const std::string tail = report.str();
  return pass(name, tail.empty() ? "all candidates cyclic" : "non-cyclic:" + tail);
}

CheckResult check_dense_equivalence(const CatalogRef& catalog, int s_max, long long cap,
                                    std::uint64_t seed) {
  const std::string name = "dense-equivalence";
  const auto& G = catalog->group;
  const int r = catalog->size();
  const long long effective_cap = cap > 0 ? cap : default_dense_cap();
  std::mt19937_64 rng(seed);
  int instances = 0;
  for (const auto& H : catalog->subgroups) {
    const int range = G.order() / H.order();
    for (int s = 1; s <= s_max; ++s) {
      BigInt need(static_cast<long>(r + 1));
      need *= (r + 1);
      for (int i = 0; i < s; ++i) need *= static_cast<long>(G.order()) * range;
      if (need > BigInt(std::to_string(effective_cap))) break;

      HiddenOracle oracle(G, H);
      const OutcomeDistribution branch =
          first_register_distribution(run_cascade(prepare_initial(G, oracle, s, catalog)));

      DenseOptions base;
      base.amplitude_cap = effective_cap;
      const OutcomeDistribution dense = dense_reference_distribution(G, H, s, catalog, base);
      if (dense.prob != branch.prob)
        return fail(name, "branch/dense mismatch for H=" + subgroup_str(H) +
                              " s=" + std::to_string(s));

      // Translation invariance: random transversals give the same distribution.
      DenseOptions shifted = base;
      for (int i = 0; i < r; ++i)
        shifted.transversals.push_back(
            random_left_transversal(G, catalog->subgroups[i], rng()));
      if (dense_reference_distribution(G, H, s, catalog, shifted).prob != branch.prob)
        return fail(name, "transversal choice changed the distribution for H=" +
                              subgroup_str(H) + " s=" + std::to_string(s));

      // Labeling independence: any strictly H-periodic relabeling agrees.
      DenseOptions relabeled = base;
      std::vector<int> perm(range);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      relabeled.labels.reserve(G.order());
      for (int g = 0; g < G.order(); ++g) relabeled.labels.push_back(perm[oracle.peek_label(g)]);
      if (dense_reference_distribution(G, H, s, catalog, relabeled).prob != branch.prob)
        return fail(name, "relabeling changed the distribution for H=" + subgroup_str(H) +
                              " s=" + std::to_string(s));
      ++instances;
    }
  }
  return pass(name, std::to_string(instances) + " instances x 3 variants");
}

CheckResult check_sampling(const OutcomeDistribution& dist, int samples, std::uint64_t seed) {
  const std::string name = "sampling";
  std::map<int, int> counts;
  for (int nu : sample_outcomes(dist, seed, samples)) ++counts[nu];
  for (const auto& [nu, count] : counts)
    if (!dist.prob.count(nu))
      return fail(name, "sampled an outcome with zero probability: " + std::to_string(nu));
  for (const auto& [nu, p] : dist.prob) {
    const double pd = p.get_d();
    const double sigma = std::sqrt(samples * pd * (1.0 - pd));
    const double drift = std::abs(counts[nu] - samples * pd);
    if (drift > 3.0 * sigma + 1.0)
      return fail(name, "outcome " + std::to_string(nu) + " drifted " + std::to_string(drift) +
                            " (3 sigma = " + std::to_string(3.0 * sigma) + ")");
  }
  return pass(name, std::to_string(samples) + " draws");
}

std::vector<CheckResult> verify_group(const FiniteGroup& G, const VerifyOptions& opts) {
  auto catalog = std::make_shared<const SubgroupCatalog>(enumerate_subgroups(G));
  std::vector<CheckResult> results;
  results.push_back(check_group_structure(catalog, opts.seed));
  results.push_back(check_generating_sets(catalog));
  results.push_back(check_oracle_model(catalog));
  results.push_back(check_unitarity(catalog, 2));
  results.push_back(check_lemma1(catalog, 2));
  results.push_back(check_periodicity_law(catalog, 2));
  results.push_back(check_lemma2(catalog, opts.lemma_s));
  results.push_back(check_lemma3(catalog, opts.lemma_s));
  results.push_back(check_theorem2(catalog, opts.theorem2_s));
  results.push_back(check_plan_exactness(catalog, opts.engine));
  results.push_back(check_amplification());
  results.push_back(check_identify(catalog, opts.engine));
  results.push_back(check_decide_trivial(catalog, opts.engine));
  results.push_back(check_one_sided(catalog, opts.engine, 4));
  if (opts.include_dense)
    results.push_back(
        check_dense_equivalence(catalog, opts.dense_s_max, opts.dense_cap, opts.seed));
  {
    HiddenOracle oracle(G, trivial_subgroup(G));
    const OutcomeDistribution dist =
        first_register_distribution(run_cascade(prepare_initial(G, oracle, 2, catalog)));
    results.push_back(check_sampling(dist, 10000, opts.seed));
  }
  return results;
}

}  // namespace hspsim
