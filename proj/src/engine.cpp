#include "hspsim/engine.hpp"

#include <algorithm>
#include <set>

#include "hspsim/errors.hpp"

namespace hspsim {

int choose_s_bounded(int r, const Rational& eps) {
  if (r < 1) throw UsageError("choose_s_bounded: r must be positive");
  if (sgn(eps) <= 0 || eps >= 1) throw UsageError("choose_s_bounded: eps must be in (0,1)");
  const Rational q = rat(4L * r) / eps;
  BigInt bound;
  mpz_cdiv_q(bound.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return 2 * ceil_log2(bound);
}

int choose_s_exact(int r) {
  if (r < 1) throw UsageError("choose_s_exact: r must be positive");
  BigInt v(4L * r);
  v *= static_cast<long>(r);
  v *= static_cast<long>(r);  // 4 r^3
  v *= v;                     // (4 r^3)^2, so ceil(log2) of it is ceil(2 log2(4 r^3))
  return ceil_log2(v);
}

namespace {

void require_ordered_with_trivial_last(const SubgroupCatalog& catalog) {
  const int r = catalog.size();
  if (r == 0) throw UsageError("empty candidate list");
  for (int i = 0; i + 1 < r; ++i)
    if (catalog.subgroups[i].order() < catalog.subgroups[i + 1].order())
      throw UsageError("candidate list is not size-descending");
  if (catalog.subgroups[r - 1].order() != 1)
    throw UsageError("candidate list must end with the trivial subgroup");
}

}  // namespace

ConditionalMatrix build_conditional_matrix(const FiniteGroup& G, CatalogRef candidates, int s) {
  if (!candidates || !(candidates->group == G))
    throw UsageError("build_conditional_matrix: bad candidate list");
  require_ordered_with_trivial_last(*candidates);
  const int r = candidates->size();
  ConditionalMatrix m;
  m.candidates = candidates;
  m.s = s;
  m.rows.reserve(r);
  for (int row = 0; row < r; ++row) {
    // Internal oracle per row; its ledger is part of the classical
    // preprocessing and is discarded.
    HiddenOracle oracle(G, candidates->subgroups[row]);
    BranchState state = run_cascade(prepare_initial(G, oracle, s, candidates));
    OutcomeDistribution dist = first_register_distribution(state);
    if (dist.prob.count(0))
      throw InvariantError("cascade left mass on outcome 0 despite trivial-last candidates");
    std::vector<Rational> entries(r, Rational(0));
    for (const auto& [nu, p] : dist.prob) entries[nu - 1] = p;
    m.rows.push_back(std::move(entries));
  }
  return m;
}

RationalMatrix invert_exact(const RationalMatrix& m) {
  const int n = static_cast<int>(m.size());
  for (const auto& row : m)
    if (static_cast<int>(row.size()) != n) throw UsageError("invert_exact: matrix not square");
  RationalMatrix work = m;
  RationalMatrix inv(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i) inv[i][i] = 1;

  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    Rational best(0);
    for (int row = col; row < n; ++row) {
      const Rational mag = abs(work[row][col]);
      if (pivot < 0 || mag > best) {
        pivot = row;
        best = mag;
      }
    }
    if (sgn(best) == 0)
      throw EscalationNeeded("singular conditional matrix (s too small?) at column " +
                             std::to_string(col));
    std::swap(work[col], work[pivot]);
    std::swap(inv[col], inv[pivot]);
    const Rational scale = work[col][col];
    for (int j = 0; j < n; ++j) {
      work[col][j] /= scale;
      inv[col][j] /= scale;
    }
    for (int row = 0; row < n; ++row) {
      if (row == col || sgn(work[row][col]) == 0) continue;
      const Rational factor = work[row][col];
      for (int j = 0; j < n; ++j) {
        work[row][j] -= factor * work[col][j];
        inv[row][j] -= factor * inv[col][j];
      }
    }
  }
  return inv;
}

namespace {

const Rational kQuarter = rat(1, 4);
const Rational kThreeQuarters = rat(3, 4);

void validate_partition_vector(const std::vector<Rational>& y, int r) {
  if (static_cast<int>(y.size()) != r) throw UsageError("bias vector has wrong length");
  for (const auto& v : y)
    if (v != kQuarter && v != kThreeQuarters)
      throw UsageError("bias vector entries must be 1/4 or 3/4");
}

}  // namespace

ExactPlan solve_bias_vector(const ConditionalMatrix& m, const RationalMatrix& m_inverse,
                            const std::vector<Rational>& y) {
  const int r = m.size();
  validate_partition_vector(y, r);
  ExactPlan plan;
  plan.y = y;
  plan.s = m.s;
  plan.candidates = m.candidates;
  plan.x.assign(r, Rational(0));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) plan.x[i] += m_inverse[i][j] * y[j];
  for (int i = 0; i < r; ++i)
    if (sgn(plan.x[i]) < 0 || plan.x[i] > 1)
      throw EscalationNeeded("bias entry x[" + std::to_string(i) + "] = " + rat_str(plan.x[i]) +
                             " is outside [0,1]; rebuild with doubled s");
  // M x = y must hold exactly; anything else is an arithmetic bug.
  for (int i = 0; i < r; ++i) {
    Rational acc(0);
    for (int j = 0; j < r; ++j) acc += m.rows[i][j] * plan.x[j];
    if (acc != y[i]) throw InvariantError("M*x != y at row " + std::to_string(i));
  }
  return plan;
}

ExactPlan solve_bias_vector(const ConditionalMatrix& m, const std::vector<Rational>& y) {
  return solve_bias_vector(m, invert_exact(m.rows), y);
}

Rational exact_test_probability(const ConditionalMatrix& m, const std::vector<Rational>& x,
                                int row) {
  if (row < 0 || row >= m.size()) throw UsageError("exact_test_probability: bad row");
  if (static_cast<int>(x.size()) != m.size())
    throw UsageError("exact_test_probability: bad bias vector length");
  Rational acc(0);
  for (int j = 0; j < m.size(); ++j) acc += x[j] * m.rows[row][j];
  return acc;
}

Rational amplify_once(const Rational& p) {
  if (sgn(p) < 0 || p > 1) throw UsageError("amplify_once: probability outside [0,1]");
  const Rational t = 3 - 4 * p;
  return p * t * t;
}

namespace {

// The search always runs ceil(log2 r) rounds so the query count is the same
// for every hidden subgroup; once the live range is a singleton the padding
// rounds keep Y_3/4 = that singleton and deterministically confirm it.
int split_point(int lo, int hi) { return hi - lo > 1 ? lo + (hi - lo + 1) / 2 : hi; }

// Y_3/4 is the first half of the live range; everything else (second half and
// eliminated candidates) gets 1/4.
std::vector<Rational> partition_vector(int r, int lo, int hi) {
  const int mid = split_point(lo, hi);
  std::vector<Rational> y(r, kQuarter);
  for (int i = lo; i < mid; ++i) y[i] = kThreeQuarters;
  return y;
}

void collect_ranges(int lo, int hi, int rounds_left, std::set<std::pair<int, int>>& out) {
  if (rounds_left == 0) return;
  out.insert({lo, hi});
  const int mid = split_point(lo, hi);
  collect_ranges(lo, mid, rounds_left - 1, out);
  if (mid < hi) collect_ranges(mid, hi, rounds_left - 1, out);
}

int resolve_s(int r, const EngineOptions& opts) {
  return opts.s_override > 0 ? opts.s_override : choose_s_exact(r);
}

}  // namespace

SearchPlan build_search_plan(CatalogRef candidates, const EngineOptions& opts) {
  if (!candidates) throw UsageError("build_search_plan: null candidate list");
  require_ordered_with_trivial_last(*candidates);
  const int r = candidates->size();
  std::set<std::pair<int, int>> ranges;
  if (r > 1) collect_ranges(0, r, ceil_log2(BigInt(r)), ranges);

  for (int s = resolve_s(r, opts);; s *= 2) {
    if (s > opts.s_cap)
      throw CapError("bias-vector escalation exhausted the s cap " + std::to_string(opts.s_cap));
    try {
      SearchPlan plan;
      plan.candidates = candidates;
      plan.s = s;
      plan.matrix = build_conditional_matrix(candidates->group, candidates, s);
      plan.inverse = invert_exact(plan.matrix.rows);
      for (const auto& [lo, hi] : ranges)
        plan.range_plans[{lo, hi}] =
            solve_bias_vector(plan.matrix, plan.inverse, partition_vector(r, lo, hi));
      return plan;
    } catch (const EscalationNeeded&) {
      continue;  // double s and rebuild
    }
  }
}

IdentifyResult identify_subgroup(const SearchPlan& plan, HiddenOracle& oracle) {
  const auto& catalog = *plan.candidates;
  if (!(oracle.group() == catalog.group))
    throw UsageError("identify_subgroup: oracle belongs to another group");
  const int r = catalog.size();

  IdentifyResult result;
  result.s = plan.s;
  if (r == 1) {
    // Degenerate group: the only subgroup is trivial; no queries needed.
    result.subgroup = catalog.subgroups[0];
    return result;
  }

  const int hidden_row = catalog.index_of(oracle.hidden());
  if (hidden_row < 0) throw InvariantError("hidden subgroup missing from the candidate catalog");

  const int total_rounds = ceil_log2(BigInt(r));
  int lo = 0, hi = r;
  for (int round = 0; round < total_rounds; ++round) {
    const int mid = split_point(lo, hi);
    const ExactPlan& node = plan.range_plans.at({lo, hi});
    // The quantum side: prepare, ExactTest, one amplification iteration.
    // The measured ancilla bit is the only thing the driver consumes; the
    // hidden row just selects which exact probability physics would produce.
    const Rational p = exact_test_probability(plan.matrix, node.x, hidden_row);
    if (p != node.y[hidden_row])
      throw InvariantError("ExactTest probability differs from the planned bias");
    const Rational amplified = amplify_once(p);
    if (amplified != 0 && amplified != 1)
      throw InvariantError("amplification did not produce a deterministic bit");
    const int bit = amplified == 1 ? 1 : 0;
    oracle.charge("prepare", 2LL * plan.s);
    oracle.charge("unprepare", plan.s);

    result.transcript.push_back(
        RoundTranscript{lo, hi, mid, node.y, node.x, p, amplified, bit, 3LL * plan.s});
    ++result.rounds;
    // bit 1 means H is in Y_1/4 (the second half), bit 0 in Y_3/4.
    if (bit == 1)
      lo = mid;
    else
      hi = mid;
  }
  if (hi - lo != 1) throw InvariantError("binary search did not converge to a singleton");

  result.subgroup = catalog.subgroups[lo];
  const auto gens = generating_set(catalog.group, result.subgroup);
  result.generators = sanitize_output(oracle, gens);
  return result;
}

IdentifyResult identify_subgroup(const FiniteGroup& G, HiddenOracle& oracle,
                                 const EngineOptions& opts) {
  auto catalog = std::make_shared<const SubgroupCatalog>(enumerate_subgroups(G));
  return identify_subgroup(build_search_plan(catalog, opts), oracle);
}

DecisionPlan build_decide_plan(CatalogRef catalog, const EngineOptions& opts) {
  if (!catalog) throw UsageError("build_decide_plan: null candidate list");
  require_ordered_with_trivial_last(*catalog);
  const int r = catalog->size();
  DecisionPlan plan;
  plan.candidates = catalog;
  plan.one_sided = false;
  if (r == 1) {
    plan.s = resolve_s(r, opts);
    return plan;
  }
  std::vector<Rational> y(r, kQuarter);
  y[r - 1] = kThreeQuarters;  // Y_3/4 = {trivial subgroup}
  for (int s = resolve_s(r, opts);; s *= 2) {
    if (s > opts.s_cap)
      throw CapError("bias-vector escalation exhausted the s cap " + std::to_string(opts.s_cap));
    try {
      plan.s = s;
      plan.matrix = build_conditional_matrix(catalog->group, catalog, s);
      plan.plan = solve_bias_vector(plan.matrix, y);
      return plan;
    } catch (const EscalationNeeded&) {
      continue;
    }
  }
}

DecisionPlan build_one_sided_plan(const SubgroupCatalog& full_catalog,
                                  const EngineOptions& opts) {
  auto cyclic = std::make_shared<const SubgroupCatalog>(cyclic_subcatalog(full_catalog));
  require_ordered_with_trivial_last(*cyclic);
  const int rc = cyclic->size();
  DecisionPlan plan;
  plan.candidates = cyclic;
  plan.one_sided = true;
  if (rc == 1) {
    plan.s = resolve_s(rc, opts);
    return plan;
  }
  std::vector<Rational> y(rc, kThreeQuarters);
  y[rc - 1] = kQuarter;  // trivial subgroup alone answers "trivial"
  for (int s = resolve_s(rc, opts);; s *= 2) {
    if (s > opts.s_cap)
      throw CapError("bias-vector escalation exhausted the s cap " + std::to_string(opts.s_cap));
    try {
      plan.s = s;
      plan.matrix = build_conditional_matrix(cyclic->group, cyclic, s);
      plan.plan = solve_bias_vector(plan.matrix, y);
      return plan;
    } catch (const EscalationNeeded&) {
      continue;
    }
  }
}

namespace {

// Exact Bernoulli draw: 1 with probability p, deterministic per seed.
int bernoulli_bit(const Rational& p, std::uint64_t seed) {
  gmp_randstate_t rng;
  gmp_randinit_mt(rng);
  gmp_randseed_ui(rng, static_cast<unsigned long>(seed));
  BigInt draw;
  mpz_urandomm(draw.get_mpz_t(), rng, p.get_den_mpz_t());
  gmp_randclear(rng);
  return draw < BigInt(p.get_num()) ? 1 : 0;
}

}  // namespace

DecisionResult decide_trivial(const DecisionPlan& plan, HiddenOracle& oracle) {
  if (plan.one_sided) throw UsageError("decide_trivial: got a one-sided plan");
  const auto& catalog = *plan.candidates;
  if (!(oracle.group() == catalog.group))
    throw UsageError("decide_trivial: oracle belongs to another group");
  DecisionResult result;
  result.s = plan.s;
  if (catalog.size() == 1) {
    result.nontrivial = false;
    result.p = kThreeQuarters;
    result.amplified = 0;
    return result;
  }
  const int row = catalog.index_of(oracle.hidden());
  if (row < 0) throw InvariantError("hidden subgroup missing from the candidate catalog");
  result.p = exact_test_probability(plan.matrix, plan.plan.x, row);
  result.amplified = amplify_once(result.p);
  if (result.amplified != 0 && result.amplified != 1)
    throw InvariantError("decide_trivial: amplification was not deterministic");
  result.bit = result.amplified == 1 ? 1 : 0;
  oracle.charge("prepare", 2LL * plan.s);
  oracle.charge("unprepare", plan.s);
  result.nontrivial = result.bit == 1;  // bit 1 <=> H in Y_1/4 = non-trivial set
  return result;
}

DecisionResult decide_trivial(const FiniteGroup& G, HiddenOracle& oracle,
                              const EngineOptions& opts) {
  auto catalog = std::make_shared<const SubgroupCatalog>(enumerate_subgroups(G));
  return decide_trivial(build_decide_plan(catalog, opts), oracle);
}

DecisionResult one_sided_trivial(const DecisionPlan& plan, HiddenOracle& oracle,
                                 std::uint64_t seed) {
  if (!plan.one_sided) throw UsageError("one_sided_trivial: got a decide-trivial plan");
  const auto& catalog = *plan.candidates;
  if (!(oracle.group() == catalog.group))
    throw UsageError("one_sided_trivial: oracle belongs to another group");
  DecisionResult result;
  result.s = plan.s;
  if (catalog.size() == 1) {
    result.nontrivial = false;
    result.p = kQuarter;
    result.amplified = 1;
    result.bit = 1;
    return result;
  }

  const int row = catalog.index_of(oracle.hidden());
  if (row >= 0) {
    result.p = exact_test_probability(plan.matrix, plan.plan.x, row);
  } else {
    // Non-cyclic hidden subgroup: its outcome distribution over the cyclic
    // candidates is not a row of M.  Simulate it with a scratch oracle; the
    // user-visible ledger only pays for the amplification round below.
    result.deterministic = false;
    HiddenOracle scratch(catalog.group, oracle.hidden());
    BranchState state =
        run_cascade(prepare_initial(catalog.group, scratch, plan.s, plan.candidates));
    OutcomeDistribution dist = first_register_distribution(state);
    Rational p(0);
    for (const auto& [nu, prob] : dist.prob) {
      if (nu < 1) throw InvariantError("cascade left mass on outcome 0");
      p += plan.plan.x[nu - 1] * prob;
    }
    result.p = p;
  }
  result.amplified = amplify_once(result.p);
  result.bit = bernoulli_bit(result.amplified, seed);
  if (result.deterministic && result.amplified != 0 && result.amplified != 1)
    throw InvariantError("one_sided_trivial: expected a deterministic bit");
  oracle.charge("prepare", 2LL * plan.s);
  oracle.charge("unprepare", plan.s);
  result.nontrivial = result.bit == 0;  // bit 1 <=> Y_1/4 = {trivial}
  return result;
}

DecisionResult one_sided_trivial(const FiniteGroup& G, HiddenOracle& oracle, std::uint64_t seed,
                                 const EngineOptions& opts) {
  const SubgroupCatalog catalog = enumerate_subgroups(G);
  return one_sided_trivial(build_one_sided_plan(catalog, opts), oracle, seed);
}

}  // namespace hspsim
