#include "hspsim/cascade.hpp"

#include <algorithm>

#include "hspsim/errors.hpp"

namespace hspsim {

namespace {

// Three-way compare for branch merge keys.
int compare_key(const Branch& a, const Branch& b) {
  if (a.nu != b.nu) return a.nu < b.nu ? -1 : 1;
  if (a.ell != b.ell) return a.ell < b.ell ? -1 : 1;
  for (size_t i = 0; i < a.phi.size(); ++i) {
    const int c = cmp(a.phi[i], b.phi[i]);
    if (c != 0) return c;
  }
  return 0;
}

// Scale phi so its first nonzero coordinate is 1; fold scale^s into coeff.
// Returns false for the zero vector (branch should be dropped).
bool canonicalize(std::vector<Rational>& phi, Rational& coeff, int s) {
  size_t first = phi.size();
  for (size_t i = 0; i < phi.size(); ++i) {
    if (sgn(phi[i]) != 0) {
      first = i;
      break;
    }
  }
  if (first == phi.size()) return false;
  const Rational scale = phi[first];
  if (scale != 1) {
    for (auto& q : phi) q /= scale;
    coeff *= rat_pow(scale, static_cast<unsigned long>(s));
  }
  return true;
}

// Sort, sum coefficients of identical (nu, ell, phi), prune zeros.
void merge_branches(std::vector<Branch>& branches) {
  std::sort(branches.begin(), branches.end(),
            [](const Branch& a, const Branch& b) { return compare_key(a, b) < 0; });
  std::vector<Branch> merged;
  for (auto& b : branches) {
    if (!merged.empty() && compare_key(merged.back(), b) == 0) {
      merged.back().coeff += b.coeff;
    } else {
      merged.push_back(std::move(b));
    }
  }
  std::erase_if(merged, [](const Branch& b) { return sgn(b.coeff) == 0; });
  branches = std::move(merged);
}

void require_candidates(const BranchState& state) {
  if (!state.candidates || state.candidates->size() == 0)
    throw UsageError("branch state has no candidate list");
}

}  // namespace

BranchState prepare_initial(const FiniteGroup& G, HiddenOracle& oracle, int s,
                            CatalogRef candidates) {
  if (s < 1) throw UsageError("prepare_initial: s must be at least 1");
  if (!(oracle.group() == G)) throw UsageError("prepare_initial: oracle belongs to another group");
  if (candidates && !(candidates->group == G))
    throw UsageError("prepare_initial: candidate list belongs to another group");
  oracle.charge("prepare", s);

  Branch init;
  init.coeff = 1;
  init.phi.assign(G.order(), Rational(0));
  for (int h : oracle.hidden().members) init.phi[h] = 1;

  BranchState state;
  state.s = s;
  state.hidden_order = oracle.hidden().order();
  state.candidates = std::move(candidates);
  state.branches.push_back(std::move(init));
  return state;
}

std::vector<Rational> projector_apply(const FiniteGroup& G, const Subgroup& K,
                                      const std::vector<int>& transversal,
                                      const std::vector<Rational>& phi) {
  if (static_cast<int>(phi.size()) != G.order())
    throw UsageError("projector_apply: phi has wrong length");
  if (!is_left_transversal(G, K, transversal))
    throw UsageError("projector_apply: invalid transversal for K");
  const Rational inv_k = rat(1, K.order());
  std::vector<Rational> out(phi.size(), Rational(0));
  for (int t : transversal) {
    Rational coset_sum(0);
    for (int k : K.members) coset_sum += phi[G.mul(t, k)];
    if (sgn(coset_sum) == 0) continue;
    coset_sum *= inv_k;
    for (int k : K.members) out[G.mul(t, k)] = coset_sum;
  }
  return out;
}

BranchState apply_test(const BranchState& state, int mu) {
  require_candidates(state);
  const auto& catalog = *state.candidates;
  if (mu < 1 || mu > catalog.size())
    throw UsageError("apply_test: subgroup index out of range: " + std::to_string(mu));
  const auto& K = catalog.subgroups[mu - 1];
  const auto& T = catalog.transversals[mu - 1];
  const FiniteGroup& G = catalog.group;

  BranchState next = state;
  next.branches.clear();
  next.branches.reserve(state.branches.size() * 3);
  for (const auto& b : state.branches) {
    // Counter operator: (0,0) -> (mu,1); (nu,ell) -> (nu,ell+1) for ell>0.
    const int fired_nu = b.ell == 0 ? mu : b.nu;
    const int fired_ell = b.ell + 1;
    if (fired_ell > catalog.size())
      throw InvariantError("counter register exceeded the number of tests");

    std::vector<Rational> projected = projector_apply(G, K, T, b.phi);
    Rational proj_coeff = b.coeff;
    if (canonicalize(projected, proj_coeff, state.s)) {
      Branch fire{fired_nu, fired_ell, proj_coeff, projected};
      Branch subtract{b.nu, b.ell, -proj_coeff, std::move(projected)};
      next.branches.push_back(std::move(fire));
      next.branches.push_back(std::move(subtract));
    }
    next.branches.push_back(b);  // keep
  }
  merge_branches(next.branches);
  return next;
}

BranchState run_cascade(BranchState state) {
  require_candidates(state);
  const auto& subs = state.candidates->subgroups;
  for (size_t i = 0; i + 1 < subs.size(); ++i)
    if (subs[i].order() < subs[i + 1].order())
      throw UsageError("run_cascade: candidate list is not size-descending at position " +
                       std::to_string(i + 1));
  for (int mu = 1; mu <= state.candidates->size(); ++mu) state = apply_test(state, mu);
  return state;
}

namespace {

// Gram accumulation over matching (nu, ell) blocks of two merged branch lists:
// sum c_a c_b <phi_a, phi_b>^s, then the |H|^(-s) normalization.
Rational gram_inner(const BranchState& a, const BranchState& b) {
  Rational acc(0);
  for (const auto& ba : a.branches) {
    for (const auto& bb : b.branches) {
      if (ba.nu != bb.nu || ba.ell != bb.ell) continue;
      Rational dot(0);
      for (size_t i = 0; i < ba.phi.size(); ++i) dot += ba.phi[i] * bb.phi[i];
      if (sgn(dot) == 0) continue;
      acc += ba.coeff * bb.coeff * rat_pow(dot, static_cast<unsigned long>(a.s));
    }
  }
  return acc;
}

}  // namespace

Rational state_inner(const BranchState& a, const BranchState& b) {
  if (a.s != b.s || a.hidden_order != b.hidden_order)
    throw UsageError("state_inner: states are not comparable");
  const bool same_space = a.branches.empty() || b.branches.empty() ||
                          a.branches.front().phi.size() == b.branches.front().phi.size();
  if (!same_space) throw UsageError("state_inner: states live over different groups");
  return gram_inner(a, b) * rat_pow(rat(1, a.hidden_order), static_cast<unsigned long>(a.s));
}

Rational squared_norm(const BranchState& state) { return state_inner(state, state); }

Rational squared_distance(const BranchState& a, const BranchState& b) {
  return squared_norm(a) + squared_norm(b) - 2 * state_inner(a, b);
}

OutcomeDistribution first_register_distribution(const BranchState& state) {
  const Rational norm_factor =
      rat_pow(rat(1, state.hidden_order), static_cast<unsigned long>(state.s));
  OutcomeDistribution dist;
  dist.candidates = state.candidates;
  // Blocks with distinct (nu, ell) are orthogonal, so per-nu mass is a sum of
  // per-block Gram forms.
  std::map<std::pair<int, int>, std::vector<size_t>> blocks;
  for (size_t i = 0; i < state.branches.size(); ++i) {
    const auto& b = state.branches[i];
    blocks[{b.nu, b.ell}].push_back(i);
  }
  const auto power = static_cast<unsigned long>(state.s);
  for (const auto& [key, idx] : blocks) {
    Rational block(0);
    for (size_t a = 0; a < idx.size(); ++a) {
      const auto& ba = state.branches[idx[a]];
      for (size_t b = a; b < idx.size(); ++b) {
        const auto& bb = state.branches[idx[b]];
        Rational dot(0);
        for (size_t k = 0; k < ba.phi.size(); ++k) dot += ba.phi[k] * bb.phi[k];
        if (sgn(dot) == 0) continue;
        Rational term = ba.coeff * bb.coeff * rat_pow(dot, power);
        block += (a == b) ? term : 2 * term;
      }
    }
    if (sgn(block) != 0) dist.prob[key.first] += block * norm_factor;
  }
  Rational total(0);
  for (const auto& [nu, p] : dist.prob) {
    if (sgn(p) < 0 || p > 1)
      throw InvariantError("outcome probability outside [0,1] for nu=" + std::to_string(nu));
    total += p;
  }
  if (total != 1) throw InvariantError("outcome probabilities sum to " + rat_str(total));
  return dist;
}

std::vector<int> sample_outcomes(const OutcomeDistribution& dist, std::uint64_t seed,
                                 int count) {
  if (dist.prob.empty()) throw UsageError("sample_outcome: empty distribution");
  if (count < 1) throw UsageError("sample_outcomes: count must be positive");
  BigInt denom(1);
  for (const auto& [nu, p] : dist.prob)
    mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), p.get_den_mpz_t());
  std::vector<std::pair<BigInt, int>> thresholds;  // cumulative weight -> outcome
  BigInt cumulative(0);
  for (const auto& [nu, p] : dist.prob) {
    cumulative += BigInt(p.get_num()) * (denom / BigInt(p.get_den()));
    thresholds.emplace_back(cumulative, nu);
  }

  gmp_randstate_t rng;
  gmp_randinit_mt(rng);
  gmp_randseed_ui(rng, static_cast<unsigned long>(seed));
  std::vector<int> out;
  out.reserve(count);
  BigInt draw;
  for (int i = 0; i < count; ++i) {
    mpz_urandomm(draw.get_mpz_t(), rng, denom.get_mpz_t());
    int picked = thresholds.back().second;
    for (const auto& [bound, nu] : thresholds) {
      if (draw < bound) {
        picked = nu;
        break;
      }
    }
    out.push_back(picked);
  }
  gmp_randclear(rng);
  return out;
}

int sample_outcome(const OutcomeDistribution& dist, std::uint64_t seed) {
  return sample_outcomes(dist, seed, 1)[0];
}

}  // namespace hspsim
