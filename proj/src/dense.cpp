#include "hspsim/dense.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <string>

#include "hspsim/errors.hpp"

namespace hspsim {

long long default_dense_cap() {
  if (const char* env = std::getenv("HSPSIM_DENSE_CAP")) {
    try {
      size_t pos = 0;
      const long long cap = std::stoll(env, &pos);
      if (pos != std::string(env).size() || cap <= 0) throw std::invalid_argument(env);
      return cap;
    } catch (const std::exception&) {
      throw UsageError(std::string("malformed HSPSIM_DENSE_CAP: ") + env);
    }
  }
  return 1LL << 20;
}

namespace {

// Per-element coset row of the projector Pi_K: columns with value 1/|K|.
std::vector<std::vector<int>> projector_rows(const FiniteGroup& G, const Subgroup& K,
                                             const std::vector<int>& T) {
  if (!is_left_transversal(G, K, T))
    throw UsageError("dense simulator: invalid transversal override");
  std::vector<std::vector<int>> rows(G.order());
  for (int t : T) {
    std::vector<int> coset;
    coset.reserve(K.order());
    for (int k : K.members) coset.push_back(G.mul(t, k));
    std::sort(coset.begin(), coset.end());
    for (int a : coset) rows[a] = coset;
  }
  return rows;
}

std::vector<int> resolve_labels(const FiniteGroup& G, const Subgroup& H,
                                const std::vector<int>& override_labels) {
  const HiddenOracle canonical(G, H);
  if (override_labels.empty()) return canonical.labels();
  if (static_cast<int>(override_labels.size()) != G.order())
    throw UsageError("dense simulator: label override has wrong length");
  const int range = canonical.label_count();
  for (int v : override_labels)
    if (v < 0 || v >= range) throw UsageError("dense simulator: label value out of range");
  for (int g = 0; g < G.order(); ++g)
    for (int h = 0; h < G.order(); ++h) {
      const bool same_canon = canonical.peek_label(g) == canonical.peek_label(h);
      const bool same_over = override_labels[g] == override_labels[h];
      if (same_canon != same_over)
        throw UsageError("dense simulator: label override is not strictly H-periodic");
    }
  return override_labels;
}

// Apply Pi_K to the group sub-index of couplet axis `axis` of a flat
// (N*range)^s vector, in place.
void apply_projector_axis(std::vector<Rational>& vec, const std::vector<std::vector<int>>& rows,
                          const Rational& inv_k, int n, int range, int s, int axis) {
  const long long digit_dim = static_cast<long long>(n) * range;
  long long stride = 1;
  for (int i = s - 1 - axis; i > 0; --i) stride *= digit_dim;
  const long long block = stride * digit_dim;
  const long long total = static_cast<long long>(vec.size());
  std::vector<Rational> fiber(n);
  for (long long base0 = 0; base0 < total; base0 += block) {
    for (long long inner = 0; inner < stride; ++inner) {
      const long long base = base0 + inner;
      for (int v = 0; v < range; ++v) {
        bool any = false;
        for (int g = 0; g < n; ++g) {
          fiber[g] = vec[base + (static_cast<long long>(g) * range + v) * stride];
          any = any || sgn(fiber[g]) != 0;
        }
        if (!any) continue;
        for (int g = 0; g < n; ++g) {
          Rational acc(0);
          for (int col : rows[g]) acc += fiber[col];
          vec[base + (static_cast<long long>(g) * range + v) * stride] = acc * inv_k;
        }
      }
    }
  }
}

bool all_zero(const std::vector<Rational>& vec) {
  return std::all_of(vec.begin(), vec.end(), [](const Rational& q) { return sgn(q) == 0; });
}

}  // namespace

OutcomeDistribution dense_reference_distribution(const FiniteGroup& G, const Subgroup& H, int s,
                                                 CatalogRef candidates,
                                                 const DenseOptions& opts) {
  if (s < 1) throw UsageError("dense simulator: s must be at least 1");
  if (!candidates || !(candidates->group == G))
    throw UsageError("dense simulator: bad candidate list");
  const int r = candidates->size();
  const int n = G.order();
  const auto labels = resolve_labels(G, H, opts.labels);
  const int range = n / H.order();

  const long long cap = opts.amplitude_cap > 0 ? opts.amplitude_cap : default_dense_cap();
  BigInt need(static_cast<long>(r + 1));
  need *= (r + 1);
  BigInt digit_dim_big(static_cast<long>(n) * range);
  for (int i = 0; i < s; ++i) need *= digit_dim_big;
  if (need > BigInt(std::to_string(cap)))
    throw CapError("dense state needs " + need.get_str() + " amplitudes, cap is " +
                   std::to_string(cap));

  if (!opts.transversals.empty() && static_cast<int>(opts.transversals.size()) != r)
    throw UsageError("dense simulator: transversal override has wrong length");

  const long long digit_dim = static_cast<long long>(n) * range;
  long long couplet_total = 1;
  for (int i = 0; i < s; ++i) couplet_total *= digit_dim;

  // Block-sparse statevector keyed by (ell, nu); only occupied register pairs
  // are materialized.  Keys ordered by ell so a reverse sweep processes high
  // counters first, letting Test_mu update in place (each block only ever
  // feeds the block one counter step above).
  std::map<std::pair<int, int>, std::vector<Rational>> state;
  {
    std::vector<Rational> init(couplet_total, Rational(0));
    std::vector<int> tuple(s, 0);
    while (true) {
      long long idx = 0;
      for (int i = 0; i < s; ++i)
        idx = idx * digit_dim + (static_cast<long long>(tuple[i]) * range + labels[tuple[i]]);
      init[idx] = 1;
      int pos = s - 1;
      while (pos >= 0 && ++tuple[pos] == n) tuple[pos--] = 0;
      if (pos < 0) break;
    }
    state[{0, 0}] = std::move(init);
  }

  for (int mu = 1; mu <= r; ++mu) {
    const auto& K = candidates->subgroups[mu - 1];
    const auto& T = opts.transversals.empty() ? candidates->transversals[mu - 1]
                                              : opts.transversals[mu - 1];
    const auto rows = projector_rows(G, K, T);
    const Rational inv_k = rat(1, K.order());

    // Snapshot keys: targets inserted during the sweep must not be revisited.
    std::vector<std::pair<int, int>> keys;
    keys.reserve(state.size());
    for (const auto& kv : state) keys.push_back(kv.first);
    for (auto kit = keys.rbegin(); kit != keys.rend(); ++kit) {
      const auto [ell, nu] = *kit;
      std::vector<Rational>& vec = state.find(*kit)->second;
      if (all_zero(vec)) continue;
      std::vector<Rational> projected = vec;
      for (int axis = 0; axis < s; ++axis)
        apply_projector_axis(projected, rows, inv_k, n, range, s, axis);
      for (long long i = 0; i < couplet_total; ++i) vec[i] -= projected[i];

      const std::pair<int, int> target = ell == 0 ? std::make_pair(1, mu)
                                                  : std::make_pair(ell + 1, nu);
      if (target.first > r) throw InvariantError("dense simulator: counter overflow");
      auto [slot, fresh] = state.try_emplace(target, std::move(projected));
      if (!fresh) {
        auto& dst = slot->second;
        for (long long i = 0; i < couplet_total; ++i) dst[i] += projected[i];
      }
    }
    std::erase_if(state, [](const auto& kv) { return all_zero(kv.second); });
  }

  Rational n_pow = rat_pow(rat(1, n), static_cast<unsigned long>(s));
  OutcomeDistribution dist;
  dist.candidates = candidates;
  for (const auto& [key, vec] : state) {
    Rational mass(0);
    for (const auto& amp : vec)
      if (sgn(amp) != 0) mass += amp * amp;
    if (sgn(mass) != 0) dist.prob[key.second] += mass * n_pow;
  }
  Rational total(0);
  for (const auto& [nu, p] : dist.prob) total += p;
  if (total != 1)
    throw InvariantError("dense simulator: probabilities sum to " + rat_str(total));
  return dist;
}

}  // namespace hspsim
