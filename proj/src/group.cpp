#include "hspsim/group.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "hspsim/errors.hpp"
#include "json.hpp"

namespace hspsim {

namespace {

std::string triple_str(int a, int b, int c) {
  return "(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")";
}

}  // namespace

FiniteGroup::FiniteGroup(std::vector<std::vector<int>> table, std::vector<std::string> names) {
  n_ = static_cast<int>(table.size());
  if (n_ == 0) throw UsageError("empty multiplication table");
  table_.resize(static_cast<size_t>(n_) * n_);
  for (int i = 0; i < n_; ++i) {
    if (static_cast<int>(table[i].size()) != n_)
      throw UsageError("malformed table: row " + std::to_string(i) + " has wrong length");
    for (int j = 0; j < n_; ++j) {
      const int v = table[i][j];
      if (v < 0 || v >= n_)
        throw UsageError("malformed table: entry out of range at " + triple_str(i, j, v));
      table_[static_cast<size_t>(i) * n_ + j] = v;
    }
  }

  // Two-sided identity at id 0.
  for (int g = 0; g < n_; ++g) {
    if (mul(0, g) != g || mul(g, 0) != g)
      throw UsageError("group axiom violation: element 0 is not a two-sided identity (fails at g=" +
                       std::to_string(g) + ")");
  }

  // Latin square: every row and column is a permutation.
  std::vector<bool> seen(n_);
  for (int i = 0; i < n_; ++i) {
    std::fill(seen.begin(), seen.end(), false);
    for (int j = 0; j < n_; ++j) seen[mul(i, j)] = true;
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
      throw UsageError("group axiom violation: row " + std::to_string(i) + " is not a permutation");
    std::fill(seen.begin(), seen.end(), false);
    for (int j = 0; j < n_; ++j) seen[mul(j, i)] = true;
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
      throw UsageError("group axiom violation: column " + std::to_string(i) +
                       " is not a permutation");
  }

  // Exhaustive associativity (N <= 64, so at most 64^3 checks).
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      for (int c = 0; c < n_; ++c)
        if (mul(mul(a, b), c) != mul(a, mul(b, c)))
          throw UsageError("group axiom violation: associativity fails at " + triple_str(a, b, c));

  inverse_.resize(n_, -1);
  for (int g = 0; g < n_; ++g) {
    for (int h = 0; h < n_; ++h) {
      if (mul(g, h) == 0 && mul(h, g) == 0) {
        inverse_[g] = h;
        break;
      }
    }
    if (inverse_[g] < 0)
      throw UsageError("group axiom violation: no inverse for element " + std::to_string(g));
  }

  if (names.empty()) {
    names_.reserve(n_);
    for (int g = 0; g < n_; ++g) names_.push_back(std::to_string(g));
  } else {
    if (static_cast<int>(names.size()) != n_)
      throw UsageError("element name list has wrong length");
    names_ = std::move(names);
  }
}

namespace {

FiniteGroup build_cyclic(int n) {
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) {
    names.push_back(std::to_string(i));
    for (int j = 0; j < n; ++j) t[i][j] = (i + j) % n;
  }
  return FiniteGroup(std::move(t), std::move(names));
}

FiniteGroup build_elementary_abelian(int k) {
  const int n = 1 << k;
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) {
    std::string bits;
    for (int b = k - 1; b >= 0; --b) bits.push_back(((i >> b) & 1) ? '1' : '0');
    names.push_back(bits);
    for (int j = 0; j < n; ++j) t[i][j] = i ^ j;
  }
  return FiniteGroup(std::move(t), std::move(names));
}

// Elements: r^i at id i, s*r^i at id n+i, with s*r^i*s = r^(-i).
FiniteGroup build_dihedral(int n) {
  const int order = 2 * n;
  auto id = [n](bool flip, int rot) { return (flip ? n : 0) + ((rot % n) + n) % n; };
  std::vector<std::vector<int>> t(order, std::vector<int>(order));
  std::vector<std::string> names;
  for (int a = 0; a < order; ++a) {
    const bool fa = a >= n;
    const int ra = fa ? a - n : a;
    names.push_back(fa ? "s·r^" + std::to_string(ra) : "r^" + std::to_string(ra));
    for (int b = 0; b < order; ++b) {
      const bool fb = b >= n;
      const int rb = fb ? b - n : b;
      // s^fa r^ra · s^fb r^rb = s^(fa xor fb) r^(rb + ra*(-1)^fb)
      t[a][b] = id(fa != fb, rb + (fb ? -ra : ra));
    }
  }
  return FiniteGroup(std::move(t), std::move(names));
}

FiniteGroup build_symmetric(int n) {
  if (n > 4) throw UsageError("S:<n> supported only for n <= 4");
  std::vector<int> base(n);
  for (int i = 0; i < n; ++i) base[i] = i;
  std::vector<std::vector<int>> perms;
  std::vector<int> p = base;
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  // Lexicographic one-line order puts the identity first.
  const int order = static_cast<int>(perms.size());
  auto index_of = [&](const std::vector<int>& q) {
    return static_cast<int>(std::lower_bound(perms.begin(), perms.end(), q) - perms.begin());
  };
  std::vector<std::vector<int>> t(order, std::vector<int>(order));
  std::vector<std::string> names;
  for (int a = 0; a < order; ++a) {
    std::string one_line;
    for (int v : perms[a]) one_line += std::to_string(v);
    names.push_back(one_line);
    for (int b = 0; b < order; ++b) {
      std::vector<int> composed(n);  // (a·b)(x) = a(b(x))
      for (int x = 0; x < n; ++x) composed[x] = perms[a][perms[b][x]];
      t[a][b] = index_of(composed);
    }
  }
  return FiniteGroup(std::move(t), std::move(names));
}

// Ids: 1,-1,i,-i,j,-j,k,-k.
FiniteGroup build_quaternion() {
  // axis 0=1, 1=i, 2=j, 3=k; id = 2*axis + (sign < 0)
  auto mul_basis = [](int a, int b, int& axis, int& sign) {
    // Multiplication of unit quaternions by axis index.
    static const int axis_table[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
    static const int sign_table[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
    axis = axis_table[a][b];
    sign = sign_table[a][b];
  };
  const int order = 8;
  std::vector<std::vector<int>> t(order, std::vector<int>(order));
  const std::vector<std::string> names = {"1", "-1", "i", "-i", "j", "-j", "k", "-k"};
  for (int a = 0; a < order; ++a) {
    for (int b = 0; b < order; ++b) {
      const int ax_a = a / 2, sg_a = (a % 2) ? -1 : 1;
      const int ax_b = b / 2, sg_b = (b % 2) ? -1 : 1;
      int ax, sg;
      mul_basis(ax_a, ax_b, ax, sg);
      sg *= sg_a * sg_b;
      t[a][b] = 2 * ax + (sg < 0 ? 1 : 0);
    }
  }
  return FiniteGroup(std::move(t), names);
}

FiniteGroup build_from_json(const std::string& spec) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(spec);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("malformed group JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("order") || !doc.contains("table"))
    throw UsageError("group JSON must be {\"order\": N, \"table\": [[...]]}");
  const int n = doc["order"].get<int>();
  auto table = doc["table"].get<std::vector<std::vector<int>>>();
  if (static_cast<int>(table.size()) != n)
    throw UsageError("malformed table: \"order\" does not match table size");
  std::vector<std::string> names;
  if (doc.contains("names")) names = doc["names"].get<std::vector<std::string>>();
  return FiniteGroup(std::move(table), std::move(names));
}

int parse_positive_int(const std::string& text, const std::string& what) {
  try {
    size_t pos = 0;
    const int v = std::stoi(text, &pos);
    if (pos != text.size() || v <= 0) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw UsageError("malformed group spec: bad " + what + " in \"" + text + "\"");
  }
}

}  // namespace

FiniteGroup build_group(const std::string& spec) {
  if (spec.empty()) throw UsageError("empty group spec");
  if (spec.front() == '{') return build_from_json(spec);
  if (spec == "Q8") return build_quaternion();
  if (spec.rfind("Z2^", 0) == 0) {
    const int k = parse_positive_int(spec.substr(3), "exponent");
    if (k > 6) throw UsageError("Z2^<k> supported only for k <= 6 (order cap 64)");
    return build_elementary_abelian(k);
  }
  if (spec.rfind("Z:", 0) == 0) {
    const int n = parse_positive_int(spec.substr(2), "order");
    if (n > 64) throw UsageError("Z:<n> supported only for n <= 64");
    return build_cyclic(n);
  }
  if (spec.rfind("D:", 0) == 0) {
    const int n = parse_positive_int(spec.substr(2), "order");
    if (2 * n > 64) throw UsageError("D:<n> supported only for 2n <= 64");
    return build_dihedral(n);
  }
  if (spec.rfind("S:", 0) == 0) {
    const int n = parse_positive_int(spec.substr(2), "degree");
    return build_symmetric(n);
  }
  throw UsageError("unknown group spec \"" + spec +
                   "\" (expected Z:<n>, Z2^<k>, D:<n>, S:<n>, Q8, or JSON)");
}

bool Subgroup::contains(int g) const {
  return std::binary_search(members.begin(), members.end(), g);
}

bool Subgroup::is_subset_of(const Subgroup& other) const {
  return std::includes(other.members.begin(), other.members.end(), members.begin(),
                       members.end());
}

std::vector<int> closure(const FiniteGroup& G, const std::vector<int>& seed) {
  std::vector<bool> in(G.order(), false);
  std::vector<int> elems;
  auto add = [&](int g) {
    if (!in[g]) {
      in[g] = true;
      elems.push_back(g);
    }
  };
  add(G.identity());
  for (int g : seed) {
    if (g < 0 || g >= G.order()) throw UsageError("element id out of range: " + std::to_string(g));
    add(g);
  }
  // Work queue: multiply every known pair until saturation.
  for (size_t i = 0; i < elems.size(); ++i) {
    add(G.inv(elems[i]));
    for (size_t j = 0; j <= i; ++j) {
      add(G.mul(elems[i], elems[j]));
      add(G.mul(elems[j], elems[i]));
    }
  }
  std::sort(elems.begin(), elems.end());
  return elems;
}

bool is_closed_subgroup(const FiniteGroup& G, const std::vector<int>& sorted_members) {
  if (sorted_members.empty()) return false;
  if (!std::binary_search(sorted_members.begin(), sorted_members.end(), G.identity()))
    return false;
  for (int a : sorted_members) {
    if (!std::binary_search(sorted_members.begin(), sorted_members.end(), G.inv(a))) return false;
    for (int b : sorted_members)
      if (!std::binary_search(sorted_members.begin(), sorted_members.end(), G.mul(a, b)))
        return false;
  }
  return true;
}

Subgroup make_subgroup(const FiniteGroup& G, std::vector<int> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  for (int g : members)
    if (g < 0 || g >= G.order())
      throw UsageError("subgroup member out of range: " + std::to_string(g));
  if (!is_closed_subgroup(G, members))
    throw UsageError("member set is not a subgroup (not closed under product/inverse)");
  return Subgroup{std::move(members), G.order()};
}

Subgroup trivial_subgroup(const FiniteGroup& G) { return Subgroup{{G.identity()}, G.order()}; }

Subgroup whole_group(const FiniteGroup& G) {
  std::vector<int> all(G.order());
  for (int g = 0; g < G.order(); ++g) all[g] = g;
  return Subgroup{std::move(all), G.order()};
}

int SubgroupCatalog::index_of(const Subgroup& K) const {
  for (int i = 0; i < size(); ++i)
    if (subgroups[i] == K) return i;
  return -1;
}

SubgroupCatalog enumerate_subgroups(const FiniteGroup& G, int order_cap) {
  if (G.order() > order_cap)
    throw CapError("group order " + std::to_string(G.order()) + " exceeds enumeration cap " +
                   std::to_string(order_cap));

  std::set<std::vector<int>> found;
  std::vector<std::vector<int>> cyclic;
  for (int g = 0; g < G.order(); ++g) {
    auto c = closure(G, {g});
    if (found.insert(c).second) cyclic.push_back(c);
  }
  // Seed with all <=2-generated subgroups, then saturate with joins against
  // cyclic subgroups until a fixed point.  Every subgroup is a join of cyclic
  // ones, so the fixed point is the complete lattice.
  for (int g = 0; g < G.order(); ++g)
    for (int h = g + 1; h < G.order(); ++h) found.insert(closure(G, {g, h}));
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::vector<int>> snapshot(found.begin(), found.end());
    for (const auto& sub : snapshot) {
      for (const auto& cyc : cyclic) {
        if (std::includes(sub.begin(), sub.end(), cyc.begin(), cyc.end())) continue;
        std::vector<int> seed = sub;
        seed.insert(seed.end(), cyc.begin(), cyc.end());
        if (found.insert(closure(G, seed)).second) grew = true;
      }
    }
  }

  std::vector<Subgroup> subgroups;
  subgroups.reserve(found.size());
  for (auto& members : found) subgroups.push_back(Subgroup{members, G.order()});
  std::sort(subgroups.begin(), subgroups.end(), [](const Subgroup& a, const Subgroup& b) {
    if (a.order() != b.order()) return a.order() > b.order();
    return a.members < b.members;
  });

  SubgroupCatalog catalog{G, std::move(subgroups), {}};
  catalog.transversals.reserve(catalog.subgroups.size());
  for (const auto& K : catalog.subgroups) catalog.transversals.push_back(left_transversal(G, K));
  return catalog;
}

std::vector<int> left_transversal(const FiniteGroup& G, const Subgroup& K) {
  if (K.parent_order != G.order() || !is_closed_subgroup(G, K.members))
    throw UsageError("left_transversal: K is not a subgroup of G");
  std::vector<bool> visited(G.order(), false);
  std::vector<int> reps;
  for (int g = 0; g < G.order(); ++g) {
    if (visited[g]) continue;
    reps.push_back(g);  // ascending scan makes g the coset minimum
    for (int k : K.members) visited[G.mul(g, k)] = true;
  }
  return reps;
}

std::vector<int> random_left_transversal(const FiniteGroup& G, const Subgroup& K,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<bool> visited(G.order(), false);
  std::vector<int> reps;
  for (int g = 0; g < G.order(); ++g) {
    if (visited[g]) continue;
    std::vector<int> coset;
    for (int k : K.members) {
      const int e = G.mul(g, k);
      coset.push_back(e);
      visited[e] = true;
    }
    std::uniform_int_distribution<size_t> pick(0, coset.size() - 1);
    reps.push_back(coset[pick(rng)]);
  }
  return reps;
}

bool is_left_transversal(const FiniteGroup& G, const Subgroup& K, const std::vector<int>& T) {
  if (static_cast<int>(T.size()) * K.order() != G.order()) return false;
  std::vector<bool> hit(G.order(), false);
  for (int t : T) {
    if (t < 0 || t >= G.order()) return false;
    for (int k : K.members) {
      const int g = G.mul(t, k);
      if (hit[g]) return false;
      hit[g] = true;
    }
  }
  return true;
}

Rational coset_overlap(const Subgroup& K, const Subgroup& H) {
  if (K.parent_order != H.parent_order)
    throw UsageError("coset_overlap: subgroups of different parent groups");
  std::vector<int> common;
  std::set_intersection(K.members.begin(), K.members.end(), H.members.begin(), H.members.end(),
                        std::back_inserter(common));
  return rat(static_cast<long>(common.size()), K.order());
}

std::vector<int> generating_set(const FiniteGroup& G, const Subgroup& K) {
  std::vector<int> gens;
  std::vector<int> grown = {G.identity()};
  while (static_cast<int>(grown.size()) < K.order()) {
    int next = -1;
    for (int g : K.members) {
      if (!std::binary_search(grown.begin(), grown.end(), g)) {
        next = g;
        break;
      }
    }
    gens.push_back(next);
    std::vector<int> seed = grown;
    seed.push_back(next);
    grown = closure(G, seed);
  }
  return gens;
}

bool is_cyclic(const FiniteGroup& G, const Subgroup& K) {
  for (int g : K.members)
    if (static_cast<int>(closure(G, {g}).size()) == K.order()) return true;
  return false;
}

SubgroupCatalog cyclic_subcatalog(const SubgroupCatalog& catalog) {
  SubgroupCatalog out{catalog.group, {}, {}};
  for (int i = 0; i < catalog.size(); ++i) {
    if (is_cyclic(catalog.group, catalog.subgroups[i])) {
      out.subgroups.push_back(catalog.subgroups[i]);
      out.transversals.push_back(catalog.transversals[i]);
    }
  }
  return out;
}

}  // namespace hspsim
