#include <memory>
#include <random>

#include "doctest.h"
#include "hspsim/cascade.hpp"
#include "hspsim/checks.hpp"
#include "hspsim/errors.hpp"

using namespace hspsim;

namespace {

CatalogRef catalog_of(const char* spec) {
  return std::make_shared<const SubgroupCatalog>(enumerate_subgroups(build_group(spec)));
}

}  // namespace

TEST_CASE("prepare_initial") {
  const auto z2 = catalog_of("Z:2");
  HiddenOracle oracle(z2->group, trivial_subgroup(z2->group));

  SUBCASE("indicator of the trivial subgroup") {
    const BranchState state = prepare_initial(z2->group, oracle, 2, z2);
    REQUIRE(state.branches.size() == 1);
    const Branch& b = state.branches[0];
    CHECK(b.nu == 0);
    CHECK(b.ell == 0);
    CHECK(b.coeff == 1);
    CHECK(b.phi == std::vector<Rational>{1, 0});
    CHECK(squared_norm(state) == 1);
  }
  SUBCASE("indicator of the whole group") {
    HiddenOracle full(z2->group, whole_group(z2->group));
    const BranchState state = prepare_initial(z2->group, full, 2, z2);
    REQUIRE(state.branches.size() == 1);
    CHECK(state.branches[0].phi == std::vector<Rational>{1, 1});
    CHECK(state.hidden_order == 2);
  }
  SUBCASE("charges s queries to the prepare phase") {
    prepare_initial(z2->group, oracle, 5, z2);
    CHECK(oracle.ledger().phases.at("prepare") == 5);
    CHECK(oracle.ledger().total == 5);
  }
  SUBCASE("s = 0 is rejected") {
    CHECK_THROWS_AS(prepare_initial(z2->group, oracle, 0, z2), UsageError);
  }
}

TEST_CASE("projector_apply") {
  const FiniteGroup z2 = build_group("Z:2");

  SUBCASE("trivial subgroup projector is the identity") {
    const Subgroup K = trivial_subgroup(z2);
    const std::vector<Rational> phi{rat(2, 3), rat(-1, 7)};
    CHECK(projector_apply(z2, K, left_transversal(z2, K), phi) == phi);
  }
  SUBCASE("whole-group projector averages over the coset") {
    const Subgroup K = whole_group(z2);
    const std::vector<Rational> phi{1, 0};
    const std::vector<Rational> expected{rat(1, 2), rat(1, 2)};
    CHECK(projector_apply(z2, K, left_transversal(z2, K), phi) == expected);
  }
  SUBCASE("idempotence on random rational vectors") {
    const FiniteGroup s3 = build_group("S:3");
    const SubgroupCatalog catalog = enumerate_subgroups(s3);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> num(-6, 6);
    std::uniform_int_distribution<long> den(1, 5);
    for (int mu = 0; mu < catalog.size(); ++mu) {
      const auto& K = catalog.subgroups[mu];
      const auto& T = catalog.transversals[mu];
      for (int trial = 0; trial < 10; ++trial) {
        std::vector<Rational> phi;
        for (int g = 0; g < s3.order(); ++g) phi.push_back(rat(num(rng), den(rng)));
        const auto once = projector_apply(s3, K, T, phi);
        CHECK(projector_apply(s3, K, T, once) == once);
      }
    }
  }
  SUBCASE("length mismatch is rejected") {
    CHECK_THROWS_AS(projector_apply(z2, whole_group(z2), {0}, {Rational(1)}), UsageError);
  }
}

TEST_CASE("apply_test splits a branch into fire/keep/subtract") {
  const auto z2 = catalog_of("Z:2");
  HiddenOracle oracle(z2->group, trivial_subgroup(z2->group));
  const BranchState state = apply_test(prepare_initial(z2->group, oracle, 2, z2), 1);

  // Expected: (1,1,1/4,(1,1)), (0,0,1,(1,0)), (0,0,-1/4,(1,1)); the projected
  // couplet (1/2,1/2) canonicalizes to (1,1) with (1/2)^2 folded into c.
  REQUIRE(state.branches.size() == 3);
  const std::vector<Rational> flat{1, 1};
  const std::vector<Rational> point{1, 0};
  bool saw_fire = false, saw_keep = false, saw_subtract = false;
  for (const auto& b : state.branches) {
    if (b.nu == 1 && b.ell == 1 && b.phi == flat && b.coeff == rat(1, 4)) saw_fire = true;
    if (b.nu == 0 && b.ell == 0 && b.phi == point && b.coeff == 1) saw_keep = true;
    if (b.nu == 0 && b.ell == 0 && b.phi == flat && b.coeff == rat(-1, 4)) saw_subtract = true;
  }
  CHECK(saw_fire);
  CHECK(saw_keep);
  CHECK(saw_subtract);
  CHECK(squared_norm(state) == 1);
  CHECK(first_register_distribution(state).prob.at(1) == rat(1, 4));
}

TEST_CASE("matching test fires deterministically") {
  for (const char* spec : {"Z:4", "S:3", "Q8"}) {
    CAPTURE(spec);
    const auto catalog = catalog_of(spec);
    for (int mu = 1; mu <= catalog->size(); ++mu) {
      HiddenOracle oracle(catalog->group, catalog->subgroups[mu - 1]);
      const BranchState state =
          apply_test(prepare_initial(catalog->group, oracle, 3, catalog), mu);
      REQUIRE(state.branches.size() == 1);
      CHECK(state.branches[0].nu == mu);
      CHECK(state.branches[0].ell == 1);
      const OutcomeDistribution dist = first_register_distribution(state);
      CHECK(dist.prob.size() == 1);
      CHECK(dist.prob.at(mu) == 1);
    }
  }
}

TEST_CASE("branch invariants hold along full cascades") {
  for (const char* spec : {"Z:6", "S:3", "D:4"}) {
    CAPTURE(spec);
    const auto catalog = catalog_of(spec);
    for (const auto& H : catalog->subgroups) {
      HiddenOracle oracle(catalog->group, H);
      BranchState state = prepare_initial(catalog->group, oracle, 2, catalog);
      for (int mu = 1; mu <= catalog->size(); ++mu) {
        state = apply_test(state, mu);
        CHECK(squared_norm(state) == 1);
        for (size_t i = 0; i < state.branches.size(); ++i) {
          const auto& b = state.branches[i];
          if (b.ell == 0) CHECK(b.nu == 0);
          CHECK(sgn(b.coeff) != 0);
          // canonical scale: first nonzero coordinate is 1
          for (const auto& q : b.phi) {
            if (sgn(q) != 0) {
              CHECK(q == 1);
              break;
            }
          }
        }
      }
    }
  }
}

TEST_CASE("run_cascade distributions") {
  const auto z2 = catalog_of("Z:2");

  SUBCASE("whole group: first test fires with certainty for any s") {
    for (int s : {1, 2, 5}) {
      HiddenOracle oracle(z2->group, whole_group(z2->group));
      const auto dist = first_register_distribution(
          run_cascade(prepare_initial(z2->group, oracle, s, z2)));
      CHECK(dist.prob.size() == 1);
      CHECK(dist.prob.at(1) == 1);
    }
  }
  SUBCASE("trivial hidden subgroup follows the 2^-s law") {
    for (int s : {2, 4, 6, 8}) {
      HiddenOracle oracle(z2->group, trivial_subgroup(z2->group));
      const auto dist = first_register_distribution(
          run_cascade(prepare_initial(z2->group, oracle, s, z2)));
      const Rational leak = Rational(1) / Rational(pow2(s));
      CHECK(dist.prob.at(1) == leak);
      CHECK(dist.prob.at(2) == 1 - leak);
    }
  }
  SUBCASE("ledger untouched by the cascade itself") {
    HiddenOracle oracle(z2->group, trivial_subgroup(z2->group));
    BranchState state = prepare_initial(z2->group, oracle, 4, z2);
    const long long before = oracle.ledger().total;
    state = run_cascade(std::move(state));
    CHECK(oracle.ledger().total == before);
  }
  SUBCASE("unordered candidate list is rejected") {
    const FiniteGroup z6 = build_group("Z:6");
    const SubgroupCatalog good = enumerate_subgroups(z6);
    auto bad = std::make_shared<SubgroupCatalog>(good);
    std::swap(bad->subgroups[1], bad->subgroups[3]);
    std::swap(bad->transversals[1], bad->transversals[3]);
    HiddenOracle oracle(z6, trivial_subgroup(z6));
    BranchState state = prepare_initial(z6, oracle, 2, bad);
    CHECK_THROWS_AS(run_cascade(std::move(state)), UsageError);
  }
}

TEST_CASE("initial state measures nu = 0") {
  const auto z6 = catalog_of("Z:6");
  HiddenOracle oracle(z6->group, make_subgroup(z6->group, {0, 3}));
  const auto dist = first_register_distribution(prepare_initial(z6->group, oracle, 3, z6));
  CHECK(dist.prob.size() == 1);
  CHECK(dist.prob.at(0) == 1);
}

TEST_CASE("branch count stays far below the 3^r pre-merge bound") {
  const auto s3 = catalog_of("S:3");
  HiddenOracle oracle(s3->group, trivial_subgroup(s3->group));
  const BranchState state = run_cascade(prepare_initial(s3->group, oracle, 4, s3));
  CHECK(static_cast<long>(state.branches.size()) <= 729);  // 3^6
}

TEST_CASE("squared distance matches the Lemma 2 overlap form") {
  const auto s3 = catalog_of("S:3");
  const Subgroup order2 = s3->subgroups[2];
  REQUIRE(order2.order() == 2);
  for (int s : {2, 3, 4}) {
    HiddenOracle oracle(s3->group, order2);
    const BranchState initial = prepare_initial(s3->group, oracle, s, s3);
    const BranchState after = apply_test(initial, 2);  // the order-3 candidate
    const Rational overlap = coset_overlap(s3->subgroups[1], order2);
    CHECK(squared_distance(after, initial) ==
          2 * rat_pow(overlap, static_cast<unsigned long>(s)));
  }
}

TEST_CASE("sampling") {
  const auto z2 = catalog_of("Z:2");
  OutcomeDistribution point;
  point.candidates = z2;
  point.prob[3] = 1;

  SUBCASE("point distributions are constant") {
    for (std::uint64_t seed = 0; seed < 16; ++seed) CHECK(sample_outcome(point, seed) == 3);
  }
  SUBCASE("same seed, same outcome") {
    OutcomeDistribution dist;
    dist.candidates = z2;
    dist.prob[1] = rat(1, 4);
    dist.prob[2] = rat(3, 4);
    for (std::uint64_t seed = 10; seed < 20; ++seed)
      CHECK(sample_outcome(dist, seed) == sample_outcome(dist, seed));
    const auto a = sample_outcomes(dist, 42, 100);
    const auto b = sample_outcomes(dist, 42, 100);
    CHECK(a == b);
  }
  SUBCASE("frequencies track the exact probabilities") {
    OutcomeDistribution dist;
    dist.candidates = z2;
    dist.prob[1] = rat(1, 4);
    dist.prob[2] = rat(3, 4);
    const CheckResult res = check_sampling(dist, 10000, 2024);
    INFO(res.detail);
    CHECK(res.pass);
  }
}
