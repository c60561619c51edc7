#include <cstdlib>
#include <memory>
#include <numeric>
#include <random>

#include "doctest.h"
#include "hspsim/checks.hpp"
#include "hspsim/dense.hpp"
#include "hspsim/errors.hpp"

using namespace hspsim;

namespace {

CatalogRef catalog_of(const char* spec) {
  return std::make_shared<const SubgroupCatalog>(enumerate_subgroups(build_group(spec)));
}

OutcomeDistribution branch_distribution(const CatalogRef& catalog, const Subgroup& H, int s) {
  HiddenOracle oracle(catalog->group, H);
  return first_register_distribution(run_cascade(prepare_initial(catalog->group, oracle, s,
                                                                 catalog)));
}

}  // namespace

TEST_CASE("dense reference agrees with the branch representation") {
  SUBCASE("Z:2 trivial hidden subgroup, s = 2") {
    const auto catalog = catalog_of("Z:2");
    const Subgroup H = trivial_subgroup(catalog->group);
    const auto dense = dense_reference_distribution(catalog->group, H, 2, catalog);
    CHECK(dense.prob == branch_distribution(catalog, H, 2).prob);
    CHECK(dense.prob.at(1) == rat(1, 4));
    CHECK(dense.prob.at(2) == rat(3, 4));
  }
  SUBCASE("Z:4, every hidden subgroup, s = 3") {
    const auto catalog = catalog_of("Z:4");
    for (const auto& H : catalog->subgroups) {
      CAPTURE(H.order());
      const auto dense = dense_reference_distribution(catalog->group, H, 3, catalog);
      CHECK(dense.prob == branch_distribution(catalog, H, 3).prob);
    }
  }
  SUBCASE("S:3, every hidden subgroup, s = 2") {
    const auto catalog = catalog_of("S:3");
    for (const auto& H : catalog->subgroups) {
      CAPTURE(H.order());
      const auto dense = dense_reference_distribution(catalog->group, H, 2, catalog);
      CHECK(dense.prob == branch_distribution(catalog, H, 2).prob);
    }
  }
}

TEST_CASE("distributions are independent of the transversal choice") {
  const auto catalog = catalog_of("S:3");
  const Subgroup H = catalog->subgroups[2];  // an order-2 subgroup
  const auto reference = dense_reference_distribution(catalog->group, H, 2, catalog);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 4; ++trial) {
    DenseOptions opts;
    for (int i = 0; i < catalog->size(); ++i)
      opts.transversals.push_back(
          random_left_transversal(catalog->group, catalog->subgroups[i], rng()));
    CHECK(dense_reference_distribution(catalog->group, H, 2, catalog, opts).prob ==
          reference.prob);
  }
}

TEST_CASE("distributions are independent of the labeling") {
  const auto catalog = catalog_of("Z:6");
  const Subgroup H = make_subgroup(catalog->group, {0, 3});
  const auto reference = dense_reference_distribution(catalog->group, H, 2, catalog);
  const HiddenOracle oracle(catalog->group, H);

  std::vector<int> perm(oracle.label_count());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    std::shuffle(perm.begin(), perm.end(), rng);
    DenseOptions opts;
    for (int g = 0; g < catalog->group.order(); ++g)
      opts.labels.push_back(perm[oracle.peek_label(g)]);
    CHECK(dense_reference_distribution(catalog->group, H, 2, catalog, opts).prob ==
          reference.prob);
  }
}

TEST_CASE("label overrides must stay strictly periodic") {
  const auto catalog = catalog_of("Z:6");
  const Subgroup H = make_subgroup(catalog->group, {0, 3});
  DenseOptions opts;
  opts.labels = {0, 1, 2, 0, 1, 1};  // collapses two cosets
  CHECK_THROWS_AS(dense_reference_distribution(catalog->group, H, 2, catalog, opts),
                  UsageError);
  opts.labels = {0, 1};  // wrong length
  CHECK_THROWS_AS(dense_reference_distribution(catalog->group, H, 2, catalog, opts),
                  UsageError);
}

TEST_CASE("amplitude cap") {
  const auto catalog = catalog_of("Z:4");
  const Subgroup H = trivial_subgroup(catalog->group);

  SUBCASE("a tiny cap rejects the run") {
    DenseOptions opts;
    opts.amplitude_cap = 100;
    CHECK_THROWS_AS(dense_reference_distribution(catalog->group, H, 2, catalog, opts),
                    CapError);
  }
  SUBCASE("environment variable drives the default") {
    setenv("HSPSIM_DENSE_CAP", "12345", 1);
    CHECK(default_dense_cap() == 12345);
    setenv("HSPSIM_DENSE_CAP", "bogus", 1);
    CHECK_THROWS_AS(default_dense_cap(), UsageError);
    unsetenv("HSPSIM_DENSE_CAP");
    CHECK(default_dense_cap() == (1LL << 20));
  }
}

TEST_CASE("dense equivalence sweep over a small catalog") {
  const auto catalog = catalog_of("Z:3");
  const CheckResult res = check_dense_equivalence(catalog, 4, 1 << 20, 3);
  INFO(res.detail);
  CHECK(res.pass);
}
