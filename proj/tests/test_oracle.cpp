#include "doctest.h"
#include "hspsim/errors.hpp"
#include "hspsim/oracle.hpp"

using namespace hspsim;

TEST_CASE("canonical labelings") {
  const FiniteGroup z2 = build_group("Z:2");
  CHECK(HiddenOracle(z2, trivial_subgroup(z2)).labels() == std::vector<int>{0, 1});
  CHECK(HiddenOracle(z2, whole_group(z2)).labels() == std::vector<int>{0, 0});

  const FiniteGroup z6 = build_group("Z:6");
  HiddenOracle oracle(z6, make_subgroup(z6, {0, 3}));
  CHECK(oracle.labels() == std::vector<int>{0, 1, 2, 0, 1, 2});
  CHECK(oracle.label_count() == 3);
  CHECK(oracle.peek_label(0) == oracle.peek_label(3));

  CHECK_THROWS_AS(HiddenOracle(z6, Subgroup{{0, 1}, 6}), UsageError);
}

TEST_CASE("query accounting") {
  const FiniteGroup z6 = build_group("Z:6");
  HiddenOracle oracle(z6, make_subgroup(z6, {0, 3}));
  CHECK(oracle.ledger().total == 0);
  CHECK(oracle.query(0) == 0);  // identity lands in H's coset
  CHECK(oracle.ledger().total == 1);
  const int a = oracle.query(4);
  const int b = oracle.query(4);
  CHECK(a == b);
  CHECK(oracle.ledger().total == 3);
  CHECK(oracle.query(3) == oracle.peek_label(0));  // g in H shares the identity's label
  CHECK(oracle.ledger().total == 4);
  CHECK(oracle.ledger().phases.at("query") == 4);
  CHECK_THROWS_AS(oracle.query(6), UsageError);
}

TEST_CASE("strictness on every subgroup of the builtin groups") {
  for (const char* spec : {"Z:2", "Z:6", "S:3", "D:4", "Q8"}) {
    CAPTURE(spec);
    const FiniteGroup G = build_group(spec);
    for (const auto& H : enumerate_subgroups(G).subgroups) {
      HiddenOracle oracle(G, H);
      for (int g = 0; g < G.order(); ++g)
        for (int h = 0; h < G.order(); ++h) {
          const bool same_coset = H.contains(G.mul(G.inv(g), h));
          CHECK((oracle.peek_label(g) == oracle.peek_label(h)) == same_coset);
        }
    }
  }
}

TEST_CASE("sanitize_output") {
  const FiniteGroup z6 = build_group("Z:6");

  SUBCASE("empty input still pays the reference query") {
    HiddenOracle oracle(z6, make_subgroup(z6, {0, 3}));
    CHECK(sanitize_output(oracle, {}).empty());
    CHECK(oracle.ledger().total == 1);
    CHECK(oracle.ledger().phases.at("sanitize") == 1);
  }
  SUBCASE("subset of H passes through") {
    HiddenOracle oracle(z6, make_subgroup(z6, {0, 3}));
    CHECK(sanitize_output(oracle, {0, 3}) == std::vector<int>{0, 3});
    CHECK(oracle.ledger().total == 3);
  }
  SUBCASE("intersection with H") {
    HiddenOracle oracle(z6, make_subgroup(z6, {0, 3}));
    CHECK(sanitize_output(oracle, {2, 3}) == std::vector<int>{3});
    CHECK(oracle.ledger().total == 3);
  }
}
