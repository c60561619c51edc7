#include "doctest.h"
#include "hspsim/report.hpp"

using namespace hspsim;

TEST_CASE("parse_config") {
  SUBCASE("simulate with explicit parameters") {
    const RunConfig cfg =
        parse_config({"simulate", "--group", "Z:6", "--hidden", "0,3", "--s", "10"});
    CHECK(cfg.mode == "simulate");
    CHECK(cfg.group_spec == "Z:6");
    CHECK(cfg.hidden_spec == "0,3");
    CHECK(cfg.s_override == 10);
    CHECK(cfg.format == "json");
  }
  SUBCASE("identify over every subgroup") {
    const RunConfig cfg = parse_config({"identify", "--group", "S:3", "--hidden", "all"});
    CHECK(cfg.mode == "identify");
    CHECK(cfg.hidden_spec == "all");
  }
  SUBCASE("odd s is a usage error") {
    CHECK_THROWS_AS(parse_config({"simulate", "--group", "Z:2", "--hidden", "0", "--s", "3"}),
                    UsageError);
  }
  SUBCASE("unknown flags and modes are usage errors") {
    CHECK_THROWS_AS(parse_config({"simulate", "--group", "Z:2", "--hidden", "0", "--bogus"}),
                    UsageError);
    CHECK_THROWS_AS(parse_config({"explode", "--group", "Z:2"}), UsageError);
    CHECK_THROWS_AS(parse_config({}), UsageError);
  }
  SUBCASE("missing required flags") {
    CHECK_THROWS_AS(parse_config({"simulate", "--hidden", "0"}), UsageError);
    CHECK_THROWS_AS(parse_config({"identify", "--group", "Z:6"}), UsageError);
  }
  SUBCASE("eps must be a rational in (0,1)") {
    const RunConfig cfg =
        parse_config({"simulate", "--group", "Z:2", "--hidden", "0", "--eps", "1/8"});
    CHECK(*cfg.eps == rat(1, 8));
    CHECK_THROWS_AS(
        parse_config({"simulate", "--group", "Z:2", "--hidden", "0", "--eps", "9/8"}),
        UsageError);
  }
  SUBCASE("bad format") {
    CHECK_THROWS_AS(parse_config({"subgroups", "--group", "Z:2", "--format", "xml"}),
                    UsageError);
  }
}

TEST_CASE("matrix mode emits the frozen Z:2 matrix") {
  RunConfig cfg;
  cfg.mode = "matrix";
  cfg.group_spec = "Z:2";
  cfg.s_override = 2;
  const Report report = execute(cfg);
  CHECK(report.payload["M"] ==
        Json::parse(R"([["1/1","0/1"],["1/4","3/4"]])"));
  CHECK(report.payload["s"] == 2);

  SUBCASE("csv flattens the matrix row-major") {
    const std::string csv = serialize(report, "csv");
    CHECK(csv ==
          "row,col,value\n"
          "0,0,1/1\n"
          "0,1,0/1\n"
          "1,0,1/4\n"
          "1,1,3/4\n");
  }
}

TEST_CASE("identify mode returns the sanitized generating set") {
  RunConfig cfg;
  cfg.mode = "identify";
  cfg.group_spec = "Z:6";
  cfg.hidden_spec = "0,3";
  const Report report = execute(cfg);
  CHECK(report.payload["subgroup"] == Json::parse("[3]"));
  CHECK(report.payload["members"] == Json::parse("[0,3]"));
  CHECK(report.payload["rounds"] == 2);
  CHECK(report.ledger["total"] == 98);  // 3*16*2 + 1 + 1
}

TEST_CASE("simulate mode reports distribution, sample, and ledger") {
  RunConfig cfg;
  cfg.mode = "simulate";
  cfg.group_spec = "Z:2";
  cfg.hidden_spec = "0";
  cfg.s_override = 2;
  cfg.seed = 7;
  const Report report = execute(cfg);
  CHECK(report.payload["distribution"] == Json::parse(R"({"1":"1/4","2":"3/4"})"));
  CHECK(report.ledger["phases"]["prepare"] == 2);
  const int sample = report.payload["sample"].get<int>();
  CHECK((sample == 1 || sample == 2));

  SUBCASE("debug branch dump") {
    cfg.debug_branches = true;
    const Report dbg = execute(cfg);
    CHECK(dbg.payload.contains("branches"));
    CHECK(!dbg.payload["branches"].empty());
  }
}

TEST_CASE("hidden=all fans out in catalog order") {
  RunConfig cfg;
  cfg.mode = "decide-trivial";
  cfg.group_spec = "S:3";
  cfg.hidden_spec = "all";
  const Report report = execute(cfg);
  REQUIRE(report.payload["instances"].size() == 6);
  CHECK(report.payload["instances"][0]["nontrivial"] == true);   // whole group first
  CHECK(report.payload["instances"][5]["nontrivial"] == false);  // trivial last
}

TEST_CASE("reports are byte-identical across repeated runs") {
  RunConfig cfg;
  cfg.mode = "simulate";
  cfg.group_spec = "Z:6";
  cfg.hidden_spec = "0,3";
  cfg.s_override = 4;
  cfg.seed = 3;
  for (const char* format : {"json", "csv"}) {
    cfg.format = format;
    const std::string a = serialize(execute(cfg), format);
    const std::string b = serialize(execute(cfg), format);
    CHECK(a == b);
    CHECK(!a.empty());
  }
}

TEST_CASE("empty payload still serializes to a valid skeleton") {
  Report blank;
  blank.ledger = nullptr;
  const std::string out = serialize(blank, "json");
  const Json parsed = Json::parse(out);
  CHECK(parsed.contains("config"));
  CHECK(parsed.contains("payload"));
  CHECK(parsed["ledger"].is_null());
  CHECK(serialize(blank, "csv") == "key,value\n");
}

TEST_CASE("verify mode aggregates named checks") {
  RunConfig cfg;
  cfg.mode = "verify";
  cfg.group_spec = "Z:2";
  const Report report = execute(cfg);
  CHECK(!report.checks.empty());
  for (const auto& check : report.checks) {
    CAPTURE(check.name);
    CHECK(check.pass);
  }
  CHECK(report.payload["failed"].empty());
}
