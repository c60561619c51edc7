#include "hspsim/report.hpp"

#include <chrono>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

namespace hspsim {

namespace {

const std::vector<std::string> kModes = {"subgroups",      "simulate",  "matrix", "identify",
                                         "decide-trivial", "one-sided", "verify"};

bool mode_needs_hidden(const std::string& mode) {
  return mode == "simulate" || mode == "identify" || mode == "decide-trivial" ||
         mode == "one-sided";
}

std::vector<int> parse_member_list(const std::string& text) {
  std::vector<int> members;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      members.push_back(std::stoi(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--hidden: malformed member id \"" + item + "\"");
    }
  }
  if (members.empty()) throw UsageError("--hidden: empty member list");
  return members;
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"hspsim: exact simulator of the polynomial-query hidden-subgroup algorithm"};
  app.require_subcommand(1);

  std::string eps_text;
  for (const auto& mode : kModes) {
    auto* sub = app.add_subcommand(mode);
    sub->add_option("--group,-g", cfg.group_spec,
                    "group spec: Z:<n>, Z2^<k>, D:<n>, S:<n>, Q8, or inline JSON");
    sub->add_option("--hidden", cfg.hidden_spec, "hidden subgroup members \"0,3\" or \"all\"");
    sub->add_option("--s", cfg.s_override, "couplet count override (even, >= 2)");
    sub->add_option("--eps", eps_text, "error budget for simulate mode, as \"p/q\"");
    sub->add_option("--seed", cfg.seed, "RNG seed for sampling");
    sub->add_option("--format", cfg.format, "output format: json or csv");
    sub->add_option("--dense-cap", cfg.dense_cap,
                    "dense-simulator amplitude cap (default env HSPSIM_DENSE_CAP or 2^20)");
    sub->add_option("--s-cap", cfg.s_cap, "escalation ceiling for s");
    sub->add_flag("--debug-branches", cfg.debug_branches, "include a branch dump in the payload");
    sub->add_flag("--timing", cfg.timing, "report wall time on stderr");
    sub->callback([&cfg, mode] { cfg.mode = mode; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (!eps_text.empty()) {
    cfg.eps = rat_parse(eps_text);
    if (sgn(*cfg.eps) <= 0 || *cfg.eps >= 1) throw UsageError("--eps must be in (0,1)");
  }
  if (cfg.s_override != 0 && (cfg.s_override < 2 || cfg.s_override % 2 != 0))
    throw UsageError("--s must be even and at least 2");
  if (cfg.format != "json" && cfg.format != "csv")
    throw UsageError("--format must be json or csv");
  if (cfg.s_cap < 2) throw UsageError("--s-cap must be at least 2");
  if (cfg.mode != "verify" && cfg.group_spec.empty())
    throw UsageError("--group is required for mode " + cfg.mode);
  if (mode_needs_hidden(cfg.mode) && cfg.hidden_spec.empty())
    throw UsageError("--hidden is required for mode " + cfg.mode);
  return cfg;
}

namespace {

Json subgroup_json(const Subgroup& K) { return Json(K.members); }

Json ledger_json(const QueryLedger& ledger) {
  Json phases = Json::object();
  for (const auto& [phase, count] : ledger.phases) phases[phase] = count;
  return Json{{"total", ledger.total}, {"phases", phases}};
}

Json distribution_json(const OutcomeDistribution& dist) {
  Json out = Json::object();
  for (const auto& [nu, p] : dist.prob) out[std::to_string(nu)] = rat_str(p);
  return out;
}

Json rational_array(const std::vector<Rational>& values) {
  Json out = Json::array();
  for (const auto& q : values) out.push_back(rat_str(q));
  return out;
}

Json transcript_json(const std::vector<RoundTranscript>& transcript) {
  Json out = Json::array();
  for (const auto& round : transcript) {
    out.push_back(Json{{"live", {round.live_lo, round.live_hi}},
                       {"split", round.split},
                       {"y", rational_array(round.y)},
                       {"x", rational_array(round.x)},
                       {"p", rat_str(round.p)},
                       {"amplified", rat_str(round.amplified)},
                       {"bit", round.bit},
                       {"queries", round.queries}});
  }
  return out;
}

Json branches_json(const BranchState& state) {
  Json out = Json::array();
  for (const auto& b : state.branches) {
    Json phi = Json::array();
    for (const auto& q : b.phi) phi.push_back(rat_str(q));
    out.push_back(Json{{"nu", b.nu}, {"ell", b.ell}, {"coeff", rat_str(b.coeff)}, {"phi", phi}});
  }
  return out;
}

std::vector<Subgroup> resolve_hidden(const FiniteGroup& G, const SubgroupCatalog& catalog,
                                     const std::string& spec) {
  if (spec == "all") return catalog.subgroups;
  return {make_subgroup(G, parse_member_list(spec))};
}

int default_simulate_s(int r, const std::optional<Rational>& eps) {
  return choose_s_bounded(r, eps ? *eps : rat(1, 100));
}

}  // namespace

Report execute(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Report report;
  report.config = Json{{"mode", cfg.mode},
                       {"group", cfg.group_spec},
                       {"hidden", cfg.hidden_spec},
                       {"s", cfg.s_override},
                       {"eps", cfg.eps ? Json(rat_str(*cfg.eps)) : Json(nullptr)},
                       {"seed", cfg.seed},
                       {"format", cfg.format},
                       {"dense_cap", cfg.dense_cap > 0 ? cfg.dense_cap : default_dense_cap()},
                       {"s_cap", cfg.s_cap},
                       {"debug_branches", cfg.debug_branches}};
  report.ledger = nullptr;

  EngineOptions engine;
  engine.s_override = cfg.s_override;
  engine.s_cap = cfg.s_cap;

  if (cfg.mode == "verify") {
    VerifyOptions opts;
    opts.dense_cap = cfg.dense_cap;
    opts.seed = cfg.seed == 0 ? 1 : cfg.seed;
    opts.engine = engine;
    const std::vector<std::string> specs =
        cfg.group_spec.empty() ? builtin_catalog_specs() : std::vector<std::string>{cfg.group_spec};
    Json groups = Json::object();
    Json failed = Json::array();
    for (const auto& spec : specs) {
      const FiniteGroup G = build_group(spec);
      Json entries = Json::array();
      for (const auto& check : verify_group(G, opts)) {
        entries.push_back(
            Json{{"name", check.name}, {"pass", check.pass}, {"detail", check.detail}});
        if (!check.pass) failed.push_back(spec + ":" + check.name);
        report.checks.push_back(check);
      }
      groups[spec] = entries;
    }
    report.payload = Json{{"groups", groups}, {"failed", failed}};
    report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                               start)
                         .count();
    return report;
  }

  const FiniteGroup G = build_group(cfg.group_spec);
  auto catalog = std::make_shared<const SubgroupCatalog>(enumerate_subgroups(G));
  const int r = catalog->size();

  if (cfg.mode == "subgroups") {
    Json names = Json::array();
    for (int g = 0; g < G.order(); ++g) names.push_back(G.name(g));
    Json subs = Json::array();
    for (int i = 0; i < r; ++i) {
      subs.push_back(Json{{"mu", i + 1},
                          {"order", catalog->subgroups[i].order()},
                          {"members", subgroup_json(catalog->subgroups[i])},
                          {"transversal", catalog->transversals[i]},
                          {"cyclic", is_cyclic(G, catalog->subgroups[i])}});
    }
    report.payload =
        Json{{"order", G.order()}, {"r", r}, {"element_names", names}, {"subgroups", subs}};
  } else if (cfg.mode == "matrix") {
    const int s = cfg.s_override > 0 ? cfg.s_override : choose_s_exact(r);
    const ConditionalMatrix m = build_conditional_matrix(G, catalog, s);
    Json rows = Json::array();
    for (const auto& row : m.rows) {
      Json cells = Json::array();
      for (const auto& q : row) cells.push_back(rat_str(q));
      rows.push_back(cells);
    }
    Json candidates = Json::array();
    for (const auto& K : catalog->subgroups) candidates.push_back(subgroup_json(K));
    report.payload = Json{{"s", s}, {"r", r}, {"M", rows}, {"candidates", candidates}};
  } else if (cfg.mode == "simulate") {
    const auto instances = resolve_hidden(G, *catalog, cfg.hidden_spec);
    const int s = cfg.s_override > 0 ? cfg.s_override : default_simulate_s(r, cfg.eps);
    Json items = Json::array();
    for (const Subgroup& hidden : instances) {
      HiddenOracle oracle(G, hidden);
      BranchState state = run_cascade(prepare_initial(G, oracle, s, catalog));
      const OutcomeDistribution dist = first_register_distribution(state);
      const int sampled = sample_outcome(dist, cfg.seed);
      Json item{{"hidden", subgroup_json(hidden)},
                {"s", s},
                {"distribution", distribution_json(dist)},
                {"sample", sampled},
                {"sample_members", subgroup_json(catalog->subgroups[sampled - 1])},
                {"ledger", ledger_json(oracle.ledger())}};
      if (cfg.debug_branches) item["branches"] = branches_json(state);
      items.push_back(std::move(item));
    }
    if (instances.size() == 1) {
      report.payload = items[0];
      report.ledger = items[0]["ledger"];
    } else {
      report.payload = Json{{"instances", items}};
    }
  } else if (cfg.mode == "identify") {
    const auto instances = resolve_hidden(G, *catalog, cfg.hidden_spec);
    const SearchPlan plan = build_search_plan(catalog, engine);
    Json items = Json::array();
    for (const Subgroup& hidden : instances) {
      HiddenOracle oracle(G, hidden);
      const IdentifyResult res = identify_subgroup(plan, oracle);
      items.push_back(Json{{"subgroup", res.generators},
                           {"members", subgroup_json(res.subgroup)},
                           {"rounds", res.rounds},
                           {"s", res.s},
                           {"transcript", transcript_json(res.transcript)},
                           {"ledger", ledger_json(oracle.ledger())}});
    }
    if (instances.size() == 1) {
      report.payload = items[0];
      report.ledger = items[0]["ledger"];
    } else {
      report.payload = Json{{"instances", items}};
    }
  } else if (cfg.mode == "decide-trivial" || cfg.mode == "one-sided") {
    const bool one_sided = cfg.mode == "one-sided";
    const auto instances = resolve_hidden(G, *catalog, cfg.hidden_spec);
    const DecisionPlan plan =
        one_sided ? build_one_sided_plan(*catalog, engine) : build_decide_plan(catalog, engine);
    Json items = Json::array();
    for (const Subgroup& hidden : instances) {
      HiddenOracle oracle(G, hidden);
      const DecisionResult res = one_sided ? one_sided_trivial(plan, oracle, cfg.seed)
                                           : decide_trivial(plan, oracle);
      Json item{{"hidden", subgroup_json(hidden)},
                {"nontrivial", res.nontrivial},
                {"deterministic", res.deterministic},
                {"p", rat_str(res.p)},
                {"amplified", rat_str(res.amplified)},
                {"bit", res.bit},
                {"s", res.s},
                {"ledger", ledger_json(oracle.ledger())}};
      if (one_sided) item["cyclic_candidates"] = plan.candidates->size();
      items.push_back(std::move(item));
    }
    if (instances.size() == 1) {
      report.payload = items[0];
      report.ledger = items[0]["ledger"];
    } else {
      report.payload = Json{{"instances", items}};
    }
  } else {
    throw UsageError("unknown mode " + cfg.mode);
  }

  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

namespace {

void flatten_json(const Json& node, const std::string& prefix, std::string& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items())
      flatten_json(value, prefix.empty() ? key : prefix + "." + key, out);
  } else if (node.is_array()) {
    int i = 0;
    for (const auto& value : node) flatten_json(value, prefix + "." + std::to_string(i++), out);
  } else {
    out += prefix;
    out += ",";
    out += node.is_string() ? node.get<std::string>() : node.dump();
    out += "\n";
  }
}

}  // namespace

std::string serialize(const Report& report, const std::string& format) {
  if (format == "json") {
    Json checks = Json::array();
    for (const auto& check : report.checks)
      checks.push_back(Json{{"name", check.name}, {"pass", check.pass}, {"detail", check.detail}});
    const Json root{{"config", report.config},
                    {"payload", report.payload},
                    {"ledger", report.ledger},
                    {"checks", checks}};
    return root.dump(2) + "\n";
  }
  if (format != "csv") throw UsageError("unknown format " + format);
  // Matrices flatten row-major as row,col,value; everything else as key,value.
  if (report.payload.is_object() && report.payload.contains("M")) {
    std::string out = "row,col,value\n";
    const auto& m = report.payload["M"];
    for (size_t i = 0; i < m.size(); ++i)
      for (size_t j = 0; j < m[i].size(); ++j)
        out += std::to_string(i) + "," + std::to_string(j) + "," +
               m[i][j].get<std::string>() + "\n";
    return out;
  }
  std::string out = "key,value\n";
  if (!report.payload.is_null()) flatten_json(report.payload, "", out);
  return out;
}

int run_cli(int argc, char** argv) {
  try {
    const std::vector<std::string> args(argv + 1, argv + argc);
    const RunConfig cfg = parse_config(args);
    const Report report = execute(cfg);
    std::cout << serialize(report, cfg.format);
    if (cfg.timing) std::cerr << "wall_ms " << report.wall_ms << "\n";
    for (const auto& check : report.checks)
      if (!check.pass) {
        std::cerr << "invariant failure: " << check.name << ": " << check.detail << "\n";
        return 2;
      }
    return 0;
  } catch (const HelpRequested& help) {
    std::cout << help.what();
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const CapError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return 3;
  } catch (const InvariantError& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hspsim
