#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hspsim/checks.hpp"
#include "hspsim/errors.hpp"
#include "json.hpp"

namespace hspsim {

using Json = nlohmann::ordered_json;

// Raised by parse_config when the user asked for --help; the message is the
// help text itself.
struct HelpRequested : Error {
  using Error::Error;
};

struct RunConfig {
  std::string mode;
  std::string group_spec;
  std::string hidden_spec;  // member list "0,3", "all", or empty
  int s_override = 0;       // 0 = mode default; must be even and >= 2 when set
  std::optional<Rational> eps;
  std::uint64_t seed = 0;
  std::string format = "json";
  long long dense_cap = 0;  // 0 = HSPSIM_DENSE_CAP env or 2^20
  int s_cap = 4096;
  bool debug_branches = false;
  bool timing = false;
};

// argv without the program name.  Throws UsageError naming the offending flag.
RunConfig parse_config(const std::vector<std::string>& args);

struct Report {
  Json config;
  Json payload;
  Json ledger;  // null when the mode consumed no oracle queries
  std::vector<CheckResult> checks;
  double wall_ms = 0;  // measured but kept out of the canonical byte stream
};

Report execute(const RunConfig& cfg);

// Deterministic bytes: identical configs serialize identically.
std::string serialize(const Report& report, const std::string& format);

// Exit codes: 0 success, 1 usage error, 2 invariant failure, 3 resource cap.
int run_cli(int argc, char** argv);

}  // namespace hspsim
