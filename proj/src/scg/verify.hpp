#pragma once

#include <string>
#include <vector>

namespace scg {

struct CriterionResult {
  std::string id;
  bool pass = false;
  std::string detail;
};

struct AcceptanceOptions {
  std::string models_dir = "models";
  std::string out_dir;   // empty: no CSV report
  bool quick = false;    // reduced path counts, looser Monte Carlo tolerances
  int threads = 1;
  std::uint64_t seed = 2026;
};

// Runs criteria A1..A10, printing one pass/fail line each; writes
// out_dir/acceptance.csv when out_dir is set.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace scg
