#pragma once

// The nine end-to-end acceptance checks, shared by the acceptance test binary
// and `budgetlab verify`.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace budgetlab::acceptance {

struct Options {
  std::size_t ensemble_count = 100000;  // states per ensemble (criterion 1)
  std::size_t wishart_count = 100000;   // criterion 5
  std::uint64_t seed = 20240601;
};

struct Result {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Suite names accepted by `verify --suite`, in criterion order.
const std::vector<std::string>& suite_names();
/// 1-based criterion for a suite name; nothing for unknown names ("all" is handled by callers).
std::optional<int> criterion_for(const std::string& suite);

Result run(int criterion, const Options& options);

/// Runs the listed criteria (all when empty), printing one PASS/FAIL line each.
std::vector<Result> run_all(const Options& options, std::ostream& out, const std::vector<int>& which = {});

std::string format_line(const Result& r);

}  // namespace budgetlab::acceptance
