#pragma once

// Serialisation: flat JSON records, versioned CSV tables, state files and the
// named builtin states shared by the CLI and the acceptance suite.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "budgetlab/budget.hpp"
#include "budgetlab/channels.hpp"
#include "budgetlab/envelopes.hpp"
#include "budgetlab/resources.hpp"

namespace budgetlab::io {

using nlohmann::json;

/// Bumped whenever a CSV column set changes.
inline constexpr int kCsvVersion = 1;

/// Shortest round-trip decimal form ("%.17g" then trimmed).
std::string fmt(double v);

json to_json(const BudgetPoint& p);
json to_json(const ResourceReport& r);
json to_json(const RegionReport& r);
json to_json(const EnvelopeCurve& c);

// CSV tables. Each starts with "# budgetlab <kind> csv v<kCsvVersion>" and a
// header row.
void write_trajectory_csv(std::ostream& os, const Trajectory& t);
void write_profile_csv(std::ostream& os, const std::vector<ProfilePoint>& pts);
void write_curve_csv(std::ostream& os, const EnvelopeCurve& c, int per_piece);
void write_cloud_header(std::ostream& os);
void write_cloud_rows(std::ostream& os, const std::string& family, const std::vector<BudgetPoint>& pts);

/// {"dims": [...], "re": [[...]], "im": [[...]]}.
json state_to_json(const DensityMatrix& rho);
/// Validates the matrix; throws DomainError on malformed documents.
DensityMatrix state_from_json(const json& doc);
DensityMatrix read_state_file(const std::string& path);
void write_state_file(const std::string& path, const DensityMatrix& rho);

/// Names accepted by builtin_state (werner takes a ":p" suffix).
const std::vector<std::string>& builtin_state_names();
bool is_builtin_state(const std::string& spec);
/// Throws DomainError for unknown names or unsupported dims.
DensityMatrix builtin_state(const std::string& spec, const DimensionProfile& dims);

}  // namespace budgetlab::io
