// Copyright 2026 The rwre-boundary Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Batch front end. A run is a JSON config plus command-line overrides; every
// command returns a list of flat JSON records that are written either as one
// JSON document or as long-format CSV (see docs/csv_schema.md).

#ifndef RWRE_CLI_HPP_
#define RWRE_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwre/environment.hpp"
#include "rwre/exact_kernel.hpp"
#include "rwre/geometry.hpp"

namespace rwre::cli {

using Json = nlohmann::json;

enum class ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kValidation = 2,
  kResourceLimit = 3,
  kNumerical = 4,
};

struct RunConfig {
  int d = 4;
  Face face;
  JumpLaw alpha;
  EtaLaw eta;
  double eps = 0.0;
  std::vector<double> eps_grid;
  int n = 6;
  std::vector<int> n_list{2, 4, 8};
  ProjectedVector theta;
  std::vector<ProjectedVector> theta_grid;   // green: defaults to {theta}
  std::optional<std::vector<double>> delta;  // defaults to the face minimizer
  std::optional<Composition> counts;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  int green_j = 1000;
  std::size_t runs = 10000;
  std::optional<double> tau;
  std::optional<double> eps_prime;
  std::optional<Mode> mode;
  std::uint64_t assignment_budget = kDefaultAssignmentBudget;
  bool oracle = false;
  bool trajectory = false;
  int workers = 1;
  std::size_t budget_bytes = kDefaultBudgetBytes;
  std::string format = "json";
  std::string out;

  /// The effective config, with defaults filled in; hashed into every record.
  Json canonical;
  std::string hash;
};

/// Parses and validates a config, including the alpha and eta laws.
/// Throws ValidationError.
RunConfig ParseRunConfig(const Json& raw);

/// FNV-1a 64-bit of the compact dump, as 16 hex digits.
std::string ConfigHash(const Json& canonical);

std::vector<Json> CmdRate(const RunConfig& config);
std::vector<Json> CmdExact(const RunConfig& config);
std::vector<Json> CmdGreen(const RunConfig& config);
std::vector<Json> CmdPhase(const RunConfig& config);
std::vector<Json> CmdSimulate(const RunConfig& config);
/// Reports the eta law checks; the caller exits with kValidation when "ok" is false.
std::vector<Json> CmdValidate(const Json& raw);

void WriteJson(std::ostream& out, const std::vector<Json>& records);
/// Long format: one row per (record, field).
void WriteCsv(std::ostream& out, const std::vector<Json>& records);
/// Wide D_n(eps) table for phase runs: rows eps, one value and stderr column
/// per n.
void WritePhaseTableCsv(std::ostream& out, const std::vector<Json>& records);

/// Full command-line entry point; returns the process exit code.
int Main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rwre::cli

#endif  // RWRE_CLI_HPP_
