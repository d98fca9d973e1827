// Copyright 2026 The accmfg Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ACCMFG_CLI_LIB_HPP
#define ACCMFG_CLI_LIB_HPP

#include <optional>
#include <string>
#include <vector>

#include "accmfg/json_io.hpp"
#include "accmfg/mfg.hpp"

namespace accmfg::cli {

/// Exit codes: 0 pass, 2 config error, 3 solver non-convergence,
/// 4 internal invariant violation.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNotConverged = 3;
inline constexpr int kExitInvariantViolation = 4;

struct RunConfig {
  std::string problem_name = "well";
  CostParams problem_params;
  std::string terminal_name = "zero";
  CostParams terminal_params;
  PhaseGrid::Spec grid;

  double lp_tol = 1e-9;
  double mfg_tol = 1e-4;
  int max_iterations = 400;
  DampingSchedule damping{DampingSchedule::Kind::fixed, 0.5};
  std::vector<double> delta_list{0.2, 0.1, 0.05};
  std::vector<double> horizon_list{8.0, 16.0, 32.0};
  std::vector<double> truncation_list{4.0, 16.0, 64.0};
  std::vector<double> v_max_sweep;
  double gap_threshold = 0.15;
  std::vector<std::string> initializations{"uniform", "rest"};
  std::string m0_type = "rest_dirac";  // rest_dirac | uniform | uniform_x_rest
  Vec m0_x{0.0, 0.0};

  std::string output_dir = "out";
  std::vector<std::string> formats{"csv", "json"};
  int threads = 1;
  unsigned seed = 12345;

  /// Canonical JSON form (defaults filled in); round-trips losslessly.
  json to_json() const;
};

/// Parses and validates. Error strings carry JSON-pointer-style locations,
/// e.g. "/grid/n_v: must be odd". An empty error list means valid.
std::optional<RunConfig> parse_config(const json& j,
                                      std::vector<std::string>* errors);
std::optional<RunConfig> load_config(const std::string& path,
                                     std::vector<std::string>* errors);

GridMeasure initial_measure(const RunConfig& cfg, const PhaseGrid& grid);

/// Writes <dir>/manifest.json: config hash, tool version, grid summary.
/// Contains nothing volatile, so identical configs give identical bytes.
void write_manifest(const RunConfig& cfg, const std::string& dir,
                    const std::string& command);

/// Subcommand drivers. Each writes its reports under cfg.output_dir and
/// returns an exit code.
int cmd_validate_config(const RunConfig& cfg);
int cmd_ergodic_constant(const RunConfig& cfg);
int cmd_mfg_ergodic(const RunConfig& cfg);
int cmd_mfg_longtime(const RunConfig& cfg);
int cmd_selftest(const RunConfig& cfg);

}  // namespace accmfg::cli

#endif  // ACCMFG_CLI_LIB_HPP
