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

#include <CLI11.hpp>
#include <cstdio>

#include "accmfg/parallel.hpp"
#include "accmfg/version.hpp"
#include "cli_lib.hpp"

namespace {

using accmfg::cli::RunConfig;

struct CommonArgs {
  std::string config_path;
  std::string output_dir;
  int threads = 0;
  unsigned seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs* args, bool needs_config = true) {
  if (needs_config)
    cmd->add_option("config", args->config_path, "run configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
  cmd->add_option("--output-dir", args->output_dir,
                  "override the configured output directory");
  cmd->add_option("--threads", args->threads,
                  "worker count for independent sub-runs");
  cmd->add_option("--seed", args->seed, "seed for the sampled checkers")
      ->each([args](const std::string&) { args->seed_set = true; });
}

int load_and_run(const CommonArgs& args,
                 int (*runner)(const RunConfig&)) {
  std::vector<std::string> errors;
  std::optional<RunConfig> cfg =
      accmfg::cli::load_config(args.config_path, &errors);
  if (!cfg) {
    for (const std::string& e : errors)
      std::fprintf(stderr, "config error: %s\n", e.c_str());
    return accmfg::cli::kExitConfigError;
  }
  if (!args.output_dir.empty()) cfg->output_dir = args.output_dir;
  if (args.threads > 0) cfg->threads = args.threads;
  if (args.seed_set) cfg->seed = args.seed;
  accmfg::set_worker_count(1);  // sub-runs own the configured parallelism
  try {
    return runner(*cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return accmfg::cli::kExitInvariantViolation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "accmfg: ergodic constants and mean field game equilibria for "
      "acceleration-controlled dynamics on the torus"};
  app.set_version_flag("--version", accmfg::kVersion);
  app.require_subcommand(1);

  CommonArgs ec, me, ml, vc, st;
  CLI::App* c_ec = app.add_subcommand(
      "ergodic-constant",
      "three-route ergodic constant comparison (horizon, discounted, LP)");
  add_common(c_ec, &ec);
  CLI::App* c_me = app.add_subcommand(
      "mfg-ergodic", "ergodic mean field game fixed point");
  add_common(c_me, &me);
  CLI::App* c_ml = app.add_subcommand(
      "mfg-longtime", "long-time averages of the time-dependent game");
  add_common(c_ml, &ml);
  CLI::App* c_vc =
      app.add_subcommand("validate-config", "parse and validate a config");
  add_common(c_vc, &vc);
  CLI::App* c_st = app.add_subcommand(
      "selftest", "run the built-in closed-form fixtures");
  add_common(c_st, &st, false);

  CLI11_PARSE(app, argc, argv);

  if (c_ec->parsed())
    return load_and_run(ec, accmfg::cli::cmd_ergodic_constant);
  if (c_me->parsed()) return load_and_run(me, accmfg::cli::cmd_mfg_ergodic);
  if (c_ml->parsed()) return load_and_run(ml, accmfg::cli::cmd_mfg_longtime);
  if (c_vc->parsed())
    return load_and_run(vc, accmfg::cli::cmd_validate_config);
  if (c_st->parsed()) {
    RunConfig cfg;
    if (st.threads > 0) cfg.threads = st.threads;
    return accmfg::cli::cmd_selftest(cfg);
  }
  return accmfg::cli::kExitConfigError;
}
