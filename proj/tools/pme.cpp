// Copyright 2026 The pme Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "pme/cli/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pme: photon-mediated entanglement simulator"};
  app.set_version_flag("--version", PME_VERSION);
  app.require_subcommand(1);

  pme::cli::RunOptions opt;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub, bool full) {
    sub->add_option("--config", opt.config_path, "Scenario file (JSON)")->required();
    if (!full) return;
    sub->add_option("--out", opt.out_path, "Output file; a manifest is written next to it");
    sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "Seed for stochastic estimates");
    sub->add_option("--threads", opt.threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  };
  const std::map<std::string, std::string> about = {
      {"protocol-sim", "Herald table of one protocol, or a sweep of success and fidelity"},
      {"geometry-sweep", "Grating exposure fraction over trap and aperture dimensions"},
      {"grating-design", "Chirped tooth positions with fabrication flags"},
      {"rate-table", "Success probability and entanglement rate for each protocol"},
      {"tradeoff-curve", "Radial frequency against exposure along a fixed ion height"},
  };
  for (const auto& name : pme::cli::command_names()) add_common(app.add_subcommand(name, about.at(name)), true);
  add_common(app.add_subcommand("validate", "Check a scenario file against its command schema"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    return pme::cli::kExitUsage;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    opt.command = sub->get_name();
    if (const CLI::Option* o = sub->get_option_no_throw("--seed"); o && o->count()) opt.seed = seed;
  }
  return pme::cli::run(opt, std::cout, std::cerr);
}
