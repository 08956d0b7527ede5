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

#pragma once

// Scenario files for the `pme` tool: JSON documents of the form
//
//   {
//     "command": "geometry-sweep",
//     "seed": 7,
//     "parameters": { "a": "62 um", "b": "50 um", "h": "50 um", "l": "100 um" },
//     "sweep": { "parameter": "l", "from": "5 um", "to": "150 um", "points": 146 }
//   }
//
// Quantities are numbers in SI units or strings with a unit suffix.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace pme::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitSchema = 2,
  kExitNumerical = 3,
  kExitIo = 4,
};

struct Diagnostic {
  std::string path;
  std::string message;
};

std::string format(const Diagnostic& d);

const std::vector<std::string>& command_names();

// Schema diagnostics for `config` run as `command`. When `command` is empty
// the document's own "command" key selects the schema.
std::vector<Diagnostic> validate_config(const nlohmann::json& config, std::string_view command = {});

struct RunOptions {
  std::string command;
  std::string config_path;
  std::string out_path;  // empty: standard output, no manifest
  std::string format;    // "csv" or "json"; empty selects the command default
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

// Executes one command and returns the process exit code.
int run(const RunOptions& options, std::ostream& out, std::ostream& err);

std::string sha256_hex(std::string_view data);

}  // namespace pme::cli
