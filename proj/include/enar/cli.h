// Copyright 2026 The enar Authors
//
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

#ifndef ENAR_CLI_H_
#define ENAR_CLI_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace enar::cli {

// Runs the `enar` command line. Returns 0 on success, 1 on an input error
// and 2 on a configuration or usage error.
int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);
// argv[0] is supplied.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// Lowercase hex SHA-256 of a file's contents.
std::string Sha256File(const std::filesystem::path& path);

// "<output>.manifest.json", written only when a stage succeeds.
std::filesystem::path ManifestPath(const std::filesystem::path& output);

}  // namespace enar::cli

#endif  // ENAR_CLI_H_
