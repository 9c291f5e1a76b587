// Copyright 2026 The lato Authors
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

#ifndef LATO_CLI_HPP_
#define LATO_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace lato::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

// Entry point of the `lato` binary. Machine output goes to `out` (or the
// --out file), diagnostics to `err`.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::vector<std::string> SubcommandNames();
// Long flag names ("--model", ...) registered for a subcommand, sorted.
std::vector<std::string> SubcommandFlags(const std::string& subcommand);

}  // namespace lato::cli

#endif  // LATO_CLI_HPP_
