// Copyright 2026 The QFL-HEP Authors
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
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qfl::app {

/// Exit codes of the `qfl` executable.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1, ///< runtime, training or failed selftest
    kExitUsage = 2,   ///< bad flags or configuration
    kExitIo = 3,      ///< unreadable input or unwritable output
};

/// Environment variable that overrides the worker count.
inline constexpr const char *kWorkersEnv = "QFL_WORKERS";

/// Entry point of `qfl`; args[0] is the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace qfl::app
