// Copyright 2026 The wbtrack Authors
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

#ifndef WBT_APP_CLI_HPP_
#define WBT_APP_CLI_HPP_

#include <exception>
#include <ostream>

namespace wbt::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitConfig = 2,
  kExitDependency = 3,
  kExitDivergence = 4,
};

// Maps an exception to its exit code.
int exit_code_for(const std::exception& e);

// Entry point of the wbtrack tool. Never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace wbt::app

#endif  // WBT_APP_CLI_HPP_
