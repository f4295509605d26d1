// Copyright 2026 The ptree-engine Authors
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

#ifndef PTREE_TOOLS_CLI_HPP_
#define PTREE_TOOLS_CLI_HPP_

#include <iosfwd>
#include <span>
#include <string>

namespace ptree::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kUsageError = 2,
};

// Runs one `ptree` invocation. args excludes the program name.
int run(std::span<const std::string> args, std::ostream& out,
        std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace ptree::cli

#endif  // PTREE_TOOLS_CLI_HPP_
