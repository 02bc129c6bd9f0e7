// Copyright 2026 The ECW Authors
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

// Command-line front end: circle-train, circle-sweep, nego-train, report
// and plot. Failures print {"error": {"kind", "message"}} on stderr and
// return a nonzero exit code.

#ifndef ECW_CLI_CLI_H_
#define ECW_CLI_CLI_H_

#include <filesystem>
#include <ostream>

namespace ecw::cli {

enum ExitCode {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitDivergence = 4,
  kExitIo = 5,
};

// $ECW_OUT_DIR when set and non-empty, else "runs".
std::filesystem::path OutputRoot();

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace ecw::cli

#endif  // ECW_CLI_CLI_H_
