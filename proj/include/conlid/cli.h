// Copyright 2026 The conlid Authors.
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

#ifndef CONLID_CLI_H_
#define CONLID_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace conlid {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitInternal = 3,
};

// Runs the command line `args` (args[0] is the program name). Normal output
// goes to `out`; the resolved configuration and diagnostics go to `err`.
// Failures print a single "error: ..." line to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

// Worker threads for batch inference: CONLID_THREADS if set (>= 1), else the
// hardware concurrency.
unsigned WorkerThreads();

}  // namespace conlid

#endif  // CONLID_CLI_H_
