//
// Copyright 2026 The Cleanmark Authors
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
//

#ifndef CLEANMARK_CLI_H_
#define CLEANMARK_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace cleanmark {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidConfig = 2,
  kExitRuntimeFailure = 3,
  // verify --strict-exit only.
  kExitDetected = 10,
};

// args[0] is the program name. Reports go to `out`, diagnostics to `err`.
int RunCommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cleanmark

#endif  // CLEANMARK_CLI_H_
