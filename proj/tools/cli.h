#ifndef GSQ_TOOLS_CLI_H_
#define GSQ_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace gsq {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitValidation = 3,
};

// Runs the command line tool; argv[0] is the program name.
int RunCli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace gsq

#endif  // GSQ_TOOLS_CLI_H_
