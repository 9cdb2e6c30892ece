#ifndef BLOCHINV_CLI_HPP
#define BLOCHINV_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace bloch::cli {

// Runs the command line given as argv (without the program name).
// Exit codes: 0 success, 1 domain error (staged message on err),
// 2 usage error. Byte-identical output for identical invocations.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace bloch::cli

#endif  // BLOCHINV_CLI_HPP
