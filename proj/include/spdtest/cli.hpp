#ifndef SPDTEST_CLI_HPP
#define SPDTEST_CLI_HPP

#include <string>
#include <vector>

namespace spdtest {

/// Run the command-line front end on argv (program name excluded).
/// Exit codes: 0 success, 1 usage error, 2 data/validation error,
/// 3 numerical failure.
int dispatch(const std::vector<std::string>& args);

}  // namespace spdtest

#endif  // SPDTEST_CLI_HPP
