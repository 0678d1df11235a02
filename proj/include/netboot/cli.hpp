#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace netboot {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);  // args[0] is the program name

}  // namespace netboot
