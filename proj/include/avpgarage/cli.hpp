#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace avpgarage {

// Exit codes: 0 ok, 1 validation / plan / construction failure, 2 I/O, schema or usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace avpgarage
