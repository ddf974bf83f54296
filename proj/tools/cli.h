// Command-line front end. Each subcommand binds one library operation.
#pragma once

#include <iosfwd>

namespace relight::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;  // bad flags or arguments
inline constexpr int exit_data = 3;   // unreadable or invalid data
inline constexpr int exit_internal = 4;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace relight::cli
