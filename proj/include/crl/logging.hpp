#pragma once

#include <string>

namespace crl::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

// Verbosity comes from the CRL_LOG environment variable
// (error|warn|info|debug); default is warn. Messages go to stderr so that
// report output on stdout stays machine-readable.
Level level();
void set_level(Level lvl);

void error(const std::string& msg);
void warn(const std::string& msg);
void info(const std::string& msg);
void debug(const std::string& msg);

}  // namespace crl::log
