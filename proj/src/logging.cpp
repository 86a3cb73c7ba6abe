#include "crl/logging.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace crl::log {

namespace {

Level level_from_env() {
  const char* env = std::getenv("CRL_LOG");
  if (env == nullptr) return Level::warn;
  if (std::strcmp(env, "error") == 0) return Level::error;
  if (std::strcmp(env, "warn") == 0) return Level::warn;
  if (std::strcmp(env, "info") == 0) return Level::info;
  if (std::strcmp(env, "debug") == 0) return Level::debug;
  return Level::warn;
}

std::atomic<int>& current() {
  static std::atomic<int> lvl{static_cast<int>(level_from_env())};
  return lvl;
}

void emit(const char* tag, const std::string& msg) {
  std::fprintf(stderr, "[crl %s] %s\n", tag, msg.c_str());
}

}  // namespace

Level level() { return static_cast<Level>(current().load()); }
void set_level(Level lvl) { current().store(static_cast<int>(lvl)); }

void error(const std::string& msg) { emit("error", msg); }

void warn(const std::string& msg) {
  if (level() >= Level::warn) emit("warn", msg);
}

void info(const std::string& msg) {
  if (level() >= Level::info) emit("info", msg);
}

void debug(const std::string& msg) {
  if (level() >= Level::debug) emit("debug", msg);
}

}  // namespace crl::log
