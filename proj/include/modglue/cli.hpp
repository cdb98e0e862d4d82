#pragma once

#include <functional>
#include <ostream>
#include <span>
#include <stop_token>
#include <string>
#include <vector>

#include "modglue/impl.hpp"
#include "modglue/runtime.hpp"

namespace modglue {

/// A loadable config definition: evaluating `define` builds the app.
struct ConfigDefinition {
  std::string name;
  std::function<AppConfig()> define;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 2;       // flag or command-line syntax
inline constexpr int definition = 3;  // ill-typed or malformed config definition
inline constexpr int keys = 4;        // key resolution, switch selection
inline constexpr int stale = 5;       // missing or outdated configuration
inline constexpr int device = 6;      // hook or device start failure
inline constexpr int unregistered = 7;
}  // namespace exit_code

struct CliContext {
  ConfigDefinition config;
  const FactoryRegistry& factories;
  std::ostream& out;
  std::ostream& err;
  std::stop_token stop;
};

/// `[--build-dir DIR] <command> [flags]` with commands configure, describe,
/// build, run, graph and clean. Returns the process exit status.
int run_cli(std::span<const std::string> args, const CliContext& ctx);

}  // namespace modglue
