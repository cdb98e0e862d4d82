// Command-line driver bundling the file-server config definitions.
#include <csignal>
#include <cstring>
#include <iostream>
#include <map>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include "modglue/cli.hpp"
#include "modglue/fileserver/config.hpp"

namespace {

const std::map<std::string, modglue::ConfigDefinition>& definitions() {
  static const std::map<std::string, modglue::ConfigDefinition> defs{
      {"fileserver", {"fileserver", modglue::fileserver::full_config}},
      {"fileserver-static", {"fileserver-static", modglue::fileserver::static_config}},
  };
  return defs;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);

  std::string config = "fileserver";
  for (auto it = args.begin(); it != args.end();) {
    if (*it == "--config" && it + 1 != args.end()) {
      config = *(it + 1);
      it = args.erase(it, it + 2);
    } else if (it->rfind("--config=", 0) == 0) {
      config = it->substr(9);
      it = args.erase(it);
    } else {
      ++it;
    }
  }
  auto def = definitions().find(config);
  if (def == definitions().end()) {
    std::cerr << "modglue: unknown config '" << config << "' (available:";
    for (const auto& [name, _] : definitions()) std::cerr << ' ' << name;
    std::cerr << ")\n";
    return modglue::exit_code::usage;
  }

  // SIGINT/SIGTERM become a stop request, handled on a dedicated thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::stop_source stop;
  std::jthread watcher([&](std::stop_token self) {
    timespec tick{0, 100'000'000};
    while (!self.stop_requested()) {
      if (sigtimedwait(&signals, nullptr, &tick) > 0) {
        stop.request_stop();
        return;
      }
    }
  });

  modglue::FactoryRegistry factories;
  modglue::fileserver::register_factories(factories);
  modglue::CliContext ctx{def->second, factories, std::cout, std::cerr, stop.get_token()};
  return modglue::run_cli(args, ctx);
}
