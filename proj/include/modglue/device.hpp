#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "modglue/keys.hpp"
#include "modglue/signature.hpp"
#include "modglue/value.hpp"

namespace modglue {

/// How the bundled runtime initialises a device: call the factory with the
/// initialised functor arguments (in `arg_roles` order) and the named keys.
struct ConnectRecipe {
  std::string factory_id;
  std::vector<std::string> arg_roles;
  std::vector<std::string> key_args;
};

/// What lifecycle hooks and the generated plan get to see.
struct Info {
  std::string app_name;
  std::filesystem::path build_dir;
  ResolvedKeys keys;
  PackageList packages;
  std::vector<std::string> device_names;  // topological order
};

/// A lifecycle hook. `node_name` is the name of the graph node being
/// processed, which differs from the descriptor name for generative devices.
using Hook = std::function<void(const Info& info, const std::string& node_name)>;

/// Named component descriptor. `name` identifies state (and sharing),
/// `module_name` identifies the implementation.
struct ConfigurableDevice {
  std::string name;
  std::string module_name;
  SignatureType type;
  std::vector<KeySpec> keys;
  KeyValue packages = pure(PackageList{});
  ConnectRecipe connect;
  Hook configure;
  Hook build;
  Hook clean;
  bool generative = false;
};

/// Lowercase with dots turned into underscores: "Server_modular.Make" ->
/// "server_modular_make".
std::string default_device_name(std::string_view module_name);

/// Evaluates and merges package lists: sorted by name, one entry per name,
/// constraints unioned.
PackageList merge_packages(const std::vector<PackageList>& lists);

}  // namespace modglue
