#pragma once

#include <optional>
#include <string>

#include "modglue/impl.hpp"
#include "modglue/keys.hpp"
#include "modglue/runtime.hpp"

// The file-server ecosystem as a config definition: signatures, device
// combinators, key-dependent defaults and the runtime factories.

namespace modglue::fileserver {

SignatureType store_type();
SignatureType network_type();

struct Keys {
  KeySpec store;  // crunch | direct, configure-only
  KeySpec fs;     // source directory, configure-only
  KeySpec port;   // -p/--port, both stages

  static Keys declare(KeyRegistry& registry);
};

ImplExpr direct(const KeySpec& fs);
ImplExpr crunch(const KeySpec& fs);
ImplExpr netstore();
/// `name` defaults to "tcpip"; a different name gives a separate listener.
ImplExpr tcpip(const KeySpec& port, std::optional<std::string> name = {});
ImplExpr http();
ImplExpr make_server();

/// port is 80 or 8080
KeyValue is_http(const KeySpec& port);

ImplExpr default_store(const Keys& keys);
ImplExpr default_network(const Keys& keys);

/// make_server $ direct $ (http $ tcpip), without keyed switches.
AppConfig static_config();
/// make_server $ default_store $ default_network, both keyed.
AppConfig full_config();

void register_factories(FactoryRegistry& registry);

}  // namespace modglue::fileserver
