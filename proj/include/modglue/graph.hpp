#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "modglue/impl.hpp"
#include "modglue/keys.hpp"

namespace modglue {

// ---------------------------------------------------------------------------
// Full graph: one node per device occurrence plus round switch nodes.

struct DeviceNode {
  std::shared_ptr<const ConfigurableDevice> device;
  std::string name;  // carries a fresh suffix for generative devices
};

struct SwitchNode {
  KeyValue scrutinee;
  std::vector<Literal> labels;  // one per case branch; If uses {true, false}
  bool has_default = false;     // the last child is the default branch
  bool is_if = false;
};

struct FullNode {
  std::variant<DeviceNode, SwitchNode> content;
  /// Device: functor arguments in order. Switch: branches in case order.
  std::vector<std::size_t> children;

  bool is_switch() const { return std::holds_alternative<SwitchNode>(content); }
};

struct FullGraph {
  std::string app_name;
  std::vector<FullNode> nodes;
  std::vector<std::size_t> roots;  // one per registered job
  std::vector<KeySpec> keys;       // declared keys of the application
};

/// Structure-preserving: one DeviceNode per device leaf occurrence and one
/// SwitchNode per if_/match_. Arguments applied to a switch of functor type
/// are pushed into each branch.
FullGraph build_graph(const AppConfig& app);

// ---------------------------------------------------------------------------
// Resolved graph: switch-free DAG of devices.

struct ResolvedNode {
  std::shared_ptr<const ConfigurableDevice> device;
  std::string name;
  /// The device's keys, sorted by name, with their resolved readings.
  std::vector<std::pair<std::string, std::optional<Literal>>> key_readings;
  std::vector<std::size_t> children;
};

struct ResolvedGraph {
  std::string app_name;
  std::vector<ResolvedNode> nodes;
  std::vector<std::size_t> roots;
};

/// Replaces every switch by its selected branch, dropping the others. The
/// result is tree-shaped (no sharing). Throws ConfigureError when a match
/// has no applicable case, a scrutinee mentions a runtime-only key, or an
/// if_ condition is not boolean.
ResolvedGraph resolve_switches(const FullGraph& g, const ResolvedKeys& keys);

/// Bottom-up hash-consing on (name, module, key readings, child identities).
/// Idempotent.
ResolvedGraph dedup(const ResolvedGraph& g);

/// dedup(resolve_switches(g, keys))
ResolvedGraph resolve(const FullGraph& g, const ResolvedKeys& keys);

/// Arguments before their users; ties broken by (depth, name, module_name).
/// Throws InternalError on a cycle.
std::vector<std::size_t> topo_order(const ResolvedGraph& g);

std::string to_dot(const FullGraph& g);
std::string to_dot(const ResolvedGraph& g);

/// Canonical text of a resolved graph, independent of node numbering.
std::string canonical_form(const ResolvedGraph& g);

}  // namespace modglue
