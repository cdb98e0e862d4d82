#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modglue/device.hpp"
#include "modglue/graph.hpp"
#include "modglue/keys.hpp"

namespace modglue {

/// Evaluates every node's package list under `keys` and merges them.
PackageList aggregate_packages(const ResolvedGraph& g, const ResolvedKeys& keys);

/// Info for hooks and code generation: packages plus topologically ordered
/// device names.
Info make_info(const ResolvedGraph& g, const ResolvedKeys& keys, std::filesystem::path build_dir);

/// A runtime-forwardable key with its configure-time value as default.
struct PlanKey {
  std::string name;
  ValueType type = ValueType::Text;
  ArgKind kind = ArgKind::Opt;
  Stage stage = Stage::Both;
  std::vector<std::string> flag_names;
  std::vector<std::string> allowed;
  std::optional<Literal> default_value;
  std::string doc;

  friend bool operator==(const PlanKey&, const PlanKey&) = default;
};

struct PlanStep {
  std::string var;
  std::string factory_id;
  std::string module_name;
  std::string device_name;
  std::vector<std::string> args;      // vars of earlier steps
  std::vector<std::string> key_args;  // looked up at runtime by name
  /// Configure-only key arguments, baked in at configure time.
  std::vector<std::pair<std::string, Literal>> consts;

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

/// Machine-readable initialisation plan executed by the runtime.
struct PlanDocument {
  std::string app_name;
  std::string build_dir;
  std::vector<PlanKey> key_table;  // sorted by name
  std::vector<PlanStep> steps;     // topological order
  std::vector<std::string> jobs;

  friend bool operator==(const PlanDocument&, const PlanDocument&) = default;
};

PlanDocument emit_plan(const ResolvedGraph& g, const Info& info);

/// One `let <var> = <Module>.create(...)` line per step, then `run <jobs>`.
std::string render_glue(const PlanDocument& plan);
std::string emit_glue(const ResolvedGraph& g, const Info& info);

std::string serialize_plan(const PlanDocument& plan);
/// Throws ParseError with line and field on malformed input.
PlanDocument parse_plan(std::string_view text);

/// Throws InternalError when a step references an undefined or later var.
void validate_plan(const PlanDocument& plan);

}  // namespace modglue
