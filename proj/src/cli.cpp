#include "modglue/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>

#include "modglue/codegen.hpp"
#include "modglue/errors.hpp"
#include "modglue/graph.hpp"
#include "modglue/persist.hpp"

namespace modglue {

namespace fs = std::filesystem;

namespace {

constexpr const char* kKeysFile = "keys.cfg";
constexpr const char* kPlanFile = "plan.fplan";
constexpr const char* kGlueFile = "main.glue";
constexpr const char* kDotFile = "app.dot";

constexpr const char* kUsage =
    "usage: modglue [--build-dir DIR] <configure|describe|build|run|graph|clean> [flags]";

// Carries an exit status out of a command body.
struct Exit {
  int code;
  std::string message;
};

struct Session {
  const CliContext& ctx;
  std::string build_dir = ".";
  std::vector<std::string> args;  // command flags

  fs::path path(const char* file) const { return fs::path(build_dir) / file; }

  AppConfig define() const {
    try {
      return ctx.config.define();
    } catch (const DefinitionError& e) {
      throw Exit{exit_code::definition, e.what()};
    } catch (const TypeMismatch& e) {
      throw Exit{exit_code::definition, e.what()};
    }
  }

  CliFlags key_flags(std::span<const std::string> flags, const FullGraph& g) const {
    try {
      return parse_key_flags(flags, g.keys);
    } catch (const FlagParseError& e) {
      throw Exit{exit_code::usage, e.what()};
    }
  }

  /// The stored configuration, or nullopt when none exists. Throws Exit(5)
  /// when it is unreadable or was produced by a different definition.
  std::optional<PersistedConfig> load_persisted(const FullGraph& g, bool required) const {
    auto file = path(kKeysFile);
    if (!fs::exists(file)) {
      if (required) throw Exit{exit_code::stale, "not configured: " + file.string() + " is missing; run configure"};
      return std::nullopt;
    }
    PersistedConfig cfg;
    try {
      cfg = parse_persisted(read_file(file));
    } catch (const std::exception& e) {
      throw Exit{exit_code::stale, file.string() + ": " + e.what()};
    }
    if (cfg.fingerprint != fingerprint(g) || cfg.app_name != g.app_name) {
      throw Exit{exit_code::stale, "configuration is stale (the config definition changed); run configure again"};
    }
    return cfg;
  }

  ResolvedKeys resolve(const FullGraph& g, const CliFlags& cli, const PersistedConfig* persisted,
                       Phase phase) const {
    try {
      auto readings = persisted ? persisted->readings() : KeyReadings{};
      return resolve_keys(g.keys, cli, persisted ? &readings : nullptr, phase);
    } catch (const KeyResolutionError& e) {
      throw Exit{exit_code::keys, e.what()};
    }
  }

  ResolvedGraph resolve_graph(const FullGraph& g, const ResolvedKeys& keys) const {
    try {
      return modglue::resolve(g, keys);
    } catch (const ConfigureError& e) {
      throw Exit{exit_code::keys, e.what()};
    }
  }

  /// Runs `pick(device)` for every node in topological order.
  void run_hooks(const ResolvedGraph& rg, const Info& info, Hook ConfigurableDevice::*pick) const {
    for (auto id : topo_order(rg)) {
      const auto& n = rg.nodes[id];
      const auto& hook = (*n.device).*pick;
      if (!hook) continue;
      try {
        hook(info, n.name);
      } catch (const std::exception& e) {
        throw Exit{exit_code::device, "device " + n.name + ": " + e.what()};
      }
    }
  }

  void reject_flags() const {
    if (!args.empty()) throw Exit{exit_code::usage, "unexpected argument '" + args.front() + "'"};
  }

  // -------------------------------------------------------------------------

  int configure() const {
    auto app = define();
    auto g = build_graph(app);
    auto keys = resolve(g, key_flags(args, g), nullptr, Phase::Configure);
    auto rg = resolve_graph(g, keys);
    auto info = make_info(rg, keys, build_dir);
    auto plan = emit_plan(rg, info);
    try {
      write_file_atomic(path(kPlanFile), serialize_plan(plan));
      write_file_atomic(path(kGlueFile), render_glue(plan));
      write_file_atomic(path(kDotFile), to_dot(rg));
      write_file_atomic(path(kKeysFile), serialize_persisted(make_persisted(g, build_dir, keys)));
    } catch (const std::exception& e) {
      throw Exit{exit_code::stale, std::string("cannot write configuration: ") + e.what()};
    }
    ctx.out << "configured " << app.name << " in " << build_dir << "\n";
    return exit_code::ok;
  }

  int describe() const {
    bool verbose = false;
    for (const auto& a : args) {
      if (a == "--verbose" || a == "-v") {
        verbose = true;
      } else {
        throw Exit{exit_code::usage, "describe: unknown option '" + a + "'"};
      }
    }
    auto app = define();
    auto g = build_graph(app);

    std::optional<PersistedConfig> persisted;
    try {
      persisted = load_persisted(g, false);
    } catch (const Exit& e) {
      ctx.err << "warning: " << e.message << "\n";
    }
    auto readings = persisted ? persisted->readings() : KeyReadings{};

    auto row = [this](std::string_view head, const std::string& value) {
      ctx.out << std::left << std::setw(11) << head << value << "\n";
    };
    row("Name", app.name);
    row("Build-dir", build_dir);

    ResolvedKeys shown;
    bool complete = true;
    bool first = true;
    for (const auto& spec : g.keys) {
      std::string line;
      if (auto it = readings.find(spec.name()); it != readings.end()) {
        shown.set(spec, it->second.value, it->second.source);
        line = spec.name() + "=" + render_literal(it->second.value);
        if (it->second.source == Source::Default) line += " (default)";
      } else if (auto d = spec.arg().effective_default()) {
        shown.set(spec, *d, Source::Default);
        line = spec.name() + "=" + render_literal(*d) + " (default)";
      } else {
        complete = false;
        line = spec.name() + " (unset)";
      }
      row(first ? "Keys" : "", line);
      first = false;
    }

    if (verbose) {
      std::string status = "(keys unresolved)";
      std::vector<std::string> lines;
      if (complete) {
        try {
          auto rg = modglue::resolve(g, shown);
          for (const auto& p : aggregate_packages(rg, shown)) {
            std::string s = p.name;
            for (const auto& c : p.constraints) s += " " + c;
            lines.push_back(s);
          }
          status.clear();
        } catch (const Error& e) {
          status = std::string("(") + e.what() + ")";
        }
      }
      if (!status.empty()) lines = {status};
      for (std::size_t i = 0; i < lines.size(); ++i) row(i == 0 ? "Packages" : "", lines[i]);
    }
    return exit_code::ok;
  }

  int build() const {
    reject_flags();
    auto app = define();
    auto g = build_graph(app);
    auto persisted = load_persisted(g, true);
    auto keys = resolve(g, {}, &*persisted, Phase::Configure);
    auto rg = resolve_graph(g, keys);
    auto info = make_info(rg, keys, build_dir);
    run_hooks(rg, info, &ConfigurableDevice::configure);
    run_hooks(rg, info, &ConfigurableDevice::build);
    ctx.out << "built " << app.name << " in " << build_dir << "\n";
    return exit_code::ok;
  }

  int run() const {
    auto app = define();
    auto g = build_graph(app);
    auto cli = key_flags(args, g);
    auto persisted = load_persisted(g, true);

    PlanDocument plan;
    try {
      plan = parse_plan(read_file(path(kPlanFile)));
    } catch (const std::exception& e) {
      throw Exit{exit_code::stale, "cannot load plan: " + std::string(e.what()) + "; run configure"};
    }
    // The build dir is wherever the plan was found.
    plan.build_dir = build_dir;

    auto keys = resolve(g, cli, &*persisted, Phase::Runtime);
    if (auto missing = missing_factories(plan, ctx.factories); !missing.empty()) {
      throw Exit{exit_code::unregistered, "module " + missing.front()->module_name + " has no runtime factory '" +
                                              missing.front()->factory_id + "' (plan-only device)"};
    }
    Instance instance;
    try {
      instance = instantiate(plan, ctx.factories, keys, ctx.stop);
      run_jobs(instance, ctx.stop);
    } catch (const DeviceStartError& e) {
      throw Exit{exit_code::device, e.what()};
    }
    return exit_code::ok;
  }

  int graph() const {
    std::string stage = "resolved";
    std::optional<std::string> output;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
      const auto& a = args[i];
      auto take = [&](std::string_view flag, auto& slot) {
        if (a == flag) {
          if (i + 1 >= args.size()) throw Exit{exit_code::usage, std::string(flag) + " needs a value"};
          slot = args[++i];
          return true;
        }
        if (a.rfind(std::string(flag) + "=", 0) == 0) {
          slot = a.substr(flag.size() + 1);
          return true;
        }
        return false;
      };
      if (take("--stage", stage) || take("--output", output)) continue;
      rest.push_back(a);
    }
    if (stage != "full" && stage != "resolved") {
      throw Exit{exit_code::usage, "bad --stage '" + stage + "' (expected full or resolved)"};
    }

    auto app = define();
    auto g = build_graph(app);
    auto cli = key_flags(rest, g);
    std::string dot;
    if (stage == "full") {
      dot = to_dot(g);
    } else {
      auto persisted = load_persisted(g, false);
      auto keys = resolve(g, cli, persisted ? &*persisted : nullptr, Phase::Configure);
      dot = to_dot(resolve_graph(g, keys));
    }
    if (!output) {
      ctx.out << dot;
      return exit_code::ok;
    }
    try {
      write_file_atomic(*output, dot);
    } catch (const std::exception& e) {
      throw Exit{exit_code::stale, e.what()};
    }
    return exit_code::ok;
  }

  int clean() const {
    reject_flags();
    auto app = define();
    auto g = build_graph(app);
    std::optional<PersistedConfig> persisted;
    try {
      persisted = load_persisted(g, false);
    } catch (const Exit& e) {
      ctx.err << "warning: " << e.message << "; skipping clean hooks\n";
    }
    if (persisted) {
      auto keys = resolve(g, {}, &*persisted, Phase::Configure);
      auto rg = resolve_graph(g, keys);
      run_hooks(rg, make_info(rg, keys, build_dir), &ConfigurableDevice::clean);
    }
    for (auto file : {kPlanFile, kGlueFile, kDotFile, kKeysFile}) {
      std::error_code ec;
      fs::remove(path(file), ec);
    }
    return exit_code::ok;
  }
};

}  // namespace

int run_cli(std::span<const std::string> args, const CliContext& ctx) {
  Session s{ctx};
  std::optional<std::string> command;
  try {
    for (std::size_t i = 0; i < args.size(); ++i) {
      const auto& a = args[i];
      if (a == "--build-dir") {
        if (i + 1 >= args.size()) throw Exit{exit_code::usage, "--build-dir needs a value"};
        s.build_dir = args[++i];
      } else if (a.rfind("--build-dir=", 0) == 0) {
        s.build_dir = a.substr(12);
      } else if (!command && (a == "--help" || a == "-h" || a == "help")) {
        ctx.out << kUsage << "\n";
        return exit_code::ok;
      } else if (!command) {
        if (a.starts_with("-")) throw Exit{exit_code::usage, "unknown option '" + a + "'\n" + kUsage};
        command = a;
      } else {
        s.args.push_back(a);
      }
    }
    if (!command) throw Exit{exit_code::usage, kUsage};
    if (s.build_dir.empty()) throw Exit{exit_code::usage, "--build-dir must not be empty"};

    if (*command == "configure") return s.configure();
    if (*command == "describe") return s.describe();
    if (*command == "build") return s.build();
    if (*command == "run") return s.run();
    if (*command == "graph") return s.graph();
    if (*command == "clean") return s.clean();
    throw Exit{exit_code::usage, "unknown command '" + *command + "'\n" + kUsage};
  } catch (const Exit& e) {
    ctx.err << "modglue: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    ctx.err << "modglue: internal error: " << e.what() << "\n";
    return exit_code::device;
  }
}

}  // namespace modglue
