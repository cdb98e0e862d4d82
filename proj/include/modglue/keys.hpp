#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modglue/value.hpp"

namespace modglue {

enum class Stage { ConfigureOnly, RuntimeOnly, Both };
enum class ArgKind { Opt, Required, Flag };
enum class Phase { Configure, Runtime };
enum class Source { Default, Persisted, Cli };

std::string_view to_string(Stage s);
std::string_view to_string(ArgKind k);
std::string_view to_string(Source s);
std::optional<Stage> parse_stage(std::string_view s);
std::optional<ArgKind> parse_arg_kind(std::string_view s);
std::optional<Source> parse_source(std::string_view s);

inline bool reaches_runtime(Stage s) { return s != Stage::ConfigureOnly; }
inline bool reaches_configure(Stage s) { return s != Stage::RuntimeOnly; }

/// How a key appears on the command line.
struct ArgSpec {
  ArgKind kind = ArgKind::Opt;
  ValueType type = ValueType::Text;
  std::vector<std::string> allowed;      // Enum members
  std::optional<Literal> default_value;  // Opt only; Flag defaults to false
  std::vector<std::string> names;        // flag names without dashes; empty = key name
  std::string doc;

  static ArgSpec opt(ValueType type, Literal default_value, std::vector<std::string> names = {},
                     std::string doc = {});
  static ArgSpec opt_enum(std::vector<std::string> allowed, std::string default_value,
                          std::vector<std::string> names = {}, std::string doc = {});
  static ArgSpec required(ValueType type, std::vector<std::string> names = {}, std::string doc = {},
                          std::vector<std::string> allowed = {});
  static ArgSpec flag(std::vector<std::string> names = {}, std::string doc = {});

  /// Default for resolution purposes (Flag -> false).
  std::optional<Literal> effective_default() const;
};

/// A declared configuration key. Immutable; copies share the declaration.
class KeySpec {
 public:
  const std::string& name() const { return data_->name; }
  const ArgSpec& arg() const { return data_->arg; }
  Stage stage() const { return data_->stage; }

  friend bool operator==(const KeySpec& a, const KeySpec& b) { return a.data_ == b.data_; }

 private:
  friend class KeyRegistry;
  struct Data {
    std::string name;
    ArgSpec arg;
    Stage stage;
  };
  explicit KeySpec(std::shared_ptr<const Data> d) : data_(std::move(d)) {}

  std::shared_ptr<const Data> data_;
};

/// The keys declared by one config definition, in declaration order.
/// Key names and flag names are unique across the registry.
class KeyRegistry {
 public:
  /// Throws DefinitionError on duplicate key/flag names, bad identifiers,
  /// or an ill-typed default.
  KeySpec create(std::string name, ArgSpec arg, Stage stage = Stage::Both);

  const std::vector<KeySpec>& keys() const { return keys_; }
  std::optional<KeySpec> find(std::string_view name) const;
  bool contains(const KeySpec& key) const;

 private:
  std::vector<KeySpec> keys_;
};

struct ResolvedKey {
  KeySpec spec;
  std::optional<Literal> value;  // empty only for deferred runtime-only keys
  Source source = Source::Default;
};

/// A key reading with its provenance, as persisted between phases.
struct KeyReading {
  Literal value;
  Source source = Source::Default;

  friend bool operator==(const KeyReading&, const KeyReading&) = default;
};

using KeyReadings = std::map<std::string, KeyReading, std::less<>>;

class ResolvedKeys {
 public:
  void set(const KeySpec& spec, std::optional<Literal> value, Source source);

  const ResolvedKey* find(std::string_view name) const;
  /// Throws UnresolvedKey when absent or deferred.
  const Literal& value(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  const std::map<std::string, ResolvedKey, std::less<>>& entries() const { return entries_; }

  /// Every resolved (non-deferred) key with its source.
  KeyReadings readings() const;

 private:
  std::map<std::string, ResolvedKey, std::less<>> entries_;
};

/// An applicative computation over key readings: pure values, key reads,
/// and application.
class KeyValue {
 public:
  using Reader = std::function<Literal(const KeySpec&)>;

  static KeyValue pure(Value v);
  static KeyValue read(KeySpec key);
  static KeyValue app(KeyValue fn, KeyValue arg);

  /// Read leaves, unique and sorted by key name. Computed without evaluation.
  std::vector<KeySpec> keys_mentioned() const;
  /// True when any Pure leaf carries a host function.
  bool has_function_payload() const;

  /// `pure(<fun>) $ value(port)`
  std::string describe() const;

  /// Throws UnresolvedKey for keys missing from `keys`, ConfigureError on
  /// evaluation-time type mismatches.
  Value eval(const ResolvedKeys& keys) const;
  Value eval(const Reader& read) const;

 private:
  struct Node;
  explicit KeyValue(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  Value eval_node(const Reader& read) const;

  std::shared_ptr<const Node> node_;
};

inline KeyValue value_of(const KeySpec& key) { return KeyValue::read(key); }
inline KeyValue pure(Value v) { return KeyValue::pure(std::move(v)); }
inline KeyValue app(KeyValue fn, KeyValue arg) { return KeyValue::app(std::move(fn), std::move(arg)); }

inline KeyValue pure_fn(Value::Fn fn) { return KeyValue::pure(Value::function(std::move(fn))); }

/// map(f, v) == app(pure(f), v)
inline KeyValue map(Value::Fn fn, KeyValue v) { return app(pure_fn(std::move(fn)), std::move(v)); }

/// Raw key flag text by key name; bare Flag occurrences are "true".
using CliFlags = std::map<std::string, std::string, std::less<>>;

/// Parses `--name value`, `--name=value`, `-p value`, and bare `--flag`
/// against the declared keys. Throws FlagParseError on unknown flags,
/// missing values, repeated keys, and positional arguments.
CliFlags parse_key_flags(std::span<const std::string> args, std::span<const KeySpec> keys);

/// Precedence Cli > Persisted > Default. At Runtime, configure-only keys
/// reject CLI flags and `persisted` is required. Required runtime-only keys
/// absent at Configure are recorded as deferred.
ResolvedKeys resolve_keys(std::span<const KeySpec> specs, const CliFlags& cli,
                          const KeyReadings* persisted, Phase phase);

}  // namespace modglue
