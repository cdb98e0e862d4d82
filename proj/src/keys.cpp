#include "modglue/keys.hpp"

#include <algorithm>
#include <set>
#include <variant>

#include "modglue/errors.hpp"
#include "modglue/text.hpp"

namespace modglue {

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::ConfigureOnly: return "configure";
    case Stage::RuntimeOnly: return "runtime";
    case Stage::Both: return "both";
  }
  return "?";
}

std::string_view to_string(ArgKind k) {
  switch (k) {
    case ArgKind::Opt: return "opt";
    case ArgKind::Required: return "required";
    case ArgKind::Flag: return "flag";
  }
  return "?";
}

std::string_view to_string(Source s) {
  switch (s) {
    case Source::Default: return "default";
    case Source::Persisted: return "persisted";
    case Source::Cli: return "cli";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view s) {
  if (s == "configure") return Stage::ConfigureOnly;
  if (s == "runtime") return Stage::RuntimeOnly;
  if (s == "both") return Stage::Both;
  return std::nullopt;
}

std::optional<ArgKind> parse_arg_kind(std::string_view s) {
  if (s == "opt") return ArgKind::Opt;
  if (s == "required") return ArgKind::Required;
  if (s == "flag") return ArgKind::Flag;
  return std::nullopt;
}

std::optional<Source> parse_source(std::string_view s) {
  if (s == "default") return Source::Default;
  if (s == "persisted") return Source::Persisted;
  if (s == "cli") return Source::Cli;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// ArgSpec / KeyRegistry

ArgSpec ArgSpec::opt(ValueType type, Literal default_value, std::vector<std::string> names,
                     std::string doc) {
  return ArgSpec{ArgKind::Opt, type, {}, std::move(default_value), std::move(names), std::move(doc)};
}

ArgSpec ArgSpec::opt_enum(std::vector<std::string> allowed, std::string default_value,
                          std::vector<std::string> names, std::string doc) {
  return ArgSpec{ArgKind::Opt,   ValueType::Enum,  std::move(allowed), Literal{std::move(default_value)},
                 std::move(names), std::move(doc)};
}

ArgSpec ArgSpec::required(ValueType type, std::vector<std::string> names, std::string doc,
                          std::vector<std::string> allowed) {
  return ArgSpec{ArgKind::Required, type, std::move(allowed), std::nullopt, std::move(names), std::move(doc)};
}

ArgSpec ArgSpec::flag(std::vector<std::string> names, std::string doc) {
  return ArgSpec{ArgKind::Flag, ValueType::Bool, {}, std::nullopt, std::move(names), std::move(doc)};
}

std::optional<Literal> ArgSpec::effective_default() const {
  if (kind == ArgKind::Flag) return Literal{false};
  return default_value;
}

namespace {

bool valid_flag_name(std::string_view n) {
  if (n.empty() || n.front() == '-') return false;
  return std::all_of(n.begin(), n.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
           c == '_';
  });
}

}  // namespace

KeySpec KeyRegistry::create(std::string name, ArgSpec arg, Stage stage) {
  if (!text::is_identifier(name)) throw DefinitionError("invalid key name '" + name + "'");
  if (find(name)) throw DefinitionError("duplicate key '" + name + "'");
  if (arg.names.empty()) arg.names.push_back(name);

  for (const auto& flag : arg.names) {
    if (!valid_flag_name(flag)) throw DefinitionError("invalid flag name '" + flag + "' for key " + name);
    if (std::count(arg.names.begin(), arg.names.end(), flag) > 1) {
      throw DefinitionError("flag name '" + flag + "' repeated in key " + name);
    }
    for (const auto& other : keys_) {
      const auto& on = other.arg().names;
      if (std::find(on.begin(), on.end(), flag) != on.end()) {
        throw DefinitionError("flag name '" + flag + "' of key " + name + " already used by key " +
                              other.name());
      }
    }
  }

  switch (arg.kind) {
    case ArgKind::Flag:
      if (arg.type != ValueType::Bool) throw DefinitionError("flag key " + name + " must be bool");
      if (arg.default_value) throw DefinitionError("flag key " + name + " cannot carry a default");
      break;
    case ArgKind::Opt:
      if (!arg.default_value) throw DefinitionError("optional key " + name + " needs a default");
      if (!literal_fits(*arg.default_value, arg.type, arg.allowed)) {
        throw DefinitionError("default '" + render_literal(*arg.default_value) + "' of key " + name +
                              " is not a valid " + std::string(to_string(arg.type)));
      }
      break;
    case ArgKind::Required:
      if (arg.default_value) throw DefinitionError("required key " + name + " cannot carry a default");
      break;
  }
  if (arg.type == ValueType::Enum && arg.allowed.empty()) {
    throw DefinitionError("enum key " + name + " has no allowed values");
  }

  KeySpec key(std::make_shared<const KeySpec::Data>(KeySpec::Data{std::move(name), std::move(arg), stage}));
  keys_.push_back(key);
  return key;
}

std::optional<KeySpec> KeyRegistry::find(std::string_view name) const {
  for (const auto& k : keys_) {
    if (k.name() == name) return k;
  }
  return std::nullopt;
}

bool KeyRegistry::contains(const KeySpec& key) const {
  return std::find(keys_.begin(), keys_.end(), key) != keys_.end();
}

// ---------------------------------------------------------------------------
// ResolvedKeys

void ResolvedKeys::set(const KeySpec& spec, std::optional<Literal> value, Source source) {
  entries_.insert_or_assign(spec.name(), ResolvedKey{spec, std::move(value), source});
}

const ResolvedKey* ResolvedKeys::find(std::string_view name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

const Literal& ResolvedKeys::value(std::string_view name) const {
  auto entry = find(name);
  if (!entry || !entry->value) throw UnresolvedKey(std::string(name));
  return *entry->value;
}

KeyReadings ResolvedKeys::readings() const {
  KeyReadings out;
  for (const auto& [name, entry] : entries_) {
    if (entry.value) out.emplace(name, KeyReading{*entry.value, entry.source});
  }
  return out;
}

// ---------------------------------------------------------------------------
// KeyValue

struct KeyValue::Node {
  struct Pure {
    Value value;
  };
  struct Read {
    KeySpec key;
  };
  struct App {
    KeyValue fn;
    KeyValue arg;
  };
  std::variant<Pure, Read, App> content;
};

KeyValue KeyValue::pure(Value v) {
  return KeyValue(std::make_shared<const Node>(Node{Node::Pure{std::move(v)}}));
}

KeyValue KeyValue::read(KeySpec key) {
  return KeyValue(std::make_shared<const Node>(Node{Node::Read{std::move(key)}}));
}

KeyValue KeyValue::app(KeyValue fn, KeyValue arg) {
  return KeyValue(std::make_shared<const Node>(Node{Node::App{std::move(fn), std::move(arg)}}));
}

std::vector<KeySpec> KeyValue::keys_mentioned() const {
  std::vector<KeySpec> out;
  std::vector<const Node*> stack{node_.get()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (auto r = std::get_if<Node::Read>(&n->content)) {
      if (std::find(out.begin(), out.end(), r->key) == out.end()) out.push_back(r->key);
    } else if (auto a = std::get_if<Node::App>(&n->content)) {
      stack.push_back(a->fn.node_.get());
      stack.push_back(a->arg.node_.get());
    }
  }
  std::sort(out.begin(), out.end(), [](const KeySpec& a, const KeySpec& b) { return a.name() < b.name(); });
  return out;
}

bool KeyValue::has_function_payload() const {
  return std::visit(
      [](const auto& c) -> bool {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Node::Pure>) {
          return c.value.is_function();
        } else if constexpr (std::is_same_v<T, Node::Read>) {
          return false;
        } else {
          return c.fn.has_function_payload() || c.arg.has_function_payload();
        }
      },
      node_->content);
}

std::string KeyValue::describe() const {
  return std::visit(
      [](const auto& c) -> std::string {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Node::Pure>) {
          return "pure(" + c.value.render() + ")";
        } else if constexpr (std::is_same_v<T, Node::Read>) {
          return "value(" + c.key.name() + ")";
        } else {
          auto rhs = c.arg.describe();
          if (std::holds_alternative<Node::App>(c.arg.node_->content)) rhs = "(" + rhs + ")";
          return c.fn.describe() + " $ " + rhs;
        }
      },
      node_->content);
}

Value KeyValue::eval(const ResolvedKeys& keys) const {
  return eval([&keys](const KeySpec& key) -> Literal { return keys.value(key.name()); });
}

Value KeyValue::eval(const Reader& read) const {
  return eval_node(read);
}

Value KeyValue::eval_node(const Reader& read) const {
  if (auto p = std::get_if<Node::Pure>(&node_->content)) return p->value;
  if (auto r = std::get_if<Node::Read>(&node_->content)) return Value(read(r->key));
  const auto& a = std::get<Node::App>(node_->content);
  auto fn = a.fn.eval_node(read);
  auto arg = a.arg.eval_node(read);
  try {
    return fn.call(arg);
  } catch (const UnresolvedKey&) {
    throw;
  } catch (const ConfigureError& e) {
    throw ConfigureError("while evaluating " + describe() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Flag parsing and resolution

CliFlags parse_key_flags(std::span<const std::string> args, std::span<const KeySpec> keys) {
  auto lookup = [&](std::string_view flag) -> const KeySpec* {
    for (const auto& k : keys) {
      const auto& names = k.arg().names;
      if (std::find(names.begin(), names.end(), flag) != names.end()) return &k;
    }
    return nullptr;
  };

  CliFlags out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string_view tok = args[i];
    std::string_view body;
    if (tok.size() > 2 && tok.substr(0, 2) == "--") {
      body = tok.substr(2);
    } else if (tok.size() > 1 && tok[0] == '-' && tok[1] != '-') {
      body = tok.substr(1);
    } else {
      throw FlagParseError("unexpected argument '" + std::string(tok) + "'");
    }

    std::optional<std::string> inline_value;
    if (auto eq = body.find('='); eq != std::string_view::npos) {
      inline_value = std::string(body.substr(eq + 1));
      body = body.substr(0, eq);
    }

    const KeySpec* key = lookup(body);
    if (!key) throw FlagParseError("unknown option '" + std::string(tok) + "'");
    if (out.count(key->name())) throw FlagParseError("option for key '" + key->name() + "' given twice");

    std::string value;
    if (inline_value) {
      value = *inline_value;
    } else if (key->arg().kind == ArgKind::Flag) {
      value = "true";
    } else {
      if (i + 1 >= args.size()) throw FlagParseError("option '" + std::string(tok) + "' needs a value");
      value = args[++i];
    }
    out.emplace(key->name(), std::move(value));
  }
  return out;
}

ResolvedKeys resolve_keys(std::span<const KeySpec> specs, const CliFlags& cli, const KeyReadings* persisted,
                          Phase phase) {
  if (phase == Phase::Runtime && !persisted) {
    throw KeyResolutionError("runtime key resolution needs the configuration persisted by configure");
  }
  for (const auto& [name, raw] : cli) {
    bool known = std::any_of(specs.begin(), specs.end(), [&](const KeySpec& k) { return k.name() == name; });
    if (!known) throw KeyResolutionError("unknown key '" + name + "'");
  }

  ResolvedKeys out;
  for (const auto& spec : specs) {
    const auto& arg = spec.arg();
    if (auto it = cli.find(spec.name()); it != cli.end()) {
      if (phase == Phase::Runtime && spec.stage() == Stage::ConfigureOnly) {
        throw KeyResolutionError("key '" + spec.name() +
                                 "' is configure-only and cannot be set at runtime; re-run configure");
      }
      try {
        out.set(spec, parse_literal(arg.type, it->second, arg.allowed), Source::Cli);
      } catch (const KeyResolutionError& e) {
        throw KeyResolutionError("key '" + spec.name() + "': " + e.what());
      }
      continue;
    }
    if (persisted) {
      if (auto it = persisted->find(spec.name()); it != persisted->end()) {
        if (!literal_fits(it->second.value, arg.type, arg.allowed)) {
          throw KeyResolutionError("persisted value '" + render_literal(it->second.value) + "' of key '" +
                                   spec.name() + "' is not a valid " + std::string(to_string(arg.type)));
        }
        out.set(spec, it->second.value, Source::Persisted);
        continue;
      }
    }
    if (auto def = arg.effective_default()) {
      out.set(spec, *def, Source::Default);
      continue;
    }
    if (phase == Phase::Configure && spec.stage() == Stage::RuntimeOnly) {
      out.set(spec, std::nullopt, Source::Default);
      continue;
    }
    throw KeyResolutionError("required key '" + spec.name() + "' was not given (--" + arg.names.front() + ")");
  }
  return out;
}

}  // namespace modglue
