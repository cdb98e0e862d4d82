#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modglue {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed config definition: bad identifiers, duplicate keys or flag
/// names, arity mismatches, duplicate match cases.
class DefinitionError : public Error {
 public:
  using Error::Error;
};

/// Ill-typed composition. Raised eagerly by apply/if_/match_/register_app.
class TypeMismatch : public Error {
 public:
  using Error::Error;
};

/// Failure while evaluating key values or selecting switch branches.
class ConfigureError : public Error {
 public:
  using Error::Error;
};

class UnresolvedKey : public ConfigureError {
 public:
  explicit UnresolvedKey(std::string key)
      : ConfigureError("unresolved key '" + key + "'"), key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Key resolution: missing required keys, enum violations, ill-typed
/// literals, configure-only keys given at runtime.
class KeyResolutionError : public Error {
 public:
  using Error::Error;
};

/// Command-line syntax: unknown flags, missing flag values, stray arguments.
class FlagParseError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what)
      : Error("line " + std::to_string(line) + ", field '" + field + "': " + what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

class DeviceStartError : public Error {
 public:
  DeviceStartError(std::string device, const std::string& what)
      : Error(device + ": " + what), device_(std::move(device)) {}

  const std::string& device() const { return device_; }

 private:
  std::string device_;
};

class UnregisteredFactory : public Error {
 public:
  UnregisteredFactory(std::string module_name, const std::string& factory_id)
      : Error("no runtime factory '" + factory_id + "' registered for module " + module_name),
        module_name_(std::move(module_name)) {}

  const std::string& module_name() const { return module_name_; }

 private:
  std::string module_name_;
};

/// Broken internal invariant (e.g. a cycle in a resolved graph).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace modglue
