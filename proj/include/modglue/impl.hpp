#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "modglue/device.hpp"
#include "modglue/keys.hpp"
#include "modglue/signature.hpp"

namespace modglue {

struct MatchCase;

/// An implementation expression: device leaves, functor applications, and
/// key-conditional switches. Every expression carries its signature type,
/// checked when the node is built.
class ImplExpr {
 public:
  enum class Kind { Device, Apply, If, Match };

  Kind kind() const;
  const SignatureType& type() const;

  // Device
  const std::shared_ptr<const ConfigurableDevice>& device() const;
  // Apply
  const ImplExpr& fn() const;
  const ImplExpr& arg() const;
  // If / Match
  const KeyValue& condition() const;
  const ImplExpr& then_branch() const;
  const ImplExpr& else_branch() const;
  const std::vector<MatchCase>& cases() const;
  const std::optional<ImplExpr>& default_case() const;

  /// Functor application sugar: `make_server(store, network)`.
  template <class... Args>
  ImplExpr operator()(const ImplExpr& first, const Args&... rest) const;

 private:
  friend ImplExpr apply(const ImplExpr&, const ImplExpr&);
  friend ImplExpr if_(KeyValue, ImplExpr, ImplExpr);
  friend ImplExpr match_(KeyValue, std::vector<MatchCase>, std::optional<ImplExpr>);
  friend ImplExpr define_device(ConfigurableDevice);

  struct Node;
  explicit ImplExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

struct MatchCase {
  Literal label;
  ImplExpr impl;
};

/// Throws TypeMismatch unless typ_of(fn) is an arrow whose parameter equals
/// typ_of(arg).
ImplExpr apply(const ImplExpr& fn, const ImplExpr& arg);

/// Both branches must have identical types (TypeMismatch otherwise).
ImplExpr if_(KeyValue condition, ImplExpr then_branch, ImplExpr else_branch);

/// Case labels must be pairwise distinct and at least one branch must exist
/// (DefinitionError); all branches share one type (TypeMismatch).
ImplExpr match_(KeyValue scrutinee, std::vector<MatchCase> cases, std::optional<ImplExpr> default_case = {});

inline const SignatureType& typ_of(const ImplExpr& e) { return e.type(); }

struct ForeignOptions {
  std::optional<std::string> name;
  std::vector<KeySpec> keys;
  KeyValue packages = pure(PackageList{});
  bool generative = false;
};

/// A device whose connect recipe calls the factory registered under
/// `module_name` with its arguments in order.
ImplExpr foreign(std::string module_name, SignatureType type, ForeignOptions opts = {});

/// Throws DefinitionError when the recipe's argument count differs from the
/// type's arity, the type is unset, or a key_arg is not among the device keys.
ImplExpr define_device(ConfigurableDevice device);

/// A registered application: name, job roots, and every declared key.
struct AppConfig {
  std::string name;
  std::vector<ImplExpr> jobs;
  std::vector<KeySpec> keys;
};

SignatureType job_type();

/// Checks the app name, that every job is job-typed, and that every key the
/// jobs mention is declared in `keys`.
AppConfig register_app(std::string name, std::vector<ImplExpr> jobs, const KeyRegistry& keys);

template <class... Args>
ImplExpr ImplExpr::operator()(const ImplExpr& first, const Args&... rest) const {
  auto out = apply(*this, first);
  ((out = apply(out, rest)), ...);
  return out;
}

}  // namespace modglue
