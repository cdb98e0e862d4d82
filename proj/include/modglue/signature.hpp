#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace modglue {

/// Interface identity of a component: a named base signature (`store`,
/// `network`, `job`) or a functor arrow between signatures.
///
/// Immutable; copies share structure. Equality is nominal on base names and
/// structural on arrows.
class SignatureType {
 public:
  /// An unset type. Only useful as a placeholder before assignment; every
  /// accessor except `is_set` requires a set type.
  SignatureType() = default;

  static SignatureType base(std::string_view name);
  static SignatureType arrow(SignatureType param, SignatureType result);

  bool is_set() const { return node_ != nullptr; }
  bool is_arrow() const;

  /// Base name. Requires `!is_arrow()`.
  const std::string& name() const;
  /// Requires `is_arrow()`.
  SignatureType param() const;
  SignatureType result() const;

  /// Number of parameters along the right spine.
  std::size_t arity() const;
  /// Type left after applying `arity()` arguments.
  SignatureType final_result() const;

  /// `store -> network -> job`; arrow parameters are parenthesised.
  std::string render() const;

  friend bool operator==(const SignatureType& a, const SignatureType& b);
  friend bool operator!=(const SignatureType& a, const SignatureType& b) { return !(a == b); }

 private:
  struct Node;
  explicit SignatureType(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

inline SignatureType base_type(std::string_view name) { return SignatureType::base(name); }

inline SignatureType arrow(SignatureType param, SignatureType result) {
  return SignatureType::arrow(std::move(param), std::move(result));
}

/// functor_type(store, network, job) == arrow(store, arrow(network, job))
template <class... Rest>
SignatureType functor_type(SignatureType first, Rest... rest) {
  if constexpr (sizeof...(rest) == 0) {
    return first;
  } else {
    return arrow(std::move(first), functor_type(std::move(rest)...));
  }
}

}  // namespace modglue
