#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace modglue {

enum class ValueType { Bool, Int, Text, Enum };

std::string_view to_string(ValueType t);
std::optional<ValueType> parse_value_type(std::string_view s);

/// A key reading. Enum members are carried as text.
using Literal = std::variant<bool, std::int64_t, std::string>;

/// `true`, `42`, `data/`
std::string render_literal(const Literal& lit);

/// Parses CLI or key-file text against a value type. Throws
/// KeyResolutionError naming the allowed set on enum violations.
Literal parse_literal(ValueType type, std::string_view text,
                      const std::vector<std::string>& allowed = {});

/// True when `lit`'s alternative fits `type` (and, for enums, is a member).
bool literal_fits(const Literal& lit, ValueType type, const std::vector<std::string>& allowed);

/// Typed, self-describing serial form used by plan files: `int:80`,
/// `bool:true`, `text:data/`.
std::string encode_literal(const Literal& lit);
Literal decode_literal(std::string_view s);

struct Package {
  std::string name;
  std::set<std::string> constraints;

  friend bool operator==(const Package&, const Package&) = default;
};

using PackageList = std::vector<Package>;

/// Result of evaluating a key value: a literal, a package list, or an opaque
/// host function. Functions are never serialised.
class Value {
 public:
  using Fn = std::function<Value(const Value&)>;

  Value(bool b) : data_(b) {}
  Value(std::int64_t i) : data_(i) {}
  Value(int i) : data_(std::int64_t{i}) {}
  Value(std::string s) : data_(std::move(s)) {}
  Value(const char* s) : data_(std::string(s)) {}
  Value(PackageList p) : data_(std::move(p)) {}
  Value(const Literal& lit);

  static Value function(Fn fn);

  bool is_function() const { return std::holds_alternative<std::shared_ptr<const Fn>>(data_); }
  bool is_literal() const;
  bool is_packages() const { return std::holds_alternative<PackageList>(data_); }

  // Accessors throw ConfigureError on a type mismatch.
  bool as_bool() const;
  std::int64_t as_int() const;
  const std::string& as_text() const;
  const PackageList& as_packages() const;
  Literal as_literal() const;
  Value call(const Value& arg) const;

  std::string_view kind() const;
  std::string render() const;

  friend bool operator==(const Value& a, const Value& b);

 private:
  Value() = default;
  std::variant<bool, std::int64_t, std::string, std::shared_ptr<const Fn>, PackageList> data_;
};

}  // namespace modglue
