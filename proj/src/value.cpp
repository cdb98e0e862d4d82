#include "modglue/value.hpp"

#include <algorithm>
#include <charconv>

#include "modglue/errors.hpp"

namespace modglue {

std::string_view to_string(ValueType t) {
  switch (t) {
    case ValueType::Bool: return "bool";
    case ValueType::Int: return "int";
    case ValueType::Text: return "text";
    case ValueType::Enum: return "enum";
  }
  return "?";
}

std::optional<ValueType> parse_value_type(std::string_view s) {
  if (s == "bool") return ValueType::Bool;
  if (s == "int") return ValueType::Int;
  if (s == "text") return ValueType::Text;
  if (s == "enum") return ValueType::Enum;
  return std::nullopt;
}

std::string render_literal(const Literal& lit) {
  if (auto b = std::get_if<bool>(&lit)) return *b ? "true" : "false";
  if (auto i = std::get_if<std::int64_t>(&lit)) return std::to_string(*i);
  return std::get<std::string>(lit);
}

namespace {

std::string join_allowed(const std::vector<std::string>& allowed) {
  std::string out;
  for (std::size_t i = 0; i < allowed.size(); ++i) {
    if (i != 0) out += ", ";
    out += allowed[i];
  }
  return out;
}

std::optional<std::int64_t> parse_int(std::string_view text) {
  std::int64_t v = 0;
  auto begin = text.data();
  auto end = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || begin == end) return std::nullopt;
  return v;
}

}  // namespace

Literal parse_literal(ValueType type, std::string_view text, const std::vector<std::string>& allowed) {
  switch (type) {
    case ValueType::Bool:
      if (text == "true") return true;
      if (text == "false") return false;
      throw KeyResolutionError("'" + std::string(text) + "' is not a boolean (expected true or false)");
    case ValueType::Int:
      if (auto v = parse_int(text)) return *v;
      throw KeyResolutionError("'" + std::string(text) + "' is not a 64-bit integer");
    case ValueType::Text:
      return std::string(text);
    case ValueType::Enum:
      if (std::find(allowed.begin(), allowed.end(), text) == allowed.end()) {
        throw KeyResolutionError("invalid value '" + std::string(text) + "', expected one of: " +
                                 join_allowed(allowed));
      }
      return std::string(text);
  }
  throw InternalError("unknown value type");
}

bool literal_fits(const Literal& lit, ValueType type, const std::vector<std::string>& allowed) {
  switch (type) {
    case ValueType::Bool: return std::holds_alternative<bool>(lit);
    case ValueType::Int: return std::holds_alternative<std::int64_t>(lit);
    case ValueType::Text: return std::holds_alternative<std::string>(lit);
    case ValueType::Enum: {
      auto s = std::get_if<std::string>(&lit);
      return s && std::find(allowed.begin(), allowed.end(), *s) != allowed.end();
    }
  }
  return false;
}

std::string encode_literal(const Literal& lit) {
  if (std::holds_alternative<bool>(lit)) return "bool:" + render_literal(lit);
  if (std::holds_alternative<std::int64_t>(lit)) return "int:" + render_literal(lit);
  return "text:" + std::get<std::string>(lit);
}

Literal decode_literal(std::string_view s) {
  auto colon = s.find(':');
  if (colon == std::string_view::npos) throw Error("literal '" + std::string(s) + "' has no type tag");
  auto tag = s.substr(0, colon);
  auto body = s.substr(colon + 1);
  if (tag == "bool") return parse_literal(ValueType::Bool, body);
  if (tag == "int") return parse_literal(ValueType::Int, body);
  if (tag == "text") return std::string(body);
  throw Error("unknown literal tag '" + std::string(tag) + "'");
}

Value::Value(const Literal& lit) {
  std::visit([this](const auto& v) { data_ = v; }, lit);
}

Value Value::function(Fn fn) {
  Value v;
  v.data_ = std::make_shared<const Fn>(std::move(fn));
  return v;
}

bool Value::is_literal() const {
  return std::holds_alternative<bool>(data_) || std::holds_alternative<std::int64_t>(data_) ||
         std::holds_alternative<std::string>(data_);
}

std::string_view Value::kind() const {
  switch (data_.index()) {
    case 0: return "bool";
    case 1: return "int";
    case 2: return "text";
    case 3: return "function";
    default: return "package list";
  }
}

bool Value::as_bool() const {
  if (auto b = std::get_if<bool>(&data_)) return *b;
  throw ConfigureError("expected bool, got " + std::string(kind()));
}

std::int64_t Value::as_int() const {
  if (auto i = std::get_if<std::int64_t>(&data_)) return *i;
  throw ConfigureError("expected int, got " + std::string(kind()));
}

const std::string& Value::as_text() const {
  if (auto s = std::get_if<std::string>(&data_)) return *s;
  throw ConfigureError("expected text, got " + std::string(kind()));
}

const PackageList& Value::as_packages() const {
  if (auto p = std::get_if<PackageList>(&data_)) return *p;
  throw ConfigureError("expected package list, got " + std::string(kind()));
}

Literal Value::as_literal() const {
  if (auto b = std::get_if<bool>(&data_)) return *b;
  if (auto i = std::get_if<std::int64_t>(&data_)) return *i;
  if (auto s = std::get_if<std::string>(&data_)) return *s;
  throw ConfigureError("expected a literal, got " + std::string(kind()));
}

Value Value::call(const Value& arg) const {
  auto fn = std::get_if<std::shared_ptr<const Fn>>(&data_);
  if (!fn) throw ConfigureError("cannot apply a " + std::string(kind()));
  return (**fn)(arg);
}

std::string Value::render() const {
  if (is_literal()) return render_literal(as_literal());
  if (is_function()) return "<fun>";
  std::string out = "[";
  const auto& pkgs = std::get<PackageList>(data_);
  for (std::size_t i = 0; i < pkgs.size(); ++i) {
    if (i != 0) out += "; ";
    out += pkgs[i].name;
  }
  return out + "]";
}

bool operator==(const Value& a, const Value& b) { return a.data_ == b.data_; }

}  // namespace modglue
