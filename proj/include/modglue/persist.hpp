#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modglue/graph.hpp"
#include "modglue/keys.hpp"

namespace modglue {

/// Configure-time state kept in `<build-dir>/keys.cfg`.
struct PersistedConfig {
  std::string app_name;
  std::string build_dir;
  std::string fingerprint;
  /// Declaration order; deferred keys are absent.
  std::vector<std::pair<std::string, KeyReading>> keys;
  std::vector<ValueType> types;  // parallel to `keys`

  KeyReadings readings() const;

  friend bool operator==(const PersistedConfig&, const PersistedConfig&) = default;
};

/// Hash over the full graph's structure and the declared key specs.
std::string fingerprint(const FullGraph& g);

PersistedConfig make_persisted(const FullGraph& g, const std::string& build_dir, const ResolvedKeys& keys);

/// Header lines `#app`, `#build-dir`, `#fingerprint`, then one
/// `key<TAB>type<TAB>value<TAB>source` line per key. Fields are escaped.
std::string serialize_persisted(const PersistedConfig& cfg);
/// Throws ParseError on malformed input.
PersistedConfig parse_persisted(std::string_view text);

/// Writes through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
/// Throws std::runtime_error when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

}  // namespace modglue
