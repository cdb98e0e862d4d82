#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <variant>

#include "modglue/runtime.hpp"

namespace modglue::fileserver {

/// The error every store can report.
struct UnknownFile {
  std::string name;
};

/// Implementation-specific error. Generic clients can only render it.
class StoreErrorDetail {
 public:
  virtual ~StoreErrorDetail() = default;
  virtual std::string pp() const = 0;
};

class StoreError {
 public:
  static StoreError unknown_file(std::string name) { return StoreError(UnknownFile{std::move(name)}); }
  static StoreError extended(std::shared_ptr<const StoreErrorDetail> detail) { return StoreError(std::move(detail)); }

  /// Non-null for the base tag.
  const UnknownFile* as_unknown_file() const { return std::get_if<UnknownFile>(&v_); }

  /// One human-readable line, e.g. `Unknown_file "index.htm"`.
  std::string pp() const;

 private:
  using Repr = std::variant<UnknownFile, std::shared_ptr<const StoreErrorDetail>>;
  explicit StoreError(Repr v) : v_(std::move(v)) {}
  Repr v_;
};

class ReadResult {
 public:
  ReadResult(std::string content) : v_(std::move(content)) {}
  ReadResult(StoreError error) : v_(std::move(error)) {}

  bool ok() const { return v_.index() == 0; }
  const std::string& value() const { return std::get<std::string>(v_); }
  const StoreError& error() const { return std::get<StoreError>(v_); }

 private:
  std::variant<std::string, StoreError> v_;
};

class Store : public DeviceHandle {
 public:
  /// Never throws; failures are reported in the result.
  virtual ReadResult read(std::string_view name) const = 0;
};

/// Reads files below a root directory on every request.
class DirectStore : public Store {
 public:
  explicit DirectStore(std::filesystem::path root) : root_(std::move(root)) {}
  ReadResult read(std::string_view name) const override;

 private:
  std::filesystem::path root_;
};

/// Raised by DirectStore on filesystem faults other than a missing file.
class IoFailure : public StoreErrorDetail {
 public:
  IoFailure(std::string name, std::string detail) : name_(std::move(name)), detail_(std::move(detail)) {}
  std::string pp() const override { return "Io_failure \"" + name_ + "\": " + detail_; }

 private:
  std::string name_;
  std::string detail_;
};

/// Immutable in-memory snapshot taken at build time.
class CrunchStore : public Store {
 public:
  explicit CrunchStore(const std::map<std::string, std::string>& files) : files_(files.begin(), files.end()) {}
  ReadResult read(std::string_view name) const override;

 private:
  std::map<std::string, std::string, std::less<>> files_;
};

/// Snapshot file format: a `crunch 1` header, then per file a
/// `<escaped path>\t<size>` line followed by exactly `size` bytes and '\n'.
/// Paths are relative, '/'-separated, sorted.
void write_crunch_snapshot(const std::filesystem::path& source_dir, const std::filesystem::path& out_file);
std::map<std::string, std::string> read_crunch_snapshot(const std::filesystem::path& file);

/// True when `name` is a relative path without `..` components.
bool is_safe_relative_path(std::string_view name);

}  // namespace modglue::fileserver
