#include "modglue/fileserver/store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "modglue/text.hpp"

namespace modglue::fileserver {

namespace fs = std::filesystem;

std::string StoreError::pp() const {
  if (auto u = as_unknown_file()) return "Unknown_file \"" + u->name + "\"";
  return std::get<std::shared_ptr<const StoreErrorDetail>>(v_)->pp();
}

bool is_safe_relative_path(std::string_view name) {
  if (name.empty() || name.front() == '/') return false;
  std::size_t start = 0;
  while (start <= name.size()) {
    auto end = name.find('/', start);
    if (end == std::string_view::npos) end = name.size();
    auto part = name.substr(start, end - start);
    if (part == ".." || part == ".") return false;
    start = end + 1;
  }
  return name.find('\0') == std::string_view::npos;
}

ReadResult DirectStore::read(std::string_view name) const {
  if (!is_safe_relative_path(name)) return StoreError::unknown_file(std::string(name));
  auto path = root_ / fs::path(std::string(name));
  std::error_code ec;
  auto status = fs::status(path, ec);
  if (ec || !fs::is_regular_file(status)) {
    if (ec && ec != std::errc::no_such_file_or_directory && ec != std::errc::not_a_directory) {
      return StoreError::extended(std::make_shared<IoFailure>(std::string(name), ec.message()));
    }
    return StoreError::unknown_file(std::string(name));
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) return StoreError::extended(std::make_shared<IoFailure>(std::string(name), "cannot open file"));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return StoreError::extended(std::make_shared<IoFailure>(std::string(name), "read failed"));
  return buf.str();
}

ReadResult CrunchStore::read(std::string_view name) const {
  auto it = files_.find(name);
  if (it == files_.end()) return StoreError::unknown_file(std::string(name));
  return it->second;
}

void write_crunch_snapshot(const fs::path& source_dir, const fs::path& out_file) {
  if (!fs::is_directory(source_dir)) {
    throw std::runtime_error("crunch source directory '" + source_dir.string() + "' does not exist");
  }
  std::vector<std::pair<std::string, fs::path>> files;
  for (const auto& entry : fs::recursive_directory_iterator(source_dir)) {
    if (!entry.is_regular_file()) continue;
    files.emplace_back(fs::relative(entry.path(), source_dir).generic_string(), entry.path());
  }
  std::sort(files.begin(), files.end());

  std::ostringstream out;
  out << "crunch 1\n";
  for (const auto& [rel, path] : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
    std::ostringstream content;
    content << in.rdbuf();
    auto bytes = content.str();
    out << text::escape(rel) << '\t' << bytes.size() << '\n' << bytes << '\n';
  }

  if (out_file.has_parent_path()) fs::create_directories(out_file.parent_path());
  auto tmp = out_file;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    f << out.str();
    if (!f) throw std::runtime_error("cannot write '" + tmp.string() + "'");
  }
  fs::rename(tmp, out_file);
}

std::map<std::string, std::string> read_crunch_snapshot(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("crunch snapshot '" + file.string() + "' is missing; run build first");
  std::string header;
  std::getline(in, header);
  if (header != "crunch 1") throw std::runtime_error("'" + file.string() + "' is not a crunch snapshot");

  std::map<std::string, std::string> files;
  std::string line;
  while (std::getline(in, line)) {
    auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw std::runtime_error("corrupt crunch snapshot '" + file.string() + "'");
    auto size = std::stoull(line.substr(tab + 1));
    std::string bytes(size, '\0');
    in.read(bytes.data(), static_cast<std::streamsize>(size));
    if (static_cast<std::size_t>(in.gcount()) != size || in.get() != '\n') {
      throw std::runtime_error("truncated crunch snapshot '" + file.string() + "'");
    }
    files.emplace(text::unescape(line.substr(0, tab)), std::move(bytes));
  }
  return files;
}

}  // namespace modglue::fileserver
