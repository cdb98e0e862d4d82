#include "modglue/persist.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "modglue/errors.hpp"
#include "modglue/text.hpp"

namespace modglue {

namespace fs = std::filesystem;

KeyReadings PersistedConfig::readings() const {
  KeyReadings out;
  for (const auto& [name, r] : keys) out.emplace(name, r);
  return out;
}

std::string fingerprint(const FullGraph& g) {
  std::ostringstream os;
  os << "app " << g.app_name << '\n';
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    os << i << ' ';
    if (auto dn = std::get_if<DeviceNode>(&n.content)) {
      const auto& d = *dn->device;
      os << "device " << d.module_name << ' ' << dn->name << ' ' << d.type.render() << ' ' << d.connect.factory_id
         << (d.generative ? " generative" : "") << " keys";
      for (const auto& k : d.keys) os << ' ' << k.name();
      os << " key_args";
      for (const auto& k : d.connect.key_args) os << ' ' << k;
    } else {
      const auto& sw = std::get<SwitchNode>(n.content);
      os << (sw.is_if ? "if " : "match ") << sw.scrutinee.describe() << " on";
      for (const auto& k : sw.scrutinee.keys_mentioned()) os << ' ' << k.name();
      os << " labels";
      for (const auto& l : sw.labels) os << ' ' << encode_literal(l);
      if (sw.has_default) os << " default";
    }
    os << " ->";
    for (auto c : n.children) os << ' ' << c;
    os << '\n';
  }
  os << "roots";
  for (auto r : g.roots) os << ' ' << r;
  os << '\n';
  for (const auto& k : g.keys) {
    const auto& a = k.arg();
    os << "key " << k.name() << ' ' << to_string(k.stage()) << ' ' << to_string(a.kind) << ' ' << to_string(a.type)
       << " names " << text::join_escaped(a.names, ',') << " allowed " << text::join_escaped(a.allowed, ',')
       << " default " << (a.default_value ? encode_literal(*a.default_value) : "-") << '\n';
  }
  return text::hex64(text::fnv1a64(os.str()));
}

PersistedConfig make_persisted(const FullGraph& g, const std::string& build_dir, const ResolvedKeys& keys) {
  PersistedConfig cfg{g.app_name, build_dir, fingerprint(g), {}, {}};
  for (const auto& spec : g.keys) {
    auto rk = keys.find(spec.name());
    if (!rk || !rk->value) continue;
    cfg.keys.emplace_back(spec.name(), KeyReading{*rk->value, rk->source});
    cfg.types.push_back(spec.arg().type);
  }
  return cfg;
}

std::string serialize_persisted(const PersistedConfig& cfg) {
  std::ostringstream os;
  os << "#app\t" << text::escape(cfg.app_name) << '\n'
     << "#build-dir\t" << text::escape(cfg.build_dir) << '\n'
     << "#fingerprint\t" << cfg.fingerprint << '\n';
  for (std::size_t i = 0; i < cfg.keys.size(); ++i) {
    const auto& [name, r] = cfg.keys[i];
    os << name << '\t' << to_string(cfg.types[i]) << '\t' << text::escape(render_literal(r.value)) << '\t'
       << to_string(r.source) << '\n';
  }
  return os.str();
}

PersistedConfig parse_persisted(std::string_view input) {
  PersistedConfig cfg;
  bool seen_app = false, seen_dir = false, seen_fp = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < input.size()) {
    auto nl = input.find('\n', pos);
    auto line = input.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? input.size() : nl + 1;
    ++line_no;
    if (line.empty()) continue;

    auto fields = text::split_escaped(line, '\t');
    if (line.front() == '#') {
      if (fields.size() != 2) throw ParseError(line_no, fields[0], "expected a name and a value");
      if (fields[0] == "#app") {
        cfg.app_name = text::unescape(fields[1]);
        seen_app = true;
      } else if (fields[0] == "#build-dir") {
        cfg.build_dir = text::unescape(fields[1]);
        seen_dir = true;
      } else if (fields[0] == "#fingerprint") {
        cfg.fingerprint = fields[1];
        seen_fp = true;
      } else {
        throw ParseError(line_no, fields[0], "unknown header");
      }
      continue;
    }

    if (fields.size() != 4) throw ParseError(line_no, "key", "expected 4 tab-separated fields");
    auto type = parse_value_type(fields[1]);
    if (!type) throw ParseError(line_no, "type", "unknown type '" + fields[1] + "'");
    auto source = parse_source(fields[3]);
    if (!source) throw ParseError(line_no, "source", "unknown source '" + fields[3] + "'");
    Literal value;
    try {
      // Enum membership is checked against the key spec at resolution time.
      value = parse_literal(*type == ValueType::Enum ? ValueType::Text : *type, text::unescape(fields[2]));
    } catch (const Error& e) {
      throw ParseError(line_no, "value", e.what());
    }
    cfg.keys.emplace_back(fields[0], KeyReading{std::move(value), *source});
    cfg.types.push_back(*type);
  }
  if (!seen_app) throw ParseError(line_no, "#app", "missing header");
  if (!seen_dir) throw ParseError(line_no, "#build-dir", "missing header");
  if (!seen_fp) throw ParseError(line_no, "#fingerprint", "missing header");
  return cfg;
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw std::runtime_error("cannot write '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

}  // namespace modglue
