#include "modglue/codegen.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "modglue/errors.hpp"
#include "modglue/text.hpp"

namespace modglue {

PackageList aggregate_packages(const ResolvedGraph& g, const ResolvedKeys& keys) {
  std::vector<PackageList> lists;
  lists.reserve(g.nodes.size());
  for (const auto& n : g.nodes) lists.push_back(n.device->packages.eval(keys).as_packages());
  return merge_packages(lists);
}

Info make_info(const ResolvedGraph& g, const ResolvedKeys& keys, std::filesystem::path build_dir) {
  Info info{g.app_name, std::move(build_dir), keys, aggregate_packages(g, keys), {}};
  for (auto id : topo_order(g)) info.device_names.push_back(g.nodes[id].name);
  return info;
}

PlanDocument emit_plan(const ResolvedGraph& g, const Info& info) {
  PlanDocument plan;
  plan.app_name = info.app_name;
  plan.build_dir = info.build_dir.string();

  for (const auto& [name, entry] : info.keys.entries()) {
    const auto& spec = entry.spec;
    if (!reaches_runtime(spec.stage())) continue;
    const auto& arg = spec.arg();
    plan.key_table.push_back(PlanKey{name, arg.type, arg.kind, spec.stage(), arg.names, arg.allowed, entry.value, arg.doc});
  }

  std::map<std::string, std::size_t> occurrences;
  std::vector<std::string> var_of(g.nodes.size());
  for (auto id : topo_order(g)) {
    const auto& n = g.nodes[id];
    const auto& d = *n.device;
    auto base = default_device_name(d.module_name);
    auto var = base + std::to_string(++occurrences[base]);
    var_of[id] = var;

    PlanStep step{var, d.connect.factory_id, d.module_name, n.name, {}, {}, {}};
    for (auto c : n.children) step.args.push_back(var_of[c]);
    for (const auto& k : d.connect.key_args) {
      auto entry = info.keys.find(k);
      if (entry && !reaches_runtime(entry->spec.stage())) {
        step.consts.emplace_back(k, info.keys.value(k));
      } else {
        step.key_args.push_back(k);
      }
    }
    plan.steps.push_back(std::move(step));
  }
  for (auto r : g.roots) plan.jobs.push_back(var_of[r]);
  return plan;
}

namespace {

std::string glue_literal(const Literal& lit) {
  if (std::holds_alternative<std::string>(lit)) return text::quote(std::get<std::string>(lit));
  return render_literal(lit);
}

}  // namespace

std::string render_glue(const PlanDocument& plan) {
  std::ostringstream os;
  for (const auto& s : plan.steps) {
    std::vector<std::string> params = s.args;
    for (const auto& k : s.key_args) params.push_back(k + "=lookup(" + text::quote(k) + ")");
    for (const auto& [k, v] : s.consts) params.push_back(k + "=" + glue_literal(v));
    os << "let " << s.var << " = " << s.module_name << ".create(";
    for (std::size_t i = 0; i < params.size(); ++i) os << (i ? ", " : "") << params[i];
    os << ")\n";
  }
  os << "run";
  for (const auto& j : plan.jobs) os << ' ' << j;
  os << '\n';
  return os.str();
}

std::string emit_glue(const ResolvedGraph& g, const Info& info) { return render_glue(emit_plan(g, info)); }

void validate_plan(const PlanDocument& plan) {
  std::set<std::string> defined;
  for (const auto& s : plan.steps) {
    for (const auto& a : s.args) {
      if (!defined.count(a)) throw InternalError("step " + s.var + " uses " + a + " before it is defined");
    }
    if (!defined.insert(s.var).second) throw InternalError("variable " + s.var + " defined twice");
  }
  for (const auto& j : plan.jobs) {
    if (!defined.count(j)) throw InternalError("job " + j + " is not a defined variable");
  }
}

// ---------------------------------------------------------------------------
// Serialisation
//
//   plan	1
//   app	<name>
//   build-dir	<dir>
//   key	<name>	<type>	<kind>	<stage>	<flags>	<allowed>	<default|->	<doc>
//   step	<var>	<factory>	<module>	<device>	<args>	<key_args>	<consts>
//   job	<var>
//   end
//
// Fields are escaped; list fields are comma-joined escaped items.

namespace {

constexpr std::string_view kPlanVersion = "1";

std::string encode_consts(const std::vector<std::pair<std::string, Literal>>& consts) {
  std::vector<std::string> items;
  for (const auto& [k, v] : consts) items.push_back(k + "=" + encode_literal(v));
  return text::join_escaped(items, ',');
}

std::vector<std::string> decode_list(const std::string& field) {
  if (field.empty()) return {};
  std::vector<std::string> out;
  for (const auto& item : text::split_escaped(field, ',')) out.push_back(text::unescape(item));
  return out;
}

class PlanReader {
 public:
  explicit PlanReader(std::string_view src) {
    std::size_t start = 0;
    while (start < src.size()) {
      auto end = src.find('\n', start);
      if (end == std::string_view::npos) end = src.size();
      lines_.emplace_back(src.substr(start, end - start));
      start = end + 1;
    }
  }

  PlanDocument read() {
    PlanDocument plan;
    auto header = next("header");
    expect_fields(header, 2, "header");
    if (header[0] != "plan") fail("header", "expected 'plan' header");
    if (header[1] != kPlanVersion) fail("version", "unsupported plan version '" + header[1] + "'");

    auto app = next("app");
    expect_tag(app, "app", 2);
    plan.app_name = text::unescape(app[1]);
    auto dir = next("build-dir");
    expect_tag(dir, "build-dir", 2);
    plan.build_dir = text::unescape(dir[1]);

    for (;;) {
      auto rec = next("record");
      const auto& tag = rec[0];
      if (tag == "end") {
        expect_fields(rec, 1, "end");
        break;
      }
      if (tag == "key") {
        plan.key_table.push_back(read_key(rec));
      } else if (tag == "step") {
        plan.steps.push_back(read_step(rec));
      } else if (tag == "job") {
        expect_fields(rec, 2, "job");
        plan.jobs.push_back(text::unescape(rec[1]));
      } else {
        fail("tag", "unknown record '" + tag + "'");
      }
    }
    for (std::size_t i = line_; i < lines_.size(); ++i) {
      if (!lines_[i].empty()) {
        line_ = i + 1;
        fail("trailer", "content after 'end'");
      }
    }
    return plan;
  }

 private:
  std::vector<std::string> next(const std::string& what) {
    if (line_ >= lines_.size()) {
      line_ = lines_.size() + 1;
      fail(what, "unexpected end of document");
    }
    auto raw = lines_[line_++];
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      auto tab = raw.find('\t', start);
      fields.push_back(raw.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    return fields;
  }

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw ParseError(line_, field, what);
  }

  void expect_fields(const std::vector<std::string>& rec, std::size_t n, const std::string& what) const {
    if (rec.size() != n) {
      fail(what, "expected " + std::to_string(n) + " fields, found " + std::to_string(rec.size()));
    }
  }

  void expect_tag(const std::vector<std::string>& rec, const std::string& tag, std::size_t n) const {
    if (rec[0] != tag) fail(tag, "expected '" + tag + "' record, found '" + rec[0] + "'");
    expect_fields(rec, n, tag);
  }

  PlanKey read_key(const std::vector<std::string>& rec) const {
    expect_fields(rec, 9, "key");
    PlanKey k;
    k.name = text::unescape(rec[1]);
    auto type = parse_value_type(rec[2]);
    if (!type) fail("type", "unknown value type '" + rec[2] + "'");
    k.type = *type;
    auto kind = parse_arg_kind(rec[3]);
    if (!kind) fail("kind", "unknown argument kind '" + rec[3] + "'");
    k.kind = *kind;
    auto stage = parse_stage(rec[4]);
    if (!stage) fail("stage", "unknown stage '" + rec[4] + "'");
    k.stage = *stage;
    k.flag_names = decode_list(rec[5]);
    k.allowed = decode_list(rec[6]);
    if (rec[7] != "-") {
      try {
        k.default_value = decode_literal(text::unescape(rec[7]));
      } catch (const Error& e) {
        fail("default", e.what());
      }
    }
    k.doc = text::unescape(rec[8]);
    return k;
  }

  PlanStep read_step(const std::vector<std::string>& rec) const {
    expect_fields(rec, 8, "step");
    PlanStep s;
    s.var = text::unescape(rec[1]);
    s.factory_id = text::unescape(rec[2]);
    s.module_name = text::unescape(rec[3]);
    s.device_name = text::unescape(rec[4]);
    s.args = decode_list(rec[5]);
    s.key_args = decode_list(rec[6]);
    for (const auto& item : decode_list(rec[7])) {
      auto eq = item.find('=');
      if (eq == std::string::npos) fail("consts", "constant '" + item + "' has no '='");
      try {
        s.consts.emplace_back(item.substr(0, eq), decode_literal(item.substr(eq + 1)));
      } catch (const Error& e) {
        fail("consts", e.what());
      }
    }
    return s;
  }

  std::vector<std::string> lines_;
  std::size_t line_ = 0;
};

}  // namespace

std::string serialize_plan(const PlanDocument& plan) {
  auto keys = plan.key_table;
  std::sort(keys.begin(), keys.end(), [](const PlanKey& a, const PlanKey& b) { return a.name < b.name; });

  std::ostringstream os;
  os << "plan\t" << kPlanVersion << '\n';
  os << "app\t" << text::escape(plan.app_name) << '\n';
  os << "build-dir\t" << text::escape(plan.build_dir) << '\n';
  for (const auto& k : keys) {
    os << "key\t" << text::escape(k.name) << '\t' << to_string(k.type) << '\t' << to_string(k.kind) << '\t'
       << to_string(k.stage) << '\t' << text::join_escaped(k.flag_names, ',') << '\t'
       << text::join_escaped(k.allowed, ',') << '\t'
       << (k.default_value ? text::escape(encode_literal(*k.default_value)) : "-") << '\t' << text::escape(k.doc)
       << '\n';
  }
  for (const auto& s : plan.steps) {
    os << "step\t" << text::escape(s.var) << '\t' << text::escape(s.factory_id) << '\t' << text::escape(s.module_name)
       << '\t' << text::escape(s.device_name) << '\t' << text::join_escaped(s.args, ',') << '\t'
       << text::join_escaped(s.key_args, ',') << '\t' << encode_consts(s.consts) << '\n';
  }
  for (const auto& j : plan.jobs) os << "job\t" << text::escape(j) << '\n';
  os << "end\n";
  return os.str();
}

PlanDocument parse_plan(std::string_view text) { return PlanReader(text).read(); }

}  // namespace modglue
