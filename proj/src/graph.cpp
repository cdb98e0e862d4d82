#include "modglue/graph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "modglue/errors.hpp"
#include "modglue/text.hpp"

namespace modglue {

// ---------------------------------------------------------------------------
// build_graph

namespace {

class GraphBuilder {
 public:
  explicit GraphBuilder(FullGraph& g) : g_(g) {}

  // `pending` holds arguments still to be applied to `e`, outermost last.
  std::size_t build(const ImplExpr& e, std::vector<ImplExpr> pending) {
    switch (e.kind()) {
      case ImplExpr::Kind::Apply:
        pending.insert(pending.begin(), e.arg());
        return build(e.fn(), std::move(pending));
      case ImplExpr::Kind::Device: {
        const auto& d = e.device();
        auto name = d->name;
        if (d->generative) name += "#" + std::to_string(++generative_counts_[d->name]);
        auto id = add(FullNode{DeviceNode{d, std::move(name)}, {}});
        std::vector<std::size_t> children;
        for (const auto& a : pending) children.push_back(build(a, {}));
        g_.nodes[id].children = std::move(children);
        return id;
      }
      case ImplExpr::Kind::If: {
        auto id = add(FullNode{SwitchNode{e.condition(), {Literal{true}, Literal{false}}, false, true}, {}});
        std::vector<std::size_t> children{build(e.then_branch(), pending), build(e.else_branch(), pending)};
        g_.nodes[id].children = std::move(children);
        return id;
      }
      case ImplExpr::Kind::Match: {
        SwitchNode sw{e.condition(), {}, e.default_case().has_value()};
        for (const auto& c : e.cases()) sw.labels.push_back(c.label);
        auto id = add(FullNode{std::move(sw), {}});
        std::vector<std::size_t> children;
        for (const auto& c : e.cases()) children.push_back(build(c.impl, pending));
        if (e.default_case()) children.push_back(build(*e.default_case(), pending));
        g_.nodes[id].children = std::move(children);
        return id;
      }
    }
    throw InternalError("unknown expression kind");
  }

 private:
  std::size_t add(FullNode n) {
    g_.nodes.push_back(std::move(n));
    return g_.nodes.size() - 1;
  }

  FullGraph& g_;
  std::map<std::string, std::size_t> generative_counts_;
};

}  // namespace

FullGraph build_graph(const AppConfig& app) {
  FullGraph g;
  g.app_name = app.name;
  g.keys = app.keys;
  GraphBuilder builder(g);
  for (const auto& job : app.jobs) g.roots.push_back(builder.build(job, {}));
  return g;
}

// ---------------------------------------------------------------------------
// resolve_switches / dedup

namespace {

std::size_t select_branch(const SwitchNode& sw, const ResolvedKeys& keys) {
  for (const auto& k : sw.scrutinee.keys_mentioned()) {
    if (k.stage() == Stage::RuntimeOnly) {
      throw ConfigureError("cannot switch on runtime-only key '" + k.name() + "'");
    }
  }
  auto v = sw.scrutinee.eval(keys);
  if (!v.is_literal()) {
    throw ConfigureError("switch on " + sw.scrutinee.describe() + " evaluated to a " + std::string(v.kind()));
  }
  auto lit = v.as_literal();
  if (sw.is_if && !std::holds_alternative<bool>(lit)) {
    throw ConfigureError("if_ condition " + sw.scrutinee.describe() + " is not boolean");
  }
  for (std::size_t i = 0; i < sw.labels.size(); ++i) {
    if (sw.labels[i] == lit) return i;
  }
  if (sw.has_default) return sw.labels.size();
  throw ConfigureError("no case of " + sw.scrutinee.describe() + " matches '" + render_literal(lit) +
                       "' and there is no default");
}

std::vector<std::pair<std::string, std::optional<Literal>>> readings_for(const ConfigurableDevice& d,
                                                                         const ResolvedKeys& keys) {
  std::vector<std::pair<std::string, std::optional<Literal>>> out;
  for (const auto& k : d.keys) {
    auto entry = keys.find(k.name());
    out.emplace_back(k.name(), entry ? entry->value : std::nullopt);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct Identity {
  std::string name;
  std::string module_name;
  std::vector<std::pair<std::string, std::optional<Literal>>> readings;
  std::vector<std::size_t> children;

  friend bool operator==(const Identity&, const Identity&) = default;
};

struct IdentityHash {
  std::size_t operator()(const Identity& id) const {
    std::size_t h = std::hash<std::string>{}(id.name);
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    mix(std::hash<std::string>{}(id.module_name));
    for (const auto& [k, v] : id.readings) {
      mix(std::hash<std::string>{}(k));
      mix(v ? std::hash<std::string>{}(encode_literal(*v)) : 0);
    }
    for (auto c : id.children) mix(c);
    return h;
  }
};

}  // namespace

ResolvedGraph resolve_switches(const FullGraph& g, const ResolvedKeys& keys) {
  ResolvedGraph out;
  out.app_name = g.app_name;

  std::function<std::size_t(std::size_t)> go = [&](std::size_t id) -> std::size_t {
    const auto& node = g.nodes[id];
    if (auto sw = std::get_if<SwitchNode>(&node.content)) return go(node.children[select_branch(*sw, keys)]);
    const auto& dn = std::get<DeviceNode>(node.content);
    std::vector<std::size_t> children;
    for (auto c : node.children) children.push_back(go(c));
    out.nodes.push_back(ResolvedNode{dn.device, dn.name, readings_for(*dn.device, keys), std::move(children)});
    return out.nodes.size() - 1;
  };

  for (auto r : g.roots) out.roots.push_back(go(r));
  return out;
}

ResolvedGraph dedup(const ResolvedGraph& g) {
  ResolvedGraph out;
  out.app_name = g.app_name;
  std::unordered_map<Identity, std::size_t, IdentityHash> canon;
  std::vector<std::optional<std::size_t>> remap(g.nodes.size());
  std::vector<int> state(g.nodes.size(), 0);

  std::function<std::size_t(std::size_t)> go = [&](std::size_t id) -> std::size_t {
    if (remap[id]) return *remap[id];
    if (state[id] == 1) throw InternalError("cycle in resolved graph at node " + g.nodes[id].name);
    state[id] = 1;
    const auto& n = g.nodes[id];
    Identity ident{n.name, n.device->module_name, n.key_readings, {}};
    for (auto c : n.children) ident.children.push_back(go(c));
    auto [it, inserted] = canon.try_emplace(ident, out.nodes.size());
    if (inserted) out.nodes.push_back(ResolvedNode{n.device, n.name, n.key_readings, ident.children});
    state[id] = 2;
    remap[id] = it->second;
    return it->second;
  };

  for (auto r : g.roots) {
    auto mapped = go(r);
    if (std::find(out.roots.begin(), out.roots.end(), mapped) == out.roots.end()) out.roots.push_back(mapped);
  }
  return out;
}

ResolvedGraph resolve(const FullGraph& g, const ResolvedKeys& keys) { return dedup(resolve_switches(g, keys)); }

// ---------------------------------------------------------------------------
// Ordering

namespace {

template <class Children>
std::vector<std::size_t> depths(std::size_t count, Children children_of) {
  std::vector<std::size_t> depth(count, 0);
  std::vector<int> state(count, 0);
  std::function<std::size_t(std::size_t)> go = [&](std::size_t id) -> std::size_t {
    if (state[id] == 2) return depth[id];
    if (state[id] == 1) throw InternalError("cycle detected in configuration graph");
    state[id] = 1;
    std::size_t d = 0;
    for (auto c : children_of(id)) d = std::max(d, go(c) + 1);
    depth[id] = d;
    state[id] = 2;
    return d;
  };
  for (std::size_t i = 0; i < count; ++i) go(i);
  return depth;
}

}  // namespace

std::vector<std::size_t> topo_order(const ResolvedGraph& g) {
  auto depth = depths(g.nodes.size(), [&](std::size_t i) -> const auto& { return g.nodes[i].children; });
  std::vector<std::size_t> order(g.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& na = g.nodes[a];
    const auto& nb = g.nodes[b];
    return std::tie(depth[a], na.name, na.device->module_name, a) <
           std::tie(depth[b], nb.name, nb.device->module_name, b);
  });
  return order;
}

// ---------------------------------------------------------------------------
// DOT

namespace {

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

std::string join_label(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i != 0) out += "\\n";
    out += dot_escape(lines[i]);
  }
  return out;
}

}  // namespace

std::string to_dot(const ResolvedGraph& g) {
  auto order = topo_order(g);
  std::vector<std::size_t> dot_id(g.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) dot_id[order[i]] = i;

  std::ostringstream os;
  os << "digraph " << text::quote(g.app_name) << " {\n";
  for (auto id : order) {
    const auto& n = g.nodes[id];
    std::vector<std::string> label{n.device->module_name, "name=" + n.name};
    for (const auto& [k, v] : n.key_readings) label.push_back(k + "=" + (v ? render_literal(*v) : "<unset>"));
    os << "  n" << dot_id[id] << " [shape=box, label=\"" << join_label(label) << "\"];\n";
  }
  for (auto id : order) {
    for (auto c : g.nodes[id].children) os << "  n" << dot_id[id] << " -> n" << dot_id[c] << ";\n";
  }
  os << "}\n";
  return os.str();
}

std::string to_dot(const FullGraph& g) {
  auto depth = depths(g.nodes.size(), [&](std::size_t i) -> const auto& { return g.nodes[i].children; });
  auto sort_name = [&](std::size_t i) -> std::pair<std::string, std::string> {
    if (auto dn = std::get_if<DeviceNode>(&g.nodes[i].content)) return {dn->name, dn->device->module_name};
    return {"", ""};
  };
  std::vector<std::size_t> order(g.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto sa = sort_name(a);
    auto sb = sort_name(b);
    return std::tie(depth[a], sa, a) < std::tie(depth[b], sb, b);
  });
  std::vector<std::size_t> dot_id(g.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) dot_id[order[i]] = i;

  std::ostringstream os;
  os << "digraph " << text::quote(g.app_name) << " {\n";
  for (auto id : order) {
    const auto& n = g.nodes[id];
    if (auto dn = std::get_if<DeviceNode>(&n.content)) {
      std::vector<std::string> label{dn->device->module_name, "name=" + dn->name};
      for (const auto& k : dn->device->keys) label.push_back(k.name());
      os << "  n" << dot_id[id] << " [shape=box, label=\"" << join_label(label) << "\"];\n";
    } else {
      const auto& sw = std::get<SwitchNode>(n.content);
      std::string keys;
      for (const auto& k : sw.scrutinee.keys_mentioned()) keys += (keys.empty() ? "" : ", ") + k.name();
      if (keys.empty()) keys = sw.scrutinee.describe();
      os << "  n" << dot_id[id] << " [shape=ellipse, label=\"" << dot_escape(keys) << "\"];\n";
    }
  }
  for (auto id : order) {
    const auto& n = g.nodes[id];
    const auto* sw = std::get_if<SwitchNode>(&n.content);
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      os << "  n" << dot_id[id] << " -> n" << dot_id[n.children[i]];
      if (sw) {
        auto lbl = i < sw->labels.size() ? render_literal(sw->labels[i]) : std::string("default");
        os << " [label=\"" << dot_escape(lbl) << "\"]";
      }
      os << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string canonical_form(const ResolvedGraph& g) {
  std::function<std::string(std::size_t)> render = [&](std::size_t id) {
    const auto& n = g.nodes[id];
    std::string s = "(" + n.device->module_name + " " + n.name;
    for (const auto& [k, v] : n.key_readings) s += " " + k + "=" + (v ? encode_literal(*v) : "-");
    for (auto c : n.children) s += " " + render(c);
    return s + ")";
  };
  std::string out = "nodes=" + std::to_string(g.nodes.size()) + "\n";
  for (auto r : g.roots) out += render(r) + "\n";
  return out;
}

}  // namespace modglue
