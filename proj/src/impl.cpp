#include "modglue/impl.hpp"

#include <algorithm>
#include <variant>

#include "modglue/errors.hpp"
#include "modglue/text.hpp"

namespace modglue {

struct ImplExpr::Node {
  struct Device {
    std::shared_ptr<const ConfigurableDevice> device;
  };
  struct Apply {
    ImplExpr fn;
    ImplExpr arg;
  };
  struct If {
    KeyValue condition;
    ImplExpr then_branch;
    ImplExpr else_branch;
  };
  struct Match {
    KeyValue scrutinee;
    std::vector<MatchCase> cases;
    std::optional<ImplExpr> default_case;
  };

  SignatureType type;
  std::variant<Device, Apply, If, Match> content;
};

ImplExpr::Kind ImplExpr::kind() const { return static_cast<Kind>(node_->content.index()); }

const SignatureType& ImplExpr::type() const { return node_->type; }

const std::shared_ptr<const ConfigurableDevice>& ImplExpr::device() const {
  return std::get<Node::Device>(node_->content).device;
}

const ImplExpr& ImplExpr::fn() const { return std::get<Node::Apply>(node_->content).fn; }

const ImplExpr& ImplExpr::arg() const { return std::get<Node::Apply>(node_->content).arg; }

const KeyValue& ImplExpr::condition() const {
  if (auto m = std::get_if<Node::Match>(&node_->content)) return m->scrutinee;
  return std::get<Node::If>(node_->content).condition;
}

const ImplExpr& ImplExpr::then_branch() const { return std::get<Node::If>(node_->content).then_branch; }

const ImplExpr& ImplExpr::else_branch() const { return std::get<Node::If>(node_->content).else_branch; }

const std::vector<MatchCase>& ImplExpr::cases() const { return std::get<Node::Match>(node_->content).cases; }

const std::optional<ImplExpr>& ImplExpr::default_case() const {
  return std::get<Node::Match>(node_->content).default_case;
}

ImplExpr apply(const ImplExpr& fn, const ImplExpr& arg) {
  const auto& ft = fn.type();
  if (!ft.is_arrow()) {
    throw TypeMismatch("cannot apply an implementation of type " + ft.render() + ", which is not a functor");
  }
  if (ft.param() != arg.type()) {
    throw TypeMismatch("functor expects an argument of type " + ft.param().render() + " but got " +
                       arg.type().render());
  }
  return ImplExpr(std::make_shared<const ImplExpr::Node>(ImplExpr::Node{ft.result(), ImplExpr::Node::Apply{fn, arg}}));
}

ImplExpr if_(KeyValue condition, ImplExpr then_branch, ImplExpr else_branch) {
  if (then_branch.type() != else_branch.type()) {
    throw TypeMismatch("if_ branches disagree: " + then_branch.type().render() + " vs " +
                       else_branch.type().render());
  }
  auto type = then_branch.type();
  return ImplExpr(std::make_shared<const ImplExpr::Node>(ImplExpr::Node{
      std::move(type), ImplExpr::Node::If{std::move(condition), std::move(then_branch), std::move(else_branch)}}));
}

ImplExpr match_(KeyValue scrutinee, std::vector<MatchCase> cases, std::optional<ImplExpr> default_case) {
  if (cases.empty() && !default_case) throw DefinitionError("match_ needs at least one case or a default");
  for (std::size_t i = 0; i < cases.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (cases[i].label == cases[j].label) {
        throw DefinitionError("match_ case '" + render_literal(cases[i].label) + "' appears twice");
      }
    }
  }
  const SignatureType& type = cases.empty() ? default_case->type() : cases.front().impl.type();
  for (const auto& c : cases) {
    if (c.impl.type() != type) {
      throw TypeMismatch("match_ case '" + render_literal(c.label) + "' has type " + c.impl.type().render() +
                         ", expected " + type.render());
    }
  }
  if (default_case && default_case->type() != type) {
    throw TypeMismatch("match_ default has type " + default_case->type().render() + ", expected " + type.render());
  }
  auto t = type;
  return ImplExpr(std::make_shared<const ImplExpr::Node>(ImplExpr::Node{
      std::move(t), ImplExpr::Node::Match{std::move(scrutinee), std::move(cases), std::move(default_case)}}));
}

ImplExpr foreign(std::string module_name, SignatureType type, ForeignOptions opts) {
  if (!type.is_set()) throw DefinitionError("foreign " + module_name + " has no type");
  ConfigurableDevice d;
  d.name = opts.name ? *opts.name : default_device_name(module_name);
  d.module_name = module_name;
  d.connect.factory_id = std::move(module_name);
  for (std::size_t i = 0; i < type.arity(); ++i) d.connect.arg_roles.push_back("arg" + std::to_string(i + 1));
  for (const auto& k : opts.keys) d.connect.key_args.push_back(k.name());
  d.type = std::move(type);
  d.keys = std::move(opts.keys);
  d.packages = std::move(opts.packages);
  d.generative = opts.generative;
  return define_device(std::move(d));
}

ImplExpr define_device(ConfigurableDevice device) {
  if (!device.type.is_set()) throw DefinitionError("device " + device.name + " has no type");
  if (device.name.empty()) throw DefinitionError("device of module " + device.module_name + " has no name");
  if (device.connect.arg_roles.size() != device.type.arity()) {
    throw DefinitionError("device " + device.name + ": type " + device.type.render() + " takes " +
                          std::to_string(device.type.arity()) + " argument(s) but the connect recipe expects " +
                          std::to_string(device.connect.arg_roles.size()));
  }
  for (const auto& k : device.connect.key_args) {
    bool owned = std::any_of(device.keys.begin(), device.keys.end(), [&](const KeySpec& s) { return s.name() == k; });
    if (!owned) throw DefinitionError("device " + device.name + ": connect uses key '" + k + "' it does not declare");
  }
  auto type = device.type;
  return ImplExpr(std::make_shared<const ImplExpr::Node>(
      ImplExpr::Node{std::move(type), ImplExpr::Node::Device{std::make_shared<const ConfigurableDevice>(std::move(device))}}));
}

SignatureType job_type() { return base_type("job"); }

namespace {

void collect_keys(const ImplExpr& e, std::vector<KeySpec>& out) {
  auto add = [&out](const KeySpec& k) {
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  };
  switch (e.kind()) {
    case ImplExpr::Kind::Device:
      for (const auto& k : e.device()->keys) add(k);
      for (const auto& k : e.device()->packages.keys_mentioned()) add(k);
      break;
    case ImplExpr::Kind::Apply:
      collect_keys(e.fn(), out);
      collect_keys(e.arg(), out);
      break;
    case ImplExpr::Kind::If:
      for (const auto& k : e.condition().keys_mentioned()) add(k);
      collect_keys(e.then_branch(), out);
      collect_keys(e.else_branch(), out);
      break;
    case ImplExpr::Kind::Match:
      for (const auto& k : e.condition().keys_mentioned()) add(k);
      for (const auto& c : e.cases()) collect_keys(c.impl, out);
      if (e.default_case()) collect_keys(*e.default_case(), out);
      break;
  }
}

}  // namespace

AppConfig register_app(std::string name, std::vector<ImplExpr> jobs, const KeyRegistry& keys) {
  if (!text::is_identifier(name)) throw DefinitionError("invalid application name '" + name + "'");
  if (jobs.empty()) throw DefinitionError("application " + name + " registers no jobs");
  auto job = job_type();
  for (const auto& j : jobs) {
    if (j.type() != job) throw TypeMismatch("registered job has type " + j.type().render() + ", expected job");
  }
  std::vector<KeySpec> used;
  for (const auto& j : jobs) collect_keys(j, used);
  for (const auto& k : used) {
    if (!keys.contains(k)) throw DefinitionError("key '" + k.name() + "' is used but not declared in the registry");
  }
  return AppConfig{std::move(name), std::move(jobs), keys.keys()};
}

}  // namespace modglue
