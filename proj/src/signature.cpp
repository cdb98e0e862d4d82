#include "modglue/signature.hpp"

#include "modglue/errors.hpp"
#include "modglue/text.hpp"

namespace modglue {

struct SignatureType::Node {
  std::string name;
  std::shared_ptr<const Node> param;
  std::shared_ptr<const Node> result;
};

SignatureType SignatureType::base(std::string_view name) {
  if (!text::is_identifier(name)) {
    throw DefinitionError("invalid signature name '" + std::string(name) + "'");
  }
  return SignatureType(std::make_shared<const Node>(Node{std::string(name), nullptr, nullptr}));
}

SignatureType SignatureType::arrow(SignatureType param, SignatureType result) {
  if (!param.is_set() || !result.is_set()) {
    throw DefinitionError("arrow over an unset signature type");
  }
  return SignatureType(
      std::make_shared<const Node>(Node{{}, std::move(param.node_), std::move(result.node_)}));
}

bool SignatureType::is_arrow() const { return node_->param != nullptr; }

const std::string& SignatureType::name() const { return node_->name; }

SignatureType SignatureType::param() const { return SignatureType(node_->param); }

SignatureType SignatureType::result() const { return SignatureType(node_->result); }

std::size_t SignatureType::arity() const {
  std::size_t n = 0;
  for (const Node* p = node_.get(); p->param; p = p->result.get()) ++n;
  return n;
}

SignatureType SignatureType::final_result() const {
  auto p = node_;
  while (p->param) p = p->result;
  return SignatureType(p);
}

std::string SignatureType::render() const {
  if (!is_set()) return "<unset>";
  if (!is_arrow()) return node_->name;
  auto lhs = param();
  auto shown = lhs.is_arrow() ? "(" + lhs.render() + ")" : lhs.render();
  return shown + " -> " + result().render();
}

bool operator==(const SignatureType& a, const SignatureType& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.is_arrow() != b.is_arrow()) return false;
  if (!a.is_arrow()) return a.node_->name == b.node_->name;
  return a.param() == b.param() && a.result() == b.result();
}

}  // namespace modglue
