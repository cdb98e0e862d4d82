#include "random_config.hpp"

#include <functional>
#include <stdexcept>

namespace testsupport {

using namespace modglue;

namespace {

struct Pool {
  KeyRegistry registry;
  KeySpec k_int;
  KeySpec k_mode;
  KeySpec k_flag;
  SignatureType a = base_type("a");
  SignatureType b = base_type("b");
  SignatureType job = job_type();

  Pool()
      : k_int(registry.create("k_int", ArgSpec::opt(ValueType::Int, std::int64_t{1}, {"k", "k_int"}))),
        k_mode(registry.create("k_mode", ArgSpec::opt_enum({"x", "y", "z"}, "x"), Stage::ConfigureOnly)),
        k_flag(registry.create("k_flag", ArgSpec::flag(), Stage::ConfigureOnly)) {}

  ImplExpr dev(const std::string& module, const std::string& name, SignatureType t, std::vector<KeySpec> keys = {},
               bool generative = false) const {
    return foreign(module, std::move(t), {.name = name, .keys = std::move(keys), .generative = generative});
  }
};

class Generator {
 public:
  Generator(Pool& pool, std::mt19937_64& rng) : p_(pool), rng_(rng) {}

  ImplExpr gen(const SignatureType& t, std::size_t budget) {
    if (t == p_.job) return gen_job(budget);
    if (budget >= 4 && chance(0.15) && t == p_.b) {
      // b -> b switch applied afterwards
      auto [x, rest] = split(budget - 2);
      auto [y, z] = split(rest);
      auto g1 = dev("G", "g", arrow(p_.a, arrow(p_.b, p_.b)));
      auto g2 = dev("G", "g", arrow(p_.a, arrow(p_.b, p_.b)));
      auto sw = if_(condition(), g1(gen(p_.a, x)), g2(gen(p_.a, y)));
      return apply(sw, gen(p_.b, z));
    }
    if (budget >= 2 && chance(0.25)) {
      auto [l, r] = split(budget);
      if (chance(0.5)) return if_(condition(), gen(t, l), gen(t, r));
      return mode_match(t, l, r);
    }
    return t == p_.a ? gen_a(budget) : gen_b(budget);
  }

 private:
  ImplExpr gen_a(std::size_t budget) {
    if (budget >= 2 && chance(0.55)) {
      switch (pick(3)) {
        case 0: return dev("F", "f", arrow(p_.a, p_.a))(gen(p_.a, budget - 1));
        case 1: return dev("H", "h", arrow(p_.b, p_.a))(gen(p_.b, budget - 1));
        default: return dev("Gen", "gen", arrow(p_.a, p_.a), {}, true)(gen(p_.a, budget - 1));
      }
    }
    switch (pick(6)) {
      case 0: return dev("Leaf", "leaf", p_.a);
      case 1: return dev("Leaf", "leaf", p_.a, {p_.k_int});
      case 2: return dev("Leaf", "leaf_2", p_.a);
      case 3: return dev("Other", "leaf", p_.a);
      case 4: return dev("Logger", "logger", p_.a, {}, true);
      default: return dev("Leaf", "leaf", p_.a);
    }
  }

  ImplExpr gen_b(std::size_t budget) {
    if (budget >= 3 && chance(0.5)) {
      auto [x, y] = split(budget - 1);
      return dev("G", "g", arrow(p_.a, arrow(p_.b, p_.b)))(gen(p_.a, x), gen(p_.b, y));
    }
    return chance(0.6) ? dev("Bleaf", "bleaf", p_.b, {p_.k_mode}) : dev("Bleaf", "bleaf_2", p_.b);
  }

  ImplExpr gen_job(std::size_t budget) {
    if (budget < 3 || chance(0.3)) return dev("Main1", "main1", arrow(p_.a, p_.job))(gen(p_.a, budget - 1));
    auto main = [&] { return dev("Main", "main", arrow(p_.a, arrow(p_.b, p_.job))); };
    if (budget >= 6 && chance(0.3)) {
      // functor-typed match, argument pushed into every branch
      auto [x, rest] = split(budget - 3);
      auto [y, z] = split(rest);
      auto sw = match_(value_of(p_.k_mode), {{std::string("x"), main()(gen(p_.a, x))}},
                       main()(gen(p_.a, y)));
      return apply(sw, gen(p_.b, z));
    }
    auto [x, y] = split(budget - 1);
    return main()(gen(p_.a, x), gen(p_.b, y));
  }

  ImplExpr mode_match(const SignatureType& t, std::size_t l, std::size_t r) {
    if (chance(0.5)) return match_(value_of(p_.k_mode), {{std::string("y"), gen(t, l)}}, gen(t, r));
    auto [r1, r2] = split(r);
    if (r1 == 0 || r2 == 0) return match_(value_of(p_.k_mode), {{std::string("x"), gen(t, l)}}, gen(t, r));
    return match_(value_of(p_.k_mode),
                  {{std::string("x"), gen(t, l)}, {std::string("y"), gen(t, r1)}, {std::string("z"), gen(t, r2)}});
  }

  KeyValue condition() {
    if (chance(0.5)) return value_of(p_.k_flag);
    return map([](const Value& v) { return Value(v.as_int() > 1); }, value_of(p_.k_int));
  }

  ImplExpr dev(const std::string& m, const std::string& n, SignatureType t, std::vector<KeySpec> k = {},
               bool g = false) {
    return p_.dev(m, n, std::move(t), std::move(k), g);
  }

  // Splits `n` into two parts, each >= 1 when n >= 2.
  std::pair<std::size_t, std::size_t> split(std::size_t n) {
    if (n < 2) return {n, 0};
    auto first = std::uniform_int_distribution<std::size_t>(1, n - 1)(rng_);
    return {first, n - first};
  }

  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  Pool& p_;
  std::mt19937_64& rng_;
};

std::size_t count_leaves(const ImplExpr& e) {
  switch (e.kind()) {
    case ImplExpr::Kind::Device: return 1;
    case ImplExpr::Kind::Apply: return count_leaves(e.fn()) + count_leaves(e.arg());
    case ImplExpr::Kind::If: return count_leaves(e.then_branch()) + count_leaves(e.else_branch());
    case ImplExpr::Kind::Match: {
      std::size_t n = e.default_case() ? count_leaves(*e.default_case()) : 0;
      for (const auto& c : e.cases()) n += count_leaves(c.impl);
      return n;
    }
  }
  return 0;
}

RandomApp random_app_once(std::mt19937_64& rng, std::size_t max_devices) {
  Pool pool;
  Generator gen(pool, rng);
  std::vector<ImplExpr> jobs;
  if (max_devices >= 6 && std::bernoulli_distribution(0.3)(rng)) {
    auto first = std::uniform_int_distribution<std::size_t>(3, max_devices - 3)(rng);
    jobs.push_back(gen.gen(pool.job, first));
    jobs.push_back(gen.gen(pool.job, max_devices - first));
  } else {
    auto n = std::uniform_int_distribution<std::size_t>(2, max_devices)(rng);
    jobs.push_back(gen.gen(pool.job, n));
  }

  CliFlags cli;
  std::uniform_int_distribution<int> coin(0, 1);
  if (coin(rng)) cli["k_int"] = std::to_string(std::uniform_int_distribution<int>(0, 3)(rng));
  if (coin(rng)) cli["k_mode"] = std::string(1, "xyz"[std::uniform_int_distribution<int>(0, 2)(rng)]);
  if (coin(rng)) cli["k_flag"] = "true";

  RandomApp out{register_app("random", std::move(jobs), pool.registry), {}, max_devices};
  out.keys = resolve_keys(out.app.keys, cli, nullptr, Phase::Configure);
  return out;
}

}  // namespace

RandomApp random_app(std::mt19937_64& rng, std::size_t max_devices) {
  for (;;) {
    auto out = random_app_once(rng, max_devices);
    std::size_t leaves = 0;
    for (const auto& j : out.app.jobs) leaves += count_leaves(j);
    if (leaves <= max_devices) return out;
  }
}

namespace {

OracleTree select(const ImplExpr& e, const ResolvedKeys& keys) {
  switch (e.kind()) {
    case ImplExpr::Kind::Device: {
      auto n = std::make_shared<OracleNode>();
      const auto& d = *e.device();
      n->module = d.module_name;
      n->name = d.name;
      n->generative = d.generative;
      std::map<std::string, std::string> rs;
      for (const auto& k : d.keys) rs[k.name()] = render_literal(keys.value(k.name()));
      n->readings.assign(rs.begin(), rs.end());
      return n;
    }
    case ImplExpr::Kind::Apply: {
      auto head = select(e.fn(), keys);
      head->children.push_back(select(e.arg(), keys));
      return head;
    }
    case ImplExpr::Kind::If:
      return e.condition().eval(keys).as_bool() ? select(e.then_branch(), keys) : select(e.else_branch(), keys);
    case ImplExpr::Kind::Match: {
      auto v = e.condition().eval(keys).as_literal();
      for (const auto& c : e.cases()) {
        if (c.label == v) return select(c.impl, keys);
      }
      if (!e.default_case()) throw std::runtime_error("oracle: no case matches");
      return select(*e.default_case(), keys);
    }
  }
  throw std::logic_error("unknown kind");
}

void collect(const OracleTree& t, std::vector<const OracleNode*>& out) {
  out.push_back(t.get());
  for (const auto& c : t->children) collect(c, out);
}

}  // namespace

std::vector<OracleTree> oracle_select(const AppConfig& app, const ResolvedKeys& keys) {
  std::vector<OracleTree> out;
  for (const auto& j : app.jobs) out.push_back(select(j, keys));
  return out;
}

bool oracle_equal(const OracleNode& a, const OracleNode& b) {
  if (&a == &b) return true;
  if (a.generative || b.generative) return false;
  if (a.module != b.module || a.name != b.name || a.readings != b.readings) return false;
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!oracle_equal(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

std::size_t oracle_size(const std::vector<OracleTree>& trees) {
  std::vector<const OracleNode*> all;
  for (const auto& t : trees) collect(t, all);
  return all.size();
}

std::size_t oracle_distinct(const std::vector<OracleTree>& trees) {
  std::vector<const OracleNode*> all;
  for (const auto& t : trees) collect(t, all);
  std::vector<const OracleNode*> reps;
  for (auto n : all) {
    bool found = false;
    for (auto r : reps) {
      if (oracle_equal(*n, *r)) {
        found = true;
        break;
      }
    }
    if (!found) reps.push_back(n);
  }
  return reps.size();
}

std::vector<OracleTree> expand(const ResolvedGraph& g) {
  std::function<OracleTree(std::size_t)> go = [&](std::size_t id) {
    const auto& rn = g.nodes[id];
    auto n = std::make_shared<OracleNode>();
    n->module = rn.device->module_name;
    n->name = rn.device->name;
    n->generative = rn.device->generative;
    for (const auto& [k, v] : rn.key_readings) n->readings.emplace_back(k, v ? render_literal(*v) : "<deferred>");
    for (auto c : rn.children) n->children.push_back(go(c));
    return n;
  };
  std::vector<OracleTree> out;
  for (auto r : g.roots) out.push_back(go(r));
  return out;
}

bool same_shape(const OracleNode& a, const OracleNode& b) {
  if (a.module != b.module || a.name != b.name || a.generative != b.generative || a.readings != b.readings) {
    return false;
  }
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!same_shape(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

}  // namespace testsupport
