#include "doctest.h"

#include <atomic>
#include <map>
#include <set>

#include "cli_harness.hpp"
#include "modglue/errors.hpp"
#include "modglue/fileserver/network.hpp"

using namespace modglue;
using namespace testsupport;
namespace fsrv = modglue::fileserver;
namespace fs = std::filesystem;

namespace {

struct Env {
  TempDir dir;
  ConfigDefinition def = fileserver_definition();
  FactoryRegistry factories = fileserver_factories();

  CliResult operator()(std::vector<std::string> args, std::stop_token stop = {}) const {
    args.insert(args.begin(), {"--build-dir", dir.path().string()});
    return run_tool(args, def, factories, stop);
  }
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("describe on a fresh config") {
  TempDir dir;
  ScopedCwd cwd(dir.path());
  auto r = run_tool({"describe"}, fileserver_definition(), fileserver_factories());
  CHECK(r.code == exit_code::ok);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 5);
  CHECK(ls[0] == "Name       filesrv");
  CHECK(ls[1] == "Build-dir  .");
  CHECK(ls[2] == "Keys       store=crunch (default)");
  CHECK(ls[3] == "           fs=data/ (default)");
  CHECK(ls[4] == "           port=80 (default)");
  CHECK(r.err.empty());
}

TEST_CASE("describe echoes the configured values") {
  Env env;
  REQUIRE(env({"configure", "--store", "direct"}).code == 0);
  auto r = env({"describe"});
  CHECK(r.code == 0);
  CHECK(r.out.find("Keys       store=direct\n") != std::string::npos);
  CHECK(r.out.find("port=80 (default)") != std::string::npos);

  auto v = env({"describe", "--verbose"});
  CHECK(v.code == 0);
  CHECK(v.out.find("Packages   ") != std::string::npos);
  CHECK(v.out.find("fs-direct") != std::string::npos);
  CHECK(env({"describe", "--bogus"}).code == exit_code::usage);
}

TEST_CASE("command line errors") {
  Env env;
  CHECK(env({}).code == exit_code::usage);
  auto help = env({"--help"});
  CHECK(help.code == exit_code::ok);
  CHECK(help.out.rfind("usage: modglue", 0) == 0);
  CHECK(env({"frobnicate"}).code == exit_code::usage);
  CHECK(env({"configure", "--nope", "1"}).code == exit_code::usage);
  CHECK(env({"configure", "stray"}).code == exit_code::usage);
  auto bogus = env({"configure", "--store", "bogus"});
  CHECK(bogus.code == exit_code::keys);
  CHECK(bogus.err.find("crunch, direct") != std::string::npos);
  CHECK(bogus.out.empty());
  CHECK(env({"configure", "-p", "eighty"}).code == exit_code::keys);
  CHECK(env({"build", "extra"}).code == exit_code::usage);
  CHECK(run_tool({"--build-dir"}, env.def, env.factories).code == exit_code::usage);
}

TEST_CASE("ill-typed definitions exit with 3") {
  Env env;
  env.def.define = [] {
    KeyRegistry r;
    auto port = r.create("port", ArgSpec::opt(ValueType::Int, std::int64_t{80}));
    return register_app("bad", {fsrv::make_server()(fsrv::tcpip(port))}, r);
  };
  CHECK(env({"configure"}).code == exit_code::definition);
  CHECK(env({"describe"}).code == exit_code::definition);
}

TEST_CASE("configure writes the artifacts") {
  Env env;
  auto r = env({"configure", "--store", "direct", "--fs", "/my/files", "-p", "42"});
  CHECK(r.code == 0);
  for (auto f : {"keys.cfg", "plan.fplan", "main.glue", "app.dot"}) CHECK(fs::exists(env.dir / f));
  auto plan = parse_plan(slurp(env.dir / "plan.fplan"));
  std::set<std::string> modules;
  for (const auto& s : plan.steps) modules.insert(s.module_name);
  CHECK(modules == std::set<std::string>{"Direct", "Tcpip", "Server_modular.Make"});
  CHECK(plan.key_table.at(0).default_value == Literal{std::int64_t{42}});
  CHECK(slurp(env.dir / "app.dot").find("ellipse") == std::string::npos);
}

TEST_CASE("configure is byte-reproducible") {
  Env env;
  std::vector<std::string> args{"configure", "--store", "crunch", "-p", "8080"};
  REQUIRE(env(args).code == 0);
  auto first = tree(env.dir.path());
  REQUIRE(env(args).code == 0);
  CHECK(tree(env.dir.path()) == first);
}

TEST_CASE("build needs a current configuration") {
  Env env;
  CHECK(env({"build"}).code == exit_code::stale);
  CHECK(env({"run"}).code == exit_code::stale);

  REQUIRE(env({"configure", "--store", "direct"}).code == 0);
  Env other;
  other.def.define = fsrv::static_config;
  auto stale = run_tool({"--build-dir", env.dir.path().string(), "build"}, other.def, other.factories);
  CHECK(stale.code == exit_code::stale);
  CHECK(stale.err.find("stale") != std::string::npos);

  write_text(env.dir / "keys.cfg", "garbage\n");
  CHECK(env({"build"}).code == exit_code::stale);
}

TEST_CASE("build snapshots the crunch directory and is idempotent") {
  Env env;
  write_text(env.dir / "site/index.html", "<h1>hi</h1>");
  write_text(env.dir / "site/a/b.txt", "nested");
  REQUIRE(env({"configure", "--fs", (env.dir / "site").string()}).code == 0);
  CHECK(env({"build"}).code == 0);
  REQUIRE(fs::exists(env.dir / "crunch.crunch"));
  auto snap = fsrv::read_crunch_snapshot(env.dir / "crunch.crunch");
  CHECK(snap == std::map<std::string, std::string>{{"a/b.txt", "nested"}, {"index.html", "<h1>hi</h1>"}});
  auto first = tree(env.dir.path());
  CHECK(env({"build"}).code == 0);
  CHECK(tree(env.dir.path()) == first);
}

TEST_CASE("hook failures name the device") {
  Env env;
  REQUIRE(env({"configure", "--fs", (env.dir / "does-not-exist").string()}).code == 0);
  auto r = env({"build"});
  CHECK(r.code == exit_code::device);
  CHECK(r.err.find("crunch") != std::string::npos);
}

TEST_CASE("hooks run once per node in topological order") {
  auto calls = std::make_shared<std::vector<std::string>>();
  Env env;
  env.def.define = [calls] {
    KeyRegistry r;
    auto record = [calls](const char* phase) {
      return [calls, phase](const Info&, const std::string& node) { calls->push_back(std::string(phase) + ":" + node); };
    };
    auto device = [&](const std::string& name, SignatureType t, std::size_t arity) {
      ConfigurableDevice d;
      d.name = name;
      d.module_name = name;
      d.type = std::move(t);
      d.connect.factory_id = name;
      for (std::size_t i = 0; i < arity; ++i) d.connect.arg_roles.push_back("x");
      d.configure = record("configure");
      d.build = record("build");
      d.clean = record("clean");
      return define_device(d);
    };
    auto a = base_type("a");
    auto shared = [&] { return device("leaf", a, 0); };
    auto left = device("left", arrow(a, a), 1)(shared());
    auto right = device("right", arrow(a, a), 1)(shared());
    auto top = device("top", functor_type(a, a, job_type()), 2)(left, right);
    return register_app("hooks", {top}, r);
  };
  REQUIRE(env({"configure"}).code == 0);
  CHECK(calls->empty());
  REQUIRE(env({"build"}).code == 0);
  CHECK(*calls == std::vector<std::string>{"configure:leaf", "configure:left", "configure:right", "configure:top",
                                           "build:leaf", "build:left", "build:right", "build:top"});
  calls->clear();
  REQUIRE(env({"clean"}).code == 0);
  CHECK(*calls == std::vector<std::string>{"clean:leaf", "clean:left", "clean:right", "clean:top"});
}

TEST_CASE("run error paths") {
  SUBCASE("configure-only key at runtime") {
    Env env;
    REQUIRE(env({"configure", "--store", "direct"}).code == 0);
    CHECK(env({"run", "--store", "crunch"}).code == exit_code::keys);
    CHECK(env({"run", "--what"}).code == exit_code::usage);
  }
  SUBCASE("plan-only device") {
    Env env;
    env.def.define = [] {
      KeyRegistry r;
      return register_app("orphan", {foreign("Unikernel.Main", job_type())}, r);
    };
    REQUIRE(env({"configure"}).code == 0);
    REQUIRE(env({"build"}).code == 0);
    auto r = env({"run"});
    CHECK(r.code == exit_code::unregistered);
    CHECK(r.err.find("Unikernel.Main") != std::string::npos);
  }
  SUBCASE("device start failure") {
    Env env;
    REQUIRE(env({"configure", "--store", "direct", "-p", "70000"}).code == 0);
    auto r = env({"run"});
    CHECK(r.code == exit_code::device);
    CHECK(r.err.find("tcpip") != std::string::npos);
    CHECK(env({"run", "-p", "0"}).code == exit_code::device);
  }
  SUBCASE("crunch without build") {
    Env env;
    REQUIRE(env({"configure", "-p", "42"}).code == 0);
    auto r = env({"run"});
    CHECK(r.code == exit_code::device);
    CHECK(r.err.find("crunch") != std::string::npos);
  }
  SUBCASE("missing plan") {
    Env env;
    REQUIRE(env({"configure"}).code == 0);
    fs::remove(env.dir / "plan.fplan");
    CHECK(env({"run"}).code == exit_code::stale);
  }
}

TEST_CASE("run creates one handle per resolved node") {
  Env env;
  std::map<std::string, int> calls;
  FactoryRegistry counting;
  auto real = fileserver_factories();
  for (auto id : {"Direct", "Crunch", "NetStore", "Tcpip", "Http", "Server_modular.Make"}) {
    counting.add(id, [&calls, &real, id = std::string(id)](const FactoryContext& ctx) {
      ++calls[ctx.step().var];
      return (*real.find(id))(ctx);
    });
  }
  env.factories = counting;
  // tcpip shared by http and netstore
  env.def.define = [] {
    KeyRegistry r;
    auto port = r.create("port", ArgSpec::opt(ValueType::Int, std::int64_t{0}, {"p", "port"}));
    auto net = fsrv::tcpip(port);
    auto two = foreign("Server_modular.Make", functor_type(fsrv::store_type(), fsrv::network_type(), job_type()));
    return register_app("shared", {two(fsrv::netstore()(net), fsrv::http()(fsrv::tcpip(port)))}, r);
  };
  REQUIRE(env({"configure", "-p", "18431"}).code == 0);
  std::stop_source stop;
  stop.request_stop();
  auto r = env({"run"}, stop.get_token());
  CHECK(r.code == 0);
  CHECK(calls == std::map<std::string, int>{{"tcpip1", 1}, {"http1", 1}, {"netstore1", 1},
                                            {"server_modular_make1", 1}});
}

TEST_CASE("graph command") {
  Env env;
  auto full = env({"graph", "--stage", "full"});
  CHECK(full.code == 0);
  CHECK(full.out.find("shape=ellipse") != std::string::npos);
  CHECK(env({"graph", "--stage", "sideways"}).code == exit_code::usage);
  CHECK(env({"graph", "--stage"}).code == exit_code::usage);

  REQUIRE(env({"configure", "--store", "direct", "-p", "42"}).code == 0);
  auto out = env.dir / "resolved.dot";
  CHECK(env({"graph", "--stage=resolved", "--output", out.string()}).code == 0);
  auto dot = slurp(out);
  CHECK(dot.find("shape=ellipse") == std::string::npos);
  CHECK(dot.find("shape=box") != std::string::npos);
  CHECK(dot == slurp(env.dir / "app.dot"));
}

TEST_CASE("clean removes generated files only") {
  Env env;
  write_text(env.dir / "data/index.html", "x");
  REQUIRE(env({"configure", "--fs", (env.dir / "data").string()}).code == 0);
  REQUIRE(env({"build"}).code == 0);
  CHECK(fs::exists(env.dir / "crunch.crunch"));
  CHECK(env({"clean"}).code == 0);
  for (auto f : {"keys.cfg", "plan.fplan", "main.glue", "app.dot", "crunch.crunch"}) CHECK_FALSE(fs::exists(env.dir / f));
  CHECK(fs::exists(env.dir / "data/index.html"));
  auto d = env({"describe"});
  CHECK(d.code == 0);
  CHECK(d.out.find("store=crunch (default)") != std::string::npos);
  CHECK(env({"clean"}).code == 0);
}

TEST_CASE("configure, describe, build sequence is reproducible") {
  Env env;
  write_text(env.dir / "data/index.html", "x");
  auto seq = [&] {
    std::vector<std::string> outs;
    outs.push_back(env({"configure", "--fs", (env.dir / "data").string(), "-p", "8080"}).out);
    outs.push_back(env({"describe"}).out);
    outs.push_back(env({"build"}).out);
    return std::make_pair(outs, tree(env.dir.path()));
  };
  auto first = seq();
  auto second = seq();
  CHECK(first == second);
}
