#include "doctest.h"

#include "modglue/errors.hpp"
#include "modglue/fileserver/config.hpp"
#include "modglue/impl.hpp"

using namespace modglue;
namespace fsrv = modglue::fileserver;

namespace {

struct Fixture {
  KeyRegistry registry;
  fsrv::Keys keys = fsrv::Keys::declare(registry);
  SignatureType store = base_type("store");
  SignatureType network = base_type("network");
  SignatureType job = base_type("job");
};

}  // namespace

TEST_CASE("base types are nominal") {
  CHECK(base_type("store") == base_type("store"));
  CHECK(base_type("store") != base_type("network"));
  CHECK(base_type("job").name() == "job");
  CHECK_FALSE(base_type("job").is_arrow());
  CHECK_THROWS_AS(base_type(""), DefinitionError);
  CHECK_THROWS_AS(base_type("Store"), DefinitionError);
  CHECK_THROWS_AS(base_type("9lives"), DefinitionError);
}

TEST_CASE("arrows right-associate and compare structurally") {
  Fixture f;
  auto t = arrow(f.store, arrow(f.network, f.job));
  CHECK(t == functor_type(f.store, f.network, f.job));
  CHECK(t.arity() == 2);
  CHECK(t.param() == f.store);
  CHECK(t.result() == arrow(f.network, f.job));
  CHECK(t.final_result() == f.job);
  CHECK(t.render() == "store -> network -> job");
  CHECK(arrow(arrow(f.store, f.store), f.job).render() == "(store -> store) -> job");
  CHECK(arrow(arrow(f.store, f.store), f.job) != arrow(f.store, arrow(f.store, f.job)));

  auto self = arrow(f.network, f.network);
  CHECK(self.arity() == 1);
  CHECK(self.final_result() == f.network);
  CHECK(f.job.arity() == 0);
}

TEST_CASE("apply checks parameter types") {
  Fixture f;
  auto server = fsrv::make_server();
  auto direct = fsrv::direct(f.keys.fs);
  auto tcpip = fsrv::tcpip(f.keys.port);
  auto http = fsrv::http();

  CHECK(typ_of(server) == functor_type(f.store, f.network, f.job));
  CHECK(typ_of(apply(server, direct)) == arrow(f.network, f.job));
  CHECK(typ_of(apply(apply(server, direct), apply(http, tcpip))) == f.job);
  CHECK(typ_of(server(direct, http(tcpip))) == f.job);
  CHECK(typ_of(tcpip) == f.network);

  CHECK_THROWS_AS(apply(direct, tcpip), TypeMismatch);
  CHECK_THROWS_AS(apply(server, tcpip), TypeMismatch);
  CHECK_THROWS_AS(server(direct, direct), TypeMismatch);

  try {
    apply(server, tcpip);
  } catch (const TypeMismatch& e) {
    std::string msg = e.what();
    CHECK(msg.find("store") != std::string::npos);
    CHECK(msg.find("network") != std::string::npos);
  }
}

TEST_CASE("if_ and match_ require identical branch types") {
  Fixture f;
  auto tcpip = fsrv::tcpip(f.keys.port);
  auto cond = fsrv::is_http(f.keys.port);

  auto net = if_(cond, fsrv::http()(tcpip), tcpip);
  CHECK(typ_of(net) == f.network);
  CHECK(net.kind() == ImplExpr::Kind::If);
  CHECK_THROWS_AS(if_(cond, tcpip, fsrv::direct(f.keys.fs)), TypeMismatch);

  auto store = fsrv::default_store(f.keys);
  CHECK(typ_of(store) == f.store);
  CHECK(store.cases().size() == 2);
  CHECK(store.default_case().has_value());

  CHECK_THROWS_AS(match_(value_of(f.keys.store), {{std::string("a"), tcpip}, {std::string("a"), tcpip}}),
                  DefinitionError);
  CHECK_THROWS_AS(match_(value_of(f.keys.store), {}), DefinitionError);
  CHECK_THROWS_AS(match_(value_of(f.keys.store), {{std::string("a"), tcpip}}, fsrv::direct(f.keys.fs)),
                  TypeMismatch);

  // functor-typed switches may be applied like any functor
  auto pick = if_(cond, fsrv::make_server()(fsrv::direct(f.keys.fs)), fsrv::make_server()(fsrv::crunch(f.keys.fs)));
  CHECK(typ_of(pick) == arrow(f.network, f.job));
  CHECK(typ_of(pick(tcpip)) == f.job);
}

TEST_CASE("applying an n-ary functor to n arguments reaches a base type") {
  auto a = base_type("a");
  auto b = base_type("b");
  for (std::size_t n = 0; n <= 5; ++n) {
    SignatureType t = b;
    for (std::size_t i = 0; i < n; ++i) t = arrow(a, t);
    auto e = foreign("M" + std::to_string(n), t);
    for (std::size_t i = 0; i < n; ++i) e = apply(e, foreign("Leaf", a));
    CHECK_FALSE(typ_of(e).is_arrow());
    CHECK(typ_of(e) == b);
  }
}

TEST_CASE("register validates name and jobs") {
  Fixture f;
  auto server = fsrv::make_server()(fsrv::direct(f.keys.fs), fsrv::http()(fsrv::tcpip(f.keys.port)));
  auto app = register_app("filesrv", {server}, f.registry);
  CHECK(app.name == "filesrv");
  CHECK(app.jobs.size() == 1);
  CHECK(app.keys.size() == 3);
  CHECK(app.keys[0].name() == "store");

  CHECK_THROWS_AS(register_app("filesrv", {}, f.registry), DefinitionError);
  CHECK_THROWS_AS(register_app("filesrv", {fsrv::tcpip(f.keys.port)}, f.registry), TypeMismatch);
  CHECK_THROWS_AS(register_app("File-Srv", {server}, f.registry), DefinitionError);

  KeyRegistry other;
  CHECK_THROWS_AS(register_app("filesrv", {server}, other), DefinitionError);
}

TEST_CASE("bundled configs are well typed") {
  auto s = fsrv::static_config();
  auto full = fsrv::full_config();
  CHECK(typ_of(s.jobs.at(0)) == job_type());
  CHECK(typ_of(full.jobs.at(0)) == job_type());
}
