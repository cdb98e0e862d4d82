#include "modglue/fileserver/config.hpp"

#include <filesystem>

#include "modglue/fileserver/network.hpp"
#include "modglue/fileserver/store.hpp"

namespace modglue::fileserver {

namespace fs = std::filesystem;

namespace {

KeyValue packages(std::initializer_list<Package> list) { return pure(PackageList(list)); }

fs::path snapshot_path(const fs::path& build_dir, const std::string& node_name) {
  return build_dir / (node_name + ".crunch");
}

}  // namespace

SignatureType store_type() { return base_type("store"); }
SignatureType network_type() { return base_type("network"); }

Keys Keys::declare(KeyRegistry& registry) {
  auto store = registry.create("store", ArgSpec::opt_enum({"crunch", "direct"}, "crunch", {}, "How files are stored."),
                               Stage::ConfigureOnly);
  auto fs = registry.create("fs", ArgSpec::opt(ValueType::Text, std::string("data/"), {}, "Directory to serve."),
                            Stage::ConfigureOnly);
  auto port = registry.create("port", ArgSpec::opt(ValueType::Int, std::int64_t{80}, {"p", "port"}, "Listening port."));
  return Keys{store, fs, port};
}

ImplExpr direct(const KeySpec& fs) {
  return foreign("Direct", store_type(),
                 {.keys = {fs}, .packages = packages({{"fs-direct", {}}, {"fileserver-store", {}}})});
}

ImplExpr crunch(const KeySpec& fs_key) {
  ConfigurableDevice d;
  d.name = "crunch";
  d.module_name = "Crunch";
  d.type = store_type();
  d.keys = {fs_key};
  d.packages = packages({{"crunch", {">= 1.0"}}, {"fileserver-store", {}}});
  d.connect = ConnectRecipe{"Crunch", {}, {}};
  // The snapshot is taken by the build command; hooks may run more than once.
  d.configure = [key = fs_key.name()](const Info& info, const std::string& node) {
    auto src = fs::path(std::get<std::string>(info.keys.value(key)));
    write_crunch_snapshot(src, snapshot_path(info.build_dir, node));
  };
  d.clean = [](const Info& info, const std::string& node) {
    std::error_code ec;
    fs::remove(snapshot_path(info.build_dir, node), ec);
  };
  return define_device(std::move(d));
}

ImplExpr netstore() {
  return foreign("NetStore", arrow(network_type(), store_type()), {.packages = packages({{"fileserver-store", {}}})});
}

ImplExpr tcpip(const KeySpec& port, std::optional<std::string> name) {
  return foreign("Tcpip", network_type(),
                 {.name = std::move(name), .keys = {port}, .packages = packages({{"tcpip", {">= 2.0"}}})});
}

ImplExpr http() {
  return foreign("Http", arrow(network_type(), network_type()), {.packages = packages({{"http", {}}})});
}

ImplExpr make_server() {
  return foreign("Server_modular.Make", functor_type(store_type(), network_type(), job_type()),
                 {.packages = packages({{"fileserver", {}}})});
}

KeyValue is_http(const KeySpec& port) {
  return map([](const Value& v) { return Value(v.as_int() == 80 || v.as_int() == 8080); }, value_of(port));
}

ImplExpr default_store(const Keys& keys) {
  auto c = crunch(keys.fs);
  return match_(value_of(keys.store), {{std::string("crunch"), c}, {std::string("direct"), direct(keys.fs)}}, c);
}

ImplExpr default_network(const Keys& keys) {
  auto t = tcpip(keys.port);
  return if_(is_http(keys.port), http()(t), t);
}

AppConfig static_config() {
  KeyRegistry registry;
  auto fs_key = registry.create("fs", ArgSpec::opt(ValueType::Text, std::string("data/"), {}, "Directory to serve."),
                                Stage::ConfigureOnly);
  auto port = registry.create("port", ArgSpec::opt(ValueType::Int, std::int64_t{80}, {"p", "port"}, "Listening port."));
  auto my_server = make_server()(direct(fs_key), http()(tcpip(port)));
  return register_app("filesrv", {my_server}, registry);
}

AppConfig full_config() {
  KeyRegistry registry;
  auto keys = Keys::declare(registry);
  auto my_server = make_server()(default_store(keys), default_network(keys));
  return register_app("filesrv", {my_server}, registry);
}

namespace {

// Direct and Tcpip take one key, baked or read at runtime.
Literal single_key(const FactoryContext& ctx) {
  const auto& step = ctx.step();
  if (step.consts.size() + step.key_args.size() != 1) {
    throw DeviceStartError(step.device_name, "expected exactly one key in its recipe");
  }
  return step.consts.empty() ? ctx.key(step.key_args.front()) : step.consts.front().second;
}

}  // namespace

void register_factories(FactoryRegistry& registry) {
  registry.add("Direct", [](const FactoryContext& ctx) -> Handle {
    return std::make_shared<DirectStore>(std::get<std::string>(single_key(ctx)));
  });
  registry.add("Crunch", [](const FactoryContext& ctx) -> Handle {
    return std::make_shared<CrunchStore>(read_crunch_snapshot(snapshot_path(ctx.build_dir(), ctx.step().device_name)));
  });
  registry.add("NetStore", [](const FactoryContext& ctx) -> Handle {
    return std::make_shared<NetStore>(ctx.arg<Network>(0), ctx.stop_token());
  });
  registry.add("Tcpip", [](const FactoryContext& ctx) -> Handle {
    return std::make_shared<TcpipNetwork>(std::get<std::int64_t>(single_key(ctx)));
  });
  registry.add("Http", [](const FactoryContext& ctx) -> Handle {
    return std::make_shared<HttpNetwork>(ctx.arg<Network>(0));
  });
  registry.add("Server_modular.Make", [](const FactoryContext& ctx) -> Handle {
    return std::make_shared<FileServer>(ctx.arg<Store>(0), ctx.arg<Network>(1));
  });
}

}  // namespace modglue::fileserver
