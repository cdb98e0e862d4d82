#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "modglue/codegen.hpp"
#include "modglue/errors.hpp"
#include "modglue/keys.hpp"

namespace modglue {

/// Base of every runtime device handle.
class DeviceHandle {
 public:
  virtual ~DeviceHandle() = default;
};

using Handle = std::shared_ptr<DeviceHandle>;

/// A runnable application root.
class Job : public DeviceHandle {
 public:
  /// Runs until the job finishes or `stop` is requested.
  virtual void start(std::stop_token stop) = 0;
};

/// Everything a factory receives for one plan step.
class FactoryContext {
 public:
  FactoryContext(const PlanStep& step, std::filesystem::path build_dir, std::span<const Handle> args,
                 const ResolvedKeys& keys, std::stop_token stop)
      : step_(step), build_dir_(std::move(build_dir)), args_(args), keys_(keys), stop_(std::move(stop)) {}

  const PlanStep& step() const { return step_; }
  const std::filesystem::path& build_dir() const { return build_dir_; }
  std::span<const Handle> args() const { return args_; }

  /// Argument `i` downcast to `T`; throws DeviceStartError on a mismatch.
  template <class T>
  std::shared_ptr<T> arg(std::size_t i) const {
    if (i >= args_.size()) throw DeviceStartError(step_.device_name, "missing argument " + std::to_string(i + 1));
    auto typed = std::dynamic_pointer_cast<T>(args_[i]);
    if (!typed) throw DeviceStartError(step_.device_name, "argument " + std::to_string(i + 1) + " has the wrong kind");
    return typed;
  }

  /// Baked constant or runtime key named in the step's recipe.
  Literal key(std::string_view name) const;

  std::stop_token stop_token() const { return stop_; }

 private:
  const PlanStep& step_;
  std::filesystem::path build_dir_;
  std::span<const Handle> args_;
  const ResolvedKeys& keys_;
  std::stop_token stop_;
};

using Factory = std::function<Handle(const FactoryContext&)>;

/// factory_id -> factory. Populated before any command runs.
class FactoryRegistry {
 public:
  void add(std::string factory_id, Factory factory);
  const Factory* find(std::string_view factory_id) const;

 private:
  std::map<std::string, Factory, std::less<>> factories_;
};

/// Steps whose factory is not registered, in plan order.
std::vector<const PlanStep*> missing_factories(const PlanDocument& plan, const FactoryRegistry& registry);

struct Instance {
  std::vector<Handle> handles;  // one per step, plan order
  std::vector<std::shared_ptr<Job>> jobs;
};

/// Calls each step's factory once, in plan order, passing earlier handles.
/// Throws UnregisteredFactory before creating anything if a factory is
/// missing; wraps factory failures in DeviceStartError.
Instance instantiate(const PlanDocument& plan, const FactoryRegistry& registry, const ResolvedKeys& runtime_keys,
                     std::stop_token stop = {});

/// Starts every job (concurrently when there are several) and waits.
void run_jobs(const Instance& instance, std::stop_token stop);

}  // namespace modglue
