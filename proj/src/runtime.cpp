#include "modglue/runtime.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

#include "modglue/errors.hpp"

namespace modglue {

Literal FactoryContext::key(std::string_view name) const {
  for (const auto& [k, v] : step_.consts) {
    if (k == name) return v;
  }
  if (std::find(step_.key_args.begin(), step_.key_args.end(), name) == step_.key_args.end()) {
    throw DeviceStartError(step_.device_name, "key '" + std::string(name) + "' is not part of its recipe");
  }
  try {
    return keys_.value(name);
  } catch (const UnresolvedKey& e) {
    throw DeviceStartError(step_.device_name, e.what());
  }
}

void FactoryRegistry::add(std::string factory_id, Factory factory) {
  factories_.insert_or_assign(std::move(factory_id), std::move(factory));
}

const Factory* FactoryRegistry::find(std::string_view factory_id) const {
  auto it = factories_.find(factory_id);
  return it == factories_.end() ? nullptr : &it->second;
}

std::vector<const PlanStep*> missing_factories(const PlanDocument& plan, const FactoryRegistry& registry) {
  std::vector<const PlanStep*> out;
  for (const auto& s : plan.steps) {
    if (!registry.find(s.factory_id)) out.push_back(&s);
  }
  return out;
}

Instance instantiate(const PlanDocument& plan, const FactoryRegistry& registry, const ResolvedKeys& runtime_keys,
                     std::stop_token stop) {
  if (auto missing = missing_factories(plan, registry); !missing.empty()) {
    throw UnregisteredFactory(missing.front()->module_name, missing.front()->factory_id);
  }
  validate_plan(plan);

  Instance inst;
  std::map<std::string, std::size_t> index_of;
  for (const auto& step : plan.steps) {
    std::vector<Handle> args;
    for (const auto& a : step.args) args.push_back(inst.handles[index_of.at(a)]);
    FactoryContext ctx(step, plan.build_dir, args, runtime_keys, stop);
    Handle h;
    try {
      h = (*registry.find(step.factory_id))(ctx);
    } catch (const DeviceStartError&) {
      throw;
    } catch (const std::exception& e) {
      throw DeviceStartError(step.device_name, e.what());
    }
    if (!h) throw DeviceStartError(step.device_name, "factory returned no handle");
    index_of[step.var] = inst.handles.size();
    inst.handles.push_back(std::move(h));
  }
  for (const auto& j : plan.jobs) {
    auto job = std::dynamic_pointer_cast<Job>(inst.handles[index_of.at(j)]);
    if (!job) throw DeviceStartError(j, "job root is not runnable");
    inst.jobs.push_back(std::move(job));
  }
  return inst;
}

void run_jobs(const Instance& instance, std::stop_token stop) {
  if (instance.jobs.size() == 1) {
    instance.jobs.front()->start(stop);
    return;
  }
  std::mutex m;
  std::exception_ptr failure;
  {
    std::vector<std::jthread> threads;
    for (const auto& job : instance.jobs) {
      threads.emplace_back([&, job] {
        try {
          job->start(stop);
        } catch (...) {
          std::lock_guard lock(m);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace modglue
