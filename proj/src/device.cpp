#include "modglue/device.hpp"

#include <map>

namespace modglue {

std::string default_device_name(std::string_view module_name) {
  std::string out;
  out.reserve(module_name.size());
  for (char c : module_name) {
    if (c == '.') {
      out += '_';
    } else if (c >= 'A' && c <= 'Z') {
      out += static_cast<char>(c - 'A' + 'a');
    } else {
      out += c;
    }
  }
  return out;
}

PackageList merge_packages(const std::vector<PackageList>& lists) {
  std::map<std::string, std::set<std::string>> merged;
  for (const auto& list : lists) {
    for (const auto& pkg : list) {
      auto& constraints = merged[pkg.name];
      constraints.insert(pkg.constraints.begin(), pkg.constraints.end());
    }
  }
  PackageList out;
  out.reserve(merged.size());
  for (auto& [name, constraints] : merged) out.push_back(Package{name, std::move(constraints)});
  return out;
}

}  // namespace modglue
