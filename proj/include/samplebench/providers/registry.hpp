#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "samplebench/providers/provider.hpp"

namespace samplebench {

/// Providers by id, plus the one used when a request names none. Built once
/// at startup and read-only afterwards.
class ProviderRegistry {
 public:
  void add(std::shared_ptr<const GenerationProvider> provider, bool make_default = false) {
    const auto& id = provider->id();
    if (providers_.count(id)) throw std::invalid_argument("duplicate provider id '" + id + "'");
    if (make_default || default_id_.empty()) default_id_ = id;
    providers_.emplace(id, std::move(provider));
  }

  /// Null when `id` is unknown.
  const GenerationProvider* find(const std::string& id) const {
    auto it = providers_.find(id);
    return it == providers_.end() ? nullptr : it->second.get();
  }

  const GenerationProvider* default_provider() const { return find(default_id_); }
  const std::string& default_id() const noexcept { return default_id_; }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : providers_) out.push_back(id);
    return out;
  }

 private:
  std::map<std::string, std::shared_ptr<const GenerationProvider>> providers_;
  std::string default_id_;
};

}  // namespace samplebench
