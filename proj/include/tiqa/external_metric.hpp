#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "tiqa/metrics.hpp"

namespace tiqa {

inline constexpr std::chrono::milliseconds kDefaultPluginTimeout{120'000};

struct PluginSpec {
  std::filesystem::path cmd;
  Polarity polarity{Polarity::higher_better};
  std::chrono::milliseconds timeout{kDefaultPluginTimeout};
};

/// True when `text` is exactly one decimal number, optionally followed by
/// whitespace, as the plugin protocol requires.
bool is_valid_plugin_output(std::string_view text);

/// Spawns `cmd ref_path dist_path`, waits up to `timeout`, and returns the
/// number printed on stdout. Throws PluginError on nonzero exit, malformed
/// or non-finite output, or timeout (the child is killed).
double run_plugin_process(const std::filesystem::path& cmd,
                          const std::filesystem::path& ref_path,
                          const std::filesystem::path& dist_path,
                          std::chrono::milliseconds timeout);

/// Named external metrics. Invocations of the same plugin are serialized;
/// different plugins may run concurrently.
class PluginRegistry {
 public:
  PluginRegistry() = default;
  PluginRegistry(const PluginRegistry& other);
  PluginRegistry& operator=(const PluginRegistry& other);
  PluginRegistry(PluginRegistry&&) noexcept = default;
  PluginRegistry& operator=(PluginRegistry&&) noexcept = default;

  void add(const std::string& name, PluginSpec spec);
  bool contains(const std::string& name) const;
  const PluginSpec& at(const std::string& name) const;
  std::vector<std::string> names() const;

  MetricScore run(const std::string& name, const std::filesystem::path& ref_path,
                  const std::filesystem::path& dist_path) const;
  MetricScore run(const std::string& name, const std::filesystem::path& ref_path,
                  const std::filesystem::path& dist_path,
                  std::chrono::milliseconds timeout) const;

 private:
  std::map<std::string, PluginSpec> specs_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

/// Runs a registered plugin metric on two image files.
MetricScore run_external(const PluginRegistry& registry, const std::string& name,
                         const std::filesystem::path& ref_path,
                         const std::filesystem::path& dist_path,
                         std::chrono::milliseconds timeout = kDefaultPluginTimeout);

/// Descriptor for built-ins or registered plugins.
MetricDescriptor describe(const MetricId& id, const PluginRegistry* registry);

}  // namespace tiqa
