#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tiqa/external_metric.hpp"
#include "tiqa/geometry.hpp"
#include "tiqa/metrics.hpp"
#include "tiqa/resample.hpp"
#include "tiqa/subjective.hpp"

namespace tiqa {

enum class OutputFormat { json, csv };

/// Everything a command needs besides its positional inputs. Loaded from a
/// `key = value` file (dotted keys, '#' comments); command-line flags are
/// applied on top.
struct RunConfig {
  int level{1};
  double padding{kDefaultPadding};
  Interp interp{Interp::bicubic};
  std::vector<MetricId> metrics{builtin_metrics()};
  double alpha{kDefaultAlpha};
  int threads{0};  // 0 = hardware parallelism
  OutputFormat format{OutputFormat::json};
  std::uint64_t seed{0};
  bool keep_temp{false};
  bool allow_any_aspect{false};
  bool solid_angle_weights{false};
  std::chrono::milliseconds plugin_timeout{kDefaultPluginTimeout};
  PluginRegistry plugins;
  /// `metric.<name>.polarity` entries, including ones without a command.
  std::map<std::string, Polarity> polarity_overrides;
  MetricsConfig metrics_config;

  /// Polarity used for `name`: override, registered plugin, or built-in.
  std::optional<Polarity> polarity_of(const std::string& name) const;
};

/// Parses config text. Unknown keys and invalid values throw config errors
/// that name the key (and line).
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Applies one key/value pair (shared by the file parser and flag handling).
void apply_config_value(RunConfig& config, const std::string& key,
                        const std::string& value);

Interp parse_interp(const std::string& text);
Kernel parse_kernel(const std::string& text);
OutputFormat parse_format(const std::string& text);
std::vector<MetricId> parse_metric_list(const std::string& text);

}  // namespace tiqa
