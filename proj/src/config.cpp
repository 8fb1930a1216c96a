#include "tiqa/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tiqa {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& why) {
  throw Error(ErrorKind::config,
              "invalid value '" + value + "' for key '" + key + "': " + why);
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    bad_value(key, value, "expected a number");
  }
  return out;
}

long long to_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value, "expected an integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "expected true or false");
}

double positive(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (!(v > 0)) bad_value(key, value, "must be positive");
  return v;
}

template <std::size_t N>
std::array<double, N> to_array(const std::string& key, const std::string& value) {
  const auto items = split(value, ',');
  if (items.size() != N) {
    bad_value(key, value, "expected " + std::to_string(N) + " comma-separated numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = to_double(key, items[i]);
  return out;
}

void apply_metric_entry(RunConfig& config, const std::string& key,
                        const std::string& value) {
  // metric.<name>.<field>
  const auto last = key.rfind('.');
  const std::string name = key.substr(7, last - 7);
  const std::string field = key.substr(last + 1);
  if (last <= 7 || name.empty()) {
    throw Error(ErrorKind::config, "unknown config key '" + key + "'");
  }
  const MetricId id = MetricId::parse(name);
  if (field == "polarity") {
    config.polarity_overrides[name] = parse_polarity(value);
    if (config.plugins.contains(name)) {
      PluginSpec spec = config.plugins.at(name);
      spec.polarity = config.polarity_overrides[name];
      config.plugins.add(name, spec);
    }
    return;
  }
  if (field != "cmd" && field != "timeout") {
    throw Error(ErrorKind::config, "unknown config key '" + key + "'");
  }
  if (!id.is_external()) {
    throw Error(ErrorKind::config,
                "config key '" + key + "': built-in metrics cannot be plugins");
  }
  PluginSpec spec = config.plugins.contains(name) ? config.plugins.at(name) : PluginSpec{};
  if (auto it = config.polarity_overrides.find(name); it != config.polarity_overrides.end()) {
    spec.polarity = it->second;
  }
  if (!config.plugins.contains(name)) spec.timeout = config.plugin_timeout;
  if (field == "cmd") {
    if (value.empty()) bad_value(key, value, "command must not be empty");
    spec.cmd = value;
  } else {
    spec.timeout = std::chrono::milliseconds(
        static_cast<long long>(std::llround(positive(key, value) * 1000.0)));
  }
  if (spec.cmd.empty()) {
    // Placeholder until the cmd key arrives.
    spec.cmd = "<unset>";
  }
  config.plugins.add(name, spec);
}

}  // namespace

std::optional<Polarity> RunConfig::polarity_of(const std::string& name) const {
  if (auto it = polarity_overrides.find(name); it != polarity_overrides.end()) {
    return it->second;
  }
  if (plugins.contains(name)) return plugins.at(name).polarity;
  const MetricId id = [&] {
    try {
      return MetricId::parse(name);
    } catch (const Error&) {
      return MetricId::external("invalid");
    }
  }();
  if (!id.is_external()) return builtin_descriptor(id).polarity;
  return std::nullopt;
}

Interp parse_interp(const std::string& text) {
  if (text == "bicubic") return Interp::bicubic;
  if (text == "bilinear") return Interp::bilinear;
  throw Error(ErrorKind::config, "unknown interpolation '" + text + "'");
}

Kernel parse_kernel(const std::string& text) {
  if (text == "bicubic") return Kernel::bicubic;
  if (text == "bilinear") return Kernel::bilinear;
  if (text == "nearest") return Kernel::nearest;
  if (text == "gaussian" || text == "gaussian-blur") return Kernel::gaussian;
  throw Error(ErrorKind::config, "unknown kernel '" + text + "'");
}

OutputFormat parse_format(const std::string& text) {
  if (text == "json") return OutputFormat::json;
  if (text == "csv") return OutputFormat::csv;
  throw Error(ErrorKind::config, "unknown output format '" + text + "'");
}

std::vector<MetricId> parse_metric_list(const std::string& text) {
  std::vector<MetricId> out;
  auto add = [&](const MetricId& id) {
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  };
  for (const auto& item : split(text, ',')) {
    if (item.empty()) continue;
    if (item == "all") {
      for (const auto& id : builtin_metrics()) add(id);
    } else {
      add(MetricId::parse(item));
    }
  }
  if (out.empty()) throw Error(ErrorKind::config, "metric list is empty");
  return out;
}

void apply_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "level") {
    const long long v = to_int(key, value);
    if (v < 0 || v > kDefaultMaxLevel) bad_value(key, value, "must be in [0, 8]");
    c.level = static_cast<int>(v);
  } else if (key == "padding") {
    const double v = to_double(key, value);
    if (v < 1.0 || v > 2.0) bad_value(key, value, "must be in [1, 2]");
    c.padding = v;
  } else if (key == "interp") {
    c.interp = parse_interp(value);
  } else if (key == "metrics") {
    c.metrics = parse_metric_list(value);
  } else if (key == "alpha") {
    const double v = to_double(key, value);
    if (!(v > 0 && v < 0.5)) bad_value(key, value, "must be in (0, 0.5)");
    c.alpha = v;
  } else if (key == "threads") {
    const long long v = to_int(key, value);
    if (v < 0) bad_value(key, value, "must be >= 0");
    c.threads = static_cast<int>(v);
  } else if (key == "format") {
    c.format = parse_format(value);
  } else if (key == "seed") {
    const long long v = to_int(key, value);
    if (v < 0) bad_value(key, value, "must be >= 0");
    c.seed = static_cast<std::uint64_t>(v);
  } else if (key == "keep_temp") {
    c.keep_temp = to_bool(key, value);
  } else if (key == "allow_any_aspect") {
    c.allow_any_aspect = to_bool(key, value);
  } else if (key == "weighted") {
    c.solid_angle_weights = to_bool(key, value);
  } else if (key == "plugin_timeout") {
    c.plugin_timeout = std::chrono::milliseconds(
        static_cast<long long>(std::llround(positive(key, value) * 1000.0)));
  } else if (key.rfind("metric.", 0) == 0) {
    apply_metric_entry(c, key, value);
  } else if (key == "metrics.ssim.window" || key == "metrics.msssim.window") {
    const long long v = to_int(key, value);
    if (v < 1 || v % 2 == 0) bad_value(key, value, "must be a positive odd integer");
    (key == "metrics.ssim.window" ? c.metrics_config.ssim : c.metrics_config.msssim.ssim)
        .window = static_cast<int>(v);
  } else if (key == "metrics.ssim.sigma") {
    c.metrics_config.ssim.sigma = positive(key, value);
  } else if (key == "metrics.ssim.k1") {
    c.metrics_config.ssim.k1 = positive(key, value);
  } else if (key == "metrics.ssim.k2") {
    c.metrics_config.ssim.k2 = positive(key, value);
  } else if (key == "metrics.msssim.sigma") {
    c.metrics_config.msssim.ssim.sigma = positive(key, value);
  } else if (key == "metrics.msssim.k1") {
    c.metrics_config.msssim.ssim.k1 = positive(key, value);
  } else if (key == "metrics.msssim.k2") {
    c.metrics_config.msssim.ssim.k2 = positive(key, value);
  } else if (key == "metrics.msssim.weights") {
    c.metrics_config.msssim.weights = to_array<5>(key, value);
  } else if (key == "metrics.gmsd.c") {
    c.metrics_config.gmsd.c = positive(key, value);
  } else if (key == "metrics.vifs.sigma_nsq") {
    c.metrics_config.vifs.sigma_nsq = positive(key, value);
  } else if (key == "metrics.vifs.eps") {
    c.metrics_config.vifs.eps = positive(key, value);
  } else if (key == "metrics.vifs.scales") {
    const long long v = to_int(key, value);
    if (v < 1 || v > 6) bad_value(key, value, "must be in [1, 6]");
    c.metrics_config.vifs.scales = static_cast<int>(v);
  } else if (key == "metrics.nlpd.levels") {
    const long long v = to_int(key, value);
    if (v < 1 || v > 10) bad_value(key, value, "must be in [1, 10]");
    c.metrics_config.nlpd.levels = static_cast<int>(v);
  } else if (key == "metrics.nlpd.sigma0") {
    c.metrics_config.nlpd.sigma0 = positive(key, value);
  } else if (key == "metrics.nlpd.taps") {
    c.metrics_config.nlpd.taps = to_array<5>(key, value);
  } else {
    throw Error(ErrorKind::config, "unknown config key '" + key + "'");
  }
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::config,
                  "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      apply_config_value(base, key, value);
    } catch (const Error& e) {
      throw Error(ErrorKind::config,
                  "config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (const auto& name : base.plugins.names()) {
    if (base.plugins.at(name).cmd == "<unset>") {
      throw Error(ErrorKind::config, "plugin '" + name + "' has a timeout but no cmd");
    }
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read config '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base));
}

}  // namespace tiqa
