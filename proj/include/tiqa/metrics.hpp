#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tiqa/image.hpp"

namespace tiqa {

class PluginRegistry;

enum class Polarity { higher_better, lower_better };

const char* to_string(Polarity p) noexcept;
/// Accepts "higher"/"lower" and the long forms "higher_better"/"lower_better".
Polarity parse_polarity(const std::string& text);

class MetricId {
 public:
  enum class Kind { ssim, msssim, gmsd, vifs, nlpd, external };

  MetricId() = default;
  static MetricId builtin(Kind kind);
  /// Plugin metric; the name must be a non-empty filesystem-safe token
  /// ([A-Za-z0-9_.-]) that does not shadow a built-in.
  static MetricId external(const std::string& name);
  /// Parses a built-in name, otherwise treats the text as an external name.
  static MetricId parse(const std::string& text);

  Kind kind() const noexcept { return kind_; }
  bool is_external() const noexcept { return kind_ == Kind::external; }
  /// "ssim", "msssim", ... or the plugin name.
  const std::string& name() const noexcept { return name_; }

  friend bool operator==(const MetricId&, const MetricId&) = default;

 private:
  MetricId(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}
  Kind kind_{Kind::ssim};
  std::string name_{"ssim"};
};

/// Built-in metrics in canonical order.
std::vector<MetricId> builtin_metrics();

struct MetricDescriptor {
  MetricId id;
  Polarity polarity{Polarity::higher_better};
  std::optional<std::pair<double, double>> range_hint;
};

/// Descriptor of a built-in metric.
MetricDescriptor builtin_descriptor(const MetricId& id);

struct MetricScore {
  MetricId id;
  double value{0};
};

// ---------------------------------------------------------------------------
// Kernel constants. Defaults are the published reference values rescaled to
// samples in [0, 1].

struct SsimParams {
  int window{11};
  double sigma{1.5};
  double k1{0.01};
  double k2{0.03};
  double dynamic_range{1.0};
};

struct MsssimParams {
  SsimParams ssim{};
  std::array<double, 5> weights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
};

struct GmsdParams {
  double c{0.0026};
};

struct VifsParams {
  int scales{4};
  double sigma_nsq{2.0 / (255.0 * 255.0)};
  double eps{1e-10 / (255.0 * 255.0)};
};

struct NlpdParams {
  int levels{6};
  double sigma0{0.17};
  std::array<double, 5> taps{0.05, 0.25, 0.4, 0.25, 0.05};
};

struct MetricsConfig {
  SsimParams ssim{};
  MsssimParams msssim{};
  GmsdParams gmsd{};
  VifsParams vifs{};
  NlpdParams nlpd{};
};

// ---------------------------------------------------------------------------
// Kernels on luma planes. All throw shape error on mismatched sizes and
// support error when the input is too small for the metric's windows.

/// Mean of the local SSIM map (Gaussian window, valid region).
double ssim(const Plane& ref, const Plane& dist, const SsimParams& params = {});

/// Five-scale MS-SSIM with 2x2 mean-pool downsampling; negative per-scale
/// terms clamp to 0.
double msssim(const Plane& ref, const Plane& dist,
              const MsssimParams& params = {});

/// Smallest side length msssim accepts: window * 2^(scales - 1).
int msssim_min_side(const MsssimParams& params = {});

/// Population standard deviation of the gradient-magnitude similarity map.
double gmsd(const Plane& ref, const Plane& dist, const GmsdParams& params = {});

/// Pixel-domain visual information fidelity.
double vifs(const Plane& ref, const Plane& dist, const VifsParams& params = {});

/// Smallest square side vifs accepts.
int vifs_min_side(const VifsParams& params = {});

/// Normalized Laplacian pyramid distance.
double nlpd(const Plane& ref, const Plane& dist, const NlpdParams& params = {});

int nlpd_min_side(const NlpdParams& params = {});

/// Built-in metric on two images (color is reduced to Rec.601 luma).
MetricScore compute_metric(const MetricId& id, const Image& ref,
                           const Image& dist, const MetricsConfig& config = {});

/// Everything score_pair needs beyond the views themselves.
struct ScoringContext {
  MetricsConfig config{};
  const PluginRegistry* plugins{nullptr};
  /// Directory for temporary view files handed to plugins.
  std::filesystem::path temp_dir{};
};

/// Scores corresponding views (T_i = Q(dist_i, ref_i)). External metrics get
/// both views as 16-bit PNGs in ctx.temp_dir.
MetricScore score_pair(const TangentView& ref, const TangentView& dist,
                       const MetricId& metric, const ScoringContext& ctx = {});

}  // namespace tiqa
