#include "tiqa/metrics.hpp"

#include <cmath>
#include <string>

#include "tiqa/external_metric.hpp"
#include "tiqa/filters.hpp"
#include "tiqa/image_io.hpp"

namespace tiqa {

const char* to_string(Polarity p) noexcept {
  return p == Polarity::higher_better ? "higher_better" : "lower_better";
}

Polarity parse_polarity(const std::string& text) {
  if (text == "higher" || text == "higher_better") return Polarity::higher_better;
  if (text == "lower" || text == "lower_better") return Polarity::lower_better;
  throw Error(ErrorKind::config,
              "unknown polarity '" + text + "' (expected higher or lower)");
}

namespace {

constexpr std::array<std::pair<MetricId::Kind, const char*>, 5> kBuiltinNames{{
    {MetricId::Kind::ssim, "ssim"},
    {MetricId::Kind::msssim, "msssim"},
    {MetricId::Kind::gmsd, "gmsd"},
    {MetricId::Kind::vifs, "vifs"},
    {MetricId::Kind::nlpd, "nlpd"},
}};

bool is_safe_token(const std::string& s) {
  if (s.empty() || s == "." || s == "..") return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

void require_same_size(const Plane& a, const Plane& b, const char* metric) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::shape, std::string(metric) + ": image sizes differ");
  }
}

void require_min_side(const Plane& a, int side, const char* metric) {
  if (a.rows() < side || a.cols() < side) {
    throw Error(ErrorKind::support,
                std::string(metric) + ": needs at least " + std::to_string(side) +
                    " px per side, got " + std::to_string(a.cols()) + "x" +
                    std::to_string(a.rows()));
  }
}

struct SsimTerms {
  double ssim;  // mean of the full SSIM map
  double cs;    // mean of the contrast-structure map
};

SsimTerms ssim_terms(const Plane& x, const Plane& y, const SsimParams& p) {
  const Eigen::VectorXd win = gaussian_kernel(p.window, p.sigma);
  const double c1 = std::pow(p.k1 * p.dynamic_range, 2);
  const double c2 = std::pow(p.k2 * p.dynamic_range, 2);
  const Plane mu_x = convolve_valid(x, win);
  const Plane mu_y = convolve_valid(y, win);
  const Plane sxx = convolve_valid(x * x, win) - mu_x * mu_x;
  const Plane syy = convolve_valid(y * y, win) - mu_y * mu_y;
  const Plane sxy = convolve_valid(x * y, win) - mu_x * mu_y;
  const Plane cs = (2.0 * sxy + c2) / (sxx + syy + c2);
  const Plane lum = (2.0 * mu_x * mu_y + c1) / (mu_x * mu_x + mu_y * mu_y + c1);
  return {(lum * cs).mean(), cs.mean()};
}

double vifs_sigma(int scale, int scales) {
  return (std::pow(2.0, scales - scale + 1) + 1.0) / 5.0;
}

int vifs_window(int scale, int scales) {
  return 2 * static_cast<int>(std::ceil(3.0 * vifs_sigma(scale, scales))) + 1;
}

bool vifs_fits(int side, int scales) {
  for (int k = 1; k <= scales; ++k) {
    const int n = vifs_window(k, scales);
    if (k > 1) {
      side -= n - 1;
      if (side < 1) return false;
      side = (side + 1) / 2;
    }
    if (side < n) return false;
  }
  return true;
}

// Laplacian pyramid expand: zero-insert to (rows, cols) then filter with
// the doubled kernel.
Plane expand(const Plane& coarse, Eigen::Index rows, Eigen::Index cols,
             const Eigen::VectorXd& taps) {
  Plane up = Plane::Zero(rows, cols);
  for (Eigen::Index y = 0; y < coarse.rows() && 2 * y < rows; ++y) {
    for (Eigen::Index x = 0; x < coarse.cols() && 2 * x < cols; ++x) {
      up(2 * y, 2 * x) = coarse(y, x);
    }
  }
  return convolve_symmetric(up, 2.0 * taps);
}

std::vector<Plane> normalized_laplacian(const Plane& img, const NlpdParams& p) {
  const Eigen::VectorXd taps = Eigen::Map<const Eigen::VectorXd>(p.taps.data(), 5);
  std::vector<Plane> bands;
  bands.reserve(p.levels);
  Plane current = img;
  for (int level = 0; level < p.levels; ++level) {
    Plane band;
    if (level + 1 < p.levels) {
      Plane down = decimate2(convolve_symmetric(current, taps));
      band = current - expand(down, current.rows(), current.cols(), taps);
      current = std::move(down);
    } else {
      band = current;
    }
    const Plane local = convolve_symmetric(band.abs(), taps);
    bands.push_back(band / (p.sigma0 + local));
  }
  return bands;
}

}  // namespace

MetricId MetricId::builtin(Kind kind) {
  for (const auto& [k, name] : kBuiltinNames) {
    if (k == kind) return MetricId(kind, name);
  }
  throw Error(ErrorKind::domain, "MetricId::builtin: not a built-in kind");
}

MetricId MetricId::external(const std::string& name) {
  if (!is_safe_token(name)) {
    throw Error(ErrorKind::config,
                "external metric name '" + name +
                    "' must be a non-empty token of [A-Za-z0-9_.-]");
  }
  for (const auto& [k, builtin_name] : kBuiltinNames) {
    if (name == builtin_name) {
      throw Error(ErrorKind::config,
                  "external metric name '" + name + "' shadows a built-in");
    }
  }
  return MetricId(Kind::external, name);
}

MetricId MetricId::parse(const std::string& text) {
  for (const auto& [k, name] : kBuiltinNames) {
    if (text == name) return MetricId(k, name);
  }
  return external(text);
}

std::vector<MetricId> builtin_metrics() {
  std::vector<MetricId> out;
  for (const auto& [k, name] : kBuiltinNames) out.push_back(MetricId::builtin(k));
  return out;
}

MetricDescriptor builtin_descriptor(const MetricId& id) {
  using K = MetricId::Kind;
  switch (id.kind()) {
    case K::ssim: return {id, Polarity::higher_better, std::pair{-1.0, 1.0}};
    case K::msssim: return {id, Polarity::higher_better, std::pair{0.0, 1.0}};
    case K::vifs: return {id, Polarity::higher_better, std::nullopt};
    case K::gmsd: return {id, Polarity::lower_better, std::nullopt};
    case K::nlpd: return {id, Polarity::lower_better, std::nullopt};
    case K::external: break;
  }
  throw Error(ErrorKind::domain,
              "builtin_descriptor: '" + id.name() + "' is not built in");
}

double ssim(const Plane& ref, const Plane& dist, const SsimParams& params) {
  require_same_size(ref, dist, "ssim");
  require_min_side(ref, params.window, "ssim");
  return ssim_terms(ref, dist, params).ssim;
}

int msssim_min_side(const MsssimParams& params) {
  return params.ssim.window << (params.weights.size() - 1);
}

double msssim(const Plane& ref, const Plane& dist, const MsssimParams& params) {
  require_same_size(ref, dist, "msssim");
  require_min_side(ref, msssim_min_side(params), "msssim");
  const std::size_t scales = params.weights.size();
  Plane x = ref;
  Plane y = dist;
  double result = 1.0;
  for (std::size_t s = 0; s < scales; ++s) {
    const SsimTerms t = ssim_terms(x, y, params.ssim);
    if (s + 1 < scales) {
      result *= std::pow(std::max(t.cs, 0.0), params.weights[s]);
      x = mean_pool2(x);
      y = mean_pool2(y);
    } else {
      result *= std::pow(std::max(t.ssim, 0.0), params.weights[s]);
    }
  }
  return result;
}

double gmsd(const Plane& ref, const Plane& dist, const GmsdParams& params) {
  require_same_size(ref, dist, "gmsd");
  require_min_side(ref, 6, "gmsd");
  Eigen::MatrixXd dx(3, 3);
  dx << 1, 0, -1, 1, 0, -1, 1, 0, -1;
  dx /= 3.0;
  const Eigen::MatrixXd dy = dx.transpose();
  auto magnitude = [&](const Plane& img) {
    const Plane pooled = mean_pool2(img);
    const Plane gx = convolve2d_valid(pooled, dx);
    const Plane gy = convolve2d_valid(pooled, dy);
    return Plane((gx * gx + gy * gy).sqrt());
  };
  const Plane gr = magnitude(ref);
  const Plane gd = magnitude(dist);
  const Plane gms = (2.0 * gr * gd + params.c) / (gr * gr + gd * gd + params.c);
  const double mean = gms.mean();
  return std::sqrt((gms - mean).square().mean());
}

int vifs_min_side(const VifsParams& params) {
  int side = 1;
  while (!vifs_fits(side, params.scales)) ++side;
  return side;
}

double vifs(const Plane& ref, const Plane& dist, const VifsParams& params) {
  require_same_size(ref, dist, "vifs");
  require_min_side(ref, vifs_min_side(params), "vifs");
  const double eps = params.eps;
  double num = 0.0;
  double den = 0.0;
  Plane x = ref;
  Plane y = dist;
  for (int k = 1; k <= params.scales; ++k) {
    const int n = vifs_window(k, params.scales);
    const Eigen::VectorXd win = gaussian_kernel(n, vifs_sigma(k, params.scales));
    if (k > 1) {
      x = decimate2(convolve_valid(x, win));
      y = decimate2(convolve_valid(y, win));
    }
    const Plane mu_x = convolve_valid(x, win);
    const Plane mu_y = convolve_valid(y, win);
    Plane sxx = convolve_valid(x * x, win) - mu_x * mu_x;
    Plane syy = convolve_valid(y * y, win) - mu_y * mu_y;
    const Plane sxy = convolve_valid(x * y, win) - mu_x * mu_y;
    sxx = sxx.max(0.0);
    syy = syy.max(0.0);
    for (Eigen::Index i = 0; i < sxx.size(); ++i) {
      double g = sxy(i) / (sxx(i) + eps);
      double sv = syy(i) - g * sxy(i);
      double vx = sxx(i);
      if (vx < eps) {
        g = 0.0;
        sv = syy(i);
        vx = 0.0;
      }
      if (syy(i) < eps) {
        g = 0.0;
        sv = 0.0;
      }
      if (g < 0.0) {
        sv = syy(i);
        g = 0.0;
      }
      sv = std::max(sv, eps);
      num += std::log10(1.0 + g * g * vx / (sv + params.sigma_nsq));
      den += std::log10(1.0 + vx / params.sigma_nsq);
    }
  }
  // A flat reference carries no information; identical inputs are ideal.
  if (den <= 0.0) return (ref == dist).all() ? 1.0 : 0.0;
  return num / den;
}

int nlpd_min_side(const NlpdParams& params) { return 1 << params.levels; }

double nlpd(const Plane& ref, const Plane& dist, const NlpdParams& params) {
  require_same_size(ref, dist, "nlpd");
  require_min_side(ref, nlpd_min_side(params), "nlpd");
  const auto bands_r = normalized_laplacian(ref, params);
  const auto bands_d = normalized_laplacian(dist, params);
  double total = 0.0;
  for (std::size_t i = 0; i < bands_r.size(); ++i) {
    total += std::sqrt((bands_r[i] - bands_d[i]).square().mean());
  }
  return total / static_cast<double>(bands_r.size());
}

MetricScore compute_metric(const MetricId& id, const Image& ref,
                           const Image& dist, const MetricsConfig& config) {
  require_same_shape(ref, dist, id.name().c_str());
  const Plane r = ref.luma();
  const Plane d = dist.luma();
  using K = MetricId::Kind;
  switch (id.kind()) {
    case K::ssim: return {id, ssim(r, d, config.ssim)};
    case K::msssim: return {id, msssim(r, d, config.msssim)};
    case K::gmsd: return {id, gmsd(r, d, config.gmsd)};
    case K::vifs: return {id, vifs(r, d, config.vifs)};
    case K::nlpd: return {id, nlpd(r, d, config.nlpd)};
    case K::external: break;
  }
  throw Error(ErrorKind::domain,
              "compute_metric: '" + id.name() + "' is an external metric");
}

MetricScore score_pair(const TangentView& ref, const TangentView& dist,
                       const MetricId& metric, const ScoringContext& ctx) {
  if (ref.plane_index != dist.plane_index) {
    throw Error(ErrorKind::pairing,
                "score_pair: plane indices differ (" +
                    std::to_string(ref.plane_index) + " vs " +
                    std::to_string(dist.plane_index) + ")");
  }
  if (ref.dim() != dist.dim()) {
    throw Error(ErrorKind::pairing, "score_pair: view dimensions differ");
  }
  if (!metric.is_external()) return compute_metric(metric, ref.image, dist.image, ctx.config);

  if (ctx.plugins == nullptr) {
    throw Error(ErrorKind::plugin,
                "score_pair: no plugin registry for '" + metric.name() + "'");
  }
  const auto dir = ctx.temp_dir.empty() ? std::filesystem::temp_directory_path()
                                        : ctx.temp_dir;
  const std::string stem = metric.name() + "_" + view_file_stem(ref.plane_index);
  const auto ref_path = dir / (stem + "_ref.png");
  const auto dist_path = dir / (stem + "_dist.png");
  write_png(ref_path, ref.image, 16);
  write_png(dist_path, dist.image, 16);
  return ctx.plugins->run(metric.name(), ref_path, dist_path);
}

}  // namespace tiqa
