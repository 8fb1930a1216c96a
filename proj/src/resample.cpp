#include "tiqa/resample.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include "tiqa/parallel.hpp"

namespace tiqa {

namespace {

constexpr double kPi = std::numbers::pi;

int wrap_index(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

double cubic_weight(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

SphericalPointd erp_pixel_to_sphere(double u, double v, int width, int height) {
  const double lon = ((u + 0.5) / width - 0.5) * 2.0 * kPi;
  const double lat = (0.5 - (v + 0.5) / height) * kPi;
  return {lat, lon};
}

Vec2d sphere_to_erp_pixel(const SphericalPointd& p, int width, int height) {
  return {(p.lon / (2.0 * kPi) + 0.5) * width - 0.5,
          (0.5 - p.lat / kPi) * height - 0.5};
}

Sample sample_erp(const Image& img, const SphericalPointd& p, Interp interp) {
  const int w = img.width();
  const int h = img.height();
  const int channels = img.channels();
  const Vec2d f = sphere_to_erp_pixel(p, w, h);
  const double fu = f.x();
  const double fv = std::clamp(f.y(), 0.0, double(h - 1));
  const int x0 = static_cast<int>(std::floor(fu));
  const int y0 = static_cast<int>(std::floor(fv));
  const double tx = fu - x0;
  const double ty = fv - y0;

  Sample out = Sample::Zero(channels);
  if (interp == Interp::bilinear) {
    const int xa = wrap_index(x0, w);
    const int xb = wrap_index(x0 + 1, w);
    const int ya = std::clamp(y0, 0, h - 1);
    const int yb = std::clamp(y0 + 1, 0, h - 1);
    for (int c = 0; c < channels; ++c) {
      const auto& pl = img.plane(c);
      const double top = (1.0 - tx) * pl(ya, xa) + tx * pl(ya, xb);
      const double bot = (1.0 - tx) * pl(yb, xa) + tx * pl(yb, xb);
      out(c) = (1.0 - ty) * top + ty * bot;
    }
    return out;
  }

  double wx[4], wy[4];
  int xs[4], ys[4];
  for (int k = 0; k < 4; ++k) {
    wx[k] = cubic_weight(tx - (k - 1));
    wy[k] = cubic_weight(ty - (k - 1));
    xs[k] = wrap_index(x0 + k - 1, w);
    ys[k] = std::clamp(y0 + k - 1, 0, h - 1);
  }
  for (int c = 0; c < channels; ++c) {
    const auto& pl = img.plane(c);
    double acc = 0.0;
    for (int j = 0; j < 4; ++j) {
      double row = 0.0;
      for (int i = 0; i < 4; ++i) row += wx[i] * pl(ys[j], xs[i]);
      acc += wy[j] * row;
    }
    out(c) = clamp01(acc);
  }
  return out;
}

double view_pixel_to_tangent(int i, int dim, double half_extent) {
  return (2.0 * (i + 0.5) / dim - 1.0) * half_extent;
}

TangentView render_view(const ErpImage& img, const TangentLayout& layout,
                        int plane_index, Interp interp) {
  if (plane_index < 0 || plane_index >= static_cast<int>(layout.planes.size())) {
    throw Error(ErrorKind::domain, "render_view: plane index " +
                                       std::to_string(plane_index) +
                                       " out of range");
  }
  const TangentPlaned& plane = layout.planes[plane_index];
  const int dim = layout.view_dim;
  const double half = plane.half_extent();
  Image view(dim, dim, img.channels());
  for (int j = 0; j < dim; ++j) {
    // Row 0 is the top of the view (toward basis_v).
    const double y = -view_pixel_to_tangent(j, dim, half);
    for (int i = 0; i < dim; ++i) {
      const double x = view_pixel_to_tangent(i, dim, half);
      const Sample s =
          sample_erp(img.image(), gnomonic_inverse(plane, x, y), interp);
      for (int c = 0; c < img.channels(); ++c) {
        view.at(i, j, c) = static_cast<float>(s(c));
      }
    }
  }
  return {plane_index, std::move(view)};
}

std::vector<TangentView> render_all_views(const ErpImage& img,
                                          const TangentLayout& layout,
                                          Interp interp, int threads) {
  std::vector<TangentView> views(layout.planes.size());
  parallel_for(views.size(), threads, [&](std::size_t i) {
    views[i] = render_view(img, layout, static_cast<int>(i), interp);
  });
  return views;
}

// ---------------------------------------------------------------------------
// Separable integer-factor resampling

namespace {

struct Tap {
  int index;
  double weight;
};
using TapTable = std::vector<std::vector<Tap>>;

TapTable build_taps(int in_len, int out_len, Kernel kernel, double sigma,
                    bool wrap) {
  const double ratio = double(in_len) / out_len;
  auto fix = [&](int i) {
    return wrap ? wrap_index(i, in_len) : std::clamp(i, 0, in_len - 1);
  };
  TapTable table(out_len);
  for (int o = 0; o < out_len; ++o) {
    const double center = (o + 0.5) * ratio;  // continuous coordinate
    auto& taps = table[o];
    if (kernel == Kernel::nearest) {
      taps.push_back({fix(static_cast<int>(std::floor(center))), 1.0});
      continue;
    }
    double support = 0.0;
    double stretch = 1.0;
    switch (kernel) {
      case Kernel::bicubic:
        support = 2.0;
        stretch = std::max(1.0, ratio);
        break;
      case Kernel::bilinear:
        support = 1.0;
        stretch = std::max(1.0, ratio);
        break;
      case Kernel::gaussian:
        support = std::ceil(3.0 * sigma);
        break;
      case Kernel::nearest:
        break;
    }
    const double radius = support * stretch;
    const int lo = static_cast<int>(std::floor(center - radius - 0.5));
    const int hi = static_cast<int>(std::ceil(center + radius - 0.5));
    double total = 0.0;
    for (int j = lo; j <= hi; ++j) {
      const double d = (j + 0.5 - center) / stretch;
      double w = 0.0;
      switch (kernel) {
        case Kernel::bicubic: w = cubic_weight(d); break;
        case Kernel::bilinear: w = std::max(0.0, 1.0 - std::abs(d)); break;
        case Kernel::gaussian:
          w = std::abs(d) <= support ? std::exp(-0.5 * d * d / (sigma * sigma)) : 0.0;
          break;
        case Kernel::nearest: break;
      }
      if (w != 0.0) {
        taps.push_back({fix(j), w});
        total += w;
      }
    }
    for (auto& t : taps) t.weight /= total;
  }
  return table;
}

Plane apply_rows(const Plane& in, const TapTable& taps) {
  Plane out(in.rows(), static_cast<Eigen::Index>(taps.size()));
  for (Eigen::Index y = 0; y < in.rows(); ++y) {
    for (std::size_t o = 0; o < taps.size(); ++o) {
      double acc = 0.0;
      for (const auto& t : taps[o]) acc += t.weight * in(y, t.index);
      out(y, static_cast<Eigen::Index>(o)) = acc;
    }
  }
  return out;
}

Plane apply_cols(const Plane& in, const TapTable& taps) {
  Plane out(static_cast<Eigen::Index>(taps.size()), in.cols());
  for (std::size_t o = 0; o < taps.size(); ++o) {
    out.row(static_cast<Eigen::Index>(o)).setZero();
    for (const auto& t : taps[o]) {
      out.row(static_cast<Eigen::Index>(o)) += t.weight * in.row(t.index);
    }
  }
  return out;
}

Image resample(const Image& img, int out_w, int out_h, Kernel kernel,
               double sigma) {
  const TapTable horizontal =
      build_taps(img.width(), out_w, kernel, sigma, /*wrap=*/true);
  const TapTable vertical =
      build_taps(img.height(), out_h, kernel, sigma, /*wrap=*/false);
  std::vector<Plane> planes;
  for (int c = 0; c < img.channels(); ++c) {
    planes.push_back(apply_cols(apply_rows(img.plane_d(c), horizontal), vertical));
  }
  return Image::from_planes(planes);
}

}  // namespace

Image degrade(const Image& img, const DegradeSpec& spec) {
  if (spec.scale < 2) {
    throw Error(ErrorKind::domain, "degrade: scale must be >= 2");
  }
  if (spec.kernel == Kernel::gaussian && !(spec.sigma > 0.0)) {
    throw Error(ErrorKind::domain, "degrade: gaussian sigma must be positive");
  }
  if (img.width() % spec.scale != 0 || img.height() % spec.scale != 0) {
    throw Error(ErrorKind::dimension,
                "degrade: " + std::to_string(img.width()) + "x" +
                    std::to_string(img.height()) + " is not divisible by " +
                    std::to_string(spec.scale));
  }
  return resample(img, img.width() / spec.scale, img.height() / spec.scale,
                  spec.kernel, spec.sigma);
}

ErpImage degrade(const ErpImage& img, const DegradeSpec& spec) {
  return ErpImage(degrade(img.image(), spec), /*allow_any_aspect=*/true);
}

Image upsample(const Image& img, int scale, Kernel kernel) {
  if (scale < 1) throw Error(ErrorKind::domain, "upsample: scale must be >= 1");
  if (kernel == Kernel::gaussian) {
    throw Error(ErrorKind::domain, "upsample: gaussian kernel is decimation-only");
  }
  return resample(img, img.width() * scale, img.height() * scale, kernel, 1.0);
}

ErpImage upsample(const ErpImage& img, int scale, Kernel kernel) {
  return ErpImage(upsample(img.image(), scale, kernel), /*allow_any_aspect=*/true);
}

Image gaussian_blur(const Image& img, double sigma) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorKind::domain, "gaussian_blur: sigma must be positive");
  }
  return resample(img, img.width(), img.height(), Kernel::gaussian, sigma);
}

Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  Image out = img;
  for (int c = 0; c < out.channels(); ++c) {
    auto& pl = out.plane(c);
    for (Eigen::Index y = 0; y < pl.rows(); ++y) {
      for (Eigen::Index x = 0; x < pl.cols(); ++x) {
        pl(y, x) = static_cast<float>(clamp01(pl(y, x) + noise(rng)));
      }
    }
  }
  return out;
}

}  // namespace tiqa
