#pragma once

#include <cstdint>
#include <vector>

#include "tiqa/geometry.hpp"
#include "tiqa/image.hpp"

namespace tiqa {

enum class Interp { bilinear, bicubic };

/// Resampling kernels for integer-factor scaling.
enum class Kernel { bicubic, bilinear, nearest, gaussian };

struct DegradeSpec {
  int scale{4};
  Kernel kernel{Kernel::bicubic};
  double sigma{1.0};  // only used by Kernel::gaussian
};

/// Up to three channel values.
using Sample = Eigen::Array<double, Eigen::Dynamic, 1, 0, 3, 1>;

/// Pixel-center convention: column u covers lon in
/// [-pi + 2pi u / W, -pi + 2pi (u+1) / W); row 0 is the north edge.
SphericalPointd erp_pixel_to_sphere(double u, double v, int width, int height);

/// Fractional pixel coordinates of p; integer results are pixel centers.
Vec2d sphere_to_erp_pixel(const SphericalPointd& p, int width, int height);

/// Interpolates the ERP at p. Longitude wraps at the seam, latitude clamps
/// at the poles. Bicubic uses Catmull-Rom (a = -0.5) and clamps to [0, 1].
Sample sample_erp(const Image& img, const SphericalPointd& p, Interp interp);

/// Tangent coordinate of view pixel index i (column or row) before the row
/// flip: (2 (i + 0.5) / dim - 1) tan(fov / 2).
double view_pixel_to_tangent(int i, int dim, double half_extent);

TangentView render_view(const ErpImage& img, const TangentLayout& layout,
                        int plane_index, Interp interp = Interp::bicubic);

/// All views in face order. Any thread count yields bit-identical output.
std::vector<TangentView> render_all_views(const ErpImage& img,
                                          const TangentLayout& layout,
                                          Interp interp = Interp::bicubic,
                                          int threads = 1);

/// Integer-factor decimation. Bicubic and bilinear kernels are stretched by
/// the scale factor (area-style antialiasing); nearest picks the pixel under
/// each output center; gaussian weights input pixels by a Gaussian of
/// `sigma` input pixels centered on each output sample.
/// Throws dimension error if either side is not divisible by scale.
Image degrade(const Image& img, const DegradeSpec& spec);
ErpImage degrade(const ErpImage& img, const DegradeSpec& spec);

/// Integer-factor magnification; output clamped to [0, 1].
Image upsample(const Image& img, int scale, Kernel kernel);
ErpImage upsample(const ErpImage& img, int scale, Kernel kernel);

/// Separable Gaussian blur (radius ceil(3 sigma)), wrapping horizontally and
/// clamping vertically.
Image gaussian_blur(const Image& img, double sigma);

/// Adds seeded zero-mean Gaussian noise and clamps to [0, 1].
Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed);

/// Catmull-Rom cubic kernel with a = -0.5.
double cubic_weight(double x);

}  // namespace tiqa
