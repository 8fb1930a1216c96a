#pragma once

#include <Eigen/Dense>

#include <vector>

#include "tiqa/error.hpp"

namespace tiqa {

/// Single-precision storage plane, row-major (rows = height).
using PlaneF =
    Eigen::Array<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// Double-precision working plane used by every kernel.
using Plane = Eigen::ArrayXXd;

enum class Colorspace { gray, rgb };

/// Planar image with samples in [0, 1]. Channels are 1 (gray) or 3 (RGB).
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, float fill = 0.0f);
  explicit Image(std::vector<PlaneF> planes);

  /// Builds a gray image from a double plane, clamping to [0, 1].
  static Image from_plane(const Plane& plane);
  static Image from_planes(const std::vector<Plane>& planes);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return static_cast<int>(planes_.size()); }
  Colorspace colorspace() const noexcept {
    return channels() == 3 ? Colorspace::rgb : Colorspace::gray;
  }
  bool empty() const noexcept { return planes_.empty(); }

  const PlaneF& plane(int c) const { return planes_.at(c); }
  PlaneF& plane(int c) { return planes_.at(c); }

  float at(int x, int y, int c = 0) const { return planes_[c](y, x); }
  float& at(int x, int y, int c = 0) { return planes_[c](y, x); }

  /// Channel c promoted to double.
  Plane plane_d(int c) const { return planes_.at(c).cast<double>(); }

  /// Rec.601 luma (0.299 R + 0.587 G + 0.114 B) or the gray channel.
  Plane luma() const;

  /// Interleaved row-major samples (length width * height * channels).
  std::vector<float> interleaved() const;

  bool operator==(const Image& other) const;

 private:
  int width_{0};
  int height_{0};
  std::vector<PlaneF> planes_;
};

/// Full-sphere equirectangular image. The 2:1 aspect is enforced unless the
/// caller explicitly allows any aspect.
class ErpImage {
 public:
  ErpImage() = default;
  explicit ErpImage(Image image, bool allow_any_aspect = false);

  const Image& image() const noexcept { return image_; }
  int width() const noexcept { return image_.width(); }
  int height() const noexcept { return image_.height(); }
  int channels() const noexcept { return image_.channels(); }

 private:
  Image image_;
};

/// Rendered square view of one tangent plane.
struct TangentView {
  int plane_index{0};
  Image image;

  int dim() const noexcept { return image.width(); }
};

/// Throws shape error unless both images share dimensions and channels.
void require_same_shape(const Image& a, const Image& b, const char* context);

}  // namespace tiqa
