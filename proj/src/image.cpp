#include "tiqa/image.hpp"

#include <string>

namespace tiqa {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::domain: return "domain";
    case ErrorKind::out_of_hemisphere: return "out_of_hemisphere";
    case ErrorKind::shape: return "shape";
    case ErrorKind::support: return "support";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::aspect: return "aspect";
    case ErrorKind::plugin: return "plugin";
    case ErrorKind::pairing: return "pairing";
    case ErrorKind::aggregation: return "aggregation";
    case ErrorKind::layout: return "layout";
    case ErrorKind::identifiability: return "identifiability";
    case ErrorKind::incomplete_data: return "incomplete_data";
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

Image::Image(int width, int height, int channels, float fill)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::dimension, "image dimensions must be positive");
  }
  if (channels != 1 && channels != 3) {
    throw Error(ErrorKind::format, "images must have 1 or 3 channels");
  }
  planes_.assign(channels, PlaneF::Constant(height, width, fill));
}

Image::Image(std::vector<PlaneF> planes) : planes_(std::move(planes)) {
  if (planes_.size() != 1 && planes_.size() != 3) {
    throw Error(ErrorKind::format, "images must have 1 or 3 channels");
  }
  height_ = static_cast<int>(planes_[0].rows());
  width_ = static_cast<int>(planes_[0].cols());
  if (width_ <= 0 || height_ <= 0) {
    throw Error(ErrorKind::dimension, "image dimensions must be positive");
  }
  for (const auto& p : planes_) {
    if (p.rows() != height_ || p.cols() != width_) {
      throw Error(ErrorKind::shape, "image planes differ in size");
    }
  }
}

Image Image::from_plane(const Plane& plane) {
  return Image({plane.max(0.0).min(1.0).cast<float>()});
}

Image Image::from_planes(const std::vector<Plane>& planes) {
  std::vector<PlaneF> out;
  out.reserve(planes.size());
  for (const auto& p : planes) out.emplace_back(p.max(0.0).min(1.0).cast<float>());
  return Image(std::move(out));
}

Plane Image::luma() const {
  if (channels() == 1) return plane_d(0);
  return 0.299 * plane_d(0) + 0.587 * plane_d(1) + 0.114 * plane_d(2);
}

std::vector<float> Image::interleaved() const {
  const int c = channels();
  std::vector<float> out(static_cast<std::size_t>(width_) * height_ * c);
  std::size_t i = 0;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      for (int k = 0; k < c; ++k) out[i++] = planes_[k](y, x);
    }
  }
  return out;
}

bool Image::operator==(const Image& other) const {
  if (width_ != other.width_ || height_ != other.height_ ||
      planes_.size() != other.planes_.size()) {
    return false;
  }
  for (std::size_t k = 0; k < planes_.size(); ++k) {
    if ((planes_[k] != other.planes_[k]).any()) return false;
  }
  return true;
}

ErpImage::ErpImage(Image image, bool allow_any_aspect)
    : image_(std::move(image)) {
  if (image_.empty()) {
    throw Error(ErrorKind::dimension, "ERP image is empty");
  }
  if (!allow_any_aspect && image_.width() != 2 * image_.height()) {
    throw Error(ErrorKind::aspect,
                "ERP image must have a 2:1 aspect ratio, got " +
                    std::to_string(image_.width()) + "x" +
                    std::to_string(image_.height()) +
                    " (use --allow-any-aspect to override)");
  }
  for (int c = 0; c < image_.channels(); ++c) {
    const auto& p = image_.plane(c);
    if (!p.isFinite().all() || p.minCoeff() < 0.0f || p.maxCoeff() > 1.0f) {
      throw Error(ErrorKind::domain, "ERP samples must lie in [0, 1]");
    }
  }
}

void require_same_shape(const Image& a, const Image& b, const char* context) {
  if (a.width() != b.width() || a.height() != b.height() ||
      a.channels() != b.channels()) {
    throw Error(ErrorKind::shape,
                std::string(context) + ": image shapes differ (" +
                    std::to_string(a.width()) + "x" +
                    std::to_string(a.height()) + "x" +
                    std::to_string(a.channels()) + " vs " +
                    std::to_string(b.width()) + "x" +
                    std::to_string(b.height()) + "x" +
                    std::to_string(b.channels()) + ")");
  }
}

}  // namespace tiqa
