#include "tiqa/filters.hpp"

#include <cmath>
#include <string>

namespace tiqa {

Eigen::VectorXd gaussian_kernel(int size, double sigma) {
  if (size < 1 || size % 2 == 0) {
    throw Error(ErrorKind::domain, "gaussian_kernel: size must be odd");
  }
  Eigen::VectorXd k(size);
  const int r = size / 2;
  for (int i = 0; i < size; ++i) {
    const double d = i - r;
    k(i) = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  return k / k.sum();
}

Plane convolve_valid(const Plane& img, const Eigen::VectorXd& taps) {
  const Eigen::Index n = taps.size();
  const Eigen::Index rows = img.rows() - n + 1;
  const Eigen::Index cols = img.cols() - n + 1;
  if (rows < 1 || cols < 1) {
    throw Error(ErrorKind::support,
                "convolve_valid: image smaller than the " + std::to_string(n) +
                    "-tap window");
  }
  Plane horiz = Plane::Zero(img.rows(), cols);
  for (Eigen::Index k = 0; k < n; ++k) {
    horiz += taps(k) * img.middleCols(k, cols);
  }
  Plane out = Plane::Zero(rows, cols);
  for (Eigen::Index k = 0; k < n; ++k) {
    out += taps(k) * horiz.middleRows(k, rows);
  }
  return out;
}

Plane convolve2d_valid(const Plane& img, const Eigen::MatrixXd& kernel) {
  const Eigen::Index rows = img.rows() - kernel.rows() + 1;
  const Eigen::Index cols = img.cols() - kernel.cols() + 1;
  if (rows < 1 || cols < 1) {
    throw Error(ErrorKind::support, "convolve2d_valid: image smaller than kernel");
  }
  Plane out = Plane::Zero(rows, cols);
  for (Eigen::Index r = 0; r < kernel.rows(); ++r) {
    for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
      if (kernel(r, c) == 0.0) continue;
      out += kernel(r, c) * img.block(r, c, rows, cols);
    }
  }
  return out;
}

int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

Plane convolve_symmetric(const Plane& img, const Eigen::VectorXd& taps) {
  const int n = static_cast<int>(taps.size());
  const int r = n / 2;
  const int rows = static_cast<int>(img.rows());
  const int cols = static_cast<int>(img.cols());
  Plane horiz = Plane::Zero(rows, cols);
  for (int x = 0; x < cols; ++x) {
    for (int k = 0; k < n; ++k) {
      horiz.col(x) += taps(k) * img.col(reflect_index(x + k - r, cols));
    }
  }
  Plane out = Plane::Zero(rows, cols);
  for (int y = 0; y < rows; ++y) {
    for (int k = 0; k < n; ++k) {
      out.row(y) += taps(k) * horiz.row(reflect_index(y + k - r, rows));
    }
  }
  return out;
}

Plane mean_pool2(const Plane& img) {
  const Eigen::Index rows = img.rows() / 2;
  const Eigen::Index cols = img.cols() / 2;
  Plane out(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      out(y, x) = 0.25 * (img(2 * y, 2 * x) + img(2 * y, 2 * x + 1) +
                          img(2 * y + 1, 2 * x) + img(2 * y + 1, 2 * x + 1));
    }
  }
  return out;
}

Plane decimate2(const Plane& img) {
  const Eigen::Index rows = (img.rows() + 1) / 2;
  const Eigen::Index cols = (img.cols() + 1) / 2;
  Plane out(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) out(y, x) = img(2 * y, 2 * x);
  }
  return out;
}

}  // namespace tiqa
