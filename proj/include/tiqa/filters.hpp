#pragma once

#include <Eigen/Dense>

#include "tiqa/image.hpp"

namespace tiqa {

/// Normalized 1-D Gaussian taps of odd length `size`.
Eigen::VectorXd gaussian_kernel(int size, double sigma);

/// Separable correlation with `taps` along both axes, valid region only.
/// Output is (rows - n + 1) x (cols - n + 1).
Plane convolve_valid(const Plane& img, const Eigen::VectorXd& taps);

/// Full 2-D correlation, valid region only.
Plane convolve2d_valid(const Plane& img, const Eigen::MatrixXd& kernel);

/// Separable correlation with half-sample symmetric padding; same size out.
Plane convolve_symmetric(const Plane& img, const Eigen::VectorXd& taps);

/// Maps any integer index into [0, n) by half-sample symmetric reflection
/// (-1 -> 0, n -> n - 1).
int reflect_index(int i, int n);

/// Averages non-overlapping 2x2 blocks; odd trailing rows/cols are dropped.
Plane mean_pool2(const Plane& img);

/// Keeps every second row and column starting at (0, 0).
Plane decimate2(const Plane& img);

}  // namespace tiqa
