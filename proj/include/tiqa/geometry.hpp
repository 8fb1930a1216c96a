#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "tiqa/error.hpp"

namespace tiqa {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

using Vec3d = Vec3<double>;
using Vec2d = Vec2<double>;

/// Latitude/longitude in radians. North pole is +z, lon 0 is +x, lon +pi/2
/// is +y.
template <typename Scalar>
struct SphericalPoint {
  Scalar lat{0};
  Scalar lon{0};

  /// Wraps lon into [-pi, pi) and clamps lat into [-pi/2, pi/2].
  static SphericalPoint normalized(Scalar lat, Scalar lon) {
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    constexpr Scalar two_pi = 2 * pi;
    lon = lon - two_pi * std::floor((lon + pi) / two_pi);
    if (lon >= pi) lon -= two_pi;
    if (lon < -pi) lon = -pi;
    lat = std::clamp(lat, -pi / 2, pi / 2);
    return {lat, lon};
  }

  Vec3<Scalar> direction() const {
    const Scalar c = std::cos(lat);
    return {c * std::cos(lon), c * std::sin(lon), std::sin(lat)};
  }

  static SphericalPoint from_direction(const Vec3<Scalar>& d) {
    const Vec3<Scalar> n = d.normalized();
    const Scalar lat = std::atan2(n.z(), std::sqrt(n.x() * n.x() + n.y() * n.y()));
    return normalized(lat, std::atan2(n.y(), n.x()));
  }
};

using SphericalPointd = SphericalPoint<double>;

/// Great-circle distance between two unit vectors, accurate near 0 and pi.
template <typename Scalar>
Scalar angular_distance(const Vec3<Scalar>& a, const Vec3<Scalar>& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

template <typename Scalar>
struct TangentPlane {
  Vec3<Scalar> center;
  Vec3<Scalar> basis_u;
  Vec3<Scalar> basis_v;
  Scalar fov{0};

  /// Half-width of the square view in tangent units.
  Scalar half_extent() const { return std::tan(fov / 2); }
};

using TangentPlaned = TangentPlane<double>;

inline constexpr double kHemisphereEpsilon = 1e-9;

/// Central projection of a direction onto the plane tangent at
/// plane.center. Throws out_of_hemisphere when the point is not strictly in
/// front of the plane.
template <typename Scalar>
Vec2<Scalar> gnomonic_forward(const TangentPlane<Scalar>& plane,
                              const Vec3<Scalar>& direction) {
  const Scalar c = plane.center.dot(direction);
  if (!(c > Scalar(kHemisphereEpsilon))) {
    throw Error(ErrorKind::out_of_hemisphere,
                "gnomonic_forward: point lies at or beyond the hemisphere "
                "boundary of the tangent plane");
  }
  return {plane.basis_u.dot(direction) / c, plane.basis_v.dot(direction) / c};
}

template <typename Scalar>
Vec2<Scalar> gnomonic_forward(const TangentPlane<Scalar>& plane,
                              const SphericalPoint<Scalar>& p) {
  return gnomonic_forward(plane, p.direction());
}

/// Unit direction of tangent-plane coordinates (x, y).
template <typename Scalar>
Vec3<Scalar> gnomonic_inverse_direction(const TangentPlane<Scalar>& plane,
                                        Scalar x, Scalar y) {
  return (plane.center + x * plane.basis_u + y * plane.basis_v).normalized();
}

template <typename Scalar>
SphericalPoint<Scalar> gnomonic_inverse(const TangentPlane<Scalar>& plane,
                                        Scalar x, Scalar y) {
  return SphericalPoint<Scalar>::from_direction(
      gnomonic_inverse_direction(plane, x, y));
}

// ---------------------------------------------------------------------------
// Icosahedral tessellation

inline constexpr int kIcosahedronFaces = 20;
inline constexpr int kDefaultMaxLevel = 8;

/// Number of tangent views (faces) at subdivision level b: 20 * 4^b.
std::int64_t view_count(int level);

struct IcosahedronMesh {
  int level{0};
  std::vector<Vec3d> vertices;
  std::vector<std::array<int, 3>> faces;

  std::size_t edge_count() const;
  /// V - E + F.
  std::int64_t euler_characteristic() const;
};

/// Base icosahedron (golden-ratio vertex set rotated so one vertex sits on
/// the north pole) refined by `level` rounds of 4-way midpoint subdivision.
/// Midpoints are created once per undirected edge and projected to the unit
/// sphere.
IcosahedronMesh subdivide_icosahedron(int level,
                                      int max_level = kDefaultMaxLevel);

/// Solid angle (steradians) of the spherical triangle with unit-vector
/// corners a, b, c.
double spherical_triangle_solid_angle(const Vec3d& a, const Vec3d& b,
                                      const Vec3d& c);

std::vector<double> face_solid_angles(const IcosahedronMesh& mesh);

struct TangentLayout {
  int level{0};
  int view_dim{0};
  std::vector<TangentPlaned> planes;
};

inline constexpr double kDefaultPadding = 1.3;

/// One tangent plane per face of the level-b mesh. The field of view covers
/// the face's circumscribed cone scaled by `padding`; view_dim matches the
/// ERP equatorial angular sampling at the view center.
TangentLayout build_layout(int level, int erp_width,
                           double padding = kDefaultPadding);

/// Plane oriented at `center` with v toward the north pole (x axis near the
/// poles) and u = v x center.
TangentPlaned make_tangent_plane(const Vec3d& center, double fov);

}  // namespace tiqa
