#include "tiqa/geometry.hpp"

#include <Eigen/Geometry>

#include <map>
#include <set>
#include <string>
#include <utility>

namespace tiqa {

std::int64_t view_count(int level) {
  if (level < 0) {
    throw Error(ErrorKind::domain, "view_count: level must be non-negative");
  }
  return std::int64_t{kIcosahedronFaces} << (2 * level);
}

std::size_t IcosahedronMesh::edge_count() const {
  std::set<std::pair<int, int>> edges;
  for (const auto& f : faces) {
    for (int k = 0; k < 3; ++k) {
      const int a = f[k];
      const int b = f[(k + 1) % 3];
      edges.emplace(std::min(a, b), std::max(a, b));
    }
  }
  return edges.size();
}

std::int64_t IcosahedronMesh::euler_characteristic() const {
  return static_cast<std::int64_t>(vertices.size()) -
         static_cast<std::int64_t>(edge_count()) +
         static_cast<std::int64_t>(faces.size());
}

namespace {

IcosahedronMesh base_icosahedron() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  IcosahedronMesh mesh;
  mesh.vertices = {
      {-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1},
  };
  mesh.faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };
  // Put vertex 5 on the north pole.
  const Eigen::Quaterniond rot = Eigen::Quaterniond::FromTwoVectors(
      mesh.vertices[5].normalized(), Vec3d::UnitZ());
  for (auto& v : mesh.vertices) v = (rot * v.normalized()).normalized();
  mesh.vertices[5] = Vec3d::UnitZ();
  return mesh;
}

}  // namespace

IcosahedronMesh subdivide_icosahedron(int level, int max_level) {
  if (level < 0) {
    throw Error(ErrorKind::domain,
                "subdivide_icosahedron: level must be non-negative");
  }
  if (level > max_level) {
    throw Error(ErrorKind::capacity,
                "subdivide_icosahedron: level " + std::to_string(level) +
                    " exceeds the configured maximum " +
                    std::to_string(max_level));
  }
  IcosahedronMesh mesh = base_icosahedron();
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::make_pair(std::min(a, b), std::max(a, b));
      if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
      const int idx = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(
          (mesh.vertices[key.first] + mesh.vertices[key.second]).normalized());
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> faces;
    faces.reserve(mesh.faces.size() * 4);
    for (const auto& [a, b, c] : mesh.faces) {
      const int ab = mid(a, b);
      const int bc = mid(b, c);
      const int ca = mid(c, a);
      faces.push_back({a, ab, ca});
      faces.push_back({b, bc, ab});
      faces.push_back({c, ca, bc});
      faces.push_back({ab, bc, ca});
    }
    mesh.faces = std::move(faces);
    mesh.level = l + 1;
  }
  return mesh;
}

double spherical_triangle_solid_angle(const Vec3d& a, const Vec3d& b,
                                      const Vec3d& c) {
  // Van Oosterom & Strackee.
  const double triple = std::abs(a.dot(b.cross(c)));
  const double denom = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(triple, denom);
}

std::vector<double> face_solid_angles(const IcosahedronMesh& mesh) {
  std::vector<double> out;
  out.reserve(mesh.faces.size());
  for (const auto& [a, b, c] : mesh.faces) {
    out.push_back(spherical_triangle_solid_angle(
        mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]));
  }
  return out;
}

TangentPlaned make_tangent_plane(const Vec3d& center, double fov) {
  TangentPlaned plane;
  plane.center = center.normalized();
  plane.fov = fov;
  const Vec3d north = Vec3d::UnitZ();
  const Vec3d up = std::abs(plane.center.dot(north)) > 1.0 - 1e-9
                       ? Vec3d::UnitX()
                       : north;
  plane.basis_v = (up - up.dot(plane.center) * plane.center).normalized();
  plane.basis_u = plane.basis_v.cross(plane.center).normalized();
  return plane;
}

TangentLayout build_layout(int level, int erp_width, double padding) {
  if (erp_width < 16) {
    throw Error(ErrorKind::domain, "build_layout: erp_width must be >= 16");
  }
  if (!(padding >= 1.0 && padding <= 2.0)) {
    throw Error(ErrorKind::domain,
                "build_layout: padding must lie in [1.0, 2.0]");
  }
  const IcosahedronMesh mesh = subdivide_icosahedron(level);
  TangentLayout layout;
  layout.level = level;
  layout.planes.reserve(mesh.faces.size());
  double max_fov = 0.0;
  for (const auto& face : mesh.faces) {
    const Vec3d center = (mesh.vertices[face[0]] + mesh.vertices[face[1]] +
                          mesh.vertices[face[2]])
                             .normalized();
    double radius = 0.0;
    for (int k : face) {
      radius = std::max(radius, angular_distance(center, mesh.vertices[k]));
    }
    const double fov = padding * 2.0 * radius;
    if (!(fov < std::numbers::pi)) {
      throw Error(ErrorKind::domain,
                  "build_layout: padded field of view reaches the hemisphere "
                  "boundary");
    }
    max_fov = std::max(max_fov, fov);
    layout.planes.push_back(make_tangent_plane(center, fov));
  }
  // Shared view_dim, sized for the widest plane.
  const double pixel_angle = 2.0 * std::numbers::pi / erp_width;
  auto dim = static_cast<int>(std::ceil(max_fov / pixel_angle - 1e-9));
  if (dim % 2 != 0) ++dim;
  layout.view_dim = dim;
  return layout;
}

}  // namespace tiqa
