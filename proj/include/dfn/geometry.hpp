#ifndef DFN_GEOMETRY_HPP
#define DFN_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <stdexcept>

namespace dfn {

/// Cartesian point / vector. 2D meshes use z = 0.
using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec3& operator+=(Vec3& a, const Vec3& b) {
  a[0] += b[0];
  a[1] += b[1];
  a[2] += b[2];
  return a;
}

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(const Vec3& a) {
  const double n = norm(a);
  if (n == 0.0) throw std::runtime_error("cannot normalize zero vector");
  return {a[0] / n, a[1] / n, a[2] / n};
}

/// Signed volume of the tetrahedron (p0, p1, p2, p3).
inline double tet_volume(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3) {
  return dot(p1 - p0, cross(p2 - p0, p3 - p0)) / 6.0;
}

/// Area of the triangle (p0, p1, p2) embedded in 3D.
inline double triangle_area(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
  return 0.5 * norm(cross(p1 - p0, p2 - p0));
}

/// Signed area of the triangle (p0, p1, p2) in the xy plane.
inline double triangle_area_2d(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
  return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
}

/// Symmetric permeability tensor, stored as the six upper entries.
struct Tensor {
  double xx = 1.0, yy = 1.0, zz = 1.0;
  double xy = 0.0, xz = 0.0, yz = 0.0;

  static Tensor isotropic(double lambda) { return {lambda, lambda, lambda, 0.0, 0.0, 0.0}; }

  Vec3 apply(const Vec3& v) const {
    return {xx * v[0] + xy * v[1] + xz * v[2], xy * v[0] + yy * v[1] + yz * v[2],
            xz * v[0] + yz * v[1] + zz * v[2]};
  }

  /// Largest eigenvalue, used to rank permeabilities around a node.
  double max_eigenvalue() const;

  bool is_spd() const;
};

}  // namespace dfn

#endif
