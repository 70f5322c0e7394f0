#include "dfn/submesh.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace dfn {

namespace {

struct DofKey {
  DofKind kind;
  int id;
  bool operator<(const DofKey& o) const {
    if (kind != o.kind) return kind < o.kind;
    return id < o.id;
  }
};

// P1 basis gradients on the tetrahedron (p0,p1,p2,p3); g[i] is the gradient of
// the basis function attached to vertex i.
std::array<Vec3, 4> tet_gradients(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3,
                                  double signed_vol) {
  const Vec3 a = p1 - p0, b = p2 - p0, c = p3 - p0;
  const double det = 6.0 * signed_vol;
  // rows of the inverse of [a b c] (columns), scaled by det
  const Vec3 r1 = cross(b, c), r2 = cross(c, a), r3 = cross(a, b);
  std::array<Vec3, 4> g;
  g[1] = (1.0 / det) * r1;
  g[2] = (1.0 / det) * r2;
  g[3] = (1.0 / det) * r3;
  g[0] = {-(g[1][0] + g[2][0] + g[3][0]), -(g[1][1] + g[2][1] + g[3][1]),
          -(g[1][2] + g[2][2] + g[3][2])};
  return g;
}

// P1 basis gradients on the triangle (p0,p1,p2) in the xy plane.
std::array<Vec3, 3> tri_gradients(const Vec3& p0, const Vec3& p1, const Vec3& p2,
                                  double signed_area) {
  const double det = 2.0 * signed_area;
  std::array<Vec3, 3> g;
  g[1] = {(p2[1] - p0[1]) / det, -(p2[0] - p0[0]) / det, 0.0};
  g[2] = {-(p1[1] - p0[1]) / det, (p1[0] - p0[0]) / det, 0.0};
  g[0] = {-(g[1][0] + g[2][0]), -(g[1][1] + g[2][1]), 0.0};
  return g;
}

Simplex make_simplex(int cell, int face, double measure,
                     const std::map<DofKey, Vec3>& grads) {
  Simplex s;
  s.cell = cell;
  s.face = face;
  s.measure = measure;
  s.dofs.reserve(grads.size());
  for (const auto& [key, g] : grads) s.dofs.push_back({key.kind, key.id, g});
  return s;
}

constexpr double kDegenerate = 1e-300;

}  // namespace

Submesh build_submesh(const Mesh& mesh) {
  Submesh sub;
  sub.cell_range.resize(mesh.n_cells());
  sub.cell_volume.assign(mesh.n_cells(), 0.0);

  for (int k = 0; k < mesh.n_cells(); ++k) {
    sub.cell_range[k][0] = static_cast<int>(sub.simplices.size());
    const Vec3 xk = mesh.cell_center[k];

    for (int f : mesh.cell_faces[k]) {
      const auto& fnodes = mesh.face_nodes[f];
      const bool frac = mesh.is_fracture_face(f);
      const Vec3 xf = mesh.face_center[f];

      if (mesh.dim == 2) {
        const Vec3 a = mesh.nodes[fnodes[0]], b = mesh.nodes[fnodes[1]];
        if (!frac) {
          const double sa = triangle_area_2d(xk, a, b);
          if (std::abs(sa) < kDegenerate) throw std::runtime_error("degenerate submesh triangle");
          auto g = tri_gradients(xk, a, b, sa);
          std::map<DofKey, Vec3> grads;
          grads[{DofKind::Cell, k}] = g[0];
          grads[{DofKind::Node, fnodes[0]}] = g[1];
          grads[{DofKind::Node, fnodes[1]}] = g[2];
          sub.simplices.push_back(make_simplex(k, f, std::abs(sa), grads));
          sub.cell_volume[k] += std::abs(sa);
        } else {
          // fracture edge split at its midpoint x_sigma
          for (int half = 0; half < 2; ++half) {
            const Vec3 p1 = half == 0 ? a : xf;
            const Vec3 p2 = half == 0 ? xf : b;
            const double sa = triangle_area_2d(xk, p1, p2);
            if (std::abs(sa) < kDegenerate) throw std::runtime_error("degenerate submesh triangle");
            auto g = tri_gradients(xk, p1, p2, sa);
            std::map<DofKey, Vec3> grads;
            grads[{DofKind::Cell, k}] = g[0];
            if (half == 0) {
              grads[{DofKind::Node, fnodes[0]}] = g[1];
              grads[{DofKind::FractureFace, f}] = g[2];
            } else {
              grads[{DofKind::FractureFace, f}] = g[1];
              grads[{DofKind::Node, fnodes[1]}] = g[2];
            }
            sub.simplices.push_back(make_simplex(k, f, std::abs(sa), grads));
            sub.cell_volume[k] += std::abs(sa);
          }
        }
      } else {
        const int nv = static_cast<int>(fnodes.size());
        const double beta = 1.0 / nv;
        for (int e = 0; e < nv; ++e) {
          const int sa_id = fnodes[e];
          const int sb_id = fnodes[(e + 1) % nv];
          const double vol = tet_volume(xk, xf, mesh.nodes[sa_id], mesh.nodes[sb_id]);
          if (std::abs(vol) < kDegenerate) throw std::runtime_error("degenerate submesh tetrahedron");
          auto g = tet_gradients(xk, xf, mesh.nodes[sa_id], mesh.nodes[sb_id], vol);
          std::map<DofKey, Vec3> grads;
          grads[{DofKind::Cell, k}] = g[0];
          if (frac) {
            grads[{DofKind::FractureFace, f}] = g[1];
          } else {
            // I_sigma eliminates the face-centre value: every node of the face
            // picks up beta times the centre basis gradient
            for (int s : fnodes) grads[{DofKind::Node, s}] += beta * g[1];
          }
          grads[{DofKind::Node, sa_id}] += g[2];
          grads[{DofKind::Node, sb_id}] += g[3];
          sub.simplices.push_back(make_simplex(k, f, std::abs(vol), grads));
          sub.cell_volume[k] += std::abs(vol);
        }
      }
    }
    sub.cell_range[k][1] = static_cast<int>(sub.simplices.size());
  }
  return sub;
}

}  // namespace dfn
