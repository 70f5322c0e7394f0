#include "dfn/vag.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace dfn {

CellTransmissibilities assemble_cell_transmissibilities(const Mesh& mesh, const Submesh& sub,
                                                        const MatrixProperties& props, double mu,
                                                        const DofLayout& layout) {
  props.validate();
  if (!(mu > 0.0)) throw std::invalid_argument("viscosity must be positive");

  CellTransmissibilities ct;
  ct.dofs.resize(mesh.n_cells());
  ct.a.resize(mesh.n_cells());

  std::vector<int> local_of_gid(layout.size(), -1);
  for (int k = 0; k < mesh.n_cells(); ++k) {
    auto& dofs = ct.dofs[k];
    for (int s : mesh.cell_nodes[k]) dofs.push_back(layout.node_gid(s));
    for (int f : mesh.cell_faces[k])
      if (mesh.is_fracture_face(f)) dofs.push_back(layout.frac_gid_of_face(f));
    const int n = static_cast<int>(dofs.size());
    for (int i = 0; i < n; ++i) local_of_gid[dofs[i]] = i;

    auto& a = ct.a[k];
    a.assign(size_t(n) * n, 0.0);
    const Tensor lam = props.permeability[k];

    // gather local (index, grad) pairs per simplex, skipping the cell dof
    std::vector<std::pair<int, Vec3>> loc;
    for (int t = sub.cell_range[k][0]; t < sub.cell_range[k][1]; ++t) {
      const Simplex& sp = sub.simplices[t];
      loc.clear();
      for (const auto& d : sp.dofs) {
        if (d.kind == DofKind::Cell) continue;
        const int gid = d.kind == DofKind::Node ? layout.node_gid(d.id)
                                                : layout.frac_gid_of_face(d.id);
        loc.emplace_back(local_of_gid[gid], d.grad);
      }
      const double w = sp.measure / mu;
      for (const auto& [i, gi] : loc) {
        const Vec3 lgi = lam.apply(gi);
        for (const auto& [j, gj] : loc) a[size_t(i) * n + j] += w * dot(lgi, gj);
      }
    }
    for (int i = 0; i < n; ++i) local_of_gid[dofs[i]] = -1;
  }
  return ct;
}

FractureFrame fracture_frame(const Mesh& mesh, int fracture_id) {
  // first face of this fracture defines the plane
  int face = -1;
  for (int f : mesh.fracture_faces)
    if (mesh.fracture_id_of_face[f] == fracture_id) {
      face = f;
      break;
    }
  if (face < 0) throw std::invalid_argument("unknown fracture id");

  if (mesh.dim == 2) {
    const auto& fn = mesh.face_nodes[face];
    const Vec3 t = normalized(mesh.nodes[fn[1]] - mesh.nodes[fn[0]]);
    return {t, {0, 0, 0}};
  }
  const auto& fn = mesh.face_nodes[face];
  const Vec3 n =
      normalized(cross(mesh.nodes[fn[1]] - mesh.nodes[fn[0]], mesh.nodes[fn[2]] - mesh.nodes[fn[0]]));
  // first tangent: global axis most aligned with the plane, projected
  int best = 0;
  double best_proj = -1.0;
  for (int a = 0; a < 3; ++a) {
    Vec3 e{0, 0, 0};
    e[a] = 1.0;
    const double proj = 1.0 - n[a] * n[a];
    if (proj > best_proj + 1e-14) {
      best_proj = proj;
      best = a;
    }
  }
  Vec3 e{0, 0, 0};
  e[best] = 1.0;
  const Vec3 t1 = normalized(e - dot(e, n) * n);
  const Vec3 t2 = cross(n, t1);
  return {t1, t2};
}

FaceTransmissibilities assemble_face_transmissibilities(const Mesh& mesh,
                                                        const FractureProperties& props, double mu,
                                                        const DofLayout& layout) {
  props.validate();
  if (!(mu > 0.0)) throw std::invalid_argument("viscosity must be positive");

  FaceTransmissibilities ft;
  const int nf = mesh.n_fracture_faces();
  ft.dofs.resize(nf);
  ft.a.resize(nf);

  std::vector<FractureFrame> frames(mesh.n_fractures());
  for (int i = 0; i < mesh.n_fractures(); ++i) frames[i] = fracture_frame(mesh, i);

  for (int fi = 0; fi < nf; ++fi) {
    const int f = mesh.fracture_faces[fi];
    const int id = mesh.fracture_id_of_face[f];
    const auto& fn = mesh.face_nodes[f];
    const int n = static_cast<int>(fn.size());
    for (int s : fn) ft.dofs[fi].push_back(layout.node_gid(s));
    auto& a = ft.a[fi];
    a.assign(size_t(n) * n, 0.0);

    const double d_f = props.width[id];
    const Tensor lam = props.permeability[id];

    if (mesh.dim == 2) {
      // two sub-segments split at the midpoint dof: no cross coupling
      const Vec3 t = frames[id].t1;
      const double lam_t = dot(t, lam.apply(t));
      const double len = norm(mesh.nodes[fn[1]] - mesh.nodes[fn[0]]);
      const double kappa = d_f * lam_t / mu;
      a[0] = 2.0 * kappa / len;        // a_{s0,s0}
      a[size_t(n) * 1 + 1] = 2.0 * kappa / len;  // a_{s1,s1}
    } else {
      const Vec3 t1 = frames[id].t1, t2 = frames[id].t2;
      const Vec3 xf = mesh.face_center[f];
      auto plane = [&](const Vec3& p) {
        const Vec3 d = p - xf;
        return std::array<double, 2>{dot(d, t1), dot(d, t2)};
      };
      for (int e = 0; e < n; ++e) {
        const int sa = e, sb = (e + 1) % n;
        const auto pa = plane(mesh.nodes[fn[sa]]);
        const auto pb = plane(mesh.nodes[fn[sb]]);
        // triangle (x_sigma=origin, pa, pb) in plane coordinates
        const double det = pa[0] * pb[1] - pb[0] * pa[1];
        const double area = 0.5 * std::abs(det);
        if (area <= 0.0) throw std::runtime_error("degenerate fracture-face triangle");
        // P1 gradients of the two node basis functions (centre dof excluded
        // from the a matrix)
        const std::array<double, 2> ga = {pb[1] / det, -pb[0] / det};
        const std::array<double, 2> gb = {-pa[1] / det, pa[0] / det};
        const double w = area * d_f / mu;
        auto lam_dot = [&](const std::array<double, 2>& u, const std::array<double, 2>& v) {
          return u[0] * (lam.xx * v[0] + lam.xy * v[1]) + u[1] * (lam.xy * v[0] + lam.yy * v[1]);
        };
        a[size_t(sa) * n + sa] += w * lam_dot(ga, ga);
        a[size_t(sb) * n + sb] += w * lam_dot(gb, gb);
        a[size_t(sa) * n + sb] += w * lam_dot(ga, gb);
        a[size_t(sb) * n + sa] += w * lam_dot(gb, ga);
      }
    }
  }
  return ft;
}

double matrix_flux(int cell, int nu_gid, const DofVector& v, const CellTransmissibilities& ct,
                   const DofLayout& layout) {
  const auto& dofs = ct.dofs[cell];
  const auto it = std::find(dofs.begin(), dofs.end(), nu_gid);
  if (it == dofs.end()) throw std::out_of_range("dof is not incident to this cell");
  const int i = static_cast<int>(it - dofs.begin());
  const int n = static_cast<int>(dofs.size());
  const double vk = v[layout.cell_gid(cell)];
  double flux = 0.0;
  for (int j = 0; j < n; ++j) flux += ct.a[cell][size_t(i) * n + j] * (vk - v[dofs[j]]);
  return flux;
}

double fracture_flux(int face, int node, const DofVector& v, const FaceTransmissibilities& ft,
                     const DofLayout& layout, const Mesh& mesh) {
  const int fi = layout.frac_index(face);
  if (fi < 0) throw std::out_of_range("face is not a fracture face");
  const auto& dofs = ft.dofs[fi];
  const auto it = std::find(dofs.begin(), dofs.end(), layout.node_gid(node));
  if (it == dofs.end()) throw std::out_of_range("node does not belong to this face");
  const int i = static_cast<int>(it - dofs.begin());
  const int n = static_cast<int>(dofs.size());
  const double vf = v[layout.frac_gid_of_face(face)];
  double flux = 0.0;
  for (int j = 0; j < n; ++j) flux += ft.a[fi][size_t(i) * n + j] * (vf - v[dofs[j]]);
  return flux;
}

}  // namespace dfn
