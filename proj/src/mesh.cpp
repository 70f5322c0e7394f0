#include "dfn/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dfn {

int Mesh::n_fractures() const {
  int n = 0;
  for (int f : fracture_faces) n = std::max(n, fracture_id_of_face[f] + 1);
  return n;
}

void Mesh::finalize() {
  if (dim != 2 && dim != 3) throw std::invalid_argument("mesh dimension must be 2 or 3");

  // face -> cells incidence
  face_cells.assign(face_nodes.size(), {-1, -1});
  for (int k = 0; k < n_cells(); ++k) {
    for (int f : cell_faces[k]) {
      if (f < 0 || f >= n_faces()) throw std::runtime_error("cell references missing face");
      auto& fc = face_cells[f];
      if (fc[0] == -1)
        fc[0] = k;
      else if (fc[1] == -1)
        fc[1] = k;
      else
        throw std::runtime_error("face shared by more than two cells");
    }
  }
  for (int f = 0; f < n_faces(); ++f) {
    if (face_cells[f][0] == -1) throw std::runtime_error("face not attached to any cell");
    for (int s : face_nodes[f])
      if (s < 0 || s >= n_nodes()) throw std::runtime_error("face references missing node");
  }

  // fracture face list
  fracture_faces.clear();
  for (int f = 0; f < n_faces(); ++f)
    if (fracture_id_of_face[f] >= 0) fracture_faces.push_back(f);

  // boundary nodes = nodes of faces with a single cell
  node_on_boundary.assign(n_nodes(), 0);
  for (int f = 0; f < n_faces(); ++f)
    if (face_cells[f][1] == -1)
      for (int s : face_nodes[f]) node_on_boundary[s] = 1;
  boundary_nodes.clear();
  for (int s = 0; s < n_nodes(); ++s)
    if (node_on_boundary[s]) boundary_nodes.push_back(s);

  // centres: isobarycentres (beta uniform)
  cell_center.assign(n_cells(), Vec3{0, 0, 0});
  for (int k = 0; k < n_cells(); ++k) {
    Vec3 c{0, 0, 0};
    for (int s : cell_nodes[k]) c += nodes[s];
    cell_center[k] = (1.0 / cell_nodes[k].size()) * c;
  }
  face_center.assign(n_faces(), Vec3{0, 0, 0});
  for (int f = 0; f < n_faces(); ++f) {
    Vec3 c{0, 0, 0};
    for (int s : face_nodes[f]) c += nodes[s];
    face_center[f] = (1.0 / face_nodes[f].size()) * c;
  }
}

double face_area(const Mesh& mesh, int f) {
  const auto& ns = mesh.face_nodes[f];
  if (mesh.dim == 2) return norm(mesh.nodes[ns[1]] - mesh.nodes[ns[0]]);
  double area = 0.0;
  const Vec3 xc = mesh.face_center[f];
  const int n = static_cast<int>(ns.size());
  for (int e = 0; e < n; ++e)
    area += triangle_area(xc, mesh.nodes[ns[e]], mesh.nodes[ns[(e + 1) % n]]);
  return area;
}

double cell_volume(const Mesh& mesh, int k) {
  const Vec3 xk = mesh.cell_center[k];
  double vol = 0.0;
  for (int f : mesh.cell_faces[k]) {
    const auto& ns = mesh.face_nodes[f];
    if (mesh.dim == 2) {
      vol += triangle_area(xk, mesh.nodes[ns[0]], mesh.nodes[ns[1]]);
    } else {
      const Vec3 xf = mesh.face_center[f];
      const int n = static_cast<int>(ns.size());
      for (int e = 0; e < n; ++e)
        vol += std::abs(tet_volume(xk, xf, mesh.nodes[ns[e]], mesh.nodes[ns[(e + 1) % n]]));
    }
  }
  return vol;
}

Adjacency::Adjacency(const Mesh& mesh) {
  cells_of_node.resize(mesh.n_nodes());
  fracture_faces_of_node.resize(mesh.n_nodes());
  fracture_faces_of_cell.resize(mesh.n_cells());
  node_on_fracture.assign(mesh.n_nodes(), 0);

  for (int k = 0; k < mesh.n_cells(); ++k)
    for (int s : mesh.cell_nodes[k]) cells_of_node[s].push_back(k);

  for (int f : mesh.fracture_faces) {
    for (int s : mesh.face_nodes[f]) {
      fracture_faces_of_node[s].push_back(f);
      node_on_fracture[s] = 1;
    }
    for (int k : mesh.face_cells[f])
      if (k >= 0) fracture_faces_of_cell[k].push_back(f);
  }
  for (int s = 0; s < mesh.n_nodes(); ++s)
    if (node_on_fracture[s]) fracture_nodes.push_back(s);
}

FractureProperties FractureProperties::uniform(int n_fractures, double d_f, double lambda_f,
                                               double phi_f) {
  FractureProperties p;
  p.width.assign(n_fractures, d_f);
  p.permeability.assign(n_fractures, Tensor::isotropic(lambda_f));
  p.porosity.assign(n_fractures, phi_f);
  return p;
}

void FractureProperties::validate() const {
  for (double d : width)
    if (!(d > 0.0)) throw std::invalid_argument("fracture width must be positive");
  for (const auto& t : permeability)
    if (!t.is_spd()) throw std::invalid_argument("fracture permeability must be SPD");
  for (double phi : porosity)
    if (!(phi > 0.0 && phi <= 1.0)) throw std::invalid_argument("fracture porosity must be in (0,1]");
}

MatrixProperties MatrixProperties::uniform(int n_cells, double lambda_m, double phi_m) {
  MatrixProperties p;
  p.permeability.assign(n_cells, Tensor::isotropic(lambda_m));
  p.porosity.assign(n_cells, phi_m);
  return p;
}

void MatrixProperties::validate() const {
  for (const auto& t : permeability)
    if (!t.is_spd()) throw std::invalid_argument("matrix permeability must be SPD");
  for (double phi : porosity)
    if (!(phi > 0.0 && phi <= 1.0)) throw std::invalid_argument("matrix porosity must be in (0,1]");
}

}  // namespace dfn
