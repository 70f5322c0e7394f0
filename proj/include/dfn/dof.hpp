#ifndef DFN_DOF_HPP
#define DFN_DOF_HPP

#include <vector>

#include "dfn/mesh.hpp"

namespace dfn {

/// Global numbering of the unknown space X_D = cells u nodes u fracture faces.
/// Global ids: cells first, then nodes, then fracture faces (in the order of
/// Mesh::fracture_faces).
class DofLayout {
 public:
  explicit DofLayout(const Mesh& mesh)
      : n_cells_(mesh.n_cells()), n_nodes_(mesh.n_nodes()),
        n_frac_(mesh.n_fracture_faces()), frac_index_of_face_(mesh.n_faces(), -1) {
    for (int i = 0; i < n_frac_; ++i) frac_index_of_face_[mesh.fracture_faces[i]] = i;
  }

  int n_cells() const { return n_cells_; }
  int n_nodes() const { return n_nodes_; }
  int n_fracture_faces() const { return n_frac_; }
  int size() const { return n_cells_ + n_nodes_ + n_frac_; }

  int cell_gid(int k) const { return k; }
  int node_gid(int s) const { return n_cells_ + s; }
  int frac_gid_of_face(int f) const { return n_cells_ + n_nodes_ + frac_index_of_face_[f]; }
  int frac_index(int f) const { return frac_index_of_face_[f]; }

  bool is_cell(int gid) const { return gid < n_cells_; }
  bool is_node(int gid) const { return gid >= n_cells_ && gid < n_cells_ + n_nodes_; }
  int node_of_gid(int gid) const { return gid - n_cells_; }
  int frac_of_gid(int gid) const { return gid - n_cells_ - n_nodes_; }

  /// Index in the reduced node + fracture-face (Schur) ordering:
  /// nodes [0, n_nodes), fracture faces [n_nodes, n_nodes + n_frac).
  int vf_of_node(int s) const { return s; }
  int vf_of_face(int f) const { return n_nodes_ + frac_index_of_face_[f]; }
  int n_vf() const { return n_nodes_ + n_frac_; }

 private:
  int n_cells_, n_nodes_, n_frac_;
  std::vector<int> frac_index_of_face_;
};

/// One value per dof of X_D.
using DofVector = std::vector<double>;

}  // namespace dfn

#endif
