#ifndef DFN_SUBMESH_HPP
#define DFN_SUBMESH_HPP

#include <vector>

#include "dfn/mesh.hpp"

namespace dfn {

enum class DofKind { Cell, Node, FractureFace };

/// One degree of freedom seen from a simplex, with the (constant) gradient of
/// its nodal basis function restricted to that simplex.
struct SimplexDof {
  DofKind kind;
  int id;  // cell id, node id, or face id
  Vec3 grad;
};

/// Simplex of the submesh: tetrahedron x_K - x_sigma - edge in 3D, triangle in
/// 2D. Non-fracture face-centre values are already eliminated through the
/// barycentric interpolation, so only cell, node and fracture-face dofs appear.
struct Simplex {
  int cell;
  int face;
  double measure;
  std::vector<SimplexDof> dofs;
};

struct Submesh {
  std::vector<Simplex> simplices;                  // grouped by parent cell
  std::vector<std::array<int, 2>> cell_range;      // [begin, end) per cell
  std::vector<double> cell_volume;                 // sum of simplex measures
};

Submesh build_submesh(const Mesh& mesh);

}  // namespace dfn

#endif
