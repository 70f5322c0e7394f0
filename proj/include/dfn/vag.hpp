#ifndef DFN_VAG_HPP
#define DFN_VAG_HPP

#include <vector>

#include "dfn/dof.hpp"
#include "dfn/mesh.hpp"
#include "dfn/submesh.hpp"

namespace dfn {

/// Per-cell local transmissibility matrices a_{K,nu}^{nu'} over the cell's
/// nodes and fracture faces. Symmetric positive semidefinite by construction.
struct CellTransmissibilities {
  // per cell: global dof ids (cell nodes first, then fracture faces)
  std::vector<std::vector<int>> dofs;
  // per cell: dense row-major n x n matrix
  std::vector<std::vector<double>> a;

  double entry(int cell, int i, int j) const { return a[cell][i * dofs[cell].size() + j]; }
};

/// Per-fracture-face local transmissibility matrices a_{sigma,s}^{s'} over the
/// face's nodes.
struct FaceTransmissibilities {
  std::vector<std::vector<int>> dofs;  // per fracture-face index: node gids
  std::vector<std::vector<double>> a;
};

/// a_{K,nu}^{nu'} = int_K (Lambda_m / mu) grad eta_nu . grad eta_nu' dx,
/// exact per-simplex sums (all integrands are piecewise constant).
CellTransmissibilities assemble_cell_transmissibilities(const Mesh& mesh, const Submesh& sub,
                                                        const MatrixProperties& props, double mu,
                                                        const DofLayout& layout);

/// a_{sigma,s}^{s'} = int_sigma d_f (Lambda_f / mu) grad_tau eta_s . grad_tau eta_s',
/// over the triangle fan (3D) or the two midpoint sub-segments (2D). A tensor
/// Lambda_f is interpreted in the per-fracture tangential frame.
FaceTransmissibilities assemble_face_transmissibilities(const Mesh& mesh,
                                                        const FractureProperties& props, double mu,
                                                        const DofLayout& layout);

/// F_{K,nu}(v) = sum_{nu'} a_{K,nu}^{nu'} (v_K - v_{nu'}); nu is a global dof id.
double matrix_flux(int cell, int nu_gid, const DofVector& v, const CellTransmissibilities& ct,
                   const DofLayout& layout);

/// F_{sigma,s}(v) = sum_{s'} a_{sigma,s}^{s'} (v_sigma - v_{s'}); face is a mesh
/// face id, s a node id.
double fracture_flux(int face, int node, const DofVector& v, const FaceTransmissibilities& ft,
                     const DofLayout& layout, const Mesh& mesh);

/// Orthonormal tangential frame of a fracture plane, fixed per fracture id.
struct FractureFrame {
  Vec3 t1, t2;
};
FractureFrame fracture_frame(const Mesh& mesh, int fracture_id);

}  // namespace dfn

#endif
