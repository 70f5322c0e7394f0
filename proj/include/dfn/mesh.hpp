#ifndef DFN_MESH_HPP
#define DFN_MESH_HPP

#include <map>
#include <vector>

#include "dfn/geometry.hpp"

namespace dfn {

/// Generalized polyhedral mesh conforming to a planar fracture network.
///
/// Faces are node cycles; in 2D a face is an edge (two nodes). Faces need not
/// be planar in 3D: geometrically each face is the fan of triangles joining its
/// centre to its edges. Face centres use uniform barycentric weights
/// beta = 1/|nodes of face|.
struct Mesh {
  int dim = 3;  // 2 or 3

  std::vector<Vec3> nodes;
  std::vector<std::vector<int>> cell_nodes;  // unique node ids per cell
  std::vector<std::vector<int>> cell_faces;
  std::vector<std::vector<int>> face_nodes;        // cyclic order (2 nodes in 2D)
  std::vector<std::array<int, 2>> face_cells;      // second entry -1 on the boundary
  std::vector<int> fracture_id_of_face;            // -1 if not a fracture face
  std::vector<int> fracture_faces;                 // sorted face ids
  std::vector<char> node_on_boundary;
  std::vector<int> boundary_nodes;                 // sorted node ids

  // Derived geometry, filled by finalize().
  std::vector<Vec3> cell_center;  // isobarycentre of the cell nodes
  std::vector<Vec3> face_center;  // sum of beta_{sigma,s} x_s (uniform beta)

  int n_cells() const { return static_cast<int>(cell_nodes.size()); }
  int n_faces() const { return static_cast<int>(face_nodes.size()); }
  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_fracture_faces() const { return static_cast<int>(fracture_faces.size()); }

  bool is_fracture_face(int f) const { return fracture_id_of_face[f] >= 0; }

  /// Number of distinct fracture ids (max id + 1).
  int n_fractures() const;

  /// Computes centres, face_cells, boundary tagging and runs consistency
  /// checks. Must be called once the connectivity arrays are filled.
  void finalize();
};

/// Area of a face (length of an edge in 2D; fan-triangle area around the face
/// centre in 3D).
double face_area(const Mesh& mesh, int f);

/// Volume of a cell via the fan/tetrahedral decomposition around its centre.
double cell_volume(const Mesh& mesh, int k);

/// Incidence maps derived from a Mesh.
struct Adjacency {
  std::vector<std::vector<int>> cells_of_node;          // M_s
  std::vector<std::vector<int>> fracture_faces_of_node; // F_{Gamma,s}
  std::vector<std::vector<int>> fracture_faces_of_cell; // F_{Gamma,K}
  std::vector<char> node_on_fracture;                   // s in V_Gamma
  std::vector<int> fracture_nodes;

  explicit Adjacency(const Mesh& mesh);
};

/// Per-fracture physical data: width, tangential permeability, porosity.
struct FractureProperties {
  std::vector<double> width;      // d_f > 0 (m)
  std::vector<Tensor> permeability;  // tangential, applied in the fracture frame
  std::vector<double> porosity;   // in (0, 1]

  static FractureProperties uniform(int n_fractures, double d_f, double lambda_f,
                                    double phi_f = 1.0);
  void validate() const;
};

/// Per-cell matrix (rock) data.
struct MatrixProperties {
  std::vector<Tensor> permeability;
  std::vector<double> porosity;

  static MatrixProperties uniform(int n_cells, double lambda_m, double phi_m = 1.0);
  void validate() const;
};

// --- generated test meshes ---------------------------------------------------

/// Topologically Cartesian n_x * n_x quad mesh of (0,1)^2 where the node row
/// j = n_x/4 lies exactly on the line y = 1/4 + x tan(theta); the n_x edges of
/// that row are the fracture (id 0).
Mesh build_single_fracture_mesh_2d(int n_x, double tan_theta);

/// Deformed Cartesian mesh with the row j = n_x/4 on y = 1/4 + x tan(theta1)
/// and the column i = 3 n_x/4 on x = 3/4 - y tan(theta2). The two lines carry
/// fracture ids 0..3, split at their intersection.
Mesh build_four_fracture_mesh_2d(int n_x, double tan_theta1, double tan_theta2);

/// Axis-aligned fracture plane {x_axis = c}, c a multiple of 1/n_x in (0,1).
struct AxisPlane {
  int axis = 0;   // 0,1,2
  double coord = 0.5;
};

/// Topologically Cartesian n_x^3 hex mesh of (0,1)^3 with fracture faces on
/// the given planes. Along each axis crossed by a plane the node spacing grows
/// geometrically with ratio `stretch` away from the plane.
Mesh build_hex_mesh_3d(int n_x, const std::vector<AxisPlane>& planes, double stretch = 1.0);

}  // namespace dfn

#endif
