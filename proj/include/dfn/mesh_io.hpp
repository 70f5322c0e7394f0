#ifndef DFN_MESH_IO_HPP
#define DFN_MESH_IO_HPP

#include <string>
#include <vector>

#include "dfn/dof.hpp"
#include "dfn/mesh.hpp"

namespace dfn {

/// Reads the native line-oriented text format:
///
///   dfnmesh <d>
///   nodes <n>        one point per line (d coordinates)
///   cells <n>        count followed by node indices
///   faces <n>        count followed by node indices (cyclic order)
///   fracture_faces <n>   face index and fracture id
///   boundary_nodes <n>   node index
///
/// Cell-face incidence is recovered from node containment. Malformed input
/// raises std::runtime_error naming the file and line.
Mesh read_mesh(const std::string& path);

void write_mesh(const std::string& path, const Mesh& mesh);

/// A named scalar field; the meaning of the index depends on the writer.
struct VtkField {
  std::string name;
  std::vector<double> values;
};

/// Legacy ASCII VTK unstructured grid of the matrix cells. 2D cells are
/// polygons (the face-edge loop is walked to get a cycle), 3D cells use the
/// polyhedron face-stream type. cell_fields index by cell, node_fields by node.
void write_vtk(const std::string& path, const Mesh& mesh,
               const std::vector<VtkField>& cell_fields = {},
               const std::vector<VtkField>& node_fields = {});

/// Legacy ASCII VTK of the fracture network only (lines in 2D, polygons in
/// 3D). face_fields index into mesh.fracture_faces order; the fracture id is
/// always emitted as a cell field.
void write_fracture_vtk(const std::string& path, const Mesh& mesh,
                        const std::vector<VtkField>& face_fields = {});

/// One dof per row: kind,id,x,y,z,value. Kinds are cell, node, fracture_face.
void write_snapshot_csv(const std::string& path, const Mesh& mesh, const DofLayout& layout,
                        const DofVector& v);

}  // namespace dfn

#endif
