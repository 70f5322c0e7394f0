#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dfn/mesh_io.hpp"

using namespace dfn;

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_identical(const Mesh& a, const Mesh& b) {
  REQUIRE(a.dim == b.dim);
  REQUIRE(a.n_nodes() == b.n_nodes());
  REQUIRE(a.n_cells() == b.n_cells());
  REQUIRE(a.n_faces() == b.n_faces());
  for (int s = 0; s < a.n_nodes(); ++s)
    for (int c = 0; c < 3; ++c) CHECK(a.nodes[s][c] == b.nodes[s][c]);
  CHECK(a.cell_nodes == b.cell_nodes);
  CHECK(a.face_nodes == b.face_nodes);
  CHECK(a.fracture_id_of_face == b.fracture_id_of_face);
  CHECK(a.fracture_faces == b.fracture_faces);
  CHECK(a.boundary_nodes == b.boundary_nodes);
  // cell_faces is reconstructed; compare as sets per cell
  for (int k = 0; k < a.n_cells(); ++k) {
    auto fa = a.cell_faces[k], fb = b.cell_faces[k];
    std::sort(fa.begin(), fa.end());
    std::sort(fb.begin(), fb.end());
    CHECK(fa == fb);
  }
  for (int f = 0; f < a.n_faces(); ++f) {
    auto ca = a.face_cells[f], cb = b.face_cells[f];
    if (ca[0] > ca[1]) std::swap(ca[0], ca[1]);
    if (cb[0] > cb[1]) std::swap(cb[0], cb[1]);
    CHECK(ca == cb);
  }
}

}  // namespace

TEST_SUITE("mesh_io") {

TEST_CASE("generated meshes survive a write-read round trip") {
  const Mesh m2 = build_single_fracture_mesh_2d(8, 0.5);
  write_mesh("io_single.txt", m2);
  check_identical(m2, read_mesh("io_single.txt"));

  const Mesh m4 = build_four_fracture_mesh_2d(8, 0.625, 0.25);
  write_mesh("io_four.txt", m4);
  check_identical(m4, read_mesh("io_four.txt"));

  const Mesh m3 = build_hex_mesh_3d(4, {{0, 0.5}}, 2.0);
  write_mesh("io_hex.txt", m3);
  check_identical(m3, read_mesh("io_hex.txt"));
}

TEST_CASE("two-cell handcrafted file: shared face bounds both cells") {
  write_file("io_two.txt",
             "dfnmesh 2\n"
             "nodes 6\n"
             "0 0\n1 0\n2 0\n0 1\n1 1\n2 1\n"
             "cells 2\n"
             "4 0 1 4 3\n"
             "4 1 2 5 4\n"
             "faces 7\n"
             "2 0 1\n2 1 2\n2 3 4\n2 4 5\n2 0 3\n2 1 4\n2 2 5\n"
             "fracture_faces 1\n"
             "5 0\n"
             "boundary_nodes 6\n"
             "0\n1\n2\n3\n4\n5\n");
  const Mesh m = read_mesh("io_two.txt");
  CHECK(m.n_cells() == 2);
  CHECK(m.face_cells[5][0] == 0);
  CHECK(m.face_cells[5][1] == 1);
  CHECK(m.face_cells[0][1] == -1);
  CHECK(m.fracture_faces == std::vector<int>{5});
  CHECK(m.n_fractures() == 1);
}

TEST_CASE("malformed files raise with the offending location") {
  write_file("io_bad1.txt", "trimesh 2\n");
  CHECK_THROWS_WITH_AS(read_mesh("io_bad1.txt"),
                       doctest::Contains("io_bad1.txt:1"), std::runtime_error);

  // face references a missing node
  write_file("io_bad2.txt",
             "dfnmesh 2\nnodes 3\n0 0\n1 0\n0 1\ncells 1\n3 0 1 2\n"
             "faces 3\n2 0 1\n2 1 9\n2 2 0\nfracture_faces 0\nboundary_nodes 3\n0\n1\n2\n");
  CHECK_THROWS_WITH_AS(read_mesh("io_bad2.txt"),
                       doctest::Contains("missing node"), std::runtime_error);

  // truncated node block
  write_file("io_bad3.txt", "dfnmesh 2\nnodes 3\n0 0\n1 0\n");
  CHECK_THROWS_AS(read_mesh("io_bad3.txt"), std::runtime_error);

  // boundary list disagreeing with face incidence
  write_file("io_bad4.txt",
             "dfnmesh 2\nnodes 3\n0 0\n1 0\n0 1\ncells 1\n3 0 1 2\n"
             "faces 3\n2 0 1\n2 1 2\n2 2 0\nfracture_faces 0\nboundary_nodes 1\n0\n");
  CHECK_THROWS_WITH_AS(read_mesh("io_bad4.txt"),
                       doctest::Contains("boundary_nodes"), std::runtime_error);

  CHECK_THROWS_AS(read_mesh("io_no_such_file.txt"), std::runtime_error);
}

TEST_CASE("vtk writers emit well-formed headers and counts") {
  const Mesh m = build_single_fracture_mesh_2d(4, 0.5);
  VtkField fk{"pressure", std::vector<double>(m.n_cells(), 1.0)};
  VtkField fs{"conc", std::vector<double>(m.n_nodes(), 0.5)};
  write_vtk("io_grid.vtk", m, {fk}, {fs});
  const std::string g = slurp("io_grid.vtk");
  CHECK(g.find("# vtk DataFile Version 2.0") == 0);
  CHECK(g.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
  CHECK(g.find("POINTS 25 double") != std::string::npos);
  CHECK(g.find("CELLS 16") != std::string::npos);
  CHECK(g.find("SCALARS pressure double 1") != std::string::npos);
  CHECK(g.find("POINT_DATA 25") != std::string::npos);

  write_fracture_vtk("io_frac.vtk", m);
  const std::string f = slurp("io_frac.vtk");
  CHECK(f.find("CELLS 4") != std::string::npos);
  CHECK(f.find("SCALARS fracture_id double 1") != std::string::npos);

  // 3D polyhedron stream: a hex cell entry is 1 + 6 * (1 + 4) = 31 ints
  const Mesh h = build_hex_mesh_3d(2, {}, 1.0);
  write_vtk("io_hex.vtk", h);
  const std::string v = slurp("io_hex.vtk");
  CHECK(v.find("CELLS 8 " + std::to_string(8 * 32)) != std::string::npos);

  VtkField wrong{"bad", std::vector<double>(3, 0.0)};
  CHECK_THROWS_AS(write_vtk("io_wrong.vtk", m, {wrong}), std::invalid_argument);
}

TEST_CASE("snapshot csv lists every dof with its coordinates") {
  const Mesh m = build_single_fracture_mesh_2d(4, 0.5);
  const DofLayout layout(m);
  DofVector v(layout.size());
  for (int i = 0; i < layout.size(); ++i) v[i] = i;
  write_snapshot_csv("io_snap.csv", m, layout, v);

  std::ifstream in("io_snap.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "kind,id,x,y,z,value");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == layout.size());

  CHECK_THROWS_AS(write_snapshot_csv("io_snap.csv", m, layout, DofVector(3)),
                  std::invalid_argument);
}

}
