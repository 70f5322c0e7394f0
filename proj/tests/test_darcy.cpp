#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "dfn/darcy.hpp"
#include "dfn/submesh.hpp"

using namespace dfn;

namespace {

struct Setup {
  Mesh mesh;
  Submesh sub;
  DofLayout layout;
  Adjacency adj;
  MatrixProperties mp;
  FractureProperties fp;
  CellTransmissibilities ct;
  FaceTransmissibilities ft;

  Setup(Mesh m, double lambda_f, double d_f)
      : mesh(std::move(m)), sub(build_submesh(mesh)), layout(mesh), adj(mesh),
        mp(MatrixProperties::uniform(mesh.n_cells(), 1.0)),
        fp(FractureProperties::uniform(mesh.n_fractures(), d_f, lambda_f)),
        ct(assemble_cell_transmissibilities(mesh, sub, mp, 1.0, layout)),
        ft(assemble_face_transmissibilities(mesh, fp, 1.0, layout)) {}
};

// dense energy-form assembly over the full dof space, independent of the
// row-based assembly under test
Eigen::MatrixXd dense_system(const Setup& st) {
  const int n = st.layout.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < st.mesh.n_cells(); ++k) {
    const auto& dofs = st.ct.dofs[k];
    const int m = int(dofs.size());
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double a = st.ct.a[k][i * m + j];
        A(k, k) += a;
        A(k, dofs[j]) -= a;
        A(dofs[i], k) -= a;
        A(dofs[i], dofs[j]) += a;
      }
  }
  for (int f : st.mesh.fracture_faces) {
    const int fi = st.layout.frac_index(f);
    const int fg = st.layout.frac_gid_of_face(f);
    const auto& dofs = st.ft.dofs[fi];
    const int m = int(dofs.size());
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double a = st.ft.a[fi][i * m + j];
        A(fg, fg) += a;
        A(fg, dofs[j]) -= a;
        A(dofs[i], fg) -= a;
        A(dofs[i], dofs[j]) += a;
      }
  }
  return A;
}

BoundaryConditions affine_bc(const Mesh& mesh) {
  BoundaryConditions bc;
  for (int s : mesh.boundary_nodes) {
    bc.dirichlet_nodes.push_back(s);
    bc.dirichlet_values.push_back(1.0 - mesh.nodes[s][0]);
  }
  return bc;
}

}  // namespace

TEST_SUITE("darcy") {

TEST_CASE("assembled system matches the dense energy form") {
  Setup st(build_single_fracture_mesh_2d(4, 0.5), 20.0, 0.01);
  const BoundaryConditions bc = affine_bc(st.mesh);
  const DarcyProblem pb{st.mesh, st.adj, st.layout, st.ct, st.ft, bc};
  const BlockSystem block = assemble_darcy(pb);

  Eigen::MatrixXd A = dense_system(st);
  const int nc = st.mesh.n_cells();
  // dense reference solve with symmetric Dirichlet elimination
  Eigen::VectorXd b = Eigen::VectorXd::Zero(st.layout.size());
  for (size_t i = 0; i < bc.dirichlet_nodes.size(); ++i) {
    const int g = st.layout.node_gid(bc.dirichlet_nodes[i]);
    const double val = bc.dirichlet_values[i];
    b -= val * A.col(g);
    A.row(g).setZero();
    A.col(g).setZero();
    A(g, g) = 1.0;
    b(g) = val;
  }
  const Eigen::VectorXd x = A.lu().solve(b);

  // the rectangular block rows reproduce the dense rows
  for (size_t r = 0; r < block.vf_gid_of_row.size(); ++r) {
    const int g = nc + block.vf_gid_of_row[r];
    Eigen::VectorXd row = Eigen::VectorXd::Zero(st.layout.size());
    for (const auto& [c, v] : block.vf_acc.row(int(r))) row(nc + c) = v;
    if (!block.row_is_dirichlet[r]) {
      for (size_t kl = 0; kl < block.cells.size(); ++kl)
        for (const auto& [c, v] : block.cell_cols[kl])
          if (c == block.vf_gid_of_row[r]) row(block.cells[kl]) = v;
    }
    for (int c = 0; c < st.layout.size(); ++c)
      CHECK(row(c) == doctest::Approx(A(g, c)).epsilon(1e-12));
    CHECK(block.b_vf[r] == doctest::Approx(b(g)).epsilon(1e-12));
  }

  // full pipeline agrees with the dense solve
  SolverConfig cfg;
  cfg.tolerance = 1e-12;
  const DarcySolution sol = solve_darcy(pb, cfg);
  for (int i = 0; i < st.layout.size(); ++i)
    CHECK(sol.pressure[i] == doctest::Approx(x(i)).epsilon(1e-8));
}

TEST_CASE("affine pressure is reproduced exactly") {
  for (int variant = 0; variant < 2; ++variant) {
    Setup st(variant == 0 ? build_single_fracture_mesh_2d(8, 0.5)
                          : build_four_fracture_mesh_2d(8, 5.0 / 8.0, 0.25),
             variant == 0 ? 20.0 : 200.0, 0.01);
    const BoundaryConditions bc = affine_bc(st.mesh);
    const DarcyProblem pb{st.mesh, st.adj, st.layout, st.ct, st.ft, bc};
    SolverConfig cfg;
    cfg.tolerance = 1e-12;
    const DarcySolution sol = solve_darcy(pb, cfg);

    for (int k = 0; k < st.mesh.n_cells(); ++k)
      CHECK(sol.pressure[k] == doctest::Approx(1.0 - st.mesh.cell_center[k][0]).epsilon(1e-9));
    for (int s = 0; s < st.mesh.n_nodes(); ++s)
      CHECK(sol.pressure[st.layout.node_gid(s)] ==
            doctest::Approx(1.0 - st.mesh.nodes[s][0]).epsilon(1e-9));
    for (int f : st.mesh.fracture_faces)
      CHECK(sol.pressure[st.layout.frac_gid_of_face(f)] ==
            doctest::Approx(1.0 - st.mesh.face_center[f][0]).epsilon(1e-9));
  }
}

TEST_CASE("schur matrix is symmetric with positive cell diagonal") {
  Setup st(build_single_fracture_mesh_2d(8, 0.5), 20.0, 0.01);
  const BoundaryConditions bc = affine_bc(st.mesh);
  const DarcyProblem pb{st.mesh, st.adj, st.layout, st.ct, st.ft, bc};
  const BlockSystem block = assemble_darcy(pb);
  for (double d : block.cell_diag) CHECK(d > 0.0);
  const SchurSystem schur = schur_eliminate(block);

  CsrMatrix a = schur.a;
  for (int r = 0; r < a.rows; ++r)
    for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
      const int c = a.col[p];
      if (schur.row_is_dirichlet[r] || schur.row_is_dirichlet[c]) continue;
      const double* sym = a.find(c, r);
      REQUIRE(sym != nullptr);
      CHECK(*sym == doctest::Approx(a.val[p]).epsilon(1e-12));
    }
}

TEST_CASE("missing dirichlet data is rejected as singular") {
  Setup st(build_single_fracture_mesh_2d(4, 0.5), 20.0, 0.01);
  const BoundaryConditions bc;  // empty
  const DarcyProblem pb{st.mesh, st.adj, st.layout, st.ct, st.ft, bc};
  CHECK_THROWS_AS(assemble_darcy(pb), std::runtime_error);
  CHECK_NOTHROW(assemble_darcy(pb, true));
}

TEST_CASE("boundary condition validation") {
  const Mesh mesh = build_single_fracture_mesh_2d(4, 0.5);
  BoundaryConditions bc;
  bc.dirichlet_nodes = {mesh.n_nodes() / 2};  // an interior node
  bc.dirichlet_values = {1.0};
  CHECK_THROWS(bc.validate(mesh));
  bc.dirichlet_nodes = {mesh.boundary_nodes[1], mesh.boundary_nodes[0]};  // not ascending
  bc.dirichlet_values = {1.0, 2.0};
  CHECK_THROWS(bc.validate(mesh));
  bc.dirichlet_nodes = {mesh.boundary_nodes[0]};
  CHECK_THROWS(bc.validate(mesh));  // size mismatch
  bc.dirichlet_values = {1.0};
  CHECK_NOTHROW(bc.validate(mesh));
}

TEST_CASE("3d affine exactness across a fracture plane") {
  Setup st(build_hex_mesh_3d(4, {{0, 0.5}}, 1.5), 100.0, 0.01);
  const BoundaryConditions bc = affine_bc(st.mesh);
  const DarcyProblem pb{st.mesh, st.adj, st.layout, st.ct, st.ft, bc};
  SolverConfig cfg;
  cfg.tolerance = 1e-12;
  const DarcySolution sol = solve_darcy(pb, cfg);
  for (int s = 0; s < st.mesh.n_nodes(); ++s)
    CHECK(sol.pressure[st.layout.node_gid(s)] ==
          doctest::Approx(1.0 - st.mesh.nodes[s][0]).epsilon(1e-9));
  for (int k = 0; k < st.mesh.n_cells(); ++k)
    CHECK(sol.pressure[k] == doctest::Approx(1.0 - st.mesh.cell_center[k][0]).epsilon(1e-9));
}

}
