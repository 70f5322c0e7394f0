#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "dfn/parallel.hpp"
#include "dfn/submesh.hpp"

using namespace dfn;

namespace {

/// Darcy pipeline with u = 1 - x on the boundary.
struct Rig {
  Mesh mesh;
  Submesh sub;
  DofLayout layout;
  Adjacency adj;
  MatrixProperties mp;
  FractureProperties fp;
  CellTransmissibilities ct;
  FaceTransmissibilities ft;
  BoundaryConditions bc;

  explicit Rig(Mesh m)
      : mesh(std::move(m)), sub(build_submesh(mesh)), layout(mesh), adj(mesh),
        mp(MatrixProperties::uniform(mesh.n_cells(), 1.0)),
        fp(FractureProperties::uniform(mesh.n_fractures(), 0.01, 20.0)),
        ct(assemble_cell_transmissibilities(mesh, sub, mp, 1.0, layout)),
        ft(assemble_face_transmissibilities(mesh, fp, 1.0, layout)) {
    bc.dirichlet_nodes = mesh.boundary_nodes;
    for (int s : bc.dirichlet_nodes) bc.dirichlet_values.push_back(1.0 - mesh.nodes[s][0]);
  }

  DarcyProblem problem() const { return {mesh, adj, layout, ct, ft, bc}; }
};

}  // namespace

TEST_SUITE("parallel") {

TEST_CASE("a single part owns everything and has no ghosts") {
  Rig rig(build_single_fracture_mesh_2d(4, 0.5));
  const Partition part = partition_cells(rig.mesh, rig.adj, 1);
  CHECK(part.n_parts == 1);
  for (int p : part.part_of_cell) CHECK(p == 0);
  for (int p : part.owner_of_node) CHECK(p == 0);
  for (int p : part.owner_of_frac) CHECK(p == 0);

  const OverlapPartition ov = build_overlap(rig.mesh, rig.adj, part);
  CHECK(int(ov.parts[0].cells.size()) == rig.mesh.n_cells());
  CHECK(int(ov.parts[0].nodes.size()) == rig.mesh.n_nodes());
  CHECK(int(ov.parts[0].frac_faces.size()) == rig.mesh.n_fracture_faces());

  const ExchangePlan plan = build_exchange(rig.mesh, rig.layout, part, ov);
  CHECK(plan.ghosts[0].empty());
  CHECK(int(plan.own_rows[0].size()) == rig.layout.n_vf());
}

TEST_CASE("partition bounds are enforced") {
  Rig rig(build_single_fracture_mesh_2d(4, 0.5));
  CHECK_THROWS_AS(partition_cells(rig.mesh, rig.adj, 0), std::invalid_argument);
  CHECK_THROWS_AS(partition_cells(rig.mesh, rig.adj, 17), std::invalid_argument);
}

TEST_CASE("bisection of a uniform 4x4x4 box gives eight octant blocks") {
  const Mesh mesh = build_hex_mesh_3d(4, {}, 1.0);
  const Adjacency adj(mesh);
  const Partition part = partition_cells(mesh, adj, 8);

  for (int p = 0; p < 8; ++p) {
    CHECK(part.cells_of_part[p].size() == 8);
    CHECK(std::is_sorted(part.cells_of_part[p].begin(), part.cells_of_part[p].end()));
    // each part covers one octant of the unit cube
    for (int a = 0; a < 3; ++a) {
      double lo = 2.0, hi = -1.0;
      for (int k : part.cells_of_part[p]) {
        lo = std::min(lo, mesh.cell_center[k][a]);
        hi = std::max(hi, mesh.cell_center[k][a]);
      }
      CHECK(hi - lo == doctest::Approx(0.25));
    }
  }
}

TEST_CASE("owners follow the smallest incident cell") {
  Rig rig(build_single_fracture_mesh_2d(8, 0.5));
  const Partition part = partition_cells(rig.mesh, rig.adj, 4);
  for (int s = 0; s < rig.mesh.n_nodes(); ++s)
    CHECK(part.owner_of_node[s] == part.part_of_cell[rig.adj.cells_of_node[s].front()]);
  for (int fi = 0; fi < rig.mesh.n_fracture_faces(); ++fi) {
    const auto& ks = rig.mesh.face_cells[rig.mesh.fracture_faces[fi]];
    const int k = ks[1] >= 0 ? std::min(ks[0], ks[1]) : ks[0];
    CHECK(part.owner_of_frac[fi] == part.part_of_cell[k]);
  }
}

TEST_CASE("overlap covers every dof its own rows can touch") {
  Rig rig(build_single_fracture_mesh_2d(8, 0.5));
  for (int np : {2, 3, 4}) {
    const Partition part = partition_cells(rig.mesh, rig.adj, np);
    const OverlapPartition ov = build_overlap(rig.mesh, rig.adj, part);

    // own cells partition the mesh
    std::vector<int> count(rig.mesh.n_cells(), 0);
    for (int p = 0; p < np; ++p) {
      const PartOverlap& o = ov.parts[p];
      CHECK(std::is_sorted(o.cells.begin(), o.cells.end()));
      CHECK(std::is_sorted(o.nodes.begin(), o.nodes.end()));
      CHECK(std::is_sorted(o.frac_faces.begin(), o.frac_faces.end()));
      std::set<int> cells(o.cells.begin(), o.cells.end());
      std::set<int> nodes(o.nodes.begin(), o.nodes.end());
      std::set<int> faces(o.frac_faces.begin(), o.frac_faces.end());
      for (size_t i = 0; i < o.cells.size(); ++i)
        if (o.cell_is_own[i]) ++count[o.cells[i]];
      // one layer: every cell sharing a node with an own cell is present
      for (int k : part.cells_of_part[p])
        for (int s : rig.mesh.cell_nodes[k])
          for (int k2 : rig.adj.cells_of_node[s]) CHECK(cells.count(k2) == 1);
      // closure: nodes and fracture faces of the overlap cells
      for (int k : o.cells) {
        for (int s : rig.mesh.cell_nodes[k]) CHECK(nodes.count(s) == 1);
        for (int f : rig.adj.fracture_faces_of_cell[k]) CHECK(faces.count(f) == 1);
      }
    }
    for (int c : count) CHECK(c == 1);
  }
}

TEST_CASE("exchange reproduces a dense gather") {
  Rig rig(build_single_fracture_mesh_2d(8, 0.5));
  const Partition part = partition_cells(rig.mesh, rig.adj, 4);
  const OverlapPartition ov = build_overlap(rig.mesh, rig.adj, part);
  const ExchangePlan plan = build_exchange(rig.mesh, rig.layout, part, ov);

  std::mt19937 gen(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> global(rig.layout.n_vf());
  for (double& v : global) v = dist(gen);

  std::vector<std::vector<double>> own(part.n_parts);
  for (int p = 0; p < part.n_parts; ++p)
    for (int vf : plan.own_rows[p]) own[p].push_back(global[vf]);

  const auto out = apply_exchange(plan, own);
  for (int p = 0; p < part.n_parts; ++p) {
    REQUIRE(out[p].size() == plan.vf_gids[p].size());
    for (size_t l = 0; l < out[p].size(); ++l) CHECK(out[p][l] == global[plan.vf_gids[p][l]]);
  }

  // applying the plan twice changes nothing
  std::vector<std::vector<double>> own2(part.n_parts);
  for (int p = 0; p < part.n_parts; ++p)
    for (size_t i = 0; i < plan.own_rows[p].size(); ++i)
      own2[p].push_back(out[p][plan.own_pos[p][i]]);
  CHECK(apply_exchange(plan, own2) == out);
}

TEST_CASE("distributed darcy solve is bitwise sequential") {
  for (Mesh m : {build_single_fracture_mesh_2d(12, 0.5), build_hex_mesh_3d(4, {{2, 0.5}}, 1.0)}) {
    Rig rig(std::move(m));
    SolverConfig cfg;
    cfg.tolerance = 1e-12;
    const DarcySolution seq = solve_darcy(rig.problem(), cfg);
    for (int np : {1, 2, 4}) {
      const Partition part = partition_cells(rig.mesh, rig.adj, np);
      const ParallelDarcyResult par = parallel_darcy_solve(rig.problem(), part, cfg);
      CHECK(par.stats.iterations == seq.stats.iterations);
      for (int i = 0; i < rig.layout.size(); ++i) CHECK(par.pressure[i] == seq.pressure[i]);
    }
  }
}

TEST_CASE("gmres and bicgstab stay bitwise with pointwise preconditioning") {
  Rig rig(build_single_fracture_mesh_2d(12, 0.5));
  const Partition part = partition_cells(rig.mesh, rig.adj, 4);
  for (auto method : {SolverConfig::Method::GMRES, SolverConfig::Method::BiCGStab}) {
    SolverConfig cfg;
    cfg.method = method;
    cfg.tolerance = 1e-12;
    const DarcySolution seq = solve_darcy(rig.problem(), cfg);
    const ParallelDarcyResult par = parallel_darcy_solve(rig.problem(), part, cfg);
    for (int i = 0; i < rig.layout.size(); ++i) CHECK(par.pressure[i] == seq.pressure[i]);
  }
}

TEST_CASE("block ilu0 changes the iterates but not the solution") {
  Rig rig(build_single_fracture_mesh_2d(12, 0.5));
  SolverConfig cfg;
  cfg.method = SolverConfig::Method::GMRES;
  cfg.precond = SolverConfig::Precond::ILU0;
  cfg.tolerance = 1e-12;
  const DarcySolution seq = solve_darcy(rig.problem(), cfg);
  const Partition part = partition_cells(rig.mesh, rig.adj, 4);
  const ParallelDarcyResult par = parallel_darcy_solve(rig.problem(), part, cfg, false);
  double scale = 0.0;
  for (double v : seq.pressure) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < rig.layout.size(); ++i)
    CHECK(par.pressure[i] == doctest::Approx(seq.pressure[i]).epsilon(1e-10).scale(scale));
}

TEST_CASE("distributed transport matches the sequential march bitwise") {
  Rig rig(build_single_fracture_mesh_2d(8, 0.5));
  SolverConfig cfg;
  cfg.tolerance = 1e-12;
  const DarcySolution sol = solve_darcy(rig.problem(), cfg);

  const VolumeFractions vfr =
      compute_volume_fractions(rig.mesh, rig.adj, rig.mp, rig.fp, 0.1, 0.1);
  const ControlVolumes cv = compute_porous_volumes(rig.mesh, rig.adj, vfr, rig.mp, rig.fp);
  const FluxField fx = compute_fluxes(rig.mesh, rig.adj, rig.layout, rig.ct, rig.ft, sol.pressure);

  const auto cbar = [&](int s, double) { return rig.mesh.nodes[s][0] < 1e-12 ? 1.0 : 0.0; };
  const DofVector c0 = initial_state(rig.mesh, rig.layout, cbar);
  TransportOptions opt;
  opt.t_end = 40.0 * cfl_timestep(rig.mesh, rig.layout, fx, cv);
  opt.series_stride = 5;

  const TransportResult seq =
      run_transport(rig.mesh, rig.adj, rig.layout, fx, cv, cbar, c0, opt);
  for (int np : {1, 2, 4}) {
    const Partition part = partition_cells(rig.mesh, rig.adj, np);
    std::vector<PartTimings> tm;
    const TransportResult par = parallel_transport_run(rig.mesh, rig.adj, rig.layout, fx, cv,
                                                       cbar, c0, opt, part, &tm);
    CHECK(par.steps == seq.steps);
    CHECK(par.dt == seq.dt);
    CHECK(par.t == seq.t);
    for (size_t i = 0; i < seq.c.size(); ++i) CHECK(par.c[i] == seq.c[i]);
    REQUIRE(par.series.size() == seq.series.size());
    for (size_t i = 0; i < seq.series.size(); ++i) {
      CHECK(par.series[i].t == seq.series[i].t);
      CHECK(par.series[i].matrix == seq.series[i].matrix);
      CHECK(par.series[i].fracture == seq.series[i].fracture);
    }
    CHECK(int(tm.size()) == np);
  }
}

TEST_CASE("timings csv lists one row per part") {
  std::vector<PartTimings> tm(3);
  tm[1].solve = 0.5;
  write_timings_csv("timings_test.csv", tm);
  std::ifstream in("timings_test.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "part,assemble,solve,exchange,update");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}

}
