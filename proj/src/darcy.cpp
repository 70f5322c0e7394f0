#include "dfn/darcy.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace dfn {

void BoundaryConditions::validate(const Mesh& mesh) const {
  if (dirichlet_nodes.size() != dirichlet_values.size())
    throw std::invalid_argument("Dirichlet node and value counts differ");
  for (size_t i = 0; i < dirichlet_nodes.size(); ++i) {
    const int s = dirichlet_nodes[i];
    if (s < 0 || s >= mesh.n_nodes() || !mesh.node_on_boundary[s])
      throw std::invalid_argument("Dirichlet node is not a boundary node");
    if (i > 0 && dirichlet_nodes[i - 1] >= s)
      throw std::invalid_argument("Dirichlet nodes must be ascending and unique");
  }
}

BlockSystem assemble_darcy_rows(const DarcyProblem& pb, const std::vector<int>& cells,
                                const std::vector<int>& frac_faces,
                                const std::vector<int>& vf_rows) {
  const auto& mesh = pb.mesh;
  const auto& layout = pb.layout;
  pb.bc.validate(mesh);

  // Dirichlet lookup over nodes
  std::vector<double> dval(mesh.n_nodes(), 0.0);
  std::vector<char> is_dir(mesh.n_nodes(), 0);
  for (size_t i = 0; i < pb.bc.dirichlet_nodes.size(); ++i) {
    is_dir[pb.bc.dirichlet_nodes[i]] = 1;
    dval[pb.bc.dirichlet_nodes[i]] = pb.bc.dirichlet_values[i];
  }
  auto vf_is_dirichlet = [&](int vf) { return vf < mesh.n_nodes() && is_dir[vf]; };

  const int n_rows = static_cast<int>(vf_rows.size());
  BlockSystem sys;
  sys.n_vf_global = layout.n_vf();
  sys.vf_gid_of_row = vf_rows;
  sys.vf_acc = RowAccumulator(n_rows, layout.n_vf());
  sys.b_vf.assign(n_rows, 0.0);
  sys.row_is_dirichlet.assign(n_rows, 0);

  std::vector<int> row_of_vf(layout.n_vf(), -1);
  for (int r = 0; r < n_rows; ++r) row_of_vf[vf_rows[r]] = r;

  // Dirichlet rows: identity with the datum on the rhs
  for (int r = 0; r < n_rows; ++r) {
    const int vf = vf_rows[r];
    if (vf_is_dirichlet(vf)) {
      sys.row_is_dirichlet[r] = 1;
      sys.vf_acc.add(r, vf, 1.0);
      sys.b_vf[r] = dval[vf];
    }
  }

  // cell contributions
  sys.cells = cells;
  const int n_loc_cells = static_cast<int>(cells.size());
  sys.cell_diag.assign(n_loc_cells, 0.0);
  sys.b_c.assign(n_loc_cells, 0.0);
  sys.cell_cols.resize(n_loc_cells);

  std::vector<int> vf_of_dof;
  std::vector<double> colsum;
  for (int kl = 0; kl < n_loc_cells; ++kl) {
    const int k = cells[kl];
    const auto& dofs = pb.cell_trans.dofs[k];
    const auto& a = pb.cell_trans.a[k];
    const int n = static_cast<int>(dofs.size());
    vf_of_dof.resize(n);
    for (int i = 0; i < n; ++i) {
      const int gid = dofs[i];
      vf_of_dof[i] = layout.is_node(gid) ? layout.vf_of_node(layout.node_of_gid(gid))
                                         : mesh.n_nodes() + layout.frac_of_gid(gid);
    }
    // column sums give the cell row A_{c,vf} and the diagonal A_cc
    colsum.assign(n, 0.0);
    double diag = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        colsum[j] += a[size_t(i) * n + j];
        diag += a[size_t(i) * n + j];
      }
    sys.cell_diag[kl] = diag;
    auto& crow = sys.cell_cols[kl];
    for (int j = 0; j < n; ++j) {
      const double v = -colsum[j];
      if (vf_is_dirichlet(vf_of_dof[j]))
        sys.b_c[kl] -= v * dval[vf_of_dof[j]];
      else
        crow.emplace_back(vf_of_dof[j], v);
    }
    // vf rows: -F_{K,nu} adds +a_{nu,j} on column j (cell column handled by
    // the symmetric cell row above)
    for (int i = 0; i < n; ++i) {
      const int r = row_of_vf[vf_of_dof[i]];
      if (r < 0 || sys.row_is_dirichlet[r]) continue;
      for (int j = 0; j < n; ++j) {
        const double v = a[size_t(i) * n + j];
        if (v == 0.0) continue;
        if (vf_is_dirichlet(vf_of_dof[j]))
          sys.b_vf[r] -= v * dval[vf_of_dof[j]];
        else
          sys.vf_acc.add(r, vf_of_dof[j], v);
      }
    }
  }

  // fracture-face contributions
  for (int f : frac_faces) {
    const int fi = layout.frac_index(f);
    const auto& ndofs = pb.face_trans.dofs[fi];
    const auto& a = pb.face_trans.a[fi];
    const int n = static_cast<int>(ndofs.size());
    const int vf_face = mesh.n_nodes() + fi;

    colsum.assign(n, 0.0);
    double total = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        colsum[j] += a[size_t(i) * n + j];
        total += a[size_t(i) * n + j];
      }

    const int rf = row_of_vf[vf_face];
    if (rf >= 0) {
      // face row: sum_s F_{sigma,s}
      sys.vf_acc.add(rf, vf_face, total);
      for (int j = 0; j < n; ++j) {
        const int vfj = layout.node_of_gid(ndofs[j]);
        const double v = -colsum[j];
        if (vf_is_dirichlet(vfj))
          sys.b_vf[rf] -= v * dval[vfj];
        else
          sys.vf_acc.add(rf, vfj, v);
      }
    }
    // node rows: -F_{sigma,s}
    for (int i = 0; i < n; ++i) {
      const int vfi = layout.node_of_gid(ndofs[i]);
      const int r = row_of_vf[vfi];
      if (r < 0 || sys.row_is_dirichlet[r]) continue;
      double rowsum = 0.0;
      for (int j = 0; j < n; ++j) rowsum += a[size_t(i) * n + j];
      sys.vf_acc.add(r, vf_face, -rowsum);
      for (int j = 0; j < n; ++j) {
        const double v = a[size_t(i) * n + j];
        if (v == 0.0) continue;
        const int vfj = layout.node_of_gid(ndofs[j]);
        if (vf_is_dirichlet(vfj))
          sys.b_vf[r] -= v * dval[vfj];
        else
          sys.vf_acc.add(r, vfj, v);
      }
    }
  }
  return sys;
}

BlockSystem assemble_darcy(const DarcyProblem& pb, bool allow_no_dirichlet) {
  if (pb.bc.is_empty() && !allow_no_dirichlet)
    throw std::runtime_error("singular system: no Dirichlet data and no well");
  std::vector<int> cells(pb.mesh.n_cells());
  std::iota(cells.begin(), cells.end(), 0);
  std::vector<int> vf_rows(pb.layout.n_vf());
  std::iota(vf_rows.begin(), vf_rows.end(), 0);
  return assemble_darcy_rows(pb, cells, pb.mesh.fracture_faces, vf_rows);
}

SchurSystem schur_eliminate(const BlockSystem& block, const std::vector<int>& col_gids,
                            const std::vector<int>& col_of_gid) {
  BlockSystem work = block;  // the accumulator receives the Schur updates

  std::vector<int> row_of_vf(block.n_vf_global, -1);
  for (size_t r = 0; r < block.vf_gid_of_row.size(); ++r) row_of_vf[block.vf_gid_of_row[r]] = int(r);

  const int n_cells = static_cast<int>(block.cells.size());
  for (int kl = 0; kl < n_cells; ++kl) {
    const double d = block.cell_diag[kl];
    if (!(d > 0.0)) throw std::runtime_error("Schur elimination: nonpositive cell diagonal");
    const auto& crow = block.cell_cols[kl];
    const double bc_over_d = block.b_c[kl] / d;
    for (const auto& [ci, vi] : crow) {
      const int r = row_of_vf[ci];
      if (r < 0 || block.row_is_dirichlet[r]) continue;
      for (const auto& [cj, vj] : crow) work.vf_acc.add(r, cj, -vi * vj / d);
      work.b_vf[r] -= vi * bc_over_d;
    }
  }

  SchurSystem schur;
  schur.vf_gid_of_row = block.vf_gid_of_row;
  schur.col_gids = col_gids;
  schur.a = work.vf_acc.to_csr([&](int c) {
    if (col_of_gid[c] < 0) throw std::runtime_error("matrix column outside the local overlap");
    return col_of_gid[c];
  });
  schur.a.cols = static_cast<int>(col_gids.size());
  schur.b = std::move(work.b_vf);
  schur.row_is_dirichlet = block.row_is_dirichlet;
  schur.cells = block.cells;
  schur.cell_diag = block.cell_diag;
  schur.b_c = block.b_c;
  schur.cell_cols.resize(block.cell_cols.size());
  for (size_t kl = 0; kl < block.cell_cols.size(); ++kl) {
    for (const auto& [c, v] : block.cell_cols[kl]) {
      if (col_of_gid[c] < 0) throw std::runtime_error("cell column outside the local overlap");
      schur.cell_cols[kl].emplace_back(col_of_gid[c], v);
    }
  }
  return schur;
}

SchurSystem schur_eliminate(const BlockSystem& block) {
  std::vector<int> ident(block.n_vf_global);
  std::iota(ident.begin(), ident.end(), 0);
  return schur_eliminate(block, ident, ident);
}

std::pair<std::vector<double>, SolveStats> solve(const SchurSystem& schur,
                                                 const SolverConfig& config) {
  SequentialSpace space(schur.a, config.precond);
  std::vector<double> x;
  SolveStats stats = solve_krylov(space, schur.b, x, config);
  return {std::move(x), stats};
}

std::vector<double> back_substitute(const SchurSystem& schur, const std::vector<double>& vf) {
  std::vector<double> uc(schur.cells.size());
  for (size_t kl = 0; kl < schur.cells.size(); ++kl) {
    double acc = schur.b_c[kl];
    for (const auto& [c, v] : schur.cell_cols[kl]) acc -= v * vf[c];
    uc[kl] = acc / schur.cell_diag[kl];
  }
  return uc;
}

DarcySolution solve_darcy(const DarcyProblem& pb, const SolverConfig& config) {
  const BlockSystem block = assemble_darcy(pb);
  const SchurSystem schur = schur_eliminate(block);
  auto [vf, stats] = solve(schur, config);
  const auto uc = back_substitute(schur, vf);

  DarcySolution sol;
  sol.stats = stats;
  sol.pressure.assign(pb.layout.size(), 0.0);
  for (size_t kl = 0; kl < schur.cells.size(); ++kl) sol.pressure[schur.cells[kl]] = uc[kl];
  const int nn = pb.mesh.n_nodes();
  for (int s = 0; s < nn; ++s) sol.pressure[pb.layout.node_gid(s)] = vf[s];
  for (int fi = 0; fi < pb.layout.n_fracture_faces(); ++fi)
    sol.pressure[pb.layout.n_cells() + nn + fi] = vf[nn + fi];
  return sol;
}

void write_matrix_market(const CsrMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  for (int r = 0; r < a.rows; ++r)
    for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p)
      out << r << ' ' << a.col[p] << ' ' << a.val[p] << '\n';
}

}  // namespace dfn
