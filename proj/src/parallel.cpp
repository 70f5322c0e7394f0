#include "dfn/parallel.hpp"

#include <algorithm>
#include <barrier>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace dfn {

namespace {

int widest_axis(const std::vector<Vec3>& centers, const std::vector<int>& cells) {
  Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  for (int k : cells)
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], centers[k][a]);
      hi[a] = std::max(hi[a], centers[k][a]);
    }
  int axis = 0;
  for (int a = 1; a < 3; ++a)
    if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
  return axis;
}

void rcb(std::vector<int>& cells, int n_parts, const std::vector<Vec3>& centers,
         std::vector<int>& part_of_cell, int part_base) {
  if (n_parts == 1) {
    for (int k : cells) part_of_cell[k] = part_base;
    return;
  }
  const int np1 = n_parts / 2;
  const int np2 = n_parts - np1;
  const int n = static_cast<int>(cells.size());
  int n1 = static_cast<int>(std::llround(double(n) * np1 / n_parts));
  n1 = std::max(np1, std::min(n - np2, n1));  // keep both sides feasible

  const int axis = widest_axis(centers, cells);
  std::sort(cells.begin(), cells.end(), [&](int a, int b) {
    if (centers[a][axis] != centers[b][axis]) return centers[a][axis] < centers[b][axis];
    return a < b;
  });
  std::vector<int> left(cells.begin(), cells.begin() + n1);
  std::vector<int> right(cells.begin() + n1, cells.end());
  rcb(left, np1, centers, part_of_cell, part_base);
  rcb(right, np2, centers, part_of_cell, part_base + np1);
}

}  // namespace

Partition partition_cells(const Mesh& mesh, const Adjacency& adj, int n_parts) {
  if (n_parts < 1 || n_parts > mesh.n_cells())
    throw std::invalid_argument("part count must lie in [1, number of cells]");

  Partition part;
  part.n_parts = n_parts;
  part.part_of_cell.assign(mesh.n_cells(), -1);
  std::vector<int> all(mesh.n_cells());
  std::iota(all.begin(), all.end(), 0);
  rcb(all, n_parts, mesh.cell_center, part.part_of_cell, 0);

  part.cells_of_part.resize(n_parts);
  for (int k = 0; k < mesh.n_cells(); ++k) part.cells_of_part[part.part_of_cell[k]].push_back(k);

  // owner = part of the smallest-global-index incident cell
  part.owner_of_node.resize(mesh.n_nodes());
  for (int s = 0; s < mesh.n_nodes(); ++s)
    part.owner_of_node[s] = part.part_of_cell[adj.cells_of_node[s].front()];
  part.owner_of_frac.resize(mesh.n_fracture_faces());
  for (int fi = 0; fi < mesh.n_fracture_faces(); ++fi) {
    const auto& ks = mesh.face_cells[mesh.fracture_faces[fi]];
    int k = ks[0];
    if (ks[1] >= 0) k = std::min(k, ks[1]);
    part.owner_of_frac[fi] = part.part_of_cell[k];
  }
  return part;
}

OverlapPartition build_overlap(const Mesh& mesh, const Adjacency& adj, const Partition& part) {
  OverlapPartition ov;
  ov.parts.resize(part.n_parts);
  std::vector<int> frac_index_of_face(mesh.n_faces(), -1);
  for (int fi = 0; fi < mesh.n_fracture_faces(); ++fi)
    frac_index_of_face[mesh.fracture_faces[fi]] = fi;

  for (int p = 0; p < part.n_parts; ++p) {
    PartOverlap& o = ov.parts[p];
    std::vector<char> in_cells(mesh.n_cells(), 0);
    for (int k : part.cells_of_part[p])
      for (int s : mesh.cell_nodes[k])
        for (int k2 : adj.cells_of_node[s]) in_cells[k2] = 1;
    for (int k = 0; k < mesh.n_cells(); ++k)
      if (in_cells[k]) o.cells.push_back(k);

    std::vector<char> in_nodes(mesh.n_nodes(), 0), in_faces(mesh.n_faces(), 0);
    for (int k : o.cells) {
      for (int s : mesh.cell_nodes[k]) in_nodes[s] = 1;
      for (int f : adj.fracture_faces_of_cell[k]) in_faces[f] = 1;
    }
    for (int s = 0; s < mesh.n_nodes(); ++s)
      if (in_nodes[s]) o.nodes.push_back(s);
    for (int f : mesh.fracture_faces)
      if (in_faces[f]) o.frac_faces.push_back(f);

    for (int k : o.cells) o.cell_is_own.push_back(part.part_of_cell[k] == p);
    for (int s : o.nodes) o.node_is_own.push_back(part.owner_of_node[s] == p);
    for (int f : o.frac_faces)
      o.face_is_own.push_back(part.owner_of_frac[frac_index_of_face[f]] == p);
  }
  return ov;
}

ExchangePlan build_exchange(const Mesh& mesh, const DofLayout& layout, const Partition& part,
                            const OverlapPartition& overlap) {
  ExchangePlan plan;
  const int np = part.n_parts;
  plan.own_rows.resize(np);
  plan.vf_gids.resize(np);
  plan.own_pos.resize(np);
  plan.ghosts.resize(np);

  for (int p = 0; p < np; ++p) {
    const PartOverlap& o = overlap.parts[p];
    for (size_t i = 0; i < o.nodes.size(); ++i) {
      plan.vf_gids[p].push_back(layout.vf_of_node(o.nodes[i]));
      if (o.node_is_own[i]) plan.own_rows[p].push_back(layout.vf_of_node(o.nodes[i]));
    }
    for (size_t i = 0; i < o.frac_faces.size(); ++i) {
      plan.vf_gids[p].push_back(layout.vf_of_face(o.frac_faces[i]));
      if (o.face_is_own[i]) plan.own_rows[p].push_back(layout.vf_of_face(o.frac_faces[i]));
    }
  }
  for (int p = 0; p < np; ++p) {
    const auto& gids = plan.vf_gids[p];
    for (int vf : plan.own_rows[p])
      plan.own_pos[p].push_back(
          int(std::lower_bound(gids.begin(), gids.end(), vf) - gids.begin()));
    for (size_t l = 0; l < gids.size(); ++l) {
      const int vf = gids[l];
      const int owner = vf < mesh.n_nodes() ? part.owner_of_node[vf]
                                            : part.owner_of_frac[vf - mesh.n_nodes()];
      if (owner == p) continue;
      const auto& orows = plan.own_rows[owner];
      const auto it = std::lower_bound(orows.begin(), orows.end(), vf);
      if (it == orows.end() || *it != vf)
        throw std::runtime_error("ghost dof has no owner row");  // internal consistency
      plan.ghosts[p].push_back({int(l), owner, int(it - orows.begin())});
    }
  }
  return plan;
}

std::vector<std::vector<double>> apply_exchange(const ExchangePlan& plan,
                                                const std::vector<std::vector<double>>& own) {
  std::vector<std::vector<double>> out(plan.vf_gids.size());
  for (size_t p = 0; p < plan.vf_gids.size(); ++p) {
    out[p].assign(plan.vf_gids[p].size(), 0.0);
    for (size_t i = 0; i < plan.own_rows[p].size(); ++i)
      out[p][plan.own_pos[p][i]] = own[p][i];
    for (const GhostRef& g : plan.ghosts[p]) out[p][g.local] = own[g.owner][g.owner_local];
  }
  return out;
}

void write_timings_csv(const std::string& path, const std::vector<PartTimings>& timings) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "part,assemble,solve,exchange,update\n";
  out.precision(6);
  for (size_t p = 0; p < timings.size(); ++p)
    out << p << ',' << timings[p].assemble << ',' << timings[p].solve << ','
        << timings[p].exchange << ',' << timings[p].update << '\n';
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Shared state of one SPMD run. Mutable fields are either written by a
/// single rank between barriers or written at disjoint indices.
struct Comm {
  std::barrier<> bar;
  int n_parts;
  bool deterministic;
  std::vector<double> slots;    // one per global vf dof, for ordered reductions
  std::vector<double> partial;  // one per part
  double scalar = 0.0;

  Comm(int np, int n_vf, bool det)
      : bar(np), n_parts(np), deterministic(det), slots(n_vf, 0.0), partial(np, 0.0) {}
};

/// Distributed linear space: each rank holds its own rows of the Schur system
/// with columns over its overlap dofs. Global dots reduce in ascending global
/// dof order (bitwise equal to the sequential loop) unless the deterministic
/// flag is off, in which case per-part partial sums reduce in part order.
struct ParSpace {
  Comm& comm;
  int rank;
  const CsrMatrix& a;
  const std::vector<int>& own_rows;  // global vf gids of local rows
  const std::vector<int>& vf_gids;   // global vf gids of local columns
  std::vector<double>& xstage;       // global staging vector for matvec
  SolverConfig::Precond precond;
  std::vector<double> inv_diag;
  Ilu0 ilu;
  CsrMatrix own_block;                  // own rows x own columns, for ILU(0)
  std::vector<int> own_col_of_local;    // local column -> own-row position or -1
  mutable std::vector<double> xov;

  ParSpace(Comm& c, int rk, const CsrMatrix& mat, const std::vector<int>& rows,
           const std::vector<int>& cols, std::vector<double>& stage,
           SolverConfig::Precond pc)
      : comm(c), rank(rk), a(mat), own_rows(rows), vf_gids(cols), xstage(stage), precond(pc) {
    xov.resize(vf_gids.size());
    if (precond == SolverConfig::Precond::Jacobi) {
      inv_diag.assign(own_rows.size(), 0.0);
      for (size_t r = 0; r < own_rows.size(); ++r) {
        double d = 0.0;
        for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p)
          if (vf_gids[a.col[p]] == own_rows[r]) d = a.val[p];
        if (d == 0.0) throw std::runtime_error("zero diagonal in Jacobi preconditioner");
        inv_diag[r] = 1.0 / d;
      }
    } else if (precond == SolverConfig::Precond::ILU0) {
      // block Jacobi: factor the own-rows x own-columns submatrix
      own_col_of_local.assign(vf_gids.size(), -1);
      for (size_t i = 0; i < vf_gids.size(); ++i) {
        const auto it = std::lower_bound(own_rows.begin(), own_rows.end(), vf_gids[i]);
        if (it != own_rows.end() && *it == vf_gids[i])
          own_col_of_local[i] = int(it - own_rows.begin());
      }
      own_block.rows = own_block.cols = int(own_rows.size());
      own_block.row_ptr.assign(own_rows.size() + 1, 0);
      for (size_t r = 0; r < own_rows.size(); ++r) {
        for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p)
          if (own_col_of_local[a.col[p]] >= 0) {
            own_block.col.push_back(own_col_of_local[a.col[p]]);
            own_block.val.push_back(a.val[p]);
          }
        own_block.row_ptr[r + 1] = int(own_block.col.size());
      }
      ilu.factor(own_block);
    }
  }

  int n() const { return static_cast<int>(own_rows.size()); }

  void matvec(const std::vector<double>& x, std::vector<double>& y) const {
    for (size_t i = 0; i < own_rows.size(); ++i) xstage[own_rows[i]] = x[i];
    comm.bar.arrive_and_wait();
    for (size_t j = 0; j < vf_gids.size(); ++j) xov[j] = xstage[vf_gids[j]];
    y.resize(own_rows.size());
    a.matvec(xov, y);
    comm.bar.arrive_and_wait();
  }

  double dot(const std::vector<double>& x, const std::vector<double>& y) const {
    if (comm.deterministic) {
      for (size_t i = 0; i < own_rows.size(); ++i) comm.slots[own_rows[i]] = x[i] * y[i];
      comm.bar.arrive_and_wait();
      if (rank == 0) {
        double acc = 0.0;
        for (double v : comm.slots) acc += v;
        comm.scalar = acc;
      }
    } else {
      double acc = 0.0;
      for (size_t i = 0; i < own_rows.size(); ++i) acc += x[i] * y[i];
      comm.partial[rank] = acc;
      comm.bar.arrive_and_wait();
      if (rank == 0) {
        double acc2 = 0.0;
        for (double v : comm.partial) acc2 += v;
        comm.scalar = acc2;
      }
    }
    comm.bar.arrive_and_wait();
    return comm.scalar;
  }

  void apply_precond(const std::vector<double>& r, std::vector<double>& z) const {
    z.resize(r.size());
    switch (precond) {
      case SolverConfig::Precond::None:
        z = r;
        break;
      case SolverConfig::Precond::Jacobi:
        for (size_t i = 0; i < r.size(); ++i) z[i] = inv_diag[i] * r[i];
        break;
      case SolverConfig::Precond::ILU0:
        ilu.apply(r, z);
        break;
    }
  }
};

/// Runs fn on n_parts workers and rethrows the first stored exception. A
/// failing worker drops out of the barrier so the others cannot hang on it.
void spmd_run(int n_parts, Comm& comm, const std::function<void(int)>& fn) {
  std::vector<std::exception_ptr> errors(n_parts);
  auto body = [&](int rank) {
    try {
      fn(rank);
    } catch (...) {
      errors[rank] = std::current_exception();
      comm.bar.arrive_and_drop();
    }
  };
  std::vector<std::thread> threads;
  for (int p = 1; p < n_parts; ++p) threads.emplace_back(body, p);
  body(0);
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

ParallelDarcyResult parallel_darcy_solve(const DarcyProblem& pb, const Partition& part,
                                         const SolverConfig& config, bool deterministic_reduction,
                                         const std::function<void(BlockSystem&, int)>& post_assemble) {
  const int np = part.n_parts;
  const OverlapPartition overlap = build_overlap(pb.mesh, pb.adj, part);
  const ExchangePlan plan = build_exchange(pb.mesh, pb.layout, part, overlap);

  Comm comm(np, pb.layout.n_vf(), deterministic_reduction);
  std::vector<double> xstage(pb.layout.n_vf(), 0.0);

  ParallelDarcyResult res;
  res.pressure.assign(pb.layout.size(), 0.0);
  res.timings.resize(np);
  std::vector<std::vector<double>> own_sol(np);

  spmd_run(np, comm, [&](int rank) {
    PartTimings& tm = res.timings[rank];
    const PartOverlap& o = overlap.parts[rank];

    auto t0 = Clock::now();
    BlockSystem block = assemble_darcy_rows(pb, o.cells, o.frac_faces, plan.own_rows[rank]);
    if (post_assemble) post_assemble(block, rank);
    std::vector<int> col_of_gid(pb.layout.n_vf(), -1);
    for (size_t j = 0; j < plan.vf_gids[rank].size(); ++j)
      col_of_gid[plan.vf_gids[rank][j]] = int(j);
    const SchurSystem schur = schur_eliminate(block, plan.vf_gids[rank], col_of_gid);
    tm.assemble = seconds_since(t0);

    t0 = Clock::now();
    ParSpace sp(comm, rank, schur.a, plan.own_rows[rank], plan.vf_gids[rank], xstage,
                config.precond);
    std::vector<double> x;
    const SolveStats stats = solve_krylov(sp, schur.b, x, config);
    tm.solve = seconds_since(t0);

    t0 = Clock::now();
    own_sol[rank] = std::move(x);
    comm.bar.arrive_and_wait();
    std::vector<double> vf(plan.vf_gids[rank].size(), 0.0);
    for (size_t i = 0; i < plan.own_rows[rank].size(); ++i)
      vf[plan.own_pos[rank][i]] = own_sol[rank][i];
    for (const GhostRef& g : plan.ghosts[rank]) vf[g.local] = own_sol[g.owner][g.owner_local];
    comm.bar.arrive_and_wait();
    tm.exchange = seconds_since(t0);

    t0 = Clock::now();
    const std::vector<double> uc = back_substitute(schur, vf);
    const int nc = pb.mesh.n_cells();
    const int nn = pb.mesh.n_nodes();
    for (size_t kl = 0; kl < schur.cells.size(); ++kl)
      if (part.part_of_cell[schur.cells[kl]] == rank) res.pressure[schur.cells[kl]] = uc[kl];
    for (size_t i = 0; i < plan.own_rows[rank].size(); ++i) {
      const int vfg = plan.own_rows[rank][i];
      res.pressure[nc + vfg] = own_sol[rank][i];  // vf gid maps directly past the cells
    }
    (void)nn;
    if (rank == 0) res.stats = stats;
    tm.update = seconds_since(t0);
  });
  return res;
}

TransportResult parallel_transport_run(const Mesh& mesh, const Adjacency& adj,
                                       const DofLayout& layout, const FluxField& fx,
                                       const ControlVolumes& cv,
                                       const std::function<double(int, double)>& cbar,
                                       const DofVector& c0, const TransportOptions& options,
                                       const Partition& part, std::vector<PartTimings>* timings) {
  if (!(options.t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  if (!(options.cfl_safety > 0.0 && options.cfl_safety <= 1.0))
    throw std::invalid_argument("cfl_safety must lie in (0, 1]");

  const int np = part.n_parts;
  const int nc = mesh.n_cells();
  const int nn = mesh.n_nodes();
  const OverlapPartition overlap = build_overlap(mesh, adj, part);

  Comm comm(np, layout.n_vf(), true);
  TransportResult res;
  res.c.assign(layout.size(), 0.0);
  std::vector<PartTimings> local_timings(np);

  // per-part local concentration arrays, published for ghost pulls
  std::vector<std::vector<double>> c_pub(np);
  const double inf = std::numeric_limits<double>::infinity();

  spmd_run(np, comm, [&](int rank) {
    PartTimings& tm = local_timings[rank];
    const PartOverlap& o = overlap.parts[rank];
    const int ncl = int(o.cells.size());
    const int nnl = int(o.nodes.size());
    const int nfl = int(o.frac_faces.size());

    // local index maps
    std::vector<int> lcell(nc, -1), lnode(nn, -1), lface(mesh.n_fracture_faces(), -1);
    for (int i = 0; i < ncl; ++i) lcell[o.cells[i]] = i;
    for (int i = 0; i < nnl; ++i) lnode[o.nodes[i]] = i;
    for (int i = 0; i < nfl; ++i) lface[layout.frac_index(o.frac_faces[i])] = i;
    auto local_of_gid = [&](int gid) {
      int l;
      if (layout.is_cell(gid))
        l = lcell[gid];
      else if (layout.is_node(gid))
        l = lnode[layout.node_of_gid(gid)] >= 0 ? ncl + lnode[layout.node_of_gid(gid)] : -1;
      else
        l = lface[layout.frac_of_gid(gid)] >= 0 ? ncl + nnl + lface[layout.frac_of_gid(gid)] : -1;
      if (l < 0) throw std::runtime_error("transport stencil reaches outside the overlap");
      return l;
    };

    // translated incidence, in the same order as the sequential gather
    std::vector<int> cinc_ptr(ncl + 1, 0), cinc_loc;
    std::vector<double> cinc_flux;
    for (int i = 0; i < ncl; ++i) {
      const int k = o.cells[i];
      for (int p = fx.cell_ptr[k]; p < fx.cell_ptr[k + 1]; ++p) {
        cinc_loc.push_back(local_of_gid(fx.cell_inc_gid[p]));
        cinc_flux.push_back(fx.cell_inc_flux[p]);
      }
      cinc_ptr[i + 1] = int(cinc_loc.size());
    }
    struct FaceRow {
      int local;  // combined local index of the face
      std::vector<int> node_loc;
      std::vector<double> node_flux;
      std::vector<int> cell_loc;
      std::vector<double> cell_flux;
      double phi;
    };
    std::vector<FaceRow> own_faces;
    for (int i = 0; i < nfl; ++i) {
      if (!o.face_is_own[i]) continue;
      const int fi = layout.frac_index(o.frac_faces[i]);
      FaceRow row;
      row.local = ncl + nnl + i;
      for (int p = fx.face_ptr[fi]; p < fx.face_ptr[fi + 1]; ++p) {
        row.node_loc.push_back(ncl + lnode[fx.face_inc_node[p]]);
        row.node_flux.push_back(fx.face_inc_flux[p]);
      }
      for (int p = fx.facecell_ptr[fi]; p < fx.facecell_ptr[fi + 1]; ++p) {
        row.cell_loc.push_back(lcell[fx.facecell[p]]);
        row.cell_flux.push_back(fx.facecell_flux[p]);
      }
      row.phi = cv.phi_face[fi];
      own_faces.push_back(std::move(row));
    }
    struct NodeRow {
      int local;
      std::vector<int> cell_loc;
      std::vector<double> cell_flux;
      std::vector<int> face_loc;
      std::vector<double> face_flux;
      double phi;
    };
    std::vector<NodeRow> own_nodes;     // interior own nodes
    std::vector<int> own_bnd_nodes;     // boundary own nodes (global ids)
    for (int i = 0; i < nnl; ++i) {
      if (!o.node_is_own[i]) continue;
      const int s = o.nodes[i];
      if (mesh.node_on_boundary[s]) {
        own_bnd_nodes.push_back(s);
        continue;
      }
      NodeRow row;
      row.local = ncl + i;
      for (int p = fx.node_cell_ptr[s]; p < fx.node_cell_ptr[s + 1]; ++p) {
        row.cell_loc.push_back(lcell[fx.node_cell[p]]);
        row.cell_flux.push_back(fx.node_cell_flux[p]);
      }
      for (int p = fx.node_face_ptr[s]; p < fx.node_face_ptr[s + 1]; ++p) {
        row.face_loc.push_back(ncl + nnl + lface[fx.node_face[p]]);
        row.face_flux.push_back(fx.node_face_flux[p]);
      }
      row.phi = cv.phi_node[s];
      own_nodes.push_back(std::move(row));
    }

    // sources: cell sources apply on every part overlapping the cell,
    // node and face sources on their owner only
    std::vector<std::pair<int, const SourceTerm*>> local_sources;  // (combined local, source)
    for (const SourceTerm& src : options.sources) {
      if (layout.is_cell(src.gid)) {
        if (lcell[src.gid] >= 0) local_sources.emplace_back(lcell[src.gid], &src);
      } else if (layout.is_node(src.gid)) {
        const int s = layout.node_of_gid(src.gid);
        if (part.owner_of_node[s] == rank) local_sources.emplace_back(ncl + lnode[s], &src);
      } else {
        const int fi = layout.frac_of_gid(src.gid);
        if (part.owner_of_frac[fi] == rank)
          local_sources.emplace_back(ncl + nnl + lface[fi], &src);
      }
    }
    std::vector<double> src_out(ncl + nnl + nfl, 0.0);
    for (const auto& [l, src] : local_sources)
      if (src->q < 0.0) src_out[l] += -src->q;

    // local CFL bound over own dofs only (cells partition; min-reduce is exact)
    double dt_local = inf;
    for (int i = 0; i < ncl; ++i) {
      if (!o.cell_is_own[i]) continue;
      double out = src_out[i];
      for (int p = cinc_ptr[i]; p < cinc_ptr[i + 1]; ++p) out += std::max(cinc_flux[p], 0.0);
      if (out > 0.0) dt_local = std::min(dt_local, cv.phi_cell[o.cells[i]] / out);
    }
    for (const FaceRow& row : own_faces) {
      double out = src_out[row.local];
      for (double f : row.node_flux) out += std::max(f, 0.0);
      for (double f : row.cell_flux) out += std::max(-f, 0.0);
      if (out > 0.0) dt_local = std::min(dt_local, row.phi / out);
    }
    for (const NodeRow& row : own_nodes) {
      double out = src_out[row.local];
      for (double f : row.cell_flux) out += std::max(-f, 0.0);
      for (double f : row.face_flux) out += std::max(-f, 0.0);
      if (out > 0.0) dt_local = std::min(dt_local, row.phi / out);
    }
    comm.partial[rank] = dt_local;
    comm.bar.arrive_and_wait();
    if (rank == 0) {
      double m = inf;
      for (double v : comm.partial) m = std::min(m, v);
      comm.scalar = m;
    }
    comm.bar.arrive_and_wait();
    if (comm.scalar == inf) throw std::runtime_error("no flow: CFL time step is unbounded");
    const double dt = options.cfl_safety * comm.scalar;
    const double T = options.t_end;
    const int N = std::max(1, static_cast<int>(std::ceil(T / dt)));

    // local state
    std::vector<double> c(ncl + nnl + nfl);
    for (int i = 0; i < ncl; ++i) c[i] = c0[o.cells[i]];
    for (int i = 0; i < nnl; ++i) c[ncl + i] = c0[layout.node_gid(o.nodes[i])];
    for (int i = 0; i < nfl; ++i)
      c[ncl + nnl + i] = c0[layout.frac_gid_of_face(o.frac_faces[i])];
    c_pub[rank] = c;  // publish (single buffer; slices read by index below)

    auto publish_global = [&]() {
      for (int i = 0; i < ncl; ++i)
        if (o.cell_is_own[i]) res.c[o.cells[i]] = c[i];
      for (int i = 0; i < nnl; ++i)
        if (o.node_is_own[i]) res.c[layout.node_gid(o.nodes[i])] = c[ncl + i];
      for (int i = 0; i < nfl; ++i)
        if (o.face_is_own[i]) res.c[layout.frac_gid_of_face(o.frac_faces[i])] = c[ncl + nnl + i];
    };

    std::vector<double> resid(ncl + nnl + nfl);
    for (int n = 0; n < N; ++n) {
      auto t0 = Clock::now();
      const double dtn = (n == N - 1) ? T - (N - 1) * dt : dt;
      const double t_next = (n == N - 1) ? T : (n + 1) * dt;

      // gather phase: reads only this part's local state
      for (int i = 0; i < ncl; ++i) {
        const double ck = c[i];
        double acc = 0.0;
        for (int p = cinc_ptr[i]; p < cinc_ptr[i + 1]; ++p) {
          const double f = cinc_flux[p];
          acc += f >= 0.0 ? ck * f : c[cinc_loc[p]] * f;
        }
        resid[i] = acc;
      }
      for (const FaceRow& row : own_faces) {
        const double cf = c[row.local];
        double acc = 0.0;
        for (size_t j = 0; j < row.node_loc.size(); ++j) {
          const double f = row.node_flux[j];
          acc += f >= 0.0 ? cf * f : c[row.node_loc[j]] * f;
        }
        for (size_t j = 0; j < row.cell_loc.size(); ++j) {
          const double f = row.cell_flux[j];
          acc -= f >= 0.0 ? c[row.cell_loc[j]] * f : cf * f;
        }
        resid[row.local] = acc;
      }
      for (const NodeRow& row : own_nodes) {
        const double cs = c[row.local];
        double acc = 0.0;
        for (size_t j = 0; j < row.cell_loc.size(); ++j) {
          const double f = row.cell_flux[j];
          acc -= f >= 0.0 ? c[row.cell_loc[j]] * f : cs * f;
        }
        for (size_t j = 0; j < row.face_loc.size(); ++j) {
          const double f = row.face_flux[j];
          acc -= f >= 0.0 ? c[row.face_loc[j]] * f : cs * f;
        }
        resid[row.local] = acc;
      }
      for (const auto& [l, src] : local_sources)
        resid[l] -= src->q > 0.0 ? src->q * src->c_in : src->q * c[l];

      // update phase: overlap cells, own faces, own interior nodes
      for (int i = 0; i < ncl; ++i) c[i] -= dtn / cv.phi_cell[o.cells[i]] * resid[i];
      for (const FaceRow& row : own_faces) c[row.local] -= dtn / row.phi * resid[row.local];
      for (const NodeRow& row : own_nodes) c[row.local] -= dtn / row.phi * resid[row.local];
      for (int s : own_bnd_nodes) c[ncl + lnode[s]] = cbar ? cbar(s, (n * dt) + dtn) : 0.0;
      c_pub[rank] = c;  // publish own values for the ghost pull
      tm.update += seconds_since(t0);

      t0 = Clock::now();
      comm.bar.arrive_and_wait();
      // ghost pull: node and face values from their owners' published state
      for (int i = 0; i < nnl; ++i) {
        if (o.node_is_own[i]) continue;
        const int s = o.nodes[i];
        const int q = part.owner_of_node[s];
        const PartOverlap& oo = overlap.parts[q];
        const int ql = int(std::lower_bound(oo.nodes.begin(), oo.nodes.end(), s) -
                           oo.nodes.begin());
        c[ncl + i] = c_pub[q][oo.cells.size() + ql];
      }
      for (int i = 0; i < nfl; ++i) {
        if (o.face_is_own[i]) continue;
        const int f = o.frac_faces[i];
        const int q = part.owner_of_frac[layout.frac_index(f)];
        const PartOverlap& oo = overlap.parts[q];
        const int ql = int(std::lower_bound(oo.frac_faces.begin(), oo.frac_faces.end(), f) -
                           oo.frac_faces.begin());
        c[ncl + nnl + i] = c_pub[q][oo.cells.size() + oo.nodes.size() + ql];
      }
      comm.bar.arrive_and_wait();
      tm.exchange += seconds_since(t0);

      // output points: all ranks take the same branch
      const bool want_series =
          options.series_stride > 0 && ((n + 1) % options.series_stride == 0 || n == N - 1);
      if (want_series || n == N - 1) {
        publish_global();
        comm.bar.arrive_and_wait();
        if (rank == 0 && want_series)
          res.series.push_back(tracer_volumes(res.c, t_next, mesh, adj, layout, cv));
        comm.bar.arrive_and_wait();
      }
    }
    if (rank == 0) {
      res.t = T;
      res.steps = N;
      res.dt = dt;
      if (options.series_stride > 0)
        res.series.insert(res.series.begin(),
                          tracer_volumes(c0, 0.0, mesh, adj, layout, cv));
    }
  });

  if (timings) *timings = local_timings;
  return res;
}

}  // namespace dfn
