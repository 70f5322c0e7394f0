#include "dfn/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dfn {

namespace {

double eval_cbar(const std::function<double(int, double)>& cbar, int s, double t) {
  return cbar ? cbar(s, t) : 0.0;
}

}  // namespace

VolumeFractions compute_volume_fractions(const Mesh& mesh, const Adjacency& adj,
                                         const MatrixProperties& matrix,
                                         const FractureProperties& fractures, double omega_m,
                                         double omega_f) {
  if (!(omega_m >= 0.0 && omega_m < 1.0) || !(omega_f >= 0.0 && omega_f < 1.0))
    throw std::invalid_argument("volume fractions omega must lie in [0, 1)");

  std::vector<double> cell_mag(mesh.n_cells());
  for (int k = 0; k < mesh.n_cells(); ++k) cell_mag[k] = matrix.permeability[k].max_eigenvalue();
  std::vector<double> face_mag(mesh.n_fracture_faces());
  for (int fi = 0; fi < mesh.n_fracture_faces(); ++fi)
    face_mag[fi] = fractures.permeability[mesh.fracture_id_of_face[mesh.fracture_faces[fi]]]
                       .max_eigenvalue();

  std::vector<int> frac_index_of_face(mesh.n_faces(), -1);
  for (int fi = 0; fi < mesh.n_fracture_faces(); ++fi)
    frac_index_of_face[mesh.fracture_faces[fi]] = fi;

  // winners per node, gathered into per-donor node lists
  std::vector<std::vector<int>> cell_wins(mesh.n_cells());
  std::vector<std::vector<int>> face_wins(mesh.n_fracture_faces());
  for (int s = 0; s < mesh.n_nodes(); ++s) {
    if (mesh.node_on_boundary[s]) continue;
    if (adj.node_on_fracture[s]) {
      double best = -1.0;
      for (int f : adj.fracture_faces_of_node[s])
        best = std::max(best, face_mag[frac_index_of_face[f]]);
      for (int f : adj.fracture_faces_of_node[s]) {
        const int fi = frac_index_of_face[f];
        if (face_mag[fi] == best) face_wins[fi].push_back(s);
      }
    } else {
      double best = -1.0;
      for (int k : adj.cells_of_node[s]) best = std::max(best, cell_mag[k]);
      for (int k : adj.cells_of_node[s])
        if (cell_mag[k] == best) cell_wins[k].push_back(s);
    }
  }

  VolumeFractions vf;
  vf.cell_alpha.resize(mesh.n_cells());
  vf.face_alpha.resize(mesh.n_fracture_faces());
  for (int k = 0; k < mesh.n_cells(); ++k) {
    if (cell_wins[k].empty()) continue;
    const double a = omega_m / cell_wins[k].size();
    for (int s : cell_wins[k]) vf.cell_alpha[k].emplace_back(s, a);
  }
  for (int fi = 0; fi < mesh.n_fracture_faces(); ++fi) {
    if (face_wins[fi].empty()) continue;
    const double a = omega_f / face_wins[fi].size();
    for (int s : face_wins[fi]) vf.face_alpha[fi].emplace_back(s, a);
  }
  return vf;
}

double ControlVolumes::total() const {
  double t = 0.0;
  for (double v : phi_cell) t += v;
  for (double v : phi_face) t += v;
  for (double v : phi_node) t += v;
  return t;
}

ControlVolumes compute_porous_volumes(const Mesh& mesh, const Adjacency& adj,
                                      const VolumeFractions& vf, const MatrixProperties& matrix,
                                      const FractureProperties& fractures) {
  ControlVolumes cv;
  cv.phi_cell.resize(mesh.n_cells());
  cv.phi_face.resize(mesh.n_fracture_faces());
  cv.phi_node.assign(mesh.n_nodes(), 0.0);
  cv.d_f_sigma.resize(mesh.n_fracture_faces());

  for (int k = 0; k < mesh.n_cells(); ++k) {
    const double pore = matrix.porosity[k] * cell_volume(mesh, k);
    double taken = 0.0;
    for (const auto& [s, a] : vf.cell_alpha[k]) {
      taken += a;
      cv.phi_node[s] += a * pore;
    }
    cv.phi_cell[k] = (1.0 - taken) * pore;
    if (!(cv.phi_cell[k] > 0.0)) throw std::runtime_error("nonpositive cell pore volume");
  }
  for (int fi = 0; fi < mesh.n_fracture_faces(); ++fi) {
    const int f = mesh.fracture_faces[fi];
    const int fid = mesh.fracture_id_of_face[f];
    cv.d_f_sigma[fi] = fractures.width[fid];
    const double pore = fractures.width[fid] * fractures.porosity[fid] * face_area(mesh, f);
    double taken = 0.0;
    for (const auto& [s, a] : vf.face_alpha[fi]) {
      taken += a;
      cv.phi_node[s] += a * pore;
    }
    cv.phi_face[fi] = (1.0 - taken) * pore;
    if (!(cv.phi_face[fi] > 0.0)) throw std::runtime_error("nonpositive fracture pore volume");
  }
  for (int s = 0; s < mesh.n_nodes(); ++s) {
    if (mesh.node_on_boundary[s]) continue;
    if (!(cv.phi_node[s] > 0.0))
      throw std::runtime_error("interior node " + std::to_string(s) +
                               " has no pore volume; increase omega");
  }
  return cv;
}

FluxField compute_fluxes(const Mesh& mesh, const Adjacency& adj, const DofLayout& layout,
                         const CellTransmissibilities& ct, const FaceTransmissibilities& ft,
                         const DofVector& u) {
  FluxField fx;
  const int nc = mesh.n_cells();
  const int nn = mesh.n_nodes();
  const int nf = mesh.n_fracture_faces();

  fx.cell_ptr.assign(nc + 1, 0);
  for (int k = 0; k < nc; ++k)
    fx.cell_ptr[k + 1] = fx.cell_ptr[k] + static_cast<int>(ct.dofs[k].size());
  fx.cell_inc_gid.resize(fx.cell_ptr[nc]);
  fx.cell_inc_flux.resize(fx.cell_ptr[nc]);
  for (int k = 0; k < nc; ++k) {
    const auto& dofs = ct.dofs[k];
    const auto& a = ct.a[k];
    const int n = static_cast<int>(dofs.size());
    const double uk = u[layout.cell_gid(k)];
    for (int i = 0; i < n; ++i) {
      double flux = 0.0;
      for (int j = 0; j < n; ++j) flux += a[size_t(i) * n + j] * (uk - u[dofs[j]]);
      fx.cell_inc_gid[fx.cell_ptr[k] + i] = dofs[i];
      fx.cell_inc_flux[fx.cell_ptr[k] + i] = flux;
    }
  }

  fx.face_ptr.assign(nf + 1, 0);
  for (int fi = 0; fi < nf; ++fi)
    fx.face_ptr[fi + 1] = fx.face_ptr[fi] + static_cast<int>(ft.dofs[fi].size());
  fx.face_inc_node.resize(fx.face_ptr[nf]);
  fx.face_inc_flux.resize(fx.face_ptr[nf]);
  for (int fi = 0; fi < nf; ++fi) {
    const auto& dofs = ft.dofs[fi];
    const auto& a = ft.a[fi];
    const int n = static_cast<int>(dofs.size());
    const double uf = u[nc + nn + fi];
    for (int i = 0; i < n; ++i) {
      double flux = 0.0;
      for (int j = 0; j < n; ++j) flux += a[size_t(i) * n + j] * (uf - u[dofs[j]]);
      fx.face_inc_node[fx.face_ptr[fi] + i] = layout.node_of_gid(dofs[i]);
      fx.face_inc_flux[fx.face_ptr[fi] + i] = flux;
    }
  }

  // transposes; incidence lists from Adjacency are ascending by construction
  fx.node_cell_ptr.assign(nn + 1, 0);
  for (int s = 0; s < nn; ++s)
    fx.node_cell_ptr[s + 1] = fx.node_cell_ptr[s] + static_cast<int>(adj.cells_of_node[s].size());
  fx.node_cell.resize(fx.node_cell_ptr[nn]);
  fx.node_cell_flux.resize(fx.node_cell_ptr[nn]);
  for (int s = 0; s < nn; ++s) {
    int p = fx.node_cell_ptr[s];
    const int gid = layout.node_gid(s);
    for (int k : adj.cells_of_node[s]) {
      double flux = 0.0;
      for (int q = fx.cell_ptr[k]; q < fx.cell_ptr[k + 1]; ++q)
        if (fx.cell_inc_gid[q] == gid) {
          flux = fx.cell_inc_flux[q];
          break;
        }
      fx.node_cell[p] = k;
      fx.node_cell_flux[p] = flux;
      ++p;
    }
  }

  fx.node_face_ptr.assign(nn + 1, 0);
  for (int s = 0; s < nn; ++s)
    fx.node_face_ptr[s + 1] =
        fx.node_face_ptr[s] + static_cast<int>(adj.fracture_faces_of_node[s].size());
  fx.node_face.resize(fx.node_face_ptr[nn]);
  fx.node_face_flux.resize(fx.node_face_ptr[nn]);
  for (int s = 0; s < nn; ++s) {
    int p = fx.node_face_ptr[s];
    for (int f : adj.fracture_faces_of_node[s]) {
      const int fi = layout.frac_index(f);
      double flux = 0.0;
      for (int q = fx.face_ptr[fi]; q < fx.face_ptr[fi + 1]; ++q)
        if (fx.face_inc_node[q] == s) {
          flux = fx.face_inc_flux[q];
          break;
        }
      fx.node_face[p] = fi;
      fx.node_face_flux[p] = flux;
      ++p;
    }
  }

  fx.facecell_ptr.assign(nf + 1, 0);
  fx.facecell.reserve(2 * nf);
  fx.facecell_flux.reserve(2 * nf);
  for (int fi = 0; fi < nf; ++fi) {
    const int f = mesh.fracture_faces[fi];
    const int gid = layout.frac_gid_of_face(f);
    std::array<int, 2> ks = mesh.face_cells[f];
    if (ks[1] >= 0 && ks[1] < ks[0]) std::swap(ks[0], ks[1]);
    for (int k : ks) {
      if (k < 0) continue;
      double flux = 0.0;
      for (int q = fx.cell_ptr[k]; q < fx.cell_ptr[k + 1]; ++q)
        if (fx.cell_inc_gid[q] == gid) {
          flux = fx.cell_inc_flux[q];
          break;
        }
      fx.facecell.push_back(k);
      fx.facecell_flux.push_back(flux);
    }
    fx.facecell_ptr[fi + 1] = static_cast<int>(fx.facecell.size());
  }

  fx.node_is_outflow.assign(nn, 0);
  for (int s : mesh.boundary_nodes) {
    bool out = true;
    for (int p = fx.node_cell_ptr[s]; p < fx.node_cell_ptr[s + 1]; ++p)
      if (fx.node_cell_flux[p] < 0.0) out = false;
    for (int p = fx.node_face_ptr[s]; p < fx.node_face_ptr[s + 1]; ++p)
      if (fx.node_face_flux[p] < 0.0) out = false;
    fx.node_is_outflow[s] = out ? 1 : 0;
  }
  return fx;
}

double cfl_timestep(const Mesh& mesh, const DofLayout& layout, const FluxField& fx,
                    const ControlVolumes& cv, const std::vector<SourceTerm>& sources) {
  std::vector<double> src_out(layout.size(), 0.0);
  for (const auto& s : sources)
    if (s.q < 0.0) src_out[s.gid] += -s.q;

  const double inf = std::numeric_limits<double>::infinity();
  double dt = inf;
  const int nc = mesh.n_cells();
  const int nn = mesh.n_nodes();
  for (int k = 0; k < nc; ++k) {
    double out = src_out[k];
    for (int p = fx.cell_ptr[k]; p < fx.cell_ptr[k + 1]; ++p)
      out += std::max(fx.cell_inc_flux[p], 0.0);
    if (out > 0.0) dt = std::min(dt, cv.phi_cell[k] / out);
  }
  for (int fi = 0; fi < mesh.n_fracture_faces(); ++fi) {
    double out = src_out[nc + nn + fi];
    for (int p = fx.face_ptr[fi]; p < fx.face_ptr[fi + 1]; ++p)
      out += std::max(fx.face_inc_flux[p], 0.0);
    for (int p = fx.facecell_ptr[fi]; p < fx.facecell_ptr[fi + 1]; ++p)
      out += std::max(-fx.facecell_flux[p], 0.0);
    if (out > 0.0) dt = std::min(dt, cv.phi_face[fi] / out);
  }
  for (int s = 0; s < nn; ++s) {
    if (mesh.node_on_boundary[s]) continue;
    double out = src_out[layout.node_gid(s)];
    for (int p = fx.node_cell_ptr[s]; p < fx.node_cell_ptr[s + 1]; ++p)
      out += std::max(-fx.node_cell_flux[p], 0.0);
    for (int p = fx.node_face_ptr[s]; p < fx.node_face_ptr[s + 1]; ++p)
      out += std::max(-fx.node_face_flux[p], 0.0);
    if (out > 0.0) dt = std::min(dt, cv.phi_node[s] / out);
  }
  if (dt == inf) throw std::runtime_error("no flow: CFL time step is unbounded");
  return dt;
}

void transport_step(DofVector& c, double dt, double t, const Mesh& mesh, const DofLayout& layout,
                    const FluxField& fx, const ControlVolumes& cv,
                    const std::function<double(int, double)>& cbar,
                    const std::vector<SourceTerm>& sources, std::vector<double>& residual) {
  const int nc = mesh.n_cells();
  const int nn = mesh.n_nodes();
  const int nf = mesh.n_fracture_faces();
  residual.assign(layout.size(), 0.0);

  for (int k = 0; k < nc; ++k) {
    const double ck = c[k];
    double acc = 0.0;
    for (int p = fx.cell_ptr[k]; p < fx.cell_ptr[k + 1]; ++p) {
      const double f = fx.cell_inc_flux[p];
      acc += f >= 0.0 ? ck * f : c[fx.cell_inc_gid[p]] * f;
    }
    residual[k] = acc;
  }
  for (int fi = 0; fi < nf; ++fi) {
    const double cf = c[nc + nn + fi];
    double acc = 0.0;
    for (int p = fx.face_ptr[fi]; p < fx.face_ptr[fi + 1]; ++p) {
      const double f = fx.face_inc_flux[p];
      acc += f >= 0.0 ? cf * f : c[nc + fx.face_inc_node[p]] * f;
    }
    for (int p = fx.facecell_ptr[fi]; p < fx.facecell_ptr[fi + 1]; ++p) {
      const double f = fx.facecell_flux[p];
      acc -= f >= 0.0 ? c[fx.facecell[p]] * f : cf * f;
    }
    residual[nc + nn + fi] = acc;
  }
  for (int s = 0; s < nn; ++s) {
    if (mesh.node_on_boundary[s]) continue;
    const double cs = c[nc + s];
    double acc = 0.0;
    for (int p = fx.node_cell_ptr[s]; p < fx.node_cell_ptr[s + 1]; ++p) {
      const double f = fx.node_cell_flux[p];
      acc -= f >= 0.0 ? c[fx.node_cell[p]] * f : cs * f;
    }
    for (int p = fx.node_face_ptr[s]; p < fx.node_face_ptr[s + 1]; ++p) {
      const double f = fx.node_face_flux[p];
      acc -= f >= 0.0 ? c[nc + nn + fx.node_face[p]] * f : cs * f;
    }
    residual[nc + s] = acc;
  }
  for (const auto& src : sources)
    residual[src.gid] -= src.q > 0.0 ? src.q * src.c_in : src.q * c[src.gid];

  for (int k = 0; k < nc; ++k) c[k] -= dt / cv.phi_cell[k] * residual[k];
  for (int fi = 0; fi < nf; ++fi) c[nc + nn + fi] -= dt / cv.phi_face[fi] * residual[nc + nn + fi];
  for (int s = 0; s < nn; ++s)
    if (!mesh.node_on_boundary[s]) c[nc + s] -= dt / cv.phi_node[s] * residual[nc + s];
  for (int s : mesh.boundary_nodes) c[nc + s] = eval_cbar(cbar, s, t + dt);
}

TracerVolumes tracer_volumes(const DofVector& c, double t, const Mesh& mesh, const Adjacency& adj,
                             const DofLayout& layout, const ControlVolumes& cv) {
  TracerVolumes tv;
  tv.t = t;
  const int nc = mesh.n_cells();
  const int nn = mesh.n_nodes();
  for (int k = 0; k < nc; ++k) tv.matrix += cv.phi_cell[k] * c[k];
  for (int fi = 0; fi < mesh.n_fracture_faces(); ++fi)
    tv.fracture += cv.phi_face[fi] * c[nc + nn + fi];
  for (int s = 0; s < nn; ++s) {
    if (mesh.node_on_boundary[s]) continue;
    (adj.node_on_fracture[s] ? tv.fracture : tv.matrix) += cv.phi_node[s] * c[nc + s];
  }
  return tv;
}

DofVector initial_state(const Mesh& mesh, const DofLayout& layout,
                        const std::function<double(int, double)>& cbar) {
  DofVector c(layout.size(), 0.0);
  for (int s : mesh.boundary_nodes) c[layout.node_gid(s)] = eval_cbar(cbar, s, 0.0);
  return c;
}

TransportResult run_transport(const Mesh& mesh, const Adjacency& adj, const DofLayout& layout,
                              const FluxField& fx, const ControlVolumes& cv,
                              const std::function<double(int, double)>& cbar, const DofVector& c0,
                              const TransportOptions& options,
                              const std::function<void(double, const DofVector&)>& on_snapshot) {
  if (!(options.t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  if (!(options.cfl_safety > 0.0 && options.cfl_safety <= 1.0))
    throw std::invalid_argument("cfl_safety must lie in (0, 1]");

  TransportResult res;
  res.c = c0;
  const double T = options.t_end;
  const double dt = options.cfl_safety * cfl_timestep(mesh, layout, fx, cv, options.sources);
  const int N = std::max(1, static_cast<int>(std::ceil(T / dt)));
  res.dt = dt;

  std::vector<double> scratch;
  size_t snap = 0;
  if (options.series_stride > 0)
    res.series.push_back(tracer_volumes(res.c, 0.0, mesh, adj, layout, cv));
  for (int n = 0; n < N; ++n) {
    const double t = n * dt;
    const double dtn = (n == N - 1) ? T - (N - 1) * dt : dt;
    transport_step(res.c, dtn, t, mesh, layout, fx, cv, cbar, options.sources, scratch);
    const double t_next = (n == N - 1) ? T : (n + 1) * dt;
    if (options.series_stride > 0 && ((n + 1) % options.series_stride == 0 || n == N - 1))
      res.series.push_back(tracer_volumes(res.c, t_next, mesh, adj, layout, cv));
    if (on_snapshot)
      while (snap < options.snapshot_times.size() &&
             options.snapshot_times[snap] <= t_next * (1.0 + 1e-12)) {
        on_snapshot(t_next, res.c);
        ++snap;
      }
  }
  res.t = T;
  res.steps = N;
  return res;
}

TransportResult run_until_stationary(const Mesh& mesh, const Adjacency& adj,
                                     const DofLayout& layout, const FluxField& fx,
                                     const ControlVolumes& cv,
                                     const std::function<double(int, double)>& cbar,
                                     const DofVector& c0, double tol, double t_cap,
                                     double cfl_safety) {
  TransportResult res;
  res.c = c0;
  const double dt = cfl_safety * cfl_timestep(mesh, layout, fx, cv);
  res.dt = dt;
  std::vector<double> scratch;
  DofVector prev;
  double t = 0.0;
  while (t < t_cap) {
    prev = res.c;
    transport_step(res.c, dt, t, mesh, layout, fx, cv, cbar, {}, scratch);
    t += dt;
    ++res.steps;
    double diff = 0.0;
    for (size_t i = 0; i < prev.size(); ++i) diff = std::max(diff, std::abs(res.c[i] - prev[i]));
    if (diff / dt < tol) break;
  }
  res.t = t;
  return res;
}

}  // namespace dfn
