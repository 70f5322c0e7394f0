#ifndef DFN_TRANSPORT_HPP
#define DFN_TRANSPORT_HPP

#include <functional>
#include <vector>

#include "dfn/darcy.hpp"
#include "dfn/dof.hpp"
#include "dfn/mesh.hpp"
#include "dfn/vag.hpp"

namespace dfn {

/// Volume fractions redistributing pore volume from cells to their interior
/// non-fracture nodes and from fracture faces to their interior nodes. Only
/// donors of maximal permeability magnitude around a node take part.
struct VolumeFractions {
  // per cell: (node, alpha_{K,s}) for the nodes this cell donates to
  std::vector<std::vector<std::pair<int, double>>> cell_alpha;
  // per fracture-face index: (node, alpha_{sigma,s})
  std::vector<std::vector<std::pair<int, double>>> face_alpha;
};

VolumeFractions compute_volume_fractions(const Mesh& mesh, const Adjacency& adj,
                                         const MatrixProperties& matrix,
                                         const FractureProperties& fractures, double omega_m,
                                         double omega_f);

/// Pore volumes of the control volumes. phi_node is zero on boundary nodes
/// (they carry Dirichlet tracer data, not a balance equation).
struct ControlVolumes {
  std::vector<double> phi_cell;   // per cell
  std::vector<double> phi_face;   // per fracture-face index
  std::vector<double> phi_node;   // per node
  std::vector<double> d_f_sigma;  // mean width per fracture-face index

  double total() const;
};

ControlVolumes compute_porous_volumes(const Mesh& mesh, const Adjacency& adj,
                                      const VolumeFractions& vf, const MatrixProperties& matrix,
                                      const FractureProperties& fractures);

/// Darcy fluxes frozen at the pressure solution, stored both per equation
/// owner (cells, fracture faces) and transposed (per node, per face-from-cell)
/// so every balance is a gather with a fixed incidence order. This makes the
/// explicit step bitwise independent of how dofs are distributed.
struct FluxField {
  // forward: per cell, F_{K,nu} over cell_trans.dofs[K] order
  std::vector<int> cell_ptr;
  std::vector<int> cell_inc_gid;
  std::vector<double> cell_inc_flux;
  // per fracture-face index, F_{sigma,s} over face_trans.dofs order
  std::vector<int> face_ptr;
  std::vector<int> face_inc_node;
  std::vector<double> face_inc_flux;
  // transpose: per node, incident cells (ascending) with F_{K,s}
  std::vector<int> node_cell_ptr;
  std::vector<int> node_cell;
  std::vector<double> node_cell_flux;
  // per node, incident fracture faces (ascending face id) with F_{sigma,s}
  std::vector<int> node_face_ptr;
  std::vector<int> node_face;  // fracture-face indices
  std::vector<double> node_face_flux;
  // per fracture-face index, cells of M_sigma (ascending) with F_{K,sigma}
  std::vector<int> facecell_ptr;
  std::vector<int> facecell;
  std::vector<double> facecell_flux;

  std::vector<char> node_is_outflow;  // V_ext^+ membership (boundary nodes)
};

FluxField compute_fluxes(const Mesh& mesh, const Adjacency& adj, const DofLayout& layout,
                         const CellTransmissibilities& ct, const FaceTransmissibilities& ft,
                         const DofVector& pressure);

/// Point source attached to a dof: q > 0 injects at concentration c_in,
/// q < 0 produces at the local concentration.
struct SourceTerm {
  int gid = -1;
  double q = 0.0;
  double c_in = 0.0;
};

/// Largest time step keeping the explicit upwind scheme monotone.
double cfl_timestep(const Mesh& mesh, const DofLayout& layout, const FluxField& fx,
                    const ControlVolumes& cv, const std::vector<SourceTerm>& sources = {});

/// One explicit upwind step from time t to t + dt; c is a DofVector over X_D
/// and is updated in place. Boundary nodes are set to cbar(s, t + dt).
void transport_step(DofVector& c, double dt, double t, const Mesh& mesh, const DofLayout& layout,
                    const FluxField& fx, const ControlVolumes& cv,
                    const std::function<double(int, double)>& cbar,
                    const std::vector<SourceTerm>& sources, std::vector<double>& residual);

struct TransportOptions {
  double t_end = 1.0;
  double cfl_safety = 1.0;
  std::vector<double> snapshot_times;  // ascending
  int series_stride = 0;               // record tracer volumes every n steps (0: ends only)
  std::vector<SourceTerm> sources;
};

struct TracerVolumes {
  double t = 0.0;
  double matrix = 0.0;
  double fracture = 0.0;
};

struct TransportResult {
  DofVector c;
  double t = 0.0;
  int steps = 0;
  double dt = 0.0;  // uniform step used (before the shortened final step)
  std::vector<TracerVolumes> series;
};

/// Pore-volume-weighted tracer content split by medium.
TracerVolumes tracer_volumes(const DofVector& c, double t, const Mesh& mesh, const Adjacency& adj,
                             const DofLayout& layout, const ControlVolumes& cv);

/// N = ceil(T / dt) uniform steps, the last one shortened to land on T
/// exactly. `on_snapshot` fires at the first step end time reaching each
/// configured snapshot time.
TransportResult run_transport(const Mesh& mesh, const Adjacency& adj, const DofLayout& layout,
                              const FluxField& fx, const ControlVolumes& cv,
                              const std::function<double(int, double)>& cbar, const DofVector& c0,
                              const TransportOptions& options,
                              const std::function<void(double, const DofVector&)>& on_snapshot = {});

/// Marches with the CFL step until max |c^{n+1} - c^n| / dt < tol, capped at
/// t_cap. Returns the stationary state.
TransportResult run_until_stationary(const Mesh& mesh, const Adjacency& adj,
                                     const DofLayout& layout, const FluxField& fx,
                                     const ControlVolumes& cv,
                                     const std::function<double(int, double)>& cbar,
                                     const DofVector& c0, double tol = 1e-8, double t_cap = 20.0,
                                     double cfl_safety = 1.0);

/// Initial state: zero everywhere except boundary nodes at cbar(s, 0).
DofVector initial_state(const Mesh& mesh, const DofLayout& layout,
                        const std::function<double(int, double)>& cbar);

}  // namespace dfn

#endif
