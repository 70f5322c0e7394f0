#ifndef DFN_SCENARIO_HPP
#define DFN_SCENARIO_HPP

#include <functional>
#include <string>
#include <vector>

#include "dfn/analytic.hpp"
#include "dfn/darcy.hpp"
#include "dfn/parallel.hpp"
#include "dfn/submesh.hpp"
#include "dfn/transport.hpp"
#include "dfn/wells.hpp"

namespace dfn {

/// Full description of one simulation run, read from a versioned JSON file.
/// Unknown keys are rejected so a typo cannot silently fall back to a default.
struct RunConfig {
  static constexpr int schema = 1;

  // scenario: single_fracture | four_fractures | hex3d | from_mesh_file
  std::string scenario = "single_fracture";

  // mesh
  int n_x = 100;
  double stretch = 1.0;
  double tan_theta = 0.5;
  double tan_theta1 = 0.625;
  double tan_theta2 = 0.25;
  std::vector<AxisPlane> planes;  // hex3d fracture planes
  std::string mesh_file;          // from_mesh_file

  // physics
  double lambda_m = 1.0;
  std::vector<double> lambda_f = {20.0};  // one value, or one per fracture id
  double d_f = 0.01;
  double phi_m = 1.0;
  double phi_f = 1.0;
  double mu = 1.0;

  // boundary: pressure profile and injected tracer concentration.
  //   linear_x:   u = 1 - x on the whole boundary, tracer enters at x = 0
  //   bottom_top: u = 1 at z = 0 and u = 0 at z = 1, lateral sides impervious,
  //               tracer enters at the bottom
  std::string pressure_bc = "linear_x";
  double tracer_inflow = 1.0;

  std::vector<Well> wells;
  SolverConfig solver;

  // transport
  double t_end = 0.5;
  double cfl_safety = 1.0;
  double omega_m = 0.1;
  double omega_f = 0.1;
  std::vector<double> snapshot_times;  // ascending, within [0, t_end]
  int series_stride = 0;

  // parallel
  int np = 1;
  bool deterministic_reduction = true;

  std::string out_dir = "out";

  static RunConfig from_file(const std::string& path);
  static RunConfig from_json_text(const std::string& text, const std::string& origin = "config");
  void validate() const;
  /// The parsed configuration as canonical JSON, echoed into the manifest.
  std::string echo_json() const;
};

/// The assembled pipeline of a scenario: mesh, properties, transmissibilities,
/// pressure boundary data and the tracer boundary function.
struct Scenario {
  Mesh mesh;
  Submesh sub;
  DofLayout layout;
  Adjacency adj;
  MatrixProperties matrix;
  FractureProperties fractures;
  CellTransmissibilities ct;
  FaceTransmissibilities ft;
  BoundaryConditions bc;
  std::function<double(int, double)> cbar;

  DarcyProblem problem() const { return {mesh, adj, layout, ct, ft, bc}; }
};

/// Builds the scenario at the configured grid size, or at an override used by
/// convergence studies.
Scenario build_scenario(const RunConfig& cfg);
Scenario build_scenario(const RunConfig& cfg, int n_x);

/// Pressure solve honouring wells and the parallel settings of the config.
DofVector solve_pressure(const Scenario& sc, const RunConfig& cfg, SolveStats* stats = nullptr,
                         std::vector<PartTimings>* timings = nullptr);

struct RunSummary {
  SolveStats darcy;
  int transport_steps = 0;
  double dt = 0.0;
  double t_end = 0.0;
  std::vector<std::string> files;  // artifacts written, relative to out_dir
};

/// End-to-end run: mesh, pressure, transport, artifacts (VTK fields, CSV
/// series, per-part timings, JSON manifest) under cfg.out_dir.
RunSummary run_scenario(const RunConfig& cfg);

/// Convergence study against the closed-form solution of the scenario
/// (single_fracture at t_end, four_fractures at the stationary state).
/// Requires at least three grid levels; writes the table to out_path.
std::vector<ConvergenceRow> run_convergence(const RunConfig& cfg, const std::vector<int>& levels,
                                            const std::string& out_path);

}  // namespace dfn

#endif
