#include "dfn/scenario.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dfn/mesh_io.hpp"

namespace dfn {

namespace {

using json = nlohmann::ordered_json;

constexpr double kEdgeTol = 1e-12;

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) known = true;
    if (!known) throw std::runtime_error("config: unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_if(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

std::string method_to_string(SolverConfig::Method m) {
  switch (m) {
    case SolverConfig::Method::CG: return "cg";
    case SolverConfig::Method::GMRES: return "gmres";
    case SolverConfig::Method::BiCGStab: return "bicgstab";
  }
  return "cg";
}

std::string precond_to_string(SolverConfig::Precond p) {
  switch (p) {
    case SolverConfig::Precond::None: return "none";
    case SolverConfig::Precond::Jacobi: return "jacobi";
    case SolverConfig::Precond::ILU0: return "ilu0";
  }
  return "jacobi";
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }
  check_keys(root, origin,
             {"schema_version", "scenario", "mesh", "physics", "boundary", "wells", "solver",
              "transport", "parallel", "output"});
  if (!root.contains("schema_version"))
    throw std::runtime_error(origin + ": missing schema_version");
  if (root.at("schema_version").get<int>() != schema)
    throw std::runtime_error(origin + ": unsupported schema_version (expected " +
                             std::to_string(schema) + ")");

  RunConfig cfg;
  read_if(root, "scenario", cfg.scenario);

  if (root.contains("mesh")) {
    const json& m = root.at("mesh");
    check_keys(m, "mesh",
               {"n_x", "stretch", "tan_theta", "tan_theta1", "tan_theta2", "planes", "file"});
    read_if(m, "n_x", cfg.n_x);
    read_if(m, "stretch", cfg.stretch);
    read_if(m, "tan_theta", cfg.tan_theta);
    read_if(m, "tan_theta1", cfg.tan_theta1);
    read_if(m, "tan_theta2", cfg.tan_theta2);
    read_if(m, "file", cfg.mesh_file);
    if (m.contains("planes")) {
      cfg.planes.clear();
      for (const json& p : m.at("planes")) {
        check_keys(p, "mesh.planes", {"axis", "coord"});
        AxisPlane pl;
        read_if(p, "axis", pl.axis);
        read_if(p, "coord", pl.coord);
        cfg.planes.push_back(pl);
      }
    }
  }

  if (root.contains("physics")) {
    const json& p = root.at("physics");
    check_keys(p, "physics", {"lambda_m", "lambda_f", "d_f", "phi_m", "phi_f", "mu"});
    read_if(p, "lambda_m", cfg.lambda_m);
    if (p.contains("lambda_f")) {
      cfg.lambda_f.clear();
      if (p.at("lambda_f").is_array())
        cfg.lambda_f = p.at("lambda_f").get<std::vector<double>>();
      else
        cfg.lambda_f.push_back(p.at("lambda_f").get<double>());
    }
    read_if(p, "d_f", cfg.d_f);
    read_if(p, "phi_m", cfg.phi_m);
    read_if(p, "phi_f", cfg.phi_f);
    read_if(p, "mu", cfg.mu);
  }

  if (root.contains("boundary")) {
    const json& b = root.at("boundary");
    check_keys(b, "boundary", {"pressure", "tracer_inflow"});
    read_if(b, "pressure", cfg.pressure_bc);
    read_if(b, "tracer_inflow", cfg.tracer_inflow);
  }

  if (root.contains("wells")) {
    for (const json& w : root.at("wells")) {
      check_keys(w, "wells", {"kind", "p_w", "rate", "r_w", "c_in", "perforations"});
      Well well;
      std::string kind = "pressure";
      read_if(w, "kind", kind);
      if (kind == "pressure")
        well.kind = Well::Kind::Pressure;
      else if (kind == "rate")
        well.kind = Well::Kind::Rate;
      else
        throw std::runtime_error("config: well kind must be 'pressure' or 'rate'");
      read_if(w, "p_w", well.p_w);
      read_if(w, "rate", well.rate);
      read_if(w, "r_w", well.r_w);
      read_if(w, "c_in", well.c_in);
      if (w.contains("perforations"))
        for (const json& p : w.at("perforations")) {
          check_keys(p, "wells.perforations", {"face", "dx", "dz"});
          Perforation perf;
          read_if(p, "face", perf.face);
          read_if(p, "dx", perf.dx);
          read_if(p, "dz", perf.dz);
          well.perforations.push_back(perf);
        }
      cfg.wells.push_back(well);
    }
  }

  if (root.contains("solver")) {
    const json& s = root.at("solver");
    check_keys(s, "solver", {"method", "precond", "tolerance", "max_iterations"});
    if (s.contains("method"))
      cfg.solver.method = SolverConfig::method_from_string(s.at("method").get<std::string>());
    if (s.contains("precond"))
      cfg.solver.precond = SolverConfig::precond_from_string(s.at("precond").get<std::string>());
    read_if(s, "tolerance", cfg.solver.tolerance);
    read_if(s, "max_iterations", cfg.solver.max_iterations);
  }

  if (root.contains("transport")) {
    const json& t = root.at("transport");
    check_keys(t, "transport",
               {"t_end", "cfl_safety", "omega_m", "omega_f", "snapshot_times", "series_stride"});
    read_if(t, "t_end", cfg.t_end);
    read_if(t, "cfl_safety", cfg.cfl_safety);
    read_if(t, "omega_m", cfg.omega_m);
    read_if(t, "omega_f", cfg.omega_f);
    read_if(t, "snapshot_times", cfg.snapshot_times);
    read_if(t, "series_stride", cfg.series_stride);
  }

  if (root.contains("parallel")) {
    const json& p = root.at("parallel");
    check_keys(p, "parallel", {"np", "deterministic_reduction"});
    read_if(p, "np", cfg.np);
    read_if(p, "deterministic_reduction", cfg.deterministic_reduction);
  }

  if (root.contains("output")) {
    const json& o = root.at("output");
    check_keys(o, "output", {"directory"});
    read_if(o, "directory", cfg.out_dir);
  }

  cfg.validate();
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str(), path);
}

void RunConfig::validate() const {
  const std::set<std::string> scenarios = {"single_fracture", "four_fractures", "hex3d",
                                           "from_mesh_file"};
  if (!scenarios.count(scenario)) throw std::runtime_error("config: unknown scenario " + scenario);
  if (scenario == "from_mesh_file" && mesh_file.empty())
    throw std::runtime_error("config: scenario from_mesh_file requires mesh.file");
  if (scenario != "from_mesh_file" && n_x <= 0)
    throw std::runtime_error("config: n_x must be positive");
  if (pressure_bc != "linear_x" && pressure_bc != "bottom_top")
    throw std::runtime_error("config: boundary.pressure must be linear_x or bottom_top");
  if (!(lambda_m > 0.0) || !(d_f > 0.0) || !(mu > 0.0) || !(stretch > 0.0))
    throw std::runtime_error("config: physical parameters must be positive");
  if (lambda_f.empty()) throw std::runtime_error("config: lambda_f must not be empty");
  for (double v : lambda_f)
    if (!(v > 0.0)) throw std::runtime_error("config: lambda_f must be positive");
  if (!(phi_m > 0.0 && phi_m <= 1.0) || !(phi_f > 0.0 && phi_f <= 1.0))
    throw std::runtime_error("config: porosities must lie in (0, 1]");
  if (!(t_end > 0.0)) throw std::runtime_error("config: t_end must be positive");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
    throw std::runtime_error("config: cfl_safety must lie in (0, 1]");
  if (!(omega_m >= 0.0 && omega_m < 1.0) || !(omega_f >= 0.0 && omega_f < 1.0))
    throw std::runtime_error("config: omega must lie in [0, 1)");
  for (size_t i = 0; i < snapshot_times.size(); ++i) {
    if (snapshot_times[i] < 0.0 || snapshot_times[i] > t_end)
      throw std::runtime_error("config: snapshot times must lie in [0, t_end]");
    if (i > 0 && snapshot_times[i] <= snapshot_times[i - 1])
      throw std::runtime_error("config: snapshot times must be ascending");
  }
  if (series_stride < 0) throw std::runtime_error("config: series_stride must be nonnegative");
  if (np < 1) throw std::runtime_error("config: np must be at least 1");
}

std::string RunConfig::echo_json() const {
  json root;
  root["schema_version"] = schema;
  root["scenario"] = scenario;
  json m;
  m["n_x"] = n_x;
  m["stretch"] = stretch;
  m["tan_theta"] = tan_theta;
  m["tan_theta1"] = tan_theta1;
  m["tan_theta2"] = tan_theta2;
  m["planes"] = json::array();
  for (const AxisPlane& p : planes) m["planes"].push_back({{"axis", p.axis}, {"coord", p.coord}});
  m["file"] = mesh_file;
  root["mesh"] = m;
  root["physics"] = {{"lambda_m", lambda_m}, {"lambda_f", lambda_f}, {"d_f", d_f},
                     {"phi_m", phi_m},       {"phi_f", phi_f},       {"mu", mu}};
  root["boundary"] = {{"pressure", pressure_bc}, {"tracer_inflow", tracer_inflow}};
  root["wells"] = json::array();
  for (const Well& w : wells) {
    json jw;
    jw["kind"] = w.kind == Well::Kind::Pressure ? "pressure" : "rate";
    jw["p_w"] = w.p_w;
    jw["rate"] = w.rate;
    jw["r_w"] = w.r_w;
    jw["c_in"] = w.c_in;
    jw["perforations"] = json::array();
    for (const Perforation& p : w.perforations)
      jw["perforations"].push_back({{"face", p.face}, {"dx", p.dx}, {"dz", p.dz}});
    root["wells"].push_back(jw);
  }
  root["solver"] = {{"method", method_to_string(solver.method)},
                    {"precond", precond_to_string(solver.precond)},
                    {"tolerance", solver.tolerance},
                    {"max_iterations", solver.max_iterations}};
  root["transport"] = {{"t_end", t_end},     {"cfl_safety", cfl_safety},
                       {"omega_m", omega_m}, {"omega_f", omega_f},
                       {"snapshot_times", snapshot_times}, {"series_stride", series_stride}};
  root["parallel"] = {{"np", np}, {"deterministic_reduction", deterministic_reduction}};
  root["output"] = {{"directory", out_dir}};
  return root.dump(2);
}

Scenario build_scenario(const RunConfig& cfg) { return build_scenario(cfg, cfg.n_x); }

Scenario build_scenario(const RunConfig& cfg, int n_x) {
  cfg.validate();
  Mesh mesh;
  if (cfg.scenario == "single_fracture")
    mesh = build_single_fracture_mesh_2d(n_x, cfg.tan_theta);
  else if (cfg.scenario == "four_fractures")
    mesh = build_four_fracture_mesh_2d(n_x, cfg.tan_theta1, cfg.tan_theta2);
  else if (cfg.scenario == "hex3d")
    mesh = build_hex_mesh_3d(n_x, cfg.planes, cfg.stretch);
  else
    mesh = read_mesh(cfg.mesh_file);

  MatrixProperties mp = MatrixProperties::uniform(mesh.n_cells(), cfg.lambda_m, cfg.phi_m);
  FractureProperties fp =
      FractureProperties::uniform(mesh.n_fractures(), cfg.d_f, cfg.lambda_f[0], cfg.phi_f);
  if (cfg.lambda_f.size() > 1) {
    if (int(cfg.lambda_f.size()) != mesh.n_fractures())
      throw std::runtime_error("config: lambda_f must have one value or one per fracture");
    for (int i = 0; i < mesh.n_fractures(); ++i)
      fp.permeability[i] = Tensor::isotropic(cfg.lambda_f[i]);
  }

  Submesh sub = build_submesh(mesh);
  DofLayout layout(mesh);
  Adjacency adj(mesh);
  CellTransmissibilities ct = assemble_cell_transmissibilities(mesh, sub, mp, cfg.mu, layout);
  FaceTransmissibilities ft = assemble_face_transmissibilities(mesh, fp, cfg.mu, layout);

  BoundaryConditions bc;
  const int up_axis = mesh.dim == 3 ? 2 : 1;
  for (int s : mesh.boundary_nodes) {
    const Vec3& x = mesh.nodes[s];
    if (cfg.pressure_bc == "linear_x") {
      bc.dirichlet_nodes.push_back(s);
      bc.dirichlet_values.push_back(1.0 - x[0]);
    } else if (x[up_axis] < kEdgeTol) {
      bc.dirichlet_nodes.push_back(s);
      bc.dirichlet_values.push_back(1.0);
    } else if (x[up_axis] > 1.0 - kEdgeTol) {
      bc.dirichlet_nodes.push_back(s);
      bc.dirichlet_values.push_back(0.0);
    }
  }

  // tracer inlet: the upstream boundary; the four-fracture case injects
  // through the fracture tips only (x = 0 and y = 1 fracture ends)
  std::vector<char> inflow(mesh.n_nodes(), 0);
  for (int s : mesh.boundary_nodes) {
    const Vec3& x = mesh.nodes[s];
    if (cfg.scenario == "four_fractures")
      inflow[s] = adj.node_on_fracture[s] && (x[0] < kEdgeTol || x[1] > 1.0 - kEdgeTol);
    else if (cfg.pressure_bc == "linear_x")
      inflow[s] = x[0] < kEdgeTol;
    else
      inflow[s] = x[up_axis] < kEdgeTol;
  }
  const double c_in = cfg.tracer_inflow;
  auto cbar = [inflow, c_in](int s, double) { return inflow[s] ? c_in : 0.0; };

  return Scenario{std::move(mesh), std::move(sub),   std::move(layout), std::move(adj),
                  std::move(mp),   std::move(fp),    std::move(ct),     std::move(ft),
                  std::move(bc),   std::move(cbar)};
}

DofVector solve_pressure(const Scenario& sc, const RunConfig& cfg, SolveStats* stats,
                         std::vector<PartTimings>* timings) {
  const DarcyProblem pb = sc.problem();
  const auto wi = compute_well_indices(sc.mesh, sc.fractures, cfg.wells);

  if (cfg.np == 1) {
    using Clock = std::chrono::steady_clock;
    PartTimings tm;
    auto t0 = Clock::now();
    BlockSystem block = assemble_darcy(pb, !cfg.wells.empty());
    apply_wells(block, sc.layout, cfg.wells, wi);
    const SchurSystem schur = schur_eliminate(block);
    tm.assemble = std::chrono::duration<double>(Clock::now() - t0).count();

    t0 = Clock::now();
    auto [vf, st] = solve(schur, cfg.solver);
    tm.solve = std::chrono::duration<double>(Clock::now() - t0).count();

    t0 = Clock::now();
    const std::vector<double> uc = back_substitute(schur, vf);
    DofVector u(sc.layout.size());
    for (size_t kl = 0; kl < schur.cells.size(); ++kl) u[schur.cells[kl]] = uc[kl];
    for (int i = 0; i < sc.layout.n_vf(); ++i) u[sc.mesh.n_cells() + i] = vf[i];
    tm.update = std::chrono::duration<double>(Clock::now() - t0).count();
    if (stats) *stats = st;
    if (timings) *timings = {tm};
    return u;
  }

  const Partition part = partition_cells(sc.mesh, sc.adj, cfg.np);
  std::function<void(BlockSystem&, int)> hook;
  if (!cfg.wells.empty())
    hook = [&](BlockSystem& block, int) { apply_wells(block, sc.layout, cfg.wells, wi, true); };
  ParallelDarcyResult res =
      parallel_darcy_solve(pb, part, cfg.solver, cfg.deterministic_reduction, hook);
  if (stats) *stats = res.stats;
  if (timings) *timings = res.timings;
  return std::move(res.pressure);
}

namespace {

void write_series_csv(const std::string& path, const std::vector<TracerVolumes>& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << "t,matrix,fracture\n";
  for (const TracerVolumes& tv : series)
    out << tv.t << ',' << tv.matrix << ',' << tv.fracture << '\n';
}

void write_wells_csv(const std::string& path, const std::vector<std::vector<double>>& rates) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << "well,fluid_rate\n";
  for (size_t w = 0; w < rates.size(); ++w) {
    double q = 0.0;
    for (double v : rates[w]) q += v;
    out << w << ',' << q << '\n';
  }
}

void write_state_vtk(const std::string& path, const Mesh& mesh,
                     const std::vector<std::pair<std::string, const DofVector*>>& fields) {
  std::vector<VtkField> cell_fields, node_fields;
  for (const auto& [name, v] : fields) {
    VtkField fc{name, std::vector<double>(v->begin(), v->begin() + mesh.n_cells())};
    VtkField fn{name, std::vector<double>(v->begin() + mesh.n_cells(),
                                          v->begin() + mesh.n_cells() + mesh.n_nodes())};
    cell_fields.push_back(std::move(fc));
    node_fields.push_back(std::move(fn));
  }
  write_vtk(path, mesh, cell_fields, node_fields);
}

void write_fracture_state_vtk(const std::string& path, const Mesh& mesh, const DofLayout& layout,
                              const std::vector<std::pair<std::string, const DofVector*>>& fields) {
  std::vector<VtkField> face_fields;
  for (const auto& [name, v] : fields) {
    VtkField f{name, {}};
    for (int face : mesh.fracture_faces) f.values.push_back((*v)[layout.frac_gid_of_face(face)]);
    face_fields.push_back(std::move(f));
  }
  write_fracture_vtk(path, mesh, face_fields);
}

}  // namespace

RunSummary run_scenario(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const auto out = [&](const std::string& name) { return cfg.out_dir + "/" + name; };

  const Scenario sc = build_scenario(cfg);
  RunSummary summary;
  std::vector<PartTimings> timings;
  const DofVector u = solve_pressure(sc, cfg, &summary.darcy, &timings);

  const VolumeFractions vfr =
      compute_volume_fractions(sc.mesh, sc.adj, sc.matrix, sc.fractures, cfg.omega_m, cfg.omega_f);
  const ControlVolumes cv = compute_porous_volumes(sc.mesh, sc.adj, vfr, sc.matrix, sc.fractures);
  const FluxField fx = compute_fluxes(sc.mesh, sc.adj, sc.layout, sc.ct, sc.ft, u);

  std::vector<std::vector<double>> rates;
  TransportOptions opt;
  opt.t_end = cfg.t_end;
  opt.cfl_safety = cfg.cfl_safety;
  opt.series_stride = cfg.series_stride;
  if (!cfg.wells.empty()) {
    const auto wi = compute_well_indices(sc.mesh, sc.fractures, cfg.wells);
    rates = well_rates(sc.layout, cfg.wells, wi, u);
    opt.sources = well_sources(sc.layout, cfg.wells, rates);
  }

  const DofVector c0 = initial_state(sc.mesh, sc.layout, sc.cbar);
  int snap_index = 0;
  const auto snapshot_name = [&]() { return "snapshot_" + std::to_string(snap_index) + ".vtk"; };
  for (double t : cfg.snapshot_times) {
    if (t > 0.0) opt.snapshot_times.push_back(t);
  }
  if (!cfg.snapshot_times.empty() && cfg.snapshot_times.front() <= 0.0) {
    write_state_vtk(out(snapshot_name()), sc.mesh, {{"concentration", &c0}});
    summary.files.push_back(snapshot_name());
    ++snap_index;
  }

  TransportResult tr;
  if (cfg.np == 1) {
    const auto on_snapshot = [&](double, const DofVector& c) {
      write_state_vtk(out(snapshot_name()), sc.mesh, {{"concentration", &c}});
      summary.files.push_back(snapshot_name());
      ++snap_index;
    };
    tr = run_transport(sc.mesh, sc.adj, sc.layout, fx, cv, sc.cbar, c0, opt, on_snapshot);
  } else {
    // intermediate snapshots are a sequential-only feature
    const Partition part = partition_cells(sc.mesh, sc.adj, cfg.np);
    std::vector<PartTimings> ttm;
    tr = parallel_transport_run(sc.mesh, sc.adj, sc.layout, fx, cv, sc.cbar, c0, opt, part, &ttm);
    for (size_t p = 0; p < ttm.size() && p < timings.size(); ++p) {
      timings[p].exchange += ttm[p].exchange;
      timings[p].update += ttm[p].update;
    }
  }
  summary.transport_steps = tr.steps;
  summary.dt = tr.dt;
  summary.t_end = tr.t;

  write_state_vtk(out("solution.vtk"), sc.mesh,
                  {{"pressure", &u}, {"concentration", &tr.c}});
  summary.files.push_back("solution.vtk");
  if (sc.mesh.n_fracture_faces() > 0) {
    write_fracture_state_vtk(out("fracture.vtk"), sc.mesh, sc.layout,
                             {{"pressure", &u}, {"concentration", &tr.c}});
    summary.files.push_back("fracture.vtk");
  }
  if (!tr.series.empty()) {
    write_series_csv(out("series.csv"), tr.series);
    summary.files.push_back("series.csv");
  }
  if (!cfg.wells.empty()) {
    write_wells_csv(out("wells.csv"), rates);
    summary.files.push_back("wells.csv");
  }
  write_timings_csv(out("timings.csv"), timings);
  summary.files.push_back("timings.csv");

  json manifest;
  manifest["program"] = {{"name", "dfnsim"}, {"version", "1.0.0"}};
  manifest["config"] = json::parse(cfg.echo_json());
  manifest["results"] = {{"cells", sc.mesh.n_cells()},
                         {"nodes", sc.mesh.n_nodes()},
                         {"fracture_faces", sc.mesh.n_fracture_faces()},
                         {"darcy_iterations", summary.darcy.iterations},
                         {"darcy_residual", summary.darcy.residual},
                         {"transport_steps", summary.transport_steps},
                         {"dt", summary.dt}};
  json jt = json::array();
  for (const PartTimings& tm : timings)
    jt.push_back({{"assemble", tm.assemble},
                  {"solve", tm.solve},
                  {"exchange", tm.exchange},
                  {"update", tm.update}});
  manifest["timings"] = jt;
  manifest["files"] = summary.files;
  std::ofstream mf(out("manifest.json"));
  if (!mf) throw std::runtime_error("cannot open " + out("manifest.json"));
  mf << manifest.dump(2) << '\n';
  summary.files.push_back("manifest.json");
  return summary;
}

std::vector<ConvergenceRow> run_convergence(const RunConfig& cfg, const std::vector<int>& levels,
                                            const std::string& out_path) {
  if (levels.size() < 3)
    throw std::invalid_argument("convergence study needs at least 3 grid levels");
  if (cfg.scenario != "single_fracture" && cfg.scenario != "four_fractures")
    throw std::invalid_argument("convergence study requires a scenario with a closed form");

  const auto solve_level = [&](int n_x) {
    const Scenario sc = build_scenario(cfg, n_x);
    RunConfig seq = cfg;
    seq.np = 1;
    const DofVector u = solve_pressure(sc, seq);
    const VolumeFractions vfr = compute_volume_fractions(sc.mesh, sc.adj, sc.matrix, sc.fractures,
                                                         cfg.omega_m, cfg.omega_f);
    const ControlVolumes cv = compute_porous_volumes(sc.mesh, sc.adj, vfr, sc.matrix, sc.fractures);
    const FluxField fx = compute_fluxes(sc.mesh, sc.adj, sc.layout, sc.ct, sc.ft, u);
    const DofVector c0 = initial_state(sc.mesh, sc.layout, sc.cbar);

    if (cfg.scenario == "single_fracture") {
      SingleFractureCase an;
      an.tan_theta = cfg.tan_theta;
      an.lambda_f = cfg.lambda_f.front();
      an.d_f = cfg.d_f;
      an.validate();
      TransportOptions opt;
      opt.t_end = cfg.t_end;
      opt.cfl_safety = cfg.cfl_safety;
      const TransportResult tr =
          run_transport(sc.mesh, sc.adj, sc.layout, fx, cv, sc.cbar, c0, opt);
      return l1_error(
          tr.c, sc.mesh, sc.layout, sc.fractures,
          [&](double x, double y) { return an.matrix(x, y, cfg.t_end); },
          [&](int, double x, double) { return an.fracture(x, cfg.t_end); });
    }

    FourFractureCase an;
    an.tan_theta1 = cfg.tan_theta1;
    an.tan_theta2 = cfg.tan_theta2;
    an.lambda_f1 = cfg.lambda_f.front();
    an.lambda_f3 = cfg.lambda_f.size() > 2 ? cfg.lambda_f[2] : cfg.lambda_f.back();
    an.d_f1 = cfg.d_f;
    an.d_f3 = cfg.d_f;
    an.validate();
    const TransportResult tr =
        run_until_stationary(sc.mesh, sc.adj, sc.layout, fx, cv, sc.cbar, c0, 1e-9, 20.0,
                             cfg.cfl_safety);
    return l1_error(
        tr.c, sc.mesh, sc.layout, sc.fractures,
        [&](double x, double y) { return an.matrix(x, y); },
        [&](int id, double x, double y) { return an.fracture(id, x, y); });
  };

  const auto rows = convergence_table(levels, solve_level);
  write_convergence_csv(out_path, rows);
  return rows;
}

}  // namespace dfn
