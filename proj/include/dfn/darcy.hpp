#ifndef DFN_DARCY_HPP
#define DFN_DARCY_HPP

#include <functional>
#include <utility>
#include <vector>

#include "dfn/dof.hpp"
#include "dfn/krylov.hpp"
#include "dfn/mesh.hpp"
#include "dfn/sparse.hpp"
#include "dfn/vag.hpp"

namespace dfn {

/// Dirichlet pressure data on boundary nodes; the rest of the boundary is
/// zero-flux. Tracer boundary values are a function of (node, time) so the
/// verification cases can impose their exact traces.
struct BoundaryConditions {
  std::vector<int> dirichlet_nodes;  // ascending node ids, subset of V_ext
  std::vector<double> dirichlet_values;
  std::function<double(int node, double t)> tracer_boundary;  // optional; default 0

  bool is_empty() const { return dirichlet_nodes.empty(); }
  void validate(const Mesh& mesh) const;
};

/// Rectangular block system over node + fracture-face rows (a subset, in the
/// SPMD path) and cell rows. Columns are kept as global vf indices (nodes
/// [0, n_nodes), then fracture faces) until the Schur complement is formed.
/// Dirichlet rows are identity with the datum on the right-hand side;
/// Dirichlet columns are eliminated symmetrically into the right-hand sides.
struct BlockSystem {
  int n_vf_global = 0;
  std::vector<int> vf_gid_of_row;  // ascending global vf ids of assembled rows
  RowAccumulator vf_acc{0, 0};     // local rows, global vf columns
  std::vector<double> b_vf;
  std::vector<char> row_is_dirichlet;

  std::vector<int> cells;  // ascending cell ids covered by this system
  std::vector<double> cell_diag;  // A_cc (diagonal)
  std::vector<double> b_c;
  std::vector<std::vector<std::pair<int, double>>> cell_cols;  // A_{c,vf} rows, global cols
};

/// Node + fracture-face system after cell elimination, with the data needed
/// to recover the cell unknowns.
struct SchurSystem {
  std::vector<int> vf_gid_of_row;
  CsrMatrix a;                  // columns indexed by col_gids
  std::vector<int> col_gids;    // global vf id of each matrix column
  std::vector<double> b;
  std::vector<char> row_is_dirichlet;

  std::vector<int> cells;
  std::vector<double> cell_diag;
  std::vector<double> b_c;
  std::vector<std::vector<std::pair<int, double>>> cell_cols;  // local column ids
};

struct DarcyProblem {
  const Mesh& mesh;
  const Adjacency& adj;
  const DofLayout& layout;
  const CellTransmissibilities& cell_trans;
  const FaceTransmissibilities& face_trans;
  const BoundaryConditions& bc;
};

/// Assembles the discrete conservation system: cell rows, fracture-face rows,
/// interior-node rows, Dirichlet node rows. `allow_no_dirichlet` suppresses
/// the singularity check when wells will regularize the system.
BlockSystem assemble_darcy(const DarcyProblem& problem, bool allow_no_dirichlet = false);

/// Row-subset assembly used by the SPMD engine: assembles the vf rows listed
/// in `vf_rows` (ascending global vf ids) from the given cells and fracture
/// faces (both ascending). The contribution order per coefficient matches the
/// sequential path, so identical rows are produced bit for bit.
BlockSystem assemble_darcy_rows(const DarcyProblem& problem, const std::vector<int>& cells,
                                const std::vector<int>& frac_faces,
                                const std::vector<int>& vf_rows);

/// Eliminates the cell unknowns. `col_of_gid` maps global vf column ids to
/// matrix columns (identity in the sequential path); `col_gids` is its
/// inverse enumeration.
SchurSystem schur_eliminate(const BlockSystem& block, const std::vector<int>& col_gids,
                            const std::vector<int>& col_of_gid);

/// Sequential convenience: full row set, identity column map.
SchurSystem schur_eliminate(const BlockSystem& block);

/// Solves the Schur system (sequential path). Returns the node+face solution
/// in global vf ordering together with solver statistics.
std::pair<std::vector<double>, SolveStats> solve(const SchurSystem& schur,
                                                 const SolverConfig& config);

/// Recovers cell values: U_c = A_cc^{-1} (b_c - A_{c,vf} U_vf). `vf` is
/// indexed like the Schur columns. Returns values per local cell.
std::vector<double> back_substitute(const SchurSystem& schur, const std::vector<double>& vf);

/// Sequential driver: assemble, eliminate, solve, back-substitute into a full
/// DofVector over X_D.
struct DarcySolution {
  DofVector pressure;
  SolveStats stats;
};
DarcySolution solve_darcy(const DarcyProblem& problem, const SolverConfig& config);

/// Coordinate-format text export (row col value per line) for verification.
void write_matrix_market(const CsrMatrix& a, const std::string& path);

}  // namespace dfn

#endif
