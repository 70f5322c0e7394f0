#ifndef DFN_PARALLEL_HPP
#define DFN_PARALLEL_HPP

#include <functional>
#include <string>
#include <vector>

#include "dfn/darcy.hpp"
#include "dfn/transport.hpp"

namespace dfn {

/// Disjoint cell partition plus the derived node and fracture-face ownership:
/// a node or fracture face belongs to the part of the smallest-global-index
/// cell containing it.
struct Partition {
  int n_parts = 1;
  std::vector<int> part_of_cell;
  std::vector<std::vector<int>> cells_of_part;  // ascending cell ids
  std::vector<int> owner_of_node;
  std::vector<int> owner_of_frac;  // per fracture-face index
};

/// Recursive coordinate bisection on cell centres (widest bounding-box axis,
/// ties by cell id). Deterministic; parts are balanced within one cell for
/// power-of-two part counts.
Partition partition_cells(const Mesh& mesh, const Adjacency& adj, int n_parts);

/// One layer of overlap: all cells sharing a node with an own cell, and the
/// nodes and fracture faces those cells carry.
struct PartOverlap {
  std::vector<int> cells;       // ascending
  std::vector<int> nodes;       // ascending
  std::vector<int> frac_faces;  // ascending face ids
  std::vector<char> cell_is_own, node_is_own, face_is_own;  // parallel to the lists
};

struct OverlapPartition {
  std::vector<PartOverlap> parts;
};

OverlapPartition build_overlap(const Mesh& mesh, const Adjacency& adj, const Partition& part);

/// Ghost routing: local position in the part's overlap vf enumeration, the
/// owner part and the position inside the owner's own-row vector.
struct GhostRef {
  int local = -1;
  int owner = -1;
  int owner_local = -1;
};

/// Explicit form of the 0/1 synchronization matrix over node + fracture-face
/// unknowns (vf ids: nodes first, then fracture faces).
struct ExchangePlan {
  std::vector<std::vector<int>> own_rows;  // per part: own vf gids, ascending
  std::vector<std::vector<int>> vf_gids;   // per part: overlap vf gids, ascending
  std::vector<std::vector<int>> own_pos;   // position of each own row inside vf_gids
  std::vector<std::vector<GhostRef>> ghosts;
};

ExchangePlan build_exchange(const Mesh& mesh, const DofLayout& layout, const Partition& part,
                            const OverlapPartition& overlap);

/// Applies the plan to the concatenated owner vectors: returns each part's
/// overlap vf vector (own values in place, ghosts copied from their owner).
std::vector<std::vector<double>> apply_exchange(const ExchangePlan& plan,
                                                const std::vector<std::vector<double>>& own);

/// Wall-clock seconds spent per phase on one worker.
struct PartTimings {
  double assemble = 0.0;
  double solve = 0.0;
  double exchange = 0.0;
  double update = 0.0;
};

void write_timings_csv(const std::string& path, const std::vector<PartTimings>& timings);

struct ParallelDarcyResult {
  DofVector pressure;
  SolveStats stats;
  std::vector<PartTimings> timings;
};

/// Algorithm: local rectangular assembly over the overlap cells, local Schur
/// complement, distributed Krylov solve (rows owned per part), ghost
/// synchronization, local cell back-substitution. With
/// `deterministic_reduction` the global dots sum in ascending global dof
/// order, making the solve bit-identical to the sequential path; otherwise
/// partial sums reduce in part order. ILU(0) acts per part (block Jacobi).
/// `post_assemble` runs on each part's local system before elimination (wells
/// hook); it sees the part index.
ParallelDarcyResult parallel_darcy_solve(
    const DarcyProblem& problem, const Partition& part, const SolverConfig& config,
    bool deterministic_reduction = true,
    const std::function<void(BlockSystem&, int)>& post_assemble = {});

/// Explicit transport on the decomposed mesh: each worker updates its own
/// nodes and fracture faces and all its overlap cells from private local
/// state, then ghost node and face concentrations are pulled from their
/// owners; the time step is the min-reduction of the local CFL bounds.
/// The result is bit-identical to run_transport.
TransportResult parallel_transport_run(const Mesh& mesh, const Adjacency& adj,
                                       const DofLayout& layout, const FluxField& fx,
                                       const ControlVolumes& cv,
                                       const std::function<double(int, double)>& cbar,
                                       const DofVector& c0, const TransportOptions& options,
                                       const Partition& part,
                                       std::vector<PartTimings>* timings = nullptr);

}  // namespace dfn

#endif
