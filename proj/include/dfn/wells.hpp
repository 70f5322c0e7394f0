#ifndef DFN_WELLS_HPP
#define DFN_WELLS_HPP

#include <string>
#include <vector>

#include "dfn/darcy.hpp"
#include "dfn/transport.hpp"

namespace dfn {

/// A perforated fracture face. dx and dz are the dimensions of the box the
/// face is expanded into for the Peaceman radius; they are inputs, not
/// inferred from the mesh.
struct Perforation {
  int face = -1;
  double dx = 0.0;
  double dz = 0.0;
};

/// Vertical well perforating fracture faces. Pressure control fixes the
/// bottom-hole pressure p_w; rate control prescribes the total volumetric
/// rate (positive injects), split across perforations proportionally to the
/// well indices.
struct Well {
  enum class Kind { Pressure, Rate };
  Kind kind = Kind::Pressure;
  double p_w = 0.0;
  double rate = 0.0;
  double r_w = 0.1;
  double c_in = 0.0;  // tracer concentration of injected fluid
  std::vector<Perforation> perforations;
};

/// Intermediates of the Peaceman chain, kept for inspection:
///   C  = (4/3)(dx dz / d_f + dx d_f / dz + dz d_f / dx)
///   D  = sqrt(dx^2 + d_f^2) / 2
///   r0 = D exp(-2 pi dz / C)
///   WI = 2 pi dz Lambda_f / log(r0 / r_w)
struct WellIndex {
  double C = 0.0;
  double D = 0.0;
  double r0 = 0.0;
  double wi = 0.0;
};

/// Throws std::invalid_argument on nonpositive inputs or r0 <= r_w (the log
/// would be nonpositive).
WellIndex well_index(double dx, double dz, double d_f, double lambda_f, double r_w);

/// Per-well, per-perforation indices. Validates that every perforation is a
/// fracture face.
std::vector<std::vector<WellIndex>> compute_well_indices(const Mesh& mesh,
                                                         const FractureProperties& fractures,
                                                         const std::vector<Well>& wells);

/// Folds the wells into the assembled flow system: pressure control adds
/// WI to the perforated face diagonal and WI p_w to its right-hand side;
/// rate control adds the distributed rate to the right-hand side only.
/// With skip_missing_rows, perforations whose face row is not part of the
/// (rectangular) system are ignored instead of rejected; this applies the
/// wells on a distributed system where each worker holds its own face rows.
void apply_wells(BlockSystem& block, const DofLayout& layout, const std::vector<Well>& wells,
                 const std::vector<std::vector<WellIndex>>& wi, bool skip_missing_rows = false);

/// Volumetric rate into the reservoir at each perforation, evaluated at the
/// pressure solution: WI (p_w - p_sigma) for pressure control, the WI-weighted
/// share of the prescribed rate otherwise.
std::vector<std::vector<double>> well_rates(const DofLayout& layout,
                                            const std::vector<Well>& wells,
                                            const std::vector<std::vector<WellIndex>>& wi,
                                            const DofVector& pressure);

/// Transport sources for the perforations (injection at c_in, production at
/// the local concentration), in well then perforation order.
std::vector<SourceTerm> well_sources(const DofLayout& layout, const std::vector<Well>& wells,
                                     const std::vector<std::vector<double>>& rates);

/// One time-series sample per well.
struct WellSample {
  double t = 0.0;
  double fluid_rate = 0.0;   // sum of perforation rates, positive into the reservoir
  double tracer_rate = 0.0;  // upwinded tracer flow
};

WellSample sample_well(double t, const Well& well, const std::vector<double>& rates,
                       const DofLayout& layout, const DofVector& c);

/// CSV: t,fluid_rate,tracer_rate,mean_concentration (the rate ratio; empty
/// when the fluid rate vanishes).
void write_well_series_csv(const std::string& path, const std::vector<WellSample>& series);

}  // namespace dfn

#endif
