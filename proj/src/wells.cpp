#include "dfn/wells.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace dfn {

WellIndex well_index(double dx, double dz, double d_f, double lambda_f, double r_w) {
  if (!(dx > 0.0 && dz > 0.0 && d_f > 0.0 && lambda_f > 0.0 && r_w > 0.0))
    throw std::invalid_argument("well index arguments must be positive");
  WellIndex w;
  w.C = 4.0 / 3.0 * (dx * dz / d_f + dx * d_f / dz + dz * d_f / dx);
  w.D = 0.5 * std::sqrt(dx * dx + d_f * d_f);
  w.r0 = w.D * std::exp(-2.0 * std::numbers::pi * dz / w.C);
  if (!(w.r0 > r_w))
    throw std::invalid_argument("well radius exceeds the Peaceman radius r0");
  w.wi = 2.0 * std::numbers::pi * dz * lambda_f / std::log(w.r0 / r_w);
  return w;
}

std::vector<std::vector<WellIndex>> compute_well_indices(const Mesh& mesh,
                                                         const FractureProperties& fractures,
                                                         const std::vector<Well>& wells) {
  std::vector<std::vector<WellIndex>> wi(wells.size());
  for (size_t w = 0; w < wells.size(); ++w) {
    if (wells[w].perforations.empty()) throw std::invalid_argument("well has no perforations");
    for (const Perforation& p : wells[w].perforations) {
      if (p.face < 0 || p.face >= mesh.n_faces() || !mesh.is_fracture_face(p.face))
        throw std::invalid_argument("well perforation is not a fracture face");
      const int fid = mesh.fracture_id_of_face[p.face];
      wi[w].push_back(well_index(p.dx, p.dz, fractures.width[fid],
                                 fractures.permeability[fid].max_eigenvalue(), wells[w].r_w));
    }
  }
  return wi;
}

namespace {

int block_row_of_face(const BlockSystem& block, const DofLayout& layout, int face,
                      bool skip_missing) {
  const int vf = layout.vf_of_face(face);
  const auto it =
      std::lower_bound(block.vf_gid_of_row.begin(), block.vf_gid_of_row.end(), vf);
  if (it == block.vf_gid_of_row.end() || *it != vf) {
    if (skip_missing) return -1;
    throw std::invalid_argument("perforated face is not a row of this system");
  }
  return static_cast<int>(it - block.vf_gid_of_row.begin());
}

}  // namespace

void apply_wells(BlockSystem& block, const DofLayout& layout, const std::vector<Well>& wells,
                 const std::vector<std::vector<WellIndex>>& wi, bool skip_missing_rows) {
  for (size_t w = 0; w < wells.size(); ++w) {
    const Well& well = wells[w];
    double wi_sum = 0.0;
    for (const WellIndex& x : wi[w]) wi_sum += x.wi;
    for (size_t i = 0; i < well.perforations.size(); ++i) {
      const int row =
          block_row_of_face(block, layout, well.perforations[i].face, skip_missing_rows);
      if (row < 0) continue;
      if (well.kind == Well::Kind::Pressure) {
        const int col = layout.vf_of_face(well.perforations[i].face);
        block.vf_acc.add(row, col, wi[w][i].wi);
        block.b_vf[row] += wi[w][i].wi * well.p_w;
      } else {
        block.b_vf[row] += well.rate * wi[w][i].wi / wi_sum;
      }
    }
  }
}

std::vector<std::vector<double>> well_rates(const DofLayout& layout,
                                            const std::vector<Well>& wells,
                                            const std::vector<std::vector<WellIndex>>& wi,
                                            const DofVector& pressure) {
  std::vector<std::vector<double>> rates(wells.size());
  for (size_t w = 0; w < wells.size(); ++w) {
    const Well& well = wells[w];
    double wi_sum = 0.0;
    for (const WellIndex& x : wi[w]) wi_sum += x.wi;
    for (size_t i = 0; i < well.perforations.size(); ++i) {
      if (well.kind == Well::Kind::Pressure) {
        const double p_sigma = pressure[layout.frac_gid_of_face(well.perforations[i].face)];
        rates[w].push_back(wi[w][i].wi * (well.p_w - p_sigma));
      } else {
        rates[w].push_back(well.rate * wi[w][i].wi / wi_sum);
      }
    }
  }
  return rates;
}

std::vector<SourceTerm> well_sources(const DofLayout& layout, const std::vector<Well>& wells,
                                     const std::vector<std::vector<double>>& rates) {
  std::vector<SourceTerm> src;
  for (size_t w = 0; w < wells.size(); ++w)
    for (size_t i = 0; i < wells[w].perforations.size(); ++i)
      src.push_back({layout.frac_gid_of_face(wells[w].perforations[i].face), rates[w][i],
                     wells[w].c_in});
  return src;
}

WellSample sample_well(double t, const Well& well, const std::vector<double>& rates,
                       const DofLayout& layout, const DofVector& c) {
  WellSample s;
  s.t = t;
  for (size_t i = 0; i < well.perforations.size(); ++i) {
    const double q = rates[i];
    s.fluid_rate += q;
    s.tracer_rate += q > 0.0 ? q * well.c_in
                             : q * c[layout.frac_gid_of_face(well.perforations[i].face)];
  }
  return s;
}

void write_well_series_csv(const std::string& path, const std::vector<WellSample>& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << "t,fluid_rate,tracer_rate,mean_concentration\n";
  for (const WellSample& s : series) {
    out << s.t << ',' << s.fluid_rate << ',' << s.tracer_rate << ',';
    if (s.fluid_rate != 0.0) out << s.tracer_rate / s.fluid_rate;
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace dfn
