#include "dfn/analytic.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace dfn {

double SingleFractureCase::sin_theta() const {
  return tan_theta / std::sqrt(1.0 + tan_theta * tan_theta);
}
double SingleFractureCase::cos_theta() const { return 1.0 / std::sqrt(1.0 + tan_theta * tan_theta); }
double SingleFractureCase::beta() const { return sin_theta() / d_f; }
double SingleFractureCase::k() const { return lambda_f * cos_theta() * cos_theta(); }

void SingleFractureCase::validate() const {
  if (!(tan_theta > 0.0 && tan_theta < 0.75))
    throw std::invalid_argument("theta must lie in (0, arctan(3/4))");
  if (!(k() > 1.0)) throw std::invalid_argument("fracture speed k must exceed 1");
}

double SingleFractureCase::fracture(double x, double t) const {
  if (t >= x) return 1.0;
  if (t >= x / k()) return std::exp(-beta() / (k() - 1.0) * (x - t));
  return 0.0;
}

double SingleFractureCase::matrix(double x, double y, double t) const {
  const double yf = 0.25 + x * tan_theta;
  if (y >= yf) return t >= x ? 1.0 : 0.0;  // upper subdomain, fed from the inlet
  if (y <= 0.25) return t >= x ? 1.0 : 0.0;
  // fed through the fracture at entry abscissa xe
  const double xe = (y - 0.25) / tan_theta;
  if (t >= x - xe) return fracture(xe, t + xe - x);
  return 0.0;
}

namespace {
double inv_hyp(double tan) { return std::sqrt(1.0 + tan * tan); }
}  // namespace

double FourFractureCase::beta1() const { return tan_theta1 / inv_hyp(tan_theta1) / d_f1; }
double FourFractureCase::k1() const {
  const double c = 1.0 / inv_hyp(tan_theta1);
  return lambda_f1 * c * c;
}
double FourFractureCase::beta2() const { return 1.0 / inv_hyp(tan_theta2) / d_f3; }
double FourFractureCase::k2() const {
  const double h = inv_hyp(tan_theta2);
  return lambda_f3 * (1.0 / h) * (tan_theta2 / h);
}
double FourFractureCase::r() const {
  return lambda_f3 * d_f3 * (tan_theta2 / inv_hyp(tan_theta2)) /
         (lambda_f1 * d_f1 / inv_hyp(tan_theta1));
}
double FourFractureCase::r1() const { return beta1() / k1() + beta2() / k2() * tan_theta1; }
double FourFractureCase::r2() const { return beta2() / k2() + beta1() / (k1() * tan_theta1); }
double FourFractureCase::x0() const {
  return (3.0 - tan_theta2) / (4.0 * (1.0 + tan_theta1 * tan_theta2));
}
double FourFractureCase::y0() const {
  return (1.0 + 3.0 * tan_theta1) / (4.0 * (1.0 + tan_theta1 * tan_theta2));
}
double FourFractureCase::c0() const {
  return (std::exp(-beta1() / k1() * x0()) + r() * std::exp(-beta2() / k2() * (1.0 - y0()))) /
         (r() + 1.0);
}

void FourFractureCase::validate() const {
  if (!(tan_theta1 > 0.0 && tan_theta1 < 0.75) || !(tan_theta2 > 0.0 && tan_theta2 < 0.75))
    throw std::invalid_argument("angles must lie in (0, arctan(3/4))");
  if (!(k1() > 1.0)) throw std::invalid_argument("k1 must exceed 1");
  if (!(k2() * tan_theta2 > 1.0)) throw std::invalid_argument("k2 tan(theta2) must exceed 1");
}

double FourFractureCase::cf1(double x) const { return std::exp(-beta1() / k1() * x); }

double FourFractureCase::cf4(double y) const { return std::exp(-beta2() / k2() * (1.0 - y)); }

double FourFractureCase::cf2(double x) const {
  const double b1k1 = beta1() / k1();
  const double a = -3.0 * beta2() / (4.0 * k2());
  return std::exp(-b1k1 * x) *
         (c0() * std::exp(b1k1 * x0()) +
          beta1() / (k1() * r1()) * (std::exp(r1() * x + a) - std::exp(r1() * x0() + a)));
}

double FourFractureCase::cf3(double y) const {
  const double b2k2 = beta2() / k2();
  // the + sign is required for -k2 c' + b2 c = b2 c_m3 to hold above y = 1/4
  const double a = beta1() / (4.0 * k1() * tan_theta1);
  const double up = y < 0.25 ? -r2() / 4.0 : -r2() * y;
  return std::exp(b2k2 * y) *
         (c0() * std::exp(-b2k2 * y0()) +
          beta2() / (k2() * r2()) * (std::exp(up + a) - std::exp(-r2() * y0() + a)));
}

double FourFractureCase::fracture(int fracture_id, double x, double y) const {
  switch (fracture_id) {
    case 0: return cf1(x);
    case 1: return cf2(x);
    case 2: return cf3(y);
    case 3: return cf4(y);
  }
  throw std::invalid_argument("fracture id must be 0..3");
}

double FourFractureCase::matrix(double x, double y) const {
  const bool above = y > 0.25 + x * tan_theta1;
  const bool left = x < 0.75 - y * tan_theta2;
  if (above && left) return 0.0;          // fed from the inlet at zero
  if (above && !left) return cf4(y);      // crosses fracture 4
  if (!above && left)                     // below, upstream of fracture 3
    return y <= 0.25 ? 0.0 : cf1((y - 0.25) / tan_theta1);
  return y < y0() ? cf3(y) : cf2((y - 0.25) / tan_theta1);
}

L1Errors l1_error(const DofVector& c, const Mesh& mesh, const DofLayout& layout,
                  const FractureProperties& fractures,
                  const std::function<double(double, double)>& exact_matrix,
                  const std::function<double(int, double, double)>& exact_fracture) {
  L1Errors err;
  double num_m = 0.0, den_m = 0.0, num_f = 0.0, den_f = 0.0;
  for (int k = 0; k < mesh.n_cells(); ++k) {
    const Vec3 xk = mesh.cell_center[k];
    const double ce = exact_matrix(xk[0], xk[1]);
    const double vol = cell_volume(mesh, k);
    num_m += std::abs(c[layout.cell_gid(k)] - ce) * vol;
    den_m += std::abs(ce) * vol;
  }
  for (int f : mesh.fracture_faces) {
    const Vec3 xf = mesh.face_center[f];
    const int fid = mesh.fracture_id_of_face[f];
    const double ce = exact_fracture(fid, xf[0], xf[1]);
    const double w = fractures.width[fid] * face_area(mesh, f);
    num_f += std::abs(c[layout.frac_gid_of_face(f)] - ce) * w;
    den_f += std::abs(ce) * w;
  }
  if (den_m == 0.0 || den_f == 0.0) throw std::runtime_error("exact solution has zero L1 norm");
  err.matrix = num_m / den_m;
  err.fracture = num_f / den_f;
  return err;
}

std::vector<ConvergenceRow> convergence_table(const std::vector<int>& n_x_list,
                                              const std::function<L1Errors(int)>& solve_case) {
  std::vector<ConvergenceRow> rows;
  for (int n_x : n_x_list) {
    const L1Errors e = solve_case(n_x);
    ConvergenceRow row;
    row.n_x = n_x;
    row.err_matrix = e.matrix;
    row.err_fracture = e.fracture;
    if (!rows.empty()) {
      const double ratio = std::log(double(n_x) / rows.back().n_x);
      row.order_matrix = std::log(rows.back().err_matrix / e.matrix) / ratio;
      row.order_fracture = std::log(rows.back().err_fracture / e.fracture) / ratio;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "n_x,err_matrix,err_fracture,order_matrix,order_fracture\n";
  out.precision(12);
  for (const auto& r : rows)
    out << r.n_x << ',' << r.err_matrix << ',' << r.err_fracture << ',' << r.order_matrix << ','
        << r.order_fracture << '\n';
}

}  // namespace dfn
