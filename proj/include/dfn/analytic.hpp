#ifndef DFN_ANALYTIC_HPP
#define DFN_ANALYTIC_HPP

#include <functional>
#include <string>
#include <vector>

#include "dfn/dof.hpp"
#include "dfn/mesh.hpp"

namespace dfn {

/// Tracer advection past a single fracture on y = 1/4 + x tan(theta) in the
/// unit square, pressure u = 1 - x, unit matrix permeability, viscosity and
/// porosities.
struct SingleFractureCase {
  double tan_theta = 0.5;
  double lambda_f = 20.0;
  double d_f = 0.01;

  double sin_theta() const;
  double cos_theta() const;
  double beta() const;  // sin(theta) / d_f
  double k() const;     // lambda_f cos^2(theta)

  void validate() const;  // theta in (0, arctan(3/4)), k > 1

  /// Concentration inside the fracture at curvilinear position x in (0,1).
  double fracture(double x, double t) const;
  /// Concentration in the matrix; a point on a discontinuity line takes the
  /// upwind-side value.
  double matrix(double x, double y, double t) const;
};

/// Stationary tracer state with four fractures meeting at x0: the line
/// y = 1/4 + x tan(theta1) split at x0 (fractures 1, 2) and the line
/// x = 3/4 - y tan(theta2) split at y0 (fractures 3, 4; flow towards -y).
struct FourFractureCase {
  double tan_theta1 = 5.0 / 8.0;
  double tan_theta2 = 0.25;
  double lambda_f1 = 200.0;  // fractures 1 and 2
  double lambda_f3 = 400.0;  // fractures 3 and 4
  double d_f1 = 0.01;
  double d_f3 = 0.01;

  double beta1() const;
  double beta2() const;
  double k1() const;
  double k2() const;
  double r() const;
  double r1() const;
  double r2() const;
  double x0() const;
  double y0() const;
  double c0() const;

  void validate() const;  // angles in (0, arctan(3/4)), k1 > 1, k2 tan(theta2) > 1

  double cf1(double x) const;
  double cf2(double x) const;
  double cf3(double y) const;
  double cf4(double y) const;
  /// Along-fracture value by fracture id 0..3 at point (x, y) on the fracture.
  double fracture(int fracture_id, double x, double y) const;
  double matrix(double x, double y) const;
};

/// Relative L1 errors between a numerical state and pointwise exact values at
/// the cell and fracture-face centres (d_f-weighted areas in the fracture).
struct L1Errors {
  double matrix = 0.0;
  double fracture = 0.0;
};

L1Errors l1_error(const DofVector& c, const Mesh& mesh, const DofLayout& layout,
                  const FractureProperties& fractures,
                  const std::function<double(double, double)>& exact_matrix,
                  const std::function<double(int, double, double)>& exact_fracture);

struct ConvergenceRow {
  int n_x = 0;
  double err_matrix = 0.0;
  double err_fracture = 0.0;
  double order_matrix = 0.0;  // 0 on the first row
  double order_fracture = 0.0;
};

/// Runs `solve_case` per grid size and fills observed orders between
/// consecutive levels, log(e_i/e_{i+1}) / log(nx_{i+1}/nx_i).
std::vector<ConvergenceRow> convergence_table(const std::vector<int>& n_x_list,
                                              const std::function<L1Errors(int)>& solve_case);

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows);

}  // namespace dfn

#endif
