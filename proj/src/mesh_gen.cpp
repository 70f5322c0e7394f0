#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dfn/mesh.hpp"

namespace dfn {

namespace {

void check_nx(int n_x) {
  if (n_x < 4 || n_x % 4 != 0)
    throw std::invalid_argument("n_x must be a positive multiple of 4");
}

void check_tan(double t) {
  if (!(t > 0.0 && t < 0.75))
    throw std::invalid_argument("tan(theta) must lie in (0, 3/4)");
}

// Two-piece linear map sending the reference breaks {0, rb, 1} to {0, b, 1}.
double piecewise_map(double ref, double rb, double b) {
  if (ref <= rb) return ref * (b / rb);
  return b + (ref - rb) / (1.0 - rb) * (1.0 - b);
}

// Assembles the topologically Cartesian quad mesh from a node coordinate
// functor. Horizontal edges of row j0 (and vertical edges of column i0 when
// i0 >= 0) are tagged as fracture edges; ids are set by the caller.
Mesh build_quad_mesh(int n_x, const std::vector<Vec3>& coords) {
  Mesh mesh;
  mesh.dim = 2;
  mesh.nodes = coords;
  const int nn = n_x + 1;
  auto nid = [nn](int i, int j) { return i + nn * j; };

  // horizontal edges: (i,j)-(i+1,j), j in [0,n_x]; then vertical edges
  auto hedge = [&](int i, int j) { return i + n_x * j; };
  const int n_h = n_x * nn;
  auto vedge = [&](int i, int j) { return n_h + j + n_x * i; };
  mesh.face_nodes.resize(n_h + nn * n_x);
  for (int j = 0; j <= n_x; ++j)
    for (int i = 0; i < n_x; ++i) mesh.face_nodes[hedge(i, j)] = {nid(i, j), nid(i + 1, j)};
  for (int i = 0; i <= n_x; ++i)
    for (int j = 0; j < n_x; ++j) mesh.face_nodes[vedge(i, j)] = {nid(i, j), nid(i, j + 1)};

  mesh.cell_nodes.resize(n_x * n_x);
  mesh.cell_faces.resize(n_x * n_x);
  for (int j = 0; j < n_x; ++j)
    for (int i = 0; i < n_x; ++i) {
      const int k = i + n_x * j;
      mesh.cell_nodes[k] = {nid(i, j), nid(i + 1, j), nid(i + 1, j + 1), nid(i, j + 1)};
      mesh.cell_faces[k] = {hedge(i, j), vedge(i + 1, j), hedge(i, j + 1), vedge(i, j)};
    }
  mesh.fracture_id_of_face.assign(mesh.face_nodes.size(), -1);
  return mesh;
}

}  // namespace

Mesh build_single_fracture_mesh_2d(int n_x, double tan_theta) {
  check_nx(n_x);
  check_tan(tan_theta);
  const int nn = n_x + 1;
  std::vector<Vec3> coords(nn * nn);
  for (int j = 0; j <= n_x; ++j)
    for (int i = 0; i <= n_x; ++i) {
      const double x = double(i) / n_x;
      const double yline = 0.25 + x * tan_theta;
      const double y = piecewise_map(double(j) / n_x, 0.25, yline);
      coords[i + nn * j] = {x, y, 0.0};
    }
  Mesh mesh = build_quad_mesh(n_x, coords);
  const int j0 = n_x / 4;
  for (int i = 0; i < n_x; ++i) mesh.fracture_id_of_face[i + n_x * j0] = 0;
  mesh.finalize();
  return mesh;
}

Mesh build_four_fracture_mesh_2d(int n_x, double tan_theta1, double tan_theta2) {
  check_nx(n_x);
  check_tan(tan_theta1);
  check_tan(tan_theta2);
  const int nn = n_x + 1;
  std::vector<Vec3> coords(nn * nn);
  for (int j = 0; j <= n_x; ++j)
    for (int i = 0; i <= n_x; ++i) {
      const double xr = double(i) / n_x;
      const double yr = double(j) / n_x;
      double x = xr, y = yr;
      bool converged = false;
      for (int it = 0; it < 50; ++it) {
        const double yn = piecewise_map(yr, 0.25, 0.25 + x * tan_theta1);
        const double xn = piecewise_map(xr, 0.75, 0.75 - yn * tan_theta2);
        const double delta = std::max(std::abs(xn - x), std::abs(yn - y));
        x = xn;
        y = yn;
        if (delta < 1e-13) {
          converged = true;
          break;
        }
      }
      if (!converged)
        throw std::runtime_error("four-fracture mesh remap did not converge to 1e-13");
      coords[i + nn * j] = {x, y, 0.0};
    }
  Mesh mesh = build_quad_mesh(n_x, coords);
  const int j0 = n_x / 4;
  const int i0 = 3 * n_x / 4;
  const int n_h = n_x * (n_x + 1);
  // Gamma_1 = (x1,x0), Gamma_2 = (x0,x2) along the row; Gamma_3 = (x3,x0),
  // Gamma_4 = (x0,x4) along the column, split at the intersection node (i0,j0).
  for (int i = 0; i < n_x; ++i) mesh.fracture_id_of_face[i + n_x * j0] = i < i0 ? 0 : 1;
  for (int j = 0; j < n_x; ++j) mesh.fracture_id_of_face[n_h + j + n_x * i0] = j < j0 ? 2 : 3;
  mesh.finalize();
  return mesh;
}

namespace {

// 1D node coordinates with geometric grading away from plane breakpoints.
std::vector<double> graded_axis(int n_x, std::vector<double> breaks, double stretch) {
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> stops = {0.0};
  for (double b : breaks) stops.push_back(b);
  stops.push_back(1.0);

  std::vector<double> coords = {0.0};
  for (size_t seg = 0; seg + 1 < stops.size(); ++seg) {
    const double a = stops[seg], b = stops[seg + 1];
    const int n = int(std::lround((b - a) * n_x));
    const bool plane_left = seg > 0;
    const bool plane_right = seg + 2 < stops.size();
    std::vector<double> h(n, (b - a) / n);
    auto geometric = [&](int m) {
      // m interval widths, smallest first, ratio `stretch`, summing to 1
      std::vector<double> w(m);
      double sum = 0.0, cur = 1.0;
      for (int i = 0; i < m; ++i, cur *= stretch) {
        w[i] = cur;
        sum += cur;
      }
      for (double& x : w) x /= sum;
      return w;
    };
    if (stretch != 1.0 && (plane_left || plane_right)) {
      if (plane_left && plane_right) {
        const int m1 = n / 2, m2 = n - m1;
        const double half = (b - a) / 2.0;
        auto w1 = geometric(m1), w2 = geometric(m2);
        for (int i = 0; i < m1; ++i) h[i] = half * w1[i];
        for (int i = 0; i < m2; ++i) h[n - 1 - i] = half * w2[i];
      } else if (plane_left) {
        auto w = geometric(n);
        for (int i = 0; i < n; ++i) h[i] = (b - a) * w[i];
      } else {
        auto w = geometric(n);
        for (int i = 0; i < n; ++i) h[n - 1 - i] = (b - a) * w[i];
      }
    }
    double x = a;
    for (int i = 0; i < n; ++i) {
      x += h[i];
      coords.push_back(i + 1 == n ? b : x);
    }
  }
  return coords;
}

}  // namespace

Mesh build_hex_mesh_3d(int n_x, const std::vector<AxisPlane>& planes, double stretch) {
  if (n_x < 2) throw std::invalid_argument("n_x must be at least 2");
  if (!(stretch >= 1.0)) throw std::invalid_argument("stretch must be >= 1");
  std::array<std::vector<double>, 3> axis_breaks;
  std::vector<int> plane_index(planes.size());
  for (size_t p = 0; p < planes.size(); ++p) {
    const auto& pl = planes[p];
    if (pl.axis < 0 || pl.axis > 2) throw std::invalid_argument("plane axis must be 0, 1 or 2");
    const double k = pl.coord * n_x;
    if (!(pl.coord > 0.0 && pl.coord < 1.0) || std::abs(k - std::lround(k)) > 1e-12)
      throw std::invalid_argument("fracture plane is not aligned with the grid");
    plane_index[p] = int(std::lround(k));
    axis_breaks[pl.axis].push_back(pl.coord);
  }

  std::array<std::vector<double>, 3> axis_coords;
  for (int a = 0; a < 3; ++a) axis_coords[a] = graded_axis(n_x, axis_breaks[a], stretch);

  Mesh mesh;
  mesh.dim = 3;
  const int nn = n_x + 1;
  mesh.nodes.resize(nn * nn * nn);
  auto nid = [nn](int i, int j, int k) { return i + nn * (j + nn * k); };
  for (int k = 0; k <= n_x; ++k)
    for (int j = 0; j <= n_x; ++j)
      for (int i = 0; i <= n_x; ++i)
        mesh.nodes[nid(i, j, k)] = {axis_coords[0][i], axis_coords[1][j], axis_coords[2][k]};

  // faces: x-normal, then y-normal, then z-normal
  const int n_xf = nn * n_x * n_x;
  auto xface = [&](int i, int j, int k) { return i + nn * (j + n_x * k); };
  auto yface = [&](int i, int j, int k) { return n_xf + j + nn * (i + n_x * k); };
  auto zface = [&](int i, int j, int k) { return 2 * n_xf + k + nn * (i + n_x * j); };
  mesh.face_nodes.resize(3 * n_xf);
  for (int k = 0; k < n_x; ++k)
    for (int j = 0; j < n_x; ++j)
      for (int i = 0; i <= n_x; ++i)
        mesh.face_nodes[xface(i, j, k)] = {nid(i, j, k), nid(i, j + 1, k), nid(i, j + 1, k + 1),
                                           nid(i, j, k + 1)};
  for (int k = 0; k < n_x; ++k)
    for (int i = 0; i < n_x; ++i)
      for (int j = 0; j <= n_x; ++j)
        mesh.face_nodes[yface(i, j, k)] = {nid(i, j, k), nid(i + 1, j, k), nid(i + 1, j, k + 1),
                                           nid(i, j, k + 1)};
  for (int j = 0; j < n_x; ++j)
    for (int i = 0; i < n_x; ++i)
      for (int k = 0; k <= n_x; ++k)
        mesh.face_nodes[zface(i, j, k)] = {nid(i, j, k), nid(i + 1, j, k), nid(i + 1, j + 1, k),
                                           nid(i, j + 1, k)};

  mesh.cell_nodes.resize(n_x * n_x * n_x);
  mesh.cell_faces.resize(n_x * n_x * n_x);
  for (int k = 0; k < n_x; ++k)
    for (int j = 0; j < n_x; ++j)
      for (int i = 0; i < n_x; ++i) {
        const int c = i + n_x * (j + n_x * k);
        mesh.cell_nodes[c] = {nid(i, j, k),         nid(i + 1, j, k),     nid(i + 1, j + 1, k),
                              nid(i, j + 1, k),     nid(i, j, k + 1),     nid(i + 1, j, k + 1),
                              nid(i + 1, j + 1, k + 1), nid(i, j + 1, k + 1)};
        mesh.cell_faces[c] = {xface(i, j, k), xface(i + 1, j, k), yface(i, j, k),
                              yface(i, j + 1, k), zface(i, j, k), zface(i, j, k + 1)};
      }

  mesh.fracture_id_of_face.assign(mesh.face_nodes.size(), -1);
  for (size_t p = 0; p < planes.size(); ++p) {
    const int idx = plane_index[p];
    const int fid = static_cast<int>(p);
    for (int b = 0; b < n_x; ++b)
      for (int a = 0; a < n_x; ++a) {
        int f;
        if (planes[p].axis == 0)
          f = xface(idx, a, b);
        else if (planes[p].axis == 1)
          f = yface(a, idx, b);
        else
          f = zface(a, b, idx);
        mesh.fracture_id_of_face[f] = fid;
      }
  }
  mesh.finalize();
  return mesh;
}

}  // namespace dfn
