#include "dfn/geometry.hpp"

#include <algorithm>

namespace dfn {

namespace {

// Characteristic polynomial roots of a symmetric 3x3 matrix
// (Smith's trigonometric method).
std::array<double, 3> sym_eigenvalues(const Tensor& t) {
  const double p1 = t.xy * t.xy + t.xz * t.xz + t.yz * t.yz;
  if (p1 == 0.0) {
    std::array<double, 3> ev = {t.xx, t.yy, t.zz};
    std::sort(ev.begin(), ev.end());
    return ev;
  }
  const double q = (t.xx + t.yy + t.zz) / 3.0;
  const double p2 = (t.xx - q) * (t.xx - q) + (t.yy - q) * (t.yy - q) + (t.zz - q) * (t.zz - q) +
                    2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  // B = (A - q I) / p
  const double bxx = (t.xx - q) / p, byy = (t.yy - q) / p, bzz = (t.zz - q) / p;
  const double bxy = t.xy / p, bxz = t.xz / p, byz = t.yz / p;
  const double detb = bxx * (byy * bzz - byz * byz) - bxy * (bxy * bzz - byz * bxz) +
                      bxz * (bxy * byz - byy * bxz);
  double r = detb / 2.0;
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  return {e3, e2, e1};
}

}  // namespace

double Tensor::max_eigenvalue() const { return sym_eigenvalues(*this)[2]; }

bool Tensor::is_spd() const {
  const auto ev = sym_eigenvalues(*this);
  return ev[0] > 0.0;
}

}  // namespace dfn
