#include "dfn/krylov.hpp"

namespace dfn {

SolverConfig::Method SolverConfig::method_from_string(const std::string& s) {
  if (s == "cg" || s == "CG") return Method::CG;
  if (s == "gmres" || s == "GMRES") return Method::GMRES;
  if (s == "bicgstab" || s == "BiCGStab") return Method::BiCGStab;
  throw std::invalid_argument("unknown solver method: " + s);
}

SolverConfig::Precond SolverConfig::precond_from_string(const std::string& s) {
  if (s == "none") return Precond::None;
  if (s == "jacobi" || s == "Jacobi") return Precond::Jacobi;
  if (s == "ilu0" || s == "ILU0") return Precond::ILU0;
  throw std::invalid_argument("unknown preconditioner: " + s);
}

void Ilu0::factor(const CsrMatrix& a) {
  lu = a;
  const int n = lu.rows;
  diag_pos.assign(n, -1);
  for (int r = 0; r < n; ++r)
    for (int p = lu.row_ptr[r]; p < lu.row_ptr[r + 1]; ++p)
      if (lu.col[p] == r) diag_pos[r] = p;
  for (int r = 0; r < n; ++r)
    if (diag_pos[r] < 0) throw std::runtime_error("ILU(0): missing diagonal entry");

  for (int i = 1; i < n; ++i) {
    for (int pk = lu.row_ptr[i]; pk < lu.row_ptr[i + 1]; ++pk) {
      const int k = lu.col[pk];
      if (k >= i) break;
      const double ukk = lu.val[diag_pos[k]];
      if (ukk == 0.0) throw std::runtime_error("ILU(0): zero pivot");
      const double lik = lu.val[pk] / ukk;
      lu.val[pk] = lik;
      // subtract lik * U(k, j) for j > k present in row i
      int pj = pk + 1;
      for (int pkj = diag_pos[k] + 1; pkj < lu.row_ptr[k + 1]; ++pkj) {
        const int j = lu.col[pkj];
        while (pj < lu.row_ptr[i + 1] && lu.col[pj] < j) ++pj;
        if (pj >= lu.row_ptr[i + 1]) break;
        if (lu.col[pj] == j) lu.val[pj] -= lik * lu.val[pkj];
      }
    }
  }
}

void Ilu0::apply(const std::vector<double>& r, std::vector<double>& z) const {
  const int n = lu.rows;
  // L y = r (unit lower triangular)
  for (int i = 0; i < n; ++i) {
    double acc = r[i];
    for (int p = lu.row_ptr[i]; p < lu.row_ptr[i + 1] && lu.col[p] < i; ++p)
      acc -= lu.val[p] * z[lu.col[p]];
    z[i] = acc;
  }
  // U z = y
  for (int i = n - 1; i >= 0; --i) {
    double acc = z[i];
    for (int p = diag_pos[i] + 1; p < lu.row_ptr[i + 1]; ++p) acc -= lu.val[p] * z[lu.col[p]];
    z[i] = acc / lu.val[diag_pos[i]];
  }
}

}  // namespace dfn
