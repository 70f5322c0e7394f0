#ifndef DFN_KRYLOV_HPP
#define DFN_KRYLOV_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfn/sparse.hpp"

namespace dfn {

struct SolverConfig {
  enum class Method { CG, GMRES, BiCGStab };
  enum class Precond { None, Jacobi, ILU0 };

  Method method = Method::CG;
  Precond precond = Precond::Jacobi;
  // Stop once both the plain and the preconditioned relative residual 2-norms
  // drop below this value; the latter keeps weakly scaled rows from hiding a
  // large error behind a small unweighted residual.
  double tolerance = 1e-10;
  int max_iterations = 5000;

  static Method method_from_string(const std::string& s);
  static Precond precond_from_string(const std::string& s);
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;  // final relative true residual
  bool converged = false;
  std::vector<double> history;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, SolveStats stats)
      : std::runtime_error(what), stats(std::move(stats)) {}
  SolveStats stats;
};

/// ILU(0): natural order, no pivoting, pattern equal to the matrix pattern.
/// For a symmetric matrix this yields a symmetric preconditioner.
struct Ilu0 {
  CsrMatrix lu;  // strictly lower part holds L (unit diagonal), rest holds U
  std::vector<int> diag_pos;

  void factor(const CsrMatrix& a);
  void apply(const std::vector<double>& r, std::vector<double>& z) const;
};

/// Linear space backed by a plain CSR matrix; the building block of the
/// sequential solve path. Distributed solves provide the same interface.
class SequentialSpace {
 public:
  SequentialSpace(const CsrMatrix& a, SolverConfig::Precond precond) : a_(a) {
    if (a.rows != a.cols) throw std::invalid_argument("matrix must be square");
    precond_ = precond;
    if (precond == SolverConfig::Precond::Jacobi) {
      inv_diag_.assign(a.rows, 0.0);
      for (int r = 0; r < a.rows; ++r) {
        double d = 0.0;
        for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p)
          if (a.col[p] == r) d = a.val[p];
        if (d == 0.0) throw std::runtime_error("zero diagonal in Jacobi preconditioner");
        inv_diag_[r] = 1.0 / d;
      }
    } else if (precond == SolverConfig::Precond::ILU0) {
      ilu_.factor(a);
    }
  }

  int n() const { return a_.rows; }
  void matvec(const std::vector<double>& x, std::vector<double>& y) const { a_.matvec(x, y); }
  double dot(const std::vector<double>& x, const std::vector<double>& y) const {
    double acc = 0.0;
    for (int i = 0; i < a_.rows; ++i) acc += x[i] * y[i];
    return acc;
  }
  void apply_precond(const std::vector<double>& r, std::vector<double>& z) const {
    switch (precond_) {
      case SolverConfig::Precond::None:
        z = r;
        break;
      case SolverConfig::Precond::Jacobi:
        for (int i = 0; i < a_.rows; ++i) z[i] = inv_diag_[i] * r[i];
        break;
      case SolverConfig::Precond::ILU0:
        ilu_.apply(r, z);
        break;
    }
  }

 private:
  const CsrMatrix& a_;
  SolverConfig::Precond precond_;
  std::vector<double> inv_diag_;
  Ilu0 ilu_;
};

namespace detail {

template <class Space>
SolveStats cg(Space& sp, const std::vector<double>& b, std::vector<double>& x,
              const SolverConfig& cfg, double bnorm) {
  const int n = sp.n();
  std::vector<double> r = b, z(n), p(n), q(n);
  // x0 = 0
  std::fill(x.begin(), x.end(), 0.0);
  sp.apply_precond(r, z);
  const double znorm0 = std::sqrt(sp.dot(z, z));
  p = z;
  double rz = sp.dot(r, z);
  SolveStats st;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    sp.matvec(p, q);
    const double pq = sp.dot(p, q);
    if (pq <= 0.0) throw SolverError("CG breakdown: operator not positive definite", st);
    const double alpha = rz / pq;
    for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
    for (int i = 0; i < n; ++i) r[i] -= alpha * q[i];
    const double rnorm = std::sqrt(sp.dot(r, r));
    sp.apply_precond(r, z);
    const double znorm = std::sqrt(sp.dot(z, z));
    st.iterations = it + 1;
    st.history.push_back(rnorm / bnorm);
    if (rnorm <= cfg.tolerance * bnorm && znorm <= cfg.tolerance * znorm0) {
      st.converged = true;
      return st;
    }
    const double rz_new = sp.dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return st;
}

template <class Space>
SolveStats bicgstab(Space& sp, const std::vector<double>& b, std::vector<double>& x,
                    const SolverConfig& cfg, double bnorm) {
  const int n = sp.n();
  std::fill(x.begin(), x.end(), 0.0);
  std::vector<double> r = b, rhat = b, p(n, 0.0), v(n, 0.0), s(n), t(n), phat(n), shat(n), zr(n);
  sp.apply_precond(r, zr);
  const double znorm0 = std::sqrt(sp.dot(zr, zr));
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  SolveStats st;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const double rho_new = sp.dot(rhat, r);
    if (rho_new == 0.0) throw SolverError("BiCGStab breakdown (rho = 0)", st);
    if (it == 0) {
      p = r;
    } else {
      const double beta = (rho_new / rho) * (alpha / omega);
      for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
    rho = rho_new;
    sp.apply_precond(p, phat);
    sp.matvec(phat, v);
    alpha = rho / sp.dot(rhat, v);
    for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    const double snorm = std::sqrt(sp.dot(s, s));
    sp.apply_precond(s, shat);
    const double shnorm = std::sqrt(sp.dot(shat, shat));
    st.iterations = it + 1;
    if (snorm <= cfg.tolerance * bnorm && shnorm <= cfg.tolerance * znorm0) {
      for (int i = 0; i < n; ++i) x[i] += alpha * phat[i];
      st.history.push_back(snorm / bnorm);
      st.converged = true;
      return st;
    }
    sp.matvec(shat, t);
    const double tt = sp.dot(t, t);
    if (tt == 0.0) throw SolverError("BiCGStab breakdown (t = 0)", st);
    omega = sp.dot(t, s) / tt;
    for (int i = 0; i < n; ++i) x[i] += alpha * phat[i] + omega * shat[i];
    for (int i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
    const double rnorm = std::sqrt(sp.dot(r, r));
    sp.apply_precond(r, zr);
    const double zrnorm = std::sqrt(sp.dot(zr, zr));
    st.history.push_back(rnorm / bnorm);
    if (rnorm <= cfg.tolerance * bnorm && zrnorm <= cfg.tolerance * znorm0) {
      st.converged = true;
      return st;
    }
    if (omega == 0.0) throw SolverError("BiCGStab breakdown (omega = 0)", st);
  }
  return st;
}

// Right-preconditioned GMRES without restart; the Givens residual estimate is
// the true residual of the original system.
template <class Space>
SolveStats gmres(Space& sp, const std::vector<double>& b, std::vector<double>& x,
                 const SolverConfig& cfg, double bnorm) {
  const int n = sp.n();
  const int m = cfg.max_iterations;
  std::fill(x.begin(), x.end(), 0.0);
  std::vector<std::vector<double>> basis;       // v_j
  std::vector<std::vector<double>> pre_basis;   // M^{-1} v_j
  std::vector<std::vector<double>> hess;        // columns of H
  std::vector<double> cs, sn, g;

  SolveStats st;
  std::vector<double> v0 = b;  // r0 = b (x0 = 0)
  const double beta = std::sqrt(sp.dot(v0, v0));
  std::vector<double> z0(n);
  sp.apply_precond(b, z0);
  const double znorm0 = std::sqrt(sp.dot(z0, z0));
  for (int i = 0; i < n; ++i) v0[i] /= beta;
  basis.push_back(std::move(v0));
  g.push_back(beta);

  // assembles the current minimizer x = sum y_j M^{-1} v_j
  auto form_solution = [&](int kk) {
    std::vector<double> y(kk, 0.0);
    for (int i = kk - 1; i >= 0; --i) {
      double acc = g[i];
      for (int j = i + 1; j < kk; ++j) acc -= hess[j][i] * y[j];
      y[i] = acc / hess[i][i];
    }
    std::fill(x.begin(), x.end(), 0.0);
    for (int j = 0; j < kk; ++j)
      for (int i = 0; i < n; ++i) x[i] += y[j] * pre_basis[j][i];
  };

  std::vector<double> w(n), z(n);
  int k = 0;
  for (; k < m; ++k) {
    sp.apply_precond(basis[k], z);
    pre_basis.push_back(z);
    sp.matvec(z, w);
    std::vector<double> h(k + 2, 0.0);
    for (int j = 0; j <= k; ++j) {
      h[j] = sp.dot(w, basis[j]);
      for (int i = 0; i < n; ++i) w[i] -= h[j] * basis[j][i];
    }
    // second Gram-Schmidt pass: keeps the basis orthogonal over long recurrences
    for (int j = 0; j <= k; ++j) {
      const double corr = sp.dot(w, basis[j]);
      h[j] += corr;
      for (int i = 0; i < n; ++i) w[i] -= corr * basis[j][i];
    }
    h[k + 1] = std::sqrt(sp.dot(w, w));
    // apply accumulated rotations
    for (int j = 0; j < k; ++j) {
      const double tmp = cs[j] * h[j] + sn[j] * h[j + 1];
      h[j + 1] = -sn[j] * h[j] + cs[j] * h[j + 1];
      h[j] = tmp;
    }
    const double denom = std::hypot(h[k], h[k + 1]);
    cs.push_back(h[k] / denom);
    sn.push_back(h[k + 1] / denom);
    h[k] = denom;
    g.push_back(-sn[k] * g[k]);
    g[k] *= cs[k];
    hess.push_back(std::move(h));

    const double rnorm = std::abs(g[k + 1]);
    st.iterations = k + 1;
    st.history.push_back(rnorm / bnorm);
    const bool lucky = hess[k][k + 1] == 0.0;
    if (rnorm <= cfg.tolerance * bnorm || lucky) {
      // the Givens estimate only tracks the plain residual, so accept the
      // candidate after checking the true residuals, preconditioned included
      form_solution(k + 1);
      if (lucky) {
        st.converged = true;
        ++k;
        break;
      }
      std::vector<double> rc(n);
      sp.matvec(x, rc);
      for (int i = 0; i < n; ++i) rc[i] = b[i] - rc[i];
      const double rtrue = std::sqrt(sp.dot(rc, rc));
      sp.apply_precond(rc, z);
      const double ztrue = std::sqrt(sp.dot(z, z));
      if (rtrue <= cfg.tolerance * bnorm && ztrue <= cfg.tolerance * znorm0) {
        st.converged = true;
        ++k;
        break;
      }
    }
    for (int i = 0; i < n; ++i) w[i] /= hess[k][k + 1];
    basis.push_back(w);
  }
  if (!st.converged) form_solution(k);
  return st;
}

}  // namespace detail

/// Solves A x = b on the given space; x is overwritten (x0 = 0). Reports the
/// final relative true residual. Throws SolverError on non-convergence, with
/// the residual history attached.
template <class Space>
SolveStats solve_krylov(Space& sp, const std::vector<double>& b, std::vector<double>& x,
                        const SolverConfig& cfg) {
  if (!(cfg.tolerance > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  x.assign(sp.n(), 0.0);
  const double bnorm = std::sqrt(sp.dot(b, b));
  if (bnorm == 0.0) {
    SolveStats st;
    st.converged = true;
    return st;
  }
  SolveStats st;
  switch (cfg.method) {
    case SolverConfig::Method::CG:
      st = detail::cg(sp, b, x, cfg, bnorm);
      break;
    case SolverConfig::Method::GMRES:
      st = detail::gmres(sp, b, x, cfg, bnorm);
      break;
    case SolverConfig::Method::BiCGStab:
      st = detail::bicgstab(sp, b, x, cfg, bnorm);
      break;
  }
  // report the true residual
  std::vector<double> ax(sp.n());
  sp.matvec(x, ax);
  double acc = 0.0;
  {
    std::vector<double> r(sp.n());
    for (int i = 0; i < sp.n(); ++i) r[i] = b[i] - ax[i];
    acc = std::sqrt(sp.dot(r, r));
  }
  st.residual = acc / bnorm;
  if (!st.converged)
    throw SolverError("linear solver did not converge in " + std::to_string(cfg.max_iterations) +
                          " iterations",
                      st);
  return st;
}

}  // namespace dfn

#endif
