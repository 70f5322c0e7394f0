#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "dfn/krylov.hpp"

using namespace dfn;

namespace {

CsrMatrix to_csr(const Eigen::MatrixXd& a) {
  CsrMatrix m;
  m.rows = int(a.rows());
  m.cols = int(a.cols());
  m.row_ptr.push_back(0);
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c)
      if (a(r, c) != 0.0) {
        m.col.push_back(c);
        m.val.push_back(a(r, c));
      }
    m.row_ptr.push_back(int(m.col.size()));
  }
  return m;
}

Eigen::MatrixXd laplacian_1d(int n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 2.0;
    if (i > 0) a(i, i - 1) = -1.0;
    if (i + 1 < n) a(i, i + 1) = -1.0;
  }
  return a;
}

}  // namespace

TEST_SUITE("krylov") {

TEST_CASE("cg solves an SPD system with every preconditioner") {
  const int n = 40;
  const Eigen::MatrixXd a = laplacian_1d(n);
  Eigen::VectorXd b(n);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int i = 0; i < n; ++i) b(i) = dist(rng);
  const Eigen::VectorXd xref = a.ldlt().solve(b);

  const CsrMatrix m = to_csr(a);
  const std::vector<double> rhs(b.data(), b.data() + n);
  for (auto pc : {SolverConfig::Precond::None, SolverConfig::Precond::Jacobi,
                  SolverConfig::Precond::ILU0}) {
    SolverConfig cfg;
    cfg.method = SolverConfig::Method::CG;
    cfg.precond = pc;
    cfg.tolerance = 1e-12;
    SequentialSpace sp(m, pc);
    std::vector<double> x;
    const SolveStats st = solve_krylov(sp, rhs, x, cfg);
    CHECK(st.converged);
    CHECK(st.residual < 1e-11);
    for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(xref(i)).epsilon(1e-8));
  }
}

TEST_CASE("ilu0 of a tridiagonal matrix is an exact factorization") {
  const CsrMatrix m = to_csr(laplacian_1d(30));
  SolverConfig cfg;
  cfg.method = SolverConfig::Method::CG;
  cfg.precond = SolverConfig::Precond::ILU0;
  cfg.tolerance = 1e-12;
  SequentialSpace sp(m, cfg.precond);
  std::vector<double> x, b(30, 1.0);
  const SolveStats st = solve_krylov(sp, b, x, cfg);
  CHECK(st.iterations <= 2);
}

TEST_CASE("gmres and bicgstab solve a nonsymmetric system") {
  const int n = 30;
  Eigen::MatrixXd a = laplacian_1d(n);
  for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = -0.4;  // convection bias
  Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd xref = a.lu().solve(b);
  const CsrMatrix m = to_csr(a);
  const std::vector<double> rhs(b.data(), b.data() + n);

  for (auto method : {SolverConfig::Method::GMRES, SolverConfig::Method::BiCGStab}) {
    SolverConfig cfg;
    cfg.method = method;
    cfg.precond = SolverConfig::Precond::Jacobi;
    cfg.tolerance = 1e-12;
    SequentialSpace sp(m, cfg.precond);
    std::vector<double> x;
    const SolveStats st = solve_krylov(sp, rhs, x, cfg);
    CHECK(st.converged);
    for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(xref(i)).epsilon(1e-7));
  }
}

TEST_CASE("residual history is monotone enough and relative") {
  const CsrMatrix m = to_csr(laplacian_1d(50));
  SolverConfig cfg;
  cfg.tolerance = 1e-10;
  SequentialSpace sp(m, cfg.precond);
  std::vector<double> x, b(50, 1.0);
  const SolveStats st = solve_krylov(sp, b, x, cfg);
  REQUIRE(!st.history.empty());
  CHECK(st.history.back() <= 1e-10);
  CHECK(int(st.history.size()) == st.iterations);
}

TEST_CASE("non-convergence raises with statistics attached") {
  const CsrMatrix m = to_csr(laplacian_1d(100));
  SolverConfig cfg;
  cfg.tolerance = 1e-14;
  cfg.max_iterations = 3;
  SequentialSpace sp(m, cfg.precond);
  std::vector<double> x, b(100, 1.0);
  try {
    solve_krylov(sp, b, x, cfg);
    FAIL("expected SolverError");
  } catch (const SolverError& err) {
    CHECK(err.stats.iterations == 3);
    CHECK_FALSE(err.stats.converged);
  }
}

TEST_CASE("zero right-hand side returns zero immediately") {
  const CsrMatrix m = to_csr(laplacian_1d(10));
  SolverConfig cfg;
  SequentialSpace sp(m, cfg.precond);
  std::vector<double> x, b(10, 0.0);
  const SolveStats st = solve_krylov(sp, b, x, cfg);
  CHECK(st.converged);
  CHECK(st.iterations == 0);
  for (double v : x) CHECK(v == 0.0);
}

TEST_CASE("configuration parsing") {
  CHECK(SolverConfig::method_from_string("cg") == SolverConfig::Method::CG);
  CHECK(SolverConfig::method_from_string("GMRES") == SolverConfig::Method::GMRES);
  CHECK(SolverConfig::precond_from_string("ilu0") == SolverConfig::Precond::ILU0);
  CHECK_THROWS(SolverConfig::method_from_string("sor"));
  CHECK_THROWS(SolverConfig::precond_from_string("amg"));
}

}
