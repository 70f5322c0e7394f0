#include <doctest.h>

#include <cmath>
#include <fstream>

#include "dfn/analytic.hpp"

using namespace dfn;

TEST_SUITE("analytic") {

TEST_CASE("single fracture: derived parameters and sample value") {
  SingleFractureCase sc;  // tan = 1/2, lambda_f = 20, d_f = 0.01
  sc.validate();
  CHECK(sc.k() == doctest::Approx(16.0).epsilon(1e-14));
  CHECK(sc.beta() == doctest::Approx(20.0 * std::sqrt(5.0)).epsilon(1e-14));

  // x = 0.6, t = 0.5 lies between the fracture front x/k and the matrix front
  CHECK(sc.fracture(0.6, 0.5) == doctest::Approx(0.74220).epsilon(1e-4));
  CHECK(sc.fracture(0.6, 0.0) == 0.0);
  CHECK(sc.fracture(0.05, 0.5) == 1.0);   // behind the matrix front
  CHECK(sc.fracture(0.99, 0.01) == 0.0);  // ahead of the fracture front

  // matrix: pure advection from the inlet above the fracture
  CHECK(sc.matrix(0.3, 0.9, 0.5) == 1.0);
  CHECK(sc.matrix(0.7, 0.9, 0.5) == 0.0);
  CHECK(sc.matrix(0.3, 0.1, 0.5) == 1.0);
  // below the fracture but above y = 1/4: fed through the fracture
  const double y = 0.30;
  const double xe = (y - 0.25) / sc.tan_theta;
  CHECK(sc.matrix(0.5, y, 0.45) == doctest::Approx(sc.fracture(xe, 0.45 + xe - 0.5)));
  CHECK(sc.matrix(0.5, y, 0.3) == 0.0);
  // zero initial data
  CHECK(sc.matrix(0.5, 0.7, 0.0) == 0.0);

  SingleFractureCase bad = sc;
  bad.lambda_f = 1.0;  // k < 1
  CHECK_THROWS(bad.validate());
  bad = sc;
  bad.tan_theta = 0.8;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("single fracture: the closed form satisfies its transport equation") {
  SingleFractureCase sc;
  const double h = 1e-5;
  // smooth region x/k < t < x: matrix feed c_{m,1} is zero there
  for (double x : {0.55, 0.7, 0.9}) {
    const double t = 0.45;
    const double dt = (sc.fracture(x, t + h) - sc.fracture(x, t - h)) / (2 * h);
    const double dx = (sc.fracture(x + h, t) - sc.fracture(x - h, t)) / (2 * h);
    CHECK(dt + sc.k() * dx + sc.beta() * sc.fracture(x, t) ==
          doctest::Approx(0.0).epsilon(1e-6).scale(sc.beta()));
  }
}

TEST_CASE("four fractures: derived geometry and interface identities") {
  FourFractureCase fc;  // paper defaults
  fc.validate();
  const double t1 = fc.tan_theta1, t2 = fc.tan_theta2;
  CHECK(fc.x0() == doctest::Approx((3.0 - t2) / (4.0 * (1.0 + t1 * t2))));
  CHECK(fc.y0() == doctest::Approx(0.25 + fc.x0() * t1).epsilon(1e-14));  // on fracture 1-2
  CHECK(fc.x0() == doctest::Approx(0.75 - fc.y0() * t2).epsilon(1e-14));  // on fracture 3-4

  CHECK(fc.cf1(0.0) == 1.0);
  CHECK(fc.cf4(1.0) == 1.0);
  // intersection flux balance and continuity
  CHECK((fc.r() + 1.0) * fc.c0() - fc.cf1(fc.x0()) - fc.r() * fc.cf4(fc.y0()) ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(fc.cf2(fc.x0()) == doctest::Approx(fc.c0()).epsilon(1e-14));
  CHECK(fc.cf3(fc.y0()) == doctest::Approx(fc.c0()).epsilon(1e-14));
  // c_{f,3} is continuous at y = 1/4
  CHECK(fc.cf3(0.25 - 1e-13) == doctest::Approx(fc.cf3(0.25 + 1e-13)).epsilon(1e-10));

  FourFractureCase bad = fc;
  bad.lambda_f3 = 1.0;  // k2 tan(theta2) < 1
  CHECK_THROWS(bad.validate());
}

TEST_CASE("four fractures: stationary fracture ODEs hold on each branch") {
  FourFractureCase fc;
  const double h = 1e-6;
  const double scale = fc.beta1() + fc.beta2();
  auto ode1 = [&](double c, double cp, double feed) {
    return fc.k1() * cp + fc.beta1() * c - fc.beta1() * feed;
  };
  auto ode2 = [&](double c, double cp, double feed) {
    return -fc.k2() * cp + fc.beta2() * c - fc.beta2() * feed;
  };

  // c_{f,1}: fed by the stationary c_{m,1} = 0
  for (double x : {0.1, 0.3}) {
    const double cp = (fc.cf1(x + h) - fc.cf1(x - h)) / (2 * h);
    CHECK(ode1(fc.cf1(x), cp, 0.0) == doctest::Approx(0.0).epsilon(1e-6).scale(scale));
  }
  // c_{f,2}: fed by c_{m,2} = c_{f,4} evaluated on the fracture line
  for (double x : {fc.x0() + 0.05, 0.9}) {
    const double cp = (fc.cf2(x + h) - fc.cf2(x - h)) / (2 * h);
    const double feed = fc.cf4(0.25 + x * fc.tan_theta1);
    CHECK(ode1(fc.cf2(x), cp, feed) == doctest::Approx(0.0).epsilon(1e-6).scale(scale));
  }
  // c_{f,3}: fed by c_{m,3}, zero below y = 1/4 and c_{f,1} above
  for (double y : {0.1, 0.3}) {
    const double cp = (fc.cf3(y + h) - fc.cf3(y - h)) / (2 * h);
    const double feed = y < 0.25 ? 0.0 : fc.cf1((y - 0.25) / fc.tan_theta1);
    CHECK(ode2(fc.cf3(y), cp, feed) == doctest::Approx(0.0).epsilon(1e-6).scale(scale));
  }
  // c_{f,4}: fed by the stationary c_{m,1} = 0
  for (double y : {fc.y0() + 0.05, 0.95}) {
    const double cp = (fc.cf4(y + h) - fc.cf4(y - h)) / (2 * h);
    CHECK(ode2(fc.cf4(y), cp, 0.0) == doctest::Approx(0.0).epsilon(1e-6).scale(scale));
  }
}

TEST_CASE("four fractures: matrix regions trace their feeding fractures") {
  FourFractureCase fc;
  CHECK(fc.matrix(0.2, 0.8) == 0.0);                              // region 1
  CHECK(fc.matrix(0.9, 0.9) == doctest::Approx(fc.cf4(0.9)));          // region 2
  CHECK(fc.matrix(0.2, 0.1) == 0.0);                                   // region 3 below 1/4
  CHECK(fc.matrix(0.6, 0.4) ==
        doctest::Approx(fc.cf1((0.4 - 0.25) / fc.tan_theta1)));        // region 3 above 1/4
  const double ylow = fc.y0() - 0.05;
  CHECK(fc.matrix(0.9, ylow) == doctest::Approx(fc.cf3(ylow)));        // region 4 below y0
}

TEST_CASE("l1 error: zero for exact injection, delta for a constant offset") {
  const Mesh mesh = build_single_fracture_mesh_2d(8, 0.5);
  const DofLayout layout(mesh);
  const auto fp = FractureProperties::uniform(1, 0.01, 20.0);

  auto em = [](double x, double y) { return 1.0 + x + y; };
  auto ef = [](int, double x, double y) { return 2.0 - x; };
  DofVector c(layout.size(), 0.0);
  for (int k = 0; k < mesh.n_cells(); ++k)
    c[k] = em(mesh.cell_center[k][0], mesh.cell_center[k][1]);
  for (int f : mesh.fracture_faces)
    c[layout.frac_gid_of_face(f)] = ef(0, mesh.face_center[f][0], mesh.face_center[f][1]);

  L1Errors e = l1_error(c, mesh, layout, fp, em, ef);
  CHECK(e.matrix == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(e.fracture == doctest::Approx(0.0).epsilon(1e-14));

  // offset by delta against the unit field: relative error is delta
  DofVector ones(layout.size(), 1.0 + 0.125);
  auto unit_m = [](double, double) { return 1.0; };
  auto unit_f = [](int, double, double) { return 1.0; };
  e = l1_error(ones, mesh, layout, fp, unit_m, unit_f);
  CHECK(e.matrix == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(e.fracture == doctest::Approx(0.125).epsilon(1e-12));

  auto zero = [](double, double) { return 0.0; };
  CHECK_THROWS(l1_error(ones, mesh, layout, fp, zero, unit_f));
}

TEST_CASE("convergence table: halving errors give first order") {
  auto synthetic = [](int n_x) {
    L1Errors e;
    e.matrix = 1.0 / n_x;
    e.fracture = 4.0 / double(n_x) / n_x;
    return e;
  };
  const auto rows = convergence_table({8, 16, 32}, synthetic);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].order_matrix == 0.0);
  CHECK(rows[1].order_matrix == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rows[2].order_fracture == doctest::Approx(2.0).epsilon(1e-12));

  write_convergence_csv("convergence_test.csv", rows);
  std::ifstream in("convergence_test.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "n_x,err_matrix,err_fracture,order_matrix,order_fracture");
}

}
