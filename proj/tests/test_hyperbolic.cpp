#include <catch_amalgamated.hpp>

#include <cmath>

#include "barylab/hyperbolic.hpp"

using namespace barylab;
using namespace barylab::hyp;
using Catch::Matchers::WithinAbs;

namespace {

HPoint on_axis(int dim, double t) {
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(dim);
  dir[0] = 1.0;
  return polar_point(dir, t);
}

double sheet_drift(const HPoint& p) { return std::abs(minkowski_norm_sq(p.coords()) + 1.0); }

// d(exp_y(eps * u), z) along a geodesic through y.
double along(const HPoint& y, const Eigen::VectorXd& u, double eps, const HPoint& z) {
  return distance(exp_map({y, eps * u}), z);
}

}  // namespace

TEST_CASE("distance closed forms", "[hyperbolic]") {
  for (int dim : {2, 3, 5}) {
    const HPoint p = HPoint::origin(dim);
    CHECK(distance(p, p) == 0.0);
    CHECK_THAT(distance(p, on_axis(dim, 1.0)), WithinAbs(1.0, 1e-14));
    CHECK_THAT(distance(on_axis(dim, -0.5), on_axis(dim, 2.5)), WithinAbs(3.0, 1e-12));
  }
  // Tiny separations stay accurate.
  CHECK_THAT(distance(HPoint::origin(3), on_axis(3, 1e-9)), WithinAbs(1e-9, 1e-20));
}

TEST_CASE("distance is a metric on random triples", "[hyperbolic][property]") {
  Rng rng(11);
  const HPoint o = HPoint::origin(3);
  for (int i = 0; i < 10000; ++i) {
    const HPoint p = random_point(o, 4.0, rng);
    const HPoint q = random_point(o, 4.0, rng);
    const HPoint r = random_point(o, 4.0, rng);
    const double pq = distance(p, q), qr = distance(q, r), pr = distance(p, r);
    REQUIRE(pr <= pq + qr + 1e-12);
    REQUIRE(distance(q, p) == Catch::Approx(pq).epsilon(1e-14));
  }
}

TEST_CASE("invalid points and ill-conditioned pairs are rejected", "[hyperbolic][errors]") {
  Eigen::VectorXd bad(4);
  bad << 1.0, 0.5, 0.0, 0.0;
  CHECK_THROWS_AS(HPoint::from_coords(bad), InvalidPoint);
  Eigen::VectorXd lower(4);
  lower << -1.0, 0.0, 0.0, 0.0;
  CHECK_THROWS_AS(HPoint::from_coords(lower), InvalidPoint);
  Eigen::VectorXd ok(4);
  ok << std::cosh(0.3), std::sinh(0.3), 0.0, 0.0;
  CHECK_NOTHROW(HPoint::from_coords(ok));
  CHECK_THROWS_AS(distance(HPoint::origin(2), HPoint::origin(3)), InvalidPoint);

  Tolerances strict;
  strict.ill_conditioned = -1.0;  // forces every pair to look ill-conditioned
  CHECK_THROWS_AS(distance(HPoint::origin(3), on_axis(3, 1.0), strict), InvalidPoint);
}

TEST_CASE("exp and log are mutually inverse", "[hyperbolic][property]") {
  Rng rng(12);
  const HPoint o = HPoint::origin(3);
  const HTangent z = log_map(o, o);
  CHECK(z.vec.norm() == 0.0);

  for (double t : {0.1, 1.0, 3.0, 7.0}) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(4);
    v.tail(3) = random_unit_vector(rng, 3);
    const HPoint q = exp_map({o, t * v});
    CHECK_THAT(distance(o, q), WithinAbs(t, 1e-12 * std::max(1.0, t)));
  }

  double worst = 0.0, worst_norm = 0.0, worst_drift = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const HPoint p = random_point(o, 3.0, rng);
    const HPoint q = random_point(o, 3.0, rng);
    const HTangent v = log_map(p, q);
    const HPoint back = exp_map(v);
    worst = std::max(worst, distance(back, q));
    worst_norm = std::max(worst_norm, std::abs(v.norm() - distance(p, q)));
    worst_drift = std::max(worst_drift, sheet_drift(back));
    REQUIRE(std::abs(minkowski_dot(p.coords(), v.vec)) < 1e-9);
  }
  CHECK(worst < 1e-9);
  CHECK(worst_norm < 1e-9);
  CHECK(worst_drift < 1e-10);
}

TEST_CASE("gradient of the distance", "[hyperbolic]") {
  const int dim = 3;
  const HPoint z = on_axis(dim, -1.0);
  const HPoint y = on_axis(dim, 0.7);
  const HPoint w = on_axis(dim, 2.0);

  SECTION("collinear points align with the geodesic velocity") {
    const HTangent g = grad_distance(y, z);
    CHECK_THAT(g.norm(), WithinAbs(1.0, 1e-12));
    // Velocity of t -> on_axis(t) at t = 0.7 is (sinh, cosh, 0, 0).
    CHECK_THAT(g.vec[0], WithinAbs(std::sinh(0.7), 1e-12));
    CHECK_THAT(g.vec[1], WithinAbs(std::cosh(0.7), 1e-12));
    // From the other side of y the gradient flips.
    const HTangent h = grad_distance(y, w);
    CHECK((g.vec + h.vec).norm() < 1e-12);
  }

  SECTION("degenerate at y == z") {
    CHECK_THROWS_AS(grad_distance(y, y), DegenerateGeometry);
    CHECK_THROWS_AS(hess_distance(y, y), DegenerateGeometry);
  }
}

TEST_CASE("hessian spectrum is {0, coth t}", "[hyperbolic]") {
  for (int dim : {2, 3, 4}) {
    for (double t : {0.2, 1.0, 4.0, 25.0}) {
      const HPoint y = HPoint::origin(dim);
      const HPoint z = on_axis(dim, t);
      const Eigen::MatrixXd h = hess_distance(y, z);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
      const Eigen::VectorXd ev = es.eigenvalues();
      CHECK_THAT(ev[0], WithinAbs(0.0, 1e-12));
      for (int k = 1; k < dim; ++k) CHECK_THAT(ev[k], WithinAbs(1.0 / std::tanh(t), 1e-12));
      if (t > 20) CHECK_THAT(ev[dim - 1], WithinAbs(1.0, 1e-12));
    }
  }
}

TEST_CASE("derivatives match central finite differences", "[hyperbolic][property]") {
  Rng rng(13);
  const int dim = 3;
  const double step = 1e-5;
  const double hstep = 1e-4;  // second differences are roundoff-bound at 1e-5
  const HPoint o = HPoint::origin(dim);
  double worst_grad = 0.0, worst_hess = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const HPoint y = random_point(o, 2.5, rng);
    const HPoint z = random_point(o, 2.5, rng);
    if (distance(y, z) < 0.2) continue;
    const TangentFrame frame = TangentFrame::at(y);
    const Eigen::VectorXd g = frame.coords(grad_distance(y, z).vec);
    const Eigen::MatrixXd h = hess_distance(y, z, frame);
    const double f0 = distance(y, z);
    Eigen::VectorXd fd_g(dim);
    Eigen::MatrixXd fd_h(dim, dim);
    for (int a = 0; a < dim; ++a) {
      const Eigen::VectorXd u = frame.basis.col(a);
      const double fp = along(y, u, step, z), fm = along(y, u, -step, z);
      fd_g[a] = (fp - fm) / (2 * step);
      fd_h(a, a) = (along(y, u, hstep, z) - 2 * f0 + along(y, u, -hstep, z)) / (hstep * hstep);
    }
    for (int a = 0; a < dim; ++a)
      for (int b = a + 1; b < dim; ++b) {
        const Eigen::VectorXd up = frame.basis.col(a) + frame.basis.col(b);
        const Eigen::VectorXd um = frame.basis.col(a) - frame.basis.col(b);
        auto second = [&](const Eigen::VectorXd& u) {
          return (along(y, u, hstep, z) - 2 * f0 + along(y, u, -hstep, z)) / (hstep * hstep);
        };
        fd_h(a, b) = fd_h(b, a) = 0.25 * (second(up) - second(um));
      }
    worst_grad = std::max(worst_grad, (fd_g - g).norm() / g.norm());
    worst_hess = std::max(worst_hess, (fd_h - h).norm() / h.norm());
  }
  CHECK(worst_grad < 1e-4);
  CHECK(worst_hess < 1e-4);
}

TEST_CASE("hessian dominates the coth comparison form", "[hyperbolic]") {
  Rng rng(14);
  const HPoint o = HPoint::origin(4);
  for (int i = 0; i < 200; ++i) {
    const HPoint y = random_point(o, 3.0, rng);
    const HPoint z = random_point(o, 3.0, rng);
    const TangentFrame frame = TangentFrame::at(y);
    const Eigen::VectorXd g = frame.coords(grad_distance(y, z).vec);
    const Eigen::MatrixXd comparison =
        (1.0 / std::tanh(distance(y, z))) * (Eigen::MatrixXd::Identity(4, 4) - g * g.transpose());
    CHECK((hess_distance(y, z, frame) - comparison).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("isometries", "[hyperbolic]") {
  const int dim = 3;
  const HPoint o = HPoint::origin(dim);
  CHECK(distance(HIsometry::identity(dim).apply(o), o) == 0.0);
  CHECK_THAT(distance(HIsometry::boost(dim, 2, 1.75).apply(o), o), WithinAbs(1.75, 1e-12));

  Eigen::MatrixXd not_iso = Eigen::MatrixXd::Identity(4, 4);
  not_iso(1, 2) = 0.1;
  CHECK_THROWS_AS(HIsometry::from_matrix(not_iso), InvalidPoint);
  CHECK_THROWS_AS(HIsometry::from_matrix(-Eigen::MatrixXd::Identity(4, 4)), InvalidPoint);

  Rng rng(15);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const HIsometry g = HIsometry::random(dim, rng);
    REQUIRE_NOTHROW(HIsometry::from_matrix(g.matrix()));
    const HPoint p = random_point(o, 3.0, rng);
    const HPoint q = random_point(o, 3.0, rng);
    worst = std::max(worst, std::abs(distance(g.apply(p), g.apply(q)) - distance(p, q)));
    REQUIRE(distance(g.inverse().apply(g.apply(p)), p) < 1e-9);
  }
  CHECK(worst < 1e-9);

  const HPoint c = random_point(o, 2.0, rng);
  CHECK(distance(HIsometry::translation_to(c).apply(o), c) < 1e-12);
}
