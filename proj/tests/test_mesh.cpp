#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "toruslab/errors.hpp"
#include "toruslab/mesh.hpp"

using namespace toruslab;

namespace {

MetricSpec conformal_x(double amp, double phase = 0.0) {
  return MetricSpec::conformal(Mat3::Identity(), {{amp, IVec3(1, 0, 0), phase}});
}

// relative to the largest |R|
double max_curvature_error(int n, double amp) {
  PeriodicGrid g(n);
  auto f = MetricField::sample(g, conformal_x(amp));
  auto r = scalar_curvature(f).r;
  double err = 0.0, scale = 0.0;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    double want = oracle::conformal_curvature(amp, 0.0, g.position(v)[0]);
    err = std::max(err, std::abs(r[v] - want));
    scale = std::max(scale, std::abs(want));
  }
  return err / scale;
}

MetricSpec warped(double b) {
  MetricSpec s;
  s.kind = MetricSpec::Kind::direct_fourier;
  s.components.push_back({2, 2, {{b, IVec3(1, 0, 0), 0.0}}});
  return s;
}

double max_warped_error(int n, double b) {
  PeriodicGrid g(n);
  auto f = MetricField::sample(g, warped(b));
  auto r = scalar_curvature(f).r;
  double err = 0.0, scale = 0.0;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    double want = oracle::warped_curvature(b, g.position(v)[0]);
    err = std::max(err, std::abs(r[v] - want));
    scale = std::max(scale, std::abs(want));
  }
  return err / scale;
}

}  // namespace

TEST_CASE("grid counts") {
  auto g = build_grid(4);
  CHECK(g.vertex_count() == 64);
  CHECK(g.edge_count() == 192);
  CHECK(g.face_count() == 192);
  CHECK(g.cell_count() == 64);
  CHECK(build_grid(16).vertex_count() == 4096);
  CHECK_THROWS_AS(build_grid(3), ResolutionError);
}

TEST_CASE("periodic indexing") {
  PeriodicGrid g(8);
  CHECK(g.vertex(-1, 0, 0) == g.vertex(7, 0, 0));
  CHECK(g.vertex(8, 9, -8) == g.vertex(0, 1, 0));
  auto c = g.cell_corners(g.cell(7, 7, 7));
  CHECK(c[7] == g.vertex(0, 0, 0));
  CHECK(c[1] == g.vertex(0, 7, 7));
}

TEST_CASE("total volume") {
  PeriodicGrid g(8);
  CHECK(total_volume(MetricField::sample(g, MetricSpec::constant(Mat3::Identity()))) == doctest::Approx(1.0).epsilon(1e-15));
  Mat3 d = Vec3(1, 4, 9).asDiagonal();
  CHECK(std::abs(total_volume(MetricField::sample(g, MetricSpec::constant(d))) - 6.0) <= 1e-12);

  // e^(2f) delta has volume density e^(3f); the x-average of e^(3a cos) is I0(3a).
  const double amp = 0.3;
  PeriodicGrid g16(16);
  double v = total_volume(MetricField::sample(g16, conformal_x(amp)));
  CHECK(std::abs(v - std::cyl_bessel_i(0.0, 3 * amp)) <= 1e-12);
}

TEST_CASE("non-SPD samples are rejected") {
  PeriodicGrid g(4);
  Mat3 bad = Vec3(1, -1, 1).asDiagonal();
  CHECK_THROWS_AS(MetricField::sample(g, MetricSpec::constant(bad)), MetricError);
}

TEST_CASE("constant metric has zero curvature") {
  PeriodicGrid g(8);
  Mat3 s;
  s << 2, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1;
  auto r = scalar_curvature(MetricField::sample(g, MetricSpec::constant(s))).r;
  for (double x : r) CHECK(std::abs(x) <= 1e-10);
}

TEST_CASE("conformal curvature converges at second order") {
  double e16 = max_curvature_error(16, 0.2);
  double e32 = max_curvature_error(32, 0.2);
  CHECK(e32 < 1e-2);
  double ratio = e16 / e32;
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("warped product curvature") {
  double e16 = max_warped_error(16, 0.4);
  double e32 = max_warped_error(32, 0.4);
  CHECK(e32 < 1e-2);
  CHECK(e16 / e32 >= 3.5);
  CHECK(e16 / e32 <= 4.5);
}

TEST_CASE("negative part") {
  ScalarCurvatureField r{{-2.0, 0.0, 3.0}};
  auto n = r.negative_part();
  CHECK(n[0] == 2.0);
  CHECK(n[1] == 0.0);
  CHECK(n[2] == 0.0);
}

TEST_CASE("lp norms") {
  PeriodicGrid g(6);
  auto f = MetricField::sample(g, MetricSpec::constant(Mat3::Identity()));
  std::vector<double> c(g.vertex_count(), -2.5);
  for (double p : {1.0, 2.0, 3.0, kInfinityNorm}) CHECK(lp_norm(c, p, f) == doctest::Approx(2.5).epsilon(1e-14));
  CellMask none(g.cell_count(), 0);
  CHECK(lp_norm(c, 2.0, f, &none) == 0.0);
  CHECK(lp_norm(c, kInfinityNorm, f, &none) == 0.0);
  CHECK_THROWS_AS(lp_norm(c, 0.5, f), ParameterError);

  // half the cells: the integral of a constant is its value times the region volume
  CellMask half(g.cell_count(), 0);
  for (std::size_t k = 0; k < half.size(); ++k) half[k] = g.coords(k)[0] < 3;
  CHECK(region_volume(f, half) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(integrate(f, c, &half) == doctest::Approx(-1.25).epsilon(1e-14));
}

TEST_CASE("covariant hessian of constant forms") {
  PeriodicGrid g(8);
  for (const Mat3& m : {Mat3(Mat3::Identity()), Mat3(Vec3(1, 4, 9).asDiagonal())}) {
    auto f = MetricField::sample(g, MetricSpec::constant(m));
    auto gamma = christoffel(f);
    std::vector<Vec3> a(g.vertex_count(), Vec3(1.0, -2.0, 0.5));
    for (const auto& h : covariant_hessian(f, gamma, a)) CHECK(h.cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("christoffel symbols of a conformal metric") {
  const double amp = 0.2;
  auto err = [&](int n) {
    PeriodicGrid g(n);
    auto f = MetricField::sample(g, conformal_x(amp));
    auto gamma = christoffel(f);
    double e = 0.0;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      double x = g.position(v)[0];
      Vec3 grad(-2 * oracle::kPi * amp * std::sin(2 * oracle::kPi * x), 0, 0);
      for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            e = std::max(e, std::abs(gamma[v][k](i, j) - oracle::conformal_christoffel(grad, k, i, j)));
    }
    return e;
  };
  const double scale = 2 * oracle::kPi * amp;
  double e16 = err(16), e32 = err(32);
  CHECK(e32 < 1e-2 * scale);
  CHECK(e16 / e32 > 3.5);

  // a = dtheta^1: H_ij = -Gamma^1_ij
  PeriodicGrid g(32);
  auto f = MetricField::sample(g, conformal_x(amp));
  std::vector<Vec3> a(g.vertex_count(), Vec3(1, 0, 0));
  auto hess = covariant_hessian(f, christoffel(f), a);
  double e = 0.0;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    double x = g.position(v)[0];
    Vec3 grad(-2 * oracle::kPi * amp * std::sin(2 * oracle::kPi * x), 0, 0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) e = std::max(e, std::abs(hess[v](i, j) + oracle::conformal_christoffel(grad, 0, i, j)));
  }
  CHECK(e < 1e-2 * scale);
}

TEST_CASE("hessian norm uses the inverse metric twice") {
  Mat3 gi = Vec3(1, 0.25, 4).asDiagonal();
  Mat3 h = Mat3::Zero();
  h(0, 1) = 2.0;
  // tr(Gi H Gi H^T) = gi00 * gi11 * 4
  CHECK(hessian_norm(gi, h) == doctest::Approx(std::sqrt(1 * 0.25 * 4.0)));
}

TEST_CASE("distance graph on the flat torus") {
  PeriodicGrid g(8);
  std::vector<Mat3> id(g.vertex_count(), Mat3::Identity());
  DistanceGraph dg(g, id);
  auto d = dg.shortest_paths({0});
  CHECK(d[g.vertex(1, 0, 0)] == doctest::Approx(g.h()));
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    auto c = g.coords(v);
    CHECK(d[v] == doctest::Approx(oracle::stencil_distance(8, IVec3(c[0], c[1], c[2]))).epsilon(1e-12));
  }
  // a mask that allows only the x = 0 layer of cells
  CellMask layer(g.cell_count(), 0);
  for (std::size_t c = 0; c < layer.size(); ++c) layer[c] = g.coords(c)[0] == 0;
  auto dm = dg.shortest_paths({0}, &layer);
  CHECK(std::isinf(dm[g.vertex(4, 0, 0)]));
  CHECK(dm[g.vertex(1, 3, 0)] == doctest::Approx(d[g.vertex(1, 3, 0)]));
}
