#include <doctest.h>

#include <cmath>
#include <random>

#include "toruslab/approx.hpp"
#include "toruslab/errors.hpp"

using namespace toruslab;

namespace {

MetricSpec perturbed(double eps) {
  return MetricSpec::conformal(Mat3::Identity(), {{eps, IVec3(1, 0, 0), 0.0}, {eps, IVec3(0, 1, 1), 0.3}});
}

Mat3 skew() {
  Mat3 s;
  s << 2, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1;
  return s;
}

CellMask all_cells(const PeriodicGrid& g) { return CellMask(g.cell_count(), 1); }

}  // namespace

TEST_CASE("pointwise gram of constant metrics") {
  PeriodicGrid g(8);
  auto flat = MetricField::sample(g, MetricSpec::constant(Mat3::Identity()));
  for (const auto& m : pointwise_gram(build_map(flat), flat).values)
    CHECK((m - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-12);

  auto f = MetricField::sample(g, MetricSpec::constant(skew()));
  auto map = build_map(f);
  Mat3 b = map.basis_transform.cast<double>();
  Mat3 want = b.transpose() * skew().inverse() * b;
  for (const auto& m : pointwise_gram(map, f).values) CHECK((m - want).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("constant metrics are their own approximation") {
  PeriodicGrid g(8);
  auto f = MetricField::sample(g, MetricSpec::constant(skew()));
  auto map = build_map(f);
  auto st = stern_report(map, f);
  auto gram = pointwise_gram(map, f);
  auto ap = constant_approx(gram, f, 3.0, st);
  CHECK(ap.tau <= 1e-5);
  CHECK(ap.l1_deficit.cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(all_pass(ap.verdicts));
  CHECK_THROWS_AS(constant_approx(gram, f, 0.0, st), ParameterError);

  auto ls = level_sets(gram, ap.a, 0.5, f);
  CHECK(ls.volume_e1 == doctest::Approx(f.total_volume()));
  CHECK(ls.volume_e2 == doctest::Approx(f.total_volume()));
  CHECK(ls.half_volume_applies);
  CHECK(ls.half_volume_holds);

  auto om = extract_omega(gram, ap, f);
  CHECK(om.volume == doctest::Approx(f.total_volume()));
  CHECK(om.boundary == 0.0);
  CHECK(om.complement_volume == 0.0);

  omega_diagnostics(om, map, f, gram, ap, st.rneg_l2, 32, 3);
  CHECK(om.int_det_omega == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(om.sign_constant);
  CHECK(om.det_identity_defect <= 1e-10);
  CHECK(om.injectivity == 1);
  CHECK(om.c0_deficit <= 1e-10);
  // det a = det(B^T G^-1 B) = 1 / det G
  CHECK(om.det_a == doctest::Approx(1.0 / skew().determinant()).epsilon(1e-10));
}

TEST_CASE("deficit scales quadratically with the map") {
  PeriodicGrid g(8);
  auto f = MetricField::sample(g, perturbed(0.2));
  auto map = build_map(f);
  auto gram = pointwise_gram(map, f);
  auto c = map.components;
  for (auto& x : c) x = combine(map.standard, IVec3(2 * x.cls.periods));
  auto doubled = map_from_components(c);
  auto gram2 = pointwise_gram(doubled, f);
  Mat3 a(Mat3::Zero()), a2(Mat3::Zero());
  double vol = f.total_volume();
  std::vector<double> e(g.vertex_count());
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      for (std::size_t v = 0; v < e.size(); ++v) e[v] = gram.values[v](j, k);
      a(j, k) = integrate(f, e) / vol;
      for (std::size_t v = 0; v < e.size(); ++v) e[v] = gram2.values[v](j, k);
      a2(j, k) = integrate(f, e) / vol;
    }
  CHECK((a2 - 4 * a).cwiseAbs().maxCoeff() <= 1e-10);
  double l1 = integrate(f, l1_deviation(gram, a)), l1b = integrate(f, l1_deviation(gram2, a2));
  CHECK(l1 > 0.0);
  CHECK(l1b == doctest::Approx(4 * l1).epsilon(1e-10));
}

TEST_CASE("approximation on a perturbed metric") {
  PeriodicGrid g(16);
  auto f = MetricField::sample(g, perturbed(0.1));
  auto map = build_map(f);
  auto st = stern_report(map, f);
  auto gram = pointwise_gram(map, f);
  auto ap = constant_approx(gram, f, 3.0, st);
  CHECK(ap.tau > 0.0);
  CHECK(all_pass(ap.verdicts));
  CHECK(ap.min_eigenvalue > 0.0);

  // below the smallest nonzero deviation both level sets are empty
  auto none = level_sets(gram, ap.a, 1e-9, f);
  CHECK(none.volume_e1 == 0.0);
  CHECK(none.volume_e2 == 0.0);
  CHECK_FALSE(none.half_volume_holds);

  // E1 is inside E2 for every tau
  for (double tau : {0.01, 0.05, 0.2, 1.0}) {
    auto ls = level_sets(gram, ap.a, tau, f);
    for (std::size_t c = 0; c < ls.e1.size(); ++c)
      if (ls.e1[c]) CHECK(ls.e2[c]);
  }

  ConstantApprox small = ap;
  small.tau = 0.5;
  auto om = extract_omega(gram, small, f);
  CHECK(om.tau_warning);
  small.tau = 1e-9;
  CHECK_THROWS_AS(extract_omega(gram, small, f), ExtractionError);
}

TEST_CASE("Omega is the largest face component of a sublevel set") {
  PeriodicGrid g(8);
  CellMask m(g.cell_count(), 0);
  // a 3-cell bar and a separate single cell
  m[g.cell(1, 1, 1)] = m[g.cell(2, 1, 1)] = m[g.cell(3, 1, 1)] = 1;
  m[g.cell(6, 6, 6)] = 1;
  // edge contact only: not face adjacent
  m[g.cell(4, 2, 1)] = 1;
  std::vector<std::size_t> sizes;
  auto labels = face_components(g, m, sizes);
  CHECK(sizes.size() == 3);
  CHECK(labels[g.cell(0, 0, 0)] == -1);
  CHECK(labels[g.cell(1, 1, 1)] == labels[g.cell(3, 1, 1)]);
  CHECK(labels[g.cell(4, 2, 1)] != labels[g.cell(3, 1, 1)]);

  // periodic wrap joins x = 0 and x = 7
  CellMask w(g.cell_count(), 0);
  w[g.cell(0, 0, 0)] = w[g.cell(7, 0, 0)] = 1;
  face_components(g, w, sizes);
  CHECK(sizes.size() == 1);
}

TEST_CASE("boundary area and the slab Cheeger estimate") {
  PeriodicGrid g(8);
  auto f = MetricField::sample(g, MetricSpec::constant(Mat3::Identity()));
  CellMask half(g.cell_count(), 0);
  for (std::size_t c = 0; c < half.size(); ++c) half[c] = g.coords(c)[0] < 4;
  CHECK(boundary_area(half, f) == doctest::Approx(2.0));
  CHECK(boundary_area(all_cells(g), f) == 0.0);
  CHECK(cheeger_slab_upper_bound(f) == doctest::Approx(4.0));

  // faces normal to x have area sqrt(G22 G33 - G23^2) h^2
  auto d = MetricField::sample(g, MetricSpec::constant(Vec3(1, 4, 9).asDiagonal()));
  CHECK(boundary_area(half, d) == doctest::Approx(2.0 * 6.0));
}

TEST_CASE("injectivity counts preimages") {
  PeriodicGrid g(6);
  auto flat = MetricField::sample(g, MetricSpec::constant(Mat3::Identity()));
  auto map = build_map(flat);
  CHECK(injectivity_count(map, all_cells(g), 64, 1) == 1);

  auto f = MetricField::sample(g, MetricSpec::constant(skew()));
  CHECK(injectivity_count(build_map(f), all_cells(g), 64, 2) == 1);

  auto c = map.components;
  c[0] = combine(map.standard, IVec3(2 * c[0].cls.periods));
  auto doubled = map_from_components(c);
  CHECK(degree(doubled.components) == doctest::Approx(2.0));
  CHECK(injectivity_count(doubled, all_cells(g), 64, 3) == 2);
}

TEST_CASE("flat recovery") {
  PeriodicGrid g(8);
  auto flat = MetricField::sample(g, MetricSpec::constant(Mat3::Identity()));
  auto r = recover_flat(Mat3::Identity(), build_map(flat), flat, all_cells(g));
  CHECK((r.g_flat - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(r.c0_deficit <= 1e-12);

  auto f = MetricField::sample(g, MetricSpec::constant(skew()));
  auto map = build_map(f);
  Mat3 b = map.basis_transform.cast<double>();
  Mat3 a = b.transpose() * skew().inverse() * b;
  auto rs = recover_flat(a, map, f, all_cells(g));
  CHECK(rs.c0_deficit <= 1e-10);
  for (const auto& m : pullback_flat(rs.g_flat, map)) CHECK((m - skew()).cwiseAbs().maxCoeff() <= 1e-10);

  CHECK_THROWS_AS(recover_flat(1e-4 * Mat3::Identity(), map, f, all_cells(g)), RecoveryError);
}

TEST_CASE("determinant gap bound") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 200; ++t) {
    Mat3 a, b;
    for (int i = 0; i < 9; ++i) {
      a(i / 3, i % 3) = u(rng);
      b(i / 3, i % 3) = a(i / 3, i % 3) + 0.1 * u(rng);
    }
    a = 0.5 * (a + a.transpose());
    b = 0.5 * (b + b.transpose());
    CHECK(std::abs(a.determinant() - b.determinant()) <= det_gap_bound(a, b) + 1e-15);
  }
}
