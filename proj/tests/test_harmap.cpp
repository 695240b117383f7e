#include <doctest.h>

#include <cmath>

#include "toruslab/errors.hpp"
#include "toruslab/harmap.hpp"

using namespace toruslab;

namespace {

MetricSpec perturbed(double eps) {
  return MetricSpec::conformal(Mat3::Identity(), {{eps, IVec3(1, 0, 0), 0.0}, {eps, IVec3(0, 1, 1), 0.3}});
}

}  // namespace

TEST_CASE("identity map on the flat torus") {
  PeriodicGrid g(8);
  auto f = MetricField::sample(g, MetricSpec::constant(Mat3::Identity()));
  auto map = build_map(f);
  CHECK(std::abs(map.degree - 1.0) <= 1e-10);
  CHECK(std::abs(degree(map, f) - 1.0) <= 1e-10);
  CHECK(std::abs(map.basis_transform.cast<double>().determinant()) == doctest::Approx(1.0));
  for (int j = 0; j < 3; ++j)
    for (std::size_t v = 0; v < g.vertex_count(); v += 5)
      for (int a = 0; a < 3; ++a)
        CHECK(map.components[j].edge_value(a, v) ==
              doctest::Approx(map.basis_transform(a, j) * g.h()).epsilon(1e-12));
}

TEST_CASE("constant diagonal metric") {
  PeriodicGrid g(8);
  auto f = MetricField::sample(g, MetricSpec::constant(Vec3(1, 4, 9).asDiagonal()));
  auto map = build_map(f);
  CHECK(std::abs(map.degree - 1.0) <= 1e-10);
  // the wedge of constant forms is the integer determinant
  CHECK(map.basis_transform.cast<double>().determinant() == doctest::Approx(1.0));
  CHECK(std::abs(map.orientation) == 1);
  CHECK((map.standard_gram - Mat3(Vec3(6.0, 1.5, 2.0 / 3.0).asDiagonal())).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("degree is multilinear") {
  PeriodicGrid g(8);
  auto f = MetricField::sample(g, perturbed(0.1));
  auto map = build_map(f);
  auto c = map.components;
  double d = degree(c);
  c[0] = negated(c[0]);
  CHECK(degree(c) == doctest::Approx(-d).epsilon(1e-12));
  auto c2 = map.components;
  c2[1] = combine(map.standard, IVec3(2 * map.basis_transform(0, 1), 2 * map.basis_transform(1, 1),
                                      2 * map.basis_transform(2, 1)));
  CHECK(degree(c2) == doctest::Approx(2.0).epsilon(1e-9));
  auto cells = cell_jacobian_integrals(map.components);
  double s = 0.0;
  for (double x : cells) s += x;
  CHECK(s == doctest::Approx(degree(map.components)).epsilon(1e-14));
}

TEST_CASE("perturbed metric keeps degree one") {
  PeriodicGrid g(32);
  auto f = MetricField::sample(g, perturbed(0.1));
  auto map = build_map(f);
  CHECK(std::abs(map.degree - 1.0) <= 1e-3);
  CHECK(std::abs(map.degree - 1.0) <= deg_tol(32));

  auto st = stern_report(map, f);
  CHECK(st.rneg_l2 > 0.0);
  for (const auto& c : st.components) {
    CHECK(c.deficit > 0.0);
    CHECK(c.deficit <= c.rhs);
  }
  auto l3 = l3_inequality_check(st, 0.5, 0.1, 8, f.total_volume());
  for (const auto& t : l3.components) {
    CHECK(t.holds);
    CHECK(t.slack > 0.0);
  }
}

TEST_CASE("Stern deficit vanishes for constant metrics") {
  PeriodicGrid g(8);
  Mat3 s;
  s << 2, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1;
  auto f = MetricField::sample(g, MetricSpec::constant(s));
  auto st = stern_report(build_map(f), f);
  CHECK(st.rneg_l2 <= 1e-10);
  for (const auto& c : st.components) {
    CHECK(c.deficit <= 1e-10);
    CHECK(c.rhs <= 1e-10);
  }
  CHECK(st.min_slack() >= -1e-10);
}

TEST_CASE("L3 inequality structure") {
  // |du| = 1 on the unit torus: LHS 1, RHS at least 1
  auto t = l3_bound(1.0, 1.0, 0.0, 1.0, 0.1, 8, 1.0);
  CHECK(t.lhs == doctest::Approx(1.0));
  CHECK(t.rhs >= 1.0);
  CHECK(t.holds);

  double prev = -1e300;
  for (double c : {1.0, 2.0, 4.0}) {
    auto s = l3_bound(c, c, 0.0, 1.0, 0.1, 8, 1.0);
    CHECK(s.lhs == doctest::Approx(c));
    CHECK(s.slack >= prev);
    prev = s.slack;
  }
  CHECK_THROWS_AS(l3_bound(1, 1, 0, 0.0, 0.1, 8, 1), ParameterError);
  CHECK_THROWS_AS(l3_bound(1, 1, 0, 1.0, 0.0, 8, 1), ParameterError);
}
