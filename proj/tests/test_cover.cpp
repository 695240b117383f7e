#include <doctest.h>

#include <cmath>

#include "toruslab/cover.hpp"
#include "toruslab/errors.hpp"
#include "toruslab/hodge.hpp"

using namespace toruslab;

namespace {

MetricField flat(int n) { return MetricField::sample(PeriodicGrid(n), MetricSpec::constant(Mat3::Identity())); }

void check_box(const FundamentalDomainCells& d, const IVec3& lo, const IVec3& hi) {
  for (const auto& c : d.cells())
    for (int a = 0; a < 3; ++a) {
      CHECK(c[a] >= lo[a]);
      CHECK(c[a] <= hi[a]);
    }
}

}  // namespace

TEST_CASE("lift of a coordinate function") {
  auto f = flat(8);
  auto a = harmonic_representative({IVec3(1, 0, 0)}, f);
  auto u = lift(a);
  for (int i = -8; i <= 16; i += 3)
    for (int j : {-3, 0, 5}) CHECK(u.value(IVec3(i, j, 2)) == doctest::Approx(i / 8.0).epsilon(1e-12));

  auto b = harmonic_representative({IVec3(2, -1, 0)}, f);
  auto ub = lift(b);
  CHECK(ub.value(IVec3(3, 8 + 1, 4)) == doctest::Approx(ub.value(IVec3(3, 1, 4)) - 1.0).epsilon(1e-12));
  CHECK(ub.value(IVec3(3 + 8, 1, 4)) == doctest::Approx(ub.value(IVec3(3, 1, 4)) + 2.0).epsilon(1e-12));
}

TEST_CASE("lift of a perturbed component is closed") {
  PeriodicGrid g(8);
  auto f = MetricField::sample(g, MetricSpec::conformal(Mat3::Identity(), {{0.2, IVec3(1, 1, 0), 0.1}}));
  auto a = harmonic_representative({IVec3(0, 1, 0)}, f);
  CHECK(loop_defect(a.edge_cochain(), 8) <= 1e-10);
  CHECK_NOTHROW(lift(a));

  auto broken = a.edge_cochain();
  broken[g.edge(0, 2, 3, 4)] += 0.01;
  CHECK(loop_defect(broken, 8) > 1e-3);
  CHECK_THROWS_AS(lift(broken, 8), ConsistencyError);
}

TEST_CASE("Dirichlet domain of flat tori is the centred cube") {
  const int n = 8;
  auto d = dirichlet_domain(flat(n), IVec3::Zero());
  check_box(d, IVec3::Constant(-n / 2), IVec3::Constant(n / 2 - 1));
  auto chk = verify_domain(d);
  CHECK(chk.covers);
  CHECK(chk.injective);
  CHECK(chk.connected);

  auto diag = MetricField::sample(PeriodicGrid(n), MetricSpec::constant(Vec3(1, 4, 9).asDiagonal()));
  check_box(dirichlet_domain(diag, IVec3::Zero()), IVec3::Constant(-n / 2), IVec3::Constant(n / 2 - 1));

  IVec3 p(3, 5, 1);
  check_box(dirichlet_domain(flat(n), p), p - IVec3::Constant(n / 2), p + IVec3::Constant(n / 2 - 1));
}

TEST_CASE("Dirichlet domains are deck equivariant") {
  PeriodicGrid g(8);
  auto f = MetricField::sample(g, MetricSpec::conformal(Mat3::Identity(), {{0.3, IVec3(1, 0, 1), 0.2}}));
  auto d0 = dirichlet_domain(f, IVec3(1, 2, 3));
  auto d1 = dirichlet_domain(f, IVec3(1 + 8, 2 - 16, 3));
  for (std::size_t c = 0; c < d0.translate.size(); ++c) CHECK(d1.translate[c] == d0.translate[c] + IVec3(1, -2, 0));
  auto t = translated(d0, IVec3(1, -2, 0));
  CHECK(t.translate == d1.translate);
}

TEST_CASE("covering constant of the unit cube") {
  auto f = flat(16);
  auto cube = unit_cube_domain(f.grid());
  CHECK(covering_constant(cube, 0.1, f) == 8);
  CHECK(covering_constant(cube, 0.4 * f.grid().h(), f) == 8);
  int prev = 0;
  for (double eta : {0.05, 0.1, 0.2, 0.3}) {
    int k = covering_constant(cube, eta, f);
    CHECK(k >= prev);
    prev = k;
  }
  CHECK_THROWS_AS(covering_constant(cube, 0.0, f), ParameterError);
}

TEST_CASE("oscillation bounds") {
  auto f = flat(8);
  auto a = harmonic_representative({IVec3(1, 0, 0)}, f);
  auto u = lift(a);
  auto cube = unit_cube_domain(f.grid());
  auto nb = eta_neighborhood(cube, 0.1, f);
  auto ok = oscillation_bounds(u, cube, nb, 1.0, f, 1.0);
  CHECK(ok.osc_domain == doctest::Approx(1.0));
  CHECK(ok.bound_domain == doctest::Approx(1.0));
  CHECK(all_pass(ok.verdicts));
  CHECK(ok.osc_neighborhood <= ok.bound_neighborhood);

  // sigma above the systole: the domain bound 1/2 is below the oscillation 1
  auto bad = oscillation_bounds(u, cube, nb, 2.0, f, 1.0);
  CHECK(bad.bound_domain == doctest::Approx(0.5));
  CHECK_FALSE(bad.verdicts[0].pass);
  CHECK_THROWS_AS(oscillation_bounds(u, cube, nb, 0.0, f, 1.0), ParameterError);
}

TEST_CASE("chain paths through translates") {
  const int n = 6;
  auto cube = unit_cube_domain(PeriodicGrid(n));
  std::vector<FundamentalDomainCells> ts;
  for (int b = 0; b < 8; ++b) ts.push_back(translated(cube, IVec3(b & 1, (b >> 1) & 1, (b >> 2) & 1)));

  auto one = domain_chain_path(IVec3(1, 1, 1), IVec3(4, 3, 2), ts);
  CHECK(one.labels.size() == 1);
  CHECK(chain_path_valid(one, ts));

  auto far = domain_chain_path(IVec3(0, 0, 0), IVec3(2 * n, 2 * n, 2 * n), ts);
  CHECK(far.labels.size() <= 8);
  CHECK(far.labels.size() >= 2);
  CHECK(far.reentry_free);
  CHECK(chain_path_valid(far, ts));
  CHECK(far.vertices.front() == IVec3(0, 0, 0));
  CHECK(far.vertices.back() == IVec3(2 * n, 2 * n, 2 * n));

  CHECK_THROWS_AS(domain_chain_path(IVec3(0, 0, 0), IVec3(5 * n, 0, 0), ts), DomainError);
}

TEST_CASE("window limits") {
  auto f = flat(8);
  CHECK_THROWS_AS(LiftedWindow(f, 0), ParameterError);
  CHECK_THROWS_AS(eta_neighborhood(unit_cube_domain(f.grid()), 5.0, f), WindowError);
}
