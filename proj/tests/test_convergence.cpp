#include <doctest.h>

#include <cmath>
#include <queue>

#include "oracles.hpp"
#include "toruslab/convergence.hpp"
#include "toruslab/errors.hpp"

using namespace toruslab;

namespace {

MetricField flat(int n) { return MetricField::sample(PeriodicGrid(n), MetricSpec::constant(Mat3::Identity())); }

Slice2D disk_slice(int n, std::vector<std::pair<int, int>> centres, double r) {
  Slice2D s;
  s.n = n;
  s.cells.assign(static_cast<std::size_t>(n) * n, 1);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (auto [cx, cy] : centres) {
        double dx = i + 0.5 - cx, dy = j + 0.5 - cy;
        if (dx * dx + dy * dy < r * r) s.cells[i + n * j] = 0;
      }
  return s;
}

/// Euclidean 8-neighbour shortest path through the closure of A (an edge is usable when
/// some cell of A contains both endpoints).
double dijkstra_in_a(const Slice2D& s, std::pair<int, int> x, std::pair<int, int> y) {
  const int n = s.n;
  auto wrap = [n](int i) { return ((i % n) + n) % n; };
  auto in = [&](int i, int j) { return s.cells[wrap(i) + n * wrap(j)] != 0; };
  std::vector<double> d(static_cast<std::size_t>(n) * n, kInfinityNorm);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  int src = wrap(x.first) + n * wrap(x.second);
  d[src] = 0;
  pq.push({0, src});
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (du > d[u]) continue;
    int i = u % n, j = u / n;
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        if (!di && !dj) continue;
        bool ok;
        if (di && dj)
          ok = in(di > 0 ? i : i - 1, dj > 0 ? j : j - 1);
        else if (di)
          ok = in(di > 0 ? i : i - 1, j) || in(di > 0 ? i : i - 1, j - 1);
        else
          ok = in(i, dj > 0 ? j : j - 1) || in(i - 1, dj > 0 ? j : j - 1);
        if (!ok) continue;
        int w = wrap(i + di) + n * wrap(j + dj);
        double nd = du + std::sqrt(double(di * di + dj * dj)) / n;
        if (nd < d[w]) {
          d[w] = nd;
          pq.push({nd, w});
        }
      }
  }
  return d[wrap(y.first) + n * wrap(y.second)];
}

}  // namespace

TEST_CASE("intrinsic distances on the full flat torus") {
  auto f = flat(8);
  CellMask all(f.grid().cell_count(), 1);
  auto s = intrinsic_distances(all, f, 16);
  REQUIRE(s.size() == 16);
  CHECK(s.vertices[0] == 0);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      CHECK(s.at(i, j) == doctest::Approx(s.at(j, i)).epsilon(1e-12));
      auto a = f.grid().coords(s.vertices[i]), b = f.grid().coords(s.vertices[j]);
      CHECK(s.at(i, j) == doctest::Approx(oracle::stencil_distance(8, IVec3(a[0] - b[0], a[1] - b[1], a[2] - b[2]))));
      for (std::size_t k = 0; k < s.size(); ++k) CHECK(s.at(i, k) <= s.at(i, j) + s.at(j, k) + 1e-9);
    }
  // antipodal point of the origin: four diagonal steps
  DistanceGraph g(f.grid(), f.values());
  CHECK(g.shortest_paths({0})[f.grid().vertex(4, 4, 4)] == doctest::Approx(std::sqrt(3.0) / 2));
}

TEST_CASE("removing a slab lengthens intrinsic distances") {
  auto f = flat(8);
  CellMask omega(f.grid().cell_count(), 1);
  for (std::size_t c = 0; c < omega.size(); ++c) {
    auto x = f.grid().coords(c);
    if (x[0] == 4 && x[1] < 7) omega[c] = 0;
  }
  DistanceGraph g(f.grid(), f.values());
  auto in = intrinsic_distances(g, &omega, 24);
  auto amb = sample_distances(g, in.vertices);
  bool strict = false;
  for (std::size_t i = 0; i < in.size(); ++i)
    for (std::size_t j = 0; j < in.size(); ++j) {
      CHECK(in.at(i, j) >= amb.at(i, j) - 1e-12);
      if (in.at(i, j) > amb.at(i, j) + 1e-9) strict = true;
    }
  CHECK(strict);

  CellMask split(f.grid().cell_count(), 1);
  for (std::size_t c = 0; c < split.size(); ++c) {
    int x = f.grid().coords(c)[0];
    if (x == 2 || x == 6) split[c] = 0;
  }
  CHECK_THROWS_AS(intrinsic_distances(g, &split, 64), ConnectivityError);
}

TEST_CASE("GH bounds from correspondences") {
  auto f = flat(8);
  DistanceGraph g(f.grid(), f.values());
  auto a = intrinsic_distances(g, nullptr, 12);
  CHECK(gh_upper_bound(a, a) == 0.0);

  const double c = 1.5;
  std::vector<Mat3> scaled(f.grid().vertex_count(), c * c * Mat3::Identity());
  DistanceGraph gc(f.grid(), scaled);
  auto b = sample_distances(gc, a.vertices);
  double diam = 0.0;
  for (double d : a.distances) diam = std::max(diam, d);
  CHECK(gh_upper_bound(a, b) == doctest::Approx(0.5 * (c - 1) * diam));

  std::vector<std::pair<std::size_t, std::size_t>> partial{{0, 0}, {1, 1}};
  CHECK_THROWS_AS(gh_upper_bound(a, b, partial), CorrespondenceError);
  auto small = intrinsic_distances(g, nullptr, 5);
  CHECK_THROWS_AS(gh_upper_bound(a, small), CorrespondenceError);
}

TEST_CASE("flat torus distance") {
  Mat3 gf = Vec3(1, 4, 9).asDiagonal();
  CHECK(flat_torus_distance(gf, Vec3(0.1, 0, 0), Vec3(0.9, 0, 0)) == doctest::Approx(0.2));
  CHECK(flat_torus_distance(gf, Vec3(0, 0.1, 0.2), Vec3(0, 0.3, 0.9)) == doctest::Approx(std::sqrt(4 * 0.04 + 9 * 0.09)));
  CHECK(flat_torus_distance(Mat3::Identity(), Vec3(0.5, 0.5, 0.5), Vec3(0, 0, 0)) == doctest::Approx(std::sqrt(0.75)));
}

TEST_CASE("large connected subset") {
  auto f = flat(8);
  const auto& g = f.grid();
  CellMask all(g.cell_count(), 1);
  auto r = large_connected_subset(all, 3.0, f);
  CHECK(r.found);
  CHECK(r.boundary == 0.0);
  CHECK(r.complement_volume == 0.0);

  CellMask slab(g.cell_count(), 0);
  for (std::size_t c = 0; c < slab.size(); ++c) slab[c] = g.coords(c)[0] < 6;
  auto s = large_connected_subset(slab, 3.0, f);
  CHECK(s.found);
  CHECK(s.component_volume == doctest::Approx(0.75));
  CHECK(s.boundary == doctest::Approx(2.0));
  CHECK(all_pass(s.verdicts));

  // eight separated 2x2x2 blocks
  CellMask frag(g.cell_count(), 0);
  for (std::size_t c = 0; c < frag.size(); ++c) {
    auto x = g.coords(c);
    frag[c] = (x[0] % 4 < 2) && (x[1] % 4 < 2) && (x[2] % 4 < 2);
  }
  auto fr = large_connected_subset(frag, 3.0, f);
  CHECK_FALSE(fr.found);
  CHECK(fr.component_volumes.size() == 8);
  CHECK(fr.fragment_sum == doctest::Approx(8 * 8.0 / 512));
  CHECK(fr.boundary == doctest::Approx(8 * 24.0 / 64));
  CHECK(fr.fragment_bound_holds == (fr.fragment_sum <= fr.boundary / 3.0));
  CHECK_THROWS_AS(large_connected_subset(all, 0.0, f), ParameterError);
}

TEST_CASE("detour paths around holes") {
  const int n = 32;
  Slice2D full = disk_slice(n, {}, 0.0);
  auto p = detour_bounded_path_2d(full, {10, 16}, {22, 16});
  CHECK(p.holes == 0);
  CHECK(p.length == doctest::Approx(p.ambient));
  CHECK(p.length == doctest::Approx(12.0 / n));

  Slice2D one = disk_slice(n, {{16, 16}}, 4.0);
  auto q = detour_bounded_path_2d(one, {10, 16}, {22, 16});
  CHECK(q.holes == 1);
  CHECK(q.verdict.pass);
  CHECK(q.length <= q.ambient + q.boundary + 2.0 / n + 1e-12);
  CHECK(q.length >= dijkstra_in_a(one, {10, 16}, {22, 16}) - 1e-12);
  CHECK(q.length > q.ambient + 1e-9);
  CHECK(slice_path_length(one, q.vertices, true) == doctest::Approx(q.length));

  Slice2D two = disk_slice(n, {{12, 16}, {21, 15}}, 3.0);
  auto t = detour_bounded_path_2d(two, {6, 16}, {27, 16});
  CHECK(t.holes == 2);
  CHECK(t.verdict.pass);
  CHECK(t.length >= dijkstra_in_a(two, {6, 16}, {27, 16}) - 1e-12);
}

TEST_CASE("detour hypotheses") {
  const int n = 16;
  Slice2D band = disk_slice(n, {}, 0.0);
  for (int i = 0; i < n; ++i) band.cells[i + n * 8] = 0;
  CHECK_THROWS_AS(detour_bounded_path_2d(band, {2, 2}, {2, 12}), TopologyError);
  Slice2D two = band;
  for (int i = 0; i < n; ++i) two.cells[i + n * 2] = 0;
  CHECK_THROWS_AS(detour_bounded_path_2d(two, {2, 5}, {2, 12}), TopologyError);
}

TEST_CASE("sweep on a coarse grid") {
  FamilyParams p;
  p.samples = 16;
  p.injectivity_samples = 8;
  p.cap_volume = 0.5;
  auto spec = MetricSpec::conformal(Mat3::Identity(), {{1.0, IVec3(1, 0, 0), 0.0}, {1.0, IVec3(0, 1, 1), 0.3}});
  auto res = sweep(spec, 8, {0.1, 0.0}, p);
  REQUIRE(res.rows.size() == 2);
  const auto& zero = res.rows[1];
  CHECK(zero.eps == 0.0);
  CHECK(zero.rneg_l2 <= 1e-10);
  CHECK(zero.c0_deficit <= 1e-8);
  CHECK(zero.gh_bound <= 1e-8);
  CHECK(zero.a_drift <= 1e-10);
  CHECK_FALSE(zero.in_volume);
  CHECK(res.rows[0].rneg_l2 > 0.0);
  auto csv = sweep_csv(res);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

  CHECK_THROWS_AS(sweep(spec, 8, {0.1, 0.2}, p), ParameterError);
  CHECK_THROWS_AS(sweep(spec, 8, {}, p), ParameterError);
}
