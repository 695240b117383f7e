#include "toruslab/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <sstream>

#include "toruslab/cover.hpp"
#include "toruslab/errors.hpp"
#include "toruslab/parallel.hpp"

namespace toruslab {

std::vector<std::size_t> region_vertices(const PeriodicGrid& grid, const CellMask* cells) {
  std::vector<std::size_t> out;
  if (!cells) {
    out.resize(grid.vertex_count());
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = v;
    return out;
  }
  if (cells->size() != grid.cell_count()) throw ShapeError("cell mask size does not match the grid");
  CellMask flag(grid.vertex_count(), 0);
  for (std::size_t c = 0; c < grid.cell_count(); ++c)
    if ((*cells)[c])
      for (auto v : grid.cell_corners(c)) flag[v] = 1;
  for (std::size_t v = 0; v < flag.size(); ++v)
    if (flag[v]) out.push_back(v);
  return out;
}

IntrinsicMetricSample intrinsic_distances(const DistanceGraph& graph, const CellMask* cells, int m) {
  auto verts = region_vertices(graph.grid(), cells);
  if (verts.empty()) throw ParameterError("region is empty");
  if (m < 1 || static_cast<std::size_t>(m) > verts.size())
    throw ParameterError("sample size " + std::to_string(m) + " outside [1, " + std::to_string(verts.size()) + "]");
  IntrinsicMetricSample out;
  std::vector<std::vector<double>> rows;
  std::vector<double> nearest(verts.size(), kInfinityNorm);
  std::size_t next = verts[0];
  for (int s = 0; s < m; ++s) {
    out.vertices.push_back(next);
    rows.push_back(graph.shortest_paths({next}, cells));
    const auto& d = rows.back();
    std::size_t arg = 0;
    double far = -1.0;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      double di = d[verts[i]];
      if (!std::isfinite(di)) throw ConnectivityError("region is not connected");
      nearest[i] = std::min(nearest[i], di);
      if (nearest[i] > far) {
        far = nearest[i];
        arg = i;
      }
    }
    if (far <= 0.0) break;
    next = verts[arg];
  }
  const std::size_t k = out.vertices.size();
  out.distances.resize(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) out.distances[i * k + j] = rows[i][out.vertices[j]];
  return out;
}

IntrinsicMetricSample intrinsic_distances(const CellMask& omega, const MetricField& field, int m) {
  DistanceGraph graph(field.grid(), field.values());
  bool full = std::all_of(omega.begin(), omega.end(), [](std::uint8_t f) { return f != 0; });
  return intrinsic_distances(graph, full ? nullptr : &omega, m);
}

IntrinsicMetricSample sample_distances(const DistanceGraph& graph, const std::vector<std::size_t>& vertices,
                                       const CellMask* cells) {
  IntrinsicMetricSample out;
  out.vertices = vertices;
  const std::size_t k = vertices.size();
  out.distances.resize(k * k);
  parallel_for(k, [&](std::size_t i) {
    auto d = graph.shortest_paths({vertices[i]}, cells);
    for (std::size_t j = 0; j < k; ++j) out.distances[i * k + j] = d[vertices[j]];
  });
  return out;
}

double gh_upper_bound(const IntrinsicMetricSample& a, const IntrinsicMetricSample& b,
                      const std::vector<std::pair<std::size_t, std::size_t>>& correspondence) {
  std::vector<char> ca(a.size(), 0), cb(b.size(), 0);
  for (auto [i, j] : correspondence) {
    if (i >= a.size() || j >= b.size()) throw CorrespondenceError("correspondence index out of range");
    ca[i] = 1;
    cb[j] = 1;
  }
  if (std::count(ca.begin(), ca.end(), 0) || std::count(cb.begin(), cb.end(), 0))
    throw CorrespondenceError("correspondence does not cover both samples");
  double dis = 0.0;
  for (auto [i, j] : correspondence)
    for (auto [k, l] : correspondence) dis = std::max(dis, std::abs(a.at(i, k) - b.at(j, l)));
  return 0.5 * dis;
}

double gh_upper_bound(const IntrinsicMetricSample& a, const IntrinsicMetricSample& b) {
  if (a.size() != b.size()) throw CorrespondenceError("identity correspondence needs equal sample sizes");
  std::vector<std::pair<std::size_t, std::size_t>> id(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) id[i] = {i, i};
  return gh_upper_bound(a, b, id);
}

double flat_torus_distance(const Mat3& gf, const Vec3& p, const Vec3& q) {
  Vec3 d = p - q;
  for (int t = 0; t < 3; ++t) d(t) -= std::floor(d(t) + 0.5);
  double best = kInfinityNorm;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j)
      for (int k = -2; k <= 2; ++k) {
        Vec3 e = d + Vec3(i, j, k);
        best = std::min(best, e.dot(gf * e));
      }
  return std::sqrt(std::max(best, 0.0));
}

Vec3 map_value(const HarmonicTorusMap& map, std::size_t v) {
  PeriodicGrid grid(map.components[0].n);
  Vec3 x = grid.position(v);
  Vec3 u;
  for (int j = 0; j < 3; ++j) {
    const auto& c = map.components[j];
    double val = c.cls.periods.cast<double>().dot(x) + c.potential[v];
    u(j) = val - std::floor(val);
  }
  return u;
}

LargeSubsetReport large_connected_subset(const CellMask& cells, double lambda, const MetricField& field) {
  if (!(lambda > 0.0)) throw ParameterError("Cheeger lower bound must be positive");
  const auto& grid = field.grid();
  const double vol = field.total_volume();
  LargeSubsetReport out;
  out.volume = region_volume(field, cells);
  out.boundary = boundary_area(cells, field);
  std::vector<std::size_t> sizes;
  auto label = face_components(grid, cells, sizes);
  out.component_volumes.assign(sizes.size(), 0.0);
  for (std::size_t c = 0; c < grid.cell_count(); ++c)
    if (label[c] >= 0) out.component_volumes[label[c]] += field.cell_volume(c);
  int best = -1;
  for (std::size_t i = 0; i < sizes.size(); ++i)
    if (out.component_volumes[i] >= 0.5 * vol && (best < 0 || out.component_volumes[i] > out.component_volumes[best]))
      best = static_cast<int>(i);
  if (best >= 0) {
    CellMask comp(grid.cell_count(), 0);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) comp[c] = label[c] == best ? 1 : 0;
    double cv = out.component_volumes[best];
    double cb = boundary_area(comp, field);
    double cc = std::max(vol - cv, 0.0);
    if (cc <= cb / lambda && cb <= out.boundary) {
      out.found = true;
      out.component = std::move(comp);
      out.component_volume = cv;
      out.component_boundary = cb;
      out.complement_volume = cc;
      out.verdicts.push_back(upper_bound("large_connected_subset:cheeger", cc, cb / lambda));
      out.verdicts.push_back(upper_bound("large_connected_subset:boundary", cb / lambda, out.boundary / lambda));
      return out;
    }
  }
  for (double v : out.component_volumes) out.fragment_sum += v;
  out.fragment_bound_holds = out.fragment_sum <= out.boundary / lambda;
  return out;
}

std::size_t Slice2D::vertex(int i, int j) const {
  int a = ((i % n) + n) % n, b = ((j % n) + n) % n;
  return static_cast<std::size_t>(a) + static_cast<std::size_t>(n) * b;
}

namespace {

using P2 = std::pair<int, int>;

const std::array<P2, 8> kDirs2 = {P2{1, 0}, P2{-1, 0}, P2{0, 1}, P2{0, -1}, P2{1, 1}, P2{-1, -1}, P2{1, -1}, P2{-1, 1}};

double edge_weight2(const Slice2D& s, int dx, int dy) {
  Eigen::Vector2d d(dx, dy);
  return s.h() * std::sqrt(d.dot(s.metric * d));
}

bool cell_in(const Slice2D& s, int i, int j) { return s.cells[s.vertex(i, j)] != 0; }

// Cells containing both endpoints of the edge from (i, j) along (dx, dy).
template <class F>
void edge_cells2(int i, int j, int dx, int dy, F&& f) {
  if (dx != 0 && dy != 0) {
    f(std::min(i, i + dx), std::min(j, j + dy));
  } else if (dx != 0) {
    f(std::min(i, i + dx), j);
    f(std::min(i, i + dx), j - 1);
  } else {
    f(i, std::min(j, j + dy));
    f(i - 1, std::min(j, j + dy));
  }
}

bool edge_in_a(const Slice2D& s, int i, int j, int dx, int dy) {
  bool in = false;
  edge_cells2(i, j, dx, dy, [&](int a, int b) { in = in || cell_in(s, a, b); });
  return in;
}

// Face-connected components of cells with flag == want.
std::vector<int> components2(const Slice2D& s, bool want, int& count) {
  const int n = s.n;
  std::vector<int> label(static_cast<std::size_t>(n) * n, -1);
  count = 0;
  for (int j0 = 0; j0 < n; ++j0)
    for (int i0 = 0; i0 < n; ++i0) {
      std::size_t c0 = s.vertex(i0, j0);
      if ((s.cells[c0] != 0) != want || label[c0] >= 0) continue;
      std::vector<P2> stack{{i0, j0}};
      label[c0] = count;
      while (!stack.empty()) {
        auto [i, j] = stack.back();
        stack.pop_back();
        for (int d = 0; d < 4; ++d) {
          int a = i + kDirs2[d].first, b = j + kDirs2[d].second;
          std::size_t c = s.vertex(a, b);
          if ((s.cells[c] != 0) == want && label[c] < 0) {
            label[c] = count;
            stack.push_back({a, b});
          }
        }
      }
      ++count;
    }
  return label;
}

// Fails if some hole reaches one of its cells through two different lifts.
void check_holes_bound(const Slice2D& s, const std::vector<int>& hole, int holes) {
  const int n = s.n;
  std::vector<P2> lift(static_cast<std::size_t>(n) * n, {0, 0});
  std::vector<char> seen(lift.size(), 0);
  for (int j0 = 0; j0 < n; ++j0)
    for (int i0 = 0; i0 < n; ++i0) {
      std::size_t c0 = s.vertex(i0, j0);
      if (hole[c0] < 0 || seen[c0]) continue;
      std::vector<P2> stack{{i0, j0}};
      seen[c0] = 1;
      lift[c0] = {i0, j0};
      while (!stack.empty()) {
        auto [i, j] = stack.back();
        stack.pop_back();
        for (int d = 0; d < 4; ++d) {
          int a = i + kDirs2[d].first, b = j + kDirs2[d].second;
          std::size_t c = s.vertex(a, b);
          if (hole[c] < 0) continue;
          if (!seen[c]) {
            seen[c] = 1;
            lift[c] = {a, b};
            stack.push_back({a, b});
          } else if (lift[c] != P2{a, b}) {
            throw TopologyError("a boundary component of A does not bound (hole wraps the slice)");
          }
        }
      }
    }
  (void)holes;
}

std::vector<P2> ambient_path(const Slice2D& s, P2 x, P2 y, double& length) {
  const int n = s.n;
  const std::size_t nv = static_cast<std::size_t>(n) * n;
  std::vector<double> dist(nv, kInfinityNorm);
  std::vector<int> via(nv, -1);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  std::size_t src = s.vertex(x.first, x.second), dst = s.vertex(y.first, y.second);
  dist[src] = 0.0;
  heap.push({0.0, src});
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    if (du > dist[u]) continue;
    if (u == dst) break;
    int i = static_cast<int>(u % n), j = static_cast<int>(u / n);
    for (int d = 0; d < 8; ++d) {
      auto [dx, dy] = kDirs2[d];
      std::size_t w = s.vertex(i + dx, j + dy);
      double nd = du + edge_weight2(s, dx, dy);
      if (nd < dist[w]) {
        dist[w] = nd;
        via[w] = d;
        heap.push({nd, w});
      }
    }
  }
  length = dist[dst];
  std::vector<int> steps;
  for (std::size_t u = dst; u != src;) {
    int d = via[u];
    steps.push_back(d);
    int i = static_cast<int>(u % n), j = static_cast<int>(u / n);
    u = s.vertex(i - kDirs2[d].first, j - kDirs2[d].second);
  }
  std::vector<P2> path{x};
  for (auto it = steps.rbegin(); it != steps.rend(); ++it)
    path.push_back({path.back().first + kDirs2[*it].first, path.back().second + kDirs2[*it].second});
  return path;
}

}  // namespace

double slice_path_length(const Slice2D& slice, const std::vector<std::pair<int, int>>& path, bool check_inside) {
  double len = 0.0;
  for (std::size_t t = 1; t < path.size(); ++t) {
    int dx = path[t].first - path[t - 1].first, dy = path[t].second - path[t - 1].second;
    if (std::abs(dx) > 1 || std::abs(dy) > 1 || (dx == 0 && dy == 0)) throw TopologyError("path steps are not grid edges");
    if (check_inside && !edge_in_a(slice, path[t - 1].first, path[t - 1].second, dx, dy))
      throw TopologyError("path leaves the closure of A");
    len += edge_weight2(slice, dx, dy);
  }
  return len;
}

DetourPath detour_bounded_path_2d(const Slice2D& slice, std::pair<int, int> x, std::pair<int, int> y) {
  const int n = slice.n;
  if (n < 2 || slice.cells.size() != static_cast<std::size_t>(n) * n) throw ShapeError("slice mask does not match n");
  int acount = 0, holes = 0;
  components2(slice, true, acount);
  if (acount != 1) throw TopologyError("A is empty or not connected");
  auto hole = components2(slice, false, holes);
  check_holes_bound(slice, hole, holes);

  auto corner_of = [&](P2 p, auto pred) {
    for (int a = -1; a <= 0; ++a)
      for (int b = -1; b <= 0; ++b)
        if (pred(slice.vertex(p.first + a, p.second + b))) return true;
    return false;
  };
  auto in_a = [&](std::size_t c) { return slice.cells[c] != 0; };
  if (!corner_of(x, in_a) || !corner_of(y, in_a)) throw ParameterError("endpoints must lie in the closure of A");

  DetourPath out;
  out.holes = holes;
  auto path = ambient_path(slice, x, y, out.ambient);

  std::vector<P2> result{path[0]};
  std::size_t i = 0;
  while (i + 1 < path.size()) {
    int dx = path[i + 1].first - path[i].first, dy = path[i + 1].second - path[i].second;
    if (edge_in_a(slice, path[i].first, path[i].second, dx, dy)) {
      result.push_back(path[++i]);
      continue;
    }
    int h = -1;
    edge_cells2(path[i].first, path[i].second, dx, dy, [&](int a, int b) {
      std::size_t c = slice.vertex(a, b);
      if (hole[c] >= 0) h = hole[c];
    });
    auto in_h = [&](std::size_t c) { return hole[c] == h; };
    auto allowed = [&](P2 p) { return corner_of(p, in_h) && corner_of(p, in_a); };
    std::size_t j = i;
    for (std::size_t t = i + 1; t < path.size(); ++t)
      if (allowed(path[t])) j = t;
    if (j == i) throw TopologyError("detour has no exit point on the hole boundary");
    // boundary walk of hole h from path[i] to path[j]
    std::map<P2, double> dist;
    std::map<P2, P2> prev;
    using Item = std::pair<double, P2>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    dist[path[i]] = 0.0;
    heap.push({0.0, path[i]});
    bool reached = false;
    while (!heap.empty()) {
      auto [du, u] = heap.top();
      heap.pop();
      if (du > dist[u]) continue;
      if (u == path[j]) {
        reached = true;
        break;
      }
      for (int d = 0; d < 8; ++d) {
        auto [ex, ey] = kDirs2[d];
        P2 w{u.first + ex, u.second + ey};
        if (std::abs(w.first - path[i].first) > 2 * n || std::abs(w.second - path[i].second) > 2 * n) continue;
        if (!allowed(w) || !edge_in_a(slice, u.first, u.second, ex, ey)) continue;
        double nd = du + edge_weight2(slice, ex, ey);
        auto it = dist.find(w);
        if (it == dist.end() || nd < it->second) {
          dist[w] = nd;
          prev[w] = u;
          heap.push({nd, w});
        }
      }
    }
    if (!reached) throw TopologyError("hole boundary does not connect the detour endpoints");
    std::vector<P2> walk;
    for (P2 p = path[j]; p != path[i]; p = prev[p]) walk.push_back(p);
    result.insert(result.end(), walk.rbegin(), walk.rend());
    i = j;
  }
  out.vertices = std::move(result);
  out.length = slice_path_length(slice, out.vertices, true);

  for (int jj = 0; jj < n; ++jj)
    for (int ii = 0; ii < n; ++ii) {
      bool a = cell_in(slice, ii, jj);
      if (a != cell_in(slice, ii + 1, jj)) out.boundary += edge_weight2(slice, 0, 1);
      if (a != cell_in(slice, ii, jj + 1)) out.boundary += edge_weight2(slice, 1, 0);
    }
  out.bound = out.ambient + out.boundary + 2.0 * slice.h();
  out.verdict = upper_bound("two_dim_curve_mod", out.length, out.bound);
  return out;
}

MetricAnalysis analyze_metric(const MetricField& field, const FamilyParams& params, const HarmonicTorusMap* map,
                              const SternReport* stern, int kappa) {
  MetricAnalysis out;
  out.volume = field.total_volume();
  out.map = map ? *map : build_map(field, params.solver);
  out.stern = stern ? *stern : stern_report(out.map, field);
  auto gram = pointwise_gram(out.map, field);
  out.approx = constant_approx(gram, field, params.lambda, out.stern);
  out.levels = level_sets(gram, out.approx.a, out.approx.tau, field);
  out.levels_nested = true;
  for (std::size_t c = 0; c < out.levels.e1.size(); ++c)
    if (out.levels.e1[c] && !out.levels.e2[c]) out.levels_nested = false;
  out.omega = extract_omega(gram, out.approx, field);
  omega_diagnostics(out.omega, out.map, field, gram, out.approx, out.stern.rneg_l2, params.injectivity_samples,
                    params.seed);

  const auto& grid = field.grid();
  DistanceGraph graph(grid, field.values());
  bool full = std::all_of(out.omega.omega.begin(), out.omega.omega.end(), [](std::uint8_t f) { return f != 0; });
  int m = std::min<int>(params.samples, static_cast<int>(region_vertices(grid, &out.omega.omega).size()));
  auto a = intrinsic_distances(graph, full ? nullptr : &out.omega.omega, m);
  DistanceGraph pulled(grid, pullback_flat(out.omega.g_flat, out.map));
  auto b = sample_distances(pulled, a.vertices);
  out.gh_bound = gh_upper_bound(a, b);
  IntrinsicMetricSample exact;
  exact.vertices = a.vertices;
  exact.distances.resize(a.distances.size());
  std::vector<Vec3> images(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) images[i] = map_value(out.map, a.vertices[i]);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      exact.distances[i * a.size() + j] = flat_torus_distance(out.omega.g_flat, images[i], images[j]);
  out.gh_exact = gh_upper_bound(a, exact);

  out.kappa = kappa >= 0 ? kappa : covering_constant(dirichlet_domain(field, IVec3::Zero()), params.eta, field);
  out.cheeger_upper = cheeger_slab_upper_bound(field);
  return out;
}

namespace {

SweepRow make_row(double eps, const MetricAnalysis& an, const FamilyParams& params) {
  SweepRow r;
  r.eps = eps;
  r.rneg_l2 = an.stern.rneg_l2;
  r.tau = an.approx.tau;
  r.omega_c_vol = an.omega.complement_volume;
  r.omega_bdry = an.omega.boundary;
  r.c0_deficit = an.omega.c0_deficit;
  r.gh_bound = an.gh_bound;
  r.gh_exact = an.gh_exact;
  r.volume = an.volume;
  r.degree = an.map.degree;
  r.stern_min_slack = an.stern.min_slack();
  r.int_det_omega = an.omega.int_det_omega;
  r.measured_b_c0 = an.omega.measured_b_c0;
  r.injectivity = an.omega.injectivity;
  r.kappa = an.kappa;
  r.cheeger_upper = an.cheeger_upper;
  r.tau_warning = an.omega.tau_warning;
  r.in_volume = an.volume <= params.cap_volume;
  r.in_rneg = an.stern.rneg_l2 <= params.cap_rneg;
  r.in_kappa = an.kappa <= params.cap_kappa;
  r.lambda_plausible = an.cheeger_upper >= params.lambda;
  return r;
}

// Constant matrix expressed in the frame of reference basis b0.
Mat3 in_frame(const Mat3& a, const IMat3& b, const IMat3& b0) {
  Mat3 m = b.cast<double>().inverse() * b0.cast<double>();
  m = m.array().round().matrix();
  return m.transpose() * a * m;
}

}  // namespace

SweepResult sweep(const MetricSpec& spec, int n, const std::vector<double>& eps, const FamilyParams& params) {
  if (eps.empty()) throw ParameterError("sweep needs at least one eps");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] >= 0.0)) throw ParameterError("eps values must be non-negative");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw ParameterError("eps list must be strictly decreasing");
  }
  PeriodicGrid grid(n);
  auto ref_field = MetricField::sample(grid, spec.scaled(0.0));
  auto ref = analyze_metric(ref_field, params);

  SweepResult out;
  out.rneg_floor = ref.stern.rneg_l2;
  out.rows.resize(eps.size());
  parallel_for(eps.size(), [&](std::size_t i) {
    try {
      auto field = MetricField::sample(grid, spec.scaled(eps[i]));
      auto an = analyze_metric(field, params);
      out.rows[i] = make_row(eps[i], an, params);
      Mat3 a = in_frame(an.approx.a, an.map.basis_transform, ref.map.basis_transform);
      out.rows[i].a_drift = (a - ref.approx.a).norm();
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "sweep eps[" << i << "] = " << eps[i] << ": " << e.what();
      throw Error(msg.str());
    }
  });

  auto monotone = [&](const std::string& col, auto get) {
    double worst = 0.0;
    for (std::size_t i = 1; i < out.rows.size(); ++i) worst = std::max(worst, get(out.rows[i]) - get(out.rows[i - 1]));
    out.verdicts.push_back(upper_bound("Dong-Song_conv_for_F:" + col, worst, 0.0, 1e-9));
  };
  monotone("rneg_l2", [](const SweepRow& r) { return r.rneg_l2; });
  monotone("c0_deficit", [](const SweepRow& r) { return r.c0_deficit; });
  monotone("gh_bound", [](const SweepRow& r) { return r.gh_bound; });
  monotone("a_drift", [](const SweepRow& r) { return r.a_drift; });

  double worst = 0.0;
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    double prev = out.rows[i - 1].rneg_l2 - out.rneg_floor, cur = out.rows[i].rneg_l2 - out.rneg_floor;
    if (!(out.rows[i].eps > 0.0) || !(prev > 0.0)) continue;
    double ratio = (cur / prev) * (out.rows[i - 1].eps / out.rows[i].eps);
    out.rneg_ratios.push_back(ratio);
    worst = std::max(worst, std::abs(ratio - 1.0));
  }
  if (!out.rneg_ratios.empty()) out.verdicts.push_back(upper_bound("Dong-Song_conv_for_F:rneg_linear", worst, 0.2));
  return out;
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream os;
  os.precision(17);
  os << "eps,rneg_l2,tau,omega_c_vol,omega_bdry,c0_deficit,gh_bound,a_drift\n";
  for (const auto& r : result.rows)
    os << r.eps << ',' << r.rneg_l2 << ',' << r.tau << ',' << r.omega_c_vol << ',' << r.omega_bdry << ','
       << r.c0_deficit << ',' << r.gh_bound << ',' << r.a_drift << '\n';
  return os.str();
}

}  // namespace toruslab
