#include "toruslab/cover.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <queue>
#include <sstream>

#include "toruslab/errors.hpp"

namespace toruslab {

namespace {

IVec3 floor_div3(const IVec3& p, int n) {
  return IVec3(floor_div(p[0], n), floor_div(p[1], n), floor_div(p[2], n));
}

bool lex_greater(const IVec3& a, const IVec3& b) {
  for (int i = 0; i < 3; ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

// Lower corners of the cells containing both p and p + d.
template <typename F>
void for_each_edge_cell(const IVec3& p, const IVec3& d, F&& f) {
  int lo[3], hi[3];
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0) {
      lo[a] = p[a] - 1;
      hi[a] = p[a];
    } else {
      lo[a] = hi[a] = p[a] + std::min(d[a], 0);
    }
  }
  for (int k = lo[2]; k <= hi[2]; ++k)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i)
        if (f(IVec3(i, j, k))) return;
}

}  // namespace

LiftedWindow::LiftedWindow(const MetricField& field, int half_width)
    : field_(&field), graph_(field.grid(), field.values()), w_(half_width), n_(field.grid().n()) {
  if (half_width < 1) throw ParameterError("window half-width must be at least 1");
}

std::size_t LiftedWindow::vertex_count() const {
  std::size_t l = static_cast<std::size_t>(vertices_per_axis());
  return l * l * l;
}

std::size_t LiftedWindow::cell_count() const {
  std::size_t l = static_cast<std::size_t>(cells_per_axis());
  return l * l * l;
}

bool LiftedWindow::vertex_inside(const IVec3& p) const {
  for (int a = 0; a < 3; ++a)
    if (p[a] < lo() || p[a] > lo() + cells_per_axis()) return false;
  return true;
}

bool LiftedWindow::cell_inside(const IVec3& c) const {
  for (int a = 0; a < 3; ++a)
    if (c[a] < lo() || c[a] >= lo() + cells_per_axis()) return false;
  return true;
}

bool LiftedWindow::cell_on_boundary(const IVec3& c) const {
  for (int a = 0; a < 3; ++a)
    if (c[a] == lo() || c[a] == lo() + cells_per_axis() - 1) return true;
  return false;
}

std::size_t LiftedWindow::vertex_index(const IVec3& p) const {
  std::size_t l = static_cast<std::size_t>(vertices_per_axis());
  return static_cast<std::size_t>(p[0] - lo()) + l * (static_cast<std::size_t>(p[1] - lo()) + l * (p[2] - lo()));
}

std::size_t LiftedWindow::cell_index(const IVec3& c) const {
  std::size_t l = static_cast<std::size_t>(cells_per_axis());
  return static_cast<std::size_t>(c[0] - lo()) + l * (static_cast<std::size_t>(c[1] - lo()) + l * (c[2] - lo()));
}

IVec3 LiftedWindow::vertex_coords(std::size_t idx) const {
  std::size_t l = static_cast<std::size_t>(vertices_per_axis());
  return IVec3(static_cast<int>(idx % l) + lo(), static_cast<int>((idx / l) % l) + lo(),
               static_cast<int>(idx / (l * l)) + lo());
}

IVec3 LiftedWindow::cell_coords(std::size_t idx) const {
  std::size_t l = static_cast<std::size_t>(cells_per_axis());
  return IVec3(static_cast<int>(idx % l) + lo(), static_cast<int>((idx / l) % l) + lo(),
               static_cast<int>(idx / (l * l)) + lo());
}

std::vector<double> LiftedWindow::shortest_paths(const std::vector<IVec3>& sources, double cutoff) const {
  const auto& grid = field_->grid();
  const auto& dirs = DistanceGraph::directions();
  std::vector<double> dist(vertex_count(), kInfinityNorm);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (const auto& s : sources) {
    if (!vertex_inside(s)) throw WindowError("source vertex outside the lifted window");
    std::size_t i = vertex_index(s);
    if (dist[i] > 0.0) {
      dist[i] = 0.0;
      heap.push({0.0, i});
    }
  }
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    if (du > dist[u]) continue;
    IVec3 p = vertex_coords(u);
    std::size_t base = grid.vertex(p[0], p[1], p[2]);
    for (int d = 0; d < 26; ++d) {
      IVec3 q = p + dirs[d];
      if (!vertex_inside(q)) continue;
      double nd = du + graph_.weight(base, d);
      if (nd > cutoff) continue;
      std::size_t qi = vertex_index(q);
      if (nd < dist[qi]) {
        dist[qi] = nd;
        heap.push({nd, qi});
      }
    }
  }
  return dist;
}

double LiftedFunction::value(const IVec3& p) const {
  PeriodicGrid g(n);
  IVec3 q = floor_div3(p, n);
  return base[g.vertex(p[0], p[1], p[2])] + static_cast<double>(periods.dot(q));
}

namespace {

double cochain_at(const std::vector<double>& c, std::size_t count, int axis, std::size_t v) {
  return c[static_cast<std::size_t>(axis) * count + v];
}

}  // namespace

double loop_defect(const std::vector<double>& edge_cochain, int n) {
  PeriodicGrid g(n);
  const std::size_t nv = g.vertex_count();
  if (edge_cochain.size() != g.edge_count()) throw ShapeError("edge cochain size mismatch");
  // Path integrals along x, then y, then z from vertex 0.
  std::vector<double> base(nv, 0.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        std::size_t v = g.vertex(i, j, k);
        if (k > 0) base[v] = base[g.vertex(i, j, k - 1)] + cochain_at(edge_cochain, nv, 2, g.vertex(i, j, k - 1));
        else if (j > 0) base[v] = base[g.vertex(i, j - 1, 0)] + cochain_at(edge_cochain, nv, 1, g.vertex(i, j - 1, 0));
        else if (i > 0) base[v] = base[g.vertex(i - 1, 0, 0)] + cochain_at(edge_cochain, nv, 0, g.vertex(i - 1, 0, 0));
      }
  Vec3 periods = Vec3::Zero();
  for (int axis = 0; axis < 3; ++axis)
    for (int s = 0; s < n; ++s) {
      int c[3] = {0, 0, 0};
      c[axis] = s;
      periods[axis] += cochain_at(edge_cochain, nv, axis, g.vertex(c[0], c[1], c[2]));
    }
  double defect = 0.0;
  for (int axis = 0; axis < 3; ++axis)
    for (std::size_t v = 0; v < nv; ++v) {
      auto c = g.coords(v);
      int e[3] = {0, 0, 0};
      e[axis] = 1;
      bool wraps = c[axis] == n - 1;
      double head = base[g.shift(v, e[0], e[1], e[2])] + (wraps ? periods[axis] : 0.0);
      defect = std::max(defect, std::abs(head - base[v] - cochain_at(edge_cochain, nv, axis, v)));
    }
  return defect;
}

LiftedFunction lift(const std::vector<double>& edge_cochain, int n, double tol) {
  PeriodicGrid g(n);
  const std::size_t nv = g.vertex_count();
  if (edge_cochain.size() != g.edge_count()) throw ShapeError("edge cochain size mismatch");
  LiftedFunction out;
  out.n = n;
  Vec3 periods = Vec3::Zero();
  for (int axis = 0; axis < 3; ++axis)
    for (int s = 0; s < n; ++s) {
      int c[3] = {0, 0, 0};
      c[axis] = s;
      periods[axis] += cochain_at(edge_cochain, nv, axis, g.vertex(c[0], c[1], c[2]));
    }
  double scale = 1.0;
  for (double x : edge_cochain) scale = std::max(scale, std::abs(x) * n);
  for (int a = 0; a < 3; ++a) {
    double r = std::round(periods[a]);
    if (std::abs(periods[a] - r) > tol * scale) {
      std::ostringstream msg;
      msg << "axis period " << periods[a] << " is not an integer";
      throw ConsistencyError(msg.str());
    }
    out.periods[a] = static_cast<int>(r);
  }
  double defect = loop_defect(edge_cochain, n);
  if (defect > tol * scale) {
    std::ostringstream msg;
    msg << "cochain is not closed: max loop defect " << defect;
    throw ConsistencyError(msg.str());
  }
  out.base.assign(nv, 0.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        std::size_t v = g.vertex(i, j, k);
        if (k > 0) out.base[v] = out.base[g.vertex(i, j, k - 1)] + cochain_at(edge_cochain, nv, 2, g.vertex(i, j, k - 1));
        else if (j > 0) out.base[v] = out.base[g.vertex(i, j - 1, 0)] + cochain_at(edge_cochain, nv, 1, g.vertex(i, j - 1, 0));
        else if (i > 0) out.base[v] = out.base[g.vertex(i - 1, 0, 0)] + cochain_at(edge_cochain, nv, 0, g.vertex(i - 1, 0, 0));
      }
  return out;
}

LiftedFunction lift(const HarmonicOneForm& form, double tol) {
  LiftedFunction out = lift(form.edge_cochain(), form.n, tol);
  if (out.periods != form.cls.periods) throw ConsistencyError("lifted periods differ from the class periods");
  return out;
}

bool FundamentalDomainCells::contains_cell(const IVec3& cell) const {
  PeriodicGrid g(n);
  return translate[g.cell(cell[0], cell[1], cell[2])] == floor_div3(cell, n);
}

bool FundamentalDomainCells::contains_vertex(const IVec3& p) const {
  for (int b = 0; b < 8; ++b)
    if (contains_cell(p - IVec3(b & 1, (b >> 1) & 1, (b >> 2) & 1))) return true;
  return false;
}

IVec3 FundamentalDomainCells::cell_coords(std::size_t base_cell) const {
  PeriodicGrid g(n);
  auto c = g.coords(base_cell);
  return IVec3(c[0], c[1], c[2]) + n * translate[base_cell];
}

std::vector<IVec3> FundamentalDomainCells::cells() const {
  std::vector<IVec3> out(translate.size());
  for (std::size_t c = 0; c < translate.size(); ++c) out[c] = cell_coords(c);
  return out;
}

FundamentalDomainCells unit_cube_domain(const PeriodicGrid& grid) {
  FundamentalDomainCells d;
  d.kind = FundamentalDomainCells::Kind::unit_cube;
  d.n = grid.n();
  d.translate.assign(grid.cell_count(), IVec3::Zero());
  return d;
}

FundamentalDomainCells translated(const FundamentalDomainCells& domain, const IVec3& nu) {
  FundamentalDomainCells d = domain;
  d.basepoint += domain.n * nu;
  for (auto& t : d.translate) t += nu;
  return d;
}

FundamentalDomainCells dirichlet_domain(const MetricField& field, const IVec3& basepoint, int window) {
  const auto& grid = field.grid();
  const int n = grid.n();
  const IVec3 shift = floor_div3(basepoint, n);
  const IVec3 local = basepoint - n * shift;
  const Mat3 g0 = field.at(grid.vertex(local[0], local[1], local[2]));
  for (int w = std::max(window, 1); w <= 2; ++w) {
    LiftedWindow win(field, w);
    auto dist = win.shortest_paths({local});
    FundamentalDomainCells d;
    d.kind = FundamentalDomainCells::Kind::dirichlet;
    d.n = n;
    d.basepoint = basepoint;
    d.translate.assign(grid.cell_count(), IVec3::Zero());
    bool touches = false;
    for (std::size_t c = 0; c < grid.cell_count() && !touches; ++c) {
      auto bc = grid.coords(c);
      double best = kInfinityNorm, best_e = kInfinityNorm;
      IVec3 best_mu = IVec3::Zero();
      for (int mz = -w; mz <= w; ++mz)
        for (int my = -w; my <= w; ++my)
          for (int mx = -w; mx <= w; ++mx) {
            IVec3 mu(mx, my, mz);
            IVec3 cell = IVec3(bc[0], bc[1], bc[2]) + n * mu;
            double s = 0.0;
            for (int b = 0; b < 8; ++b) s += dist[win.vertex_index(cell + IVec3(b & 1, (b >> 1) & 1, (b >> 2) & 1))];
            if (!std::isfinite(s)) continue;
            // graph-norm ties are broken by the coordinate distance of the cell centre
            Vec3 off = (cell.cast<double>() + Vec3::Constant(0.5) - local.cast<double>()) * grid.h();
            double e = off.dot(g0 * off);
            double tie = 1e-9 * std::max(best, 1e-300), tie_e = 1e-9 * std::max(best_e, 1e-300);
            bool take = !std::isfinite(best) || s < best - tie;
            if (!take && std::abs(s - best) <= tie)
              take = e < best_e - tie_e || (std::abs(e - best_e) <= tie_e && lex_greater(mu, best_mu));
            if (take) {
              best = std::min(best, s);
              best_e = e;
              best_mu = mu;
            }
          }
      IVec3 cell = IVec3(bc[0], bc[1], bc[2]) + n * best_mu;
      if (!std::isfinite(best) || win.cell_on_boundary(cell)) touches = true;
      d.translate[c] = best_mu + shift;
    }
    if (!touches) return d;
  }
  throw WindowError("Dirichlet assignment reaches the boundary of the largest window");
}

DomainCheck verify_domain(const FundamentalDomainCells& domain) {
  PeriodicGrid g(domain.n);
  DomainCheck out;
  out.covers = domain.translate.size() == g.cell_count();
  // one lift per base cell by construction; confirm no two stored cells coincide
  std::map<std::array<int, 3>, int> seen;
  auto cells = domain.cells();
  out.injective = true;
  for (const auto& c : cells) {
    auto key = std::array<int, 3>{c[0], c[1], c[2]};
    if (seen[key]++) out.injective = false;
  }
  // 6-connectivity BFS over the domain cells
  std::map<std::array<int, 3>, std::size_t> index;
  for (std::size_t i = 0; i < cells.size(); ++i) index[{cells[i][0], cells[i][1], cells[i][2]}] = i;
  std::vector<char> visited(cells.size(), 0);
  std::deque<std::size_t> queue{0};
  visited[0] = 1;
  std::size_t reached = 1, boundary = 0;
  const IVec3 faces[6] = {IVec3(1, 0, 0), IVec3(-1, 0, 0), IVec3(0, 1, 0), IVec3(0, -1, 0), IVec3(0, 0, 1), IVec3(0, 0, -1)};
  for (const auto& c : cells)
    for (const auto& f : faces)
      if (!domain.contains_cell(c + f)) {
        ++boundary;
        break;
      }
  while (!queue.empty()) {
    std::size_t i = queue.front();
    queue.pop_front();
    for (const auto& f : faces) {
      IVec3 q = cells[i] + f;
      auto it = index.find({q[0], q[1], q[2]});
      if (it != index.end() && !visited[it->second]) {
        visited[it->second] = 1;
        ++reached;
        queue.push_back(it->second);
      }
    }
  }
  out.connected = reached == cells.size();
  out.boundary_fraction = static_cast<double>(boundary) / static_cast<double>(cells.size());
  return out;
}

Neighborhood eta_neighborhood(const FundamentalDomainCells& domain, double eta, const MetricField& field,
                              int window) {
  if (!(eta > 0.0)) throw ParameterError("eta must be positive");
  const auto& grid = field.grid();
  if (domain.n != grid.n()) throw ShapeError("domain and metric grids differ");
  const int n = grid.n();
  const IVec3 shift = floor_div3(domain.basepoint, n);
  for (int w = std::max(window, 1); w <= 2; ++w) {
    LiftedWindow win(field, w);
    std::vector<IVec3> sources;
    bool fits = true;
    for (const auto& c : domain.cells()) {
      IVec3 local = c - n * shift;
      if (!win.cell_inside(local) || win.cell_on_boundary(local)) {
        fits = false;
        break;
      }
      for (int b = 0; b < 8; ++b) sources.push_back(local + IVec3(b & 1, (b >> 1) & 1, (b >> 2) & 1));
    }
    if (!fits) continue;
    auto dist = win.shortest_paths(sources, eta);
    Neighborhood out;
    out.window = w;
    bool touches = false;
    std::vector<int> count(grid.cell_count(), 0);
    for (std::size_t ci = 0; ci < win.cell_count() && !touches; ++ci) {
      IVec3 c = win.cell_coords(ci);
      bool in = false;
      for (int b = 0; b < 8 && !in; ++b) in = dist[win.vertex_index(c + IVec3(b & 1, (b >> 1) & 1, (b >> 2) & 1))] <= eta;
      if (!in) continue;
      if (win.cell_on_boundary(c)) touches = true;
      out.cells.push_back(c + n * shift);
      ++count[grid.cell(c[0], c[1], c[2])];
    }
    if (touches) continue;
    for (std::size_t vi = 0; vi < win.vertex_count(); ++vi)
      if (dist[vi] <= eta) out.vertices.push_back(win.vertex_coords(vi) + n * shift);
    out.kappa = *std::max_element(count.begin(), count.end());
    return out;
  }
  throw WindowError("eta-neighbourhood reaches the boundary of the largest window");
}

int covering_constant(const FundamentalDomainCells& domain, double eta, const MetricField& field) {
  return eta_neighborhood(domain, eta, field).kappa;
}

OscillationReport oscillation_bounds(const LiftedFunction& u, const FundamentalDomainCells& domain,
                                     const Neighborhood& nbhd, double sigma, const MetricField& field,
                                     double du_l2, double tol) {
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  OscillationReport rep;
  double lo = kInfinityNorm, hi = -kInfinityNorm;
  for (const auto& c : domain.cells())
    for (int b = 0; b < 8; ++b) {
      double v = u.value(c + IVec3(b & 1, (b >> 1) & 1, (b >> 2) & 1));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  rep.osc_domain = hi - lo;
  for (const auto& p : nbhd.vertices) {
    double v = u.value(p);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  rep.osc_neighborhood = hi - lo;
  rep.bound_domain = std::sqrt(field.total_volume()) * du_l2 / sigma;
  rep.bound_neighborhood = nbhd.kappa * rep.bound_domain;
  rep.verdicts.push_back(upper_bound("u_bounded_fund_domain", rep.osc_domain, rep.bound_domain, tol));
  rep.verdicts.push_back(upper_bound("sup-inf_nhbd_bound", rep.osc_neighborhood, rep.bound_neighborhood, tol));
  return rep;
}

namespace {

struct Box {
  IVec3 lo, hi;  // inclusive vertex bounds
  std::size_t size() const {
    return static_cast<std::size_t>(hi[0] - lo[0] + 1) * (hi[1] - lo[1] + 1) * (hi[2] - lo[2] + 1);
  }
  bool inside(const IVec3& p) const {
    for (int a = 0; a < 3; ++a)
      if (p[a] < lo[a] || p[a] > hi[a]) return false;
    return true;
  }
  std::size_t index(const IVec3& p) const {
    std::size_t lx = hi[0] - lo[0] + 1, ly = hi[1] - lo[1] + 1;
    return static_cast<std::size_t>(p[0] - lo[0]) + lx * (static_cast<std::size_t>(p[1] - lo[1]) + ly * (p[2] - lo[2]));
  }
};

bool edge_in(const FundamentalDomainCells& d, const IVec3& p, const IVec3& dir) {
  bool found = false;
  for_each_edge_cell(p, dir, [&](const IVec3& c) { return found = d.contains_cell(c); });
  return found;
}

// BFS from `from` to `to`; edges must lie in an allowed translate; `blocked` vertices
// (other than the start) are avoided.
std::vector<IVec3> bfs(const Box& box, const IVec3& from, const IVec3& to,
                       const std::function<bool(const IVec3&, const IVec3&)>& edge_ok,
                       const std::function<bool(const IVec3&)>& blocked) {
  const auto& dirs = DistanceGraph::directions();
  std::vector<long> parent(box.size(), -1);
  std::deque<IVec3> queue{from};
  parent[box.index(from)] = static_cast<long>(box.index(from));
  while (!queue.empty()) {
    IVec3 p = queue.front();
    queue.pop_front();
    if (p == to) break;
    for (const auto& d : dirs) {
      IVec3 q = p + d;
      if (!box.inside(q) || parent[box.index(q)] >= 0) continue;
      if (blocked(q)) continue;
      if (!edge_ok(p, d)) continue;
      parent[box.index(q)] = static_cast<long>(box.index(p));
      queue.push_back(q);
    }
  }
  if (parent[box.index(to)] < 0) return {};
  std::vector<IVec3> path;
  std::size_t lx = box.hi[0] - box.lo[0] + 1, ly = box.hi[1] - box.lo[1] + 1;
  std::size_t i = box.index(to);
  while (true) {
    IVec3 p(static_cast<int>(i % lx) + box.lo[0], static_cast<int>((i / lx) % ly) + box.lo[1],
            static_cast<int>(i / (lx * ly)) + box.lo[2]);
    path.push_back(p);
    if (static_cast<long>(i) == parent[i]) break;
    i = static_cast<std::size_t>(parent[i]);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

ChainPath domain_chain_path(const IVec3& x0, const IVec3& x1,
                            const std::vector<FundamentalDomainCells>& translates) {
  if (translates.empty()) throw DomainError("no translates supplied");
  const int n = translates[0].n;
  Box box{IVec3::Constant(1 << 30), IVec3::Constant(-(1 << 30))};
  for (const auto& t : translates) {
    if (t.n != n) throw ShapeError("translates live on different grids");
    for (const auto& c : t.cells()) {
      box.lo = box.lo.cwiseMin(c);
      box.hi = box.hi.cwiseMax(c + IVec3::Ones());
    }
  }
  auto in_union = [&](const IVec3& p) {
    for (const auto& t : translates)
      if (t.contains_vertex(p)) return true;
    return false;
  };
  if (!box.inside(x0) || !box.inside(x1) || !in_union(x0) || !in_union(x1))
    throw DomainError("path endpoints must lie in the union of the translates");

  auto union_edge = [&](const IVec3& p, const IVec3& d) {
    for (const auto& t : translates)
      if (edge_in(t, p, d)) return true;
    return false;
  };
  std::vector<IVec3> path = bfs(box, x0, x1, union_edge, [](const IVec3&) { return false; });
  if (path.empty()) throw DomainError("endpoints are not connected in the union of the translates");

  ChainPath out;
  std::vector<char> used(translates.size(), 0);
  auto blocked_by_used = [&](const IVec3& p) {
    for (std::size_t t = 0; t < translates.size(); ++t)
      if (used[t] && translates[t].contains_vertex(p)) return true;
    return false;
  };
  std::vector<IVec3> result{path[0]};
  std::size_t pos = 0;
  while (true) {
    if (path.size() == 1 && out.labels.empty()) {
      for (std::size_t t = 0; t < translates.size(); ++t)
        if (translates[t].contains_vertex(path[0])) {
          out.labels.push_back(static_cast<int>(t));
          out.segment_starts.push_back(0);
          break;
        }
      break;
    }
    if (pos + 1 >= path.size()) break;
    // translate carrying the next edge
    int chosen = -1;
    for (std::size_t t = 0; t < translates.size() && chosen < 0; ++t)
      if (!used[t] && edge_in(translates[t], path[pos], path[pos + 1] - path[pos])) chosen = static_cast<int>(t);
    if (chosen < 0) {
      out.reentry_free = false;
      for (std::size_t t = 0; t < translates.size() && chosen < 0; ++t)
        if (edge_in(translates[t], path[pos], path[pos + 1] - path[pos])) chosen = static_cast<int>(t);
    }
    const auto& tr = translates[chosen];
    std::size_t last = pos;
    for (std::size_t i = pos; i < path.size(); ++i)
      if (tr.contains_vertex(path[i])) last = i;
    auto inside_edge = [&](const IVec3& p, const IVec3& d) { return edge_in(tr, p, d); };
    std::vector<IVec3> seg = bfs(box, path[pos], path[last], inside_edge, blocked_by_used);
    if (seg.empty()) {
      out.reentry_free = false;
      seg = bfs(box, path[pos], path[last], inside_edge, [](const IVec3&) { return false; });
    }
    out.labels.push_back(chosen);
    out.segment_starts.push_back(result.size() - 1);
    result.insert(result.end(), seg.begin() + 1, seg.end());
    used[chosen] = 1;
    std::vector<IVec3> rest(path.begin() + static_cast<long>(last), path.end());
    path = std::move(rest);
    pos = 0;
    if (path.size() == 1) break;
  }
  out.vertices = std::move(result);
  return out;
}

bool chain_path_valid(const ChainPath& path, const std::vector<FundamentalDomainCells>& translates) {
  if (path.labels.size() != path.segment_starts.size() || path.vertices.empty()) return false;
  std::vector<int> labels = path.labels;
  std::sort(labels.begin(), labels.end());
  if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) return false;
  for (std::size_t s = 0; s < path.labels.size(); ++s) {
    const auto& tr = translates[path.labels[s]];
    std::size_t begin = path.segment_starts[s];
    std::size_t end = s + 1 < path.labels.size() ? path.segment_starts[s + 1] : path.vertices.size() - 1;
    for (std::size_t i = begin; i <= end; ++i)
      if (!tr.contains_vertex(path.vertices[i])) return false;
    for (std::size_t i = begin; i < end; ++i)
      if (!edge_in(tr, path.vertices[i], path.vertices[i + 1] - path.vertices[i])) return false;
  }
  return true;
}

}  // namespace toruslab
