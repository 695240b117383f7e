#include "toruslab/mesh.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <queue>
#include <sstream>

#include "toruslab/errors.hpp"

namespace toruslab {

PeriodicGrid::PeriodicGrid(int n) : n_(n), h_(0.0), count_(0) {
  if (n < 4) {
    std::ostringstream msg;
    msg << "grid resolution must be at least 4, got " << n;
    throw ResolutionError(msg.str());
  }
  h_ = 1.0 / n;
  count_ = static_cast<std::size_t>(n) * n * n;
}

std::array<std::size_t, 8> PeriodicGrid::cell_corners(std::size_t c) const {
  auto [i, j, k] = coords(c);
  std::array<std::size_t, 8> out{};
  for (int b = 0; b < 8; ++b) out[b] = vertex(i + (b & 1), j + ((b >> 1) & 1), k + ((b >> 2) & 1));
  return out;
}

Vec3 PeriodicGrid::position(std::size_t v) const {
  auto c = coords(v);
  return Vec3(c[0] * h_, c[1] * h_, c[2] * h_);
}

PeriodicGrid build_grid(int n) { return PeriodicGrid(n); }

double evaluate_terms(const std::vector<FourierTerm>& terms, const Vec3& x) {
  double f = 0.0;
  for (const auto& t : terms) {
    double arg = 2.0 * std::numbers::pi * (t.wave[0] * x[0] + t.wave[1] * x[1] + t.wave[2] * x[2]);
    f += t.amplitude * std::cos(arg + t.phase);
  }
  return f;
}

Mat3 MetricSpec::evaluate(const Vec3& x) const {
  switch (kind) {
    case Kind::constant:
      return base;
    case Kind::conformal:
      return std::exp(2.0 * evaluate_terms(terms, x)) * base;
    case Kind::direct_fourier: {
      Mat3 g = base;
      for (const auto& comp : components) {
        double v = evaluate_terms(comp.terms, x);
        g(comp.i, comp.j) += v;
        if (comp.i != comp.j) g(comp.j, comp.i) += v;
      }
      return g;
    }
  }
  return base;
}

MetricSpec MetricSpec::scaled(double eps) const {
  MetricSpec out = *this;
  for (auto& t : out.terms) t.amplitude *= eps;
  for (auto& c : out.components)
    for (auto& t : c.terms) t.amplitude *= eps;
  return out;
}

MetricSpec MetricSpec::constant(const Mat3& g) {
  MetricSpec s;
  s.kind = Kind::constant;
  s.base = g;
  return s;
}

MetricSpec MetricSpec::conformal(const Mat3& base, std::vector<FourierTerm> terms) {
  MetricSpec s;
  s.kind = Kind::conformal;
  s.base = base;
  s.terms = std::move(terms);
  return s;
}

namespace {

void validate_spd(const Mat3& g, double eig_floor, std::size_t v) {
  double asym = (g - g.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-12)) {
    std::ostringstream msg;
    msg << "metric sample " << v << " is not symmetric (defect " << asym << ")";
    throw MetricError(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(g, Eigen::EigenvaluesOnly);
  double lo = eig.eigenvalues()[0];
  if (!(lo >= eig_floor)) {
    std::ostringstream msg;
    msg << "metric sample " << v << " has eigenvalue " << lo << " below floor " << eig_floor;
    throw MetricError(msg.str());
  }
}

}  // namespace

MetricField::MetricField(const PeriodicGrid& grid, std::vector<Mat3> values, double eig_floor)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.vertex_count()) throw ShapeError("metric sample count does not match grid");
  inverse_.resize(values_.size());
  sqrt_det_.resize(values_.size());
  for (std::size_t v = 0; v < values_.size(); ++v) {
    validate_spd(values_[v], eig_floor, v);
    inverse_[v] = values_[v].inverse();
    sqrt_det_[v] = std::sqrt(values_[v].determinant());
  }
  const double h3 = grid_.h() * grid_.h() * grid_.h();
  cell_volume_.resize(grid_.cell_count());
  for (std::size_t c = 0; c < grid_.cell_count(); ++c) {
    double s = 0.0;
    for (std::size_t v : grid_.cell_corners(c)) s += sqrt_det_[v];
    cell_volume_[c] = s * h3 / 8.0;
  }
  total_volume_ = 0.0;
  for (double w : cell_volume_) total_volume_ += w;
}

MetricField MetricField::sample(const PeriodicGrid& grid, const MetricSpec& spec, double eig_floor) {
  std::vector<Mat3> values(grid.vertex_count());
  for (std::size_t v = 0; v < values.size(); ++v) {
    Mat3 g = spec.evaluate(grid.position(v));
    values[v] = 0.5 * (g + g.transpose());
  }
  return MetricField(grid, std::move(values), eig_floor);
}

Mat3 MetricField::cell_metric(std::size_t c) const {
  Mat3 sum = Mat3::Zero();
  for (std::size_t v : grid_.cell_corners(c)) sum += values_[v];
  return sum / 8.0;
}

double total_volume(const MetricField& field) { return field.total_volume(); }

double integrate(const MetricField& field, const std::vector<double>& vertex_values,
                 const CellMask* region) {
  const auto& grid = field.grid();
  if (vertex_values.size() != grid.vertex_count()) throw ShapeError("vertex field size mismatch");
  if (region && region->size() != grid.cell_count()) throw ShapeError("region size mismatch");
  const double h3 = grid.h() * grid.h() * grid.h();
  double total = 0.0;
  if (!region) {
    for (std::size_t v = 0; v < grid.vertex_count(); ++v) total += vertex_values[v] * field.sqrt_det(v);
    return total * h3;
  }
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (!(*region)[c]) continue;
    double s = 0.0;
    for (std::size_t v : grid.cell_corners(c)) s += vertex_values[v] * field.sqrt_det(v);
    total += s;
  }
  return total * h3 / 8.0;
}

double lp_norm(const std::vector<double>& vertex_values, double p, const MetricField& field,
               const CellMask* region) {
  if (!(p >= 1.0)) throw ParameterError("lp_norm requires p >= 1");
  const auto& grid = field.grid();
  if (vertex_values.size() != grid.vertex_count()) throw ShapeError("vertex field size mismatch");
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      if (region && !(*region)[c]) continue;
      for (std::size_t v : grid.cell_corners(c)) m = std::max(m, std::abs(vertex_values[v]));
    }
    return m;
  }
  std::vector<double> powered(vertex_values.size());
  for (std::size_t v = 0; v < powered.size(); ++v) powered[v] = std::pow(std::abs(vertex_values[v]), p);
  return std::pow(integrate(field, powered, region), 1.0 / p);
}

double region_volume(const MetricField& field, const CellMask& region) {
  double total = 0.0;
  for (std::size_t c = 0; c < region.size(); ++c)
    if (region[c]) total += field.cell_volume(c);
  return total;
}

std::vector<double> ScalarCurvatureField::negative_part() const {
  std::vector<double> out(r.size());
  for (std::size_t v = 0; v < r.size(); ++v) out[v] = std::max(-r[v], 0.0);
  return out;
}

namespace {

struct LocalDerivatives {
  std::array<Mat3, 3> d;                  // d[a] = dG/dx^a
  std::array<std::array<Mat3, 3>, 3> dd;  // dd[a][b] = d2G/dx^a dx^b
};

LocalDerivatives metric_derivatives(const MetricField& field, std::size_t v, bool second) {
  const auto& grid = field.grid();
  const double h = grid.h();
  auto g = [&](int a, int b, int c) -> const Mat3& { return field.at(grid.shift(v, a, b, c)); };
  LocalDerivatives out;
  const int e[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int a = 0; a < 3; ++a)
    out.d[a] = (g(e[a][0], e[a][1], e[a][2]) - g(-e[a][0], -e[a][1], -e[a][2])) / (2.0 * h);
  if (!second) return out;
  const Mat3& g0 = field.at(v);
  for (int a = 0; a < 3; ++a) {
    out.dd[a][a] = (g(e[a][0], e[a][1], e[a][2]) - 2.0 * g0 + g(-e[a][0], -e[a][1], -e[a][2])) / (h * h);
    for (int b = a + 1; b < 3; ++b) {
      int pp[3], pm[3];
      for (int t = 0; t < 3; ++t) {
        pp[t] = e[a][t] + e[b][t];
        pm[t] = e[a][t] - e[b][t];
      }
      Mat3 m = (g(pp[0], pp[1], pp[2]) - g(pm[0], pm[1], pm[2]) - g(-pm[0], -pm[1], -pm[2]) +
                g(-pp[0], -pp[1], -pp[2])) /
               (4.0 * h * h);
      out.dd[a][b] = m;
      out.dd[b][a] = m;
    }
  }
  return out;
}

// Christoffel symbols of the first kind: first[m](i,j) = [ij, m].
std::array<Mat3, 3> first_kind(const std::array<Mat3, 3>& d) {
  std::array<Mat3, 3> first;
  for (int m = 0; m < 3; ++m)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) first[m](i, j) = 0.5 * (d[i](j, m) + d[j](i, m) - d[m](i, j));
  return first;
}

Christoffel raise(const Mat3& ginv, const std::array<Mat3, 3>& first) {
  Christoffel gamma;
  for (int k = 0; k < 3; ++k) {
    gamma[k].setZero();
    for (int m = 0; m < 3; ++m) gamma[k] += ginv(k, m) * first[m];
  }
  return gamma;
}

}  // namespace

std::vector<Christoffel> christoffel(const MetricField& field) {
  const auto& grid = field.grid();
  std::vector<Christoffel> out(grid.vertex_count());
  for (std::size_t v = 0; v < out.size(); ++v) {
    auto der = metric_derivatives(field, v, false);
    out[v] = raise(field.inverse(v), first_kind(der.d));
  }
  return out;
}

ScalarCurvatureField scalar_curvature(const MetricField& field) {
  const auto& grid = field.grid();
  ScalarCurvatureField out;
  out.r.resize(grid.vertex_count());
  for (std::size_t v = 0; v < grid.vertex_count(); ++v) {
    auto der = metric_derivatives(field, v, true);
    const Mat3& ginv = field.inverse(v);
    auto first = first_kind(der.d);
    Christoffel gamma = raise(ginv, first);
    // dgamma[a][k](i,j) = d_a Gamma^k_ij
    std::array<Christoffel, 3> dgamma;
    for (int a = 0; a < 3; ++a) {
      Mat3 dginv = -ginv * der.d[a] * ginv;
      std::array<Mat3, 3> dfirst;
      for (int m = 0; m < 3; ++m)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            dfirst[m](i, j) = 0.5 * (der.dd[a][i](j, m) + der.dd[a][j](i, m) - der.dd[a][m](i, j));
      for (int k = 0; k < 3; ++k) {
        dgamma[a][k].setZero();
        for (int m = 0; m < 3; ++m) dgamma[a][k] += dginv(k, m) * first[m] + ginv(k, m) * dfirst[m];
      }
    }
    Mat3 ric = Mat3::Zero();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) {
          s += dgamma[k][k](i, j) - dgamma[j][k](i, k);
          for (int l = 0; l < 3; ++l)
            s += gamma[k](k, l) * gamma[l](i, j) - gamma[k](j, l) * gamma[l](i, k);
        }
        ric(i, j) = s;
      }
    out.r[v] = (ginv.cwiseProduct(ric)).sum();
  }
  return out;
}

std::vector<Mat3> covariant_hessian(const MetricField& field, const std::vector<Christoffel>& gamma,
                                    const std::vector<Vec3>& covectors) {
  const auto& grid = field.grid();
  if (covectors.size() != grid.vertex_count() || gamma.size() != grid.vertex_count())
    throw ShapeError("covector field size mismatch");
  const double h = grid.h();
  std::vector<Mat3> out(grid.vertex_count());
  for (std::size_t v = 0; v < out.size(); ++v) {
    Mat3 hess;
    for (int i = 0; i < 3; ++i) {
      int e[3] = {0, 0, 0};
      e[i] = 1;
      Vec3 da = (covectors[grid.shift(v, e[0], e[1], e[2])] -
                 covectors[grid.shift(v, -e[0], -e[1], -e[2])]) /
                (2.0 * h);
      for (int j = 0; j < 3; ++j) {
        double s = da[j];
        for (int k = 0; k < 3; ++k) s -= gamma[v][k](i, j) * covectors[v][k];
        hess(i, j) = s;
      }
    }
    out[v] = hess;
  }
  return out;
}

double hessian_norm(const Mat3& g_inv, const Mat3& hess) {
  double s = (g_inv * hess * g_inv * hess.transpose()).trace();
  return std::sqrt(std::max(s, 0.0));
}

std::vector<double> covector_norms(const MetricField& field, const std::vector<Vec3>& covectors) {
  std::vector<double> out(covectors.size());
  for (std::size_t v = 0; v < out.size(); ++v)
    out[v] = std::sqrt(std::max(0.0, covectors[v].dot(field.inverse(v) * covectors[v])));
  return out;
}

const std::array<IVec3, 26>& DistanceGraph::directions() {
  static const std::array<IVec3, 26> dirs = [] {
    std::array<IVec3, 26> d;
    int n = 0;
    for (int k = -1; k <= 1; ++k)
      for (int j = -1; j <= 1; ++j)
        for (int i = -1; i <= 1; ++i) {
          IVec3 v(i, j, k);
          if (v == IVec3::Zero()) continue;
          // keep directions whose last nonzero entry is positive
          int last = k != 0 ? k : (j != 0 ? j : i);
          if (last > 0) d[n++] = v;
        }
    for (int m = 0; m < 13; ++m) d[13 + m] = -d[m];
    return d;
  }();
  return dirs;
}

DistanceGraph::DistanceGraph(const PeriodicGrid& grid, const std::vector<Mat3>& vertex_metric)
    : grid_(grid), half_(grid.vertex_count()) {
  if (vertex_metric.size() != grid.vertex_count()) throw ShapeError("vertex metric size mismatch");
  const auto& dirs = directions();
  const double h = grid.h();
  for (std::size_t v = 0; v < half_.size(); ++v) {
    for (int d = 0; d < 13; ++d) {
      std::size_t w = grid.shift(v, dirs[d][0], dirs[d][1], dirs[d][2]);
      Mat3 m = 0.5 * (vertex_metric[v] + vertex_metric[w]);
      Vec3 dv = dirs[d].cast<double>();
      half_[v][d] = h * std::sqrt(std::max(0.0, dv.dot(m * dv)));
    }
  }
}

double DistanceGraph::weight(std::size_t v, int d) const {
  if (d < 13) return half_[v][d];
  const IVec3& dir = directions()[d];
  return half_[grid_.shift(v, dir[0], dir[1], dir[2])][d - 13];
}

bool edge_in_cells(const PeriodicGrid& grid, std::size_t v, const IVec3& d, const CellMask& cells) {
  auto c = grid.coords(v);
  int lo[3], hi[3];
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0) {
      lo[a] = c[a] - 1;
      hi[a] = c[a];
    } else {
      lo[a] = hi[a] = c[a] + std::min(d[a], 0);
    }
  }
  for (int k = lo[2]; k <= hi[2]; ++k)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i)
        if (cells[grid.cell(i, j, k)]) return true;
  return false;
}

std::vector<double> DistanceGraph::shortest_paths(const std::vector<std::size_t>& sources,
                                                  const CellMask* cells, double cutoff) const {
  const auto& dirs = directions();
  std::vector<double> dist(grid_.vertex_count(), kInfinityNorm);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (std::size_t s : sources) {
    dist[s] = 0.0;
    heap.push({0.0, s});
  }
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    if (du > dist[u]) continue;
    for (int d = 0; d < 26; ++d) {
      if (cells && !edge_in_cells(grid_, u, dirs[d], *cells)) continue;
      std::size_t w = grid_.shift(u, dirs[d][0], dirs[d][1], dirs[d][2]);
      double nd = du + weight(u, d);
      if (nd < dist[w] && nd <= cutoff) {
        dist[w] = nd;
        heap.push({nd, w});
      }
    }
  }
  return dist;
}

}  // namespace toruslab
