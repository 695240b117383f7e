#include "toruslab/approx.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

#include "toruslab/errors.hpp"
#include "toruslab/parallel.hpp"

namespace toruslab {

namespace {

double sup_entry(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

double spectral_norm(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m);
  return svd.singularValues()(0);
}

void check_grid(const PointwiseGramField& gram, const MetricField& field) {
  if (gram.values.size() != field.grid().vertex_count()) throw ShapeError("gram field and metric grids differ");
}

// Cells whose eight corners satisfy the vertex predicate.
template <class Pred>
CellMask all_corner_cells(const PeriodicGrid& grid, Pred pred) {
  CellMask vflag(grid.vertex_count());
  for (std::size_t v = 0; v < grid.vertex_count(); ++v) vflag[v] = pred(v) ? 1 : 0;
  CellMask cells(grid.cell_count(), 0);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    bool all = true;
    for (auto v : grid.cell_corners(c)) all = all && vflag[v];
    cells[c] = all ? 1 : 0;
  }
  return cells;
}

double face_area(const MetricField& field, int axis, int i, int j, int k) {
  const auto& grid = field.grid();
  int p = (axis + 1) % 3, q = (axis + 2) % 3;
  Mat3 g = Mat3::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      int off[3] = {0, 0, 0};
      off[p] = a;
      off[q] = b;
      g += field.at(grid.vertex(i + off[0], j + off[1], k + off[2]));
    }
  g *= 0.25;
  double cof = g(p, p) * g(q, q) - g(p, q) * g(q, p);
  return std::sqrt(std::max(cof, 0.0)) * grid.h() * grid.h();
}

// Lifted corner values of the map on cell c (coordinates of the lower corner in [0, N)).
std::array<Vec3, 8> corner_values(const HarmonicTorusMap& map, const PeriodicGrid& grid, std::size_t c) {
  auto base = grid.coords(c);
  auto corners = grid.cell_corners(c);
  std::array<Vec3, 8> out;
  for (int a = 0; a < 8; ++a) {
    Vec3 x((base[0] + (a & 1)) * grid.h(), (base[1] + ((a >> 1) & 1)) * grid.h(),
           (base[2] + ((a >> 2) & 1)) * grid.h());
    for (int j = 0; j < 3; ++j) {
      const auto& comp = map.components[j];
      out[a](j) = comp.cls.periods.cast<double>().dot(x) + comp.potential[corners[a]];
    }
  }
  return out;
}

}  // namespace

std::vector<Mat3> coefficient_matrices(const HarmonicTorusMap& map) {
  std::array<std::vector<Vec3>, 3> cov;
  for (int j = 0; j < 3; ++j) cov[j] = map.components[j].vertex_covectors();
  std::vector<Mat3> out(cov[0].size());
  for (std::size_t v = 0; v < out.size(); ++v)
    for (int j = 0; j < 3; ++j) out[v].row(j) = cov[j][v].transpose();
  return out;
}

PointwiseGramField pointwise_gram(const HarmonicTorusMap& map, const MetricField& field) {
  if (map.components[0].n != field.grid().n()) throw ShapeError("map and metric grids differ");
  auto coeff = coefficient_matrices(map);
  PointwiseGramField out;
  out.values.resize(coeff.size());
  for (std::size_t v = 0; v < coeff.size(); ++v) {
    Mat3 g = coeff[v] * field.inverse(v) * coeff[v].transpose();
    out.values[v] = 0.5 * (g + g.transpose());
  }
  return out;
}

ConstantApprox constant_approx(const PointwiseGramField& gram, const MetricField& field, double lambda,
                               const SternReport& stern) {
  if (!(lambda > 0.0)) throw ParameterError("Cheeger lower bound must be positive, got " + std::to_string(lambda));
  check_grid(gram, field);
  const double vol = field.total_volume();
  const std::size_t nv = gram.values.size();
  ConstantApprox out;
  out.lambda = lambda;
  std::vector<double> f(nv);
  for (int j = 0; j < 3; ++j)
    for (int k = j; k < 3; ++k) {
      for (std::size_t v = 0; v < nv; ++v) f[v] = gram.values[v](j, k);
      out.a(j, k) = out.a(k, j) = integrate(field, f) / vol;
    }
  for (int j = 0; j < 3; ++j)
    for (int k = j; k < 3; ++k) {
      for (std::size_t v = 0; v < nv; ++v) f[v] = std::abs(gram.values[v](j, k) - out.a(j, k));
      out.l1_deficit(j, k) = out.l1_deficit(k, j) = integrate(field, f);
    }
  double s = 0.0, l2prod = 0.0;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      const auto& cj = stern.components[j];
      const auto& ck = stern.components[k];
      s = std::max(s, std::sqrt(cj.l3) * ck.l3 * std::sqrt(std::max(cj.deficit, 0.0)));
      l2prod = std::max(l2prod, cj.l2 * ck.l2);
    }
  out.stern_term = s;
  out.tau = std::sqrt(36.0 * s / (vol * lambda));
  out.l1_bound = 2.0 * s / lambda;
  out.a_sup = sup_entry(out.a);
  out.a_bound = 2.0 * s / (vol * lambda) + l2prod / vol;
  Eigen::SelfAdjointEigenSolver<Mat3> es(out.a);
  out.min_eigenvalue = es.eigenvalues()(0);
  if (out.min_eigenvalue < -1e-10) throw ConsistencyError("constant matrix is not positive semidefinite");
  const double tol = 1e-12 * std::max(1.0, l2prod);
  out.verdicts.push_back(upper_bound("g_int_close_to_const", out.l1_deficit.maxCoeff(), out.l1_bound, tol));
  out.verdicts.push_back(upper_bound("const_matrix_bounded", out.a_sup, out.a_bound, tol));
  return out;
}

std::vector<double> l1_deviation(const PointwiseGramField& gram, const Mat3& a) {
  std::vector<double> out(gram.values.size());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = (gram.values[v] - a).cwiseAbs().sum();
  return out;
}

std::vector<double> l2_deviation(const PointwiseGramField& gram, const Mat3& a) {
  std::vector<double> out(gram.values.size());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = (gram.values[v] - a).squaredNorm();
  return out;
}

LevelSets level_sets(const PointwiseGramField& gram, const Mat3& a, double tau, const MetricField& field) {
  check_grid(gram, field);
  if (tau < 0.0) throw ParameterError("tau must be non-negative");
  const auto& grid = field.grid();
  auto d1 = l1_deviation(gram, a);
  auto d2 = l2_deviation(gram, a);
  LevelSets out;
  out.e1 = all_corner_cells(grid, [&](std::size_t v) { return d1[v] < tau || d1[v] <= kZeroDeviation; });
  out.e2 = all_corner_cells(grid, [&](std::size_t v) {
    return d2[v] < tau * tau || d2[v] <= kZeroDeviation * kZeroDeviation;
  });
  out.volume_e1 = region_volume(field, out.e1);
  out.volume_e2 = region_volume(field, out.e2);
  out.half_volume_applies = tau < 1.0;
  out.half_volume_holds = out.volume_e1 >= 0.5 * field.total_volume();
  return out;
}

double boundary_area(const CellMask& cells, const MetricField& field) {
  const auto& grid = field.grid();
  if (cells.size() != grid.cell_count()) throw ShapeError("cell mask size does not match the grid");
  double area = 0.0;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    auto x = grid.coords(c);
    for (int axis = 0; axis < 3; ++axis) {
      int d[3] = {0, 0, 0};
      d[axis] = 1;
      std::size_t up = grid.cell(x[0] + d[0], x[1] + d[1], x[2] + d[2]);
      // each face counted once, from its lower cell
      if (cells[c] != cells[up]) area += face_area(field, axis, x[0] + d[0], x[1] + d[1], x[2] + d[2]);
    }
  }
  return area;
}

std::vector<int> face_components(const PeriodicGrid& grid, const CellMask& cells, std::vector<std::size_t>& sizes) {
  if (cells.size() != grid.cell_count()) throw ShapeError("cell mask size does not match the grid");
  std::vector<int> label(grid.cell_count(), -1);
  sizes.clear();
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < grid.cell_count(); ++s) {
    if (!cells[s] || label[s] >= 0) continue;
    int id = static_cast<int>(sizes.size());
    std::size_t count = 0;
    label[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      std::size_t c = stack.back();
      stack.pop_back();
      ++count;
      auto x = grid.coords(c);
      for (int axis = 0; axis < 3; ++axis)
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          int d[3] = {0, 0, 0};
          d[axis] = sgn;
          std::size_t nb = grid.cell(x[0] + d[0], x[1] + d[1], x[2] + d[2]);
          if (cells[nb] && label[nb] < 0) {
            label[nb] = id;
            stack.push_back(nb);
          }
        }
    }
    sizes.push_back(count);
  }
  return label;
}

OmegaReport extract_omega(const PointwiseGramField& gram, const ConstantApprox& approx, const MetricField& field) {
  check_grid(gram, field);
  const auto& grid = field.grid();
  const double vol = field.total_volume();
  const double tau = approx.tau;
  auto d2 = l2_deviation(gram, approx.a);

  constexpr int kSamples = 16;
  std::array<double, kSamples> thresholds{}, areas{};
  std::array<CellMask, kSamples> sets;
  parallel_for(kSamples, [&](std::size_t s) {
    double t = tau * tau * (1.0 + 3.0 * static_cast<double>(s) / (kSamples - 1));
    thresholds[s] = t;
    sets[s] = all_corner_cells(grid, [&](std::size_t v) {
      return d2[v] < t || d2[v] <= kZeroDeviation * kZeroDeviation;
    });
    areas[s] = boundary_area(sets[s], field);
  });
  int best = 0;
  for (int s = 1; s < kSamples; ++s)
    if (areas[s] < areas[best]) best = s;

  OmegaReport out;
  out.tau = tau;
  out.t0 = thresholds[best];
  out.tau_warning = tau > 0.125;
  std::vector<std::size_t> sizes;
  auto label = face_components(grid, sets[best], sizes);
  if (sizes.empty())
    throw ExtractionError("sublevel set is empty at t0 = " + std::to_string(out.t0) + " (tau = " +
                          std::to_string(tau) + ")");
  int largest = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  out.omega.assign(grid.cell_count(), 0);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) out.omega[c] = label[c] == largest ? 1 : 0;

  out.volume = region_volume(field, out.omega);
  out.complement_volume = std::max(vol - out.volume, 0.0);
  out.boundary = boundary_area(out.omega, field);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (!out.omega[c]) continue;
    for (auto v : grid.cell_corners(c)) {
      Mat3 dev = gram.values[v] - approx.a;
      out.sup_deviation = std::max(out.sup_deviation, sup_entry(dev));
      out.sup_sum_deviation = std::max(out.sup_sum_deviation, dev.cwiseAbs().sum());
    }
  }

  const double tol = 1e-10;
  out.verdicts.push_back(upper_bound("well_approximating_set:1", out.sup_deviation, 2.0 * tau, tol));
  out.verdicts.push_back(upper_bound("well_approximating_set:2", 0.5 * vol, out.volume, tol * vol));
  out.verdicts.push_back(
      upper_bound("well_approximating_set:3", out.boundary, 2.0 * vol * approx.lambda * tau, tol * vol));
  out.verdicts.push_back(upper_bound("well_approximating_set:4", out.complement_volume, 2.0 * vol * tau, tol * vol));
  return out;
}

std::vector<Mat3> pullback_flat(const Mat3& g_flat, const HarmonicTorusMap& map) {
  auto coeff = coefficient_matrices(map);
  std::vector<Mat3> out(coeff.size());
  for (std::size_t v = 0; v < coeff.size(); ++v) {
    Mat3 p = coeff[v].transpose() * g_flat * coeff[v];
    out[v] = 0.5 * (p + p.transpose());
  }
  return out;
}

FlatRecovery recover_flat(const Mat3& a, const HarmonicTorusMap& map, const MetricField& field,
                          const CellMask& omega, double det_floor) {
  const double det = a.determinant();
  if (!(det >= det_floor)) throw RecoveryError("constant matrix is near-singular: det = " + std::to_string(det));
  if (omega.size() != field.grid().cell_count()) throw ShapeError("cell mask size does not match the grid");
  FlatRecovery out;
  Mat3 gf = a.inverse();
  out.g_flat = 0.5 * (gf + gf.transpose());
  auto pull = pullback_flat(out.g_flat, map);
  const auto& grid = field.grid();
  CellMask seen(grid.vertex_count(), 0);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (!omega[c]) continue;
    for (auto v : grid.cell_corners(c)) {
      if (seen[v]) continue;
      seen[v] = 1;
      out.c0_deficit = std::max(out.c0_deficit, hessian_norm(field.inverse(v), field.at(v) - pull[v]));
    }
  }
  return out;
}

int injectivity_count(const HarmonicTorusMap& map, const CellMask& omega, int samples, std::uint64_t seed) {
  PeriodicGrid grid(map.components[0].n);
  if (omega.size() != grid.cell_count()) throw ShapeError("cell mask size does not match the grid");
  if (samples <= 0) return 0;

  struct Simplex {
    Vec3 origin, lo, hi;
    Mat3 inv;
  };
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<Simplex> simplices;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (!omega[c]) continue;
    auto f = corner_values(map, grid, c);
    for (const auto& p : perms) {
      int corner[4] = {0, 1 << p[0], (1 << p[0]) | (1 << p[1]), 7};
      Mat3 m;
      for (int t = 0; t < 3; ++t) m.col(t) = f[corner[t + 1]] - f[corner[0]];
      if (std::abs(m.determinant()) < 1e-300) continue;
      Simplex s;
      s.origin = f[corner[0]];
      s.inv = m.inverse();
      s.lo = s.hi = s.origin;
      for (int t = 1; t < 4; ++t) {
        s.lo = s.lo.cwiseMin(f[corner[t]]);
        s.hi = s.hi.cwiseMax(f[corner[t]]);
      }
      simplices.push_back(s);
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int best = 0;
  const double eps = 1e-12;
  for (int s = 0; s < samples; ++s) {
    Vec3 y(unif(rng), unif(rng), unif(rng));
    int hits = 0;
    for (const auto& sx : simplices) {
      int mlo[3], mhi[3];
      for (int t = 0; t < 3; ++t) {
        mlo[t] = static_cast<int>(std::ceil(sx.lo(t) - y(t) - eps));
        mhi[t] = static_cast<int>(std::floor(sx.hi(t) - y(t) + eps));
      }
      for (int a = mlo[0]; a <= mhi[0]; ++a)
        for (int b = mlo[1]; b <= mhi[1]; ++b)
          for (int c = mlo[2]; c <= mhi[2]; ++c) {
            Vec3 lam = sx.inv * (y + Vec3(a, b, c) - sx.origin);
            if (lam.minCoeff() >= -eps && lam.sum() <= 1.0 + eps) ++hits;
          }
    }
    best = std::max(best, hits);
  }
  return best;
}

double det_gap_bound(const Mat3& a, const Mat3& b) {
  double s = spectral_norm(a) + spectral_norm(b);
  return s * s * spectral_norm(a - b);
}

void omega_diagnostics(OmegaReport& report, const HarmonicTorusMap& map, const MetricField& field,
                       const PointwiseGramField& gram, const ConstantApprox& approx, double rneg_l2,
                       int injectivity_samples, std::uint64_t seed) {
  check_grid(gram, field);
  const auto& grid = field.grid();
  const auto& omega = report.omega;
  if (omega.size() != grid.cell_count()) throw ShapeError("cell mask size does not match the grid");
  report.rneg_l2 = rneg_l2;

  CellMask complement(grid.cell_count());
  for (std::size_t c = 0; c < grid.cell_count(); ++c) complement[c] = omega[c] ? 0 : 1;
  std::vector<double> du3(grid.vertex_count());
  for (std::size_t v = 0; v < du3.size(); ++v) du3[v] = std::pow(std::max(gram.values[v].trace(), 0.0), 1.5);
  report.l3_complement_cubed = integrate(field, du3, &complement);

  auto jac = cell_jacobian_integrals(map.components);
  report.int_det_omega = report.int_det_complement = report.int_abs_det_omega = 0.0;
  report.image_complement_bound = 0.0;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (omega[c]) {
      report.int_det_omega += jac[c];
      report.int_abs_det_omega += std::abs(jac[c]);
    } else {
      report.int_det_complement += jac[c];
      report.image_complement_bound += std::abs(jac[c]);
    }
  }
  report.degree = degree(map.components);

  auto coeff = coefficient_matrices(map);
  report.det_a = approx.a.determinant();
  report.det_identity_defect = 0.0;
  report.det_gap_violation = -kInfinityNorm;
  report.min_det_g = kInfinityNorm;
  int pos = 0, neg = 0;
  for (std::size_t v = 0; v < grid.vertex_count(); ++v) {
    double dg = gram.values[v].determinant();
    double dc = coeff[v].determinant();
    double ident = dc * dc * field.inverse(v).determinant();
    report.det_identity_defect = std::max(report.det_identity_defect, std::abs(dg - ident) / std::max(1.0, std::abs(dg)));
  }
  CellMask seen(grid.vertex_count(), 0);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (!omega[c]) continue;
    if (jac[c] > 0.0) ++pos;
    if (jac[c] < 0.0) ++neg;
    for (auto v : grid.cell_corners(c)) {
      if (seen[v]) continue;
      seen[v] = 1;
      double dc = coeff[v].determinant();
      if (dc > 0.0) ++pos;
      if (dc < 0.0) ++neg;
      double dg = gram.values[v].determinant();
      report.min_det_g = std::min(report.min_det_g, dg);
      double gap = std::abs(dg - report.det_a) - det_gap_bound(gram.values[v], approx.a);
      report.det_gap_violation = std::max(report.det_gap_violation, gap);
    }
  }
  report.sign_constant = pos == 0 || neg == 0;
  report.det_lead = report.volume > 0.0 ? report.int_det_omega * report.int_det_omega / (report.volume * report.volume) : 0.0;

  auto flat = recover_flat(approx.a, map, field, omega);
  report.g_flat = flat.g_flat;
  report.c0_deficit = flat.c0_deficit;
  report.injectivity = injectivity_count(map, omega, injectivity_samples, seed);

  if (rneg_l2 > 1e-14) {
    double r12 = std::pow(rneg_l2, 1.0 / 12.0), r4 = std::pow(rneg_l2, 0.25);
    report.measured_b_l3 = report.l3_complement_cubed / r12;
    report.measured_b_det = std::abs(1.0 - report.int_det_omega) / r12;
    report.measured_b_image = report.image_complement_bound / r12;
    report.measured_b_det_g = std::max(0.0, report.det_lead - report.min_det_g) / r4;
    report.measured_b_det_a = std::max(0.0, report.det_lead - report.det_a) / r4;
    report.measured_b_c0 = report.c0_deficit / r4;
  } else {
    report.measured_b_l3 = report.measured_b_det = report.measured_b_image = 0.0;
    report.measured_b_det_g = report.measured_b_det_a = report.measured_b_c0 = 0.0;
  }

  const double scale = std::max(1.0, report.int_abs_det_omega);
  report.verdicts.push_back(upper_bound("detdU_has_sign_Omega", report.int_abs_det_omega - report.int_det_omega,
                                        0.0, 1e-10 * scale));
  report.verdicts.push_back(upper_bound("det_estimate", report.det_gap_violation, 0.0, 1e-12));
  report.verdicts.push_back(upper_bound("inj_on_well_approximating_set", report.injectivity, 1.0));
}

double cheeger_slab_upper_bound(const MetricField& field) {
  const auto& grid = field.grid();
  const int n = grid.n();
  const double vol = field.total_volume();
  double best = kInfinityNorm;
  for (int axis = 0; axis < 3; ++axis) {
    std::vector<double> layer_vol(n, 0.0), layer_area(n, 0.0);  // layer_area[i]: faces at coordinate i
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      auto x = grid.coords(c);
      layer_vol[x[axis]] += field.cell_volume(c);
      layer_area[x[axis]] += face_area(field, axis, x[0], x[1], x[2]);
    }
    for (int start = 0; start < n; ++start) {
      double v = 0.0;
      for (int len = 1; len < n; ++len) {
        v += layer_vol[(start + len - 1) % n];
        double area = layer_area[start] + layer_area[(start + len) % n];
        best = std::min(best, area / std::min(v, vol - v));
      }
    }
  }
  return best;
}

}  // namespace toruslab
