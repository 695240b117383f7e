#include "toruslab/harmap.hpp"

#include <cmath>
#include <sstream>

#include "toruslab/errors.hpp"
#include "toruslab/parallel.hpp"

namespace toruslab {

double deg_tol(int n) { return 50.0 / (static_cast<double>(n) * n); }

std::vector<double> cell_jacobian_integrals(const std::array<HarmonicOneForm, 3>& components) {
  const int n = components[0].n;
  for (const auto& c : components)
    if (c.n != n) throw ShapeError("components live on different grids");
  PeriodicGrid grid(n);
  const double h = grid.h();
  // Two-point Gauss is exact: the Jacobian determinant has degree <= 2 per variable.
  const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  std::vector<double> out(grid.cell_count());
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    auto corners = grid.cell_corners(c);
    // corner values relative to the cell's lower corner
    double f[3][8];
    for (int j = 0; j < 3; ++j) {
      const auto& comp = components[j];
      for (int a = 0; a < 8; ++a) {
        int off[3] = {a & 1, (a >> 1) & 1, (a >> 2) & 1};
        f[j][a] = comp.potential[corners[a]] +
                  h * (comp.cls.periods[0] * off[0] + comp.cls.periods[1] * off[1] + comp.cls.periods[2] * off[2]);
      }
    }
    double total = 0.0;
    for (int qz = 0; qz < 2; ++qz)
      for (int qy = 0; qy < 2; ++qy)
        for (int qx = 0; qx < 2; ++qx) {
          double s[3] = {gp[qx], gp[qy], gp[qz]};
          Mat3 jac = Mat3::Zero();  // jac(j, p) = d F_j / d s_p
          for (int a = 0; a < 8; ++a) {
            int off[3] = {a & 1, (a >> 1) & 1, (a >> 2) & 1};
            double l[3], dl[3];
            for (int t = 0; t < 3; ++t) {
              l[t] = off[t] ? s[t] : 1.0 - s[t];
              dl[t] = off[t] ? 1.0 : -1.0;
            }
            double dn[3] = {dl[0] * l[1] * l[2], l[0] * dl[1] * l[2], l[0] * l[1] * dl[2]};
            for (int j = 0; j < 3; ++j)
              for (int p = 0; p < 3; ++p) jac(j, p) += f[j][a] * dn[p];
          }
          total += 0.125 * jac.determinant();
        }
    out[c] = total;
  }
  return out;
}

double degree(const std::array<HarmonicOneForm, 3>& components) {
  double s = 0.0;
  for (double v : cell_jacobian_integrals(components)) s += v;
  return s;
}

double degree(const HarmonicTorusMap& map, const MetricField& field) {
  if (map.components[0].n != field.grid().n()) throw ShapeError("map and metric grids differ");
  return degree(map.components);
}

HarmonicTorusMap map_from_components(std::array<HarmonicOneForm, 3> components) {
  HarmonicTorusMap map;
  for (int j = 0; j < 3; ++j) map.basis_transform.col(j) = components[j].cls.periods;
  map.components = std::move(components);
  map.degree = degree(map.components);
  return map;
}

HarmonicTorusMap build_map(const MetricField& field, const SolverOptions& options) {
  HodgeSolver solver(field, options);
  HarmonicTorusMap map;
  parallel_for(3, [&](std::size_t i) {
    CohomologyClass cls;
    cls.periods = IVec3::Unit(static_cast<int>(i));
    map.standard[i] = solver.solve(cls);
  });
  map.standard_gram = gram_matrix(map.standard, field).matrix;
  map.reduced = reduced_basis(map.standard_gram);
  map.basis_transform = map.reduced.basis;
  for (int j = 0; j < 3; ++j) {
    map.components[j] = combine(map.standard, map.basis_transform.col(j));
    map.components[j].residual = solver.residual(map.components[j]);
  }
  map.degree = degree(map.components);
  if (map.degree < 0.0) {
    map.components[0] = negated(map.components[0]);
    map.basis_transform.col(0) = -map.basis_transform.col(0);
    map.orientation = -1;
    map.degree = -map.degree;
  }
  const int n = field.grid().n();
  if (std::abs(map.degree - 1.0) > deg_tol(n)) {
    std::ostringstream msg;
    msg << "map degree " << map.degree << " is outside 1 +/- " << deg_tol(n);
    throw DegeneracyError(msg.str());
  }
  return map;
}

double SternReport::min_slack() const {
  double m = components[0].slack;
  for (const auto& c : components) m = std::min(m, c.slack);
  return m;
}

SternReport stern_report(const HarmonicTorusMap& map, const MetricField& field, double disc_slack) {
  const auto& grid = field.grid();
  SternReport rep;
  rep.disc_slack = disc_slack;
  rep.rneg_l2 = lp_norm(scalar_curvature(field).negative_part(), 2.0, field);
  auto gamma = christoffel(field);
  for (int j = 0; j < 3; ++j) {
    auto cov = map.components[j].vertex_covectors();
    auto norms = covector_norms(field, cov);
    auto hess = covariant_hessian(field, gamma, cov);
    double mean = 0.0;
    for (double v : norms) mean += v;
    mean /= static_cast<double>(norms.size());
    const double reg = 1e-8 * mean;
    std::vector<double> integrand(grid.vertex_count());
    for (std::size_t v = 0; v < integrand.size(); ++v) {
      double hn = hessian_norm(field.inverse(v), hess[v]);
      integrand[v] = hn * hn / (norms[v] + reg);
    }
    SternComponent& sc = rep.components[j];
    sc.reg = reg;
    sc.l2 = lp_norm(norms, 2.0, field);
    sc.l3 = lp_norm(norms, 3.0, field);
    sc.deficit = integrate(field, integrand);
    sc.rhs = rep.rneg_l2 * sc.l2;
    sc.slack = sc.rhs + disc_slack - sc.deficit;
  }
  return rep;
}

L3Terms l3_bound(double l2, double l3, double rneg_l2, double sigma, double eta, double kappa,
                 double volume) {
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  if (!(eta > 0.0)) throw ParameterError("eta must be positive");
  if (!(volume > 0.0)) throw ParameterError("volume must be positive");
  L3Terms t;
  const double a = 1.0 + kappa / sigma * std::sqrt(volume) * l2;
  t.lhs = l3;
  t.rhs = 1.0 + std::pow(a / eta * kappa * l2 * l2, 2.0 / 3.0) +
          std::pow(a * kappa * std::pow(l3, 1.5) * std::sqrt(rneg_l2), 2.0 / 3.0);
  t.slack = t.rhs - t.lhs;
  t.holds = t.lhs <= t.rhs;
  return t;
}

L3Report l3_inequality_check(const SternReport& stern, double sigma, double eta, double kappa,
                             double volume) {
  L3Report rep;
  for (int j = 0; j < 3; ++j) {
    const auto& c = stern.components[j];
    rep.components[j] = l3_bound(c.l2, c.l3, stern.rneg_l2, sigma, eta, kappa, volume);
  }
  return rep;
}

}  // namespace toruslab
