#include "toruslab/hodge.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "toruslab/errors.hpp"

namespace toruslab {

double HarmonicOneForm::edge_value(int axis, std::size_t v) const {
  PeriodicGrid g(n);
  auto c = g.coords(v);
  c[axis] += 1;
  std::size_t w = g.vertex(c[0], c[1], c[2]);
  return cls.periods[axis] * g.h() + potential[w] - potential[v];
}

std::vector<double> HarmonicOneForm::edge_cochain() const {
  PeriodicGrid g(n);
  std::vector<double> out(g.edge_count());
  for (int axis = 0; axis < 3; ++axis)
    for (std::size_t v = 0; v < g.vertex_count(); ++v) out[axis * g.vertex_count() + v] = edge_value(axis, v);
  return out;
}

std::vector<Vec3> HarmonicOneForm::vertex_covectors() const {
  PeriodicGrid g(n);
  const double inv2h = 0.5 / g.h();
  std::vector<Vec3> out(g.vertex_count());
  for (std::size_t v = 0; v < out.size(); ++v) {
    Vec3 c;
    c[0] = cls.periods[0] + (potential[g.shift(v, 1, 0, 0)] - potential[g.shift(v, -1, 0, 0)]) * inv2h;
    c[1] = cls.periods[1] + (potential[g.shift(v, 0, 1, 0)] - potential[g.shift(v, 0, -1, 0)]) * inv2h;
    c[2] = cls.periods[2] + (potential[g.shift(v, 0, 0, 1)] - potential[g.shift(v, 0, 0, -1)]) * inv2h;
    out[v] = c;
  }
  return out;
}

Vec3 HarmonicOneForm::loop_periods() const {
  PeriodicGrid g(n);
  Vec3 p = Vec3::Zero();
  for (int axis = 0; axis < 3; ++axis)
    for (int s = 0; s < n; ++s) {
      int c[3] = {0, 0, 0};
      c[axis] = s;
      p[axis] += edge_value(axis, g.vertex(c[0], c[1], c[2]));
    }
  return p;
}

HarmonicOneForm combine(const std::array<HarmonicOneForm, 3>& forms, const IVec3& coeffs) {
  HarmonicOneForm out;
  out.n = forms[0].n;
  out.potential.assign(forms[0].potential.size(), 0.0);
  for (int i = 0; i < 3; ++i) {
    if (forms[i].n != out.n) throw ShapeError("forms live on different grids");
    out.cls.periods += coeffs[i] * forms[i].cls.periods;
    for (std::size_t v = 0; v < out.potential.size(); ++v) out.potential[v] += coeffs[i] * forms[i].potential[v];
    out.residual = std::max(out.residual, forms[i].residual);
    out.iterations = std::max(out.iterations, forms[i].iterations);
  }
  return out;
}

HarmonicOneForm negated(const HarmonicOneForm& form) {
  HarmonicOneForm out = form;
  out.cls.periods = -form.cls.periods;
  for (double& p : out.potential) p = -p;
  return out;
}

namespace {

// One-dimensional Q1 integrals on [0,1]; a, b in {0,1} select 1-s or s.
double mass1(int a, int b) { return a == b ? 1.0 / 3.0 : 1.0 / 6.0; }
double sgn(int a) { return a ? 1.0 : -1.0; }

// S[p][q](a,b) = integral of dN_a/ds_p dN_b/ds_q over the unit cube.
struct ReferenceStiffness {
  double s[3][3][8][8];
  double grad[3][8];  // integral of dN_a/ds_p
  ReferenceStiffness() {
    for (int a = 0; a < 8; ++a) {
      int ab[3] = {a & 1, (a >> 1) & 1, (a >> 2) & 1};
      for (int p = 0; p < 3; ++p) grad[p][a] = 0.25 * sgn(ab[p]);
      for (int b = 0; b < 8; ++b) {
        int bb[3] = {b & 1, (b >> 1) & 1, (b >> 2) & 1};
        for (int p = 0; p < 3; ++p)
          for (int q = 0; q < 3; ++q) {
            double prod = 1.0;
            for (int t = 0; t < 3; ++t) {
              bool dp = t == p, dq = t == q;
              double f;
              if (dp && dq) f = sgn(ab[t]) * sgn(bb[t]);
              else if (dp) f = 0.5 * sgn(ab[t]);
              else if (dq) f = 0.5 * sgn(bb[t]);
              else f = mass1(ab[t], bb[t]);
              prod *= f;
            }
            s[p][q][a][b] = prod;
          }
      }
    }
  }
};

const ReferenceStiffness& reference() {
  static const ReferenceStiffness ref;
  return ref;
}

Mat3 cell_coefficient(const MetricField& field, std::size_t c) {
  Mat3 gc = field.cell_metric(c);
  return std::sqrt(gc.determinant()) * gc.inverse();
}

int offset_index(int dx, int dy, int dz) { return (dx + 1) + 3 * (dy + 1) + 9 * (dz + 1); }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void remove_mean(std::vector<double>& x) {
  if (x.empty()) return;
  double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  for (double& v : x) v -= m;
}

// Integral over cell c of grad phi (physical coordinates).
Vec3 cell_gradient_integral(const PeriodicGrid& g, std::size_t c, const std::vector<double>& phi) {
  const auto& ref = reference();
  auto corners = g.cell_corners(c);
  Vec3 s = Vec3::Zero();
  for (int a = 0; a < 8; ++a)
    for (int p = 0; p < 3; ++p) s[p] += ref.grad[p][a] * phi[corners[a]];
  return s * g.h() * g.h();
}

}  // namespace

HodgeSolver::HodgeSolver(const MetricField& field, SolverOptions options)
    : grid_(field.grid()), options_(options) {
  if (!(options_.tol > 0.0)) throw ParameterError("solver tolerance must be positive");
  const auto& ref = reference();
  const std::size_t nv = grid_.vertex_count();
  coeff_.resize(grid_.cell_count());
  stencil_.assign(nv, {});
  const double h = grid_.h();
  for (std::size_t c = 0; c < grid_.cell_count(); ++c) {
    const Mat3 k = cell_coefficient(field, c);
    coeff_[c] = k;
    auto corners = grid_.cell_corners(c);
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) {
        double e = 0.0;
        for (int p = 0; p < 3; ++p)
          for (int q = 0; q < 3; ++q) e += k(p, q) * ref.s[p][q][a][b];
        int dx = (b & 1) - (a & 1), dy = ((b >> 1) & 1) - ((a >> 1) & 1), dz = ((b >> 2) & 1) - ((a >> 2) & 1);
        stencil_[corners[a]][offset_index(dx, dy, dz)] += h * e;
      }
  }
  diagonal_.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) diagonal_[v] = stencil_[v][offset_index(0, 0, 0)];
}

void HodgeSolver::apply(const std::vector<double>& x, std::vector<double>& y) const {
  const int n = grid_.n();
  y.assign(x.size(), 0.0);
  std::size_t v = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i, ++v) {
        const auto& row = stencil_[v];
        double s = 0.0;
        int t = 0;
        for (int dz = -1; dz <= 1; ++dz)
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx, ++t) s += row[t] * x[grid_.vertex(i + dx, j + dy, k + dz)];
        y[v] = s;
      }
}

std::vector<double> HodgeSolver::load(const IVec3& periods) const {
  const auto& ref = reference();
  const double h2 = grid_.h() * grid_.h();
  std::vector<double> b(grid_.vertex_count(), 0.0);
  if (periods == IVec3::Zero()) return b;
  const Vec3 nu = periods.cast<double>();
  for (std::size_t c = 0; c < grid_.cell_count(); ++c) {
    Vec3 flux = coeff_[c] * nu;
    auto corners = grid_.cell_corners(c);
    for (int a = 0; a < 8; ++a) {
      double s = 0.0;
      for (int p = 0; p < 3; ++p) s += flux[p] * ref.grad[p][a];
      b[corners[a]] += h2 * s;
    }
  }
  return b;
}

HarmonicOneForm HodgeSolver::solve(const CohomologyClass& cls) const {
  const std::size_t nv = grid_.vertex_count();
  HarmonicOneForm out;
  out.n = grid_.n();
  out.cls = cls;
  out.potential.assign(nv, 0.0);

  // A phi = -b
  std::vector<double> rhs = load(cls.periods);
  for (double& r : rhs) r = -r;
  remove_mean(rhs);
  const double bnorm = std::sqrt(dot(rhs, rhs));
  if (bnorm == 0.0) return out;

  const long max_iter = options_.max_iter > 0 ? options_.max_iter : 50L * static_cast<long>(nv);
  std::vector<double>& x = out.potential;
  std::vector<double> r = rhs, z(nv), p(nv), q(nv);
  for (std::size_t i = 0; i < nv; ++i) z[i] = r[i] / diagonal_[i];
  p = z;
  double rz = dot(r, z);
  double rnorm = bnorm;
  long it = 0;
  while (rnorm > options_.tol * bnorm) {
    if (it >= max_iter) {
      std::ostringstream msg;
      msg << "conjugate gradients did not converge in " << max_iter << " iterations (relative residual "
          << rnorm / bnorm << ")";
      throw SolverError(msg.str(), rnorm / bnorm);
    }
    apply(p, q);
    double alpha = rz / dot(p, q);
    for (std::size_t i = 0; i < nv; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    for (std::size_t i = 0; i < nv; ++i) z[i] = r[i] / diagonal_[i];
    double rz_next = dot(r, z);
    double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < nv; ++i) p[i] = z[i] + beta * p[i];
    rnorm = std::sqrt(dot(r, r));
    ++it;
  }
  remove_mean(x);
  out.iterations = it;
  out.residual = residual(out);
  return out;
}

double HodgeSolver::residual(const HarmonicOneForm& form) const {
  if (form.n != grid_.n()) throw ShapeError("form and solver grids differ");
  std::vector<double> b = load(form.cls.periods);
  std::vector<double> ax;
  apply(form.potential, ax);
  for (std::size_t i = 0; i < ax.size(); ++i) ax[i] += b[i];
  double num = std::sqrt(dot(ax, ax));
  double den = std::sqrt(dot(b, b));
  return den > 0.0 ? num / den : num;
}

double HodgeSolver::energy(const IVec3& periods, const std::vector<double>& psi) const {
  if (psi.size() != grid_.vertex_count()) throw ShapeError("potential size mismatch");
  const auto& ref = reference();
  const double h = grid_.h();
  const Vec3 nu = periods.cast<double>();
  double total = 0.0;
  for (std::size_t c = 0; c < grid_.cell_count(); ++c) {
    const Mat3& k = coeff_[c];
    auto corners = grid_.cell_corners(c);
    double quad = 0.0;
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) {
        double e = 0.0;
        for (int p = 0; p < 3; ++p)
          for (int q = 0; q < 3; ++q) e += k(p, q) * ref.s[p][q][a][b];
        quad += psi[corners[a]] * psi[corners[b]] * e;
      }
    Vec3 grad = cell_gradient_integral(grid_, c, psi);
    total += h * h * h * nu.dot(k * nu) + 2.0 * nu.dot(k * grad) + h * quad;
  }
  return total;
}

HarmonicOneForm harmonic_representative(const CohomologyClass& cls, const MetricField& field,
                                        const SolverOptions& options) {
  return HodgeSolver(field, options).solve(cls);
}

namespace {

void check_basis(const std::array<HarmonicOneForm, 3>& basis, const MetricField& field) {
  for (const auto& f : basis)
    if (f.n != field.grid().n() || f.potential.size() != field.grid().vertex_count())
      throw ShapeError("form grid does not match metric grid");
}

void check_gram(const Mat3& m) {
  double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (asym > 1e-12 * scale) throw ConsistencyError("Gram matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> eig(m, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues()[0] > 0.0)) throw DegeneracyError("Gram matrix is not positive definite");
}

}  // namespace

CohomologyGram gram_matrix(const std::array<HarmonicOneForm, 3>& basis, const MetricField& field) {
  check_basis(basis, field);
  const auto& grid = field.grid();
  std::array<std::vector<Vec3>, 3> cov;
  for (int i = 0; i < 3; ++i) cov[i] = basis[i].vertex_covectors();
  Mat3 m;
  std::vector<double> f(grid.vertex_count());
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      for (std::size_t v = 0; v < f.size(); ++v) f[v] = cov[i][v].dot(field.inverse(v) * cov[j][v]);
      m(i, j) = m(j, i) = integrate(field, f);
    }
  check_gram(m);
  return {m, 1};
}

Vec3 slice_flux(const HarmonicOneForm& form, const MetricField& field) {
  const auto& grid = field.grid();
  if (form.n != grid.n()) throw ShapeError("form grid does not match metric grid");
  const double h3 = grid.h() * grid.h() * grid.h();
  const Vec3 nu = form.cls.periods.cast<double>();
  Vec3 total = Vec3::Zero();
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    Mat3 k = cell_coefficient(field, c);
    total += k * (nu * h3 + cell_gradient_integral(grid, c, form.potential));
  }
  return total;
}

Mat3 hodge_dual_products(const std::array<HarmonicOneForm, 3>& basis, const MetricField& field) {
  check_basis(basis, field);
  const auto& grid = field.grid();
  std::array<std::vector<Vec3>, 3> cov;
  for (int i = 0; i < 3; ++i) cov[i] = basis[i].vertex_covectors();
  // (*a)_{mu nu} = eps_{mu nu lambda} w^lambda with w = sqrt(det G) G^-1 a.
  auto two_form = [](const Vec3& w) {
    Mat3 o;
    o << 0.0, w[2], -w[1], -w[2], 0.0, w[0], w[1], -w[0], 0.0;
    return o;
  };
  Mat3 m;
  std::vector<double> f(grid.vertex_count());
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      for (std::size_t v = 0; v < f.size(); ++v) {
        const Mat3& gi = field.inverse(v);
        Mat3 oi = two_form(field.sqrt_det(v) * gi * cov[i][v]);
        Mat3 oj = two_form(field.sqrt_det(v) * gi * cov[j][v]);
        // 1/2 omega_{mu nu} eta_{alpha beta} G^{mu alpha} G^{nu beta}
        f[v] = 0.5 * (gi * oi * gi).cwiseProduct(oj).sum();
      }
      m(i, j) = m(j, i) = integrate(field, f);
    }
  return m;
}

CohomologyGram dual_gram(const std::array<HarmonicOneForm, 3>& basis, const MetricField& field) {
  check_basis(basis, field);
  Mat3 pairing;  // pairing(j, i) = integral of alpha_j wedge *a_i
  for (int i = 0; i < 3; ++i) {
    Vec3 flux = slice_flux(basis[i], field);
    for (int j = 0; j < 3; ++j) pairing(j, i) = basis[j].cls.periods.cast<double>().dot(flux);
  }
  if (!(std::abs(pairing.determinant()) > 0.0)) throw DegeneracyError("wedge pairing is singular");
  Mat3 p = hodge_dual_products(basis, field);
  Mat3 inv = pairing.inverse();
  Mat3 m = inv.transpose() * p * inv;
  m = 0.5 * (m + m.transpose());
  check_gram(m);
  return {m, 2};
}

}  // namespace toruslab
