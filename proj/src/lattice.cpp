#include "toruslab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "toruslab/errors.hpp"

namespace toruslab {

namespace {

constexpr long kCapacity = 10'000'000;
constexpr double kTieTol = 1e-12;

bool canonical(const IVec3& v) {
  for (int i = 0; i < 3; ++i)
    if (v[i] != 0) return v[i] > 0;
  return false;
}

bool lex_greater(const IVec3& a, const IVec3& b) {
  for (int i = 0; i < 3; ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

IVec3 cross(const IVec3& a, const IVec3& b) {
  return IVec3(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
}

long det3(const IVec3& a, const IVec3& b, const IVec3& c) {
  IVec3 x = cross(b, c);
  return static_cast<long>(a[0]) * x[0] + static_cast<long>(a[1]) * x[1] + static_cast<long>(a[2]) * x[2];
}

long gcd3(const IVec3& v) {
  long g = 0;
  for (int i = 0; i < 3; ++i) g = std::gcd(g, static_cast<long>(std::abs(v[i])));
  return g;
}

void sort_by_norm(std::vector<ShortVector>& vs) {
  std::sort(vs.begin(), vs.end(), [](const ShortVector& a, const ShortVector& b) { return a.norm < b.norm; });
  std::size_t start = 0;
  while (start < vs.size()) {
    std::size_t end = start + 1;
    double ref = vs[start].norm;
    while (end < vs.size() && vs[end].norm - ref <= kTieTol * std::max(ref, 1e-300)) ++end;
    std::sort(vs.begin() + start, vs.begin() + end,
              [](const ShortVector& a, const ShortVector& b) { return lex_greater(a.v, b.v); });
    start = end;
  }
}

// Enumeration radius: the longest vector of an LLL basis bounds lambda_3.
double lll_radius(const Mat3& q) {
  IMat3 b = lll_reduce(q);
  double r = 0.0;
  for (int j = 0; j < 3; ++j) r = std::max(r, lattice_norm(q, b.col(j)));
  return r;
}

}  // namespace

void validate_gram(const Mat3& q) {
  if (!q.allFinite()) throw ParameterError("Gram matrix has non-finite entries");
  double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ParameterError("Gram matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> eig(q, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues()[0] > 0.0)) throw ParameterError("Gram matrix is not positive definite");
}

double lattice_norm(const Mat3& q, const IVec3& v) {
  Vec3 x = v.cast<double>();
  return std::sqrt(std::max(0.0, x.dot(q * x)));
}

IMat3 lll_reduce(const Mat3& q) {
  validate_gram(q);
  IMat3 b = IMat3::Identity();
  const double delta = 0.99;
  auto gso = [&](Mat3& mu, Vec3& bstar) {
    Mat3 g = b.cast<double>().transpose() * q * b.cast<double>();
    mu.setZero();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < i; ++j) {
        double s = g(i, j);
        for (int l = 0; l < j; ++l) s -= mu(j, l) * mu(i, l) * bstar[l];
        mu(i, j) = s / bstar[j];
      }
      double s = g(i, i);
      for (int l = 0; l < i; ++l) s -= mu(i, l) * mu(i, l) * bstar[l];
      bstar[i] = s;
    }
  };
  Mat3 mu;
  Vec3 bstar;
  int k = 1;
  for (int guard = 0; k < 3; ++guard) {
    if (guard > 100000) throw CapacityError("lattice reduction did not terminate");
    gso(mu, bstar);
    for (int j = k - 1; j >= 0; --j) {
      long r = std::lround(mu(k, j));
      if (r != 0) {
        b.col(k) -= static_cast<int>(r) * b.col(j);
        gso(mu, bstar);
      }
    }
    if (bstar[k] >= (delta - mu(k, k - 1) * mu(k, k - 1)) * bstar[k - 1]) {
      ++k;
    } else {
      b.col(k).swap(b.col(k - 1));
      k = std::max(k - 1, 1);
    }
  }
  return b;
}

std::vector<ShortVector> enumerate_short_vectors(const Mat3& q, double radius) {
  validate_gram(q);
  if (!(radius > 0.0)) return {};
  IMat3 basis = lll_reduce(q);
  Mat3 g = basis.cast<double>().transpose() * q * basis.cast<double>();
  Eigen::LLT<Mat3> llt(g);
  if (llt.info() != Eigen::Success) throw ParameterError("Gram matrix is not positive definite");
  Mat3 r = llt.matrixU();
  const double r2 = radius * radius * (1.0 + 1e-9);
  std::vector<ShortVector> out;
  long nodes = 0;
  auto range = [](double lin, double diag, double rem, long& lo, long& hi) {
    double s = std::sqrt(std::max(rem, 0.0));
    lo = static_cast<long>(std::ceil((-s - lin) / diag));
    hi = static_cast<long>(std::floor((s - lin) / diag));
  };
  long lo2, hi2;
  range(0.0, r(2, 2), r2, lo2, hi2);
  for (long y2 = lo2; y2 <= hi2; ++y2) {
    double t2 = r(2, 2) * y2;
    double rem2 = r2 - t2 * t2;
    long lo1, hi1;
    range(r(1, 2) * y2, r(1, 1), rem2, lo1, hi1);
    for (long y1 = lo1; y1 <= hi1; ++y1) {
      double t1 = r(1, 1) * y1 + r(1, 2) * y2;
      double rem1 = rem2 - t1 * t1;
      long lo0, hi0;
      range(r(0, 1) * y1 + r(0, 2) * y2, r(0, 0), rem1, lo0, hi0);
      for (long y0 = lo0; y0 <= hi0; ++y0) {
        if (++nodes > kCapacity) {
          std::ostringstream msg;
          msg << "enumeration exceeded " << kCapacity << " candidates at radius " << radius;
          throw CapacityError(msg.str());
        }
        if (y0 == 0 && y1 == 0 && y2 == 0) continue;
        IVec3 v = basis * IVec3(static_cast<int>(y0), static_cast<int>(y1), static_cast<int>(y2));
        if (!canonical(v)) continue;
        double nv = lattice_norm(q, v);
        if (nv <= radius * (1.0 + 1e-12)) out.push_back({v, nv});
      }
    }
  }
  sort_by_norm(out);
  return out;
}

SuccessiveMinima successive_minima(const Mat3& q) {
  auto vs = enumerate_short_vectors(q, lll_radius(q));
  SuccessiveMinima m;
  int found = 0;
  for (const auto& s : vs) {
    bool independent = false;
    if (found == 0) independent = true;
    else if (found == 1) independent = cross(m.vectors[0], s.v) != IVec3::Zero();
    else independent = det3(m.vectors[0], m.vectors[1], s.v) != 0;
    if (!independent) continue;
    m.vectors[found] = s.v;
    m.lambda[found] = s.norm;
    if (++found == 3) break;
  }
  if (found < 3) throw CapacityError("enumeration radius missed a successive minimum");
  return m;
}

ReducedBasis reduced_basis(const Mat3& q) {
  SuccessiveMinima m = successive_minima(q);
  auto vs = enumerate_short_vectors(q, 1.5 * lll_radius(q));
  ReducedBasis out;
  out.minima = m.lambda;
  IVec3 b1 = m.vectors[0];
  IVec3 normal = cross(m.vectors[0], m.vectors[1]);
  normal /= static_cast<int>(gcd3(normal));
  IVec3 b2 = IVec3::Zero(), b3 = IVec3::Zero();
  for (const auto& s : vs) {
    IVec3 c = cross(b1, s.v);
    if (c == normal || c == -normal) {
      b2 = s.v;
      break;
    }
  }
  for (const auto& s : vs) {
    if (std::abs(det3(b1, b2, s.v)) == 1) {
      b3 = s.v;
      break;
    }
  }
  if (b2 == IVec3::Zero() || b3 == IVec3::Zero()) throw CapacityError("basis completion not found in enumeration");
  out.basis.col(0) = b1;
  out.basis.col(1) = b2;
  out.basis.col(2) = b3;
  for (int j = 0; j < 3; ++j) out.norms[j] = lattice_norm(q, out.basis.col(j));
  out.unimodular = std::abs(det3(b1, b2, b3)) == 1;
  return out;
}

double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

double minkowski_constant(int n) { return std::pow(2.0, n) / unit_ball_volume(n); }

namespace {
void check_positive(double sigma, double volume) {
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  if (!(volume > 0.0)) throw ParameterError("volume must be positive");
}
}  // namespace

double product_minima_bound(int n, double sigma, double volume) {
  check_positive(sigma, volume);
  double b = unit_ball_volume(n);
  return std::pow(2.0, 2 * n) * b * b * std::pow(sigma, -n) * std::pow(volume, n / 2.0);
}

double first_minimum_bound(int n, double sigma, double volume) {
  check_positive(sigma, volume);
  return 4.0 * std::pow(unit_ball_volume(n), 2.0 / n) / sigma * std::sqrt(volume);
}

double basis_norm_bound(int n, int j, double sigma, double volume) {
  check_positive(sigma, volume);
  if (j < 1 || j > n) throw ParameterError("basis index out of range");
  double b = unit_ball_volume(n);
  double inner = std::pow(2.0, 2 * n) * b * b * std::pow(sigma, -(n + j - 1)) * std::pow(volume, (n + j - 1) / 2.0);
  return j * std::pow(inner, 1.0 / (n - j + 1));
}

LatticeReport minkowski_and_dual_checks(const Mat3& q1, const Mat3& q2, double sigma, double volume,
                                        double dual_tol) {
  check_positive(sigma, volume);
  LatticeReport rep;
  rep.minima1 = successive_minima(q1);
  rep.minima2 = successive_minima(q2);
  rep.basis1 = reduced_basis(q1);
  rep.det1 = q1.determinant();
  rep.det2 = q2.determinant();
  const int n = 3;
  auto prod = [](const SuccessiveMinima& m) { return m.lambda[0] * m.lambda[1] * m.lambda[2]; };
  const double rel = 1e-12;
  rep.verdicts.push_back(upper_bound("lat_minima_det_ineq:h1", prod(rep.minima1),
                                     minkowski_constant(n) * std::sqrt(rep.det1), rel));
  rep.verdicts.push_back(upper_bound("lat_minima_det_ineq:h2", prod(rep.minima2),
                                     minkowski_constant(n) * std::sqrt(rep.det2), rel));
  rep.verdicts.push_back(upper_bound("det_dual_lat", std::abs(rep.det1 * rep.det2 - 1.0), dual_tol));
  rep.verdicts.push_back(upper_bound("prod_min_upper_bound", prod(rep.minima1),
                                     product_minima_bound(n, sigma, volume)));
  rep.verdicts.push_back(upper_bound("lambda1_upper_bound", rep.minima1.lambda[0],
                                     first_minimum_bound(n, sigma, volume)));
  rep.verdicts.push_back(upper_bound("bounded_lat_basis:b1", std::abs(rep.basis1.norms[0] - rep.minima1.lambda[0]), 1e-12));
  for (int j = 2; j <= 3; ++j)
    rep.verdicts.push_back(upper_bound("bounded_lat_basis:b" + std::to_string(j), rep.basis1.norms[j - 1],
                                       0.5 * j * rep.minima1.lambda[j - 1], 1e-12));
  for (int j = 1; j <= 3; ++j)
    rep.verdicts.push_back(upper_bound("basis_norm_bound:a" + std::to_string(j), rep.basis1.norms[j - 1],
                                       basis_norm_bound(n, j, sigma, volume)));
  return rep;
}

double systole_bound(const Mat3& q, double volume) {
  if (!(volume > 0.0)) throw ParameterError("volume must be positive");
  return std::sqrt(volume) * successive_minima(q).lambda[0];
}

double flat_stable_systole(const Mat3& g) {
  validate_gram(g);
  Mat3 adj = g.determinant() * g.inverse();
  adj = 0.5 * (adj + adj.transpose());
  return std::min(successive_minima(g).lambda[0], successive_minima(adj).lambda[0]);
}

}  // namespace toruslab
