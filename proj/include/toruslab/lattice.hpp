#pragma once

#include <array>
#include <vector>

#include "toruslab/mesh.hpp"
#include "toruslab/verdict.hpp"

namespace toruslab {

/// Throws ParameterError unless q is symmetric positive definite.
void validate_gram(const Mat3& q);

double lattice_norm(const Mat3& q, const IVec3& v);

struct ShortVector {
  IVec3 v;
  double norm;
};

/// Nonzero lattice vectors with norm <= radius, one per +/- pair (first nonzero
/// entry positive), ordered by norm; norms equal to 1e-12 relative are ordered
/// lexicographically largest first.
std::vector<ShortVector> enumerate_short_vectors(const Mat3& q, double radius);

/// Columns of an LLL-reduced (delta = 0.99) basis of Z^3 for the form q.
IMat3 lll_reduce(const Mat3& q);

struct SuccessiveMinima {
  std::array<double, 3> lambda{};
  std::array<IVec3, 3> vectors{};
};

SuccessiveMinima successive_minima(const Mat3& q);

struct ReducedBasis {
  IMat3 basis = IMat3::Identity();
  std::array<double, 3> norms{};
  std::array<double, 3> minima{};
  bool unimodular = false;
};

/// b1 is the first minimum; b2 the shortest vector completing b1 to a basis of the
/// saturated plane of the first two minima; b3 the shortest completing to Z^3.
ReducedBasis reduced_basis(const Mat3& q);

double unit_ball_volume(int n);
/// 2^n / |B(0,1)|
double minkowski_constant(int n);
/// 2^(2n) |B|^2 sigma^-n V^(n/2)
double product_minima_bound(int n, double sigma, double volume);
/// 4 |B|^(2/n) sigma^-1 V^(1/2)
double first_minimum_bound(int n, double sigma, double volume);
/// j (2^(2n) |B|^2 sigma^-(n+j-1) V^((n+j-1)/2))^(1/(n-j+1))
double basis_norm_bound(int n, int j, double sigma, double volume);

struct LatticeReport {
  SuccessiveMinima minima1;
  SuccessiveMinima minima2;
  ReducedBasis basis1;
  double det1 = 0.0;
  double det2 = 0.0;
  std::vector<Verdict> verdicts;
};

LatticeReport minkowski_and_dual_checks(const Mat3& q1, const Mat3& q2, double sigma, double volume,
                                        double dual_tol = 5e-3);

/// V^(1/2) lambda_1(q).
double systole_bound(const Mat3& q, double volume);

/// min(stsys_1, stsys_2) of the flat torus R^3 / Z^3 with constant metric g: the shortest
/// closed geodesic and the least area of an embedded 2-torus (lambda_1 of det(g) g^-1).
double flat_stable_systole(const Mat3& g);

}  // namespace toruslab
