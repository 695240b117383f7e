#pragma once

#include <array>
#include <vector>

#include "toruslab/mesh.hpp"

namespace toruslab {

struct CohomologyClass {
  IVec3 periods = IVec3::Zero();
};

struct SolverOptions {
  double tol = 1e-10;
  long max_iter = 0;  // 0 means 50 N^3
};

/// a = omega_nu + d phi. Edge (v, v + e_axis) carries nu_axis h + phi(v + e_axis) - phi(v),
/// so the axis-loop periods are nu exactly.
struct HarmonicOneForm {
  int n = 0;
  CohomologyClass cls;
  std::vector<double> potential;  // phi, mean zero
  double residual = 0.0;
  long iterations = 0;

  PeriodicGrid grid() const { return PeriodicGrid(n); }
  double edge_value(int axis, std::size_t v) const;
  std::vector<double> edge_cochain() const;
  /// Coefficients at vertices: mean of the two adjacent axis edges, divided by h.
  std::vector<Vec3> vertex_covectors() const;
  /// Sum of edge values along the axis loop through vertex 0.
  Vec3 loop_periods() const;
};

/// sum_i c_i forms[i]; the residual field is left for the caller to refresh.
HarmonicOneForm combine(const std::array<HarmonicOneForm, 3>& forms, const IVec3& coeffs);
HarmonicOneForm negated(const HarmonicOneForm& form);

/// Q1 finite-element discretization of d*(K d phi) = -d*(K omega_nu) with the cell
/// coefficient K = sqrt(det Gc) Gc^-1, Gc the corner-averaged metric. Assembled once.
class HodgeSolver {
 public:
  explicit HodgeSolver(const MetricField& field, SolverOptions options = {});

  const PeriodicGrid& grid() const { return grid_; }
  HarmonicOneForm solve(const CohomologyClass& cls) const;
  /// Relative residual of the discrete co-closedness equation.
  double residual(const HarmonicOneForm& form) const;
  /// Finite-element energy of omega_nu + d psi.
  double energy(const IVec3& periods, const std::vector<double>& psi) const;

 private:
  void apply(const std::vector<double>& x, std::vector<double>& y) const;
  std::vector<double> load(const IVec3& periods) const;

  PeriodicGrid grid_;
  SolverOptions options_;
  std::vector<Mat3> coeff_;                 // K per cell
  std::vector<std::array<double, 27>> stencil_;
  std::vector<double> diagonal_;
};

HarmonicOneForm harmonic_representative(const CohomologyClass& cls, const MetricField& field,
                                        const SolverOptions& options = {});

struct CohomologyGram {
  Mat3 matrix = Mat3::Identity();
  int degree = 1;
};

/// Cell-rule integral of G^-1(a_i, a_j) dV.
CohomologyGram gram_matrix(const std::array<HarmonicOneForm, 3>& basis, const MetricField& field);

/// Integral of K (nu + grad phi) over the torus: the average flux of *a through the
/// coordinate slices, equal to the finite-element pairing with the constant forms.
Vec3 slice_flux(const HarmonicOneForm& form, const MetricField& field);

/// H^2 Gram in the integer basis dual (under the wedge pairing) to the classes of basis.
CohomologyGram dual_gram(const std::array<HarmonicOneForm, 3>& basis, const MetricField& field);

/// Pointwise Gram of the Hodge duals *a_i integrated by the cell rule.
Mat3 hodge_dual_products(const std::array<HarmonicOneForm, 3>& basis, const MetricField& field);

}  // namespace toruslab
