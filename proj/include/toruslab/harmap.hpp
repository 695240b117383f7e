#pragma once

#include <array>
#include <vector>

#include "toruslab/hodge.hpp"
#include "toruslab/lattice.hpp"
#include "toruslab/mesh.hpp"
#include "toruslab/verdict.hpp"

namespace toruslab {

/// U = (u^1, u^2, u^3) with du^j = components[j].
struct HarmonicTorusMap {
  std::array<HarmonicOneForm, 3> components;
  IMat3 basis_transform = IMat3::Identity();  // column j = periods of components[j]
  int orientation = 1;                        // -1 when the first component was negated
  double degree = 0.0;
  std::array<HarmonicOneForm, 3> standard;    // representatives of e1, e2, e3
  Mat3 standard_gram = Mat3::Identity();      // H^1 Gram in the standard basis
  ReducedBasis reduced;
};

/// 50 / N^2
double deg_tol(int n);

/// Gram of the standard classes, reduced basis, representatives of the reduced
/// classes, and an orientation flip so that the degree is +1.
HarmonicTorusMap build_map(const MetricField& field, const SolverOptions& options = {});

/// Builds the map fields from explicit components (no reduction, no flip).
HarmonicTorusMap map_from_components(std::array<HarmonicOneForm, 3> components);

/// Exact integral over each cell of det of the trilinear interpolant of the lifted map.
std::vector<double> cell_jacobian_integrals(const std::array<HarmonicOneForm, 3>& components);

/// Sum of cell_jacobian_integrals (coordinate measure, metric independent).
double degree(const std::array<HarmonicOneForm, 3>& components);
double degree(const HarmonicTorusMap& map, const MetricField& field);

struct SternComponent {
  double l2 = 0.0;
  double l3 = 0.0;
  double deficit = 0.0;  // integral of |nabla du|^2 / (|du| + reg)
  double rhs = 0.0;      // |R^-|_2 |du|_2
  double slack = 0.0;    // rhs + disc_slack - deficit
  double reg = 0.0;
};

struct SternReport {
  std::array<SternComponent, 3> components;
  double rneg_l2 = 0.0;
  double disc_slack = 0.0;
  double min_slack() const;
};

SternReport stern_report(const HarmonicTorusMap& map, const MetricField& field, double disc_slack = 0.0);

struct L3Terms {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = false;
};

/// |du|_3 <= 1 + (A eta^-1 kappa |du|_2^2)^(2/3) + (A kappa |du|_3^(3/2) |R^-|_2^(1/2))^(2/3),
/// A = 1 + kappa sigma^-1 V^(1/2) |du|_2.
L3Terms l3_bound(double l2, double l3, double rneg_l2, double sigma, double eta, double kappa,
                 double volume);

struct L3Report {
  std::array<L3Terms, 3> components;
};

L3Report l3_inequality_check(const SternReport& stern, double sigma, double eta, double kappa,
                             double volume);

}  // namespace toruslab
