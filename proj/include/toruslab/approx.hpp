#pragma once

#include <cstdint>
#include <vector>

#include "toruslab/harmap.hpp"
#include "toruslab/mesh.hpp"
#include "toruslab/verdict.hpp"

namespace toruslab {

/// g^{jk}(x) = g(du^j, du^k) at every vertex.
struct PointwiseGramField {
  std::vector<Mat3> values;
};

/// Rows of the returned matrix are the vertex covectors of the three components.
std::vector<Mat3> coefficient_matrices(const HarmonicTorusMap& map);

PointwiseGramField pointwise_gram(const HarmonicTorusMap& map, const MetricField& field);

struct ConstantApprox {
  Mat3 a = Mat3::Zero();
  double tau = 0.0;
  double lambda = 0.0;
  double stern_term = 0.0;   // sup_jk |du^j|_3^(1/2) |du^k|_3 (int |nabla du^j|^2/|du^j|)^(1/2)
  Mat3 l1_deficit = Mat3::Zero();
  double l1_bound = 0.0;     // 2 Lambda^-1 stern_term
  double a_sup = 0.0;
  double a_bound = 0.0;
  double min_eigenvalue = 0.0;
  std::vector<Verdict> verdicts;
};

/// a = volume mean of g^{jk}; tau and the L1 bounds from the component norms in stern.
ConstantApprox constant_approx(const PointwiseGramField& gram, const MetricField& field, double lambda,
                               const SternReport& stern);

/// Sum_jk |g^{jk} - a^{jk}| and Sum_jk |g^{jk} - a^{jk}|^2 per vertex.
std::vector<double> l1_deviation(const PointwiseGramField& gram, const Mat3& a);
std::vector<double> l2_deviation(const PointwiseGramField& gram, const Mat3& a);

/// Deviations at or below these count as zero (roundoff on constant fields).
inline constexpr double kZeroDeviation = 1e-10;

struct LevelSets {
  CellMask e1;
  CellMask e2;
  double volume_e1 = 0.0;
  double volume_e2 = 0.0;
  bool half_volume_applies = false;  // tau < 1
  bool half_volume_holds = false;    // |E1| >= V/2
};

/// Vertex predicates extended to cells when all eight corners satisfy them.
LevelSets level_sets(const PointwiseGramField& gram, const Mat3& a, double tau, const MetricField& field);

/// Induced area of the faces between flagged and unflagged cells.
double boundary_area(const CellMask& cells, const MetricField& field);

/// Components under periodic face adjacency; returns labels (-1 outside) and sizes.
std::vector<int> face_components(const PeriodicGrid& grid, const CellMask& cells, std::vector<std::size_t>& sizes);

struct OmegaReport {
  CellMask omega;
  double tau = 0.0;
  double t0 = 0.0;
  bool tau_warning = false;  // tau > 1/8
  double volume = 0.0;
  double complement_volume = 0.0;
  double boundary = 0.0;
  double sup_deviation = 0.0;      // max over omega vertices of max_jk |g^{jk} - a^{jk}|
  double sup_sum_deviation = 0.0;  // max over omega vertices of sum_jk |g^{jk} - a^{jk}|
  std::vector<Verdict> verdicts;

  // filled by omega_diagnostics
  double l3_complement_cubed = 0.0;
  double int_det_omega = 0.0;
  double int_det_complement = 0.0;
  double int_abs_det_omega = 0.0;
  double degree = 0.0;
  bool sign_constant = false;
  double image_complement_bound = 0.0;  // sum over complement cells of |cell Jacobian integral|
  double det_identity_defect = 0.0;     // max |det g^{jk} - det(C)^2 det(G^-1)| / scale
  double det_gap_violation = 0.0;       // max of |det g - det a| - (|g|+|a|)^2 |g - a|
  double min_det_g = 0.0;
  double det_a = 0.0;
  double det_lead = 0.0;                // (int_Omega det dU)^2 / |Omega|^2
  double rneg_l2 = 0.0;
  double measured_b_l3 = 0.0;
  double measured_b_det = 0.0;
  double measured_b_image = 0.0;
  double measured_b_det_g = 0.0;
  double measured_b_det_a = 0.0;
  int injectivity = 0;
  Mat3 g_flat = Mat3::Identity();
  double c0_deficit = 0.0;
  double measured_b_c0 = 0.0;
};

/// Largest face-connected component of the best of 16 sublevel sets
/// {Sum |g - a|^2 < t}, t in [tau^2, 4 tau^2], ranked by boundary area.
OmegaReport extract_omega(const PointwiseGramField& gram, const ConstantApprox& approx, const MetricField& field);

struct FlatRecovery {
  Mat3 g_flat = Mat3::Identity();
  double c0_deficit = 0.0;
};

/// g_F = a^-1; deficit = sup over omega vertices of |G - C^T g_F C|_G.
FlatRecovery recover_flat(const Mat3& a, const HarmonicTorusMap& map, const MetricField& field,
                          const CellMask& omega, double det_floor = 1e-6);

/// U^* g_F at every vertex.
std::vector<Mat3> pullback_flat(const Mat3& g_flat, const HarmonicTorusMap& map);

/// Maximum over samples of the number of preimages in omega of a uniformly drawn
/// target modulo Z^3, for the piecewise-linear map on six Kuhn simplices per cell.
int injectivity_count(const HarmonicTorusMap& map, const CellMask& omega, int samples, std::uint64_t seed);

void omega_diagnostics(OmegaReport& report, const HarmonicTorusMap& map, const MetricField& field,
                       const PointwiseGramField& gram, const ConstantApprox& approx, double rneg_l2,
                       int injectivity_samples, std::uint64_t seed);

/// |det a - det b| <= (|a| + |b|)^2 |a - b| in the spectral norm.
double det_gap_bound(const Mat3& a, const Mat3& b);

/// Smallest boundary-area-to-volume ratio over coordinate slabs: an upper bound on
/// the Cheeger constant.
double cheeger_slab_upper_bound(const MetricField& field);

}  // namespace toruslab
