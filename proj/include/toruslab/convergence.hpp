#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "toruslab/approx.hpp"
#include "toruslab/harmap.hpp"
#include "toruslab/hodge.hpp"
#include "toruslab/mesh.hpp"
#include "toruslab/verdict.hpp"

namespace toruslab {

/// m sample vertices and their m x m distance matrix (row-major).
struct IntrinsicMetricSample {
  std::vector<std::size_t> vertices;
  std::vector<double> distances;

  std::size_t size() const { return vertices.size(); }
  double at(std::size_t i, std::size_t j) const { return distances[i * vertices.size() + j]; }
};

/// Vertices that are corners of a flagged cell (all vertices when cells is null).
std::vector<std::size_t> region_vertices(const PeriodicGrid& grid, const CellMask* cells);

/// Farthest-point sample of m region vertices, starting from the lowest-index one,
/// under shortest paths restricted to the region (cells == nullptr: ambient).
IntrinsicMetricSample intrinsic_distances(const DistanceGraph& graph, const CellMask* cells, int m);
IntrinsicMetricSample intrinsic_distances(const CellMask& omega, const MetricField& field, int m);

/// Distances between fixed vertices on another graph.
IntrinsicMetricSample sample_distances(const DistanceGraph& graph, const std::vector<std::size_t>& vertices,
                                       const CellMask* cells = nullptr);

/// Half the largest distortion |dA(x, x') - dB(y, y')| over pairs of corresponding pairs.
double gh_upper_bound(const IntrinsicMetricSample& a, const IntrinsicMetricSample& b,
                      const std::vector<std::pair<std::size_t, std::size_t>>& correspondence);
/// Identity correspondence between equally sized samples.
double gh_upper_bound(const IntrinsicMetricSample& a, const IntrinsicMetricSample& b);

/// Distance on R^3 / Z^3 with the constant metric gf; gf should be close to reduced.
double flat_torus_distance(const Mat3& gf, const Vec3& p, const Vec3& q);

/// U(x) modulo Z^3 at a vertex.
Vec3 map_value(const HarmonicTorusMap& map, std::size_t v);

struct LargeSubsetReport {
  bool found = false;
  CellMask component;
  double volume = 0.0;             // |E|
  double boundary = 0.0;           // |dE|
  double component_volume = 0.0;
  double component_boundary = 0.0;
  double complement_volume = 0.0;  // |Omega^c|
  std::vector<double> component_volumes;
  double fragment_sum = 0.0;       // sum of component volumes when none qualifies
  bool fragment_bound_holds = false;  // fragment_sum <= |dE| / Lambda
  std::vector<Verdict> verdicts;
};

/// Largest face-connected component of cells with volume >= V/2 satisfying
/// |Omega^c| <= |dOmega| / Lambda <= |dE| / Lambda; otherwise the fragmented report.
LargeSubsetReport large_connected_subset(const CellMask& cells, double lambda, const MetricField& field);

/// Periodic N x N slice with a constant metric; cells indexed i + N j.
struct Slice2D {
  int n = 0;
  Eigen::Matrix2d metric = Eigen::Matrix2d::Identity();
  CellMask cells;

  double h() const { return 1.0 / n; }
  std::size_t vertex(int i, int j) const;
};

struct DetourPath {
  std::vector<std::pair<int, int>> vertices;  // lifted vertex coordinates
  double length = 0.0;
  double ambient = 0.0;   // unrestricted shortest-path length
  double boundary = 0.0;  // |dA|
  double bound = 0.0;     // ambient + boundary + 2h
  int holes = 0;
  Verdict verdict;
};

/// Ambient shortest path with every excursion into a hole replaced by a walk along the
/// hole's boundary. Throws TopologyError for a disconnected A or a hole that wraps.
DetourPath detour_bounded_path_2d(const Slice2D& slice, std::pair<int, int> x, std::pair<int, int> y);

/// Length of a slice path; throws TopologyError if an edge leaves the closure of A.
double slice_path_length(const Slice2D& slice, const std::vector<std::pair<int, int>>& path, bool check_inside);

struct FamilyParams {
  double sigma = 1.0;
  double lambda = 3.0;
  double eta = 0.1;
  double cap_volume = 2.0;
  double cap_rneg = 1e3;
  double cap_kappa = 64.0;
  int samples = 64;
  int injectivity_samples = 64;
  std::uint64_t seed = 1;
  SolverOptions solver;
};

/// Map, Stern, constant approximation, Omega and closeness diagnostics for one metric.
struct MetricAnalysis {
  double volume = 0.0;
  HarmonicTorusMap map;
  SternReport stern;
  ConstantApprox approx;
  LevelSets levels;
  bool levels_nested = false;  // E1 subset of E2
  OmegaReport omega;
  double gh_bound = 0.0;       // d^_Omega against Dijkstra on U^* g_F
  double gh_exact = 0.0;       // d^_Omega against the closed-form flat distance of U-images
  int kappa = 0;
  double cheeger_upper = 0.0;
};

/// Prebuilt map, Stern report and covering constant (kappa >= 0) are reused when given.
MetricAnalysis analyze_metric(const MetricField& field, const FamilyParams& params,
                              const HarmonicTorusMap* map = nullptr, const SternReport* stern = nullptr,
                              int kappa = -1);

struct SweepRow {
  double eps = 0.0;
  double rneg_l2 = 0.0;
  double tau = 0.0;
  double omega_c_vol = 0.0;
  double omega_bdry = 0.0;
  double c0_deficit = 0.0;
  double gh_bound = 0.0;
  double a_drift = 0.0;

  double gh_exact = 0.0;
  double volume = 0.0;
  double degree = 0.0;
  double stern_min_slack = 0.0;
  double int_det_omega = 0.0;
  double measured_b_c0 = 0.0;
  int injectivity = 0;
  int kappa = 0;
  double cheeger_upper = 0.0;
  bool tau_warning = false;
  bool in_volume = false;
  bool in_rneg = false;
  bool in_kappa = false;
  bool lambda_plausible = false;  // slab estimate >= Lambda
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double rneg_floor = 0.0;          // value at eps = 0
  std::vector<double> rneg_ratios;  // per halving, normalized so linear decay gives 1
  std::vector<Verdict> verdicts;
};

/// Runs the analysis for spec.scaled(eps) for every eps (strictly decreasing) and at eps = 0.
SweepResult sweep(const MetricSpec& spec, int n, const std::vector<double>& eps, const FamilyParams& params);

std::string sweep_csv(const SweepResult& result);

}  // namespace toruslab
