#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace toruslab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using IVec3 = Eigen::Vector3i;
using IMat3 = Eigen::Matrix3i;

/// One flag per cell (or per vertex), indexed like the grid.
using CellMask = std::vector<std::uint8_t>;

inline constexpr double kInfinityNorm = std::numeric_limits<double>::infinity();

/// Periodic cubical grid of [0,1)^3 with N cells per axis.
/// Vertices and cells share the index i + N*(j + N*k); cell (i,j,k) has
/// lower corner vertex (i,j,k). Edges and faces carry an axis tag.
class PeriodicGrid {
 public:
  explicit PeriodicGrid(int n);

  int n() const { return n_; }
  double h() const { return h_; }
  std::size_t vertex_count() const { return count_; }
  std::size_t cell_count() const { return count_; }
  std::size_t edge_count() const { return 3 * count_; }
  std::size_t face_count() const { return 3 * count_; }

  int wrap(int i) const {
    int r = i % n_;
    return r < 0 ? r + n_ : r;
  }
  std::size_t vertex(int i, int j, int k) const {
    return static_cast<std::size_t>(wrap(i)) +
           static_cast<std::size_t>(n_) *
               (static_cast<std::size_t>(wrap(j)) + static_cast<std::size_t>(n_) * wrap(k));
  }
  std::size_t cell(int i, int j, int k) const { return vertex(i, j, k); }
  /// Edge from vertex (i,j,k) in direction +axis.
  std::size_t edge(int axis, int i, int j, int k) const {
    return static_cast<std::size_t>(axis) * count_ + vertex(i, j, k);
  }
  /// Face with lower corner (i,j,k) normal to axis.
  std::size_t face(int axis, int i, int j, int k) const {
    return static_cast<std::size_t>(axis) * count_ + vertex(i, j, k);
  }
  std::array<int, 3> coords(std::size_t v) const {
    int i = static_cast<int>(v % n_);
    int j = static_cast<int>((v / n_) % n_);
    int k = static_cast<int>(v / (static_cast<std::size_t>(n_) * n_));
    return {i, j, k};
  }
  std::size_t shift(std::size_t v, int di, int dj, int dk) const {
    auto c = coords(v);
    return vertex(c[0] + di, c[1] + dj, c[2] + dk);
  }
  /// Corner b (bit 0: +x, bit 1: +y, bit 2: +z) of cell c.
  std::array<std::size_t, 8> cell_corners(std::size_t c) const;
  Vec3 position(std::size_t v) const;

  bool operator==(const PeriodicGrid& o) const { return n_ == o.n_; }
  bool operator!=(const PeriodicGrid& o) const { return n_ != o.n_; }

 private:
  int n_;
  double h_;
  std::size_t count_;
};

PeriodicGrid build_grid(int n);

/// A cos(2 pi k.x + phase).
struct FourierTerm {
  double amplitude = 0.0;
  IVec3 wave = IVec3::Zero();
  double phase = 0.0;
};

double evaluate_terms(const std::vector<FourierTerm>& terms, const Vec3& x);

struct FourierComponent {
  int i = 0;
  int j = 0;
  std::vector<FourierTerm> terms;
};

/// Trigonometric-polynomial metric description.
///   constant:       G = base
///   conformal:      G = exp(2 f) base,  f = sum of terms
///   direct_fourier: G_ij = base_ij + sum of the (i,j) component terms (symmetrized)
struct MetricSpec {
  enum class Kind { constant, conformal, direct_fourier };
  Kind kind = Kind::constant;
  Mat3 base = Mat3::Identity();
  std::vector<FourierTerm> terms;
  std::vector<FourierComponent> components;

  Mat3 evaluate(const Vec3& x) const;
  /// Same description with every perturbation amplitude multiplied by eps.
  MetricSpec scaled(double eps) const;

  static MetricSpec constant(const Mat3& g);
  static MetricSpec conformal(const Mat3& base, std::vector<FourierTerm> terms);
};

/// Vertex-sampled SPD metric with cached inverses and cell quadrature weights.
class MetricField {
 public:
  MetricField(const PeriodicGrid& grid, std::vector<Mat3> values, double eig_floor = 1e-6);

  static MetricField sample(const PeriodicGrid& grid, const MetricSpec& spec,
                            double eig_floor = 1e-6);

  const PeriodicGrid& grid() const { return grid_; }
  const std::vector<Mat3>& values() const { return values_; }
  const Mat3& at(std::size_t v) const { return values_[v]; }
  const Mat3& inverse(std::size_t v) const { return inverse_[v]; }
  double sqrt_det(std::size_t v) const { return sqrt_det_[v]; }

  /// Average of the eight corner metrics.
  Mat3 cell_metric(std::size_t c) const;
  /// h^3 times the corner average of sqrt(det G).
  double cell_volume(std::size_t c) const { return cell_volume_[c]; }
  double total_volume() const { return total_volume_; }

 private:
  PeriodicGrid grid_;
  std::vector<Mat3> values_;
  std::vector<Mat3> inverse_;
  std::vector<double> sqrt_det_;
  std::vector<double> cell_volume_;
  double total_volume_ = 0.0;
};

double total_volume(const MetricField& field);

/// Cell rule: each cell contributes h^3/8 sum over corners of f sqrt(det G), so the
/// full-torus integral is the periodic vertex sum. region == nullptr means every cell.
double integrate(const MetricField& field, const std::vector<double>& vertex_values,
                 const CellMask* region = nullptr);

/// (integral of |f|^p)^(1/p); p = kInfinityNorm gives the max over region vertices.
double lp_norm(const std::vector<double>& vertex_values, double p, const MetricField& field,
               const CellMask* region = nullptr);

/// Volume of the cells flagged in region.
double region_volume(const MetricField& field, const CellMask& region);

struct ScalarCurvatureField {
  std::vector<double> r;
  std::vector<double> negative_part() const;
};

ScalarCurvatureField scalar_curvature(const MetricField& field);

/// gamma[v][k](i,j) = Gamma^k_ij at vertex v.
using Christoffel = std::array<Mat3, 3>;
std::vector<Christoffel> christoffel(const MetricField& field);

/// Covariant Hessian H(i,j) = d_i a_j - Gamma^k_ij a_k of a vertex covector field.
std::vector<Mat3> covariant_hessian(const MetricField& field,
                                    const std::vector<Christoffel>& gamma,
                                    const std::vector<Vec3>& covectors);

/// |H|_g = sqrt(tr(G^-1 H G^-1 H^T)).
double hessian_norm(const Mat3& g_inv, const Mat3& hess);

/// |a|_g = sqrt(a^T G^-1 a) per vertex.
std::vector<double> covector_norms(const MetricField& field, const std::vector<Vec3>& covectors);

/// 26-neighbour distance graph. Edge (v, v+d) has weight h sqrt(d^T M d) with M
/// the mean of the endpoint matrices of the supplied vertex metric.
class DistanceGraph {
 public:
  DistanceGraph(const PeriodicGrid& grid, const std::vector<Mat3>& vertex_metric);

  static const std::array<IVec3, 26>& directions();

  const PeriodicGrid& grid() const { return grid_; }
  /// Weight of the edge from v along directions()[d].
  double weight(std::size_t v, int d) const;

  /// Single- or multi-source Dijkstra. If cells is given, an edge is usable only
  /// when a flagged cell contains both endpoints. Distances above cutoff stay infinite.
  std::vector<double> shortest_paths(const std::vector<std::size_t>& sources,
                                     const CellMask* cells = nullptr,
                                     double cutoff = kInfinityNorm) const;

 private:
  PeriodicGrid grid_;
  std::vector<std::array<double, 13>> half_;
};

/// True if some flagged cell contains both v and v + d (d in {-1,0,1}^3).
bool edge_in_cells(const PeriodicGrid& grid, std::size_t v, const IVec3& d, const CellMask& cells);

}  // namespace toruslab
