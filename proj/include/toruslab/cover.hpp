#pragma once

#include <array>
#include <vector>

#include "toruslab/hodge.hpp"
#include "toruslab/mesh.hpp"
#include "toruslab/verdict.hpp"

namespace toruslab {

/// floor(i / n) for any sign of i.
inline int floor_div(int i, int n) { return i >= 0 ? i / n : -((-i + n - 1) / n); }

/// Lifted cells (x, mu) for mu in {-w..w}^3, stored in lifted coordinates
/// I in [-wN, (w+1)N). Lifted vertices run one further on each axis.
class LiftedWindow {
 public:
  LiftedWindow(const MetricField& field, int half_width);

  int half_width() const { return w_; }
  int n() const { return n_; }
  int lo() const { return -w_ * n_; }
  int cells_per_axis() const { return (2 * w_ + 1) * n_; }
  int vertices_per_axis() const { return cells_per_axis() + 1; }
  std::size_t vertex_count() const;
  std::size_t cell_count() const;

  bool vertex_inside(const IVec3& p) const;
  bool cell_inside(const IVec3& c) const;
  /// Cell in the outermost layer of the window.
  bool cell_on_boundary(const IVec3& c) const;
  std::size_t vertex_index(const IVec3& p) const;
  std::size_t cell_index(const IVec3& c) const;
  IVec3 vertex_coords(std::size_t idx) const;
  IVec3 cell_coords(std::size_t idx) const;

  /// Dijkstra over lifted vertices with the pulled-back 26-neighbour weights.
  std::vector<double> shortest_paths(const std::vector<IVec3>& sources, double cutoff = kInfinityNorm) const;

 private:
  const MetricField* field_;
  DistanceGraph graph_;
  int w_;
  int n_;
};

/// u^ on the lift; u^(x + m) = u^(x) + <periods, m>.
struct LiftedFunction {
  int n = 0;
  IVec3 periods = IVec3::Zero();
  std::vector<double> base;  // values on the translate-0 vertices

  double value(const IVec3& p) const;
};

/// Path-integrates an edge cochain (3N^3 values, axis-major) from vertex 0.
/// Throws ConsistencyError if the cochain is not closed or has non-integer periods.
LiftedFunction lift(const std::vector<double>& edge_cochain, int n, double tol = 1e-10);
LiftedFunction lift(const HarmonicOneForm& form, double tol = 1e-10);

/// Largest closedness defect of an edge cochain against the lift it induces.
double loop_defect(const std::vector<double>& edge_cochain, int n);

/// One lift of every base cell: translate[c] is the deck translate of the chosen lift.
struct FundamentalDomainCells {
  enum class Kind { unit_cube, dirichlet };
  Kind kind = Kind::unit_cube;
  int n = 0;
  IVec3 basepoint = IVec3::Zero();  // lifted vertex coordinates
  std::vector<IVec3> translate;

  bool contains_cell(const IVec3& cell) const;
  /// Some incident lifted cell belongs to the domain.
  bool contains_vertex(const IVec3& p) const;
  std::vector<IVec3> cells() const;
  IVec3 cell_coords(std::size_t base_cell) const;
};

FundamentalDomainCells unit_cube_domain(const PeriodicGrid& grid);
FundamentalDomainCells translated(const FundamentalDomainCells& domain, const IVec3& nu);

/// Each base cell takes the lift whose corners have the least summed graph distance to
/// the basepoint. Ties go to the cell centre nearest the basepoint under G(basepoint),
/// then to the lexicographically largest translate. The window
/// grows from half-width `window` to 2 if a chosen cell reaches the window's outer layer.
FundamentalDomainCells dirichlet_domain(const MetricField& field, const IVec3& basepoint, int window = 1);

struct DomainCheck {
  bool covers = false;
  bool injective = false;
  bool connected = false;
  double boundary_fraction = 0.0;  // cells with a face on the domain boundary / all cells
};

DomainCheck verify_domain(const FundamentalDomainCells& domain);

struct Neighborhood {
  std::vector<IVec3> cells;     // lifted cells with a corner within eta of the domain
  std::vector<IVec3> vertices;  // lifted vertices within eta of the domain
  int kappa = 0;
  int window = 1;
};

/// V_eta and kappa = max over base cells of the number of lifts in V_eta.
Neighborhood eta_neighborhood(const FundamentalDomainCells& domain, double eta, const MetricField& field,
                              int window = 1);
int covering_constant(const FundamentalDomainCells& domain, double eta, const MetricField& field);

struct OscillationReport {
  double osc_domain = 0.0;
  double osc_neighborhood = 0.0;
  double bound_domain = 0.0;        // sigma^-1 V^(1/2) |du|_2
  double bound_neighborhood = 0.0;  // kappa sigma^-1 V^(1/2) |du|_2
  std::vector<Verdict> verdicts;
};

OscillationReport oscillation_bounds(const LiftedFunction& u, const FundamentalDomainCells& domain,
                                     const Neighborhood& nbhd, double sigma, const MetricField& field,
                                     double du_l2, double tol = 0.0);

struct ChainPath {
  std::vector<IVec3> vertices;
  std::vector<int> labels;                  // translate index of each segment
  std::vector<std::size_t> segment_starts;  // index into vertices
  bool reentry_free = true;
};

/// Vertex path from x0 to x1 through the union of the translates, split into
/// segments each inside one translate, no translate used twice.
ChainPath domain_chain_path(const IVec3& x0, const IVec3& x1,
                            const std::vector<FundamentalDomainCells>& translates);

/// Every boundary vertex between consecutive segments lies in both translates, every
/// segment stays in its translate, and labels are distinct.
bool chain_path_valid(const ChainPath& path, const std::vector<FundamentalDomainCells>& translates);

}  // namespace toruslab
