#pragma once

#include <vector>

#include "aqlab/interface_map.hpp"
#include "aqlab/trace.hpp"

namespace aq {

// One solved block: the chart values of the discrete energy minimizer with
// the given outer boundary row, zero on the slit lines (half charts) and
// periodic closure (full charts).
struct BlockSolve {
  ChartGrid chart;
  int multiplicity = 1;
  double energy = 0;    // chart quadratic of one copy
  double residual = 0;  // largest normalized stencil defect
};

struct SolveResult {
  InterfaceMap map;  // all blocks assembled with their multiplicities
  double energy = 0;
  std::vector<double> annulus;          // per-annulus energies of the map
  std::vector<double> ring_tangential;  // intrinsic ring trace energies
  std::vector<BlockSolve> blocks;
  double stencil_residual = 0;  // max over blocks
};

// Minimizes the discrete Dirichlet energy over the annulus mesh among maps
// with the given reduced boundary trace (vanishing interface values), by
// decomposing the trace and solving one sparse SPD system per distinct
// block. Identical blocks are solved once and reused.
SolveResult solve_branched(const TraceLoop& boundary, const DiskMesh& mesh);

// Chart-level solve used internally and by homogeneous studies: boundary row
// given on ring `rings`, returns the full grid.
BlockSolve solve_chart(const DiskMesh& mesh, bool half, int winding, const std::vector<RVec>& boundary_row);

// Discrete quadratic of a chart grid under the mesh weights; by construction
// the total over the blocks of a map equals its assembled energy.
double chart_energy(const ChartGrid& c, const DiskMesh& mesh);

struct RelaxResult {
  InterfaceMap map;
  double energy = 0;
  std::vector<double> energy_trace;  // energy after each matching round
  int matching_rounds = 0;
};

// Independent route to the same minimizer: starts from a crude inward guess,
// alternates optimal re-matching of neighboring samples with a diagonally
// preconditioned conjugate-gradient solve of the matched quadratic, until the
// matchings stabilize. Throws when the energy fails to decrease monotonically.
RelaxResult relax_oracle(const TraceLoop& boundary, const DiskMesh& mesh, double tol = 1e-12);

// Annulus competitor between an inner and an outer trace: interpolates each
// column along matching geodesics across `span` rings ending at ring `outer`.
// Both traces must be reduced; interface columns interpolate the carried
// sheets and keep the interface sheet at zero.
struct InterpolantResult {
  InterfaceMap map;     // values outside the band are filled radially
  int outer = 0;        // outer ring index of the band
  int span = 0;         // number of annuli in the band
  double band_energy = 0;
  double delta = 0;     // relative width (1 - r_inner / r_outer)
  double sup_gap = 0;   // largest columnwise matching distance
};
InterpolantResult annulus_interpolate(const TraceLoop& outer_trace, const TraceLoop& inner_trace,
                                      const DiskMesh& mesh, int outer, int span);

// Ringwise energy-decay inequality with constant 3Q: the energy of the ball
// bounded by ring i must not exceed 3Q (r_i * ring trace energy + r_i^2 *
// sup_dphi_sq). The ball energies complete the truncated core by a geometric
// tail estimate.
struct DecayReport {
  std::vector<double> ball;   // energy of B_{r_i}
  std::vector<double> bound;  // 3Q (r T(r) + r^2 sup)
  double worst_ratio = 0;     // max ball/bound over checked rings
  bool ok = false;
};
DecayReport decay_check(const InterfaceMap& f, double sup_dphi_sq = 0);

// Interior sheet moduli never exceed the boundary modulus (with quadrature
// slack); reports the worst interior excess relative to the boundary sup.
struct MaximumPrincipleReport {
  double boundary_sup = 0;
  double interior_sup = 0;
  double excess = 0;  // max(0, interior - boundary) / scale
  bool ok = false;
};
MaximumPrincipleReport maximum_principle_check(const InterfaceMap& f, double rel_slack = 1e-9);

// Sheets of a split-off piece sampled over the whole mesh (both regions carry
// `count` values per node).
struct SheetGrid {
  RVec center;
  int count = 0;
  std::vector<MultiPoint> up, lo;  // indexed by mesh node
};

struct MinimizerSplit {
  int ring = 0;               // ball boundary used for the separation test
  double eps = 0;             // admissibility parameter 1/(8 sqrt(Q) + 17)
  InterfaceMap interface_piece;
  std::vector<SheetGrid> full_pieces;
};

// Splits the values of f over the ball bounded by ring `ring` into clusters
// around a collapsed support, snapping the cluster nearest to the origin onto
// the interface sheet. Throws "not splittable at this radius" when no
// admissible separated clustering exists.
MinimizerSplit split_minimizer(const InterfaceMap& f, int ring);

}  // namespace aq
