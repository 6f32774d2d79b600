#pragma once

#include <functional>
#include <vector>

#include "aqlab/interface_map.hpp"
#include "aqlab/multipoint.hpp"

namespace aq {

// Boundary values of a half-integer map on the unit circle: Q-valued samples
// on [0, pi], (Q-1)-valued samples on [pi, 2 pi], at M uniform angles.
struct TraceLoop {
  int angles = 0;                 // M, even
  std::vector<MultiPoint> upper;  // M/2 + 1 samples, theta_k = 2 pi k / M
  std::vector<MultiPoint> lower;  // M/2 + 1 samples, theta = pi .. 2 pi
  RVec phi_plus;                  // interface value at theta = 0
  RVec phi_minus;                 // interface value at theta = pi

  int q_upper() const { return upper.empty() ? 0 : upper.front().size(); }
  int dim() const;
  double max_abs() const;
  // Largest junction defect: the upper endpoints must equal the lower ones
  // plus the interface sheet.
  double junction_defect() const;
};

// Validates sampling counts and cardinalities; throws on malformed data.
void validate(const TraceLoop& g);

// Continuous sheet selections along an interval of samples, produced by
// consecutive minimum-cost matchings.
struct SheetSelection {
  std::vector<std::vector<RVec>> sheets;  // [sheet][sample]
  double min_margin = 0;  // smallest matching gap encountered (absolute, in G)
};
SheetSelection select_sheets(const std::vector<MultiPoint>& samples);

// One connected boundary piece touching the interface sheet: q0 upper arcs
// and q0-1 lower arcs, unwound to a single parameter interval [0, 2 pi].
struct HalfBlock {
  int q0 = 1;
  std::vector<RVec> zeta;  // (2 q0 - 1) * M/2 + 1 samples
};

// A closed cycle winding `winding` times around the circle, unwound to its
// covering circle; `multiplicity` counts coinciding copies.
struct FullBlock {
  int winding = 1;
  int multiplicity = 1;
  std::vector<RVec> zeta;  // winding * M samples, periodic
};

struct TraceDecomposition {
  HalfBlock half;
  std::vector<FullBlock> blocks;
  int angles = 0;
  int dim = 1;
};

// Splits a trace into its half chain and full cycles by consecutive-sample
// tracking; throws "insufficient resolution" when a matching is ambiguous
// between materially different continuations.
TraceDecomposition decompose_trace(const TraceLoop& g);

// Resamples the decomposition back to a trace loop (exact reconstruction).
TraceLoop loop_from_decomposition(const TraceDecomposition& d);

// Intrinsic circle energy of the trace (tangential derivative quadrature).
double loop_energy(const TraceLoop& g);
// Quadrature of |g|^2 over the circle.
double loop_height(const TraceLoop& g);
// L^2 distance of two equally sampled traces in the matching metric.
double loop_l2_distance(const TraceLoop& a, const TraceLoop& b);
// Trace of an interface map on ring i.
TraceLoop sample_loop(const InterfaceMap& f, int ring);

// Values of one block on the tensor chart aligned with a disk mesh: row i
// corresponds to disk radius r_i (chart radius r_i^{2/(2q0-1)} for the half
// chart, r_i^{1/q} for a full chart).
struct ChartGrid {
  bool half = true;
  int winding = 1;
  int rings = 0;
  int angles = 0;  // disk mesh angle count M
  int n = 1;
  std::vector<RVec> values;

  int row_len() const { return half ? (2 * winding - 1) * angles / 2 + 1 : winding * angles; }
  RVec& at(int i, int m) { return values[static_cast<std::size_t>(i * row_len() + m)]; }
  const RVec& at(int i, int m) const { return values[static_cast<std::size_t>(i * row_len() + m)]; }
  double chart_radius(double disk_r) const;
  double chart_angle(int m) const;
};

ChartGrid make_chart(const DiskMesh& mesh, bool half, int winding, int n,
                     const std::function<RVec(double rho, double phi)>& fn);

// Sums unrolled block sheets into an interface map; multiplicities repeat
// sheets. The interface residual of the result vanishes by construction.
InterfaceMap assemble_blocks(const DiskMesh& mesh, int n,
                             const std::vector<std::pair<const ChartGrid*, int>>& blocks);

}  // namespace aq
