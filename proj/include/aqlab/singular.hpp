#pragma once

#include <limits>
#include <vector>

#include "aqlab/interface_map.hpp"
#include "aqlab/solver.hpp"
#include "aqlab/vec.hpp"

namespace aq {

// One detected singular point of a half-integer-valued map.
struct SingularPoint {
  RVec location{2};       // position in the closed unit disk
  bool boundary = false;  // lies on the interface line (second coordinate 0)
  double frequency = 0;   // local frequency plug-in at the point
  // Boundary points: largest sampled radius on which the map stays inside the
  // admissible tube around its classified homogeneous tangent while every
  // non-collapsing sheet clears the tube by the separation factor; zero when
  // the local tangent does not classify.
  double separation = 0;
};

struct SingularReport {
  std::vector<SingularPoint> interior;
  std::vector<SingularPoint> boundary;
  // Minimum pairwise Euclidean gap between reported points; +infinity when
  // fewer than two points are found.
  double min_gap = std::numeric_limits<double>::infinity();
  int flagged_nodes = 0;  // raw count of merged-support nodes before clustering
};

// Scans the mesh for nodes where distinct sheet groups merge (the support
// cardinality drops below the generic count of the surrounding five-ring
// annulus), clusters them into points, and augments the result with the
// branch-point analysis of the innermost rings about the origin. `tol` is the
// relative floor added to the local modulus of continuity when deciding
// whether two sheets touch.
SingularReport detect_singularities(const InterfaceMap& f, double tol = 1e-6);
SingularReport detect_singularities(const SolveResult& f, double tol = 1e-6);

}  // namespace aq
