#pragma once

#include <vector>

#include "aqlab/conformal.hpp"
#include "aqlab/mesh.hpp"
#include "aqlab/multipoint.hpp"

namespace aq {

// A half-integer-valued map sampled on a disk mesh: Q-valued on the closed
// upper half plane, (Q-1)-valued on the closed lower half. The interface
// columns carry both samples, coupled by up = lo + [[phi]].
class InterfaceMap {
 public:
  InterfaceMap() = default;
  InterfaceMap(DiskMesh mesh, int q_upper, int n);

  const DiskMesh& mesh() const { return mesh_; }
  int q_upper() const { return q_; }
  int dim() const { return n_; }

  MultiPoint& up(int i, int k) { return up_[idx(i, k)]; }
  const MultiPoint& up(int i, int k) const { return up_[idx(i, k)]; }
  MultiPoint& lo(int i, int k) { return lo_[idx(i, k)]; }
  const MultiPoint& lo(int i, int k) const { return lo_[idx(i, k)]; }

  RVec& phi(int i, int k);
  const RVec& phi(int i, int k) const;

  double value_scale() const;
  // max over interface nodes of distance(up, lo + [[phi]]).
  double interface_residual() const;
  // max over nodes of |Q mean(up(x)) - (Q-1) mean(lo(mirror x))|.
  double avgsym_residual() const;

 private:
  std::size_t idx(int i, int k) const { return static_cast<std::size_t>(mesh_.node(i, k)); }
  DiskMesh mesh_{2, 8, 0.5};
  int q_ = 0;
  int n_ = 0;
  std::vector<MultiPoint> up_, lo_;
  std::vector<RVec> phi_;  // 2 * (rings+1): side 0 at theta=0, side 1 at theta=pi
};

struct EnergyBreakdown {
  double total = 0;
  std::vector<double> annulus;          // energy of the annulus [r_i, r_{i+1}]
  std::vector<double> ring_tangential;  // intrinsic trace energy of f on ring i
};

EnergyBreakdown assemble_energy(const InterfaceMap& f);

// Completion of the energy below the innermost annulus by a geometric tail
// with the observed outward growth ratio.
double core_completion(const std::vector<double>& annulus);

// Quadrature of the squared modulus |f|^2 over each ring circle.
std::vector<double> ring_height(const InterfaceMap& f);

// Sheetwise subtraction of the harmonic extension of polynomial interface
// data; reduces the interface offset to zero for matching data.
InterfaceMap subtract_interface(const InterfaceMap& f, const HarmonicPoly& p);

struct NormalizeResult {
  InterfaceMap map;
  std::vector<RVec> correction;  // subtracted field per node
  double max_interface_mismatch = 0;
};

// Subtracts the reflection-balanced average so that the result satisfies
// Q mean(up(x)) = (Q-1) mean(lo(mirror x)) at every node. Requires reduced
// interface data (phi = 0).
NormalizeResult normalize_average(const InterfaceMap& f);

}  // namespace aq
