#pragma once

#include <functional>
#include <vector>

#include "aqlab/interface_map.hpp"

namespace aqtest {

using SheetFn = std::function<std::vector<aq::RVec>(double r, double theta)>;

// Builds an interface map by sampling sheet lists on the mesh nodes.
inline aq::InterfaceMap fill_map(const aq::DiskMesh& mesh, int q, int n, const SheetFn& upper,
                                 const SheetFn& lower) {
  aq::InterfaceMap f(mesh, q, n);
  for (int i = 0; i <= mesh.rings(); ++i) {
    for (int k = 0; k < mesh.angles(); ++k) {
      if (mesh.upper_col(k)) f.up(i, k) = aq::MultiPoint::from_points(upper(mesh.r(i), mesh.theta(k)));
      if (mesh.lower_col(k)) f.lo(i, k) = aq::MultiPoint::from_points(lower(mesh.r(i), mesh.theta(k)));
    }
  }
  return f;
}

}  // namespace aqtest
