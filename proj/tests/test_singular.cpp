#include <cmath>
#include <limits>

#include "aqlab/catalog.hpp"
#include "aqlab/singular.hpp"
#include "aqlab/solver.hpp"
#include "aqlab/trace.hpp"
#include "doctest.h"

using namespace aq;

namespace {

// Zero half sheet, the square cycle z -> z^2, and a constant sheet at height
// i/4: the square crosses the constant where z^2 = i/4, i.e. at the two
// interior points +-(1/2) e^{i pi/4}, and crosses the zero sheet at the origin.
InterfaceMap crossing_blocks_map(const DiskMesh& mesh) {
  const ChartGrid half =
      make_chart(mesh, true, 1, 2, [](double, double) { return RVec{0.0, 0.0}; });
  const ChartGrid square = make_chart(mesh, false, 1, 2, [](double rho, double psi) {
    return RVec{rho * rho * std::cos(2 * psi), rho * rho * std::sin(2 * psi)};
  });
  const ChartGrid level =
      make_chart(mesh, false, 1, 2, [](double, double) { return RVec{0.0, 0.25}; });
  return assemble_blocks(mesh, 2, {{&half, 1}, {&square, 1}, {&level, 1}});
}

// Half sheet (0, 2 x1 x2), the identity sheet (x1, x2), and a constant sheet
// at (0.35, 0): identity and constant cross on the interface at x1 = 0.35,
// identity and half sheet cross only at the origin.
InterfaceMap interface_crossing_map(const DiskMesh& mesh) {
  const ChartGrid chain = make_chart(
      mesh, true, 1, 2, [](double rho, double phi) { return RVec{0.0, rho * std::sin(phi)}; });
  const ChartGrid ident = make_chart(mesh, false, 1, 2, [](double rho, double psi) {
    return RVec{rho * std::cos(psi), rho * std::sin(psi)};
  });
  const ChartGrid level =
      make_chart(mesh, false, 1, 2, [](double, double) { return RVec{0.35, 0.0}; });
  return assemble_blocks(mesh, 2, {{&chain, 1}, {&ident, 1}, {&level, 1}});
}

}  // namespace

TEST_CASE("single sheet maps report no singular points") {
  const DiskMesh mesh(48, 128, 1e-2);
  const InterfaceMap f = sample_map(catalog_polynomial(1, 1, RVec{1.0}), mesh);
  const SingularReport rep = detect_singularities(f);
  CHECK(rep.interior.empty());
  CHECK(rep.boundary.empty());
  CHECK(rep.flagged_nodes == 0);
  CHECK(std::isinf(rep.min_gap));
}

TEST_CASE("identical sheet copies never register as merging") {
  const DiskMesh mesh(64, 128, 1e-2);
  const InterfaceMap f = sample_map(catalog_polynomial(2, 2, RVec{0.7}), mesh);
  const SingularReport rep = detect_singularities(f);
  CHECK(rep.interior.empty());
  CHECK(rep.boundary.empty());
  CHECK(rep.flagged_nodes == 0);
}

TEST_CASE("branch points land exactly at the origin") {
  const DiskMesh mesh(64, 256, 1e-3);
  const HomogeneousMap hb =
      catalog_branched(1, 2, 1, {BlockCoeff{1, RVec{1.0, 0.0}, RVec{0.0, 1.0}}});
  const SingularReport rep = detect_singularities(sample_map(hb, mesh));
  CHECK(rep.interior.empty());
  CHECK(rep.flagged_nodes == 0);
  REQUIRE(rep.boundary.size() == 1);
  const SingularPoint& p = rep.boundary.front();
  CHECK(p.boundary);
  CHECK(p.location[0] == 0.0);
  CHECK(p.location[1] == 0.0);
  CHECK(p.frequency == doctest::Approx(0.5).epsilon(0.04));
  CHECK(p.separation > 0.2);
  CHECK(std::isinf(rep.min_gap));
}

TEST_CASE("interior crossings of distinct sheets are located") {
  const DiskMesh mesh(96, 256, 1e-3);
  const SingularReport rep = detect_singularities(crossing_blocks_map(mesh));
  CHECK(rep.flagged_nodes > 0);
  REQUIRE(rep.interior.size() == 2);
  REQUIRE(rep.boundary.size() == 1);
  const double cx = 0.5 * std::cos(DiskMesh::kPi / 4);
  CHECK(std::abs(rep.interior[0].location[0] + cx) < 0.06);
  CHECK(std::abs(rep.interior[0].location[1] + cx) < 0.06);
  CHECK(std::abs(rep.interior[1].location[0] - cx) < 0.06);
  CHECK(std::abs(rep.interior[1].location[1] - cx) < 0.06);
  CHECK_FALSE(rep.interior[0].boundary);
  CHECK(rep.interior[0].frequency == doctest::Approx(1.0).epsilon(0.35));
  CHECK(rep.interior[1].frequency == doctest::Approx(1.0).epsilon(0.35));
  const SingularPoint& origin = rep.boundary.front();
  CHECK(origin.location[0] == 0.0);
  CHECK(origin.location[1] == 0.0);
  CHECK(origin.separation > 0.1);
  // the zero sheet is crossed by the square cycle, a tangent of homogeneity 2
  CHECK(origin.frequency == doctest::Approx(2.0));
  CHECK(std::abs(rep.min_gap - 0.5) < 0.07);
}

TEST_CASE("sheet crossings on the interface are boundary points") {
  const DiskMesh mesh(96, 256, 1e-3);
  const SingularReport rep = detect_singularities(interface_crossing_map(mesh));
  CHECK(rep.interior.empty());
  REQUIRE(rep.boundary.size() == 2);
  const SingularPoint& origin = rep.boundary[0];
  const SingularPoint& cross = rep.boundary[1];
  CHECK(origin.location[0] == 0.0);
  CHECK(origin.location[1] == 0.0);
  // the identity sheet crosses the interface chain transversally
  CHECK(origin.frequency == doctest::Approx(1.0));
  CHECK(origin.separation > 0.005);
  CHECK(origin.separation < 0.12);
  CHECK(std::abs(cross.location[0] - 0.35) < 0.05);
  CHECK(cross.location[1] == 0.0);
  CHECK(cross.boundary);
  // The sheets meet away from the interface value, so no homogeneous template
  // applies and the separation radius is reported as zero.
  CHECK(cross.separation == 0.0);
  CHECK(cross.frequency >= 0.0);
  CHECK(std::isfinite(cross.frequency));
  CHECK(std::abs(rep.min_gap - 0.35) < 0.05);
}

TEST_CASE("solver output keeps its singular set finite and isolated") {
  const DiskMesh mesh(64, 192, 1e-2);
  const HomogeneousMap hb =
      catalog_branched(1, 2, 1, {BlockCoeff{1, RVec{1.0, 0.0}, RVec{0.0, 1.0}}});
  const SolveResult sr = solve_branched(sample_trace(hb, mesh.angles()), mesh);
  const SingularReport rep = detect_singularities(sr);
  CHECK(rep.interior.empty());
  REQUIRE(rep.boundary.size() == 1);
  const SingularPoint& p = rep.boundary.front();
  CHECK(p.location[0] == 0.0);
  CHECK(p.location[1] == 0.0);
  CHECK(p.frequency == doctest::Approx(0.5).epsilon(0.1));
  CHECK(p.separation > 0.05);
  CHECK(std::isinf(rep.min_gap));
}
