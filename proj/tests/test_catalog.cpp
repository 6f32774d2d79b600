#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "aqlab/catalog.hpp"
#include "aqlab/frequency.hpp"
#include "doctest.h"

using namespace aq;

namespace {

constexpr double kPi = DiskMesh::kPi;

BlockCoeff block(int mult, RVec a, RVec b) {
  BlockCoeff out;
  out.multiplicity = mult;
  out.a = a;
  out.b = b;
  return out;
}

std::vector<int> sorted_multiplicities(const HomogeneousMap& h) {
  std::vector<int> m;
  for (const BlockCoeff& b : h.blocks) m.push_back(b.multiplicity);
  std::sort(m.begin(), m.end());
  return m;
}

double coefficient_mass(const HomogeneousMap& h) {
  double s = 0.0;
  for (const BlockCoeff& b : h.blocks) s += b.multiplicity * (b.a.norm_sq() + b.b.norm_sq());
  return s;
}

}  // namespace

TEST_CASE("catalog constructors validate their parameters") {
  CHECK_THROWS_WITH_AS(catalog_polynomial(0, 1, RVec{1.0}), "degree must be positive",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(catalog_polynomial(1, 0, RVec{1.0}), "multiplicity must be positive",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(catalog_polynomial(1, 1, RVec{0.0}), "coefficient must be nonzero",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      catalog_branched(2, 4, 1, {block(1, RVec{1.0, 0.0}, RVec{0.0, 1.0})}),
      "winding numbers must be coprime", std::invalid_argument);
  CHECK_THROWS_WITH_AS(catalog_branched(1, 2, 1, {}), "branched maps need at least one block",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      catalog_branched(1, 2, 1, {block(1, RVec{1.0, 2.0}, RVec{2.0, 4.0})}),
      "block coefficients must be independent", std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      catalog_exceptional(RVec{1.0, 0.0}, {block(1, RVec{1.0}, RVec{2.0})}),
      "coefficient dimensions disagree", std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      catalog_polynomial(2, 1, RVec{1.0, 0.0}, {block(0, RVec{1.0, 0.0}, RVec{0.0, 1.0})}),
      "multiplicity must be positive", std::invalid_argument);
}

TEST_CASE("closed-form masses match hand values and the quadrature") {
  const HomogeneousMap ma =
      catalog_polynomial(2, 2, RVec{0.5, -1.0}, {block(1, RVec{1.0, 0.0}, RVec{0.0, 2.0})});
  CHECK(catalog_energy(ma) == doctest::Approx(13.75 * kPi).epsilon(1e-14));
  CHECK(catalog_height(ma) == doctest::Approx(6.875 * kPi).epsilon(1e-14));
  CHECK(ma.q_upper() == 3);

  const HomogeneousMap mb = catalog_branched(1, 2, 1, {block(1, RVec{1.0, 0.0}, RVec{0.0, 1.0})});
  CHECK(catalog_energy(mb) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(catalog_height(mb) == doctest::Approx(4.0 * kPi).epsilon(1e-14));
  CHECK(mb.q_upper() == 3);

  const HomogeneousMap mc =
      catalog_exceptional(RVec{1.0, 0.0}, {block(1, RVec{1.0, 0.0}, RVec{0.0, 1.0})});
  CHECK(catalog_energy(mc) == doctest::Approx(5.0 * kPi).epsilon(1e-14));
  CHECK(catalog_height(mc) == doctest::Approx(7.5 * kPi).epsilon(1e-14));
  CHECK(mc.q_upper() == 5);

  const DiskMesh mesh(96, 256, 1e-3);
  for (const HomogeneousMap& h : {ma, mb, mc}) {
    CHECK(catalog_energy(h) ==
          doctest::Approx(h.alpha.value() * catalog_height(h)).epsilon(1e-14));
    const InterfaceMap f = sample_map(h, mesh);
    CHECK(f.interface_residual() == 0.0);
    const FrequencyProfile p = profile(f);
    CHECK(p.H.back() == doctest::Approx(catalog_height(h)).epsilon(1e-12));
    CHECK(p.D.back() == doctest::Approx(catalog_energy(h)).epsilon(5e-3));
    CHECK(p.alpha == doctest::Approx(h.alpha.value()).epsilon(5e-3));
    CHECK(p.alpha_spread <= 1e-10);
  }
}

TEST_CASE("sampled catalog maps are exactly discretely homogeneous") {
  std::mt19937 rng(20240817);
  const DiskMesh mesh(48, 128, 1e-2);
  for (int draw = 0; draw < 6; ++draw) {
    const HomogeneousMap h = random_homogeneous(rng);
    const InterfaceMap f = sample_map(h, mesh);
    const FrequencyProfile p = profile(f);
    REQUIRE_FALSE(p.constant_map);
    CHECK(p.alpha_spread <= 1e-10);
    const double expo = 2.0 * h.alpha.value() + 1.0;
    for (int i : {0, 24, 48})
      CHECK(p.H[static_cast<std::size_t>(i)] ==
            doctest::Approx(catalog_height(h) * std::pow(mesh.r(i), expo)).epsilon(1e-11));
  }
}

TEST_CASE("average symmetry holds for branched and chain maps but not the pure sine") {
  const DiskMesh mesh(24, 64, 1e-2);

  const InterfaceMap fb = sample_map(
      catalog_branched(1, 2, 1, {block(1, RVec{1.0, 0.0}, RVec{0.0, 1.0})}), mesh);
  CHECK(fb.avgsym_residual() <= 1e-12);

  const InterfaceMap fc = sample_map(catalog_exceptional(RVec{1.0}), mesh);
  CHECK(fc.avgsym_residual() <= 1e-12);

  // Half coefficient balanced against twice the block sine coefficients.
  const InterfaceMap fa = sample_map(
      catalog_polynomial(1, 1, RVec{1.0, 0.0}, {block(1, RVec{0.0, 1.0}, RVec{-0.5, 0.0})}),
      mesh);
  CHECK(fa.avgsym_residual() <= 1e-12);

  const InterfaceMap bare = sample_map(catalog_polynomial(1, 1, RVec{1.0, 0.0}), mesh);
  CHECK(bare.avgsym_residual() > 0.1);
}

TEST_CASE("classification round-trips the three reference maps") {
  const HomogeneousMap ma = catalog_polynomial(1, 1, RVec{1.0});
  const Classification ca = classify_tangent(sample_trace(ma, 2048));
  REQUIRE(ca.classified);
  CHECK(ca.map.tag == CatalogCase::kPolynomial);
  CHECK(ca.map.alpha == Rational{1, 1});
  CHECK(ca.map.k0 == 1);
  CHECK(ca.map.blocks.empty());
  CHECK(ca.map.c[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(ca.residual <= 1e-9);

  const HomogeneousMap mb = catalog_branched(1, 2, 1, {block(1, RVec{1.0, 0.0}, RVec{0.0, 1.0})});
  const Classification cb = classify_tangent(sample_trace(mb, 2048));
  REQUIRE(cb.classified);
  CHECK(cb.map.tag == CatalogCase::kBranched);
  CHECK(cb.map.alpha == Rational{1, 2});
  CHECK(cb.map.k0 == 1);
  REQUIRE(cb.map.blocks.size() == 1);
  CHECK(coefficient_mass(cb.map) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(cb.residual <= 1e-9);

  const HomogeneousMap mc = catalog_exceptional(RVec{1.0});
  const Classification cc = classify_tangent(sample_trace(mc, 2048));
  REQUIRE(cc.classified);
  CHECK(cc.map.tag == CatalogCase::kExceptional);
  CHECK(cc.map.alpha == Rational{2, 3});
  CHECK(cc.map.c[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(cc.residual <= 1e-9);
}

TEST_CASE("classification round-trips fifty random catalog draws") {
  std::mt19937 rng(987123);
  double worst = 0.0;
  for (int draw = 0; draw < 50; ++draw) {
    const HomogeneousMap h = random_homogeneous(rng);
    const Classification cls = classify_tangent(sample_trace(h, 2048));
    REQUIRE_MESSAGE(cls.classified, "draw ", draw, ": ", cls.diagnostic);
    CHECK(cls.residual <= kClassifyTol);
    CHECK(cls.map.tag == h.tag);
    CHECK(cls.map.alpha == h.alpha);
    CHECK(cls.map.k0 == h.k0);
    CHECK(cls.map.q_upper() == h.q_upper());
    CHECK(sorted_multiplicities(cls.map) == sorted_multiplicities(h));
    CHECK(coefficient_mass(cls.map) == doctest::Approx(coefficient_mass(h)).epsilon(1e-8));
    CHECK(cls.map.c.norm() == doctest::Approx(h.c.norm()).epsilon(1e-8));
    worst = std::max(worst, cls.residual);
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("classification rejects structures outside the catalog") {
  const DiskMesh mesh(2, 2048, 0.25);
  const auto classify_charts =
      [&](const std::vector<std::pair<const ChartGrid*, int>>& parts, int n) {
        return classify_tangent(sample_loop(assemble_blocks(mesh, n, parts), mesh.rings()));
      };

  // Dependent coefficients: the double block grazes the zero sheet.
  {
    const ChartGrid half =
        make_chart(mesh, true, 1, 2, [](double, double) { return RVec::zero(2); });
    const ChartGrid blk = make_chart(mesh, false, 3, 2, [](double rho, double psi) {
      RVec v{1.0, 0.5};
      v *= rho * rho * (std::cos(2.0 * psi) + 2.0 * std::sin(2.0 * psi));
      return v;
    });
    const Classification cls = classify_charts({{&half, 1}, {&blk, 2}}, 2);
    CHECK_FALSE(cls.classified);
    CHECK(cls.diagnostic == "dependent block coefficients");
  }

  // Mixed homogeneities: a degree-one half part over a half-degree cycle.
  {
    const ChartGrid half = make_chart(mesh, true, 1, 2, [](double rho, double phi) {
      RVec v{1.0, 0.0};
      v *= std::sqrt(rho) * std::sin(0.5 * phi);
      return v;
    });
    const ChartGrid blk = make_chart(mesh, false, 2, 2, [](double rho, double psi) {
      RVec v{std::cos(psi), std::sin(psi)};
      v *= rho;
      return v;
    });
    const Classification cls = classify_charts({{&half, 1}, {&blk, 1}}, 2);
    CHECK_FALSE(cls.classified);
    CHECK(cls.diagnostic == "mixed homogeneities");
  }

  // Interface winding three is not in the catalog.
  {
    const ChartGrid half = make_chart(mesh, true, 3, 1, [](double rho, double phi) {
      return RVec{rho * std::sin(phi)};
    });
    const Classification cls = classify_charts({{&half, 1}}, 1);
    CHECK_FALSE(cls.classified);
    CHECK(cls.diagnostic == "interface winding outside the catalog");
  }

  // A two-arc chain must carry the two-thirds mode.
  {
    const ChartGrid half = make_chart(mesh, true, 2, 1, [](double rho, double phi) {
      return RVec{std::sqrt(rho) * std::sin(0.5 * phi)};
    });
    const Classification cls = classify_charts({{&half, 1}}, 1);
    CHECK_FALSE(cls.classified);
    CHECK(cls.diagnostic == "chain mode outside the catalog");
  }

  // Two single-valued cycles whose difference vanishes along a ray.
  {
    const HomogeneousMap h = catalog_branched(
        1, 1, 1,
        {block(1, RVec{1.0, 0.0}, RVec{0.0, 1.0}), block(1, RVec{1.3, 0.0}, RVec{0.6, 1.0})});
    const Classification cls = classify_tangent(sample_trace(h, 2048));
    CHECK_FALSE(cls.classified);
    CHECK_FALSE(cls.diagnostic.empty());
  }

  // Zero trace carries no classifiable signal.
  {
    const ChartGrid half =
        make_chart(mesh, true, 1, 1, [](double, double) { return RVec{0.0}; });
    const Classification cls = classify_charts({{&half, 1}}, 1);
    CHECK_FALSE(cls.classified);
    CHECK(cls.diagnostic == "no signal above tolerance");
  }
}

TEST_CASE("classification folds multiplicities into the half part") {
  const HomogeneousMap h =
      catalog_branched(1, 2, 2, {block(2, RVec{1.0, 0.0}, RVec{0.0, 1.0})});
  const Classification cls = classify_tangent(sample_trace(h, 1024));
  REQUIRE(cls.classified);
  CHECK(cls.map.k0 == 2);
  REQUIRE(cls.map.blocks.size() == 1);
  CHECK(cls.map.blocks.front().multiplicity == 2);

  const HomogeneousMap hp = catalog_polynomial(2, 3, RVec{0.0, 1.5});
  const Classification cp = classify_tangent(sample_trace(hp, 1024));
  REQUIRE(cp.classified);
  CHECK(cp.map.tag == CatalogCase::kPolynomial);
  CHECK(cp.map.k0 == 3);
  CHECK(cp.map.blocks.empty());
  CHECK(cp.residual <= 1e-9);
}
