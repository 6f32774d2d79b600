#include <cmath>
#include <random>
#include <vector>

#include "aqlab/fourier.hpp"
#include "aqlab/trace.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace aq;

namespace {

constexpr double kPi = DiskMesh::kPi;

// The two-arc chain trace whose unwinding is zeta(phi) = sin(phi): two upper
// sheets sin(2 theta / 3) and sin(2 (theta + 2 pi) / 3), one lower sheet.
TraceLoop chain_trace(int m) {
  TraceLoop g;
  g.angles = m;
  const int m2 = m / 2;
  for (int k = 0; k <= m2; ++k) {
    const double th = 2 * kPi * k / m;
    g.upper.push_back(MultiPoint::from_points({RVec{std::sin(2 * th / 3)}, RVec{std::sin(2 * (th + 2 * kPi) / 3)}}));
    const double tl = kPi + 2 * kPi * k / m;
    g.lower.push_back(MultiPoint::from_points({RVec{std::sin(2 * tl / 3)}}));
  }
  g.phi_plus = RVec{0.0};
  g.phi_minus = RVec{0.0};
  return g;
}

RVec block_value(double psi) { return RVec{3 + std::cos(psi), std::sin(psi)}; }

// Zero half chain plus one winding-2 cycle offset away from the origin.
TraceLoop block_trace(int m, int copies) {
  TraceLoop g;
  g.angles = m;
  const int m2 = m / 2;
  for (int k = 0; k <= m2; ++k) {
    const double th = 2 * kPi * k / m;
    std::vector<RVec> up{RVec{0.0, 0.0}};
    std::vector<RVec> lo;
    for (int c = 0; c < copies; ++c) {
      up.push_back(block_value(th / 2));
      up.push_back(block_value(th / 2 + kPi));
    }
    const double tl = kPi + 2 * kPi * k / m;
    for (int c = 0; c < copies; ++c) {
      lo.push_back(block_value(tl / 2));
      lo.push_back(block_value(tl / 2 + kPi));
    }
    g.upper.push_back(MultiPoint::from_points(up));
    g.lower.push_back(MultiPoint::from_points(lo));
  }
  g.phi_plus = RVec{0.0, 0.0};
  g.phi_minus = RVec{0.0, 0.0};
  return g;
}

}  // namespace

TEST_CASE("sheet selection splits matched paths and preserves the samples") {
  const int steps = 256;
  std::vector<MultiPoint> samples;
  for (int s = 0; s <= steps; ++s) {
    const double t = -1.0 + 2.0 * s / steps + 1.0 / (2 * steps);  // avoids an exact collision
    samples.push_back(MultiPoint::from_points({RVec{t}, RVec{-t}}));
  }
  const SheetSelection sel = select_sheets(samples);
  REQUIRE(sel.sheets.size() == 2);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    MultiPoint back;
    for (const auto& sheet : sel.sheets) back.add(sheet[s]);
    CHECK(distance(back, samples[s]) == 0.0);
  }
  // Momentum tracking follows the smooth branches straight through the
  // mid-step crossing instead of bouncing at the cheaper matched pairing.
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const double t = -1.0 + 2.0 * double(s) / steps + 1.0 / (2 * steps);
    CHECK(sel.sheets[0][s][0] == doctest::Approx(t).epsilon(1e-15));
    CHECK(sel.sheets[1][s][0] == doctest::Approx(-t).epsilon(1e-15));
  }
  // No per-step pairing can beat the multipoint metric increment.
  for (std::size_t s = 0; s + 1 < samples.size(); ++s) {
    double inc = 0;
    for (const auto& sheet : sel.sheets) inc += dist_sq(sheet[s], sheet[s + 1]);
    CHECK(inc >= distance_sq(samples[s], samples[s + 1]) * (1.0 - 1e-12));
  }
  CHECK(sel.min_margin > 0);
}

TEST_CASE("a transversal crossing is carried through by momentum") {
  std::vector<MultiPoint> samples;
  for (double t : {-0.6, -0.3, 0.0, 0.3, 0.6})
    samples.push_back(MultiPoint::from_points({RVec{t}, RVec{-t}}));
  const SheetSelection sel = select_sheets(samples);
  // The step entering the collided sample ties exactly (both targets equal),
  // which is immaterial; the step leaving it is resolved by extrapolation.
  CHECK(sel.min_margin == 0.0);
  const std::vector<double> expect = {-0.6, -0.3, 0.0, 0.3, 0.6};
  for (std::size_t s = 0; s < expect.size(); ++s) {
    CHECK(sel.sheets[0][s][0] == expect[s]);
    CHECK(sel.sheets[1][s][0] == -expect[s]);
  }
}

TEST_CASE("sheets converging to a collision and splitting are irrecoverable") {
  // Both extrapolations land on the collision point, yet the sheets arrive
  // from materially different positions: whether they bounce or cross cannot
  // be read off the samples.
  std::vector<MultiPoint> samples;
  samples.push_back(MultiPoint::from_points({RVec{-0.4}, RVec{0.4}}));
  samples.push_back(MultiPoint::from_points({RVec{-0.2}, RVec{0.2}}));
  samples.push_back(MultiPoint::from_points({RVec{0.3}, RVec{-0.3}}));
  samples.push_back(MultiPoint::from_points({RVec{0.6}, RVec{-0.6}}));
  CHECK_THROWS_WITH_AS(select_sheets(samples), "insufficient resolution", std::runtime_error);
}

TEST_CASE("coincident sheets split from a shared rest point up to relabeling") {
  // Identical position and momentum make the two threads exchangeable; the
  // split is resolved by picking one labeling, and either one reproduces the
  // same pair of sheets.
  std::vector<MultiPoint> samples;
  samples.push_back(MultiPoint::from_points({RVec{0.0}, RVec{0.0}}));
  samples.push_back(MultiPoint::from_points({RVec{0.0}, RVec{0.0}}));
  samples.push_back(MultiPoint::from_points({RVec{0.3}, RVec{-0.3}}));
  samples.push_back(MultiPoint::from_points({RVec{0.6}, RVec{-0.6}}));
  const SheetSelection sel = select_sheets(samples);
  REQUIRE(sel.sheets.size() == 2);
  const bool first_up = sel.sheets[0][3][0] > 0;
  const auto& up = sel.sheets[first_up ? 0 : 1];
  const auto& down = sel.sheets[first_up ? 1 : 0];
  CHECK(up[2][0] == 0.3);
  CHECK(up[3][0] == 0.6);
  CHECK(down[2][0] == -0.3);
  CHECK(down[3][0] == -0.6);
}

TEST_CASE("single-sheet traces unwind by doubling the angle") {
  const int m = 64;
  TraceLoop g;
  g.angles = m;
  for (int k = 0; k <= m / 2; ++k) {
    const double th = 2 * kPi * k / m;
    g.upper.push_back(MultiPoint::singleton(RVec{std::sin(th)}));
    g.lower.push_back(MultiPoint{});
  }
  g.phi_plus = RVec{0.0};
  g.phi_minus = RVec{0.0};
  const TraceDecomposition d = decompose_trace(g);
  CHECK(d.half.q0 == 1);
  CHECK(d.blocks.empty());
  REQUIRE(static_cast<int>(d.half.zeta.size()) == m / 2 + 1);
  for (int mm = 0; mm <= m / 2; ++mm) {
    const double phi = 2 * kPi * mm / (m / 2);
    CHECK(d.half.zeta[static_cast<std::size_t>(mm)][0] == doctest::Approx(std::sin(phi / 2)).epsilon(1e-13).scale(1));
  }
}

TEST_CASE("the two-arc chain unwinds to a single half-wave mode") {
  const int m = 128;
  const TraceLoop g = chain_trace(m);
  CHECK(g.junction_defect() < 1e-15);
  const TraceDecomposition d = decompose_trace(g);
  CHECK(d.half.q0 == 2);
  CHECK(d.blocks.empty());
  const int mc = 3 * m / 2;
  REQUIRE(static_cast<int>(d.half.zeta.size()) == mc + 1);
  for (int mm = 0; mm <= mc; ++mm) {
    const double phi = 2 * kPi * mm / mc;
    CHECK(d.half.zeta[static_cast<std::size_t>(mm)][0] == doctest::Approx(std::sin(phi)).epsilon(1e-13).scale(1));
  }

  // Closed-form energies of the unwound chart data.
  const HalfWave w = halfwave_coeffs(d.half.zeta, 8);
  CHECK(w.c[1][0] == doctest::Approx(1.0).epsilon(1e-12));
  for (int l = 1; l <= w.modes(); ++l)
    if (l != 2) CHECK(std::abs(w.c[static_cast<std::size_t>(l - 1)][0]) < 1e-12);
  CHECK(halfwave_disk_energy(w) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(halfwave_trace_energy(w) == doctest::Approx(kPi).epsilon(1e-12));

  // The circle energy of the glued trace is 2/(2 q0 - 1) times the chart one.
  CHECK(loop_energy(g) == doctest::Approx(2.0 / 3.0 * kPi).epsilon(2e-4));

  // Round trip back to samples.
  const TraceLoop back = loop_from_decomposition(d);
  for (int k = 0; k <= m / 2; ++k) {
    CHECK(distance(back.upper[static_cast<std::size_t>(k)], g.upper[static_cast<std::size_t>(k)]) < 1e-14);
    CHECK(distance(back.lower[static_cast<std::size_t>(k)], g.lower[static_cast<std::size_t>(k)]) < 1e-14);
  }
}

TEST_CASE("cycles unwind to their covering circle with windings and multiplicities") {
  const int m = 64;
  for (int copies : {1, 2}) {
    CAPTURE(copies);
    const TraceLoop g = block_trace(m, copies);
    const TraceDecomposition d = decompose_trace(g);
    CHECK(d.half.q0 == 1);
    REQUIRE(d.blocks.size() == 1);
    const FullBlock& b = d.blocks.front();
    CHECK(b.winding == 2);
    CHECK(b.multiplicity == copies);
    REQUIRE(static_cast<int>(b.zeta.size()) == 2 * m);
    // The canonical start is the lexicographically smallest upper start:
    // block_value(pi) = (2, 0) rather than block_value(0) = (4, 0).
    for (int s = 0; s < 2 * m; ++s) {
      const double psi = kPi + 2 * kPi * s / (2 * m);
      CHECK(dist(b.zeta[static_cast<std::size_t>(s)], block_value(psi)) < 1e-13);
    }
    // Cardinality bookkeeping: q0 + sum multiplicity * winding = Q.
    CHECK(d.half.q0 + b.multiplicity * b.winding == g.q_upper());

    const TraceLoop back = loop_from_decomposition(d);
    for (std::size_t k = 0; k < g.upper.size(); ++k) {
      CHECK(distance(back.upper[k], g.upper[k]) < 1e-13);
      CHECK(distance(back.lower[k], g.lower[k]) < 1e-13);
    }
  }
}

TEST_CASE("random band-limited traces decompose and reconstruct") {
  std::mt19937_64 rng(20260814);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  const int m = 128;
  int done = 0, skipped = 0;
  for (int trial = 0; trial < 40; ++trial) {
    // Random half chain with q0 in 1..3 and up to two separated cycles.
    TraceDecomposition d;
    d.angles = m;
    d.dim = 2;
    std::uniform_int_distribution<int> q0d(1, 3);
    d.half.q0 = q0d(rng);
    const int mc = (2 * d.half.q0 - 1) * m / 2;
    HalfWave hw;
    hw.n = 2;
    for (int l = 1; l <= 3; ++l) hw.c.push_back(RVec{coeff(rng), coeff(rng)});
    d.half.zeta = halfwave_nodes(hw, mc);
    std::uniform_int_distribution<int> nbl(0, 2);
    const int blocks = nbl(rng);
    for (int j = 0; j < blocks; ++j) {
      std::uniform_int_distribution<int> wd(1, 2);
      FullBlock b;
      b.winding = wd(rng);
      const double off = 6.0 * (j + 1);
      for (int s = 0; s < b.winding * m; ++s) {
        const double psi = 2 * kPi * s / (b.winding * m);
        b.zeta.push_back(RVec{off + 0.4 * std::cos(psi) + 0.2 * coeff(rng) / 10,
                              0.4 * std::sin(psi)});
      }
      // Smooth periodic data only: refit through low Fourier modes.
      const LoopWave lw = loop_coeffs(b.zeta, 4);
      b.zeta = loop_nodes(lw, b.winding * m);
      d.blocks.push_back(std::move(b));
    }
    const TraceLoop g = loop_from_decomposition(d);
    try {
      const TraceDecomposition d2 = decompose_trace(g);
      int total = d2.half.q0;
      for (const auto& b : d2.blocks) total += b.winding * b.multiplicity;
      CHECK(total == g.q_upper());
      CHECK(d2.half.q0 == d.half.q0);
      const TraceLoop back = loop_from_decomposition(d2);
      for (std::size_t k = 0; k < g.upper.size(); ++k) {
        CHECK(distance(back.upper[k], g.upper[k]) < 1e-10);
        CHECK(distance(back.lower[k], g.lower[k]) < 1e-10);
      }
      ++done;
    } catch (const std::runtime_error&) {
      ++skipped;  // a chain crossing landed on a sample; legitimate refusal
    }
  }
  CHECK(done >= 30);
  CHECK(done + skipped == 40);
}

TEST_CASE("unrolled charts build maps with exact interface residual and the right energy") {
  const DiskMesh mesh(128, 128, 1e-3);
  const ChartGrid chain = make_chart(mesh, true, 2, 1, [](double rho, double phi) {
    return RVec{rho * std::sin(phi)};
  });
  const InterfaceMap f = assemble_blocks(mesh, 1, {{&chain, 1}});
  CHECK(f.q_upper() == 2);
  CHECK(f.interface_residual() == 0.0);

  const EnergyBreakdown e = assemble_energy(f);
  CHECK(e.total == doctest::Approx(kPi).epsilon(6e-3));
  CHECK(e.ring_tangential.back() == doctest::Approx(2 * kPi / 3).epsilon(2e-3));

  // The outer trace of the assembled map reproduces the glued loop.
  const TraceLoop outer = sample_loop(f, mesh.rings());
  const TraceLoop expect = chain_trace(mesh.angles());
  for (std::size_t k = 0; k < outer.upper.size(); ++k) {
    CHECK(distance(outer.upper[k], expect.upper[k]) < 1e-13);
    CHECK(distance(outer.lower[k], expect.lower[k]) < 1e-13);
  }

  // Re-decomposing the outer trace recovers the chart samples.
  const TraceDecomposition d = decompose_trace(outer);
  CHECK(d.half.q0 == 2);
  CHECK(d.blocks.empty());
}

TEST_CASE("a chain and a cycle assemble into one map with summed energies") {
  const DiskMesh mesh(96, 96, 1e-3);
  const ChartGrid chain = make_chart(mesh, true, 1, 2, [](double rho, double phi) {
    return RVec{std::sqrt(rho) * std::sin(phi / 2), 0.0};
  });
  const ChartGrid cycle = make_chart(mesh, false, 2, 2, [](double rho, double psi) {
    return RVec{3 + rho * std::cos(psi), rho * std::sin(psi)};
  });
  const InterfaceMap f = assemble_blocks(mesh, 2, {{&chain, 1}, {&cycle, 1}});
  CHECK(f.q_upper() == 3);
  CHECK(f.interface_residual() == 0.0);

  // Chart closed forms: chain (pi/2) * 1, cycle pi * (1 + 1).
  const EnergyBreakdown e = assemble_energy(f);
  CHECK(e.total == doctest::Approx(kPi / 2 + 2 * kPi).epsilon(8e-3));
}

TEST_CASE("malformed traces are rejected") {
  TraceLoop g = chain_trace(64);
  g.upper[3] = MultiPoint::singleton(RVec{0.0});
  CHECK_THROWS_WITH_AS(decompose_trace(g), "cardinality mismatch", std::invalid_argument);
  TraceLoop h = chain_trace(64);
  h.upper.pop_back();
  CHECK_THROWS_WITH_AS(decompose_trace(h), "trace sample count mismatch", std::invalid_argument);
}
