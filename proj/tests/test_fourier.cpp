#include <cmath>
#include <random>
#include <vector>

#include "aqlab/fourier.hpp"
#include "aqlab/mesh.hpp"
#include "doctest.h"

using namespace aq;

namespace {

constexpr double kPi = DiskMesh::kPi;

HalfWave random_halfwave(std::mt19937_64& rng, int n, int modes) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  HalfWave w;
  w.n = n;
  for (int l = 0; l < modes; ++l) {
    RVec c(n);
    for (int i = 0; i < n; ++i) c[i] = coeff(rng);
    w.c.push_back(c);
  }
  return w;
}

// Independent quadrature of the Dirichlet energy of the harmonic extension
// over the chart disk, using analytic partial derivatives of the series and
// a midpoint-by-trapezoid product rule.
double quad_disk_energy(const HalfWave& w, int nr, int nphi) {
  double e = 0;
  for (int i = 0; i < nr; ++i) {
    const double rho = (i + 0.5) / nr;
    double ring = 0;
    for (int j = 0; j < nphi; ++j) {
      const double phi = 2 * kPi * j / nphi;
      RVec dr = RVec::zero(w.n), dphi = RVec::zero(w.n);
      for (int l = 1; l <= w.modes(); ++l) {
        const auto& c = w.c[static_cast<std::size_t>(l - 1)];
        dr += c * (0.5 * l * std::pow(rho, 0.5 * l - 1) * std::sin(0.5 * l * phi));
        dphi += c * (0.5 * l * std::pow(rho, 0.5 * l) * std::cos(0.5 * l * phi));
      }
      ring += dr.norm_sq() + dphi.norm_sq() / (rho * rho);
    }
    e += ring * (2 * kPi / nphi) * rho / nr;
  }
  return e;
}

double quad_trace_energy(const HalfWave& w, int nphi) {
  // Trapezoid rule; the integrand has period 4 pi, so the endpoints differ.
  double e = 0;
  for (int j = 0; j <= nphi; ++j) {
    const double phi = 2 * kPi * j / nphi;
    RVec dphi = RVec::zero(w.n);
    for (int l = 1; l <= w.modes(); ++l)
      dphi += w.c[static_cast<std::size_t>(l - 1)] * (0.5 * l * std::cos(0.5 * l * phi));
    const double weight = (j == 0 || j == nphi) ? 0.5 : 1.0;
    e += weight * dphi.norm_sq() * (2 * kPi / nphi);
  }
  return e;
}

double quad_loop_disk_energy(const LoopWave& w, int nr, int npsi) {
  double e = 0;
  for (int i = 0; i < nr; ++i) {
    const double rho = (i + 0.5) / nr;
    double ring = 0;
    for (int j = 0; j < npsi; ++j) {
      const double psi = 2 * kPi * j / npsi;
      RVec dr = RVec::zero(w.n), dpsi = RVec::zero(w.n);
      for (int l = 1; l <= w.modes(); ++l) {
        const auto& a = w.a[static_cast<std::size_t>(l - 1)];
        const auto& b = w.b[static_cast<std::size_t>(l - 1)];
        dr += a * (l * std::pow(rho, l - 1) * std::cos(l * psi)) + b * (l * std::pow(rho, l - 1) * std::sin(l * psi));
        dpsi += a * (-static_cast<double>(l) * std::pow(rho, l) * std::sin(l * psi)) +
                b * (static_cast<double>(l) * std::pow(rho, l) * std::cos(l * psi));
      }
      ring += dr.norm_sq() + dpsi.norm_sq() / (rho * rho);
    }
    e += ring * (2 * kPi / npsi) * rho / nr;
  }
  return e;
}

}  // namespace

TEST_CASE("half-wave coefficients invert band-limited samples exactly") {
  std::mt19937_64 rng(7);
  const HalfWave w = random_halfwave(rng, 3, 6);
  const int mc = 96;
  const std::vector<RVec> zeta = halfwave_nodes(w, mc);
  CHECK(zeta.front().norm() < 1e-14);
  CHECK(zeta.back().norm() < 1e-14);
  const HalfWave back = halfwave_coeffs(zeta, 6);
  for (int l = 0; l < 6; ++l)
    CHECK(dist(back.c[static_cast<std::size_t>(l)], w.c[static_cast<std::size_t>(l)]) < 1e-12);
  CHECK(halfwave_defect(zeta, back) < 1e-12);

  // Widening the mode window adds only vanishing coefficients.
  const HalfWave wide = halfwave_coeffs(zeta, 20);
  for (int l = 6; l < 20; ++l) CHECK(wide.c[static_cast<std::size_t>(l)].norm() < 1e-12);

  // Discrete Parseval identity for the sine transform.
  double lhs = 0;
  for (int m = 1; m < mc; ++m) lhs += zeta[static_cast<std::size_t>(m)].norm_sq();
  double rhs = 0;
  for (const auto& c : back.c) rhs += c.norm_sq();
  CHECK(lhs == doctest::Approx(0.5 * mc * rhs).epsilon(1e-12));
}

TEST_CASE("half-wave closed-form energies match quadrature") {
  std::mt19937_64 rng(11);
  const HalfWave w = random_halfwave(rng, 2, 5);
  CHECK(halfwave_disk_energy(w) == doctest::Approx(quad_disk_energy(w, 2000, 2048)).epsilon(2e-4));
  CHECK(halfwave_trace_energy(w) == doctest::Approx(quad_trace_energy(w, 1 << 14)).epsilon(1e-6));

  // Per mode the disk energy is 2/l times the trace energy; only the lowest
  // half-wave saturates the extension bound disk <= 2 * trace.
  for (int l = 1; l <= 5; ++l) {
    HalfWave single;
    single.n = 1;
    single.c.assign(static_cast<std::size_t>(l), RVec{0.0});
    single.c.back() = RVec{1.0};
    const double ratio = halfwave_disk_energy(single) / halfwave_trace_energy(single);
    CHECK(ratio == doctest::Approx(2.0 / l).epsilon(1e-12));
  }
}

TEST_CASE("half-wave evaluation extends the boundary data harmonically") {
  std::mt19937_64 rng(13);
  const HalfWave w = random_halfwave(rng, 1, 4);
  const int mc = 64;
  const std::vector<RVec> nodes = halfwave_nodes(w, mc);
  for (int m = 0; m <= mc; ++m)
    CHECK(dist(halfwave_eval(w, 1.0, 2 * kPi * m / mc), nodes[static_cast<std::size_t>(m)]) < 1e-13);
  // Interior mean value property on a small circle (harmonicity check).
  const double x0 = 0.31, y0 = 0.12, rr = 0.05;
  RVec avg = RVec::zero(1);
  const int nn = 256;
  for (int j = 0; j < nn; ++j) {
    const double x = x0 + rr * std::cos(2 * kPi * j / nn);
    const double y = y0 + rr * std::sin(2 * kPi * j / nn);
    avg += halfwave_eval(w, std::hypot(x, y), std::atan2(y, x) < 0 ? std::atan2(y, x) + 2 * kPi : std::atan2(y, x)) *
           (1.0 / nn);
  }
  const RVec center = halfwave_eval(w, std::hypot(x0, y0), std::atan2(y0, x0));
  CHECK(dist(avg, center) < 1e-10);
}

TEST_CASE("loop coefficients invert band-limited periodic samples") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  LoopWave w;
  w.n = 2;
  w.a0 = RVec{coeff(rng), coeff(rng)};
  for (int l = 0; l < 4; ++l) {
    w.a.push_back(RVec{coeff(rng), coeff(rng)});
    w.b.push_back(RVec{coeff(rng), coeff(rng)});
  }
  const int s_count = 64;
  const std::vector<RVec> zeta = loop_nodes(w, s_count);
  const LoopWave back = loop_coeffs(zeta, 4);
  CHECK(dist(back.a0, w.a0) < 1e-13);
  for (int l = 0; l < 4; ++l) {
    CHECK(dist(back.a[static_cast<std::size_t>(l)], w.a[static_cast<std::size_t>(l)]) < 1e-12);
    CHECK(dist(back.b[static_cast<std::size_t>(l)], w.b[static_cast<std::size_t>(l)]) < 1e-12);
  }
  CHECK(loop_defect(zeta, back) < 1e-12);
  CHECK(loop_disk_energy(w) == doctest::Approx(quad_loop_disk_energy(w, 2000, 1024)).epsilon(2e-4));

  // The constant part carries no energy.
  LoopWave shifted = w;
  shifted.a0 = RVec{5.0, -3.0};
  CHECK(loop_disk_energy(shifted) == loop_disk_energy(w));
  CHECK(loop_trace_energy(shifted) == loop_trace_energy(w));
}

TEST_CASE("invalid mode windows are rejected") {
  std::vector<RVec> zeta(17, RVec{0.0});
  CHECK_THROWS_AS(halfwave_coeffs(zeta, 16), std::invalid_argument);
  CHECK_THROWS_AS(halfwave_coeffs(zeta, 0), std::invalid_argument);
  std::vector<RVec> loop(16, RVec{0.0});
  CHECK_THROWS_AS(loop_coeffs(loop, 8), std::invalid_argument);
}
