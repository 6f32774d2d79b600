#include "aqlab/fourier.hpp"

#include <cmath>
#include <stdexcept>

#include "aqlab/mesh.hpp"

namespace aq {
namespace {

constexpr double kPi = DiskMesh::kPi;

int common_dim(const std::vector<RVec>& zeta) {
  for (const auto& v : zeta)
    if (v.dim() > 0) return v.dim();
  return 1;
}

}  // namespace

HalfWave halfwave_coeffs(const std::vector<RVec>& zeta, int modes) {
  if (zeta.size() < 3) throw std::invalid_argument("too few chart samples");
  const int mc = static_cast<int>(zeta.size()) - 1;  // interval count
  if (modes < 1 || modes > mc - 1) throw std::invalid_argument("invalid mode count");
  HalfWave w;
  w.n = common_dim(zeta);
  w.c.assign(static_cast<std::size_t>(modes), RVec::zero(w.n));
  for (int l = 1; l <= modes; ++l) {
    RVec acc = RVec::zero(w.n);
    for (int m = 1; m < mc; ++m) acc = acc + zeta[static_cast<std::size_t>(m)] * std::sin(kPi * l * m / mc);
    w.c[static_cast<std::size_t>(l - 1)] = acc * (2.0 / mc);
  }
  return w;
}

std::vector<RVec> halfwave_nodes(const HalfWave& w, int m_count) {
  std::vector<RVec> out(static_cast<std::size_t>(m_count + 1), RVec::zero(w.n));
  for (int m = 0; m <= m_count; ++m) {
    RVec acc = RVec::zero(w.n);
    for (int l = 1; l <= w.modes(); ++l)
      acc = acc + w.c[static_cast<std::size_t>(l - 1)] * std::sin(kPi * l * m / m_count);
    out[static_cast<std::size_t>(m)] = acc;
  }
  return out;
}

double halfwave_defect(const std::vector<RVec>& zeta, const HalfWave& w) {
  const int mc = static_cast<int>(zeta.size()) - 1;
  const std::vector<RVec> fit = halfwave_nodes(w, mc);
  double s = 0;
  for (std::size_t m = 0; m < zeta.size(); ++m) s += dist_sq(zeta[m], fit[m]);
  return std::sqrt(s / static_cast<double>(zeta.size()));
}

RVec halfwave_eval(const HalfWave& w, double rho, double phi) {
  RVec acc = RVec::zero(w.n);
  for (int l = 1; l <= w.modes(); ++l)
    acc = acc + w.c[static_cast<std::size_t>(l - 1)] * (std::pow(rho, 0.5 * l) * std::sin(0.5 * l * phi));
  return acc;
}

double halfwave_disk_energy(const HalfWave& w) {
  double e = 0;
  for (int l = 1; l <= w.modes(); ++l) e += 0.5 * kPi * l * w.c[static_cast<std::size_t>(l - 1)].norm_sq();
  return e;
}

double halfwave_trace_energy(const HalfWave& w) {
  double e = 0;
  for (int l = 1; l <= w.modes(); ++l)
    e += 0.25 * kPi * static_cast<double>(l) * l * w.c[static_cast<std::size_t>(l - 1)].norm_sq();
  return e;
}

LoopWave loop_coeffs(const std::vector<RVec>& zeta, int modes) {
  const int s_count = static_cast<int>(zeta.size());
  if (s_count < 4) throw std::invalid_argument("too few chart samples");
  if (modes < 1 || 2 * modes >= s_count) throw std::invalid_argument("invalid mode count");
  LoopWave w;
  w.n = common_dim(zeta);
  w.a0 = RVec::zero(w.n);
  for (const auto& v : zeta) w.a0 = w.a0 + v;
  w.a0 = w.a0 * (1.0 / s_count);
  w.a.assign(static_cast<std::size_t>(modes), RVec::zero(w.n));
  w.b.assign(static_cast<std::size_t>(modes), RVec::zero(w.n));
  for (int l = 1; l <= modes; ++l) {
    RVec ca = RVec::zero(w.n);
    RVec cb = RVec::zero(w.n);
    for (int s = 0; s < s_count; ++s) {
      const double psi = 2 * kPi * s / s_count;
      ca = ca + zeta[static_cast<std::size_t>(s)] * std::cos(l * psi);
      cb = cb + zeta[static_cast<std::size_t>(s)] * std::sin(l * psi);
    }
    w.a[static_cast<std::size_t>(l - 1)] = ca * (2.0 / s_count);
    w.b[static_cast<std::size_t>(l - 1)] = cb * (2.0 / s_count);
  }
  return w;
}

std::vector<RVec> loop_nodes(const LoopWave& w, int s_count) {
  std::vector<RVec> out(static_cast<std::size_t>(s_count), RVec::zero(w.n));
  for (int s = 0; s < s_count; ++s) {
    const double psi = 2 * kPi * s / s_count;
    RVec acc = w.a0;
    for (int l = 1; l <= w.modes(); ++l)
      acc = acc + w.a[static_cast<std::size_t>(l - 1)] * std::cos(l * psi) +
            w.b[static_cast<std::size_t>(l - 1)] * std::sin(l * psi);
    out[static_cast<std::size_t>(s)] = acc;
  }
  return out;
}

double loop_defect(const std::vector<RVec>& zeta, const LoopWave& w) {
  const std::vector<RVec> fit = loop_nodes(w, static_cast<int>(zeta.size()));
  double s = 0;
  for (std::size_t m = 0; m < zeta.size(); ++m) s += dist_sq(zeta[m], fit[m]);
  return std::sqrt(s / static_cast<double>(zeta.size()));
}

RVec loop_eval(const LoopWave& w, double rho, double psi) {
  RVec acc = w.a0;
  for (int l = 1; l <= w.modes(); ++l) {
    const double rl = std::pow(rho, l);
    acc = acc + w.a[static_cast<std::size_t>(l - 1)] * (rl * std::cos(l * psi)) +
          w.b[static_cast<std::size_t>(l - 1)] * (rl * std::sin(l * psi));
  }
  return acc;
}

double loop_disk_energy(const LoopWave& w) {
  double e = 0;
  for (int l = 1; l <= w.modes(); ++l)
    e += kPi * l *
         (w.a[static_cast<std::size_t>(l - 1)].norm_sq() + w.b[static_cast<std::size_t>(l - 1)].norm_sq());
  return e;
}

double loop_trace_energy(const LoopWave& w) {
  double e = 0;
  for (int l = 1; l <= w.modes(); ++l)
    e += kPi * static_cast<double>(l) * l *
         (w.a[static_cast<std::size_t>(l - 1)].norm_sq() + w.b[static_cast<std::size_t>(l - 1)].norm_sq());
  return e;
}

}  // namespace aq
