#pragma once

#include <vector>

#include "aqlab/vec.hpp"

namespace aq {

// Expansion of a chart function on [0, 2 pi] vanishing at both ends in the
// half-wave basis sin(l phi / 2), l = 1..L.
struct HalfWave {
  int n = 1;
  std::vector<RVec> c;  // c[l-1] multiplies sin(l phi / 2)

  int modes() const { return static_cast<int>(c.size()); }
};

// Sine transform of node samples zeta_m at phi_m = 2 pi m / m_count,
// m = 0..m_count (endpoint values are ignored; they must vanish for the
// expansion to converge). Exact for band-limited data with modes <= m_count-1.
HalfWave halfwave_coeffs(const std::vector<RVec>& zeta, int modes);
// Values of the expansion back at the sampling nodes.
std::vector<RVec> halfwave_nodes(const HalfWave& w, int m_count);
// Root-mean-square defect between samples and the expansion at the nodes.
double halfwave_defect(const std::vector<RVec>& zeta, const HalfWave& w);
// Harmonic extension value at chart radius rho and angle phi.
RVec halfwave_eval(const HalfWave& w, double rho, double phi);
// Dirichlet energy of the harmonic extension over the chart disk:
// (pi/2) sum_l l |c_l|^2.
double halfwave_disk_energy(const HalfWave& w);
// Tangential energy of the chart boundary values: (pi/4) sum_l l^2 |c_l|^2.
double halfwave_trace_energy(const HalfWave& w);

// Classical Fourier expansion of a periodic cover-circle function.
struct LoopWave {
  int n = 1;
  RVec a0;
  std::vector<RVec> a, b;  // a[l-1] cos(l psi), b[l-1] sin(l psi)

  int modes() const { return static_cast<int>(a.size()); }
};

// Transform of periodic samples zeta_s at psi_s = 2 pi s / s_count. Exact for
// band-limited data with modes < s_count / 2.
LoopWave loop_coeffs(const std::vector<RVec>& zeta, int modes);
std::vector<RVec> loop_nodes(const LoopWave& w, int s_count);
double loop_defect(const std::vector<RVec>& zeta, const LoopWave& w);
RVec loop_eval(const LoopWave& w, double rho, double psi);
// Dirichlet energy of the harmonic extension: pi sum_l l (|a_l|^2 + |b_l|^2).
double loop_disk_energy(const LoopWave& w);
// Tangential energy on the covering circle: pi sum_l l^2 (|a_l|^2 + |b_l|^2).
double loop_trace_energy(const LoopWave& w);

}  // namespace aq
