#pragma once

#include <vector>

#include "aqlab/interface_map.hpp"
#include "aqlab/rational.hpp"
#include "aqlab/trace.hpp"

namespace aq {

// Ring ladder of frequency data about the origin: D(r) is the energy of B_r
// (the truncated core is completed by a geometric tail), H(r) the circle
// quadrature of |f|^2 on the boundary of B_r, and I = r D / H.
struct FrequencyProfile {
  std::vector<double> radii;
  std::vector<double> D, H, I;
  bool constant_map = false;  // H (or all of D) vanishes on the sampled range
  double alpha = 0;           // plug-in estimate: median of I over the innermost quartile
  double alpha_spread = 0;    // max - min of I over that quartile
  double H0 = 0, D0 = 0;      // plug-in normalized limits H/r^(2a+1), D/r^(2a)
  double hder_residual = 0;   // worst relative defect of H' = H/r + 2D
};

// Profile about the origin with ring-exact quadrature from the mesh.
FrequencyProfile profile(const InterfaceMap& f);

// Profile about the interface point (x0, 0) from resampled circles. The
// ladder has `circles` radii in geometric progression (the mesh's own ratio)
// ending at rho_max; every circle must stay inside the unit disk.
FrequencyProfile profile_at(const InterfaceMap& f, double x0, double rho_max, int circles);

// Worst monotonicity violation: max over sampled s < t of I(s) - I(t),
// zero when the ladder is nondecreasing.
double check_monotone(const FrequencyProfile& p);

// Worst relative defect of the first-variation identity on interior rings:
// twice the tangential trace energy of ring i equals dD/dr at r_i.
double inner_variation_residual(const InterfaceMap& f);

// Trace of f on the circle of radius rho about (x0, 0), resampled by matched
// bilinear interpolation; arcs follow the little circle's own halves. Radii
// below the mesh core clamp to the innermost ring.
TraceLoop circle_trace(const InterfaceMap& f, double x0, double rho, int angles);

// Restriction of f to the ball bounded by mesh ring `ring`, rescaled to unit
// energy: g(x) = f(r_ring x) / sqrt(D(r_ring)). Ring samples are reused
// exactly on the induced submesh; throws when the local energy vanishes.
InterfaceMap blowup(const InterfaceMap& f, int ring);

struct TangentResult {
  TraceLoop trace;  // homogenized innermost stable ring trace, unit energy
  double alpha = 0;
  std::vector<double> rho;        // sampled scales
  std::vector<double> deviation;  // squared L2(S^1) matching distance of the blow-ups
};

// Extracts the homogeneous tangent candidate at the origin together with the
// deviation curve of the blow-up family against it. Throws "insufficient
// resolution" when the frequency plug-in oscillates beyond the 0.02 gate.
TangentResult tangent(const InterfaceMap& f);

// Tangent analysis about the interface point (x0, 0) from resampled circle
// ladders; the origin overload uses mesh-exact rings instead.
TangentResult tangent_at(const InterfaceMap& f, double x0, double rho_max, int circles);

// Least-squares slope of log y against log x over entries with x, y > 0.
double fit_exponent(const std::vector<double>& x, const std::vector<double>& y);

// Exact decay exponent: min over 1 <= k <= q of (floor(alpha k) + 1 -
// alpha k) / k together with the same expression evaluated at 2k - 1.
Rational compute_beta(const Rational& alpha, int q);

// Nearest rational with denominator at most max_den (continued fractions).
Rational snap_rational(double x, int max_den);

struct DecayFit {
  bool exact = false;          // residuals at noise floor; no fit performed
  double beta_i = 0, c_i = 0;  // log-log fit of I(r) - alpha
  double beta_h = 0, c_h = 0;  // fit of H/r^(2a+1) - H0
  double beta_d = 0, c_d = 0;  // fit of D/r^(2a) - D0
  double h0 = 0, d0 = 0;       // normalized limits
  double beta_floor = 0;       // exact exponent when q > 0 was supplied
  bool meets_floor = true;     // fitted exponents clear the floor minus 0.05
};

// Fits the decay of the frequency ladder toward its limit on the inner half
// of the radii. The rational overload additionally checks the fitted
// exponents against the exact floor compute_beta(alpha, q).
DecayFit fit_decay(const FrequencyProfile& p, double alpha);
DecayFit fit_decay(const FrequencyProfile& p, const Rational& alpha, int q);

}  // namespace aq
