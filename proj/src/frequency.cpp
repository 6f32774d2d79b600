#include "aqlab/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace aq {
namespace {

constexpr double kPi = DiskMesh::kPi;

// Ladder entries whose residual stays below this relative floor are treated
// as exactly homogeneous rather than fitted.
constexpr double kFloorRel = 1e-9;

std::size_t uz(int i) { return static_cast<std::size_t>(i); }

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return (v.size() % 2 == 1) ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Number of small-radius rows feeding the plug-in limit estimates.
int plugin_rows(int rows) { return std::min(rows, std::max(3, rows / 4)); }

// Cumulative energy ladder: geometric core tail plus annulus partial sums.
std::vector<double> energy_ladder(const std::vector<double>& annulus) {
  std::vector<double> d(annulus.size() + 1, 0.0);
  d[0] = core_completion(annulus);
  for (std::size_t i = 0; i < annulus.size(); ++i) d[i + 1] = d[i] + annulus[i];
  return d;
}

void finish_profile(FrequencyProfile& p) {
  const int rows = static_cast<int>(p.radii.size());
  p.I.assign(uz(rows), 0.0);
  double hmax = 0;
  for (double h : p.H) hmax = std::max(hmax, h);
  if (!(hmax > 0) || !(p.D.back() > 0)) {
    p.constant_map = true;
    return;
  }
  for (int i = 0; i < rows; ++i)
    if (p.H[uz(i)] > 0) p.I[uz(i)] = p.radii[uz(i)] * p.D[uz(i)] / p.H[uz(i)];

  const int w = plugin_rows(rows);
  std::vector<double> window(p.I.begin(), p.I.begin() + w);
  p.alpha = median(window);
  const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
  p.alpha_spread = *hi - *lo;

  std::vector<double> hn, dn;
  hn.reserve(uz(w));
  dn.reserve(uz(w));
  for (int i = 0; i < w; ++i) {
    const double r = p.radii[uz(i)];
    hn.push_back(p.H[uz(i)] / std::pow(r, 2 * p.alpha + 1));
    dn.push_back(p.D[uz(i)] / std::pow(r, 2 * p.alpha));
  }
  p.H0 = median(hn);
  p.D0 = median(dn);

  double worst = 0;
  for (int i = 1; i + 1 < rows; ++i) {
    const double hm = p.radii[uz(i)] - p.radii[uz(i - 1)];
    const double hp = p.radii[uz(i + 1)] - p.radii[uz(i)];
    const double deriv = (p.H[uz(i + 1)] - p.H[uz(i)]) / hp * (hm / (hm + hp)) +
                         (p.H[uz(i)] - p.H[uz(i - 1)]) / hm * (hp / (hm + hp));
    const double rhs = p.H[uz(i)] / p.radii[uz(i)] + 2 * p.D[uz(i)];
    if (rhs > 0) worst = std::max(worst, std::abs(deriv - rhs) / rhs);
  }
  p.hder_residual = worst;
}

// Radial bracket of a query radius between mesh rings, in log coordinates.
// Radii at or below the core clamp to the innermost ring.
std::pair<int, double> radial_bracket(const DiskMesh& mesh, double rq) {
  const int nr = mesh.rings();
  if (rq <= mesh.r(0)) return {0, 0.0};
  if (rq >= mesh.r(nr)) return {nr - 1, 1.0};
  int i = static_cast<int>(std::floor(std::log(rq / mesh.r(0)) / std::log(mesh.ratio())));
  i = std::clamp(i, 0, nr - 1);
  while (i > 0 && rq < mesh.r(i)) --i;
  while (i + 1 < nr && rq > mesh.r(i + 1)) ++i;
  const double v = std::log(rq / mesh.r(i)) / std::log(mesh.r(i + 1) / mesh.r(i));
  return {i, std::clamp(v, 0.0, 1.0)};
}

// Matched bilinear sample of the upper or lower family at polar (rq, tq).
MultiPoint probe(const InterfaceMap& f, bool upper_side, double rq, double tq) {
  const DiskMesh& mesh = f.mesh();
  const int m2 = mesh.angles() / 2;
  const double dt = mesh.dtheta();
  const auto [i, v] = radial_bracket(mesh, rq);

  int k = 0;
  double u = 0;
  if (upper_side) {
    const double a = std::clamp(tq, 0.0, kPi);
    k = std::min(m2 - 1, static_cast<int>(std::floor(a / dt)));
    u = std::clamp(a / dt - k, 0.0, 1.0);
  } else {
    const double a = std::clamp(tq, kPi, 2 * kPi);
    const int off = std::min(m2 - 1, static_cast<int>(std::floor((a - kPi) / dt)));
    k = m2 + off;
    u = std::clamp((a - kPi) / dt - off, 0.0, 1.0);
  }
  const auto val = [&](int ri, int kk) -> const MultiPoint& {
    return upper_side ? f.up(ri, kk) : f.lo(ri, kk);
  };
  const MultiPoint inner = interpolate(val(i, k), val(i, k + 1), u);
  const MultiPoint outer = interpolate(val(i + 1, k), val(i + 1, k + 1), u);
  return interpolate(inner, outer, v);
}

// Interface sheet value at the signed interface coordinate x.
RVec probe_phi(const InterfaceMap& f, double x) {
  const int col = (x >= 0) ? 0 : f.mesh().angles() / 2;
  const auto [i, v] = radial_bracket(f.mesh(), std::abs(x));
  return (1.0 - v) * f.phi(i, col) + v * f.phi(i + 1, col);
}

// Full-circle sum of squared angular increments of a trace.
double trace_ring_sum(const TraceLoop& g) {
  double acc = 0;
  for (std::size_t k = 0; k + 1 < g.upper.size(); ++k)
    acc += distance_sq(g.upper[k], g.upper[k + 1]);
  for (std::size_t k = 0; k + 1 < g.lower.size(); ++k)
    acc += distance_sq(g.lower[k], g.lower[k + 1]);
  return acc;
}

// Energy of the shell between two concentric sampled circles, mirroring the
// mesh quadrature: radial edges at midpoint weight, angular sums split
// logarithmically, interface endpoints at half weight per region.
double shell_energy(const TraceLoop& ga, const TraceLoop& gb, double ra, double rb) {
  const double dphi = 2 * kPi / ga.angles;
  double e = 0.5 * std::log(rb / ra) * (trace_ring_sum(ga) + trace_ring_sum(gb)) / dphi;
  const double w = 0.5 * (ra + rb) / (rb - ra) * dphi;
  double acc = 0;
  for (std::size_t k = 0; k < ga.upper.size(); ++k) {
    const double c = (k == 0 || k + 1 == ga.upper.size()) ? 0.5 : 1.0;
    acc += c * distance_sq(ga.upper[k], gb.upper[k]);
    acc += c * distance_sq(ga.lower[k], gb.lower[k]);
  }
  return e + w * acc;
}

struct CircleLadder {
  FrequencyProfile profile;
  std::vector<TraceLoop> levels;
};

CircleLadder ladder_at(const InterfaceMap& f, double x0, double rho_max, int circles) {
  if (circles < 4) throw std::invalid_argument("frequency ladder needs at least four circles");
  if (!(rho_max > 0) || std::abs(x0) + rho_max >= 1.0)
    throw std::invalid_argument("circle leaves the domain");
  const double g = f.mesh().ratio();
  CircleLadder out;
  FrequencyProfile& p = out.profile;
  p.radii.resize(uz(circles));
  for (int j = 0; j < circles; ++j)
    p.radii[uz(j)] = rho_max * std::pow(g, static_cast<double>(j - (circles - 1)));
  out.levels.reserve(uz(circles));
  for (int j = 0; j < circles; ++j)
    out.levels.push_back(circle_trace(f, x0, p.radii[uz(j)], f.mesh().angles()));
  p.H.resize(uz(circles));
  for (int j = 0; j < circles; ++j) p.H[uz(j)] = loop_height(out.levels[uz(j)]) * p.radii[uz(j)];
  std::vector<double> shell(uz(circles - 1));
  for (int j = 0; j + 1 < circles; ++j)
    shell[uz(j)] = shell_energy(out.levels[uz(j)], out.levels[uz(j + 1)], p.radii[uz(j)],
                                p.radii[uz(j + 1)]);
  p.D = energy_ladder(shell);
  finish_profile(p);
  return out;
}

TraceLoop scale_loop(TraceLoop g, double s) {
  for (MultiPoint& t : g.upper) t = t.scaled(s);
  for (MultiPoint& t : g.lower) t = t.scaled(s);
  g.phi_plus = s * g.phi_plus;
  g.phi_minus = s * g.phi_minus;
  return g;
}

// Shared tangent assembly from a frequency ladder and its ring traces.
TangentResult tangent_from(const FrequencyProfile& p, const std::vector<TraceLoop>& levels) {
  if (p.constant_map) throw std::runtime_error("blow-up requires positive local energy");
  if (!(p.alpha > 0) || p.alpha_spread > 0.02)
    throw std::runtime_error("insufficient resolution");

  TangentResult t;
  t.alpha = p.alpha;
  t.rho = p.radii;
  const int rows = static_cast<int>(levels.size());
  std::vector<TraceLoop> rescaled(uz(rows));
  for (int j = 0; j < rows; ++j) {
    if (!(p.D[uz(j)] > 0)) throw std::runtime_error("blow-up requires positive local energy");
    rescaled[uz(j)] = scale_loop(levels[uz(j)], 1.0 / std::sqrt(p.D[uz(j)]));
  }
  const double height = loop_height(rescaled[0]);
  if (!(height > 0)) throw std::runtime_error("insufficient resolution");
  t.trace = scale_loop(rescaled[0], std::sqrt(1.0 / (p.alpha * height)));
  t.deviation.resize(uz(rows));
  for (int j = 0; j < rows; ++j) {
    const double d = loop_l2_distance(rescaled[uz(j)], t.trace);
    t.deviation[uz(j)] = d * d;
  }
  return t;
}

struct FitLadder {
  std::vector<double> radii;
  std::vector<double> residual;
  double scale = 1;
};

// Log-log least-squares of one residual ladder. Returns false when the
// residual stays at the homogeneity floor.
bool fit_ladder(const FitLadder& l, double& beta, double& c) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < l.radii.size(); ++i)
    if (l.residual[i] > kFloorRel * l.scale) {
      xs.push_back(l.radii[i]);
      ys.push_back(l.residual[i]);
    }
  if (xs.size() < 4) return false;
  beta = fit_exponent(xs, ys);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  c = std::exp(my - beta * mx);
  return true;
}

DecayFit fit_profile(const FrequencyProfile& p, double alpha, double beta_floor) {
  DecayFit out;
  out.beta_floor = beta_floor;
  const int rows = static_cast<int>(p.radii.size());
  if (p.constant_map || rows < 8) {
    out.exact = true;
    out.h0 = p.H0;
    out.d0 = p.D0;
    return out;
  }

  std::vector<double> hn(uz(rows)), dn(uz(rows));
  for (int i = 0; i < rows; ++i) {
    const double r = p.radii[uz(i)];
    hn[uz(i)] = p.H[uz(i)] / std::pow(r, 2 * alpha + 1);
    dn[uz(i)] = p.D[uz(i)] / std::pow(r, 2 * alpha);
  }
  const int w = plugin_rows(rows);
  out.h0 = median(std::vector<double>(hn.begin(), hn.begin() + w));
  out.d0 = median(std::vector<double>(dn.begin(), dn.begin() + w));

  // Fit window: above the plug-in rows, within the inner half of the radii.
  const int lo = std::max(1, rows / 4);
  const int hi = std::clamp(std::max(lo + 5, rows / 2), lo, rows - 1);
  FitLadder li, lh, ld;
  for (int i = lo; i <= hi; ++i) {
    const double r = p.radii[uz(i)];
    li.radii.push_back(r);
    li.residual.push_back(p.I[uz(i)] - p.alpha);
    lh.radii.push_back(r);
    lh.residual.push_back(hn[uz(i)] - out.h0);
    ld.radii.push_back(r);
    ld.residual.push_back(dn[uz(i)] - out.d0);
  }
  li.scale = std::max(1.0, std::abs(p.alpha));
  lh.scale = std::max(std::abs(out.h0), 1e-300);
  ld.scale = std::max(std::abs(out.d0), 1e-300);

  const bool fi = fit_ladder(li, out.beta_i, out.c_i);
  const bool fh = fit_ladder(lh, out.beta_h, out.c_h);
  const bool fd = fit_ladder(ld, out.beta_d, out.c_d);
  out.exact = !fi && !fh && !fd;
  out.meets_floor = (!fi || out.beta_i >= beta_floor - 0.05) &&
                    (!fh || out.beta_h >= beta_floor - 0.05) &&
                    (!fd || out.beta_d >= beta_floor - 0.05);
  return out;
}

}  // namespace

FrequencyProfile profile(const InterfaceMap& f) {
  const DiskMesh& mesh = f.mesh();
  const EnergyBreakdown e = assemble_energy(f);
  const int nr = mesh.rings();
  FrequencyProfile p;
  p.radii.resize(uz(nr + 1));
  for (int i = 0; i <= nr; ++i) p.radii[uz(i)] = mesh.r(i);
  p.D = energy_ladder(e.annulus);
  p.H = ring_height(f);
  finish_profile(p);
  return p;
}

FrequencyProfile profile_at(const InterfaceMap& f, double x0, double rho_max, int circles) {
  return ladder_at(f, x0, rho_max, circles).profile;
}

double check_monotone(const FrequencyProfile& p) {
  if (p.constant_map) return 0;
  double worst = 0;
  double prefix = p.I.empty() ? 0.0 : p.I.front();
  for (std::size_t i = 1; i < p.I.size(); ++i) {
    worst = std::max(worst, prefix - p.I[i]);
    prefix = std::max(prefix, p.I[i]);
  }
  return worst;
}

double inner_variation_residual(const InterfaceMap& f) {
  const DiskMesh& mesh = f.mesh();
  const EnergyBreakdown e = assemble_energy(f);
  const std::vector<double> d = energy_ladder(e.annulus);
  double worst = 0;
  for (int i = 1; i < mesh.rings(); ++i) {
    const double hm = mesh.r(i) - mesh.r(i - 1);
    const double hp = mesh.r(i + 1) - mesh.r(i);
    const double deriv = (d[uz(i + 1)] - d[uz(i)]) / hp * (hm / (hm + hp)) +
                         (d[uz(i)] - d[uz(i - 1)]) / hm * (hp / (hm + hp));
    if (deriv > 0)
      worst = std::max(worst, std::abs(2 * e.ring_tangential[uz(i)] - deriv) / deriv);
  }
  return worst;
}

TraceLoop circle_trace(const InterfaceMap& f, double x0, double rho, int angles) {
  if (angles < 8 || angles % 2 != 0)
    throw std::invalid_argument("angle count must be even and at least 8");
  if (!(rho > 0) || std::abs(x0) + rho >= 1.0)
    throw std::invalid_argument("circle leaves the domain");
  const int m2 = angles / 2;
  const double dphi = 2 * kPi / angles;
  TraceLoop g;
  g.angles = angles;
  g.upper.reserve(uz(m2 + 1));
  g.lower.reserve(uz(m2 + 1));
  for (int k = 0; k <= m2; ++k) {
    const double phi = dphi * k;
    const double x = x0 + rho * std::cos(phi);
    const double y = rho * std::sin(phi);
    double tq;
    if (k == 0 || k == m2) {
      tq = (x >= 0) ? 0.0 : kPi;
    } else {
      tq = std::atan2(y, x);
      if (tq < 0) tq += 2 * kPi;
    }
    g.upper.push_back(probe(f, true, std::hypot(x, y), tq));
  }
  for (int k = 0; k <= m2; ++k) {
    const double phi = kPi + dphi * k;
    const double x = x0 + rho * std::cos(phi);
    const double y = rho * std::sin(phi);
    double tq;
    if (k == 0 || k == m2) {
      tq = (x >= 0) ? 2 * kPi : kPi;
    } else {
      tq = std::atan2(y, x);
      if (tq < 0) tq += 2 * kPi;
    }
    g.lower.push_back(probe(f, false, std::hypot(x, y), tq));
  }
  g.phi_plus = probe_phi(f, x0 + rho);
  g.phi_minus = probe_phi(f, x0 - rho);
  return g;
}

InterfaceMap blowup(const InterfaceMap& f, int ring) {
  const DiskMesh& mesh = f.mesh();
  const int nr = mesh.rings();
  const int m = mesh.angles();
  if (ring < 2 || ring > nr) throw std::invalid_argument("blow-up ring out of range");
  const EnergyBreakdown e = assemble_energy(f);
  const std::vector<double> d = energy_ladder(e.annulus);
  if (!(d[uz(ring)] > 0)) throw std::runtime_error("blow-up requires positive local energy");
  const double s = 1.0 / std::sqrt(d[uz(ring)]);

  InterfaceMap out(DiskMesh(ring, m, mesh.r(nr - ring)), f.q_upper(), f.dim());
  for (int i = 0; i <= ring; ++i) {
    for (int k = 0; k < m; ++k) {
      if (mesh.upper_col(k)) out.up(i, k) = f.up(i, k).scaled(s);
      if (mesh.lower_col(k)) out.lo(i, k) = f.lo(i, k).scaled(s);
    }
    out.phi(i, 0) = s * f.phi(i, 0);
    out.phi(i, m / 2) = s * f.phi(i, m / 2);
  }
  return out;
}

TangentResult tangent(const InterfaceMap& f) {
  const FrequencyProfile p = profile(f);
  std::vector<TraceLoop> levels;
  levels.reserve(uz(f.mesh().rings() + 1));
  for (int i = 0; i <= f.mesh().rings(); ++i) levels.push_back(sample_loop(f, i));
  return tangent_from(p, levels);
}

TangentResult tangent_at(const InterfaceMap& f, double x0, double rho_max, int circles) {
  const CircleLadder l = ladder_at(f, x0, rho_max, circles);
  return tangent_from(l.profile, l.levels);
}

Rational compute_beta(const Rational& alpha, int q) {
  if (!(alpha.num > 0)) throw std::invalid_argument("frequency must be positive");
  if (q < 1) throw std::invalid_argument("multiplicity must be positive");
  const auto term = [&alpha](std::int64_t k) {
    const Rational ak = alpha * Rational{k, 1};
    return (Rational{ak.floor() + 1, 1} - ak) / Rational{k, 1};
  };
  Rational best = term(1);
  for (int k = 1; k <= q; ++k) {
    for (const std::int64_t j : {static_cast<std::int64_t>(k), static_cast<std::int64_t>(2 * k - 1)}) {
      const Rational t = term(j);
      if (t < best) best = t;
    }
  }
  return best;
}

Rational snap_rational(double x, int max_den) {
  if (max_den < 1) throw std::invalid_argument("denominator bound must be positive");
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double y = x;
  for (int it = 0; it < 64; ++it) {
    const double fl = std::floor(y);
    if (std::abs(fl) > 1e15) break;
    const std::int64_t a = static_cast<std::int64_t>(fl);
    const std::int64_t p2 = a * p1 + p0;
    const std::int64_t q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = y - fl;
    if (frac < 1e-12) break;
    y = 1.0 / frac;
  }
  if (q1 < 1) return Rational{static_cast<std::int64_t>(std::llround(x)), 1};
  return Rational{p1, q1};
}

double fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
    if (x[i] > 0 && y[i] > 0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) throw std::invalid_argument("exponent fit needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(lx.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  if (!(den > 0)) throw std::invalid_argument("exponent fit needs distinct abscissae");
  return num / den;
}

DecayFit fit_decay(const FrequencyProfile& p, double alpha) {
  return fit_profile(p, alpha, 0.0);
}

DecayFit fit_decay(const FrequencyProfile& p, const Rational& alpha, int q) {
  return fit_profile(p, alpha.value(), compute_beta(alpha, q).value());
}

}  // namespace aq
