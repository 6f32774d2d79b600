#include "aqlab/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aq {
namespace {

constexpr double kAmbiguityRel = 1e-9;  // matching gap below which a tie is suspected
constexpr double kMaterialRel = 1e-7;   // target spread that makes a tie an error
constexpr double kGroupRel = 1e-9;      // relative tolerance for identifying equal blocks

std::size_t uz(int i) { return static_cast<std::size_t>(i); }

// Optimal matching of extrapolated sources onto the next column with a
// near-tie guard: when the second best matching is within the ambiguity
// tolerance and routes a source to a materially different target, the sheets
// cannot be identified from the samples. The exception is an exchange between
// sources that agree in both position and momentum: such threads are
// indistinguishable copies, so which label continues where carries no
// information. Tangencies of distinct sheets do not qualify, because their
// trailing samples differ at second order.
Assignment checked_assignment(const std::vector<RVec>& ext, const std::vector<RVec>& cur,
                              const std::vector<RVec>& prev, const std::vector<RVec>& next,
                              double scale) {
  Assignment best = min_cost_assignment(ext, next);
  if (ext.size() >= 2) {
    const Assignment runner = second_best_assignment(ext, next, best);
    const double gap = std::sqrt(runner.cost_sq) - std::sqrt(best.cost_sq);
    if (gap <= kAmbiguityRel * scale) {
      std::vector<int> owner(ext.size(), 0);
      for (std::size_t i = 0; i < ext.size(); ++i) owner[uz(best.perm[i])] = static_cast<int>(i);
      for (std::size_t i = 0; i < ext.size(); ++i) {
        if (runner.perm[i] == best.perm[i]) continue;
        if (dist(next[uz(best.perm[i])], next[uz(runner.perm[i])]) <= kMaterialRel * scale) continue;
        const std::size_t j = uz(owner[uz(runner.perm[i])]);
        if (dist(cur[i], cur[j]) <= kMaterialRel * scale &&
            dist(prev[i], prev[j]) <= kMaterialRel * scale)
          continue;
        throw std::runtime_error("insufficient resolution");
      }
    }
  }
  return best;
}

// Second-order tracking: each sheet is continued towards its linear
// extrapolation. Plain nearest matching is monotone in one dimension and
// would bounce off every transversal sheet crossing; the extrapolated source
// carries the momentum through the crossing instead.
std::vector<std::vector<RVec>> track(const std::vector<MultiPoint>& samples, double scale) {
  const int q = samples.front().size();
  std::vector<std::vector<RVec>> paths(uz(q));
  std::vector<RVec> cur = samples.front().expanded();
  std::vector<RVec> prev = cur;
  for (int j = 0; j < q; ++j) {
    paths[uz(j)].reserve(samples.size());
    paths[uz(j)].push_back(cur[uz(j)]);
  }
  for (std::size_t s = 0; s + 1 < samples.size(); ++s) {
    const std::vector<RVec> next = samples[s + 1].expanded();
    std::vector<RVec> ext(uz(q));
    for (int j = 0; j < q; ++j) ext[uz(j)] = cur[uz(j)] * 2.0 - prev[uz(j)];
    const Assignment a = checked_assignment(ext, cur, prev, next, scale);
    prev = cur;
    for (int j = 0; j < q; ++j) {
      cur[uz(j)] = next[uz(a.perm[uz(j)])];
      paths[uz(j)].push_back(cur[uz(j)]);
    }
  }
  return paths;
}

double weighted_sq(const MultiPoint& t) {
  double s = 0;
  for (const auto& e : t.entries()) s += e.k * e.p.norm_sq();
  return s;
}

}  // namespace

int TraceLoop::dim() const {
  for (const auto& t : upper)
    if (t.dim() > 0) return t.dim();
  return phi_plus.dim() > 0 ? phi_plus.dim() : 1;
}

double TraceLoop::max_abs() const {
  double m = std::max(phi_plus.max_abs(), phi_minus.max_abs());
  for (const auto& t : upper) m = std::max(m, t.max_abs());
  for (const auto& t : lower) m = std::max(m, t.max_abs());
  return m;
}

double TraceLoop::junction_defect() const {
  const MultiPoint at0 = merge(lower.back(), MultiPoint::singleton(phi_plus));
  const MultiPoint atpi = merge(lower.front(), MultiPoint::singleton(phi_minus));
  return std::max(distance(upper.front(), at0), distance(upper.back(), atpi));
}

void validate(const TraceLoop& g) {
  if (g.angles < 8 || g.angles % 2 != 0) throw std::invalid_argument("angle count must be even and at least 8");
  const std::size_t half = uz(g.angles / 2 + 1);
  if (g.upper.size() != half || g.lower.size() != half) throw std::invalid_argument("trace sample count mismatch");
  const int q = g.q_upper();
  if (q < 1) throw std::invalid_argument("trace needs at least one upper sheet");
  for (const auto& t : g.upper)
    if (t.size() != q) throw std::invalid_argument("cardinality mismatch");
  for (const auto& t : g.lower)
    if (t.size() != q - 1) throw std::invalid_argument("cardinality mismatch");
}

SheetSelection select_sheets(const std::vector<MultiPoint>& samples) {
  if (samples.empty()) throw std::invalid_argument("no samples to select from");
  const int q = samples.front().size();
  for (const auto& t : samples)
    if (t.size() != q) throw std::invalid_argument("cardinality mismatch");
  double scale = 1.0;
  for (const auto& t : samples) scale = std::max(scale, t.max_abs());
  SheetSelection out;
  out.sheets = track(samples, scale);
  out.min_margin = std::numeric_limits<double>::infinity();
  std::vector<RVec> cur = samples.front().expanded();
  std::vector<RVec> prev = cur;
  for (std::size_t s = 0; s + 1 < samples.size() && q >= 2; ++s) {
    const std::vector<RVec> next = samples[s + 1].expanded();
    std::vector<RVec> ext(uz(q));
    for (int j = 0; j < q; ++j) ext[uz(j)] = cur[uz(j)] * 2.0 - prev[uz(j)];
    const Assignment best = min_cost_assignment(ext, next);
    const Assignment runner = second_best_assignment(ext, next, best);
    out.min_margin = std::min(out.min_margin, std::sqrt(runner.cost_sq) - std::sqrt(best.cost_sq));
    prev = cur;
    for (int j = 0; j < q; ++j) cur[uz(j)] = next[uz(best.perm[uz(j)])];
  }
  return out;
}

TraceDecomposition decompose_trace(const TraceLoop& g) {
  validate(g);
  const int q = g.q_upper();
  const int m = g.angles;
  const int m2 = m / 2;
  const int n = g.dim();
  const double scale = std::max(1.0, g.max_abs());

  // One cyclic sample sequence for the whole loop: upper columns as sampled,
  // lower columns augmented with a stationary zero in the last slot so that
  // the interface sheet can be followed through the lower region.
  std::vector<std::vector<RVec>> cols(uz(m));
  for (int k = 0; k < m; ++k) {
    if (k <= m2) {
      cols[uz(k)] = g.upper[uz(k)].expanded();
    } else {
      cols[uz(k)] = g.lower[uz(k - m2)].expanded();
      cols[uz(k)].push_back(RVec::zero(n));
    }
  }

  // Track once around the loop with momentum, starting from the best
  // separated column so the extrapolation is seeded unambiguously.
  int kstar = 0;
  double best_sep = -1;
  for (int k = 0; k < m; ++k) {
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < cols[uz(k)].size(); ++a)
      for (std::size_t b = a + 1; b < cols[uz(k)].size(); ++b)
        sep = std::min(sep, dist(cols[uz(k)][a], cols[uz(k)][b]));
    if (sep > best_sep) {
      best_sep = sep;
      kstar = k;
    }
  }

  const int s0 = (m - kstar) % m;  // step at which the tracking reaches column 0
  const int total = s0 + m;
  std::vector<std::vector<RVec>> tvals(uz(q), std::vector<RVec>(uz(total + 1)));
  std::vector<std::vector<int>> tslot(uz(q), std::vector<int>(uz(total + 1)));
  {
    std::vector<RVec> cur = cols[uz(kstar)];
    std::vector<RVec> prev = cur;
    for (int t = 0; t < q; ++t) {
      tvals[uz(t)][0] = cur[uz(t)];
      tslot[uz(t)][0] = t;
    }
    for (int s = 1; s <= total; ++s) {
      const std::vector<RVec>& next = cols[uz((kstar + s) % m)];
      std::vector<RVec> ext(uz(q));
      for (int t = 0; t < q; ++t) ext[uz(t)] = cur[uz(t)] * 2.0 - prev[uz(t)];
      const Assignment a = checked_assignment(ext, cur, prev, next, scale);
      prev = cur;
      for (int t = 0; t < q; ++t) {
        cur[uz(t)] = next[uz(a.perm[uz(t)])];
        tvals[uz(t)][uz(s)] = cur[uz(t)];
        tslot[uz(t)][uz(s)] = a.perm[uz(t)];
      }
    }
  }

  // Re-anchor the tracked threads at column zero: path j is the thread
  // occupying slot j there, and the wrap permutation tells how paths continue
  // into the next revolution of the cover.
  std::vector<int> thread_of(uz(q), -1);
  for (int t = 0; t < q; ++t) thread_of[uz(tslot[uz(t)][uz(s0)])] = t;
  auto path_value = [&](int j, int k) -> const RVec& { return tvals[uz(thread_of[uz(j)])][uz(s0 + k)]; };
  auto path_slot = [&](int j, int k) -> int { return tslot[uz(thread_of[uz(j)])][uz(s0 + k)]; };
  std::vector<int> wrap(uz(q));
  for (int j = 0; j < q; ++j) wrap[uz(j)] = path_slot(j, m);

  // The interface carrier is the path parked on the augmented zero through
  // the whole lower region; its wrap orbit is the chain.
  int carrier = -1;
  for (int j = 0; j < q && carrier < 0; ++j) {
    bool parked = true;
    for (int k = m2 + 1; k < m && parked; ++k) parked = path_slot(j, k) == q - 1;
    if (parked) carrier = j;
  }
  if (carrier < 0) throw std::runtime_error("trace decomposition failed to close");

  std::vector<int> chain;
  std::vector<bool> seen(uz(q), false);
  {
    int u = wrap[uz(carrier)];
    while (true) {
      if (static_cast<int>(chain.size()) > q) throw std::runtime_error("trace decomposition failed to close");
      chain.push_back(u);
      seen[uz(u)] = true;
      if (u == carrier) break;
      u = wrap[uz(u)];
    }
  }
  const int q0 = static_cast<int>(chain.size());

  TraceDecomposition out;
  out.angles = m;
  out.dim = n;
  out.half.q0 = q0;
  out.half.zeta.assign(uz((2 * q0 - 1) * m2 + 1), RVec{});
  for (int t = 0; t < q0; ++t) {
    const int j = chain[uz(t)];
    const int last = (t + 1 < q0) ? m : m2;  // the carrier's lower arc is the interface itself
    for (int k = 0; k <= last; ++k) out.half.zeta[uz(2 * t * m2 + k)] = path_value(j, k);
  }

  // Remaining paths close into cycles; unwind each to its covering circle,
  // starting from its lexicographically smallest start value.
  std::vector<FullBlock> blocks;
  for (int j0 = 0; j0 < q; ++j0) {
    if (seen[uz(j0)]) continue;
    std::vector<int> cyc;
    int v = j0;
    do {
      cyc.push_back(v);
      seen[uz(v)] = true;
      v = wrap[uz(v)];
      if (static_cast<int>(cyc.size()) > q) throw std::runtime_error("trace decomposition failed to close");
    } while (v != j0);
    const int w = static_cast<int>(cyc.size());
    FullBlock b;
    b.winding = w;
    b.zeta.assign(uz(w * m), RVec{});
    for (int rev = 0; rev < w; ++rev)
      for (int k = 0; k < m; ++k) b.zeta[uz(rev * m + k)] = path_value(cyc[uz(rev)], k);
    int best_rev = 0;
    for (int rev = 1; rev < w; ++rev)
      if (lex_less(b.zeta[uz(rev * g.angles)], b.zeta[uz(best_rev * g.angles)])) best_rev = rev;
    if (best_rev != 0)
      std::rotate(b.zeta.begin(), b.zeta.begin() + static_cast<std::ptrdiff_t>(best_rev * g.angles), b.zeta.end());
    blocks.push_back(std::move(b));
  }

  // Group blocks that coincide up to a whole-turn shift of the cover.
  const double group_tol = kGroupRel * scale;
  for (auto& b : blocks) {
    bool merged = false;
    for (auto& rep : out.blocks) {
      if (rep.winding != b.winding) continue;
      const std::size_t len = rep.zeta.size();
      for (int s = 0; s < rep.winding && !merged; ++s) {
        double dmax = 0;
        for (std::size_t mm = 0; mm < len && dmax <= group_tol; ++mm)
          dmax = std::max(dmax, dist(rep.zeta[mm], b.zeta[(mm + uz(s * g.angles)) % len]));
        if (dmax <= group_tol) merged = true;
      }
      if (merged) {
        ++rep.multiplicity;
        break;
      }
    }
    if (!merged) out.blocks.push_back(std::move(b));
  }
  std::sort(out.blocks.begin(), out.blocks.end(), [](const FullBlock& a, const FullBlock& b) {
    if (a.winding != b.winding) return a.winding < b.winding;
    return lex_less(a.zeta.front(), b.zeta.front());
  });
  return out;
}

TraceLoop loop_from_decomposition(const TraceDecomposition& d) {
  const int m = d.angles;
  const int m2 = m / 2;
  TraceLoop g;
  g.angles = m;
  g.upper.resize(uz(m2 + 1));
  g.lower.resize(uz(m2 + 1));
  g.phi_plus = d.half.zeta.front();
  g.phi_minus = d.half.zeta.back();
  for (int k = 0; k <= m2; ++k) {
    MultiPoint up, lo;
    for (int t = 0; t < d.half.q0; ++t) up.add(d.half.zeta[uz(2 * t * m2 + k)]);
    for (int t = 0; t + 1 < d.half.q0; ++t) lo.add(d.half.zeta[uz((2 * t + 1) * m2 + k)]);
    for (const auto& b : d.blocks) {
      const std::size_t len = b.zeta.size();
      for (int rev = 0; rev < b.winding; ++rev) {
        const RVec& vu = b.zeta[uz(rev * m + k) % len];
        const RVec& vl = b.zeta[uz(rev * m + m2 + k) % len];
        for (int c = 0; c < b.multiplicity; ++c) {
          up.add(vu);
          lo.add(vl);
        }
      }
    }
    g.upper[uz(k)] = std::move(up);
    g.lower[uz(k)] = std::move(lo);
  }
  return g;
}

double loop_energy(const TraceLoop& g) {
  const double dt = 2 * DiskMesh::kPi / g.angles;
  double e = 0;
  for (std::size_t k = 0; k + 1 < g.upper.size(); ++k) e += distance_sq(g.upper[k], g.upper[k + 1]) / dt;
  if (g.q_upper() >= 2)
    for (std::size_t k = 0; k + 1 < g.lower.size(); ++k) e += distance_sq(g.lower[k], g.lower[k + 1]) / dt;
  return e;
}

double loop_height(const TraceLoop& g) {
  const double dt = 2 * DiskMesh::kPi / g.angles;
  double h = 0;
  for (std::size_t k = 0; k < g.upper.size(); ++k) {
    const double w = (k == 0 || k + 1 == g.upper.size()) ? 0.5 : 1.0;
    h += w * weighted_sq(g.upper[k]) * dt;
    h += w * weighted_sq(g.lower[k]) * dt;
  }
  return h;
}

double loop_l2_distance(const TraceLoop& a, const TraceLoop& b) {
  if (a.angles != b.angles) throw std::invalid_argument("trace sample count mismatch");
  const double dt = 2 * DiskMesh::kPi / a.angles;
  double s = 0;
  for (std::size_t k = 0; k < a.upper.size(); ++k) {
    const double w = (k == 0 || k + 1 == a.upper.size()) ? 0.5 : 1.0;
    s += w * distance_sq(a.upper[k], b.upper[k]) * dt;
    s += w * distance_sq(a.lower[k], b.lower[k]) * dt;
  }
  return std::sqrt(s);
}

TraceLoop sample_loop(const InterfaceMap& f, int ring) {
  const DiskMesh& mesh = f.mesh();
  const int m2 = mesh.angles() / 2;
  TraceLoop g;
  g.angles = mesh.angles();
  g.upper.reserve(uz(m2 + 1));
  g.lower.reserve(uz(m2 + 1));
  for (int k = 0; k <= m2; ++k) g.upper.push_back(f.up(ring, k));
  for (int k = 0; k <= m2; ++k) g.lower.push_back(f.lo(ring, m2 + k));
  g.phi_plus = f.phi(ring, 0);
  g.phi_minus = f.phi(ring, m2);
  return g;
}

double ChartGrid::chart_radius(double disk_r) const {
  const double p = half ? 2.0 / (2.0 * winding - 1.0) : 1.0 / winding;
  return std::pow(disk_r, p);
}

double ChartGrid::chart_angle(int m) const {
  const double span = half ? static_cast<double>(row_len() - 1) : static_cast<double>(row_len());
  return 2 * DiskMesh::kPi * static_cast<double>(m) / span;
}

ChartGrid make_chart(const DiskMesh& mesh, bool half, int winding, int n,
                     const std::function<RVec(double rho, double phi)>& fn) {
  ChartGrid c;
  c.half = half;
  c.winding = winding;
  c.rings = mesh.rings();
  c.angles = mesh.angles();
  c.n = n;
  c.values.assign(uz(mesh.rings() + 1) * uz(c.row_len()), RVec{});
  for (int i = 0; i <= mesh.rings(); ++i) {
    const double rho = c.chart_radius(mesh.r(i));
    for (int m = 0; m < c.row_len(); ++m) c.at(i, m) = fn(rho, c.chart_angle(m));
  }
  return c;
}

InterfaceMap assemble_blocks(const DiskMesh& mesh, int n,
                             const std::vector<std::pair<const ChartGrid*, int>>& blocks) {
  int q = 0;
  const ChartGrid* half = nullptr;
  for (const auto& [chart, mult] : blocks) {
    if (chart->angles != mesh.angles() || chart->rings != mesh.rings())
      throw std::invalid_argument("chart grid does not match the mesh");
    if (chart->half) {
      if (half != nullptr || mult != 1) throw std::invalid_argument("exactly one half chart is required");
      half = chart;
      q += chart->winding;
    } else {
      q += mult * chart->winding;
    }
  }
  if (half == nullptr) throw std::invalid_argument("exactly one half chart is required");

  const int m = mesh.angles();
  const int m2 = m / 2;
  InterfaceMap f(mesh, q, n);
  for (int i = 0; i <= mesh.rings(); ++i) {
    f.phi(i, 0) = half->at(i, 0);
    f.phi(i, m2) = half->at(i, half->row_len() - 1);
    for (int k = 0; k < m; ++k) {
      const bool up_region = mesh.upper_col(k);
      const bool lo_region = mesh.lower_col(k);
      const int kk = (k >= m2) ? k : k + m;  // lower-region parameter in [m/2, m]
      MultiPoint up, lo;
      const int q0 = half->winding;
      if (up_region)
        for (int j = 0; j < q0; ++j) up.add(half->at(i, j * m + k));
      if (lo_region)
        for (int j = 0; j + 1 < q0; ++j) lo.add(half->at(i, j * m + kk));
      for (const auto& [chart, mult] : blocks) {
        if (chart->half) continue;
        const std::size_t len = uz(chart->row_len());
        for (int rev = 0; rev < chart->winding; ++rev) {
          if (up_region) {
            const int s = static_cast<int>(uz(rev * m + k) % len);
            for (int c = 0; c < mult; ++c) up.add(chart->at(i, s));
          }
          if (lo_region) {
            const int s = static_cast<int>(uz(rev * m + kk) % len);
            for (int c = 0; c < mult; ++c) lo.add(chart->at(i, s));
          }
        }
      }
      if (up_region) f.up(i, k) = std::move(up);
      if (lo_region) f.lo(i, k) = std::move(lo);
    }
  }
  return f;
}

}  // namespace aq
