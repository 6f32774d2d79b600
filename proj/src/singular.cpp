#include "aqlab/singular.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "aqlab/catalog.hpp"
#include "aqlab/frequency.hpp"
#include "aqlab/mesh.hpp"
#include "aqlab/multipoint.hpp"
#include "aqlab/trace.hpp"

namespace aq {
namespace {

// A merged family keeps its circle mean within this fraction of its amplitude
// (the mean over a full cycle is the center value of the harmonic extension of
// its unrolled chart function, which vanishes whenever the cycle collapses at
// the center); larger means mark sheets parked away from the center.
constexpr double kCenterRel = 0.05;
// Flagged nodes within this many rings and (circular) columns join a cluster.
constexpr int kClusterReach = 2;
// Clusters whose centroids sit inside this many core radii belong to the
// origin analysis rather than to the node scan.
constexpr double kCoreFactor = 8.0;
// Parked sheets must clear the tangent tube by this factor.
constexpr double kSepFactor = 4.0;
// Cycles whose fitted homogeneity exceeds the minimum by more than this are
// higher-order corrections, not part of the leading tangent.
constexpr double kOrderSlack = 0.25;
// Outer cap of separation ladders and frequency circles, before gap limits.
constexpr double kLadderCap = 0.35;
constexpr int kLadderRows = 24;
// Headroom on the core-shadow budget: the free inner mesh edge reflects the
// leading mode with relative size (core/sigma)^(2 alpha) times a scheme
// constant close to one (measured ~1.44 on geometric meshes); a factor of two
// covers it without touching radii where the shadow has decayed.
constexpr double kShadowHeadroom = 2.0;

std::size_t uz(int i) { return static_cast<std::size_t>(i); }

int wrap(int k, int m) { return ((k % m) + m) % m; }

int circ_gap(int a, int b, int m) {
  const int d = std::abs(a - b);
  return std::min(d, m - d);
}

// Each column is owned by exactly one of the two half-plane regions; the
// interface columns count with the upper values, which contain the lower ones
// plus the interface sheet, so no merge among lower sheets is lost.
bool upper_owned(int k, int m) { return k <= m / 2; }

bool same_region(int k1, int k2, int m) { return upper_owned(k1, m) == upper_owned(k2, m); }

const MultiPoint& owned(const InterfaceMap& f, int i, int k) {
  return upper_owned(k, f.mesh().angles()) ? f.up(i, k) : f.lo(i, k);
}

// Number of groups of values under single-linkage welding at distance tau.
int group_count(const std::vector<RVec>& v, double tau) {
  const int n = static_cast<int>(v.size());
  std::vector<int> root(uz(n));
  std::iota(root.begin(), root.end(), 0);
  std::function<int(int)> find = [&root, &find](int a) {
    return root[uz(a)] == a ? a : root[uz(a)] = find(root[uz(a)]);
  };
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (dist(v[uz(a)], v[uz(b)]) <= tau) root[uz(find(a))] = find(b);
  int c = 0;
  for (int a = 0; a < n; ++a)
    if (find(a) == a) ++c;
  return c;
}

// Local modulus of continuity: largest matching distance to a same-region
// neighbor. Sheets closer than the local variation cannot be resolved apart.
double local_modulus(const InterfaceMap& f, int i, int k) {
  const DiskMesh& mesh = f.mesh();
  const int m = mesh.angles();
  const MultiPoint& c = owned(f, i, k);
  double h = 0;
  const auto probe = [&](int ii, int kk) {
    if (ii < 0 || ii > mesh.rings()) return;
    kk = wrap(kk, m);
    if (!same_region(k, kk, m)) return;
    h = std::max(h, distance(c, owned(f, ii, kk)));
  };
  probe(i - 1, k);
  probe(i + 1, k);
  probe(i, k - 1);
  probe(i, k + 1);
  return h;
}

struct FlagGrid {
  std::vector<char> flagged;
  int count = 0;
};

// Marks nodes whose support cardinality drops below the generic count of the
// surrounding five-ring annulus of the same region.
FlagGrid scan_support(const InterfaceMap& f, double tol) {
  const DiskMesh& mesh = f.mesh();
  const int n = mesh.rings(), m = mesh.angles();
  const double floor_abs = tol * f.value_scale();
  std::vector<int> cnt(uz((n + 1) * m), 1);
  for (int i = 0; i <= n; ++i)
    for (int k = 0; k < m; ++k) {
      const std::vector<RVec> values = owned(f, i, k).expanded();
      if (values.size() <= 1) {
        cnt[uz(mesh.node(i, k))] = static_cast<int>(values.size());
        continue;
      }
      const double tau = floor_abs + local_modulus(f, i, k);
      cnt[uz(mesh.node(i, k))] = group_count(values, tau);
    }
  std::vector<int> up_max(uz(n + 1), 0), lo_max(uz(n + 1), 0);
  for (int i = 0; i <= n; ++i)
    for (int k = 0; k < m; ++k) {
      int& mx = upper_owned(k, m) ? up_max[uz(i)] : lo_max[uz(i)];
      mx = std::max(mx, cnt[uz(mesh.node(i, k))]);
    }
  const auto patch_max = [&](const std::vector<int>& rm, int i) {
    int v = 0;
    for (int j = std::max(0, i - 2); j <= std::min(n, i + 2); ++j) v = std::max(v, rm[uz(j)]);
    return v;
  };
  FlagGrid g;
  g.flagged.assign(uz((n + 1) * m), 0);
  for (int i = 0; i <= n; ++i)
    for (int k = 0; k < m; ++k) {
      const int generic = patch_max(upper_owned(k, m) ? up_max : lo_max, i);
      if (cnt[uz(mesh.node(i, k))] < generic) {
        g.flagged[uz(mesh.node(i, k))] = 1;
        ++g.count;
      }
    }
  return g;
}

struct Cluster {
  double x = 0, y = 0;
  bool boundary = false;
  int span_cols = 0;
  int node_i = 0, node_k = 0;  // flagged node closest to the centroid
};

std::vector<Cluster> cluster_flags(const InterfaceMap& f, const FlagGrid& g) {
  const DiskMesh& mesh = f.mesh();
  const int n = mesh.rings(), m = mesh.angles();
  std::vector<std::pair<int, int>> nodes;
  for (int i = 0; i <= n; ++i)
    for (int k = 0; k < m; ++k)
      if (g.flagged[uz(mesh.node(i, k))]) nodes.emplace_back(i, k);
  const int fcount = static_cast<int>(nodes.size());
  std::vector<int> root(uz(fcount));
  std::iota(root.begin(), root.end(), 0);
  std::function<int(int)> find = [&root, &find](int a) {
    return root[uz(a)] == a ? a : root[uz(a)] = find(root[uz(a)]);
  };
  for (int a = 0; a < fcount; ++a)
    for (int b = a + 1; b < fcount; ++b) {
      if (std::abs(nodes[uz(a)].first - nodes[uz(b)].first) > kClusterReach) continue;
      if (circ_gap(nodes[uz(a)].second, nodes[uz(b)].second, m) > kClusterReach) continue;
      root[uz(find(a))] = find(b);
    }
  std::vector<std::vector<int>> groups(uz(fcount));
  for (int a = 0; a < fcount; ++a) groups[uz(find(a))].push_back(a);
  std::vector<Cluster> clusters;
  for (const std::vector<int>& members : groups) {
    if (members.empty()) continue;
    Cluster c;
    std::vector<char> col_seen(uz(m), 0);
    for (int a : members) {
      const auto [i, k] = nodes[uz(a)];
      c.x += mesh.r(i) * std::cos(mesh.theta(k));
      c.y += mesh.r(i) * std::sin(mesh.theta(k));
      c.boundary = c.boundary || mesh.interface_col(k);
      col_seen[uz(k)] = 1;
    }
    c.x /= static_cast<double>(members.size());
    c.y /= static_cast<double>(members.size());
    if (c.boundary) c.y = 0;
    for (int k = 0; k < m; ++k) c.span_cols += col_seen[uz(k)];
    double best = std::numeric_limits<double>::infinity();
    for (int a : members) {
      const auto [i, k] = nodes[uz(a)];
      const double dx = mesh.r(i) * std::cos(mesh.theta(k)) - c.x;
      const double dy = mesh.r(i) * std::sin(mesh.theta(k)) - c.y;
      if (dx * dx + dy * dy < best) {
        best = dx * dx + dy * dy;
        c.node_i = i;
        c.node_k = k;
      }
    }
    clusters.push_back(c);
  }
  return clusters;
}

// --- origin analysis -------------------------------------------------------

RVec cycle_mean(const std::vector<RVec>& z, int dim) {
  RVec s(dim);
  for (const RVec& v : z) s += v;
  if (!z.empty()) s *= 1.0 / static_cast<double>(z.size());
  return s;
}

double cycle_amp(const std::vector<RVec>& z) {
  double a = 0;
  for (const RVec& v : z) a = std::max(a, v.norm());
  return a;
}

bool collapsing_cycle(const FullBlock& b, double floor_abs, int dim) {
  return cycle_mean(b.zeta, dim).norm() <= floor_abs + kCenterRel * cycle_amp(b.zeta);
}

// A single-valued cycle equal to the half chain on the upper arc is the
// analytic continuation of the half sheet: identical copies of one smooth
// sheet merge everywhere and stay regular.
bool matches_chain(const FullBlock& b, const HalfBlock& half, double tol_abs) {
  if (b.winding != 1 || half.q0 != 1) return false;
  for (std::size_t s = 0; s < half.zeta.size(); ++s)
    if (dist(b.zeta[s], half.zeta[s]) > tol_abs) return false;
  return true;
}

int probe_ring(const DiskMesh& mesh) {
  const double target = 4.0 * mesh.r_min();
  int i = 0;
  while (i < mesh.rings() && mesh.r(i) < target) ++i;
  return std::min(i, std::max(1, mesh.rings() / 2));
}

struct OriginProbe {
  bool ok = false;
  bool singular = false;
};

// The origin is not a mesh node; its status comes from the decomposition of a
// probe-ring trace. It is a singular point when the interface chain branches
// (q0 >= 2), some collapsing cycle winds more than once, or two genuinely
// distinct families collapse onto each other at the center.
OriginProbe probe_origin(const InterfaceMap& f, double tol) {
  const DiskMesh& mesh = f.mesh();
  TraceDecomposition dec;
  try {
    dec = decompose_trace(sample_loop(f, probe_ring(mesh)));
  } catch (const std::exception&) {
    return {};
  }
  const double floor_abs = tol * f.value_scale();
  if (dec.half.q0 >= 2) return {true, true};
  const bool chain_zero = cycle_amp(dec.half.zeta) <= floor_abs;
  int families = 1;
  for (const FullBlock& b : dec.blocks) {
    if (!collapsing_cycle(b, floor_abs, dec.dim)) continue;
    if (b.winding >= 2) return {true, true};
    if (cycle_amp(b.zeta) <= floor_abs) continue;
    if (!chain_zero && matches_chain(b, dec.half, floor_abs)) continue;
    ++families;
  }
  return {true, families >= 2};
}

// --- per-point diagnostics ---------------------------------------------------

// Common value of the two sheets meeting at the representative node, together
// with the largest modulus seen there.
RVec crossing_value(const InterfaceMap& f, int i, int k, double* amp_out) {
  const std::vector<RVec> values = owned(f, i, k).expanded();
  double amp = 0;
  for (const RVec& v : values) amp = std::max(amp, v.norm());
  if (amp_out != nullptr) *amp_out = amp;
  if (values.size() < 2) return values.empty() ? RVec(f.dim()) : values.front();
  double best = std::numeric_limits<double>::infinity();
  RVec v0(f.dim());
  for (std::size_t a = 0; a < values.size(); ++a)
    for (std::size_t b = a + 1; b < values.size(); ++b)
      if (dist_sq(values[a], values[b]) < best) {
        best = dist_sq(values[a], values[b]);
        v0 = 0.5 * (values[a] + values[b]);
      }
  return v0;
}

// Growth exponent of the gap between the two sheets meeting at an interior
// point, fitted over an annulus of nearby nodes of the same region.
double crossing_frequency(const InterfaceMap& f, double px, double py, const RVec& v0) {
  const DiskMesh& mesh = f.mesh();
  const int n = mesh.rings(), m = mesh.angles();
  const double rp = std::hypot(px, py);
  int ip = 0;
  while (ip < n && mesh.r(ip) < rp) ++ip;
  const double dr = (ip >= 1) ? mesh.r(ip) - mesh.r(ip - 1) : mesh.r(1) - mesh.r(0);
  const double cell = std::max(dr, rp * mesh.dtheta());
  const bool up_side = py >= 0;
  std::vector<double> ds, gs;
  for (int i = 0; i <= n; ++i) {
    if (std::abs(mesh.r(i) - rp) > 7.0 * cell) continue;
    for (int k = 0; k < m; ++k) {
      if (upper_owned(k, m) != up_side) continue;
      const double d = std::hypot(mesh.r(i) * std::cos(mesh.theta(k)) - px,
                                  mesh.r(i) * std::sin(mesh.theta(k)) - py);
      if (d < 1.2 * cell || d > 6.0 * cell) continue;
      std::vector<RVec> values = owned(f, i, k).expanded();
      if (values.size() < 2) continue;
      std::nth_element(values.begin(), values.begin() + 1, values.end(),
                       [&v0](const RVec& a, const RVec& b) {
                         return dist_sq(a, v0) < dist_sq(b, v0);
                       });
      const double g = dist(values[0], values[1]);
      if (g > 0) {
        ds.push_back(d);
        gs.push_back(g);
      }
    }
  }
  if (ds.size() < 6) return 0;
  return fit_exponent(ds, gs);
}

// --- separation radius -------------------------------------------------------

TraceLoop scale_loop(TraceLoop g, double s) {
  for (MultiPoint& t : g.upper) t = t.scaled(s);
  for (MultiPoint& t : g.lower) t = t.scaled(s);
  g.phi_plus *= s;
  g.phi_minus *= s;
  return g;
}

struct SplitCycles {
  std::vector<FullBlock> collapsing, parked;
};

SplitCycles split_cycles(const TraceDecomposition& dec, double floor_abs) {
  SplitCycles s;
  for (const FullBlock& b : dec.blocks)
    (collapsing_cycle(b, floor_abs, dec.dim) ? s.collapsing : s.parked).push_back(b);
  return s;
}

bool cycle_order_less(const FullBlock& a, const FullBlock& b) {
  if (a.winding != b.winding) return a.winding < b.winding;
  if (a.multiplicity != b.multiplicity) return a.multiplicity < b.multiplicity;
  return cycle_amp(a.zeta) > cycle_amp(b.zeta);
}

double fitted_order(double amp1, double amp2, double r1, double r2) {
  if (!(amp1 > 0) || !(amp2 > 0)) return std::numeric_limits<double>::infinity();
  return std::log(amp2 / amp1) / std::log(r2 / r1);
}

// Growth exponent of the squared circle quadrature along a ladder; the
// frequency fallback when the local structure does not classify.
double height_slope(const std::vector<std::pair<double, TraceLoop>>& rows) {
  std::vector<double> rs, hs;
  for (const auto& [r, loop] : rows) {
    const double h = loop_height(loop);
    if (h > 0) {
      rs.push_back(r);
      hs.push_back(h);
    }
  }
  if (rs.size() < 4) return 0;
  return std::max(0.0, 0.5 * fit_exponent(rs, hs));
}

struct LadderVerdict {
  double r0 = 0;          // largest verified separation radius
  bool classified = false;
  double alpha = 0;       // homogeneity of the classified tangent
};

// Verifies, from the bottom of the ladder upward, that the collapsing part of
// the map stays inside the admissible tube around its classified homogeneous
// tangent while every parked sheet clears the tube by kSepFactor. The tangent
// amplitude is anchored at the outermost row, where a truncated-core solve is
// most faithful, and the tube carries an explicit core-shadow budget
// (core/sigma)^(2 alpha): a free inner mesh edge reflects the leading mode
// with exactly that relative magnitude.
LadderVerdict separation_ladder(const InterfaceMap& f,
                                const std::vector<std::pair<double, TraceLoop>>& rows,
                                double core, double tol) {
  if (rows.size() < 4) return {};
  const double floor_abs = tol * f.value_scale();
  struct LadderRow {
    double r = 0;
    TraceDecomposition dec;
  };
  std::vector<LadderRow> lad;
  lad.reserve(rows.size());
  for (const auto& [r, loop] : rows) {
    LadderRow row;
    row.r = r;
    try {
      row.dec = decompose_trace(loop);
    } catch (const std::exception&) {
      return {};
    }
    lad.push_back(std::move(row));
  }
  const TraceDecomposition& d0 = lad.front().dec;
  const int dim = d0.dim, angles = d0.angles;
  SplitCycles s0 = split_cycles(d0, floor_abs);
  const LadderRow& mid = lad[lad.size() / 2];
  SplitCycles sm = split_cycles(mid.dec, floor_abs);
  if (mid.dec.half.q0 != d0.half.q0) return {};
  if (sm.collapsing.size() != s0.collapsing.size()) return {};
  std::stable_sort(s0.collapsing.begin(), s0.collapsing.end(), cycle_order_less);
  std::stable_sort(sm.collapsing.begin(), sm.collapsing.end(), cycle_order_less);
  for (std::size_t j = 0; j < s0.collapsing.size(); ++j)
    if (s0.collapsing[j].winding != sm.collapsing[j].winding ||
        s0.collapsing[j].multiplicity != sm.collapsing[j].multiplicity)
      return {};

  // Leading homogeneity across the ladder separates the tangent from
  // higher-order corrections.
  const double chain_amp = cycle_amp(d0.half.zeta);
  const bool chain_zero = chain_amp <= floor_abs;
  const double chain_order =
      chain_zero ? std::numeric_limits<double>::infinity()
                 : fitted_order(chain_amp, cycle_amp(mid.dec.half.zeta), lad.front().r, mid.r);
  double order_min = chain_zero ? std::numeric_limits<double>::infinity() : chain_order;
  std::vector<double> cyc_order(s0.collapsing.size());
  for (std::size_t j = 0; j < s0.collapsing.size(); ++j) {
    cyc_order[j] = fitted_order(cycle_amp(s0.collapsing[j].zeta),
                                cycle_amp(sm.collapsing[j].zeta), lad.front().r, mid.r);
    order_min = std::min(order_min, cyc_order[j]);
  }
  if (!std::isfinite(order_min)) return {};
  const bool chain_dominant = chain_zero || chain_order <= order_min + kOrderSlack;

  TraceDecomposition input;
  input.angles = angles;
  input.dim = dim;
  input.half = d0.half;
  if (!chain_zero && !chain_dominant) input.half.zeta.assign(d0.half.zeta.size(), RVec(dim));
  int extra_zero_sheets = 0;
  for (std::size_t j = 0; j < s0.collapsing.size(); ++j) {
    if (cyc_order[j] <= order_min + kOrderSlack) {
      input.blocks.push_back(s0.collapsing[j]);
    } else if (!chain_zero && chain_dominant) {
      return {};  // higher-order cycles over a live chain have no padded template
    } else {
      extra_zero_sheets += s0.collapsing[j].winding * s0.collapsing[j].multiplicity;
    }
  }
  TraceLoop input_loop = loop_from_decomposition(input);
  const double a_in = input_loop.max_abs();
  if (a_in <= floor_abs) return {};
  Classification cls = classify_tangent(scale_loop(input_loop, 1.0 / a_in));
  if (!cls.classified) return {};
  HomogeneousMap model = cls.map;
  if (extra_zero_sheets > 0) {
    if (model.tag != CatalogCase::kBranched) return {};
    model.k0 += extra_zero_sheets;
  }
  const TraceLoop unit = sample_trace(model, angles);
  const double unit_amp = unit.max_abs();
  LadderVerdict verdict;
  verdict.classified = true;
  verdict.alpha = cls.map.alpha.value();
  const double alpha = verdict.alpha;
  const double eps = 1.0 / (8.0 * std::sqrt(static_cast<double>(f.q_upper())) + 17.0);

  struct RowData {
    double r = 0;
    TraceLoop stripped;
    std::vector<FullBlock> parked;
  };
  std::vector<RowData> data;
  for (const LadderRow& row : lad) {
    if (row.dec.half.q0 != d0.half.q0) break;
    SplitCycles s = split_cycles(row.dec, floor_abs);
    TraceDecomposition strip;
    strip.angles = angles;
    strip.dim = dim;
    strip.half = row.dec.half;
    strip.blocks = s.collapsing;
    RowData rd;
    rd.r = row.r;
    rd.stripped = loop_from_decomposition(strip);
    if (rd.stripped.q_upper() != unit.q_upper()) break;
    rd.parked = std::move(s.parked);
    data.push_back(std::move(rd));
  }
  if (data.empty()) return verdict;
  const double amp_anchor = data.back().stripped.max_abs();
  if (!(amp_anchor > floor_abs)) return verdict;
  const double coeff = amp_anchor / std::pow(data.back().r, alpha);

  for (const RowData& rd : data) {
    const double lam = coeff * std::pow(rd.r, alpha);
    const double tube = eps * lam * unit_amp;
    const double shadow =
        kShadowHeadroom * lam * unit_amp * std::pow(core / rd.r, 2.0 * alpha);
    const TraceLoop model_loop = scale_loop(unit, lam);
    double dev = 0;
    for (std::size_t k = 0; k < rd.stripped.upper.size(); ++k)
      dev = std::max(dev, distance(rd.stripped.upper[k], model_loop.upper[k]));
    for (std::size_t k = 0; k < rd.stripped.lower.size(); ++k)
      dev = std::max(dev, distance(rd.stripped.lower[k], model_loop.lower[k]));
    if (dev > tube + shadow) break;
    bool clear = true;
    for (const FullBlock& b : rd.parked) {
      for (std::size_t si = 0; si < b.zeta.size() && clear; ++si) {
        const int col = static_cast<int>(si) % angles;
        const MultiPoint& target = (col <= angles / 2) ? model_loop.upper[uz(col)]
                                                       : model_loop.lower[uz(col - angles / 2)];
        if (support_distance(target, b.zeta[si]) < kSepFactor * tube) clear = false;
      }
      if (!clear) break;
    }
    if (!clear) break;
    verdict.r0 = rd.r;
  }
  return verdict;
}

std::vector<std::pair<double, TraceLoop>> origin_rows(const InterfaceMap& f, double cap) {
  const DiskMesh& mesh = f.mesh();
  const double lo = 4.0 * mesh.r_min();
  std::vector<int> idx;
  for (int i = 0; i <= mesh.rings(); ++i)
    if (mesh.r(i) >= lo && mesh.r(i) <= cap) idx.push_back(i);
  std::vector<std::pair<double, TraceLoop>> rows;
  if (idx.empty()) return rows;
  const int stride = std::max(1, (static_cast<int>(idx.size()) + kLadderRows - 1) / kLadderRows);
  for (std::size_t j = 0; j < idx.size(); j += uz(stride))
    rows.emplace_back(mesh.r(idx[j]), sample_loop(f, idx[j]));
  return rows;
}

std::vector<std::pair<double, TraceLoop>> circle_rows(const InterfaceMap& f, double x0,
                                                      double cap) {
  const DiskMesh& mesh = f.mesh();
  std::vector<std::pair<double, TraceLoop>> rows;
  const double lo = std::max(4.0 * mesh.r_min(), cap / 64.0);
  if (!(lo < cap)) return rows;
  const int count = 16;
  for (int j = 0; j < count; ++j) {
    const double rho = lo * std::pow(cap / lo, static_cast<double>(j) / (count - 1));
    rows.emplace_back(rho, circle_trace(f, x0, rho, mesh.angles()));
  }
  return rows;
}

}  // namespace

SingularReport detect_singularities(const InterfaceMap& f, double tol) {
  const DiskMesh& mesh = f.mesh();
  const int m = mesh.angles();
  SingularReport rep;

  const FlagGrid flags = scan_support(f, tol);
  rep.flagged_nodes = flags.count;

  const double core = std::max(kCoreFactor * mesh.r_min(), mesh.r(std::min(2, mesh.rings())));
  std::vector<Cluster> kept;
  for (const Cluster& c : cluster_flags(f, flags)) {
    if (c.span_cols >= m / 2) continue;  // resolution-horizon band, not a point
    if (std::hypot(c.x, c.y) <= core) continue;  // inside the origin analysis
    kept.push_back(c);
  }

  struct Point {
    double x = 0, y = 0;
    bool boundary = false;
    bool origin = false;
    int node_i = 0, node_k = 0;
  };
  std::vector<Point> pts;
  for (const Cluster& c : kept) pts.push_back({c.x, c.y, c.boundary, false, c.node_i, c.node_k});
  if (probe_origin(f, tol).singular) pts.push_back({0, 0, true, true, 0, 0});

  const auto nearest_gap = [&pts](std::size_t self) {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (j != self)
        g = std::min(g, std::hypot(pts[j].x - pts[self].x, pts[j].y - pts[self].y));
    return g;
  };

  const double floor_abs = tol * f.value_scale();
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const Point& p = pts[j];
    const double gap = nearest_gap(j);
    rep.min_gap = std::min(rep.min_gap, gap);
    SingularPoint out;
    out.location = RVec{p.x, p.y};
    out.boundary = p.boundary;
    double cap = kLadderCap;
    if (std::isfinite(gap)) cap = std::min(cap, 0.45 * gap);
    if (p.origin) {
      const auto rows = origin_rows(f, cap);
      const LadderVerdict v = separation_ladder(f, rows, mesh.r_min(), tol);
      out.frequency = v.classified ? v.alpha : height_slope(rows);
      out.separation = v.r0;
    } else if (p.boundary) {
      cap = std::min(cap, 0.45 * (1.0 - std::abs(p.x)));
      const auto rows = circle_rows(f, p.x, cap);
      double amp = 0;
      const RVec v0 = crossing_value(f, p.node_i, p.node_k, &amp);
      if (v0.norm() <= floor_abs + kCenterRel * amp) {
        const double cell = std::max(mesh.r_min(), 0.5 * std::abs(p.x) * mesh.dtheta());
        const LadderVerdict v = separation_ladder(f, rows, cell, tol);
        out.frequency = v.classified ? v.alpha : height_slope(rows);
        out.separation = v.r0;
      } else {
        out.frequency = height_slope(rows);
        out.separation = 0;
      }
    } else {
      const RVec v0 = crossing_value(f, p.node_i, p.node_k, nullptr);
      out.frequency = crossing_frequency(f, p.x, p.y, v0);
    }
    (p.boundary ? rep.boundary : rep.interior).push_back(out);
  }

  const auto by_position = [](const SingularPoint& a, const SingularPoint& b) {
    if (a.location[0] != b.location[0]) return a.location[0] < b.location[0];
    return a.location[1] < b.location[1];
  };
  std::sort(rep.interior.begin(), rep.interior.end(), by_position);
  std::sort(rep.boundary.begin(), rep.boundary.end(), by_position);
  return rep;
}

SingularReport detect_singularities(const SolveResult& f, double tol) {
  return detect_singularities(f.map, tol);
}

}  // namespace aq
