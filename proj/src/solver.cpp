#include "aqlab/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aq {
namespace {

std::size_t uz(int i) { return static_cast<std::size_t>(i); }

int row_dim(const std::vector<RVec>& row) {
  for (const auto& v : row)
    if (v.dim() > 0) return v.dim();
  return 1;
}

}  // namespace

double chart_energy(const ChartGrid& c, const DiskMesh& mesh) {
  const int cols = c.row_len();
  const int last = c.half ? cols - 1 : cols;  // angular edge count per ring
  double e = 0;
  for (int i = 0; i <= mesh.rings(); ++i) {
    const double wa = mesh.ring_log(i) / mesh.dtheta();
    for (int m = 0; m < last; ++m) e += wa * dist_sq(c.at(i, m), c.at(i, (m + 1) % cols));
  }
  for (int i = 0; i < mesh.rings(); ++i) {
    const double wr = mesh.radial_weight(i);
    for (int m = 0; m < cols; ++m) {
      const double w = (c.half && (m == 0 || m == cols - 1)) ? 0.5 * wr : wr;
      e += w * dist_sq(c.at(i, m), c.at(i + 1, m));
    }
  }
  return e;
}

BlockSolve solve_chart(const DiskMesh& mesh, bool half, int winding, const std::vector<RVec>& boundary_row) {
  const int rings = mesh.rings();
  const int m = mesh.angles();
  const int cols = half ? (2 * winding - 1) * m / 2 + 1 : winding * m;
  if (static_cast<int>(boundary_row.size()) != cols) throw std::invalid_argument("boundary row size mismatch");
  const int n = row_dim(boundary_row);

  ChartGrid grid;
  grid.half = half;
  grid.winding = winding;
  grid.rings = rings;
  grid.angles = m;
  grid.n = n;
  grid.values.assign(uz(rings + 1) * uz(cols), RVec::zero(n));
  for (int mm = 0; mm < cols; ++mm) grid.at(rings, mm) = boundary_row[uz(mm)];

  // Unknown ids: interior rings, and for half charts the interior columns.
  auto var_id = [&](int i, int mm) -> int {
    if (i == rings) return -1;
    if (half && (mm == 0 || mm == cols - 1)) return -1;
    return half ? i * (cols - 2) + (mm - 1) : i * cols + mm;
  };
  const int nvar = half ? rings * (cols - 2) : rings * cols;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(uz(nvar) * 5);
  std::vector<Eigen::VectorXd> rhs(uz(n), Eigen::VectorXd::Zero(nvar));
  auto add_edge = [&](int ia, int ma, int ib, int mb, double w) {
    const int p = var_id(ia, ma);
    const int q = var_id(ib, mb);
    if (p < 0 && q < 0) return;
    if (p >= 0) trips.emplace_back(p, p, w);
    if (q >= 0) trips.emplace_back(q, q, w);
    if (p >= 0 && q >= 0) {
      trips.emplace_back(p, q, -w);
      trips.emplace_back(q, p, -w);
    } else {
      const int free = p >= 0 ? p : q;
      const RVec& fixed = p >= 0 ? grid.at(ib, mb) : grid.at(ia, ma);
      for (int c = 0; c < n; ++c) rhs[uz(c)](free) += w * fixed[c];
    }
  };

  const int last = half ? cols - 1 : cols;
  for (int i = 0; i < rings; ++i) {  // ring `rings` is fully fixed
    const double wa = mesh.ring_log(i) / mesh.dtheta();
    for (int mm = 0; mm < last; ++mm) add_edge(i, mm, i, (mm + 1) % cols, wa);
  }
  for (int i = 0; i < rings; ++i) {
    const double wr = mesh.radial_weight(i);
    for (int mm = 0; mm < cols; ++mm) {
      const double w = (half && (mm == 0 || mm == cols - 1)) ? 0.5 * wr : wr;
      add_edge(i, mm, i + 1, mm, w);
    }
  }

  Eigen::SparseMatrix<double> a(nvar, nvar);
  a.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("chart factorization failed");

  double scale = 1.0;
  for (const auto& v : boundary_row) scale = std::max(scale, v.max_abs());
  double residual = 0;
  for (int c = 0; c < n; ++c) {
    Eigen::VectorXd x = ldlt.solve(rhs[uz(c)]);
    x += ldlt.solve(rhs[uz(c)] - a * x);  // one refinement pass
    const Eigen::VectorXd r = rhs[uz(c)] - a * x;
    for (int p = 0; p < nvar; ++p) residual = std::max(residual, std::abs(r(p)) / (a.coeff(p, p) * scale));
    for (int i = 0; i < rings; ++i)
      for (int mm = 0; mm < cols; ++mm) {
        const int p = var_id(i, mm);
        if (p >= 0) grid.at(i, mm)[c] = x(p);
      }
  }

  BlockSolve out;
  out.chart = std::move(grid);
  out.energy = chart_energy(out.chart, mesh);
  out.residual = residual;
  if (residual > 1e-10) throw std::runtime_error("solver residual too large");
  return out;
}

SolveResult solve_branched(const TraceLoop& boundary, const DiskMesh& mesh) {
  validate(boundary);
  if (boundary.angles != mesh.angles()) throw std::invalid_argument("trace sample count mismatch");
  const double scale = std::max(1.0, boundary.max_abs());
  if (boundary.phi_plus.norm() > 1e-8 * scale || boundary.phi_minus.norm() > 1e-8 * scale ||
      boundary.junction_defect() > 1e-8 * scale)
    throw std::invalid_argument("solver requires reduced interface data");

  const TraceDecomposition d = decompose_trace(boundary);
  SolveResult out;
  {
    // Pin the slit samples exactly; they are within tolerance of zero.
    std::vector<RVec> row = d.half.zeta;
    row.front() = RVec::zero(d.dim);
    row.back() = RVec::zero(d.dim);
    BlockSolve hb = solve_chart(mesh, true, d.half.q0, row);
    hb.multiplicity = 1;
    out.blocks.push_back(std::move(hb));
  }
  for (const auto& b : d.blocks) {
    BlockSolve fb = solve_chart(mesh, false, b.winding, b.zeta);
    fb.multiplicity = b.multiplicity;
    out.blocks.push_back(std::move(fb));
  }

  std::vector<std::pair<const ChartGrid*, int>> parts;
  parts.reserve(out.blocks.size());
  for (const auto& b : out.blocks) parts.emplace_back(&b.chart, b.multiplicity);
  out.map = assemble_blocks(mesh, d.dim, parts);

  out.energy = 0;
  out.stencil_residual = 0;
  for (const auto& b : out.blocks) {
    out.energy += b.multiplicity * b.energy;
    out.stencil_residual = std::max(out.stencil_residual, b.residual);
  }
  EnergyBreakdown e = assemble_energy(out.map);
  out.annulus = std::move(e.annulus);
  out.ring_tangential = std::move(e.ring_tangential);
  return out;
}

InterpolantResult annulus_interpolate(const TraceLoop& outer_trace, const TraceLoop& inner_trace,
                                      const DiskMesh& mesh, int outer, int span) {
  validate(outer_trace);
  validate(inner_trace);
  if (outer_trace.angles != mesh.angles() || inner_trace.angles != mesh.angles())
    throw std::invalid_argument("trace sample count mismatch");
  if (outer_trace.q_upper() != inner_trace.q_upper()) throw std::invalid_argument("cardinality mismatch");
  if (span < 4) throw std::invalid_argument("interpolation band needs at least four annuli");
  if (outer > mesh.rings() || outer - span < 0) throw std::invalid_argument("ring index out of range");
  const double scale = std::max({1.0, outer_trace.max_abs(), inner_trace.max_abs()});
  for (const TraceLoop* g : {&outer_trace, &inner_trace})
    if (g->phi_plus.norm() > 1e-8 * scale || g->phi_minus.norm() > 1e-8 * scale)
      throw std::invalid_argument("interpolation requires reduced interface data");

  const int m = mesh.angles();
  const int m2 = m / 2;
  const int q = outer_trace.q_upper();
  const int n = outer_trace.dim();
  const int inner = outer - span;
  InterfaceMap f(mesh, q, n);

  // Columnwise multipoints of a trace in both regions; interface columns use
  // the carried (lower) list so that the zero sheet stays pinned.
  auto col_value = [&](const TraceLoop& g, int k, bool upper_region) -> MultiPoint {
    if (upper_region) {
      if (!mesh.interface_col(k)) return g.upper[uz(k)];
      return g.lower[uz(k == 0 ? m2 : 0)];
    }
    const int j = (k >= m2) ? k - m2 : k + m2;  // theta = pi + j dtheta
    return g.lower[uz(j)];
  };

  double sup_gap = 0;
  const double l_out = std::log(mesh.r(outer));
  const double l_in = std::log(mesh.r(inner));
  for (int k = 0; k < m; ++k) {
    for (int region = 0; region < 2; ++region) {
      const bool upper_region = region == 0;
      if (upper_region && !mesh.upper_col(k)) continue;
      if (!upper_region && !mesh.lower_col(k)) continue;
      const MultiPoint a = col_value(inner_trace, k, upper_region);
      const MultiPoint b = col_value(outer_trace, k, upper_region);
      sup_gap = std::max(sup_gap, distance(a, b));
      for (int i = 0; i <= mesh.rings(); ++i) {
        double lam = (std::log(mesh.r(i)) - l_in) / (l_out - l_in);
        lam = std::clamp(lam, 0.0, 1.0);
        MultiPoint v = interpolate(a, b, lam);
        MultiPoint store = v;
        if (mesh.interface_col(k) && upper_region) store = merge(v, MultiPoint::singleton(RVec::zero(n)));
        if (upper_region)
          f.up(i, k) = std::move(store);
        else
          f.lo(i, k) = std::move(v);
      }
    }
  }
  for (int i = 0; i <= mesh.rings(); ++i) {
    f.phi(i, 0) = RVec::zero(n);
    f.phi(i, m2) = RVec::zero(n);
  }

  InterpolantResult out;
  out.outer = outer;
  out.span = span;
  out.sup_gap = sup_gap;
  out.delta = 1.0 - mesh.r(inner) / mesh.r(outer);
  const EnergyBreakdown e = assemble_energy(f);
  out.band_energy = 0;
  for (int i = inner; i < outer; ++i) out.band_energy += e.annulus[uz(i)];
  out.map = std::move(f);
  return out;
}

DecayReport decay_check(const InterfaceMap& f, double sup_dphi_sq) {
  const DiskMesh& mesh = f.mesh();
  const EnergyBreakdown e = assemble_energy(f);
  const double q = f.q_upper();
  const double core = core_completion(e.annulus);
  DecayReport rep;
  rep.ball.assign(uz(mesh.rings() + 1), 0.0);
  rep.bound.assign(uz(mesh.rings() + 1), 0.0);
  rep.ok = true;
  double sum = core;
  rep.ball[0] = core;
  rep.bound[0] = 3 * q * (mesh.r(0) * e.ring_tangential[0] + mesh.r(0) * mesh.r(0) * sup_dphi_sq);
  for (int i = 1; i <= mesh.rings(); ++i) {
    sum += e.annulus[uz(i - 1)];
    rep.ball[uz(i)] = sum;
    const double r = mesh.r(i);
    rep.bound[uz(i)] = 3 * q * (r * e.ring_tangential[uz(i)] + r * r * sup_dphi_sq);
  }
  for (int i = 1; i <= mesh.rings(); ++i) {
    const double b = rep.bound[uz(i)];
    const double v = rep.ball[uz(i)];
    if (b <= 0) {
      if (v > 0) rep.ok = false;
      continue;
    }
    rep.worst_ratio = std::max(rep.worst_ratio, v / b);
  }
  if (rep.worst_ratio > 1.0) rep.ok = false;
  return rep;
}

MaximumPrincipleReport maximum_principle_check(const InterfaceMap& f, double rel_slack) {
  const DiskMesh& mesh = f.mesh();
  auto node_sup = [&](int i) {
    double s = 0;
    for (int k = 0; k < mesh.angles(); ++k) {
      if (mesh.upper_col(k))
        for (const auto& en : f.up(i, k).entries()) s = std::max(s, en.p.norm());
      if (mesh.lower_col(k))
        for (const auto& en : f.lo(i, k).entries()) s = std::max(s, en.p.norm());
    }
    return s;
  };
  MaximumPrincipleReport rep;
  rep.boundary_sup = node_sup(mesh.rings());
  for (int i = 0; i < mesh.rings(); ++i) rep.interior_sup = std::max(rep.interior_sup, node_sup(i));
  rep.excess = std::max(0.0, rep.interior_sup - rep.boundary_sup) / std::max(1.0, rep.boundary_sup);
  rep.ok = rep.excess <= rel_slack;
  return rep;
}

MinimizerSplit split_minimizer(const InterfaceMap& f, int ring) {
  const DiskMesh& mesh = f.mesh();
  if (ring < 2 || ring > mesh.rings()) throw std::invalid_argument("ring index out of range");
  const int q = f.q_upper();
  const int n = f.dim();
  const double eps = 1.0 / (8.0 * std::sqrt(static_cast<double>(q)) + 17.0);

  // Candidate centers come from collapsing the innermost node multiset: as
  // the radius shrinks, the sheet values concentrate at the piece centers.
  CollapseResult col;
  try {
    col = collapse(f.up(0, 0), eps);
  } catch (const std::invalid_argument&) {
    throw std::runtime_error("not splittable at this radius");
  } catch (const std::runtime_error&) {
    throw std::runtime_error("not splittable at this radius");
  }
  if (col.collapsed.support_size() < 2) throw std::runtime_error("not splittable at this radius");

  std::vector<RVec> centers;
  for (const auto& en : col.collapsed.entries()) centers.push_back(en.p);

  // Snap the center nearest to the origin onto the interface sheet.
  int zero_idx = 0;
  for (std::size_t c = 1; c < centers.size(); ++c)
    if (centers[c].norm() < centers[uz(zero_idx)].norm()) zero_idx = static_cast<int>(c);
  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < centers.size(); ++a)
    for (std::size_t b = a + 1; b < centers.size(); ++b) sep = std::min(sep, dist(centers[a], centers[b]));
  if (centers[uz(zero_idx)].norm() > eps * sep) throw std::runtime_error("not splittable at this radius");
  centers[uz(zero_idx)] = RVec::zero(n);

  auto nearest = [&](const RVec& p) {
    int best = 0;
    double bd = dist(p, centers[0]);
    for (std::size_t c = 1; c < centers.size(); ++c) {
      const double dd = dist(p, centers[c]);
      if (dd < bd) {
        bd = dd;
        best = static_cast<int>(c);
      }
    }
    if (bd > eps * sep) throw std::runtime_error("not splittable at this radius");
    return best;
  };

  // Partition every ball node by nearest center; counts must be consistent.
  const int nc = static_cast<int>(centers.size());
  const DiskMesh piece_mesh(ring, mesh.angles(), mesh.r(0) / mesh.r(ring));
  std::vector<std::vector<MultiPoint>> ups(uz(nc)), los(uz(nc));
  for (auto& v : ups) v.assign(uz(piece_mesh.node_count()), MultiPoint{});
  for (auto& v : los) v.assign(uz(piece_mesh.node_count()), MultiPoint{});
  std::vector<int> up_count(uz(nc), -1), lo_count(uz(nc), -1);
  for (int i = 0; i <= ring; ++i) {
    for (int k = 0; k < mesh.angles(); ++k) {
      const int node = piece_mesh.node(i, k);
      if (mesh.upper_col(k)) {
        std::vector<int> cnt(uz(nc), 0);
        for (const auto& en : f.up(i, k).entries()) {
          const int c = nearest(en.p);
          ups[uz(c)][uz(node)].add(en.p, en.k);
          cnt[uz(c)] += en.k;
        }
        for (int c = 0; c < nc; ++c) {
          if (up_count[uz(c)] < 0) up_count[uz(c)] = cnt[uz(c)];
          if (up_count[uz(c)] != cnt[uz(c)]) throw std::runtime_error("not splittable at this radius");
        }
      }
      if (mesh.lower_col(k)) {
        std::vector<int> cnt(uz(nc), 0);
        for (const auto& en : f.lo(i, k).entries()) {
          const int c = nearest(en.p);
          los[uz(c)][uz(node)].add(en.p, en.k);
          cnt[uz(c)] += en.k;
        }
        for (int c = 0; c < nc; ++c) {
          if (lo_count[uz(c)] < 0) lo_count[uz(c)] = cnt[uz(c)];
          if (lo_count[uz(c)] != cnt[uz(c)]) throw std::runtime_error("not splittable at this radius");
        }
      }
    }
  }
  if (up_count[uz(zero_idx)] != lo_count[uz(zero_idx)] + 1) throw std::runtime_error("not splittable at this radius");
  for (int c = 0; c < nc; ++c)
    if (c != zero_idx && up_count[uz(c)] != lo_count[uz(c)]) throw std::runtime_error("not splittable at this radius");

  MinimizerSplit out;
  out.ring = ring;
  out.eps = eps;
  out.interface_piece = InterfaceMap(piece_mesh, up_count[uz(zero_idx)], n);
  for (int i = 0; i <= ring; ++i)
    for (int k = 0; k < mesh.angles(); ++k) {
      const int node = piece_mesh.node(i, k);
      if (mesh.upper_col(k)) out.interface_piece.up(i, k) = ups[uz(zero_idx)][uz(node)];
      if (mesh.lower_col(k)) out.interface_piece.lo(i, k) = los[uz(zero_idx)][uz(node)];
    }
  for (int i = 0; i <= ring; ++i) {
    out.interface_piece.phi(i, 0) = f.phi(i, 0);
    out.interface_piece.phi(i, mesh.angles() / 2) = f.phi(i, mesh.angles() / 2);
  }
  for (int c = 0; c < nc; ++c) {
    if (c == zero_idx) continue;
    SheetGrid g;
    g.center = centers[uz(c)];
    g.count = up_count[uz(c)];
    g.up = std::move(ups[uz(c)]);
    g.lo = std::move(los[uz(c)]);
    out.full_pieces.push_back(std::move(g));
  }
  return out;
}

}  // namespace aq
