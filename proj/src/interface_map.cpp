#include "aqlab/interface_map.hpp"

#include <cmath>
#include <stdexcept>

namespace aq {
namespace {

RVec mean_or_zero(const MultiPoint& t, int n) {
  return t.empty() ? RVec(n) : mean(t);
}

}  // namespace

InterfaceMap::InterfaceMap(DiskMesh mesh, int q_upper, int n)
    : mesh_(mesh), q_(q_upper), n_(n) {
  if (q_ < 1) throw std::invalid_argument("upper cardinality must be at least 1");
  if (n_ < 1 || n_ > kMaxDim) throw std::invalid_argument("ambient dimension out of range");
  up_.assign(static_cast<std::size_t>(mesh_.node_count()), MultiPoint{});
  lo_.assign(static_cast<std::size_t>(mesh_.node_count()), MultiPoint{});
  phi_.assign(static_cast<std::size_t>(2 * (mesh_.rings() + 1)), RVec(n_));
}

RVec& InterfaceMap::phi(int i, int k) {
  if (!mesh_.interface_col(k)) throw std::invalid_argument("phi lives on interface columns");
  const int side = (((k % mesh_.angles()) + mesh_.angles()) % mesh_.angles() == 0) ? 0 : 1;
  return phi_[static_cast<std::size_t>(2 * i + side)];
}

const RVec& InterfaceMap::phi(int i, int k) const {
  return const_cast<InterfaceMap*>(this)->phi(i, k);
}

double InterfaceMap::value_scale() const {
  double s = 0;
  for (const MultiPoint& t : up_) s = std::max(s, t.max_abs());
  for (const MultiPoint& t : lo_) s = std::max(s, t.max_abs());
  return s;
}

double InterfaceMap::interface_residual() const {
  double res = 0;
  for (int i = 0; i <= mesh_.rings(); ++i) {
    for (const int k : {0, mesh_.angles() / 2}) {
      const MultiPoint& u = up(i, k);
      const MultiPoint& l = lo(i, k);
      res = std::max(res, distance(u, merge(l, MultiPoint::singleton(phi(i, k)))));
    }
  }
  return res;
}

double InterfaceMap::avgsym_residual() const {
  double res = 0;
  const int m = mesh_.angles();
  for (int i = 0; i <= mesh_.rings(); ++i) {
    for (int k = 0; k <= m / 2; ++k) {
      const RVec a = static_cast<double>(q_) * mean_or_zero(up(i, k), n_);
      const RVec b = static_cast<double>(q_ - 1) * mean_or_zero(lo(i, mesh_.mirror_col(k)), n_);
      res = std::max(res, dist(a, b));
    }
  }
  return res;
}

EnergyBreakdown assemble_energy(const InterfaceMap& f) {
  const DiskMesh& mesh = f.mesh();
  const int nr = mesh.rings();
  const int m = mesh.angles();
  EnergyBreakdown out;
  out.annulus.assign(static_cast<std::size_t>(nr), 0.0);
  out.ring_tangential.assign(static_cast<std::size_t>(nr) + 1, 0.0);

  // Radial edges; interface columns contribute at half weight per region.
  for (int i = 0; i < nr; ++i) {
    const double w = mesh.radial_weight(i);
    double acc = 0;
    for (int k = 0; k <= m / 2; ++k) {
      const double c = mesh.interface_col(k) ? 0.5 : 1.0;
      acc += c * w * distance_sq(f.up(i, k), f.up(i + 1, k));
    }
    for (int k = m / 2; k <= m; ++k) {
      const double c = mesh.interface_col(k) ? 0.5 : 1.0;
      acc += c * w * distance_sq(f.lo(i, k), f.lo(i + 1, k));
    }
    out.annulus[static_cast<std::size_t>(i)] += acc;
  }

  // Angular edges: the per-ring sums feed both the tangential trace energies
  // and, split logarithmically, the annulus totals.
  std::vector<double> ring_sum(static_cast<std::size_t>(nr) + 1, 0.0);
  for (int i = 0; i <= nr; ++i) {
    double acc = 0;
    for (int k = 0; k < m / 2; ++k) acc += distance_sq(f.up(i, k), f.up(i, k + 1));
    for (int k = m / 2; k < m; ++k) acc += distance_sq(f.lo(i, k), f.lo(i, k + 1));
    ring_sum[static_cast<std::size_t>(i)] = acc;
    out.ring_tangential[static_cast<std::size_t>(i)] = acc / (mesh.dtheta() * mesh.r(i));
  }
  for (int i = 0; i < nr; ++i) {
    out.annulus[static_cast<std::size_t>(i)] +=
        (mesh.ring_log_outward(i) * ring_sum[static_cast<std::size_t>(i)] +
         mesh.ring_log_inward(i + 1) * ring_sum[static_cast<std::size_t>(i) + 1]) /
        mesh.dtheta();
  }
  for (double e : out.annulus) out.total += e;
  return out;
}

double core_completion(const std::vector<double>& annulus) {
  if (annulus.size() < 2 || !(annulus[0] > 0)) return 0;
  const double growth = annulus[1] / annulus[0];
  if (!(growth > 1.001)) return 0;
  return annulus[0] / (growth - 1.0);
}

std::vector<double> ring_height(const InterfaceMap& f) {
  const DiskMesh& mesh = f.mesh();
  const int m = mesh.angles();
  std::vector<double> h(static_cast<std::size_t>(mesh.rings()) + 1, 0.0);
  for (int i = 0; i <= mesh.rings(); ++i) {
    double acc = 0;
    for (int k = 0; k <= m / 2; ++k) {
      const double c = mesh.interface_col(k) ? 0.5 : 1.0;
      for (const MultiPoint::Entry& e : f.up(i, k).entries()) acc += c * e.k * e.p.norm_sq();
    }
    for (int k = m / 2; k <= m; ++k) {
      const double c = mesh.interface_col(k) ? 0.5 : 1.0;
      for (const MultiPoint::Entry& e : f.lo(i, k).entries()) acc += c * e.k * e.p.norm_sq();
    }
    h[static_cast<std::size_t>(i)] = acc * mesh.r(i) * mesh.dtheta();
  }
  return h;
}

InterfaceMap subtract_interface(const InterfaceMap& f, const HarmonicPoly& p) {
  if (p.dim() != f.dim()) throw std::invalid_argument("interface data dimension mismatch");
  const DiskMesh& mesh = f.mesh();
  InterfaceMap out = f;
  const int m = mesh.angles();
  for (int i = 0; i <= mesh.rings(); ++i) {
    for (int k = 0; k < m; ++k) {
      const double x1 = mesh.r(i) * std::cos(mesh.theta(k));
      const double x2 = mesh.r(i) * std::sin(mesh.theta(k));
      const RVec shift = -1.0 * p.extend(x1, x2);
      if (mesh.upper_col(k)) out.up(i, k) = f.up(i, k).translated(shift);
      if (mesh.lower_col(k)) out.lo(i, k) = f.lo(i, k).translated(shift);
    }
    for (const int k : {0, m / 2}) {
      const double x1 = (k == 0) ? mesh.r(i) : -mesh.r(i);
      out.phi(i, k) = f.phi(i, k) - p.boundary(x1);
    }
  }
  return out;
}

NormalizeResult normalize_average(const InterfaceMap& f) {
  const DiskMesh& mesh = f.mesh();
  const int q = f.q_upper();
  const int n = f.dim();
  const int m = mesh.angles();
  const double scale = std::max(1.0, f.value_scale());

  NormalizeResult res;
  res.map = f;
  res.correction.assign(static_cast<std::size_t>(mesh.node_count()), RVec(n));

  for (int i = 0; i <= mesh.rings(); ++i) {
    for (const int k : {0, m / 2}) {
      if (f.phi(i, k).norm() > 1e-10 * scale)
        throw std::invalid_argument("normalize requires reduced interface data");
      const RVec mismatch = static_cast<double>(q) * mean_or_zero(f.up(i, k), n) -
                            static_cast<double>(q - 1) * mean_or_zero(f.lo(i, k), n);
      res.max_interface_mismatch = std::max(res.max_interface_mismatch, mismatch.norm());
      if (mismatch.norm() > 1e-10 * scale) throw std::runtime_error("interface mean mismatch");
    }
  }

  const double inv = 1.0 / static_cast<double>(2 * q - 1);
  for (int i = 0; i <= mesh.rings(); ++i) {
    for (int k = 0; k < m; ++k) {
      const int km = mesh.mirror_col(k);
      RVec corr(n);
      if (mesh.interface_col(k) || mesh.upper_col(k)) {
        corr = inv * (static_cast<double>(q) * mean_or_zero(f.up(i, k), n) -
                      static_cast<double>(q - 1) * mean_or_zero(f.lo(i, km), n));
      } else {
        corr = inv * (static_cast<double>(q - 1) * mean_or_zero(f.lo(i, k), n) -
                      static_cast<double>(q) * mean_or_zero(f.up(i, km), n));
      }
      res.correction[static_cast<std::size_t>(mesh.node(i, k))] = corr;
      const RVec shift = -1.0 * corr;
      if (mesh.upper_col(k)) res.map.up(i, k) = f.up(i, k).translated(shift);
      if (mesh.lower_col(k)) res.map.lo(i, k) = f.lo(i, k).translated(shift);
    }
  }
  return res;
}

}  // namespace aq
