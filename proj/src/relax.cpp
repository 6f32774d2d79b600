#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "aqlab/solver.hpp"

namespace aq {
namespace {

std::size_t uz(int i) { return static_cast<std::size_t>(i); }

// Sample lists per (ring, column, region): free interior slots plus fixed
// entries (outer boundary samples and pinned interface zeros).
struct ListRef {
  std::vector<RVec> values;
  std::vector<int> var;  // variable id per entry, -1 for fixed entries
};

struct Edge {
  int ia, ka, ib, kb;
  bool upper_region;
  double w;
  std::vector<int> perm;  // matching of list a onto list b
};

}  // namespace

RelaxResult relax_oracle(const TraceLoop& boundary, const DiskMesh& mesh, double tol) {
  validate(boundary);
  if (boundary.angles != mesh.angles()) throw std::invalid_argument("trace sample count mismatch");
  const double scale = std::max(1.0, boundary.max_abs());
  if (boundary.phi_plus.norm() > 1e-8 * scale || boundary.phi_minus.norm() > 1e-8 * scale)
    throw std::invalid_argument("solver requires reduced interface data");

  const int rings = mesh.rings();
  const int m = mesh.angles();
  const int m2 = m / 2;
  const int q = boundary.q_upper();
  const int n = boundary.dim();

  // Free slot layout: interior upper columns carry q sheets, all other
  // columns q-1 (interface columns store the carried sheets; the interface
  // sheet itself is the constant zero).
  auto slot_count = [&](int k) { return (mesh.interface_col(k) || !mesh.upper_col(k)) ? q - 1 : q; };
  std::vector<int> node_base(uz(mesh.node_count()), -1);
  int nvar = 0;
  for (int i = 0; i < rings; ++i)
    for (int k = 0; k < m; ++k) {
      node_base[uz(mesh.node(i, k))] = nvar;
      nvar += slot_count(k);
    }

  std::vector<RVec> state(uz(nvar), RVec::zero(n));
  auto boundary_list = [&](int k, bool upper_region) -> std::vector<RVec> {
    if (upper_region && !mesh.interface_col(k)) return boundary.upper[uz(k)].expanded();
    const int j = (k >= m2) ? k - m2 : k + m2;
    return boundary.lower[uz(j)].expanded();
  };

  // Crude initial guess: boundary carried sheets decayed inward with the
  // lowest admissible homogeneity.
  const double alpha0 = 1.0 / (2.0 * q - 1.0);
  for (int i = 0; i < rings; ++i) {
    const double decay = std::pow(mesh.r(i), alpha0);
    for (int k = 0; k < m; ++k) {
      const std::vector<RVec> b = boundary_list(k, mesh.upper_col(k) && !mesh.interface_col(k));
      const int base = node_base[uz(mesh.node(i, k))];
      const int sc = slot_count(k);
      for (int s = 0; s < sc && s < static_cast<int>(b.size()); ++s) state[uz(base + s)] = b[uz(s)] * decay;
    }
  }

  auto list_at = [&](int i, int k, bool upper_region) -> ListRef {
    ListRef out;
    if (i == rings) {
      out.values = boundary_list(k, upper_region);
      out.var.assign(out.values.size(), -1);
    } else {
      const int base = node_base[uz(mesh.node(i, k))];
      const int sc = slot_count(k);
      for (int s = 0; s < sc; ++s) {
        out.values.push_back(state[uz(base + s)]);
        out.var.push_back(base + s);
      }
    }
    if (upper_region && mesh.interface_col(k)) {
      out.values.push_back(RVec::zero(n));  // pinned interface sheet
      out.var.push_back(-1);
    }
    return out;
  };

  // Static edge structure mirroring the energy quadrature.
  std::vector<Edge> edges;
  for (int i = 0; i <= rings; ++i) {
    const double wa = mesh.ring_log(i) / mesh.dtheta();
    if (i < rings) {  // ring `rings` edges join fixed samples only
      for (int k = 0; k < m2; ++k) edges.push_back({i, k, i, k + 1, true, wa, {}});
      for (int k = m2; k < m; ++k) edges.push_back({i, k, i, (k + 1) % m, false, wa, {}});
    }
  }
  for (int i = 0; i < rings; ++i) {
    const double wr = mesh.radial_weight(i);
    for (int k = 0; k < m; ++k) {
      const double w = mesh.interface_col(k) ? 0.5 * wr : wr;
      if (mesh.upper_col(k)) edges.push_back({i, k, i + 1, k, true, w, {}});
      if (mesh.lower_col(k)) edges.push_back({i, k, i + 1, k, false, w, {}});
    }
  }

  auto build_map = [&]() {
    InterfaceMap f(mesh, q, n);
    for (int i = 0; i <= rings; ++i)
      for (int k = 0; k < m; ++k) {
        if (mesh.upper_col(k)) {
          ListRef l = list_at(i, k, true);
          MultiPoint t;
          for (const auto& v : l.values) t.add(v);
          f.up(i, k) = std::move(t);
        }
        if (mesh.lower_col(k)) {
          ListRef l = list_at(i, k, false);
          MultiPoint t;
          for (const auto& v : l.values) t.add(v);
          f.lo(i, k) = std::move(t);
        }
      }
    for (int i = 0; i <= rings; ++i) {
      f.phi(i, 0) = RVec::zero(n);
      f.phi(i, m2) = RVec::zero(n);
    }
    return f;
  };

  RelaxResult out;
  const int max_rounds = 60;
  double prev_energy = std::numeric_limits<double>::infinity();
  for (int round = 0; round < max_rounds; ++round) {
    // Re-match every edge on the current state.
    bool changed = false;
    for (auto& e : edges) {
      const ListRef la = list_at(e.ia, e.ka, e.upper_region);
      const ListRef lb = list_at(e.ib, e.kb, e.upper_region);
      Assignment a = min_cost_assignment(la.values, lb.values);
      if (a.perm != e.perm) {
        changed = true;
        e.perm = std::move(a.perm);
      }
    }
    if (!changed && round > 0) break;
    out.matching_rounds = round + 1;

    // Quadratic solve with the matchings held fixed.
    std::vector<Eigen::Triplet<double>> trips;
    std::vector<Eigen::VectorXd> rhs(uz(n), Eigen::VectorXd::Zero(nvar));
    for (const auto& e : edges) {
      const ListRef la = list_at(e.ia, e.ka, e.upper_region);
      const ListRef lb = list_at(e.ib, e.kb, e.upper_region);
      for (std::size_t s = 0; s < la.values.size(); ++s) {
        const int p = la.var[s];
        const int r = lb.var[uz(e.perm[s])];
        if (p < 0 && r < 0) continue;
        if (p >= 0) trips.emplace_back(p, p, e.w);
        if (r >= 0) trips.emplace_back(r, r, e.w);
        if (p >= 0 && r >= 0) {
          trips.emplace_back(p, r, -e.w);
          trips.emplace_back(r, p, -e.w);
        } else if (p >= 0) {
          const RVec& fixed = lb.values[uz(e.perm[s])];
          for (int c = 0; c < n; ++c) rhs[uz(c)](p) += e.w * fixed[c];
        } else {
          const RVec& fixed = la.values[s];
          for (int c = 0; c < n; ++c) rhs[uz(c)](r) += e.w * fixed[c];
        }
      }
    }
    Eigen::SparseMatrix<double> a(nvar, nvar);
    a.setFromTriplets(trips.begin(), trips.end());
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(std::max(tol, 1e-14));
    cg.setMaxIterations(40 * nvar);
    cg.compute(a);
    for (int c = 0; c < n; ++c) {
      const Eigen::VectorXd x = cg.solve(rhs[uz(c)]);
      if (cg.info() != Eigen::Success) throw std::runtime_error("relaxation solve failed to converge");
      for (int v = 0; v < nvar; ++v) state[uz(v)][c] = x(v);
    }

    const double energy = assemble_energy(build_map()).total;
    out.energy_trace.push_back(energy);
    if (energy > prev_energy + 1e-10 * (1.0 + prev_energy)) {
      std::ostringstream msg;
      msg << "relaxation diverged at round " << round + 1 << ":";
      for (double v : out.energy_trace) msg << ' ' << v;
      throw std::runtime_error(msg.str());
    }
    prev_energy = energy;
  }

  out.map = build_map();
  out.energy = assemble_energy(out.map).total;
  return out;
}

}  // namespace aq
