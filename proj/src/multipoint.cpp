#include "aqlab/multipoint.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace aq {
namespace {

bool within(const RVec& a, const RVec& b, double tol) {
  for (int i = 0; i < kMaxDim; ++i) {
    if (std::abs(a[i] - b[i]) > tol) return false;
  }
  return true;
}

void check_same_dim(const std::vector<MultiPoint::Entry>& entries) {
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].p.dim() != entries[0].p.dim())
      throw std::invalid_argument("mixed ambient dimensions in multipoint");
  }
}

}  // namespace

MultiPoint::MultiPoint(std::vector<Entry> entries) : entries_(std::move(entries)) {
  for (const Entry& e : entries_) {
    if (e.k <= 0) throw std::invalid_argument("nonpositive multiplicity");
  }
  check_same_dim(entries_);
  canonicalize();
}

MultiPoint MultiPoint::singleton(const RVec& p, int k) {
  return MultiPoint(std::vector<Entry>{Entry{p, k}});
}

MultiPoint MultiPoint::from_points(const std::vector<RVec>& pts) {
  std::vector<Entry> es;
  es.reserve(pts.size());
  for (const RVec& p : pts) es.push_back(Entry{p, 1});
  return MultiPoint(std::move(es));
}

std::vector<RVec> MultiPoint::expanded() const {
  std::vector<RVec> pts;
  pts.reserve(static_cast<std::size_t>(total_));
  for (const Entry& e : entries_) {
    for (int i = 0; i < e.k; ++i) pts.push_back(e.p);
  }
  return pts;
}

MultiPoint& MultiPoint::add(const RVec& p, int k) {
  if (k <= 0) throw std::invalid_argument("nonpositive multiplicity");
  entries_.push_back(Entry{p, k});
  check_same_dim(entries_);
  canonicalize();
  return *this;
}

MultiPoint MultiPoint::translated(const RVec& shift) const {
  MultiPoint out = *this;
  for (Entry& e : out.entries_) e.p += shift;
  out.canonicalize();
  return out;
}

MultiPoint MultiPoint::scaled(double s) const {
  MultiPoint out = *this;
  for (Entry& e : out.entries_) e.p *= s;
  out.canonicalize();
  return out;
}

double MultiPoint::max_abs() const {
  double m = 0;
  for (const Entry& e : entries_) m = std::max(m, e.p.max_abs());
  return m;
}

void MultiPoint::canonicalize() {
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return lex_less(a.p, b.p); });
  const double tol = weld_tolerance(max_abs());
  std::vector<Entry> welded;
  for (const Entry& e : entries_) {
    if (!welded.empty() && within(welded.back().p, e.p, tol)) {
      Entry& w = welded.back();
      const double wk = static_cast<double>(w.k);
      const double ek = static_cast<double>(e.k);
      w.p = (wk / (wk + ek)) * w.p + (ek / (wk + ek)) * e.p;
      w.k += e.k;
    } else {
      welded.push_back(e);
    }
  }
  entries_ = std::move(welded);
  total_ = 0;
  for (const Entry& e : entries_) total_ += e.k;
}

MultiPoint merge(const MultiPoint& a, const MultiPoint& b) {
  std::vector<MultiPoint::Entry> es = a.entries_;
  es.insert(es.end(), b.entries_.begin(), b.entries_.end());
  return MultiPoint(std::move(es));
}

bool operator==(const MultiPoint& a, const MultiPoint& b) {
  if (a.total_ != b.total_ || a.entries_.size() != b.entries_.size()) return false;
  const double tol = weld_tolerance(std::max(a.max_abs(), b.max_abs()));
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    if (a.entries_[i].k != b.entries_[i].k) return false;
    if (!within(a.entries_[i].p, b.entries_[i].p, tol)) return false;
  }
  return true;
}

Assignment min_cost_assignment(const std::vector<RVec>& a, const std::vector<RVec>& b) {
  const int q = static_cast<int>(a.size());
  if (b.size() != a.size()) throw std::invalid_argument("cardinality mismatch");
  Assignment out;
  out.perm.resize(static_cast<std::size_t>(q));
  if (q == 0) return out;
  if (q > 20) throw std::invalid_argument("assignment size out of supported range");

  std::vector<double> cost(static_cast<std::size_t>(q) * static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      cost[static_cast<std::size_t>(i * q + j)] = dist_sq(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)]);

  // dp[S] = minimal cost of assigning rows q-|S| .. q-1 to the column set S.
  const std::size_t full = (std::size_t{1} << q) - 1;
  std::vector<double> dp(full + 1, 0.0);
  for (std::size_t s = 1; s <= full; ++s) {
    const int row = q - std::popcount(s);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = s; m != 0;) {
      const std::size_t bit = m & (~m + 1);
      const int j = std::countr_zero(bit);
      best = std::min(best, cost[static_cast<std::size_t>(row * q + j)] + dp[s ^ bit]);
      m ^= bit;
    }
    dp[s] = best;
  }
  out.cost_sq = dp[full];

  // Reconstruct the lexicographically smallest optimal permutation by scanning
  // candidate columns in increasing order per row.
  std::size_t remaining = full;
  for (int i = 0; i < q; ++i) {
    int best_j = -1;
    double best_val = std::numeric_limits<double>::infinity();
    for (int j = 0; j < q; ++j) {
      const std::size_t bit = std::size_t{1} << j;
      if (!(remaining & bit)) continue;
      const double val = cost[static_cast<std::size_t>(i * q + j)] + dp[remaining ^ bit];
      if (val < best_val) {
        best_val = val;
        best_j = j;
      }
    }
    out.perm[static_cast<std::size_t>(i)] = best_j;
    remaining ^= std::size_t{1} << best_j;
  }
  return out;
}

Assignment second_best_assignment(const std::vector<RVec>& a, const std::vector<RVec>& b,
                                  const Assignment& base) {
  const int q = static_cast<int>(a.size());
  if (q < 2) throw std::invalid_argument("second-best assignment needs at least two points");
  Assignment best;
  best.cost_sq = std::numeric_limits<double>::infinity();
  for (int forbid = 0; forbid < q; ++forbid) {
    // Re-solve with the base edge (forbid, base.perm[forbid]) excluded.
    std::vector<double> cost(static_cast<std::size_t>(q) * static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j)
        cost[static_cast<std::size_t>(i * q + j)] =
            dist_sq(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)]);
    const double kInf = std::numeric_limits<double>::infinity();
    cost[static_cast<std::size_t>(forbid * q + base.perm[static_cast<std::size_t>(forbid)])] = kInf;

    const std::size_t full = (std::size_t{1} << q) - 1;
    std::vector<double> dp(full + 1, 0.0);
    for (std::size_t s = 1; s <= full; ++s) {
      const int row = q - std::popcount(s);
      double val = kInf;
      for (std::size_t m = s; m != 0;) {
        const std::size_t bit = m & (~m + 1);
        const int j = std::countr_zero(bit);
        val = std::min(val, cost[static_cast<std::size_t>(row * q + j)] + dp[s ^ bit]);
        m ^= bit;
      }
      dp[s] = val;
    }
    if (dp[full] < best.cost_sq) {
      best.cost_sq = dp[full];
      best.perm.assign(static_cast<std::size_t>(q), -1);
      std::size_t remaining = full;
      for (int i = 0; i < q; ++i) {
        int best_j = -1;
        double best_val = kInf;
        for (int j = 0; j < q; ++j) {
          const std::size_t bit = std::size_t{1} << j;
          if (!(remaining & bit)) continue;
          const double c = cost[static_cast<std::size_t>(i * q + j)];
          if (c == kInf) continue;
          const double val = c + dp[remaining ^ bit];
          if (val < best_val) {
            best_val = val;
            best_j = j;
          }
        }
        if (best_j < 0) break;
        best.perm[static_cast<std::size_t>(i)] = best_j;
        remaining ^= std::size_t{1} << best_j;
      }
    }
  }
  return best;
}

double distance_sq(const MultiPoint& a, const MultiPoint& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cardinality mismatch");
  return min_cost_assignment(a.expanded(), b.expanded()).cost_sq;
}

double distance(const MultiPoint& a, const MultiPoint& b) { return std::sqrt(distance_sq(a, b)); }

RVec mean(const MultiPoint& t) {
  if (t.empty()) throw std::invalid_argument("mean of empty multipoint");
  RVec s(t.dim());
  for (const MultiPoint::Entry& e : t.entries()) s += static_cast<double>(e.k) * e.p;
  return s * (1.0 / static_cast<double>(t.size()));
}

double diameter(const MultiPoint& t) {
  double d = 0;
  const auto& es = t.entries();
  for (std::size_t i = 0; i < es.size(); ++i)
    for (std::size_t j = i + 1; j < es.size(); ++j) d = std::max(d, dist(es[i].p, es[j].p));
  return d;
}

double separation(const MultiPoint& t) {
  const auto& es = t.entries();
  if (es.size() <= 1) return std::numeric_limits<double>::infinity();
  double s = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < es.size(); ++i)
    for (std::size_t j = i + 1; j < es.size(); ++j) s = std::min(s, dist(es[i].p, es[j].p));
  return s;
}

double support_distance(const MultiPoint& t, const RVec& q) {
  if (t.empty()) throw std::invalid_argument("support distance of empty multipoint");
  double d = std::numeric_limits<double>::infinity();
  for (const MultiPoint::Entry& e : t.entries()) d = std::min(d, dist(e.p, q));
  return d;
}

BallRetraction::BallRetraction(MultiPoint t, double r) : t_(std::move(t)), r_(r) {
  if (t_.empty()) throw std::invalid_argument("retraction around empty multipoint");
  if (r_ <= 0) throw std::invalid_argument("retraction radius must be positive");
  sep_ = separation(t_);
  if (!(r_ < sep_ / 4)) throw std::invalid_argument("radius too large for separation");
  if (std::isinf(sep_)) {
    cut_ = std::numeric_limits<double>::infinity();
    sigma_ = 0;
  } else {
    cut_ = r_ + sep_ / 4;
    sigma_ = 4 * r_ / sep_;
  }
}

MultiPoint BallRetraction::operator()(const MultiPoint& s) const {
  if (s.size() != t_.size()) throw std::invalid_argument("cardinality mismatch");
  const double g = distance(s, t_);
  if (g <= r_) return s;
  if (g >= cut_) return t_;

  // Ramp the pull-in amount from r down to 0 as g runs from r to the cutoff;
  // with a single support point the move is a plain radial scaling to radius r.
  const double target = std::isinf(sep_) ? r_ : std::min(g, sigma_ * (cut_ - g));
  const double lambda = target / g;

  std::vector<RVec> out;
  out.reserve(static_cast<std::size_t>(s.size()));
  for (const RVec& p : s.expanded()) {
    // Nearest support point of the center; below the cutoff this agrees with
    // the optimal matching because clusters are separated by more than sep/2.
    const MultiPoint::Entry* nearest = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const MultiPoint::Entry& e : t_.entries()) {
      const double d = dist_sq(e.p, p);
      if (d < best) {
        best = d;
        nearest = &e;
      }
    }
    out.push_back(nearest->p + lambda * (p - nearest->p));
  }
  return MultiPoint::from_points(out);
}

CollapseResult collapse(const MultiPoint& t, double eps) {
  if (!(eps > 0) || !(eps < 1)) throw std::invalid_argument("invalid collapse tolerance");
  const auto& es = t.entries();
  const int m = static_cast<int>(es.size());
  if (m <= 1 || diameter(t) == 0) throw std::invalid_argument("nothing to collapse");

  struct Edge {
    double d;
    int i, j;
  };
  std::vector<Edge> edges;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      edges.push_back(Edge{dist(es[static_cast<std::size_t>(i)].p, es[static_cast<std::size_t>(j)].p), i, j});
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.d < b.d; });

  std::vector<int> parent(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) parent[static_cast<std::size_t>(i)] = i;
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };

  auto evaluate = [&]() -> MultiPoint {
    std::vector<RVec> centroid(static_cast<std::size_t>(m), RVec(t.dim()));
    std::vector<int> weight(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < m; ++i) {
      const int root = find(i);
      centroid[static_cast<std::size_t>(root)] +=
          static_cast<double>(es[static_cast<std::size_t>(i)].k) * es[static_cast<std::size_t>(i)].p;
      weight[static_cast<std::size_t>(root)] += es[static_cast<std::size_t>(i)].k;
    }
    std::vector<MultiPoint::Entry> out;
    for (int i = 0; i < m; ++i) {
      if (weight[static_cast<std::size_t>(i)] > 0)
        out.push_back(MultiPoint::Entry{centroid[static_cast<std::size_t>(i)] *
                                            (1.0 / static_cast<double>(weight[static_cast<std::size_t>(i)])),
                                        weight[static_cast<std::size_t>(i)]});
    }
    return MultiPoint(std::move(out));
  };

  MultiPoint best;
  double best_sep = -1;
  int clusters = m;
  // The all-singletons partition is always admissible (distance zero), so a
  // valid candidate exists; coarser admissible partitions win by separation.
  for (std::size_t step = 0;; ++step) {
    const MultiPoint cand = evaluate();
    if (cand.support_size() >= 2) {
      const double s = separation(cand);
      if (distance(t, cand) <= eps * s && s > best_sep) {
        best_sep = s;
        best = cand;
      }
    }
    if (clusters <= 2 || step >= edges.size()) break;
    const Edge& e = edges[step];
    const int a = find(e.i), b = find(e.j);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --clusters;
    }
  }
  if (best_sep < 0) throw std::runtime_error("nothing to collapse");
  return CollapseResult{best, best_sep / diameter(t)};
}

MultiPoint interpolate(const MultiPoint& a, const MultiPoint& b, double lambda) {
  if (a.size() != b.size()) throw std::invalid_argument("cardinality mismatch");
  const std::vector<RVec> pa = a.expanded();
  const std::vector<RVec> pb = b.expanded();
  const Assignment match = min_cost_assignment(pa, pb);
  std::vector<RVec> out;
  out.reserve(pa.size());
  for (std::size_t i = 0; i < pa.size(); ++i)
    out.push_back((1 - lambda) * pa[i] + lambda * pb[static_cast<std::size_t>(match.perm[i])]);
  return MultiPoint::from_points(out);
}

}  // namespace aq
