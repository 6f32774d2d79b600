#pragma once

#include <limits>
#include <vector>

#include "aqlab/vec.hpp"

namespace aq {

// Relative welding tolerance: points closer than this (relative to the value
// scale) are treated as one support point with a multiplicity.
inline constexpr double kWeldRel = 1e-14;

inline double weld_tolerance(double scale) { return kWeldRel * std::max(1.0, scale); }

// An unordered tuple of points in R^n with positive integer multiplicities.
// Entries are kept lexicographically sorted and welded, so equal multipoints
// have identical representations.
class MultiPoint {
 public:
  struct Entry {
    RVec p;
    int k = 1;
  };

  MultiPoint() = default;
  explicit MultiPoint(std::vector<Entry> entries);
  static MultiPoint singleton(const RVec& p, int k = 1);
  static MultiPoint from_points(const std::vector<RVec>& pts);

  int size() const { return total_; }  // number of points counted with multiplicity
  int support_size() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return total_ == 0; }
  int dim() const { return entries_.empty() ? 0 : entries_.front().p.dim(); }
  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<RVec> expanded() const;

  MultiPoint& add(const RVec& p, int k = 1);
  MultiPoint translated(const RVec& shift) const;
  MultiPoint scaled(double s) const;
  double max_abs() const;

  friend MultiPoint merge(const MultiPoint& a, const MultiPoint& b);
  friend bool operator==(const MultiPoint& a, const MultiPoint& b);

 private:
  void canonicalize();
  std::vector<Entry> entries_;
  int total_ = 0;
};

// Minimum-cost bijection between two equally sized point lists, cost = sum of
// squared distances. Ties are broken toward the lexicographically smallest
// permutation.
struct Assignment {
  std::vector<int> perm;  // perm[i] = index into the second list
  double cost_sq = 0;
};

Assignment min_cost_assignment(const std::vector<RVec>& a, const std::vector<RVec>& b);

// Cheapest assignment whose permutation differs from `base` in at least one
// position. Requires a.size() >= 2.
Assignment second_best_assignment(const std::vector<RVec>& a, const std::vector<RVec>& b,
                                  const Assignment& base);

double distance_sq(const MultiPoint& a, const MultiPoint& b);
double distance(const MultiPoint& a, const MultiPoint& b);

RVec mean(const MultiPoint& t);
double diameter(const MultiPoint& t);
// Minimal distance between distinct support points; +infinity when the
// support is a single point.
double separation(const MultiPoint& t);
double support_distance(const MultiPoint& t, const RVec& q);

// Retraction of the multipoint space onto the closed ball of radius r around
// a center t with r < separation(t)/4. It is the identity on the ball, moves
// no point set farther apart, strictly contracts pairs whose first element
// lies outside the ball, and keeps shared support points in place.
class BallRetraction {
 public:
  BallRetraction(MultiPoint t, double r);
  MultiPoint operator()(const MultiPoint& s) const;
  double radius() const { return r_; }
  const MultiPoint& center() const { return t_; }

 private:
  MultiPoint t_;
  double r_ = 0;
  double sep_ = 0;
  double cut_ = 0;    // distance beyond which everything maps to the center
  double sigma_ = 0;  // ramp slope 4r/separation
};

struct CollapseResult {
  MultiPoint collapsed;
  double beta_achieved = 0;  // separation(collapsed) / diameter(input)
};

// Merges nearby support points so that the result S satisfies
// distance(t, S) <= eps * separation(S); among the admissible single-linkage
// partitions the one with the largest separation is returned.
CollapseResult collapse(const MultiPoint& t, double eps);

// Point on the geodesic segment from a to b: matched points are interpolated
// linearly along a minimum-cost assignment.
MultiPoint interpolate(const MultiPoint& a, const MultiPoint& b, double lambda);

}  // namespace aq
