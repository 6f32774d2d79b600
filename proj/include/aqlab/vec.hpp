#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace aq {

inline constexpr int kMaxDim = 4;

// Small vector in R^n for n <= kMaxDim. Unused coordinates are kept at zero so
// that arithmetic over the full backing array is always safe.
class RVec {
 public:
  RVec() = default;
  explicit RVec(int dim) : dim_(check_dim(dim)) {}
  RVec(std::initializer_list<double> xs) : dim_(check_dim(static_cast<int>(xs.size()))) {
    int i = 0;
    for (double x : xs) a_[i++] = x;
  }
  static RVec zero(int dim) { return RVec(dim); }

  int dim() const { return dim_; }
  double operator[](int i) const { return a_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return a_[static_cast<std::size_t>(i)]; }

  RVec& operator+=(const RVec& o) {
    for (int i = 0; i < kMaxDim; ++i) a_[i] += o.a_[i];
    return *this;
  }
  RVec& operator-=(const RVec& o) {
    for (int i = 0; i < kMaxDim; ++i) a_[i] -= o.a_[i];
    return *this;
  }
  RVec& operator*=(double s) {
    for (double& x : a_) x *= s;
    return *this;
  }

  friend RVec operator+(RVec a, const RVec& b) { return a += b; }
  friend RVec operator-(RVec a, const RVec& b) { return a -= b; }
  friend RVec operator*(double s, RVec a) { return a *= s; }
  friend RVec operator*(RVec a, double s) { return a *= s; }

  friend double dot(const RVec& a, const RVec& b) {
    double s = 0;
    for (int i = 0; i < kMaxDim; ++i) s += a.a_[i] * b.a_[i];
    return s;
  }
  double norm_sq() const { return dot(*this, *this); }
  double norm() const { return std::sqrt(norm_sq()); }

  friend double dist_sq(const RVec& a, const RVec& b) {
    double s = 0;
    for (int i = 0; i < kMaxDim; ++i) {
      const double d = a.a_[i] - b.a_[i];
      s += d * d;
    }
    return s;
  }
  friend double dist(const RVec& a, const RVec& b) { return std::sqrt(dist_sq(a, b)); }

  double max_abs() const {
    double m = 0;
    for (double x : a_) m = std::max(m, std::abs(x));
    return m;
  }

  // Strict lexicographic order on coordinates.
  friend bool lex_less(const RVec& a, const RVec& b) {
    for (int i = 0; i < kMaxDim; ++i) {
      if (a.a_[i] < b.a_[i]) return true;
      if (a.a_[i] > b.a_[i]) return false;
    }
    return false;
  }
  friend bool operator==(const RVec& a, const RVec& b) { return a.a_ == b.a_ && a.dim_ == b.dim_; }

  std::vector<double> to_vector() const {
    return std::vector<double>(a_.begin(), a_.begin() + dim_);
  }
  static RVec from_vector(const std::vector<double>& xs) {
    RVec v(static_cast<int>(xs.size()));
    for (int i = 0; i < v.dim_; ++i) v.a_[static_cast<std::size_t>(i)] = xs[static_cast<std::size_t>(i)];
    return v;
  }

 private:
  static int check_dim(int d) {
    if (d < 0 || d > kMaxDim) throw std::invalid_argument("vector dimension out of range");
    return d;
  }
  int dim_ = 0;
  std::array<double, kMaxDim> a_{};
};

}  // namespace aq
