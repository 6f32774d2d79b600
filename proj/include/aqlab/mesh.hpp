#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace aq {

// Polar tensor mesh on the annulus [r_min, 1] with geometrically graded radii
// and uniform angles. Column k = 0 and k = angles/2 lie on the interface; the
// open upper half is 0 < k < angles/2.
class DiskMesh {
 public:
  DiskMesh(int rings, int angles, double r_min) : n_(rings), m_(angles), r_min_(r_min) {
    if (rings < 2) throw std::invalid_argument("mesh needs at least two rings");
    if (angles < 8 || angles % 2 != 0) throw std::invalid_argument("angle count must be even and at least 8");
    if (!(r_min > 0) || !(r_min < 1)) throw std::invalid_argument("inner radius must lie in (0,1)");
    radii_.resize(static_cast<std::size_t>(n_) + 1);
    const double lr = std::log(r_min_);
    for (int i = 0; i <= n_; ++i)
      radii_[static_cast<std::size_t>(i)] = std::exp(lr * static_cast<double>(n_ - i) / static_cast<double>(n_));
    radii_[static_cast<std::size_t>(n_)] = 1.0;
  }

  int rings() const { return n_; }
  int angles() const { return m_; }
  double r_min() const { return r_min_; }
  double r(int i) const { return radii_[static_cast<std::size_t>(i)]; }
  double ratio() const { return r(1) / r(0); }
  double dtheta() const { return 2 * kPi / m_; }
  double theta(int k) const { return dtheta() * k; }

  int node(int i, int k) const { return i * m_ + ((k % m_) + m_) % m_; }
  int node_count() const { return (n_ + 1) * m_; }
  int mirror_col(int k) const { return ((m_ - k) % m_ + m_) % m_; }
  bool interface_col(int k) const {
    const int kk = ((k % m_) + m_) % m_;
    return kk == 0 || kk == m_ / 2;
  }
  bool upper_col(int k) const {
    const int kk = ((k % m_) + m_) % m_;
    return kk <= m_ / 2;
  }
  bool lower_col(int k) const {
    const int kk = ((k % m_) + m_) % m_;
    return kk == 0 || kk >= m_ / 2;
  }

  // Radial edge weight between rings i and i+1 (before the column factor):
  // midpoint radius over radial step, times the angular cell width.
  double radial_weight(int i) const {
    return 0.5 * (r(i) + r(i + 1)) / (r(i + 1) - r(i)) * dtheta();
  }
  // Logarithmic length attached to ring i for angular-derivative quadrature.
  double ring_log(int i) const {
    const double lo = (i > 0) ? 0.5 * std::log(r(i) / r(i - 1)) : 0.0;
    const double hi = (i < n_) ? 0.5 * std::log(r(i + 1) / r(i)) : 0.0;
    return lo + hi;
  }
  // Halves of ring_log used when splitting angular energy between annuli.
  double ring_log_outward(int i) const { return (i < n_) ? 0.5 * std::log(r(i + 1) / r(i)) : 0.0; }
  double ring_log_inward(int i) const { return (i > 0) ? 0.5 * std::log(r(i) / r(i - 1)) : 0.0; }

  static constexpr double kPi = 3.141592653589793238462643383279502884;

 private:
  int n_ = 0;
  int m_ = 0;
  double r_min_ = 0;
  std::vector<double> radii_;
};

}  // namespace aq
