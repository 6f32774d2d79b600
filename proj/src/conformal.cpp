#include "aqlab/conformal.hpp"

#include <cmath>
#include <stdexcept>

namespace aq {

ConformalMap::ConformalMap(std::vector<double> taylor, double radius)
    : taylor_(std::move(taylor)), radius_(radius) {
  if (!(radius_ > 0)) throw std::invalid_argument("straightening radius must be positive");
  double pw = 1;  // radius^{k-1}
  for (std::size_t j = 0; j < taylor_.size(); ++j) {
    const double k = static_cast<double>(j) + 2;
    pw *= radius_;
    defect_ += k * std::abs(taylor_[j]) * pw;
  }
  if (!(defect_ < 0.5)) throw std::invalid_argument("radius too large for invertibility");
}

Complex ConformalMap::forward(Complex z) const {
  Complex acc(0, 0);
  Complex zk = z * z;
  for (std::size_t j = 0; j < taylor_.size(); ++j) {
    acc += taylor_[j] * zk;
    zk *= z;
  }
  return z + Complex(0, 1) * acc;
}

Complex ConformalMap::derivative(Complex z) const {
  Complex acc(0, 0);
  Complex zk = z;
  for (std::size_t j = 0; j < taylor_.size(); ++j) {
    acc += (static_cast<double>(j) + 2) * taylor_[j] * zk;
    zk *= z;
  }
  return 1.0 + Complex(0, 1) * acc;
}

Complex ConformalMap::inverse(Complex w) const {
  const double tol = 1e-12 * std::max(1.0, std::abs(w));
  Complex z = w;
  for (int it = 0; it < 60; ++it) {
    const Complex res = forward(z) - w;
    if (std::abs(res) <= tol) return z;
    z -= res / derivative(z);
  }
  throw std::runtime_error("straightening inverse did not converge");
}

HarmonicPoly::HarmonicPoly(std::vector<RVec> coeff) : coeff_(std::move(coeff)) {
  for (const RVec& c : coeff_) {
    if (c.dim() != coeff_.front().dim())
      throw std::invalid_argument("mixed dimensions in interface data");
  }
}

RVec HarmonicPoly::boundary(double t) const {
  RVec out(dim());
  double tk = 1;
  for (const RVec& c : coeff_) {
    out += tk * c;
    tk *= t;
  }
  return out;
}

RVec HarmonicPoly::extend(double x1, double x2) const {
  RVec out(dim());
  Complex zk(1, 0);
  const Complex z(x1, x2);
  for (const RVec& c : coeff_) {
    out += zk.real() * c;
    zk *= z;
  }
  return out;
}

double HarmonicPoly::gradient_sq(double x1, double x2) const {
  // grad of Re(z^k) is k * (Re z^{k-1}, -Im z^{k-1}); summed per component.
  RVec gx(dim()), gy(dim());
  const Complex z(x1, x2);
  Complex zk(1, 0);  // z^{k-1}
  for (std::size_t k = 1; k < coeff_.size(); ++k) {
    const double kk = static_cast<double>(k);
    gx += kk * zk.real() * coeff_[k];
    gy += -kk * zk.imag() * coeff_[k];
    zk *= z;
  }
  return gx.norm_sq() + gy.norm_sq();
}

double HarmonicPoly::sup_gradient_sq(double radius) const {
  // |grad| is bounded by sum_k k |v_k| R^{k-1}; cheap and safe upper bound.
  double s = 0;
  double pw = 1;
  for (std::size_t k = 1; k < coeff_.size(); ++k) {
    s += static_cast<double>(k) * coeff_[k].norm() * pw;
    pw *= radius;
  }
  return s * s;
}

}  // namespace aq
