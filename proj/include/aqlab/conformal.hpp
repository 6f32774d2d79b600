#pragma once

#include <complex>
#include <vector>

#include "aqlab/vec.hpp"

namespace aq {

using Complex = std::complex<double>;

// Conformal change of coordinates w = z + i * sum_{k>=2} a_k z^k with real
// coefficients, which maps the real diameter onto the graph x2 = sum a_k x1^k.
// Valid on a disk where |Phi' - 1| < 1/2, so the map is injective and the
// inverse Newton iteration contracts.
class ConformalMap {
 public:
  // taylor[j] is the coefficient a_{j+2} of the interface graph.
  ConformalMap(std::vector<double> taylor, double radius);

  Complex forward(Complex z) const;
  Complex derivative(Complex z) const;
  // Solves forward(z) = w to within 1e-12 (relative) by Newton's method.
  Complex inverse(Complex w) const;

  double radius() const { return radius_; }
  // sup bound for |Phi' - 1| on the disk of the given radius.
  double derivative_defect() const { return defect_; }
  const std::vector<double>& taylor() const { return taylor_; }

 private:
  std::vector<double> taylor_;
  double radius_ = 1;
  double defect_ = 0;
};

// R^n-valued polynomial interface data t -> sum_k v_k t^k together with its
// canonical harmonic extension sum_k v_k Re((x1 + i x2)^k).
class HarmonicPoly {
 public:
  HarmonicPoly() = default;
  explicit HarmonicPoly(std::vector<RVec> coeff);

  int dim() const { return coeff_.empty() ? 0 : coeff_.front().dim(); }
  int degree() const { return static_cast<int>(coeff_.size()) - 1; }
  const std::vector<RVec>& coeff() const { return coeff_; }

  RVec boundary(double t) const;            // value on the interface
  RVec extend(double x1, double x2) const;  // harmonic extension
  double gradient_sq(double x1, double x2) const;
  double sup_gradient_sq(double radius) const;  // sup over the closed disk

 private:
  std::vector<RVec> coeff_;
};

}  // namespace aq
