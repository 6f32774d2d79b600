#include "aqlab/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "aqlab/fourier.hpp"

namespace aq {

namespace {

constexpr double kPi = DiskMesh::kPi;
// Modes retained by the least-squares template fits; catalog degrees are tiny
// and anything above shows up in the rebuild residual anyway.
constexpr int kFitModes = 64;
// Relative Gram-determinant floor below which a vector pair counts as
// linearly dependent.
constexpr double kDependentTol = 1e-8;
// Relative amplitude below which a decomposed piece counts as a zero sheet.
constexpr double kZeroAmpRel = 1e-3;

double gram_ratio(const RVec& a, const RVec& b) {
  const double na = a.norm_sq(), nb = b.norm_sq();
  if (!(na > 0.0) || !(nb > 0.0)) return 0.0;
  const double d = dot(a, b);
  return (na * nb - d * d) / (na * nb);
}

void check_blocks(const std::vector<BlockCoeff>& blocks, int dim) {
  for (const BlockCoeff& blk : blocks) {
    if (blk.multiplicity < 1) throw std::invalid_argument("multiplicity must be positive");
    if (blk.a.dim() != dim || blk.b.dim() != dim)
      throw std::invalid_argument("coefficient dimensions disagree");
    if (gram_ratio(blk.a, blk.b) <= 1e-12)
      throw std::invalid_argument("block coefficients must be independent");
  }
}

}  // namespace

int HomogeneousMap::q_upper() const {
  int q = tag == CatalogCase::kExceptional ? 2 : k0;
  for (const BlockCoeff& blk : blocks)
    q += blk.multiplicity * static_cast<int>(alpha.den);
  return q;
}

int HomogeneousMap::dim() const { return c.dim(); }

HomogeneousMap catalog_polynomial(int degree, int k0, const RVec& c,
                                  std::vector<BlockCoeff> blocks) {
  if (degree < 1) throw std::invalid_argument("degree must be positive");
  if (k0 < 1) throw std::invalid_argument("multiplicity must be positive");
  if (!(c.norm_sq() > 0.0)) throw std::invalid_argument("coefficient must be nonzero");
  check_blocks(blocks, c.dim());
  HomogeneousMap h;
  h.tag = CatalogCase::kPolynomial;
  h.alpha = Rational{degree, 1};
  h.k0 = k0;
  h.c = c;
  h.blocks = std::move(blocks);
  return h;
}

HomogeneousMap catalog_branched(int degree, int winding, int k0,
                                std::vector<BlockCoeff> blocks) {
  if (degree < 1) throw std::invalid_argument("degree must be positive");
  if (winding < 1) throw std::invalid_argument("winding must be positive");
  if (k0 < 1) throw std::invalid_argument("multiplicity must be positive");
  if (std::gcd(degree, winding) != 1)
    throw std::invalid_argument("winding numbers must be coprime");
  if (blocks.empty()) throw std::invalid_argument("branched maps need at least one block");
  const int dim = blocks.front().a.dim();
  check_blocks(blocks, dim);
  HomogeneousMap h;
  h.tag = CatalogCase::kBranched;
  h.alpha = Rational{degree, winding};
  h.k0 = k0;
  h.c = RVec::zero(dim);
  h.blocks = std::move(blocks);
  return h;
}

HomogeneousMap catalog_exceptional(const RVec& c, std::vector<BlockCoeff> blocks) {
  if (!(c.norm_sq() > 0.0)) throw std::invalid_argument("coefficient must be nonzero");
  check_blocks(blocks, c.dim());
  HomogeneousMap h;
  h.tag = CatalogCase::kExceptional;
  h.alpha = Rational{2, 3};
  h.k0 = 1;
  h.c = c;
  h.blocks = std::move(blocks);
  return h;
}

InterfaceMap sample_map(const HomogeneousMap& h, const DiskMesh& mesh) {
  const int n = h.dim();
  const int num = static_cast<int>(h.alpha.num);
  const int den = static_cast<int>(h.alpha.den);

  std::vector<ChartGrid> charts;
  switch (h.tag) {
    case CatalogCase::kPolynomial: {
      charts.push_back(make_chart(mesh, true, 1, n, [&](double rho, double phi) {
        RVec v = h.c;
        v *= std::pow(rho, 0.5 * num) * std::sin(0.5 * num * phi);
        return v;
      }));
      if (h.k0 > 1)
        charts.push_back(make_chart(mesh, false, 1, n, [&](double rho, double psi) {
          RVec v = h.c;
          v *= std::pow(rho, num) * std::sin(num * psi);
          return v;
        }));
      break;
    }
    case CatalogCase::kBranched:
      charts.push_back(
          make_chart(mesh, true, h.k0, n, [n](double, double) { return RVec::zero(n); }));
      break;
    case CatalogCase::kExceptional:
      charts.push_back(make_chart(mesh, true, 2, n, [&](double rho, double phi) {
        RVec v = h.c;
        v *= rho * std::sin(phi);
        return v;
      }));
      break;
  }
  for (const BlockCoeff& blk : h.blocks)
    charts.push_back(make_chart(mesh, false, den, n, [&](double rho, double psi) {
      RVec v = blk.a;
      v *= std::cos(num * psi);
      RVec w = blk.b;
      w *= std::sin(num * psi);
      v += w;
      v *= std::pow(rho, num);
      return v;
    }));

  std::vector<std::pair<const ChartGrid*, int>> parts;
  parts.emplace_back(&charts.front(), 1);
  std::size_t next = 1;
  if (h.tag == CatalogCase::kPolynomial && h.k0 > 1)
    parts.emplace_back(&charts[next++], h.k0 - 1);
  for (const BlockCoeff& blk : h.blocks) parts.emplace_back(&charts[next++], blk.multiplicity);
  return assemble_blocks(mesh, n, parts);
}

TraceLoop sample_trace(const HomogeneousMap& h, int angles) {
  const DiskMesh mesh(2, angles, 0.25);
  return sample_loop(sample_map(h, mesh), mesh.rings());
}

double catalog_energy(const HomogeneousMap& h) {
  const double num = static_cast<double>(h.alpha.num);
  double d = 0.0;
  switch (h.tag) {
    case CatalogCase::kPolynomial:
      d = 0.5 * (2 * h.k0 - 1) * kPi * num * h.c.norm_sq();
      break;
    case CatalogCase::kBranched:
      break;
    case CatalogCase::kExceptional:
      d = kPi * h.c.norm_sq();
      break;
  }
  for (const BlockCoeff& blk : h.blocks)
    d += blk.multiplicity * kPi * num * (blk.a.norm_sq() + blk.b.norm_sq());
  return d;
}

double catalog_height(const HomogeneousMap& h) {
  const double den = static_cast<double>(h.alpha.den);
  double s = 0.0;
  switch (h.tag) {
    case CatalogCase::kPolynomial:
      s = 0.5 * (2 * h.k0 - 1) * kPi * h.c.norm_sq();
      break;
    case CatalogCase::kBranched:
      break;
    case CatalogCase::kExceptional:
      s = 1.5 * kPi * h.c.norm_sq();
      break;
  }
  for (const BlockCoeff& blk : h.blocks)
    s += blk.multiplicity * kPi * den * (blk.a.norm_sq() + blk.b.norm_sq());
  return s;
}

namespace {

struct PieceFit {
  int mode = 0;
  int winding = 1;
  int multiplicity = 1;
  RVec a{1};
  RVec b{1};
};

// The difference of two pure-mode components along a common ray is again a
// single trigonometric mode A cos + B sin of the ray parameter; it vanishes
// somewhere iff (A, B) are dependent. Phase offsets cover the branch choices.
bool ray_collision(const RVec& a1, const RVec& b1, double u1, const RVec& a2, const RVec& b2,
                   double u2) {
  RVec big_a = a1;
  big_a *= std::cos(u1);
  RVec t = b1;
  t *= std::sin(u1);
  big_a += t;
  t = a2;
  t *= std::cos(u2);
  big_a -= t;
  t = b2;
  t *= std::sin(u2);
  big_a -= t;

  RVec big_b = b1;
  big_b *= std::cos(u1);
  t = a1;
  t *= std::sin(u1);
  big_b -= t;
  t = b2;
  t *= std::cos(u2);
  big_b -= t;
  t = a2;
  t *= std::sin(u2);
  big_b += t;
  return gram_ratio(big_a, big_b) <= kDependentTol;
}

}  // namespace

Classification classify_tangent(const TraceLoop& g) {
  Classification out;
  const double scale = g.max_abs();
  if (scale <= 1e-12) {
    out.diagnostic = "no signal above tolerance";
    return out;
  }
  TraceDecomposition d;
  try {
    d = decompose_trace(g);
  } catch (const std::runtime_error& e) {
    out.diagnostic = e.what();
    return out;
  }

  double half_amp = 0.0;
  for (const RVec& v : d.half.zeta) half_amp = std::max(half_amp, v.max_abs());
  const bool zero_half = half_amp <= kZeroAmpRel * scale;
  const int q0 = d.half.q0;

  int half_mode = 0;
  RVec cvec = RVec::zero(d.dim);
  if (!zero_half) {
    if (q0 > 2) {
      out.diagnostic = "interface winding outside the catalog";
      return out;
    }
    const int m_count = static_cast<int>(d.half.zeta.size()) - 1;
    const HalfWave hw = halfwave_coeffs(d.half.zeta, std::min(kFitModes, m_count - 1));
    double best = -1.0;
    for (int l = 1; l <= hw.modes(); ++l) {
      const double m = hw.c[static_cast<std::size_t>(l - 1)].norm_sq();
      if (m > best) {
        best = m;
        half_mode = l;
      }
    }
    cvec = hw.c[static_cast<std::size_t>(half_mode - 1)];
    if (q0 == 2 && half_mode != 2) {
      out.diagnostic = "chain mode outside the catalog";
      return out;
    }
  }

  std::vector<PieceFit> fits;
  int absorbed = 0;
  for (const FullBlock& blk : d.blocks) {
    double amp = 0.0;
    for (const RVec& v : blk.zeta) amp = std::max(amp, v.max_abs());
    if (amp <= kZeroAmpRel * scale) {
      absorbed += blk.winding * blk.multiplicity;
      continue;
    }
    const int len = static_cast<int>(blk.zeta.size());
    const LoopWave lw = loop_coeffs(blk.zeta, std::min(kFitModes, len / 2 - 1));
    double best = -1.0;
    int mode = 0;
    for (int l = 1; l <= lw.modes(); ++l) {
      const double m = lw.a[static_cast<std::size_t>(l - 1)].norm_sq() +
                       lw.b[static_cast<std::size_t>(l - 1)].norm_sq();
      if (m > best) {
        best = m;
        mode = l;
      }
    }
    if (mode == 0 || std::gcd(mode, blk.winding) != 1) {
      out.diagnostic = "block winding and mode share a factor";
      return out;
    }
    PieceFit f;
    f.mode = mode;
    f.winding = blk.winding;
    f.multiplicity = blk.multiplicity;
    f.a = lw.a[static_cast<std::size_t>(mode - 1)];
    f.b = lw.b[static_cast<std::size_t>(mode - 1)];
    fits.push_back(std::move(f));
  }

  if (!zero_half && absorbed > 0) {
    // A zero cycle coincides with the half part along the interface rays.
    out.diagnostic = "blocks share support";
    return out;
  }

  int k0 = zero_half ? q0 + absorbed : 1;

  if (!zero_half && q0 == 1) {
    // Extra copies of the half template count toward its multiplicity.
    std::vector<PieceFit> kept;
    for (const PieceFit& f : fits) {
      RVec da = f.a;
      RVec db = f.b;
      db -= cvec;
      if (f.winding == 1 && f.mode == half_mode && da.max_abs() <= 1e-6 * scale &&
          db.max_abs() <= 1e-6 * scale)
        k0 += f.multiplicity;
      else
        kept.push_back(f);
    }
    fits = std::move(kept);
  }

  Rational alpha{1, 1};
  if (!zero_half)
    alpha = q0 == 1 ? Rational{half_mode, 1} : Rational{2, 3};
  else if (!fits.empty())
    alpha = Rational{fits.front().mode, fits.front().winding};
  else {
    out.diagnostic = "no signal above tolerance";
    return out;
  }
  for (const PieceFit& f : fits)
    if (!(Rational{f.mode, f.winding} == alpha)) {
      out.diagnostic = "mixed homogeneities";
      return out;
    }

  for (const PieceFit& f : fits)
    if (gram_ratio(f.a, f.b) <= kDependentTol) {
      out.diagnostic = "dependent block coefficients";
      return out;
    }
  for (std::size_t i = 0; i < fits.size(); ++i)
    for (std::size_t j = i + 1; j < fits.size(); ++j) {
      RVec da = fits[i].a;
      da -= fits[j].a;
      RVec db = fits[i].b;
      db -= fits[j].b;
      if (gram_ratio(da, db) <= kDependentTol) {
        out.diagnostic = "blocks share support";
        return out;
      }
    }
  if (!zero_half) {
    const RVec zero = RVec::zero(d.dim);
    for (const PieceFit& f : fits) {
      bool collide = false;
      if (q0 == 1) {
        collide = ray_collision(f.a, f.b, 0.0, zero, cvec, 0.0);
      } else {
        // Chain phases 0 and 4 pi / 3 appear at every direction; block
        // branches step by 4 pi / 3 as well (mode two over winding three).
        for (int jc = 0; jc < 2 && !collide; ++jc)
          for (int jb = 0; jb < 3 && !collide; ++jb)
            collide = ray_collision(f.a, f.b, 4.0 * kPi * jb / 3.0, zero, cvec,
                                    4.0 * kPi * jc / 3.0);
      }
      if (collide) {
        out.diagnostic = "blocks share support";
        return out;
      }
    }
  }

  if (!zero_half && q0 == 1 && fits.empty()) {
    RVec balance = cvec;
    balance *= static_cast<double>(2 * k0 - 1);
    if (balance.max_abs() <= 1e-9 * scale) {
      out.diagnostic = "averaging condition excludes a pure half part";
      return out;
    }
  }

  std::vector<BlockCoeff> coeffs;
  coeffs.reserve(fits.size());
  for (const PieceFit& f : fits) coeffs.push_back({f.multiplicity, f.a, f.b});
  try {
    if (zero_half)
      out.map = catalog_branched(static_cast<int>(alpha.num), static_cast<int>(alpha.den), k0,
                                 std::move(coeffs));
    else if (q0 == 1)
      out.map = catalog_polynomial(half_mode, k0, cvec, std::move(coeffs));
    else
      out.map = catalog_exceptional(cvec, std::move(coeffs));
  } catch (const std::invalid_argument& e) {
    out.diagnostic = e.what();
    return out;
  }

  out.residual = loop_l2_distance(g, sample_trace(out.map, g.angles));
  if (out.residual <= kClassifyTol)
    out.classified = true;
  else
    out.diagnostic = "residual above threshold";
  return out;
}

HomogeneousMap random_homogeneous(std::mt19937& rng, int max_dim) {
  const int top_dim = std::clamp(max_dim, 2, kMaxDim);
  std::uniform_int_distribution<int> tag_d(0, 2);
  std::uniform_int_distribution<int> k0_d(1, 2);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int tag = tag_d(rng);
  const int dim =
      std::uniform_int_distribution<int>(tag == 1 ? 2 : 1, top_dim)(rng);

  const auto draw_vec = [&](double floor) {
    while (true) {
      RVec v = RVec::zero(dim);
      for (int i = 0; i < dim; ++i) v[i] = unit(rng);
      if (v.norm() >= floor) return v;
    }
  };
  const auto draw_blocks = [&](int count, int multiplicity_cap) {
    std::vector<BlockCoeff> out;
    std::uniform_int_distribution<int> mult_d(1, multiplicity_cap);
    while (static_cast<int>(out.size()) < count) {
      BlockCoeff b;
      b.multiplicity = mult_d(rng);
      b.a = draw_vec(0.35);
      b.b = draw_vec(0.35);
      if (gram_ratio(b.a, b.b) < 0.15) continue;
      bool apart = true;
      for (const BlockCoeff& prev : out) {
        RVec da = b.a;
        da -= prev.a;
        RVec db = b.b;
        db -= prev.b;
        if (gram_ratio(da, db) < 0.05) apart = false;
      }
      if (apart) out.push_back(std::move(b));
    }
    return out;
  };

  switch (tag) {
    case 0: {
      const int degree = std::uniform_int_distribution<int>(1, 3)(rng);
      const int k0 = k0_d(rng);
      const RVec c = draw_vec(0.4);
      const int count = dim >= 2 ? std::uniform_int_distribution<int>(0, 2)(rng) : 0;
      while (true) {
        std::vector<BlockCoeff> blocks = draw_blocks(count, count > 1 ? 1 : 2);
        bool apart = true;
        for (const BlockCoeff& b : blocks) {
          RVec db = b.b;
          db -= c;
          if (gram_ratio(b.a, db) < 0.05) apart = false;
        }
        if (apart) return catalog_polynomial(degree, k0, c, std::move(blocks));
      }
    }
    case 1: {
      static constexpr std::pair<int, int> kPairs[] = {{1, 2}, {3, 2}, {5, 2}, {1, 3},
                                                       {2, 3}, {4, 3}, {1, 4}, {3, 4}};
      const auto [degree, winding] =
          kPairs[std::uniform_int_distribution<int>(0, 7)(rng)];
      const int mult_cap = winding == 2 ? 2 : 1;
      return catalog_branched(degree, winding, k0_d(rng), draw_blocks(1, mult_cap));
    }
    default: {
      const RVec c = draw_vec(0.4);
      const int count = dim >= 2 ? std::uniform_int_distribution<int>(0, 1)(rng) : 0;
      return catalog_exceptional(c, draw_blocks(count, 1));
    }
  }
}

}  // namespace aq
