#pragma once

#include <random>
#include <string>
#include <vector>

#include "aqlab/interface_map.hpp"
#include "aqlab/rational.hpp"
#include "aqlab/trace.hpp"
#include "aqlab/vec.hpp"

namespace aq {

// The three families of nontrivial homogeneous half-integer maps over a flat
// interface: integer-degree sine half parts with single-valued harmonic
// blocks (polynomial), fractional-degree winding blocks over a zero half
// part (branched), and the exceptional two-thirds chain.
enum class CatalogCase { kPolynomial, kBranched, kExceptional };

// One full block: `multiplicity` coinciding copies of the cycle that collects,
// over the den-th roots z = (rho, psi) of x, the values
// rho^num (a cos(num psi) + b sin(num psi)). The pair (a, b) must be linearly
// independent, which keeps the cycle away from the zero sheet.
struct BlockCoeff {
  int multiplicity = 1;
  RVec a{1};
  RVec b{1};
};

struct HomogeneousMap {
  CatalogCase tag = CatalogCase::kPolynomial;
  Rational alpha{1, 1};  // half-part degree over the block winding
  int k0 = 1;            // half-part multiplicity (fixed chain for exceptional)
  RVec c{1};             // half-part coefficient (zero for branched)
  std::vector<BlockCoeff> blocks;

  int q_upper() const;
  int dim() const;
};

// Validating constructors. They reject degenerate parameters
// (non-coprime winding, dependent block coefficients, zero half coefficient)
// but deliberately do not impose the averaging symmetry: the pure polynomial
// half part is a legitimate member of the family even though no minimizer
// with symmetric averages reduces to it.
HomogeneousMap catalog_polynomial(int degree, int k0, const RVec& c,
                                  std::vector<BlockCoeff> blocks = {});
HomogeneousMap catalog_branched(int degree, int winding, int k0,
                                std::vector<BlockCoeff> blocks);
HomogeneousMap catalog_exceptional(const RVec& c, std::vector<BlockCoeff> blocks = {});

// Exact evaluation on a polar mesh (chart assembly; no interpolation).
InterfaceMap sample_map(const HomogeneousMap& h, const DiskMesh& mesh);
// Exact boundary trace at `angles` uniform circle samples.
TraceLoop sample_trace(const HomogeneousMap& h, int angles);

// Closed-form Dirichlet mass in the unit disk and squared circle mass at
// radius one; both scale as powers of the radius with exponents 2 alpha
// and 2 alpha + 1.
double catalog_energy(const HomogeneousMap& h);
double catalog_height(const HomogeneousMap& h);

constexpr double kClassifyTol = 1e-4;

struct Classification {
  bool classified = false;
  HomogeneousMap map;        // best template (valid when classified)
  double residual = 0.0;     // circle L2 matching distance to the template
  std::string diagnostic;    // empty when classified
};

// Decomposes a circle trace into its half chain and full cycles, matches each
// piece against the catalog templates by least squares, and rebuilds the
// matched map to measure the residual. Candidates violating the structural
// conditions (shared supports, dependent coefficients, reducible windings,
// mixed homogeneities) are rejected with a diagnostic.
Classification classify_tangent(const TraceLoop& g);

// Draws a random admissible catalog map with O(1) coefficients; used by the
// round-trip suites.
HomogeneousMap random_homogeneous(std::mt19937& rng, int max_dim = 3);

}  // namespace aq
