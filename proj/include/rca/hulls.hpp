#pragma once

// Grid estimates of polynomially and rationally convex hulls. A hull is
// approached from outside by intersecting sublevel sets
// {|p| <= max_K |p|} over a finite family of polynomials (or rational
// functions), so every estimate is a superset of the true hull on the grid.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rca/geometry.hpp"
#include "rca/parameter_space.hpp"
#include "rca/polynomial.hpp"

namespace rca {

/// Finite family of polynomials sharing one set of monomial slots. Column j
/// of `coefficients()` holds member j's coefficient for each slot.
class PolynomialFamily {
 public:
  PolynomialFamily(int dimension, std::vector<MultiIndex> slots, Eigen::MatrixXcd coefficients,
                   std::string descriptor);

  int dimension() const { return dimension_; }
  const std::vector<MultiIndex>& slots() const { return slots_; }
  const Eigen::MatrixXcd& coefficients() const { return coefficients_; }
  Eigen::Index size() const { return coefficients_.cols(); }
  int degree(Eigen::Index member) const { return degrees_[static_cast<std::size_t>(member)]; }
  int max_degree() const;
  const std::string& descriptor() const { return descriptor_; }
  Polynomial member(Eigen::Index j) const;

  /// Member values at every row of `pts` (points x members).
  Eigen::MatrixXcd values(const PointMatrix& pts) const;

 private:
  int dimension_;
  std::vector<MultiIndex> slots_;
  Eigen::MatrixXcd coefficients_;
  std::vector<int> degrees_;
  std::string descriptor_;
};

struct FamilyOptions {
  bool exclude_constants = true;
  /// Largest number of nonzero coefficients per member; 0 means no limit.
  int max_terms = 0;
  Eigen::Index member_cap = 1'000'000;
};

/// Number of members enumerate_polynomial_family would produce.
double lattice_family_size(int dimension, int max_degree, double coeff_bound, double lattice_step,
                           const FamilyOptions& options = {});

/// All polynomials of degree <= k whose coefficients lie on the lattice
/// {a + bi : a, b in step*Z, |a|, |b| <= m}. Members are ordered by support
/// size, then by support (slots in graded lexicographic order), then by
/// coefficient values in lattice order (real part first, ascending).
PolynomialFamily enumerate_polynomial_family(int dimension, int max_degree, double coeff_bound,
                                             double lattice_step, const FamilyOptions& options = {});

/// z^alpha for every multi-index with 1 <= |alpha| <= k.
PolynomialFamily monomial_family(int dimension, int max_degree);

/// Chebyshev polynomials T_1 .. T_k in one variable.
PolynomialFamily chebyshev_family(int max_degree);

PolynomialFamily family_from_members(const std::vector<Polynomial>& members, std::string descriptor);

/// Members of a followed by members of b.
PolynomialFamily merge(const PolynomialFamily& a, const PolynomialFamily& b);

struct RationalFamily {
  std::vector<RationalFunction> members;
  std::string descriptor;
};

/// 1/(z - c) for every center.
RationalFamily shifted_reciprocal_family(const std::vector<std::complex<double>>& centers);

/// Centers on the lattice step*(Z + iZ) inside the closed disc |c - center| <= radius.
std::vector<std::complex<double>> lattice_centers(std::complex<double> center, double radius, double step);

/// Every quotient p/q with p from numerators and q from denominators.
RationalFamily quotient_family(const PolynomialFamily& numerators, const PolynomialFamily& denominators);

struct HullOptions {
  double slack = 1e-12;
  /// Width of the band of nodes counted as K itself; defaults to the cell diagonal.
  std::optional<double> incidence_tolerance;
  /// Denominator threshold for singularities of rational members.
  double singularity_threshold = 1e-9;
};

struct HullEstimate {
  GridMask mask;
  std::string family_descriptor;
  double radius = 0;
};

/// Nodes with |p(z)| <= (1 + slack) max_K |p|.
GridMask sublevel_mask(const Polynomial& p, const CompactSetSample& k, const Grid& grid, double slack = 1e-12);

HullEstimate polynomial_hull_estimate(const CompactSetSample& k, const PolynomialFamily& family, const Grid& grid,
                                      double radius, const HullOptions& options = {});

/// True iff the denominator of r nearly vanishes at some sample of K.
bool singularity_check(const RationalFunction& r, const CompactSetSample& k, double threshold = 1e-9);

HullEstimate rational_hull_estimate(const CompactSetSample& k, const RationalFamily& rationals,
                                    const PolynomialFamily& family, const Grid& grid, double radius,
                                    const HullOptions& options = {});

enum class HullKind { polynomial, rational };

/// Fiber-wise estimate, one per atom.
std::vector<HullEstimate> random_hull(const RandomCompactSet& k, const PolynomialFamily& family, const Grid& grid,
                                      double radius, HullKind kind, const RationalFamily* rationals = nullptr,
                                      const HullOptions& options = {});

}  // namespace rca
