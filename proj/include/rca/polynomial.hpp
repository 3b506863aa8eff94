#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <vector>

#include "rca/geometry.hpp"

namespace rca {

using MultiIndex = std::array<int, 2>;

inline int total_degree(const MultiIndex& a) { return a[0] + a[1]; }

/// Multi-indices of total degree <= max_degree in n variables, graded
/// lexicographic: by degree, then by descending first exponent.
std::vector<MultiIndex> graded_multi_indices(int dimension, int max_degree);

struct Monomial {
  MultiIndex exponent{0, 0};
  std::complex<double> coeff;

  bool operator==(const Monomial&) const = default;
};

/// Sparse polynomial in one or two complex variables.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(int dimension, std::vector<Monomial> terms);

  /// One-variable polynomial from ascending coefficients c0 + c1 z + ...
  static Polynomial dense(const Eigen::VectorXcd& ascending);
  static Polynomial constant(int dimension, std::complex<double> c);

  int dimension() const { return dimension_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  /// Maximal total degree over nonzero terms; -1 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return degree() < 0; }

  std::complex<double> operator()(const ComplexPoint& z) const;
  std::complex<double> operator()(std::complex<double> z) const { return (*this)(point(z)); }

  /// Values at every row of `pts`.
  Eigen::VectorXcd evaluate(const PointMatrix& pts) const;

  bool operator==(const Polynomial&) const = default;

 private:
  int dimension_ = 1;
  std::vector<Monomial> terms_;
};

/// Columns z^alpha for each multi-index, evaluated at every row of `pts`.
Eigen::MatrixXcd monomial_basis(const PointMatrix& pts, const std::vector<MultiIndex>& indices);

}  // namespace rca
