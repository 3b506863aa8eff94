#include "rca/polynomial.hpp"

#include <algorithm>

namespace rca {

std::vector<MultiIndex> graded_multi_indices(int dimension, int max_degree) {
  if (dimension != 1 && dimension != 2) throw InvalidArgument("dimension must be 1 or 2");
  if (max_degree < 0) throw InvalidArgument("max_degree must be nonnegative");
  std::vector<MultiIndex> out;
  for (int d = 0; d <= max_degree; ++d) {
    if (dimension == 1) {
      out.push_back({d, 0});
    } else {
      for (int a = d; a >= 0; --a) out.push_back({a, d - a});
    }
  }
  return out;
}

Polynomial::Polynomial(int dimension, std::vector<Monomial> terms)
    : dimension_(dimension), terms_(std::move(terms)) {
  if (dimension_ != 1 && dimension_ != 2) throw InvalidArgument("dimension must be 1 or 2");
  for (const auto& t : terms_) {
    if (t.exponent[0] < 0 || t.exponent[1] < 0) throw InvalidArgument("negative exponent");
    if (dimension_ == 1 && t.exponent[1] != 0)
      throw InvalidArgument("one-variable polynomial with a z2 exponent");
    if (!std::isfinite(t.coeff.real()) || !std::isfinite(t.coeff.imag()))
      throw InvalidArgument("non-finite coefficient");
  }
}

Polynomial Polynomial::dense(const Eigen::VectorXcd& ascending) {
  std::vector<Monomial> terms;
  for (Eigen::Index j = 0; j < ascending.size(); ++j)
    if (ascending(j) != std::complex<double>(0)) terms.push_back({{static_cast<int>(j), 0}, ascending(j)});
  return Polynomial(1, std::move(terms));
}

Polynomial Polynomial::constant(int dimension, std::complex<double> c) {
  return Polynomial(dimension, {{{0, 0}, c}});
}

int Polynomial::degree() const {
  int deg = -1;
  for (const auto& t : terms_)
    if (t.coeff != std::complex<double>(0)) deg = std::max(deg, total_degree(t.exponent));
  return deg;
}

namespace {

std::complex<double> ipow(std::complex<double> z, int n) {
  std::complex<double> result(1.0, 0.0);
  while (n > 0) {
    if (n & 1) result *= z;
    z *= z;
    n >>= 1;
  }
  return result;
}

}  // namespace

std::complex<double> Polynomial::operator()(const ComplexPoint& z) const {
  if (z.size() != dimension_) throw InvalidArgument("polynomial evaluated at a point of wrong dimension");
  std::complex<double> sum(0.0, 0.0);
  for (const auto& t : terms_) {
    std::complex<double> v = t.coeff * ipow(z(0), t.exponent[0]);
    if (dimension_ == 2) v *= ipow(z(1), t.exponent[1]);
    sum += v;
  }
  return sum;
}

Eigen::VectorXcd Polynomial::evaluate(const PointMatrix& pts) const {
  if (pts.cols() != dimension_) throw InvalidArgument("polynomial evaluated on points of wrong dimension");
  Eigen::VectorXcd out(pts.rows());
  for (Eigen::Index i = 0; i < pts.rows(); ++i) out(i) = (*this)(ComplexPoint(pts.row(i).transpose()));
  return out;
}

Eigen::MatrixXcd monomial_basis(const PointMatrix& pts, const std::vector<MultiIndex>& indices) {
  int max_exp = 0;
  for (const auto& a : indices) max_exp = std::max({max_exp, a[0], a[1]});
  const Eigen::Index n = pts.rows();
  // powers[v] holds z_v^e in column e
  std::vector<Eigen::MatrixXcd> powers;
  for (Eigen::Index v = 0; v < pts.cols(); ++v) {
    Eigen::MatrixXcd p(n, max_exp + 1);
    p.col(0).setOnes();
    for (int e = 1; e <= max_exp; ++e) p.col(e) = p.col(e - 1).cwiseProduct(pts.col(v));
    powers.push_back(std::move(p));
  }
  Eigen::MatrixXcd basis(n, static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    if (indices[j][1] != 0 && pts.cols() < 2)
      throw InvalidArgument("multi-index uses z2 on one-variable points");
    basis.col(col) = powers[0].col(indices[j][0]);
    if (pts.cols() == 2) basis.col(col) = basis.col(col).cwiseProduct(powers[1].col(indices[j][1]));
  }
  return basis;
}

}  // namespace rca
