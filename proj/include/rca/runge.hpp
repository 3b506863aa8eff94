#pragma once

// Riemann sums of the Cauchy integral as rational approximants with poles on
// the contour, the eta * L error certificate, and adaptive refinement.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "rca/contour.hpp"
#include "rca/geometry.hpp"
#include "rca/parameter_space.hpp"

namespace rca {

/// R(z) = constant + sum_j a_j / (zeta_j - z).
template <typename Scalar>
class BasicRationalApproximant {
 public:
  using Vector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

  BasicRationalApproximant() = default;
  BasicRationalApproximant(Vector poles, Vector coefficients, std::complex<Scalar> constant = {})
      : poles_(std::move(poles)), coefficients_(std::move(coefficients)), constant_(constant) {
    if (poles_.size() != coefficients_.size())
      throw InvalidArgument("rational approximant: one coefficient per pole required");
  }

  const Vector& poles() const { return poles_; }
  const Vector& coefficients() const { return coefficients_; }
  std::complex<Scalar> constant() const { return constant_; }
  Eigen::Index pole_count() const { return poles_.size(); }

  std::complex<Scalar> operator()(std::complex<Scalar> z) const {
    return constant_ + (coefficients_.array() / (poles_.array() - z)).sum();
  }

  /// Values at every sample point of a one-variable set.
  Vector evaluate(const BasicCompactSetSample<Scalar>& k) const {
    Vector out(k.size());
    for (Eigen::Index i = 0; i < k.size(); ++i) out(i) = (*this)(k.points()(i, 0));
    return out;
  }

  bool operator==(const BasicRationalApproximant& o) const {
    return constant_ == o.constant_ && poles_.size() == o.poles_.size() && poles_ == o.poles_ &&
           coefficients_ == o.coefficients_;
  }

 private:
  Vector poles_;
  Vector coefficients_;
  std::complex<Scalar> constant_{};
};

using RationalApproximant = BasicRationalApproximant<double>;

/// Poles at the partition nodes, a_j = f(zeta_j) * increment_j / (2 pi i).
template <typename Scalar>
BasicRationalApproximant<Scalar> riemann_sum_approximant(
    const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>& values,
    const BasicPartition<Scalar>& p) {
  if (p.size() == 0) throw InvalidArgument("riemann_sum_approximant: empty partition");
  if (values.size() != p.size()) throw InvalidArgument("riemann_sum_approximant: one value per node required");
  const std::complex<Scalar> inv_2pi_i(0, -1 / (2 * std::numbers::pi_v<Scalar>));
  return BasicRationalApproximant<Scalar>(p.nodes, (values.array() * p.increments.array() * inv_2pi_i).matrix());
}

/// (1/2 pi i) sum_j f(zeta_j) / (zeta_j - z) * increment_j. Shares its
/// arithmetic with riemann_sum_approximant, so both agree bit for bit.
template <typename Scalar>
std::complex<Scalar> cauchy_integral(const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>& values,
                                     const BasicPartition<Scalar>& p, std::complex<Scalar> z) {
  if ((p.nodes.array() - z).abs().minCoeff() <= p.mesh)
    throw InvalidArgument("cauchy_integral: evaluation point within one mesh of the contour");
  return riemann_sum_approximant(values, p)(z);
}

using HolomorphicFunction = std::function<std::complex<double>(std::complex<double>)>;

Eigen::VectorXcd sample_on(const HolomorphicFunction& f, const Eigen::VectorXcd& nodes);

/// bound = eta * contour_length, with eta the discrete oscillation bound.
struct ErrorCertificate {
  double eta = 0;
  double contour_length = 0;
  double bound = 0;
  double mesh = 0;
};

/// eta = max (1/2pi) |f(zeta)/(zeta - z) - f(w)/(w - z)| over refined node
/// pairs with |zeta - w| < P.mesh and over all samples z of K. `refined` must
/// be at least 4x finer than `p`, and K must keep one mesh away from it.
ErrorCertificate continuity_certificate(const Eigen::VectorXcd& refined_values, const Partition& refined,
                                        const Partition& p, const CompactSetSample& k);

struct RungeOptions {
  int refinement_factor = 4;  // power of two >= 4
  double stall_ratio = 0.9;   // rebuild the contour when bound_k / bound_{k-1} exceeds this
};

struct RungeResult {
  RationalApproximant approximant;
  ErrorCertificate certificate;
  bool converged = false;
  int iterations = 0;
  double cell_size = 0;           // final contour cell size
  double measured_max_error = 0;  // max over K samples of |f - R|
};

/// Halves the partition mesh (and rebuilds the contour at half the cell size
/// when the bound stalls) until certificate.bound < epsilon or max_iters.
/// f must be holomorphic within 3 * cell0 of K. A function that is constant
/// on K and on the contour is returned as an exact constant approximant.
RungeResult adaptive_runge(const HolomorphicFunction& f, const CompactSetSample& k, double cell0,
                           double epsilon, int max_iters, const RungeOptions& options = {});

/// One approximant per atom, all pole-free on a common K.
struct RandomRationalApproximant {
  ParameterSpace space;
  std::vector<RationalApproximant> per_atom;
  std::vector<ErrorCertificate> certificates;

  std::complex<double> operator()(std::size_t atom, std::complex<double> z) const;
};

struct RandomRungeOptions {
  double default_cell = 0.25;
  int max_iters = 16;
  double pole_clearance = 1e-9;
  RungeOptions runge;
};

/// Element j approximates every atom within epsilons[j] on K. Atom w uses
/// contour cell size min(radius[w] / 3, default_cell), where radius[w] is the
/// declared holomorphy radius of its payload around K.
std::vector<RandomRationalApproximant> random_runge_sequence(const RandomFunction& f,
                                                             const std::vector<double>& radius,
                                                             const CompactSetSample& k,
                                                             const std::vector<double>& epsilons,
                                                             const RandomRungeOptions& options = {});

/// Smallest distance from a pole to a sample of K (infinity without poles).
double pole_clearance(const RationalApproximant& r, const CompactSetSample& k);

}  // namespace rca
