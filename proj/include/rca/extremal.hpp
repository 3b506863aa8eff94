#pragma once

// Lower estimates of the Siciak extremal function
//   Phi_K(z) = sup |p(z)|^(1/deg p) over p with deg p >= 1 and |p| <= 1 on K,
// taken over a finite polynomial family, and of the Green function log Phi_K.

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "rca/geometry.hpp"
#include "rca/hulls.hpp"
#include "rca/parameter_space.hpp"

namespace rca {

/// One extended real per grid node. +infinity is a legal value.
struct ScalarField {
  Grid grid;
  Eigen::ArrayXd values;
};

struct SiciakOptions {
  /// Use members with max_K |p| <= 1 as they are instead of normalizing.
  bool gated = false;
  double gate_slack = 1e-12;
};

/// max over members of (|p(z)| / max_K |p|)^(1/deg p) at every row of `z`.
/// Members of degree 0 or vanishing on every sample are skipped.
Eigen::ArrayXd siciak_at(const CompactSetSample& k, const PolynomialFamily& family, const PointMatrix& z,
                         const SiciakOptions& options = {});

ScalarField siciak_estimate(const CompactSetSample& k, const PolynomialFamily& family, const Grid& grid,
                            const SiciakOptions& options = {});

/// Pointwise natural log; log 0 is -infinity.
ScalarField green_field(const ScalarField& phi);

/// Green function of [-1, 1] with pole at infinity: log|z + sqrt(z^2 - 1)|
/// on the branch where the modulus is at least 1.
double green_interval_oracle(std::complex<double> z);

std::vector<ScalarField> random_siciak(const RandomCompactSet& k, const PolynomialFamily& family, const Grid& grid,
                                       const SiciakOptions& options = {});

}  // namespace rca
