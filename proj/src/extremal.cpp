#include "rca/extremal.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "rca/parallel.hpp"

namespace rca {

Eigen::ArrayXd siciak_at(const CompactSetSample& k, const PolynomialFamily& family, const PointMatrix& z,
                         const SiciakOptions& options) {
  if (family.dimension() != k.dimension() || z.cols() != k.dimension())
    throw InvalidArgument("siciak: dimensions of K, family and points differ");
  const Eigen::ArrayXd norms = family.values(k.points()).cwiseAbs().colwise().maxCoeff().transpose().array();

  // members kept, with the log-offset subtracted before dividing by the degree
  std::vector<Eigen::Index> used;
  std::vector<double> offset;
  for (Eigen::Index j = 0; j < family.size(); ++j) {
    if (family.degree(j) < 1 || !(norms(j) > 0)) continue;
    if (options.gated && norms(j) > 1 + options.gate_slack) continue;
    used.push_back(j);
    offset.push_back(options.gated ? 0.0 : std::log(norms(j)));
  }
  if (used.empty()) throw InvalidArgument("siciak: no family member of degree >= 1 is usable on K");

  Eigen::MatrixXcd coeffs(family.coefficients().rows(), static_cast<Eigen::Index>(used.size()));
  Eigen::ArrayXd shift(coeffs.cols()), inv_deg(coeffs.cols());
  for (std::size_t c = 0; c < used.size(); ++c) {
    const auto col = static_cast<Eigen::Index>(c);
    coeffs.col(col) = family.coefficients().col(used[c]);
    shift(col) = offset[c];
    inv_deg(col) = 1.0 / family.degree(used[c]);
  }

  constexpr Eigen::Index chunk = 256;
  constexpr Eigen::Index block = 2048;
  Eigen::ArrayXd best = Eigen::ArrayXd::Constant(z.rows(), -std::numeric_limits<double>::infinity());
  const auto chunks = static_cast<std::size_t>((z.rows() + chunk - 1) / chunk);
  parallel_for(chunks, [&](std::size_t ch) {
    const Eigen::Index lo = static_cast<Eigen::Index>(ch) * chunk;
    const Eigen::Index rows = std::min(chunk, z.rows() - lo);
    const Eigen::MatrixXcd basis = monomial_basis(z.middleRows(lo, rows), family.slots());
    for (Eigen::Index first = 0; first < coeffs.cols(); first += block) {
      const Eigen::Index width = std::min(block, coeffs.cols() - first);
      const Eigen::ArrayXXd logs = (basis * coeffs.middleCols(first, width)).cwiseAbs().array().log();
      const Eigen::ArrayXXd scaled =
          (logs.rowwise() - shift.segment(first, width).transpose()).rowwise() * inv_deg.segment(first, width).transpose();
      best.segment(lo, rows) = best.segment(lo, rows).max(scaled.rowwise().maxCoeff());
    }
  });
  return best.exp();
}

ScalarField siciak_estimate(const CompactSetSample& k, const PolynomialFamily& family, const Grid& grid,
                            const SiciakOptions& options) {
  if (grid.complex_dimension() != k.dimension()) throw InvalidArgument("grid and compact set differ in dimension");
  return {grid, siciak_at(k, family, grid.nodes(), options)};
}

ScalarField green_field(const ScalarField& phi) {
  if ((phi.values < 0).any()) throw InvalidArgument("green_field: negative extremal value");
  return {phi.grid, phi.values.log()};
}

double green_interval_oracle(std::complex<double> z) {
  const std::complex<double> root = std::sqrt(z * z - 1.0);
  std::complex<double> w = z + root;
  if (std::abs(w) < 1) w = z - root;
  return std::max(0.0, std::log(std::abs(w)));
}

std::vector<ScalarField> random_siciak(const RandomCompactSet& k, const PolynomialFamily& family, const Grid& grid,
                                       const SiciakOptions& options) {
  std::vector<std::optional<ScalarField>> out(k.space().size());
  parallel_for(out.size(), [&](std::size_t a) { out[a] = siciak_estimate(k.fiber(a), family, grid, options); });
  std::vector<ScalarField> fields;
  for (auto& f : out) fields.push_back(std::move(*f));
  return fields;
}

}  // namespace rca
