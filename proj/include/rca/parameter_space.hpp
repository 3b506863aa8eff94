#pragma once

// Finite weighted parameter spaces and the random functions and random
// compact sets defined over them. Every subset of a finite atom set is
// measurable, so measurability is bookkeeping here.

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rca/geometry.hpp"
#include "rca/polynomial.hpp"

namespace rca {

/// Atom i carries label labels[i] and mass weights[i] >= 0.
class ParameterSpace {
 public:
  ParameterSpace(std::vector<std::string> labels, Eigen::VectorXd weights);
  /// n atoms labelled w0..w{n-1}, unit weights.
  static ParameterSpace uniform(std::size_t n);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t atom) const;
  double weight(std::size_t atom) const;
  const Eigen::VectorXd& weights() const { return weights_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t index_of(std::string_view label) const;
  void check_atom(std::size_t atom) const;

  bool operator==(const ParameterSpace& other) const {
    return labels_ == other.labels_ && weights_ == other.weights_;
  }

 private:
  std::vector<std::string> labels_;
  Eigen::VectorXd weights_;
};

struct RationalFunction {
  Polynomial numerator;
  Polynomial denominator;

  bool operator==(const RationalFunction&) const = default;
};

/// z -> 1 / (z - center), one variable.
struct ShiftedReciprocal {
  std::complex<double> center;

  bool operator==(const ShiftedReciprocal&) const = default;
};

/// Values known only on a finite point list.
struct TabulatedFunction {
  PointMatrix points;
  Eigen::VectorXcd values;

  bool operator==(const TabulatedFunction& o) const {
    return points.rows() == o.points.rows() && points.cols() == o.points.cols() &&
           points == o.points && values == o.values;
  }
};

using FunctionPayload = std::variant<Polynomial, RationalFunction, ShiftedReciprocal, TabulatedFunction>;

/// Relative threshold below which a denominator counts as vanishing.
inline constexpr double kPoleThreshold = 1e-12;

/// True iff |den| < threshold * (1 + |num|).
inline bool vanishes(std::complex<double> num, std::complex<double> den, double threshold) {
  return std::abs(den) < threshold * (1.0 + std::abs(num));
}

/// Throws PoleError at a pole and InvalidArgument off a tabulated point list.
std::complex<double> evaluate(const FunctionPayload& f, const ComplexPoint& z);
int payload_dimension(const FunctionPayload& f);
void validate_payload(const FunctionPayload& f);

class RandomFunction {
 public:
  RandomFunction(ParameterSpace space, std::vector<FunctionPayload> payloads);
  /// The same payload on every atom.
  static RandomFunction constant(ParameterSpace space, const FunctionPayload& payload);

  const ParameterSpace& space() const { return space_; }
  const FunctionPayload& payload(std::size_t atom) const;
  const std::vector<FunctionPayload>& payloads() const { return payloads_; }

 private:
  ParameterSpace space_;
  std::vector<FunctionPayload> payloads_;
};

class RandomCompactSet {
 public:
  RandomCompactSet(ParameterSpace space, std::vector<CompactSetSample> fibers);
  static RandomCompactSet constant(ParameterSpace space, const CompactSetSample& fiber);

  const ParameterSpace& space() const { return space_; }
  const CompactSetSample& fiber(std::size_t atom) const;
  const std::vector<CompactSetSample>& fibers() const { return fibers_; }
  int dimension() const { return fibers_.front().dimension(); }

 private:
  ParameterSpace space_;
  std::vector<CompactSetSample> fibers_;
};

std::complex<double> eval_random_function(const RandomFunction& f, std::size_t atom,
                                          const ComplexPoint& z);

/// (atom, z) lies in the graph of K up to `tol`: dist(z, K(atom)) <= tol.
bool graph_membership(const RandomCompactSet& k, std::size_t atom, const ComplexPoint& z, double tol);

/// Atoms whose fiber contains z up to `tol`, in atom order.
std::vector<std::size_t> preimage_of_point(const RandomCompactSet& k, const ComplexPoint& z, double tol);

/// max over the fiber samples of |g(atom, z)|.
double sup_norm_on_fiber(const RandomFunction& g, std::size_t atom, const RandomCompactSet& k);

struct SeparabilityWitness {
  PointMatrix points;  // deduplicated union of all fibers, lexicographic order
  double max_gap = 0;  // largest distance from a fiber point to the witness set
  bool verified = false;
};

SeparabilityWitness uniform_separability_witness(const RandomCompactSet& k, double tol);

}  // namespace rca
