#pragma once

// Turning atom-wise convergence into joint uniform convergence: for every
// atom pick the first index after which all remaining terms are within
// epsilon on the fiber, then splice the chosen terms together. Also an
// adaptive least-squares polynomial fitter certified atom by atom.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <variant>
#include <vector>

#include "rca/parameter_space.hpp"
#include "rca/runge.hpp"

namespace rca {

using SequenceTerm = std::variant<RandomFunction, RandomRationalApproximant>;

/// What a term is at one atom.
using AtomFunction = std::variant<FunctionPayload, RationalApproximant>;

const ParameterSpace& term_space(const SequenceTerm& term);
AtomFunction atom_function(const SequenceTerm& term, std::size_t atom);
std::complex<double> evaluate(const AtomFunction& f, const ComplexPoint& z);

class ApproximationSequence {
 public:
  ApproximationSequence(std::vector<SequenceTerm> terms, RandomFunction target, RandomCompactSet k);

  const ParameterSpace& space() const { return target_.space(); }
  const std::vector<SequenceTerm>& terms() const { return terms_; }
  const RandomFunction& target() const { return target_; }
  const RandomCompactSet& compact_set() const { return k_; }
  std::size_t size() const { return terms_.size(); }

 private:
  std::vector<SequenceTerm> terms_;
  RandomFunction target_;
  RandomCompactSet k_;
};

/// Fiber sup-norm errors, atoms x terms. A pole on the fiber counts as +inf.
Eigen::MatrixXd error_table(const ApproximationSequence& seq);

struct SelectionMap {
  ParameterSpace space;
  std::vector<std::size_t> index;  // 1-based term index per atom
  double epsilon = 0;
};

/// Selection from a precomputed error table. Throws ConvergenceError naming
/// every atom whose last term is still farther than epsilon.
SelectionMap select_from_errors(const Eigen::MatrixXd& errors, const ParameterSpace& space, double epsilon);

SelectionMap compute_selection(const ApproximationSequence& seq, double epsilon);

struct UniformizedFunction {
  ParameterSpace space;
  std::vector<AtomFunction> per_atom;
  SelectionMap selection;

  std::complex<double> operator()(std::size_t atom, const ComplexPoint& z) const;
};

/// One spliced function per epsilon; epsilons must be positive and nonincreasing.
std::vector<UniformizedFunction> uniformize(const ApproximationSequence& seq, const std::vector<double>& epsilons);

struct OkaWeilOptions {
  int max_degree = 16;
  /// Validation points per sample, the sample itself included.
  int validation_factor = 4;
  /// Grid nodes per axis allowed for the convexity check.
  int max_check_resolution = 400;
  /// Report uncertified atoms in the result instead of throwing.
  bool allow_exceptional = false;
};

struct OkaWeilResult {
  RandomFunction polynomials;
  std::vector<int> degrees;
  std::vector<double> validation_error;
  std::vector<bool> certified;
  double exceptional_weight = 0;
};

/// False when a flood fill of the sample finds a bounded complementary
/// component wider than the sample spacing.
bool polynomially_convex_proxy(const CompactSetSample& k, int max_resolution = 400);

/// Per atom, least-squares polynomial fits of increasing degree until the
/// error on a denser validation sample of the fiber drops below eps[atom].
OkaWeilResult oka_weil_random(const RandomFunction& f, const std::vector<double>& radius, const RandomCompactSet& k,
                              const std::vector<double>& eps, const OkaWeilOptions& options = {});

}  // namespace rca
