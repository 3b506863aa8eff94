#include "rca/parameter_space.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace rca {

ParameterSpace::ParameterSpace(std::vector<std::string> labels, Eigen::VectorXd weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
  if (labels_.empty()) throw InvalidArgument("parameter space needs at least one atom");
  if (static_cast<Eigen::Index>(labels_.size()) != weights_.size())
    throw InvalidArgument("one weight per atom required");
  if ((weights_.array() < 0).any() || !weights_.allFinite())
    throw InvalidArgument("atom weights must be finite and nonnegative");
  if (!(weights_.array() > 0).any()) throw InvalidArgument("at least one atom weight must be positive");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) throw InvalidArgument("atom labels must be distinct");
}

ParameterSpace ParameterSpace::uniform(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("w" + std::to_string(i));
  return ParameterSpace(std::move(labels), Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)));
}

void ParameterSpace::check_atom(std::size_t atom) const {
  if (atom >= labels_.size()) throw InvalidArgument("unknown atom index " + std::to_string(atom));
}

const std::string& ParameterSpace::label(std::size_t atom) const {
  check_atom(atom);
  return labels_[atom];
}

double ParameterSpace::weight(std::size_t atom) const {
  check_atom(atom);
  return weights_(static_cast<Eigen::Index>(atom));
}

std::size_t ParameterSpace::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw InvalidArgument("unknown atom '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

namespace {

struct Evaluator {
  const ComplexPoint& z;

  std::complex<double> operator()(const Polynomial& p) const { return p(z); }

  std::complex<double> operator()(const RationalFunction& r) const {
    const auto num = r.numerator(z);
    const auto den = r.denominator(z);
    if (vanishes(num, den, kPoleThreshold)) throw PoleError("rational payload evaluated at a pole");
    return num / den;
  }

  std::complex<double> operator()(const ShiftedReciprocal& s) const {
    if (z.size() != 1) throw InvalidArgument("shifted reciprocal is a one-variable function");
    const auto den = z(0) - s.center;
    if (vanishes(1.0, den, kPoleThreshold)) throw PoleError("shifted reciprocal evaluated at its pole");
    return 1.0 / den;
  }

  std::complex<double> operator()(const TabulatedFunction& t) const {
    if (z.size() != t.points.cols()) throw InvalidArgument("tabulated payload: dimension mismatch");
    for (Eigen::Index i = 0; i < t.points.rows(); ++i)
      if (t.points.row(i).transpose() == z) return t.values(i);
    throw InvalidArgument("tabulated payload has no value at the requested point");
  }
};

}  // namespace

std::complex<double> evaluate(const FunctionPayload& f, const ComplexPoint& z) {
  return std::visit(Evaluator{z}, f);
}

int payload_dimension(const FunctionPayload& f) {
  struct {
    int operator()(const Polynomial& p) const { return p.dimension(); }
    int operator()(const RationalFunction& r) const { return r.numerator.dimension(); }
    int operator()(const ShiftedReciprocal&) const { return 1; }
    int operator()(const TabulatedFunction& t) const { return static_cast<int>(t.points.cols()); }
  } visitor;
  return std::visit(visitor, f);
}

void validate_payload(const FunctionPayload& f) {
  if (const auto* r = std::get_if<RationalFunction>(&f)) {
    if (r->denominator.is_zero()) throw InvalidArgument("rational payload with zero denominator");
    if (r->numerator.dimension() != r->denominator.dimension())
      throw InvalidArgument("rational payload: numerator and denominator differ in dimension");
  }
  if (const auto* t = std::get_if<TabulatedFunction>(&f)) {
    if (t->points.rows() != t->values.size())
      throw InvalidArgument("tabulated payload: one value per point required");
  }
}

RandomFunction::RandomFunction(ParameterSpace space, std::vector<FunctionPayload> payloads)
    : space_(std::move(space)), payloads_(std::move(payloads)) {
  if (payloads_.size() != space_.size()) throw InvalidArgument("exactly one payload per atom required");
  for (const auto& p : payloads_) validate_payload(p);
}

RandomFunction RandomFunction::constant(ParameterSpace space, const FunctionPayload& payload) {
  const std::size_t n = space.size();
  return RandomFunction(std::move(space), std::vector<FunctionPayload>(n, payload));
}

const FunctionPayload& RandomFunction::payload(std::size_t atom) const {
  space_.check_atom(atom);
  return payloads_[atom];
}

RandomCompactSet::RandomCompactSet(ParameterSpace space, std::vector<CompactSetSample> fibers)
    : space_(std::move(space)), fibers_(std::move(fibers)) {
  if (fibers_.size() != space_.size()) throw InvalidArgument("exactly one fiber per atom required");
  for (const auto& f : fibers_)
    if (f.dimension() != fibers_.front().dimension())
      throw InvalidArgument("all fibers must share one dimension");
}

RandomCompactSet RandomCompactSet::constant(ParameterSpace space, const CompactSetSample& fiber) {
  const std::size_t n = space.size();
  return RandomCompactSet(std::move(space), std::vector<CompactSetSample>(n, fiber));
}

const CompactSetSample& RandomCompactSet::fiber(std::size_t atom) const {
  space_.check_atom(atom);
  return fibers_[atom];
}

std::complex<double> eval_random_function(const RandomFunction& f, std::size_t atom,
                                          const ComplexPoint& z) {
  return evaluate(f.payload(atom), z);
}

bool graph_membership(const RandomCompactSet& k, std::size_t atom, const ComplexPoint& z, double tol) {
  if (!(tol >= 0)) throw InvalidArgument("membership tolerance must be nonnegative");
  return distance_to_set(z, k.fiber(atom)) <= tol;
}

std::vector<std::size_t> preimage_of_point(const RandomCompactSet& k, const ComplexPoint& z, double tol) {
  if (!(tol >= 0)) throw InvalidArgument("membership tolerance must be nonnegative");
  std::vector<std::size_t> atoms;
  for (std::size_t a = 0; a < k.space().size(); ++a)
    if (distance_to_set(z, k.fiber(a)) <= tol) atoms.push_back(a);
  return atoms;
}

double sup_norm_on_fiber(const RandomFunction& g, std::size_t atom, const RandomCompactSet& k) {
  const auto& fiber = k.fiber(atom);
  const auto& payload = g.payload(atom);
  double sup = 0;
  for (Eigen::Index i = 0; i < fiber.size(); ++i) sup = std::max(sup, std::abs(evaluate(payload, fiber.point(i))));
  return sup;
}

SeparabilityWitness uniform_separability_witness(const RandomCompactSet& k, double tol) {
  if (!(tol > 0)) throw InvalidArgument("separability tolerance must be positive");
  const int dim = k.dimension();
  using Key = std::tuple<double, double, double, double>;
  std::set<Key> keys;
  for (const auto& fiber : k.fibers())
    for (Eigen::Index i = 0; i < fiber.size(); ++i) {
      const auto& p = fiber.points();
      keys.emplace(p(i, 0).real(), p(i, 0).imag(), dim == 2 ? p(i, 1).real() : 0.0,
                   dim == 2 ? p(i, 1).imag() : 0.0);
    }
  SeparabilityWitness w;
  w.points.resize(static_cast<Eigen::Index>(keys.size()), dim);
  Eigen::Index row = 0;
  for (const auto& [a, b, c, d] : keys) {
    w.points(row, 0) = {a, b};
    if (dim == 2) w.points(row, 1) = {c, d};
    ++row;
  }
  const CompactSetSample witness(w.points);
  for (const auto& fiber : k.fibers())
    for (Eigen::Index i = 0; i < fiber.size(); ++i)
      w.max_gap = std::max(w.max_gap, distance_to_set(fiber.point(i), witness));
  w.verified = w.max_gap <= tol;
  return w;
}

}  // namespace rca
