#include "rca/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "rca/parallel.hpp"

namespace rca {

const ParameterSpace& term_space(const SequenceTerm& term) {
  return std::visit([](const auto& t) -> const ParameterSpace& {
    if constexpr (std::is_same_v<std::decay_t<decltype(t)>, RandomFunction>)
      return t.space();
    else
      return t.space;
  }, term);
}

AtomFunction atom_function(const SequenceTerm& term, std::size_t atom) {
  if (const auto* f = std::get_if<RandomFunction>(&term)) return f->payload(atom);
  const auto& r = std::get<RandomRationalApproximant>(term);
  r.space.check_atom(atom);
  return r.per_atom[atom];
}

std::complex<double> evaluate(const AtomFunction& f, const ComplexPoint& z) {
  if (const auto* p = std::get_if<FunctionPayload>(&f)) return evaluate(*p, z);
  if (z.size() != 1) throw InvalidArgument("rational approximant evaluated at a point of wrong dimension");
  return std::get<RationalApproximant>(f)(z(0));
}

ApproximationSequence::ApproximationSequence(std::vector<SequenceTerm> terms, RandomFunction target,
                                             RandomCompactSet k)
    : terms_(std::move(terms)), target_(std::move(target)), k_(std::move(k)) {
  if (terms_.empty()) throw InvalidArgument("approximation sequence needs at least one term");
  if (!(k_.space() == target_.space())) throw InvalidArgument("target and compact set live on different spaces");
  for (const auto& t : terms_) {
    if (!(term_space(t) == target_.space())) throw InvalidArgument("sequence terms must share the target's space");
    if (const auto* r = std::get_if<RandomRationalApproximant>(&t)) {
      if (r->per_atom.size() != target_.space().size())
        throw InvalidArgument("rational approximant term with the wrong number of atoms");
      if (k_.dimension() != 1) throw InvalidArgument("rational approximant terms need one-variable fibers");
    }
  }
}

Eigen::MatrixXd error_table(const ApproximationSequence& seq) {
  const std::size_t atoms = seq.space().size();
  Eigen::MatrixXd table(static_cast<Eigen::Index>(atoms), static_cast<Eigen::Index>(seq.size()));
  parallel_for(atoms, [&](std::size_t a) {
    const auto& fiber = seq.compact_set().fiber(a);
    Eigen::VectorXcd target(fiber.size());
    for (Eigen::Index i = 0; i < fiber.size(); ++i) target(i) = evaluate(seq.target().payload(a), fiber.point(i));
    for (std::size_t j = 0; j < seq.size(); ++j) {
      const AtomFunction g = atom_function(seq.terms()[j], a);
      double err = 0;
      try {
        for (Eigen::Index i = 0; i < fiber.size(); ++i)
          err = std::max(err, std::abs(evaluate(g, fiber.point(i)) - target(i)));
      } catch (const PoleError&) {
        err = std::numeric_limits<double>::infinity();
      }
      table(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j)) = err;
    }
  });
  return table;
}

SelectionMap select_from_errors(const Eigen::MatrixXd& errors, const ParameterSpace& space, double epsilon) {
  if (!(epsilon > 0)) throw InvalidArgument("selection epsilon must be positive");
  if (errors.rows() != static_cast<Eigen::Index>(space.size()) || errors.cols() < 1)
    throw InvalidArgument("error table must have one row per atom and at least one column");
  SelectionMap map{space, std::vector<std::size_t>(space.size()), epsilon};
  std::string failed;
  for (std::size_t a = 0; a < space.size(); ++a) {
    // least n with every term n..J inside epsilon
    auto n = static_cast<std::size_t>(errors.cols()) + 1;
    while (n > 1 && errors(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(n - 2)) <= epsilon) --n;
    if (n == static_cast<std::size_t>(errors.cols()) + 1) failed += (failed.empty() ? "" : ", ") + space.label(a);
    map.index[a] = n;
  }
  if (!failed.empty()) {
    std::ostringstream msg;
    msg << "selection: no tail of the " << errors.cols() << " terms stays within " << epsilon
        << " for atoms: " << failed;
    throw ConvergenceError(msg.str());
  }
  return map;
}

SelectionMap compute_selection(const ApproximationSequence& seq, double epsilon) {
  return select_from_errors(error_table(seq), seq.space(), epsilon);
}

std::complex<double> UniformizedFunction::operator()(std::size_t atom, const ComplexPoint& z) const {
  space.check_atom(atom);
  return evaluate(per_atom[atom], z);
}

std::vector<UniformizedFunction> uniformize(const ApproximationSequence& seq, const std::vector<double>& epsilons) {
  if (epsilons.empty()) throw InvalidArgument("uniformize: empty epsilon sequence");
  for (std::size_t j = 0; j < epsilons.size(); ++j)
    if (!(epsilons[j] > 0) || (j > 0 && epsilons[j] > epsilons[j - 1]))
      throw InvalidArgument("uniformize: epsilons must be positive and nonincreasing");
  const Eigen::MatrixXd errors = error_table(seq);
  std::vector<UniformizedFunction> out;
  for (double eps : epsilons) {
    SelectionMap map = select_from_errors(errors, seq.space(), eps);
    UniformizedFunction f{seq.space(), {}, map};
    for (std::size_t a = 0; a < seq.space().size(); ++a)
      f.per_atom.push_back(atom_function(seq.terms()[map.index[a] - 1], a));
    out.push_back(std::move(f));
  }
  return out;
}

namespace {

std::vector<std::complex<double>> values_of(const CompactSetSample& k) {
  std::vector<std::complex<double>> z(static_cast<std::size_t>(k.size()));
  for (Eigen::Index i = 0; i < k.size(); ++i) z[static_cast<std::size_t>(i)] = k.points()(i, 0);
  return z;
}

// Index of the nearest other sample for every sample; -1 for a lone point.
std::vector<Eigen::Index> nearest_neighbours(const std::vector<std::complex<double>>& z) {
  std::vector<Eigen::Index> nn(z.size(), -1);
  for (std::size_t i = 0; i < z.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double d = std::norm(z[i] - z[j]);
      if (j != i && d > 0 && d < best) {
        best = d;
        nn[i] = static_cast<Eigen::Index>(j);
      }
    }
  }
  return nn;
}

double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Least-squares fit in the basis ((z - c) / s)^j, expanded to monomials.
Polynomial fit(const std::vector<std::complex<double>>& z, const Eigen::VectorXcd& values, int degree,
               std::complex<double> c, double s) {
  const auto n = static_cast<Eigen::Index>(z.size());
  Eigen::MatrixXcd v(n, degree + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto w = (z[static_cast<std::size_t>(i)] - c) / s;
    std::complex<double> p = 1;
    for (int j = 0; j <= degree; ++j) {
      v(i, j) = p;
      p *= w;
    }
  }
  const Eigen::VectorXcd a = v.colPivHouseholderQr().solve(values);
  Eigen::VectorXcd mono = Eigen::VectorXcd::Zero(degree + 1);
  for (int j = 0; j <= degree; ++j) {
    const auto aj = a(j) / std::pow(s, j);
    for (int i = 0; i <= j; ++i) mono(i) += aj * binomial(j, i) * std::pow(-c, j - i);
  }
  return Polynomial::dense(mono);
}

}  // namespace

bool polynomially_convex_proxy(const CompactSetSample& k, int max_resolution) {
  if (k.dimension() != 1) throw InvalidArgument("convexity check needs a one-variable set");
  const auto z = values_of(k);
  const auto nn = nearest_neighbours(z);
  double gap = 0;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (nn[i] >= 0) gap = std::max(gap, std::abs(z[i] - z[static_cast<std::size_t>(nn[i])]));
  if (gap == 0) return true;  // a single point
  double lo_x = z[0].real(), hi_x = lo_x, lo_y = z[0].imag(), hi_y = lo_y;
  for (auto p : z) {
    lo_x = std::min(lo_x, p.real());
    hi_x = std::max(hi_x, p.real());
    lo_y = std::min(lo_y, p.imag());
    hi_y = std::max(hi_y, p.imag());
  }
  // spacing chosen so the cell diagonal equals the widest sample gap
  const double h = gap / std::sqrt(2.0);
  const double pad = 2 * gap;
  auto resolution = [&](double lo, double hi) {
    return std::clamp(static_cast<int>(std::ceil((hi - lo + 2 * pad) / h)), 2, max_resolution);
  };
  const Grid grid({{lo_x - pad, hi_x + pad}, {lo_y - pad, hi_y + pad}},
                  {resolution(lo_x, hi_x), resolution(lo_y, hi_y)});
  const double tol = std::max(grid.cell_diagonal(), gap);
  return subset_violations(fill_oracle_1d(k, grid, std::optional<double>(tol)), incidence_mask(k, grid, tol)) == 0;
}

OkaWeilResult oka_weil_random(const RandomFunction& f, const std::vector<double>& radius, const RandomCompactSet& k,
                              const std::vector<double>& eps, const OkaWeilOptions& options) {
  const std::size_t atoms = f.space().size();
  if (!(k.space() == f.space())) throw InvalidArgument("oka_weil_random: function and compact set spaces differ");
  if (k.dimension() != 1) throw InvalidArgument("oka_weil_random: one-variable fibers only");
  if (radius.size() != atoms || eps.size() != atoms)
    throw InvalidArgument("oka_weil_random: one holomorphy radius and one epsilon per atom");
  for (std::size_t a = 0; a < atoms; ++a)
    if (!(radius[a] > 0) || !(eps[a] > 0)) throw InvalidArgument("oka_weil_random: radii and epsilons must be positive");
  if (options.max_degree < 0 || options.validation_factor < 1)
    throw InvalidArgument("oka_weil_random: bad degree cap or validation factor");

  std::string not_convex;
  for (std::size_t a = 0; a < atoms; ++a)
    if (!polynomially_convex_proxy(k.fiber(a), options.max_check_resolution))
      not_convex += (not_convex.empty() ? "" : ", ") + f.space().label(a);
  if (!not_convex.empty())
    throw InvalidArgument("oka_weil_random: fiber not polynomially convex at sample resolution for atoms: " +
                          not_convex);

  std::vector<std::optional<Polynomial>> fits(atoms);
  OkaWeilResult result{f, std::vector<int>(atoms, -1), std::vector<double>(atoms, 0.0),
                       std::vector<bool>(atoms, false), 0.0};
  parallel_for(atoms, [&](std::size_t a) {
    const auto z = values_of(k.fiber(a));
    const auto nn = nearest_neighbours(z);
    const auto& payload = f.payload(a);
    Eigen::VectorXcd values(static_cast<Eigen::Index>(z.size()));
    for (std::size_t i = 0; i < z.size(); ++i) values(static_cast<Eigen::Index>(i)) = evaluate(payload, point(z[i]));

    // samples plus points part of the way to each nearest neighbour
    std::vector<std::complex<double>> check;
    for (std::size_t i = 0; i < z.size(); ++i) {
      check.push_back(z[i]);
      if (nn[i] < 0) continue;
      const auto step = z[static_cast<std::size_t>(nn[i])] - z[i];
      for (int t = 1; t < options.validation_factor; ++t) {
        const auto off = step * (double(t) / options.validation_factor);
        if (std::abs(off) <= radius[a] / 2) check.push_back(z[i] + off);
      }
    }
    Eigen::VectorXcd truth(static_cast<Eigen::Index>(check.size()));
    for (std::size_t i = 0; i < check.size(); ++i) truth(static_cast<Eigen::Index>(i)) = evaluate(payload, point(check[i]));

    std::complex<double> c = 0;
    for (auto p : z) c += p;
    c /= double(z.size());
    double s = 0;
    for (auto p : z) s = std::max(s, std::abs(p - c));
    if (s == 0) s = 1;

    const int cap = std::min(options.max_degree, static_cast<int>(z.size()) - 1);
    double best = std::numeric_limits<double>::infinity();
    for (int d = 0; d <= cap; ++d) {
      Polynomial p = fit(z, values, d, c, s);
      double err = 0;
      for (std::size_t i = 0; i < check.size(); ++i)
        err = std::max(err, std::abs(p(check[i]) - truth(static_cast<Eigen::Index>(i))));
      if (err < best || err < eps[a]) {
        best = err;
        fits[a] = std::move(p);
        result.degrees[a] = d;
        result.validation_error[a] = err;
      }
      if (err < eps[a]) {
        result.certified[a] = true;
        break;
      }
    }
  });

  std::vector<FunctionPayload> payloads;
  std::string failed;
  for (std::size_t a = 0; a < atoms; ++a) {
    payloads.emplace_back(*fits[a]);
    if (!result.certified[a]) {
      result.exceptional_weight += f.space().weight(a);
      std::ostringstream why;
      why << f.space().label(a) << " (error " << result.validation_error[a] << " at degree " << result.degrees[a] << ")";
      failed += (failed.empty() ? "" : ", ") + why.str();
    }
  }
  if (!failed.empty() && !options.allow_exceptional)
    throw ConvergenceError("oka_weil_random: no certified polynomial within the degree cap for atoms: " + failed);
  result.polynomials = RandomFunction(f.space(), std::move(payloads));
  return result;
}

}  // namespace rca
