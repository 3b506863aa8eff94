#include "rca/hulls.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rca/parallel.hpp"

namespace rca {

PolynomialFamily::PolynomialFamily(int dimension, std::vector<MultiIndex> slots, Eigen::MatrixXcd coefficients,
                                   std::string descriptor)
    : dimension_(dimension),
      slots_(std::move(slots)),
      coefficients_(std::move(coefficients)),
      descriptor_(std::move(descriptor)) {
  if (dimension_ != 1 && dimension_ != 2) throw InvalidArgument("family dimension must be 1 or 2");
  if (static_cast<Eigen::Index>(slots_.size()) != coefficients_.rows())
    throw InvalidArgument("family: one coefficient row per slot required");
  for (const auto& s : slots_)
    if (dimension_ == 1 && s[1] != 0) throw InvalidArgument("family: z2 slot in a one-variable family");
  if (!all_finite(coefficients_)) throw InvalidArgument("family: non-finite coefficient");
  degrees_.resize(static_cast<std::size_t>(coefficients_.cols()));
  for (Eigen::Index j = 0; j < coefficients_.cols(); ++j) {
    int deg = -1;
    for (std::size_t s = 0; s < slots_.size(); ++s)
      if (coefficients_(static_cast<Eigen::Index>(s), j) != std::complex<double>(0))
        deg = std::max(deg, total_degree(slots_[s]));
    degrees_[static_cast<std::size_t>(j)] = deg;
  }
}

int PolynomialFamily::max_degree() const {
  return degrees_.empty() ? -1 : *std::max_element(degrees_.begin(), degrees_.end());
}

Polynomial PolynomialFamily::member(Eigen::Index j) const {
  if (j < 0 || j >= size()) throw InvalidArgument("family member index out of range");
  std::vector<Monomial> terms;
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    const auto c = coefficients_(static_cast<Eigen::Index>(s), j);
    if (c != std::complex<double>(0)) terms.push_back({slots_[s], c});
  }
  return Polynomial(dimension_, std::move(terms));
}

Eigen::MatrixXcd PolynomialFamily::values(const PointMatrix& pts) const {
  if (pts.cols() != dimension_) throw InvalidArgument("family evaluated on points of wrong dimension");
  return monomial_basis(pts, slots_) * coefficients_;
}

namespace {

double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

int lattice_half_width(double m, double step) { return static_cast<int>(std::floor(m / step + 1e-9)); }

void check_lattice_args(int dimension, int max_degree, double m, double step) {
  if (dimension != 1 && dimension != 2) throw InvalidArgument("family dimension must be 1 or 2");
  if (max_degree < 1) throw InvalidArgument("family max degree must be at least 1");
  if (!(m > 0)) throw InvalidArgument("coefficient bound must be positive");
  if (!(step > 0) || step > m) throw InvalidArgument("lattice step must satisfy 0 < step <= coefficient bound");
}

std::string lattice_descriptor(int n, int k, double m, double step, const FamilyOptions& o) {
  std::ostringstream s;
  s << "lattice(n=" << n << ",k=" << k << ",m=" << m << ",step=" << step;
  if (o.max_terms > 0) s << ",max_terms=" << o.max_terms;
  s << ")";
  return s.str();
}

// Next combination of `r` indices out of [0, n) in lexicographic order.
bool next_combination(std::vector<int>& c, int n) {
  const int r = static_cast<int>(c.size());
  int i = r - 1;
  while (i >= 0 && c[static_cast<std::size_t>(i)] == n - r + i) --i;
  if (i < 0) return false;
  ++c[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < r; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

}  // namespace

double lattice_family_size(int dimension, int max_degree, double coeff_bound, double lattice_step,
                           const FamilyOptions& options) {
  check_lattice_args(dimension, max_degree, coeff_bound, lattice_step);
  const int slots = static_cast<int>(graded_multi_indices(dimension, max_degree).size());
  const int half = lattice_half_width(coeff_bound, lattice_step);
  const double nonzero = double(2 * half + 1) * double(2 * half + 1) - 1;
  const int terms = options.max_terms > 0 ? std::min(options.max_terms, slots) : slots;
  double total = 0;
  for (int s = 0; s <= terms; ++s) total += binomial(slots, s) * std::pow(nonzero, s);
  if (options.exclude_constants) total -= 1 + (terms >= 1 ? nonzero : 0);
  return total;
}

PolynomialFamily enumerate_polynomial_family(int dimension, int max_degree, double coeff_bound,
                                             double lattice_step, const FamilyOptions& options) {
  const double count = lattice_family_size(dimension, max_degree, coeff_bound, lattice_step, options);
  if (count > static_cast<double>(options.member_cap)) {
    std::ostringstream msg;
    msg << "polynomial family would have " << count << " members, above the cap of " << options.member_cap
        << "; use a coarser lattice step, a lower degree or a max_terms limit";
    throw InvalidArgument(msg.str());
  }
  const auto slots = graded_multi_indices(dimension, max_degree);
  const int nslots = static_cast<int>(slots.size());
  const int half = lattice_half_width(coeff_bound, lattice_step);
  std::vector<std::complex<double>> values;
  for (int a = -half; a <= half; ++a)
    for (int b = -half; b <= half; ++b)
      if (a != 0 || b != 0) values.emplace_back(a * lattice_step, b * lattice_step);
  const int nv = static_cast<int>(values.size());

  Eigen::MatrixXcd coeffs = Eigen::MatrixXcd::Zero(nslots, static_cast<Eigen::Index>(std::max(count, 0.0)));
  Eigen::Index col = 0;
  const int terms = options.max_terms > 0 ? std::min(options.max_terms, nslots) : nslots;
  for (int s = 0; s <= terms; ++s) {
    if (s > 0 && nv == 0) break;
    std::vector<int> support(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) support[static_cast<std::size_t>(i)] = i;
    do {
      const bool constant_only = s == 0 || (s == 1 && support[0] == 0);
      if (options.exclude_constants && constant_only) continue;
      std::vector<int> digit(static_cast<std::size_t>(s), 0);
      while (true) {
        for (int i = 0; i < s; ++i)
          coeffs(support[static_cast<std::size_t>(i)], col) = values[static_cast<std::size_t>(digit[static_cast<std::size_t>(i)])];
        ++col;
        int pos = s - 1;
        while (pos >= 0 && ++digit[static_cast<std::size_t>(pos)] == nv) digit[static_cast<std::size_t>(pos--)] = 0;
        if (pos < 0) break;
      }
    } while (next_combination(support, nslots));
  }
  coeffs.conservativeResize(nslots, col);
  if (col == 0) throw InvalidArgument("polynomial family is empty: the lattice holds no nonzero coefficient");
  return PolynomialFamily(dimension, slots, std::move(coeffs),
                          lattice_descriptor(dimension, max_degree, coeff_bound, lattice_step, options));
}

PolynomialFamily monomial_family(int dimension, int max_degree) {
  if (max_degree < 1) throw InvalidArgument("monomial family needs degree at least 1");
  auto slots = graded_multi_indices(dimension, max_degree);
  slots.erase(slots.begin());
  const auto n = static_cast<Eigen::Index>(slots.size());
  return PolynomialFamily(dimension, slots, Eigen::MatrixXcd::Identity(n, n),
                          "monomials(n=" + std::to_string(dimension) + ",k=" + std::to_string(max_degree) + ")");
}

PolynomialFamily chebyshev_family(int max_degree) {
  if (max_degree < 1) throw InvalidArgument("chebyshev family needs degree at least 1");
  // T_{d+1} = 2 z T_d - T_{d-1}, ascending coefficients
  const Eigen::Index n = max_degree + 1;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  t(0, 0) = 1;
  t(1, 1) = 1;
  for (Eigen::Index d = 1; d + 1 < n; ++d) {
    t.col(d + 1).tail(n - 1) = 2 * t.col(d).head(n - 1);
    t.col(d + 1) -= t.col(d - 1);
  }
  return PolynomialFamily(1, graded_multi_indices(1, max_degree), t.rightCols(n - 1).cast<std::complex<double>>(),
                          "chebyshev(k=" + std::to_string(max_degree) + ")");
}

PolynomialFamily family_from_members(const std::vector<Polynomial>& members, std::string descriptor) {
  if (members.empty()) throw InvalidArgument("family needs at least one member");
  const int dim = members.front().dimension();
  int deg = 0;
  for (const auto& p : members) {
    if (p.dimension() != dim) throw InvalidArgument("family members differ in dimension");
    deg = std::max(deg, p.degree());
  }
  const auto slots = graded_multi_indices(dim, deg);
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(slots.size()),
                                              static_cast<Eigen::Index>(members.size()));
  for (std::size_t j = 0; j < members.size(); ++j)
    for (const auto& t : members[j].terms()) {
      const auto it = std::find(slots.begin(), slots.end(), t.exponent);
      if (it != slots.end()) c(it - slots.begin(), static_cast<Eigen::Index>(j)) += t.coeff;
    }
  return PolynomialFamily(dim, slots, std::move(c), std::move(descriptor));
}

PolynomialFamily merge(const PolynomialFamily& a, const PolynomialFamily& b) {
  if (a.dimension() != b.dimension()) throw InvalidArgument("cannot merge families of different dimension");
  const int deg = std::max({a.max_degree(), b.max_degree(), 0});
  const auto slots = graded_multi_indices(a.dimension(), deg);
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(slots.size()), a.size() + b.size());
  auto copy = [&](const PolynomialFamily& f, Eigen::Index offset) {
    for (std::size_t s = 0; s < f.slots().size(); ++s) {
      const auto row = std::find(slots.begin(), slots.end(), f.slots()[s]) - slots.begin();
      c.row(row).segment(offset, f.size()) += f.coefficients().row(static_cast<Eigen::Index>(s));
    }
  };
  copy(a, 0);
  copy(b, a.size());
  return PolynomialFamily(a.dimension(), slots, std::move(c), a.descriptor() + "+" + b.descriptor());
}

RationalFamily shifted_reciprocal_family(const std::vector<std::complex<double>>& centers) {
  RationalFamily r;
  for (auto c : centers)
    r.members.push_back({Polynomial::constant(1, 1.0), Polynomial(1, {Monomial{{1, 0}, 1.0}, Monomial{{0, 0}, -c}})});
  r.descriptor = "reciprocals(" + std::to_string(centers.size()) + ")";
  return r;
}

std::vector<std::complex<double>> lattice_centers(std::complex<double> center, double radius, double step) {
  if (!(step > 0) || !(radius >= 0)) throw InvalidArgument("lattice_centers: step must be positive");
  std::vector<std::complex<double>> out;
  const auto lo_x = static_cast<long>(std::ceil((center.real() - radius) / step));
  const auto hi_x = static_cast<long>(std::floor((center.real() + radius) / step));
  const auto lo_y = static_cast<long>(std::ceil((center.imag() - radius) / step));
  const auto hi_y = static_cast<long>(std::floor((center.imag() + radius) / step));
  for (long j = lo_y; j <= hi_y; ++j)
    for (long i = lo_x; i <= hi_x; ++i) {
      const std::complex<double> c(double(i) * step, double(j) * step);
      if (std::abs(c - center) <= radius) out.push_back(c);
    }
  return out;
}

RationalFamily quotient_family(const PolynomialFamily& numerators, const PolynomialFamily& denominators) {
  if (numerators.dimension() != denominators.dimension())
    throw InvalidArgument("quotient family: numerator and denominator dimensions differ");
  RationalFamily r;
  for (Eigen::Index i = 0; i < numerators.size(); ++i)
    for (Eigen::Index j = 0; j < denominators.size(); ++j) {
      auto q = denominators.member(j);
      if (q.is_zero()) continue;
      r.members.push_back({numerators.member(i), std::move(q)});
    }
  r.descriptor = "quotients(" + numerators.descriptor() + "/" + denominators.descriptor() + ")";
  return r;
}

namespace {

void check_dimensions(const CompactSetSample& k, int family_dim, const Grid& grid) {
  if (k.dimension() != grid.complex_dimension()) throw InvalidArgument("grid and compact set differ in dimension");
  if (family_dim != k.dimension()) throw InvalidArgument("family and compact set differ in dimension");
}

double point_norm(const PointMatrix& pts, Eigen::Index i) { return pts.row(i).norm(); }

// Indices of nodes that survive every sublevel constraint of the family,
// restricted to the closed ball of the given radius.
std::vector<Eigen::Index> polynomial_core(const CompactSetSample& k, const PolynomialFamily& family,
                                          const PointMatrix& nodes, double radius, double slack) {
  std::vector<Eigen::Index> active;
  for (Eigen::Index n = 0; n < nodes.rows(); ++n)
    if (point_norm(nodes, n) <= radius) active.push_back(n);

  const Eigen::ArrayXd k_max = family.values(k.points()).cwiseAbs2().colwise().maxCoeff().transpose().array();
  Eigen::ArrayXd limit = k_max * (1 + slack) * (1 + slack);
  for (Eigen::Index j = 0; j < family.size(); ++j)
    if (family.degree(j) < 1) limit(j) = std::numeric_limits<double>::infinity();

  constexpr Eigen::Index block = 512;
  constexpr std::size_t chunk = 1024;
  for (Eigen::Index first = 0; first < family.size() && !active.empty(); first += block) {
    const Eigen::Index width = std::min(block, family.size() - first);
    const Eigen::MatrixXcd c = family.coefficients().middleCols(first, width);
    const Eigen::ArrayXd lim = limit.segment(first, width);
    std::vector<char> keep(active.size(), 1);
    const std::size_t chunks = (active.size() + chunk - 1) / chunk;
    parallel_for(chunks, [&](std::size_t ch) {
      const std::size_t lo = ch * chunk;
      const std::size_t hi = std::min(active.size(), lo + chunk);
      PointMatrix pts(static_cast<Eigen::Index>(hi - lo), nodes.cols());
      for (std::size_t i = lo; i < hi; ++i) pts.row(static_cast<Eigen::Index>(i - lo)) = nodes.row(active[i]);
      const Eigen::ArrayXXd v = (monomial_basis(pts, family.slots()) * c).cwiseAbs2().array();
      for (Eigen::Index r = 0; r < v.rows(); ++r)
        keep[lo + static_cast<std::size_t>(r)] = (v.row(r).transpose() <= lim).all();
    });
    std::vector<Eigen::Index> next;
    for (std::size_t i = 0; i < active.size(); ++i)
      if (keep[i]) next.push_back(active[i]);
    active.swap(next);
  }
  return active;
}

MaskBits with_band(const CompactSetSample& k, const Grid& grid, const std::vector<Eigen::Index>& core,
                   const HullOptions& options) {
  const double tol = options.incidence_tolerance.value_or(grid.cell_diagonal());
  MaskBits bits = node_distances(k, grid) <= tol;
  for (auto n : core) bits(n) = true;
  return bits;
}

void check_radius(const CompactSetSample& k, double radius) {
  if (!(radius > 0)) throw InvalidArgument("hull radius must be positive");
  if (k.max_norm() > radius) throw InvalidArgument("hull radius too small: some samples of K lie outside the ball");
}

}  // namespace

GridMask sublevel_mask(const Polynomial& p, const CompactSetSample& k, const Grid& grid, double slack) {
  if (p.dimension() != k.dimension() || grid.complex_dimension() != k.dimension())
    throw InvalidArgument("sublevel_mask: dimensions differ");
  const double k_max = p.evaluate(k.points()).cwiseAbs().maxCoeff();
  const Eigen::ArrayXd values = p.evaluate(grid.nodes()).cwiseAbs().array();
  return GridMask(grid, (values <= k_max * (1 + slack)).eval());
}

HullEstimate polynomial_hull_estimate(const CompactSetSample& k, const PolynomialFamily& family, const Grid& grid,
                                      double radius, const HullOptions& options) {
  check_dimensions(k, family.dimension(), grid);
  check_radius(k, radius);
  const auto core = polynomial_core(k, family, grid.nodes(), radius, options.slack);
  return {GridMask(grid, with_band(k, grid, core, options)), family.descriptor(), radius};
}

bool singularity_check(const RationalFunction& r, const CompactSetSample& k, double threshold) {
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    const auto z = k.point(i);
    if (vanishes(r.numerator(z), r.denominator(z), threshold)) return true;
  }
  return false;
}

HullEstimate rational_hull_estimate(const CompactSetSample& k, const RationalFamily& rationals,
                                    const PolynomialFamily& family, const Grid& grid, double radius,
                                    const HullOptions& options) {
  check_dimensions(k, family.dimension(), grid);
  check_radius(k, radius);
  for (const auto& r : rationals.members) {
    validate_payload(r);
    if (r.numerator.dimension() != k.dimension()) throw InvalidArgument("rational member of wrong dimension");
  }
  const PointMatrix nodes = grid.nodes();
  auto core = polynomial_core(k, family, nodes, radius, options.slack);
  const double thr = options.singularity_threshold;
  for (const auto& r : rationals.members) {
    if (core.empty()) break;
    // r singular on K: the constraint is the polynomial hull itself
    if (singularity_check(r, k, thr)) continue;
    double k_max = 0;
    for (Eigen::Index i = 0; i < k.size(); ++i) {
      const auto z = k.point(i);
      k_max = std::max(k_max, std::abs(r.numerator(z) / r.denominator(z)));
    }
    const double limit = k_max * (1 + options.slack);
    std::vector<Eigen::Index> next;
    for (auto n : core) {
      const ComplexPoint z = nodes.row(n).transpose();
      const auto num = r.numerator(z);
      const auto den = r.denominator(z);
      if (!vanishes(num, den, thr) && std::abs(num / den) <= limit) next.push_back(n);
    }
    core.swap(next);
  }
  return {GridMask(grid, with_band(k, grid, core, options)), family.descriptor() + "&" + rationals.descriptor,
          radius};
}

std::vector<HullEstimate> random_hull(const RandomCompactSet& k, const PolynomialFamily& family, const Grid& grid,
                                      double radius, HullKind kind, const RationalFamily* rationals,
                                      const HullOptions& options) {
  if (kind == HullKind::rational && rationals == nullptr)
    throw InvalidArgument("random_hull: rational kind needs a rational family");
  std::vector<std::optional<HullEstimate>> out(k.space().size());
  parallel_for(out.size(), [&](std::size_t a) {
    out[a] = kind == HullKind::polynomial
                 ? polynomial_hull_estimate(k.fiber(a), family, grid, radius, options)
                 : rational_hull_estimate(k.fiber(a), *rationals, family, grid, radius, options);
  });
  std::vector<HullEstimate> result;
  for (auto& e : out) result.push_back(std::move(*e));
  return result;
}

}  // namespace rca
