#include "rca/jobs.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rca/errors.hpp"
#include "rca/extremal.hpp"
#include "rca/hulls.hpp"
#include "rca/parameter_space.hpp"
#include "rca/runge.hpp"
#include "rca/selection.hpp"

namespace rca::jobs {

namespace fs = std::filesystem;
using cd = std::complex<double>;

namespace {

// Typed view of one config object. Every key read is recorded so that
// done() can reject keys nobody asked for.
class Node {
 public:
  Node(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const Json& json() const { return *j_; }
  const std::string& path() const { return path_; }

  void require_object() const {
    if (!j_->is_object()) fail("expected an object");
  }

  bool has(const std::string& key) const {
    require_object();
    used_.insert(key);
    return j_->contains(key);
  }

  Node at(const std::string& key) const {
    if (!has(key)) fail("missing required key '" + key + "'");
    return Node((*j_)[key], path_ + "." + key);
  }

  double number(const std::string& key) const {
    const Node n = at(key);
    if (!n.json().is_number()) n.fail("expected a number");
    const double v = n.json().get<double>();
    if (!std::isfinite(v)) n.fail("expected a finite number");
    return v;
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  double positive(const std::string& key) const {
    const double v = number(key);
    if (!(v > 0)) at(key).fail("must be positive");
    return v;
  }
  double positive(const std::string& key, double fallback) const { return has(key) ? positive(key) : fallback; }

  int integer(const std::string& key) const {
    const Node n = at(key);
    if (!n.json().is_number_integer()) n.fail("expected an integer");
    const auto v = n.json().get<long long>();
    if (v < -1'000'000'000 || v > 1'000'000'000) n.fail("integer out of range");
    return static_cast<int>(v);
  }
  int integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }

  int count(const std::string& key, int lo, int hi) const {
    const int v = integer(key);
    if (v < lo || v > hi) at(key).fail("must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }
  int count(const std::string& key, int lo, int hi, int fallback) const {
    return has(key) ? count(key, lo, hi) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const Node n = at(key);
    if (!n.json().is_boolean()) n.fail("expected true or false");
    return n.json().get<bool>();
  }

  std::string string(const std::string& key) const {
    const Node n = at(key);
    if (!n.json().is_string()) n.fail("expected a string");
    return n.json().get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) const {
    return has(key) ? string(key) : fallback;
  }

  std::vector<Node> array(const std::string& key) const { return at(key).items(); }

  std::vector<Node> items() const {
    if (!j_->is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < j_->size(); ++i) out.emplace_back((*j_)[i], path_ + "[" + std::to_string(i) + "]");
    return out;
  }

  double as_number() const {
    if (!j_->is_number() || !std::isfinite(j_->get<double>())) fail("expected a finite number");
    return j_->get<double>();
  }

  void done() const {
    require_object();
    for (const auto& [key, value] : j_->items())
      if (!used_.count(key)) fail("unknown key '" + key + "'");
  }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_ + ": " + what); }

 private:
  const Json* j_;
  std::string path_;
  mutable std::set<std::string> used_;
};

cd complex_of(const Node& n) {
  const auto parts = n.items();
  if (parts.size() != 2) n.fail("a complex number is written [re, im]");
  return {parts[0].as_number(), parts[1].as_number()};
}

cd complex_at(const Node& n, const std::string& key, cd fallback) {
  return n.has(key) ? complex_of(n.at(key)) : fallback;
}

Json to_json(cd z) { return Json::array({z.real(), z.imag()}); }

// Non-finite reals have no JSON spelling; they are written as strings.
Json real_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

Json vector_json(const Eigen::VectorXcd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
  return a;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ComplexPoint point_of(const Node& n) {
  const Json& j = n.json();
  if (j.is_array() && j.size() == 2 && j[0].is_array()) return point(complex_of(n.items()[0]), complex_of(n.items()[1]));
  return point(complex_of(n));
}

PointMatrix points_of(const Node& n) {
  const auto items = n.items();
  if (items.empty()) n.fail("expected at least one point");
  std::vector<ComplexPoint> pts;
  for (const auto& it : items) pts.push_back(point_of(it));
  PointMatrix m(static_cast<Eigen::Index>(pts.size()), pts.front().size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].size() != m.cols()) items[i].fail("points differ in dimension");
    m.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  }
  return m;
}

Json point_json(const ComplexPoint& z) {
  if (z.size() == 1) return to_json(z(0));
  return Json::array({to_json(z(0)), to_json(z(1))});
}

// ---- parsing of the shared building blocks ----

CompactSetSample parse_set(const Node& n, const fs::path& base, int depth = 0) {
  const std::string kind = n.string("kind");
  const std::string label = n.string("label", "");
  CompactSetSample k = [&]() -> CompactSetSample {
    if (kind == "points") return CompactSetSample(points_of(n.at("points")));
    if (kind == "circle")
      return samples::circle<double>(complex_at(n, "center", 0.0), n.positive("radius"), n.count("count", 1, 1'000'000));
    if (kind == "disc")
      return samples::disc<double>(complex_at(n, "center", 0.0), n.positive("radius"), n.count("boundary", 1, 1'000'000),
                                   n.count("interior", 0, 1'000'000, 0));
    if (kind == "segment")
      return samples::segment<double>(complex_of(n.at("from")), complex_of(n.at("to")), n.count("count", 2, 1'000'000));
    if (kind == "annulus")
      return samples::annulus<double>(complex_at(n, "center", 0.0), n.positive("inner"), n.positive("outer"),
                                      n.count("per_circle", 1, 1'000'000), n.count("rings", 2, 10'000));
    if (kind == "torus")
      return samples::torus(n.positive("r1"), n.positive("r2"), n.count("n1", 1, 100'000), n.count("n2", 1, 100'000));
    if (kind == "file") {
      if (depth > 4) n.fail("set files nest too deeply");
      const fs::path p = base / n.string("path");
      Json j;
      try {
        j = load_json(p);
      } catch (const std::exception& e) {
        n.fail(e.what());
      }
      const Node inner(j, p.string());
      return parse_set(inner, p.parent_path(), depth + 1);
    }
    n.fail("unknown set kind '" + kind + "'");
  }();
  n.done();
  if (!label.empty()) k = CompactSetSample(k.points(), label);
  return k;
}

Polynomial parse_polynomial(const Node& n) {
  const int dim = n.count("dimension", 1, 2, 1);
  std::vector<Monomial> terms;
  if (n.has("coefficients")) {
    if (dim != 1) n.fail("ascending coefficient lists are one-variable; use terms");
    int e = 0;
    for (const auto& c : n.array("coefficients")) terms.push_back({{e++, 0}, complex_of(c)});
  }
  if (n.has("terms")) {
    for (const auto& t : n.array("terms")) {
      const auto exp = t.array("exponent");
      if (exp.size() != static_cast<std::size_t>(dim)) t.fail("exponent length must equal the dimension");
      MultiIndex a{0, 0};
      for (int v = 0; v < dim; ++v) {
        const double e = exp[static_cast<std::size_t>(v)].as_number();
        if (e < 0 || e != std::floor(e) || e > 1000) t.fail("exponents are integers in [0, 1000]");
        a[static_cast<std::size_t>(v)] = static_cast<int>(e);
      }
      terms.push_back({a, complex_of(t.at("coeff"))});
      t.done();
    }
  }
  if (!n.has("coefficients") && !n.has("terms")) n.fail("polynomial needs coefficients or terms");
  return Polynomial(dim, std::move(terms));
}

FunctionPayload parse_payload(const Node& n) {
  const std::string kind = n.string("kind");
  FunctionPayload p = [&]() -> FunctionPayload {
    if (kind == "polynomial") return parse_polynomial(n);
    if (kind == "constant") return Polynomial::constant(n.count("dimension", 1, 2, 1), complex_of(n.at("value")));
    if (kind == "reciprocal") return ShiftedReciprocal{complex_of(n.at("center"))};
    if (kind == "rational") {
      const Node num = n.at("numerator"), den = n.at("denominator");
      RationalFunction r{parse_polynomial(num), parse_polynomial(den)};
      num.done();
      den.done();
      return r;
    }
    if (kind == "tabulated") {
      TabulatedFunction t;
      t.points = points_of(n.at("points"));
      const auto vals = n.array("values");
      t.values.resize(static_cast<Eigen::Index>(vals.size()));
      for (std::size_t i = 0; i < vals.size(); ++i) t.values(static_cast<Eigen::Index>(i)) = complex_of(vals[i]);
      return t;
    }
    n.fail("unknown function kind '" + kind + "'");
  }();
  n.done();
  try {
    validate_payload(p);
  } catch (const InvalidArgument& e) {
    n.fail(e.what());
  }
  return p;
}

Grid parse_grid(const Node& n) {
  std::vector<Grid::Interval> bbox;
  for (const auto& iv : n.array("bbox")) {
    const auto ends = iv.items();
    if (ends.size() != 2) iv.fail("an interval is written [lo, hi]");
    bbox.emplace_back(ends[0].as_number(), ends[1].as_number());
  }
  std::vector<int> res;
  const Node r = n.at("resolution");
  if (r.json().is_array()) {
    for (const auto& x : r.items()) {
      const double v = x.as_number();
      if (v != std::floor(v) || v < 1 || v > 4096) x.fail("resolution entries are integers in [1, 4096]");
      res.push_back(static_cast<int>(v));
    }
  } else {
    res.assign(bbox.size(), n.count("resolution", 1, 4096));
  }
  n.done();
  try {
    Grid g(bbox, res);
    if (g.node_count() > 20'000'000) n.fail("grid has more than 2e7 nodes");
    return g;
  } catch (const InvalidArgument& e) {
    n.fail(e.what());
  }
}

PolynomialFamily parse_family(const Node& n) {
  const std::string kind = n.string("kind");
  PolynomialFamily f = [&]() -> PolynomialFamily {
    if (kind == "lattice") {
      FamilyOptions o;
      o.exclude_constants = n.boolean("exclude_constants", true);
      o.max_terms = n.count("max_terms", 0, 1000, 0);
      o.member_cap = n.count("member_cap", 1, 50'000'000, static_cast<int>(o.member_cap));
      return enumerate_polynomial_family(n.count("dimension", 1, 2, 1), n.count("max_degree", 1, 64),
                                         n.positive("coeff_bound"), n.positive("step"), o);
    }
    if (kind == "monomials") return monomial_family(n.count("dimension", 1, 2, 1), n.count("max_degree", 1, 64));
    if (kind == "chebyshev") return chebyshev_family(n.count("max_degree", 1, 64));
    if (kind == "members") {
      std::vector<Polynomial> ps;
      for (const auto& m : n.array("members")) {
        ps.push_back(parse_polynomial(m));
        m.done();
      }
      if (ps.empty()) n.fail("members list is empty");
      return family_from_members(ps, n.string("name", "members(" + std::to_string(ps.size()) + ")"));
    }
    if (kind == "merge") {
      const auto parts = n.array("families");
      if (parts.empty()) n.fail("merge needs at least one family");
      PolynomialFamily acc = parse_family(parts[0]);
      for (std::size_t i = 1; i < parts.size(); ++i) acc = merge(acc, parse_family(parts[i]));
      return acc;
    }
    n.fail("unknown family kind '" + kind + "'");
  }();
  n.done();
  return f;
}

RationalFamily parse_rationals(const Node& n) {
  const std::string kind = n.string("kind");
  RationalFamily r;
  if (kind == "reciprocals") {
    std::vector<cd> centers;
    if (n.has("centers"))
      for (const auto& c : n.array("centers")) centers.push_back(complex_of(c));
    if (n.has("lattice")) {
      const Node l = n.at("lattice");
      const auto more = lattice_centers(complex_at(l, "center", 0.0), l.positive("radius"), l.positive("step"));
      l.done();
      centers.insert(centers.end(), more.begin(), more.end());
    }
    r = shifted_reciprocal_family(centers);
  } else if (kind == "quotients") {
    r = quotient_family(parse_family(n.at("numerators")), parse_family(n.at("denominators")));
  } else {
    n.fail("unknown rational family kind '" + kind + "'");
  }
  n.done();
  return r;
}

std::vector<double> real_list(const Node& n) {
  std::vector<double> out;
  for (const auto& x : n.items()) out.push_back(x.as_number());
  if (out.empty()) n.fail("expected a nonempty list");
  return out;
}

std::vector<double> epsilon_list(const Node& n, const std::string& key) {
  const auto eps = real_list(n.at(key));
  for (std::size_t j = 0; j < eps.size(); ++j)
    if (!(eps[j] > 0) || (j > 0 && eps[j] > eps[j - 1])) n.at(key).fail("epsilons must be positive and nonincreasing");
  return eps;
}

// Per-atom entries of a job on a finite parameter space.
struct Atom {
  std::string label;
  double weight = 1;
  std::optional<CompactSetSample> set;
  std::optional<FunctionPayload> function;
  std::optional<double> radius, epsilon;
};

struct AtomFields {
  bool set = false, function = false, radius = false, epsilon = false;
};

std::vector<Atom> parse_atoms(const Node& job, const fs::path& base, AtomFields fields,
                              const std::optional<CompactSetSample>& shared_set,
                              const std::string& function_key = "function") {
  std::vector<Atom> atoms;
  const auto items = job.array("atoms");
  if (items.empty()) job.at("atoms").fail("at least one atom required");
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Node& a = items[i];
    Atom atom;
    atom.label = a.string("label", "w" + std::to_string(i));
    atom.weight = a.number("weight", 1.0);
    if (fields.set) {
      if (a.has("set"))
        atom.set = parse_set(a.at("set"), base);
      else if (shared_set)
        atom.set = *shared_set;
      else
        a.fail("missing required key 'set' (no shared set given)");
    }
    if (fields.function) atom.function = parse_payload(a.at(function_key));
    if (fields.radius) atom.radius = a.positive("radius");
    if (fields.epsilon) atom.epsilon = a.positive("epsilon");
    a.done();
    atoms.push_back(std::move(atom));
  }
  return atoms;
}

ParameterSpace space_of(const std::vector<Atom>& atoms, const Node& job) {
  std::vector<std::string> labels;
  Eigen::VectorXd w(static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    labels.push_back(atoms[i].label);
    w(static_cast<Eigen::Index>(i)) = atoms[i].weight;
  }
  try {
    return ParameterSpace(labels, w);
  } catch (const InvalidArgument& e) {
    job.at("atoms").fail(e.what());
  }
}

RandomCompactSet fibers_of(const ParameterSpace& space, const std::vector<Atom>& atoms, const Node& job) {
  std::vector<CompactSetSample> fibers;
  for (const auto& a : atoms) fibers.push_back(*a.set);
  try {
    return RandomCompactSet(space, fibers);
  } catch (const InvalidArgument& e) {
    job.at("atoms").fail(e.what());
  }
}

// ---- output helpers ----

std::string grid_csv(const Grid& grid, const std::function<std::string(Eigen::Index)>& value) {
  static const char* names[] = {"x", "y", "u", "v"};
  std::ostringstream out;
  for (int a = 0; a < grid.axes(); ++a) out << names[a] << ",";
  out << "value\n";
  for (Eigen::Index n = 0; n < grid.node_count(); ++n) {
    for (double x : grid.real_coordinates(n)) out << format_real(x) << ",";
    out << value(n) << "\n";
  }
  return out.str();
}

std::string mask_csv(const GridMask& m) {
  return grid_csv(m.grid, [&](Eigen::Index n) { return std::string(m.bits(n) ? "1" : "0"); });
}

std::string field_csv(const ScalarField& f) {
  return grid_csv(f.grid, [&](Eigen::Index n) { return format_real(f.values(n)); });
}

std::string file_tag(const std::string& label) {
  std::string s;
  for (char c : label) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return s;
}

Json diagnostic(const std::string& module, const std::optional<std::string>& atom, const std::string& reason) {
  return Json{{"module", module}, {"atom", atom ? Json(*atom) : Json(nullptr)}, {"reason", reason}};
}

Json certificate_json(const ErrorCertificate& c) {
  return Json{{"eta", real_json(c.eta)},
              {"contour_length", real_json(c.contour_length)},
              {"bound", real_json(c.bound)},
              {"mesh", real_json(c.mesh)}};
}

Json approximant_json(const RationalApproximant& r) {
  return Json{{"constant", to_json(r.constant())}, {"poles", vector_json(r.poles())},
              {"coefficients", vector_json(r.coefficients())}};
}

double max_error(const HolomorphicFunction& f, const RationalApproximant& r, const CompactSetSample& k) {
  double e = 0;
  for (Eigen::Index i = 0; i < k.size(); ++i) e = std::max(e, std::abs(f(k.points()(i, 0)) - r(k.points()(i, 0))));
  return e;
}

struct Context {
  const Node& job;
  const fs::path& base;
  JobOutcome& out;
  Json summary = Json::object();
  Json diagnostics = Json::array();
};

// ---- commands ----

void run_approx(Context& cx) {
  const Node& job = cx.job;
  if (job.json().contains("atoms")) {
    const CompactSetSample k = parse_set(job.at("set"), cx.base);
    const auto atoms = parse_atoms(job, cx.base, AtomFields{.function = true, .radius = true}, std::nullopt);
    const auto eps = epsilon_list(job, "epsilons");
    RandomRungeOptions o;
    o.default_cell = job.positive("cell", o.default_cell);
    o.max_iters = job.count("max_iters", 1, 64, o.max_iters);
    o.pole_clearance = job.positive("pole_clearance", o.pole_clearance);
    o.runge.stall_ratio = job.positive("stall_ratio", o.runge.stall_ratio);
    const bool emit = job.boolean("emit_approximants", false);
    job.done();
    if (k.dimension() != 1) job.at("set").fail("approximation works on one-variable sets");
    const ParameterSpace space = space_of(atoms, job);
    std::vector<FunctionPayload> payloads;
    std::vector<double> radius;
    for (const auto& a : atoms) {
      if (payload_dimension(*a.function) != 1) job.at("atoms").fail("functions must be one-variable");
      payloads.push_back(*a.function);
      radius.push_back(*a.radius);
    }
    const RandomFunction f(space, payloads);
    cx.summary["atoms"] = space.labels();
    try {
      const auto seq = random_runge_sequence(f, radius, k, eps, o);
      Json steps = Json::array();
      for (std::size_t j = 0; j < seq.size(); ++j) {
        Json per = Json::array();
        for (std::size_t a = 0; a < atoms.size(); ++a) {
          const auto& payload = f.payload(a);
          const HolomorphicFunction fa = [&payload](cd z) { return evaluate(payload, point(z)); };
          Json entry{{"atom", space.label(a)},
                     {"certificate", certificate_json(seq[j].certificates[a])},
                     {"measured_max_error", real_json(max_error(fa, seq[j].per_atom[a], k))},
                     {"pole_count", seq[j].per_atom[a].pole_count()},
                     {"pole_clearance", real_json(pole_clearance(seq[j].per_atom[a], k))}};
          if (emit) entry["approximant"] = approximant_json(seq[j].per_atom[a]);
          per.push_back(entry);
        }
        steps.push_back(Json{{"epsilon", eps[j]}, {"atoms", per}});
      }
      cx.summary["sequence"] = steps;
    } catch (const ConvergenceError& e) {
      cx.diagnostics.push_back(diagnostic("runge-approx", std::nullopt, e.what()));
    }
    return;
  }

  const CompactSetSample k = parse_set(job.at("set"), cx.base);
  const FunctionPayload payload = parse_payload(job.at("function"));
  const double cell = job.positive("cell", 0.25);
  const double eps = job.positive("epsilon");
  const int iters = job.count("max_iters", 1, 64, 16);
  RungeOptions ro;
  ro.stall_ratio = job.positive("stall_ratio", ro.stall_ratio);
  const bool emit = job.boolean("emit_approximant", true);
  job.done();
  if (k.dimension() != 1) job.at("set").fail("approximation works on one-variable sets");
  if (payload_dimension(payload) != 1) job.at("function").fail("function must be one-variable");
  const HolomorphicFunction f = [&payload](cd z) { return evaluate(payload, point(z)); };
  const RungeResult r = adaptive_runge(f, k, cell, eps, iters, ro);
  cx.summary["converged"] = r.converged;
  cx.summary["iterations"] = r.iterations;
  cx.summary["cell_size"] = r.cell_size;
  cx.summary["certificate"] = certificate_json(r.certificate);
  cx.summary["measured_max_error"] = real_json(r.measured_max_error);
  cx.summary["pole_count"] = r.approximant.pole_count();
  cx.summary["pole_clearance"] = real_json(pole_clearance(r.approximant, k));
  if (emit) cx.summary["approximant"] = approximant_json(r.approximant);
  if (!r.converged) {
    std::ostringstream why;
    why << "certificate bound " << r.certificate.bound << " did not drop below " << eps << " within " << iters
        << " iterations";
    cx.diagnostics.push_back(diagnostic("runge-approx", std::nullopt, why.str()));
  }
}

void run_hull(Context& cx) {
  const Node& job = cx.job;
  const bool random = job.json().contains("atoms");
  std::optional<CompactSetSample> shared;
  if (job.has("set")) shared = parse_set(job.at("set"), cx.base);
  std::vector<Atom> atoms;
  if (random) atoms = parse_atoms(job, cx.base, AtomFields{.set = true}, shared);
  else if (!shared) job.fail("missing required key 'set'");
  const Grid grid = parse_grid(job.at("grid"));
  const PolynomialFamily family = parse_family(job.at("family"));
  const double radius = job.positive("radius");
  const std::string kind = job.string("kind", "polynomial");
  if (kind != "polynomial" && kind != "rational") job.at("kind").fail("kind is 'polynomial' or 'rational'");
  std::optional<RationalFamily> rationals;
  if (kind == "rational") rationals = parse_rationals(job.at("rationals"));
  HullOptions ho;
  if (job.has("tolerances")) {
    const Node t = job.at("tolerances");
    ho.slack = t.number("slack", ho.slack);
    if (t.has("incidence")) ho.incidence_tolerance = t.positive("incidence");
    ho.singularity_threshold = t.positive("singularity", ho.singularity_threshold);
    t.done();
    if (ho.slack < 0) job.at("tolerances").fail("slack must be nonnegative");
  }
  const bool oracle = job.boolean("oracle", false);
  const bool dump = job.boolean("dump", true);
  job.done();

  std::vector<std::pair<std::optional<std::string>, CompactSetSample>> sets;
  if (random) {
    const ParameterSpace space = space_of(atoms, job);
    const RandomCompactSet k = fibers_of(space, atoms, job);
    for (std::size_t a = 0; a < atoms.size(); ++a) sets.emplace_back(space.label(a), k.fiber(a));
  } else {
    sets.emplace_back(std::nullopt, *shared);
  }
  for (const auto& [label, k] : sets) {
    if (k.dimension() != grid.complex_dimension() || k.dimension() != family.dimension())
      job.fail("set, grid and family must share one complex dimension");
    if (k.max_norm() > radius) job.at("radius").fail("radius too small: some samples lie outside the ball");
  }

  Json estimates = Json::array();
  for (const auto& [label, k] : sets) {
    const HullEstimate e = rationals ? rational_hull_estimate(k, *rationals, family, grid, radius, ho)
                                     : polynomial_hull_estimate(k, family, grid, radius, ho);
    Json entry{{"atom", label ? Json(*label) : Json(nullptr)},
               {"family", e.family_descriptor},
               {"family_size", family.size()},
               {"radius", e.radius},
               {"node_count", grid.node_count()},
               {"count", e.mask.count()}};
    if (rationals) entry["rational_members"] = rationals->members.size();
    if (oracle) {
      if (k.dimension() != 1 || grid.axes() != 2) {
        cx.diagnostics.push_back(diagnostic("hulls", label, "fill oracle needs a one-variable set on a planar grid"));
      } else {
        const GridMask fill = fill_oracle_1d(k, grid);
        entry["oracle"] = Json{{"count", fill.count()},
                               {"symmetric_difference", symmetric_difference(fill, e.mask)},
                               {"superset_violations", subset_violations(fill, e.mask)}};
      }
    }
    if (dump) {
      const std::string name = label ? "mask_" + file_tag(*label) + ".csv" : "mask.csv";
      cx.out.files[name] = mask_csv(e.mask);
      entry["mask_file"] = name;
    }
    estimates.push_back(entry);
  }
  cx.summary["estimates"] = estimates;
}

void run_siciak(Context& cx) {
  const Node& job = cx.job;
  const bool random = job.json().contains("atoms");
  std::optional<CompactSetSample> shared;
  if (job.has("set")) shared = parse_set(job.at("set"), cx.base);
  std::vector<Atom> atoms;
  if (random) atoms = parse_atoms(job, cx.base, AtomFields{.set = true}, shared);
  else if (!shared) job.fail("missing required key 'set'");
  const PolynomialFamily family = parse_family(job.at("family"));
  std::optional<Grid> grid;
  if (job.has("grid")) grid = parse_grid(job.at("grid"));
  std::optional<PointMatrix> pts;
  if (job.has("points")) pts = points_of(job.at("points"));
  if (!grid && !pts) job.fail("siciak needs a grid, a point list, or both");
  SiciakOptions so;
  so.gated = job.boolean("gated", false);
  so.gate_slack = job.number("gate_slack", so.gate_slack);
  const std::string oracle = job.string("oracle", "none");
  if (oracle != "none" && oracle != "interval") job.at("oracle").fail("oracle is 'none' or 'interval'");
  job.done();

  std::vector<std::pair<std::optional<std::string>, CompactSetSample>> sets;
  if (random) {
    const ParameterSpace space = space_of(atoms, job);
    const RandomCompactSet k = fibers_of(space, atoms, job);
    for (std::size_t a = 0; a < atoms.size(); ++a) sets.emplace_back(space.label(a), k.fiber(a));
  } else {
    sets.emplace_back(std::nullopt, *shared);
  }
  for (const auto& [label, k] : sets) {
    if (k.dimension() != family.dimension()) job.fail("set and family must share one complex dimension");
    if (grid && grid->complex_dimension() != k.dimension()) job.fail("grid and set differ in complex dimension");
    if (pts && pts->cols() != k.dimension()) job.fail("points and set differ in complex dimension");
  }
  if (oracle == "interval" && (!pts || pts->cols() != 1)) job.fail("the interval oracle needs one-variable points");

  Json fields = Json::array();
  for (const auto& [label, k] : sets) {
    Json entry{{"atom", label ? Json(*label) : Json(nullptr)}, {"family", family.descriptor()},
               {"family_size", family.size()}};
    try {
      if (pts) {
        const Eigen::ArrayXd phi = siciak_at(k, family, *pts, so);
        Json list = Json::array();
        for (Eigen::Index i = 0; i < pts->rows(); ++i) {
          Json p{{"z", point_json(pts->row(i).transpose())}, {"phi", real_json(phi(i))},
                 {"green", real_json(std::log(phi(i)))}};
          if (oracle == "interval") p["oracle_green"] = real_json(green_interval_oracle((*pts)(i, 0)));
          list.push_back(p);
        }
        entry["points"] = list;
      }
      if (grid) {
        const ScalarField phi = siciak_estimate(k, family, *grid, so);
        const std::string name = label ? "phi_" + file_tag(*label) + ".csv" : "phi.csv";
        cx.out.files[name] = field_csv(phi);
        entry["field_file"] = name;
        entry["field_max"] = real_json(phi.values.maxCoeff());
        entry["field_min"] = real_json(phi.values.minCoeff());
      }
    } catch (const InvalidArgument& e) {
      cx.diagnostics.push_back(diagnostic("extremal", label, e.what()));
    }
    fields.push_back(entry);
  }
  cx.summary["fields"] = fields;
}

void run_select(Context& cx) {
  const Node& job = cx.job;
  std::optional<CompactSetSample> shared;
  if (job.has("set")) shared = parse_set(job.at("set"), cx.base);
  const Node seq_node = job.at("sequence");
  const std::string seq_kind = seq_node.string("kind");
  const bool runge = seq_kind == "runge";
  const auto atoms = parse_atoms(job, cx.base, AtomFields{.set = true, .function = true, .radius = runge}, shared,
                                 "target");
  std::vector<double> eps;
  if (job.has("epsilon")) eps.push_back(job.positive("epsilon"));
  if (job.has("epsilons")) {
    if (!eps.empty()) job.fail("give either epsilon or epsilons");
    eps = epsilon_list(job, "epsilons");
  }
  if (eps.empty()) job.fail("missing required key 'epsilon' or 'epsilons'");

  const ParameterSpace space = space_of(atoms, job);
  const RandomCompactSet k = fibers_of(space, atoms, job);
  std::vector<FunctionPayload> targets;
  for (const auto& a : atoms) targets.push_back(*a.function);
  const RandomFunction target(space, targets);

  std::vector<SequenceTerm> terms;
  if (seq_kind == "explicit") {
    for (const auto& t : seq_node.array("terms")) {
      const auto per = t.items();
      if (per.size() != atoms.size()) t.fail("one function per atom required");
      std::vector<FunctionPayload> ps;
      for (const auto& p : per) ps.push_back(parse_payload(p));
      terms.emplace_back(RandomFunction(space, ps));
    }
  } else if (seq_kind == "offsets") {
    // term j at an atom is the atom's polynomial target plus a constant rate(j)
    const int count = seq_node.count("count", 1, 100'000);
    const auto rates = seq_node.array("rates");
    if (rates.size() != atoms.size()) seq_node.at("rates").fail("one rate per atom required");
    std::vector<std::function<double(int)>> rate;
    for (const auto& r : rates) {
      const std::string rk = r.string("kind");
      const double scale = r.number("scale", 1.0);
      if (rk == "harmonic") {
        rate.emplace_back([scale](int j) { return scale / j; });
      } else if (rk == "geometric") {
        const double q = r.positive("ratio");
        if (!(q < 1)) r.fail("ratio must lie in (0, 1)");
        rate.emplace_back([scale, q](int j) { return scale * std::pow(q, j); });
      } else {
        r.fail("rate kind is 'harmonic' or 'geometric'");
      }
      r.done();
    }
    for (std::size_t a = 0; a < atoms.size(); ++a)
      if (!std::holds_alternative<Polynomial>(targets[a])) job.at("atoms").fail("offset sequences need polynomial targets");
    for (int j = 1; j <= count; ++j) {
      std::vector<FunctionPayload> ps;
      for (std::size_t a = 0; a < atoms.size(); ++a) {
        const auto& p = std::get<Polynomial>(targets[a]);
        auto t = p.terms();
        t.push_back({{0, 0}, rate[a](j)});
        ps.emplace_back(Polynomial(p.dimension(), t));
      }
      terms.emplace_back(RandomFunction(space, ps));
    }
  } else if (runge) {
    const auto reps = epsilon_list(seq_node, "epsilons");
    RandomRungeOptions o;
    o.default_cell = seq_node.positive("cell", o.default_cell);
    o.max_iters = seq_node.count("max_iters", 1, 64, o.max_iters);
    if (!shared) job.fail("runge sequences need a shared 'set'");
    for (const auto& a : atoms)
      if (!(a.set->points() == shared->points())) job.at("atoms").fail("runge sequences need the shared set on every atom");
    std::vector<double> radius;
    for (const auto& a : atoms) radius.push_back(*a.radius);
    seq_node.done();
    job.done();
    try {
      for (auto& t : random_runge_sequence(target, radius, *shared, reps, o)) terms.emplace_back(std::move(t));
    } catch (const ConvergenceError& e) {
      cx.diagnostics.push_back(diagnostic("runge-approx", std::nullopt, e.what()));
      return;
    }
  } else {
    seq_node.fail("sequence kind is 'explicit', 'offsets' or 'runge'");
  }
  seq_node.done();
  job.done();

  const ApproximationSequence seq(terms, target, k);
  const Eigen::MatrixXd errors = error_table(seq);
  cx.summary["atoms"] = space.labels();
  cx.summary["term_count"] = seq.size();
  Json selections = Json::array();
  for (double e : eps) {
    try {
      const SelectionMap map = select_from_errors(errors, space, e);
      Json phi = Json::object();
      double joint = 0;
      for (std::size_t a = 0; a < space.size(); ++a) {
        phi[space.label(a)] = map.index[a];
        joint = std::max(joint, errors(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(map.index[a] - 1)));
      }
      selections.push_back(Json{{"epsilon", e}, {"phi", phi}, {"joint_error", real_json(joint)}});
    } catch (const ConvergenceError& err) {
      cx.diagnostics.push_back(diagnostic("selection", std::nullopt, err.what()));
    }
  }
  cx.summary["selections"] = selections;
}

void run_okaweil(Context& cx) {
  const Node& job = cx.job;
  std::optional<CompactSetSample> shared;
  if (job.has("set")) shared = parse_set(job.at("set"), cx.base);
  const auto atoms =
      parse_atoms(job, cx.base, AtomFields{.set = true, .function = true, .radius = true, .epsilon = true}, shared);
  OkaWeilOptions o;
  o.max_degree = job.count("max_degree", 0, 200, o.max_degree);
  o.validation_factor = job.count("validation_factor", 1, 64, o.validation_factor);
  const bool allow = job.boolean("allow_exceptional", false);
  job.done();
  const ParameterSpace space = space_of(atoms, job);
  const RandomCompactSet k = fibers_of(space, atoms, job);
  if (k.dimension() != 1) job.at("atoms").fail("polynomial fitting works on one-variable sets");
  std::vector<FunctionPayload> ps;
  std::vector<double> radius, eps;
  for (const auto& a : atoms) {
    ps.push_back(*a.function);
    radius.push_back(*a.radius);
    eps.push_back(*a.epsilon);
  }
  const RandomFunction f(space, ps);
  o.allow_exceptional = true;
  OkaWeilResult r = [&] {
    try {
      return oka_weil_random(f, radius, k, eps, o);
    } catch (const InvalidArgument& e) {
      cx.diagnostics.push_back(diagnostic("selection", std::nullopt, e.what()));
      throw;
    }
  }();
  Json per = Json::array();
  for (std::size_t a = 0; a < space.size(); ++a) {
    const auto& p = std::get<Polynomial>(r.polynomials.payload(a));
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(std::max(p.degree(), 0) + 1);
    for (const auto& t : p.terms()) c(t.exponent[0]) += t.coeff;
    per.push_back(Json{{"atom", space.label(a)},
                       {"certified", static_cast<bool>(r.certified[a])},
                       {"degree", r.degrees[a]},
                       {"epsilon", eps[a]},
                       {"validation_error", real_json(r.validation_error[a])},
                       {"coefficients", vector_json(c)}});
    if (!r.certified[a] && !allow) {
      std::ostringstream why;
      why << "validation error " << r.validation_error[a] << " not below " << eps[a] << " up to degree "
          << o.max_degree;
      cx.diagnostics.push_back(diagnostic("selection", space.label(a), why.str()));
    }
  }
  cx.summary["atoms"] = per;
  cx.summary["exceptional_weight"] = r.exceptional_weight;
}

}  // namespace

Json load_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

JobOutcome run_job(const std::string& command, const Json& config, const fs::path& base_dir) {
  if (std::find(commands().begin(), commands().end(), command) == commands().end())
    throw ConfigError("unknown command '" + command + "'");
  const Node job(config, "config");
  job.require_object();
  if (job.has("command") && job.string("command") != command)
    job.at("command").fail("config is for '" + job.string("command") + "', not '" + command + "'");

  JobOutcome out;
  Context cx{job, base_dir, out};
  try {
    if (command == "approx") run_approx(cx);
    if (command == "hull") run_hull(cx);
    if (command == "siciak") run_siciak(cx);
    if (command == "select") run_select(cx);
    if (command == "okaweil") run_okaweil(cx);
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    // argument problems that only show up once the objects meet
    if (cx.diagnostics.empty()) throw ConfigError(std::string("config: ") + e.what());
  } catch (const PoleError& e) {
    cx.diagnostics.push_back(diagnostic(command, std::nullopt, e.what()));
  } catch (const ConvergenceError& e) {
    cx.diagnostics.push_back(diagnostic(command, std::nullopt, e.what()));
  }

  const bool ok = cx.diagnostics.empty();
  out.exit_code = ok ? kExitOk : kExitFailure;
  Json files = Json::array();
  for (const auto& [name, content] : out.files) files.push_back(name);
  out.result = Json{{"format", "rca-result"}, {"version", 1},          {"command", command},
                    {"status", ok ? "ok" : "failed"}, {"summary", cx.summary}, {"diagnostics", cx.diagnostics},
                    {"files", files}};
  return out;
}

std::string dump_result(const Json& result) { return result.dump(2) + "\n"; }

void write_outputs(const JobOutcome& outcome, const fs::path& dir) {
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    f << content;
  };
  write("result.json", dump_result(outcome.result));
  for (const auto& [name, content] : outcome.files) write(name, content);
}

namespace {

bool is_real(const Json& j) {
  return j.is_number() || (j.is_string() && (j == "inf" || j == "-inf" || j == "nan"));
}

bool is_complex(const Json& j) { return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(); }

bool is_complex_list(const Json& j) {
  if (!j.is_array()) return false;
  for (const auto& z : j)
    if (!is_complex(z)) return false;
  return true;
}

struct Checker {
  std::vector<std::string> problems;

  const Json* field(const Json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
      problems.push_back(where + ": missing '" + key + "'");
      return nullptr;
    }
    return &obj[key];
  }

  void expect(bool ok, const std::string& where, const std::string& what) {
    if (!ok) problems.push_back(where + ": " + what);
  }

  void real(const Json& obj, const std::string& key, const std::string& where) {
    if (const auto* v = field(obj, key, where)) expect(is_real(*v), where + "." + key, "expected a real");
  }

  void integer(const Json& obj, const std::string& key, const std::string& where) {
    if (const auto* v = field(obj, key, where)) expect(v->is_number_integer(), where + "." + key, "expected an integer");
  }

  void atom(const Json& obj, const std::string& where) {
    if (const auto* v = field(obj, "atom", where))
      expect(v->is_null() || v->is_string(), where + ".atom", "expected a label or null");
  }

  void certificate(const Json& obj, const std::string& where) {
    if (const auto* c = field(obj, "certificate", where))
      for (const char* k : {"eta", "contour_length", "bound", "mesh"}) real(*c, k, where + ".certificate");
  }

  void approximant(const Json& obj, const std::string& where) {
    if (!obj.contains("approximant")) return;
    const Json& a = obj["approximant"];
    if (const auto* c = field(a, "constant", where)) expect(is_complex(*c), where + ".constant", "expected [re, im]");
    for (const char* k : {"poles", "coefficients"})
      if (const auto* v = field(a, k, where)) expect(is_complex_list(*v), where + "." + k, "expected complex list");
  }

  void each(const Json& obj, const std::string& key, const std::string& where,
            const std::function<void(const Json&, const std::string&)>& body) {
    const auto* v = field(obj, key, where);
    if (!v) return;
    if (!v->is_array()) {
      problems.push_back(where + "." + key + ": expected an array");
      return;
    }
    for (std::size_t i = 0; i < v->size(); ++i) body((*v)[i], where + "." + key + "[" + std::to_string(i) + "]");
  }
};

}  // namespace

std::vector<std::string> result_schema_problems(const Json& r) {
  Checker ck;
  if (!r.is_object()) return {"result: expected an object"};
  if (const auto* f = ck.field(r, "format", "result")) ck.expect(*f == "rca-result", "result.format", "wrong format tag");
  if (const auto* v = ck.field(r, "version", "result")) ck.expect(*v == 1, "result.version", "unsupported version");
  const auto* cmd = ck.field(r, "command", "result");
  std::string command;
  if (cmd && cmd->is_string()) command = cmd->get<std::string>();
  ck.expect(std::find(commands().begin(), commands().end(), command) != commands().end(), "result.command",
            "unknown command");
  const auto* status = ck.field(r, "status", "result");
  const bool ok = status && *status == "ok";
  ck.expect(status && (*status == "ok" || *status == "failed"), "result.status", "expected 'ok' or 'failed'");
  ck.each(r, "diagnostics", "result", [&](const Json& d, const std::string& w) {
    if (const auto* m = ck.field(d, "module", w)) ck.expect(m->is_string(), w + ".module", "expected a string");
    ck.atom(d, w);
    if (const auto* why = ck.field(d, "reason", w)) ck.expect(why->is_string(), w + ".reason", "expected a string");
  });
  if (r.contains("diagnostics") && r["diagnostics"].is_array())
    ck.expect(ok == r["diagnostics"].empty(), "result.status", "status disagrees with diagnostics");
  ck.each(r, "files", "result", [&](const Json& f, const std::string& w) { ck.expect(f.is_string(), w, "expected a name"); });
  const auto* summary = ck.field(r, "summary", "result");
  if (!summary || !summary->is_object()) {
    ck.problems.push_back("result.summary: expected an object");
    return ck.problems;
  }
  const Json& s = *summary;
  const std::string w = "result.summary";
  if (command == "approx") {
    if (s.contains("sequence")) {
      ck.each(s, "sequence", w, [&](const Json& step, const std::string& sw) {
        ck.real(step, "epsilon", sw);
        ck.each(step, "atoms", sw, [&](const Json& a, const std::string& aw) {
          ck.atom(a, aw);
          ck.certificate(a, aw);
          ck.real(a, "measured_max_error", aw);
          ck.integer(a, "pole_count", aw);
          ck.approximant(a, aw);
        });
      });
    } else if (ok || s.contains("certificate")) {
      if (const auto* c = ck.field(s, "converged", w)) ck.expect(c->is_boolean(), w + ".converged", "expected a bool");
      ck.integer(s, "iterations", w);
      ck.real(s, "cell_size", w);
      ck.certificate(s, w);
      ck.real(s, "measured_max_error", w);
      ck.integer(s, "pole_count", w);
      ck.approximant(s, w);
    }
  } else if (command == "hull") {
    if (ok || s.contains("estimates"))
      ck.each(s, "estimates", w, [&](const Json& e, const std::string& ew) {
        ck.atom(e, ew);
        ck.integer(e, "count", ew);
        ck.integer(e, "node_count", ew);
        ck.real(e, "radius", ew);
        if (e.contains("oracle"))
          for (const char* k : {"count", "symmetric_difference", "superset_violations"})
            ck.integer(e["oracle"], k, ew + ".oracle");
      });
  } else if (command == "siciak") {
    if (ok || s.contains("fields"))
      ck.each(s, "fields", w, [&](const Json& f, const std::string& fw) {
        ck.atom(f, fw);
        if (f.contains("points"))
          ck.each(f, "points", fw, [&](const Json& p, const std::string& pw) {
            ck.field(p, "z", pw);
            ck.real(p, "phi", pw);
            ck.real(p, "green", pw);
          });
      });
  } else if (command == "select") {
    if (ok || s.contains("selections"))
      ck.each(s, "selections", w, [&](const Json& sel, const std::string& sw) {
        ck.real(sel, "epsilon", sw);
        ck.real(sel, "joint_error", sw);
        if (const auto* phi = ck.field(sel, "phi", sw)) {
          ck.expect(phi->is_object(), sw + ".phi", "expected an object");
          for (const auto& [label, idx] : phi->items())
            ck.expect(idx.is_number_integer() && idx.get<long long>() >= 1, sw + ".phi." + label,
                      "expected a positive integer");
        }
      });
  } else if (command == "okaweil") {
    if (ok || s.contains("atoms")) {
      ck.each(s, "atoms", w, [&](const Json& a, const std::string& aw) {
        ck.atom(a, aw);
        ck.integer(a, "degree", aw);
        ck.real(a, "validation_error", aw);
        if (const auto* c = ck.field(a, "coefficients", aw))
          ck.expect(is_complex_list(*c), aw + ".coefficients", "expected complex list");
      });
      ck.real(s, "exceptional_weight", w);
    }
  }
  return ck.problems;
}

}  // namespace rca::jobs
