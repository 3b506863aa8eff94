#include "rca/runge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <tuple>

#include "rca/parallel.hpp"

namespace rca {

Eigen::VectorXcd sample_on(const HolomorphicFunction& f, const Eigen::VectorXcd& nodes) {
  Eigen::VectorXcd v(nodes.size());
  for (Eigen::Index i = 0; i < nodes.size(); ++i) v(i) = f(nodes(i));
  return v;
}

namespace {

struct NodePair {
  double upper;  // bound on the pair's contribution to eta
  Eigen::Index i, j;
};

// Nodes bucketed into squares of side `radius`; pairs closer than
// `radius` can only sit in the same or in adjacent squares. Consecutive
// nodes along a chain mostly share a square, so runs of them are sorted
// rather than single nodes.
class CloseNodes {
 public:
  CloseNodes(const Eigen::VectorXcd& nodes, double radius) : nodes_(nodes), radius_(radius) {
    for (Eigen::Index i = 0; i < nodes.size(); ++i) {
      const std::int64_t k = key(static_cast<std::int64_t>(std::floor(nodes(i).real() / radius)),
                                 static_cast<std::int64_t>(std::floor(nodes(i).imag() / radius)));
      if (!runs_.empty() && runs_.back().key == k && runs_.back().end == i)
        ++runs_.back().end;
      else
        runs_.push_back({k, i, i + 1});
    }
    std::sort(runs_.begin(), runs_.end(), [](const Run& a, const Run& b) { return std::tie(a.key, a.begin) < std::tie(b.key, b.begin); });
  }

  /// visit(i, j) once for every pair i < j at distance below the radius.
  template <typename Visit>
  void for_each_pair(Visit&& visit) const {
    const double r2 = radius_ * radius_;
    auto test = [&](Eigen::Index i, Eigen::Index j) {
      if (std::norm(nodes_(i) - nodes_(j)) < r2) visit(std::min(i, j), std::max(i, j));
    };
    for (auto first = runs_.begin(); first != runs_.end();) {
      const std::int64_t k = first->key;
      auto last = first;
      while (last != runs_.end() && last->key == k) ++last;
      for (auto ra = first; ra != last; ++ra)
        for (auto rb = ra; rb != last; ++rb)
          for (Eigen::Index i = ra->begin; i < ra->end; ++i)
            for (Eigen::Index j = (ra == rb ? i + 1 : rb->begin); j < rb->end; ++j) test(i, j);
      // the four neighbours after this square in key order, so each square pair is seen once
      const std::int64_t bx = k >> 32, by = static_cast<std::int32_t>(k & 0xffffffff);
      for (const auto& [dx, dy] : {std::pair{0, 1}, std::pair{1, -1}, std::pair{1, 0}, std::pair{1, 1}}) {
        const std::int64_t nk = key(bx + dx, by + dy);
        auto lo = std::lower_bound(runs_.begin(), runs_.end(), nk, [](const Run& r, std::int64_t v) { return r.key < v; });
        for (auto rb = lo; rb != runs_.end() && rb->key == nk; ++rb)
          for (auto ra = first; ra != last; ++ra)
            for (Eigen::Index i = ra->begin; i < ra->end; ++i)
              for (Eigen::Index j = rb->begin; j < rb->end; ++j) test(i, j);
      }
      first = last;
    }
  }

 private:
  struct Run {
    std::int64_t key;
    Eigen::Index begin, end;
  };

  static std::int64_t key(std::int64_t x, std::int64_t y) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(x) << 32) | static_cast<std::uint32_t>(y);
  }

  const Eigen::VectorXcd& nodes_;
  double radius_;
  std::vector<Run> runs_;
};

}  // namespace

ErrorCertificate continuity_certificate(const Eigen::VectorXcd& refined_values, const Partition& refined,
                                        const Partition& p, const CompactSetSample& k) {
  if (k.dimension() != 1) throw InvalidArgument("continuity_certificate: one-variable sets only");
  if (refined_values.size() != refined.size())
    throw InvalidArgument("continuity_certificate: one value per refined node required");
  if (refined.mesh * 4 > p.mesh * (1 + 1e-12))
    throw InvalidArgument("continuity_certificate: refinement must be at least 4x finer");

  const Eigen::ArrayXcd z = k.points().col(0).array();
  const Eigen::Index m = refined.size();
  auto distance_to_k = [&](Eigen::Index i) { return std::sqrt((z - refined.nodes(i)).abs2().minCoeff()); };

  // Lower bounds on the distance to K: exact at every stride-th node, then
  // d(i) >= d(anchor) - |zeta_i - anchor|. Smaller d only loosens the pair
  // bounds below, so eta itself is unchanged.
  constexpr Eigen::Index stride = 32;
  const Eigen::Index anchors = (m + stride - 1) / stride;
  Eigen::ArrayXd anchor_d(anchors);
  parallel_for(static_cast<std::size_t>(anchors),
               [&](std::size_t a) { anchor_d(static_cast<Eigen::Index>(a)) = distance_to_k(static_cast<Eigen::Index>(a) * stride); });
  Eigen::ArrayXd nearest(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index a = std::min(anchors - 1, (i + stride / 2) / stride);
    nearest(i) = anchor_d(a) - std::abs(refined.nodes(i) - refined.nodes(a * stride));
    if (nearest(i) < p.mesh) nearest(i) = distance_to_k(i);
  }
  if (nearest.minCoeff() < p.mesh)
    throw InvalidArgument("continuity_certificate: K comes within one mesh of the contour");

  ErrorCertificate cert;
  cert.contour_length = p.total_length;
  cert.mesh = p.mesh;

  // |f_i/(zi - z) - f_j/(zj - z)| <= |f_i - f_j| / d_i + |f_j| |zi - zj| / (d_i d_j)
  // with d a lower bound on the distance to K. eta is seeded from the pair
  // of largest bound, then only pairs whose bound beats it are checked, in
  // descending order until none can raise eta.
  const Eigen::ArrayXd magnitude = refined_values.array().abs();
  auto upper = [&](Eigen::Index i, Eigen::Index j) {
    return (std::sqrt(std::norm(refined_values(i) - refined_values(j))) / nearest(i) +
            magnitude(j) * std::sqrt(std::norm(refined.nodes(i) - refined.nodes(j))) / (nearest(i) * nearest(j))) /
           (2 * std::numbers::pi);
  };
  // f / (zeta - z) as f conj(w) / |w|^2, avoiding the slow library division
  auto kernel = [&](Eigen::Index i) {
    const Eigen::ArrayXcd w = refined.nodes(i) - z;
    return (refined_values(i) * w.conjugate() / w.abs2()).eval();
  };
  auto exact = [&](const NodePair& pr) {
    return std::sqrt((kernel(pr.i) - kernel(pr.j)).abs2().maxCoeff()) / (2 * std::numbers::pi);
  };

  const CloseNodes close(refined.nodes, p.mesh);
  NodePair top{-1, 0, 0};
  close.for_each_pair([&](Eigen::Index i, Eigen::Index j) {
    const double ub = upper(i, j);
    if (ub > top.upper) top = {ub, i, j};
  });
  double eta = 0;
  if (top.upper >= 0) {
    eta = exact(top);
    std::vector<NodePair> pairs;
    close.for_each_pair([&](Eigen::Index i, Eigen::Index j) {
      const double ub = upper(i, j);
      if (ub > eta) pairs.push_back({ub, i, j});
    });
    std::sort(pairs.begin(), pairs.end(), [](const NodePair& a, const NodePair& b) {
      return std::tie(b.upper, a.i, a.j) < std::tie(a.upper, b.i, b.j);
    });
    for (const auto& pr : pairs) {
      if (pr.upper <= eta) break;
      eta = std::max(eta, exact(pr));
    }
  }
  cert.eta = eta;
  cert.bound = eta * cert.contour_length;
  return cert;
}

namespace {

double max_error_on(const HolomorphicFunction& f, const RationalApproximant& r, const CompactSetSample& k) {
  double worst = 0;
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    const auto z = k.points()(i, 0);
    worst = std::max(worst, std::abs(f(z) - r(z)));
  }
  return worst;
}

}  // namespace

RungeResult adaptive_runge(const HolomorphicFunction& f, const CompactSetSample& k, double cell0,
                           double epsilon, int max_iters, const RungeOptions& options) {
  if (k.dimension() != 1) throw InvalidArgument("adaptive_runge: one-variable sets only");
  if (!(cell0 > 0)) throw InvalidArgument("adaptive_runge: initial cell size must be positive");
  if (!(epsilon > 0)) throw InvalidArgument("adaptive_runge: epsilon must be positive");
  if (max_iters < 1) throw InvalidArgument("adaptive_runge: max_iters must be at least 1");
  const int factor = options.refinement_factor;
  if (factor < 4 || (factor & (factor - 1)) != 0)
    throw InvalidArgument("adaptive_runge: refinement factor must be a power of two >= 4");

  double cell = cell0;
  Contour contour = build_contour(k, cell);
  double target_mesh = cell / 4;

  {
    const Partition p = partition_contour(contour, target_mesh);
    const Partition fine = partition_contour(contour, p.mesh / factor);
    const auto c = f(k.points()(0, 0));
    const Eigen::VectorXcd on_k = sample_on(f, k.points().col(0));
    const Eigen::VectorXcd on_contour = sample_on(f, fine.nodes);
    if ((on_k.array() == c).all() && (on_contour.array() == c).all()) {
      RungeResult constant;
      constant.approximant = RationalApproximant(Eigen::VectorXcd(0), Eigen::VectorXcd(0), c);
      constant.certificate = {0.0, p.total_length, 0.0, p.mesh};
      constant.converged = true;
      constant.iterations = 1;
      constant.cell_size = cell;
      return constant;
    }
  }

  RungeResult best;
  best.certificate.bound = std::numeric_limits<double>::infinity();
  double previous = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= max_iters; ++iter) {
    const Partition p = partition_contour(contour, target_mesh);
    const Partition fine = partition_contour(contour, p.mesh / factor);
    const RationalApproximant r = riemann_sum_approximant(sample_on(f, p.nodes), p);
    const ErrorCertificate cert = continuity_certificate(sample_on(f, fine.nodes), fine, p, k);
    if (cert.bound < best.certificate.bound) {
      best.approximant = r;
      best.certificate = cert;
      best.cell_size = cell;
    }
    best.iterations = iter;
    if (cert.bound < epsilon) {
      best.approximant = r;
      best.certificate = cert;
      best.cell_size = cell;
      best.converged = true;
      break;
    }
    if (iter > 1 && cert.bound > options.stall_ratio * previous) {
      cell /= 2;
      contour = build_contour(k, cell);
      target_mesh = cell / 4;
    } else {
      target_mesh = p.mesh / 2;
    }
    previous = cert.bound;
  }
  best.measured_max_error = max_error_on(f, best.approximant, k);
  return best;
}

std::complex<double> RandomRationalApproximant::operator()(std::size_t atom, std::complex<double> z) const {
  space.check_atom(atom);
  return per_atom[atom](z);
}

double pole_clearance(const RationalApproximant& r, const CompactSetSample& k) {
  if (r.pole_count() == 0) return std::numeric_limits<double>::infinity();
  const Eigen::ArrayXcd z = k.points().col(0).array();
  double d = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < r.pole_count(); ++j) d = std::min(d, (z - r.poles()(j)).abs().minCoeff());
  return d;
}

std::vector<RandomRationalApproximant> random_runge_sequence(const RandomFunction& f,
                                                             const std::vector<double>& radius,
                                                             const CompactSetSample& k,
                                                             const std::vector<double>& epsilons,
                                                             const RandomRungeOptions& options) {
  const std::size_t atoms = f.space().size();
  if (radius.size() != atoms) throw InvalidArgument("random_runge_sequence: one holomorphy radius per atom");
  for (double r : radius)
    if (!(r > 0)) throw InvalidArgument("random_runge_sequence: holomorphy radii must be positive");
  if (epsilons.empty()) throw InvalidArgument("random_runge_sequence: empty epsilon sequence");
  for (std::size_t j = 0; j < epsilons.size(); ++j)
    if (!(epsilons[j] > 0) || (j > 0 && epsilons[j] > epsilons[j - 1]))
      throw InvalidArgument("random_runge_sequence: epsilons must be positive and nonincreasing");

  std::vector<RandomRationalApproximant> sequence;
  for (double eps : epsilons) {
    std::vector<RungeResult> results(atoms);
    parallel_for(atoms, [&](std::size_t a) {
      const auto& payload = f.payload(a);
      const HolomorphicFunction fa = [&payload](std::complex<double> z) { return evaluate(payload, point(z)); };
      const double cell = std::min(radius[a] / 3, options.default_cell);
      results[a] = adaptive_runge(fa, k, cell, eps, options.max_iters, options.runge);
    });
    std::string failed;
    for (std::size_t a = 0; a < atoms; ++a) {
      if (!results[a].converged || pole_clearance(results[a].approximant, k) < options.pole_clearance)
        failed += (failed.empty() ? "" : ", ") + f.space().label(a);
    }
    if (!failed.empty())
      throw ConvergenceError("random_runge_sequence: no certified approximant at epsilon " + std::to_string(eps) +
                             " for atoms: " + failed);
    RandomRationalApproximant step{f.space(), {}, {}};
    for (auto& r : results) {
      step.per_atom.push_back(std::move(r.approximant));
      step.certificates.push_back(r.certificate);
    }
    sequence.push_back(std::move(step));
  }
  return sequence;
}

}  // namespace rca
