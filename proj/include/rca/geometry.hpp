#pragma once

// Points in C^n (n = 1, 2), finite samples of compact sets, rectangular
// grids and boolean grid masks.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rca/errors.hpp"

namespace rca {

template <typename Scalar>
using ComplexPointT =
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1, Eigen::ColMajor, 2, 1>;

/// One point per row, one complex coordinate per column.
template <typename Scalar>
using PointMatrixT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::ColMajor, Eigen::Dynamic, 2>;

using ComplexPoint = ComplexPointT<double>;
using PointMatrix = PointMatrixT<double>;

inline ComplexPoint point(std::complex<double> z) {
  ComplexPoint p(1);
  p(0) = z;
  return p;
}

inline ComplexPoint point(std::complex<double> z1, std::complex<double> z2) {
  ComplexPoint p(2);
  p << z1, z2;
  return p;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

/// Finite point sample standing in for a nonempty compact subset of C^n.
template <typename Scalar>
class BasicCompactSetSample {
 public:
  using Points = PointMatrixT<Scalar>;
  using Point = ComplexPointT<Scalar>;

  BasicCompactSetSample(Points points, std::string label = {})
      : points_(std::move(points)), label_(std::move(label)) {
    if (points_.rows() == 0) throw InvalidArgument("compact set sample must be nonempty");
    if (points_.cols() != 1 && points_.cols() != 2)
      throw InvalidArgument("compact set dimension must be 1 or 2");
    if (!all_finite(points_)) throw InvalidArgument("compact set sample has non-finite points");
  }

  /// One-variable sample from a list of complex numbers.
  static BasicCompactSetSample from_values(const std::vector<std::complex<Scalar>>& zs,
                                           std::string label = {}) {
    Points pts(static_cast<Eigen::Index>(zs.size()), 1);
    for (std::size_t i = 0; i < zs.size(); ++i) pts(static_cast<Eigen::Index>(i), 0) = zs[i];
    return BasicCompactSetSample(std::move(pts), std::move(label));
  }

  int dimension() const { return static_cast<int>(points_.cols()); }
  Eigen::Index size() const { return points_.rows(); }
  const Points& points() const { return points_; }
  Point point(Eigen::Index i) const { return points_.row(i).transpose(); }
  const std::string& label() const { return label_; }

  /// Largest Euclidean norm over the sample.
  Scalar max_norm() const { return std::sqrt(points_.rowwise().squaredNorm().maxCoeff()); }

 private:
  Points points_;
  std::string label_;
};

using CompactSetSample = BasicCompactSetSample<double>;

template <typename Scalar>
Scalar distance(const ComplexPointT<Scalar>& a, const ComplexPointT<Scalar>& b) {
  return (a - b).norm();
}

/// Squared Euclidean distance from z to each sample point.
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> squared_distances(const BasicCompactSetSample<Scalar>& k,
                                                          const ComplexPointT<Scalar>& z) {
  if (z.size() != k.dimension()) throw InvalidArgument("dimension mismatch");
  return (k.points().rowwise() - z.transpose()).rowwise().squaredNorm().array();
}

template <typename Scalar>
Scalar distance_to_set(const ComplexPointT<Scalar>& z, const BasicCompactSetSample<Scalar>& k) {
  return std::sqrt(squared_distances(k, z).minCoeff());
}

/// max(sup_a dist(a, B), sup_b dist(b, A)) over the samples, Euclidean metric.
template <typename Scalar>
Scalar hausdorff_distance(const BasicCompactSetSample<Scalar>& a,
                          const BasicCompactSetSample<Scalar>& b) {
  if (a.dimension() != b.dimension())
    throw InvalidArgument("hausdorff_distance: dimension mismatch");
  auto directed = [](const BasicCompactSetSample<Scalar>& from,
                     const BasicCompactSetSample<Scalar>& to) {
    Scalar worst = 0;
    for (Eigen::Index i = 0; i < from.size(); ++i)
      worst = std::max(worst, squared_distances(to, from.point(i)).minCoeff());
    return worst;
  };
  return std::sqrt(std::max(directed(a, b), directed(b, a)));
}

// Sample generators. Boundary samples start at angle 0 and run counter-clockwise.
namespace samples {

template <typename Scalar = double>
BasicCompactSetSample<Scalar> circle(std::complex<Scalar> center, Scalar radius, int count) {
  if (count < 1 || !(radius >= 0)) throw InvalidArgument("circle: bad count or radius");
  std::vector<std::complex<Scalar>> zs;
  zs.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const Scalar t = 2 * std::numbers::pi_v<Scalar> * j / count;
    zs.push_back(center + std::polar(radius, t));
  }
  return BasicCompactSetSample<Scalar>::from_values(zs, "circle");
}

/// Boundary circle plus a sunflower (Vogel spiral) interior fill.
template <typename Scalar = double>
BasicCompactSetSample<Scalar> disc(std::complex<Scalar> center, Scalar radius, int boundary,
                                   int interior) {
  if (boundary < 1 || interior < 0 || !(radius > 0))
    throw InvalidArgument("disc: bad sample counts or radius");
  std::vector<std::complex<Scalar>> zs;
  for (int j = 0; j < boundary; ++j)
    zs.push_back(center + std::polar(radius, 2 * std::numbers::pi_v<Scalar> * j / boundary));
  const Scalar golden = std::numbers::pi_v<Scalar> * (3 - std::sqrt(Scalar(5)));
  for (int j = 0; j < interior; ++j) {
    const Scalar r = radius * std::sqrt((j + Scalar(0.5)) / (interior + 1));
    zs.push_back(center + std::polar(r, golden * j));
  }
  return BasicCompactSetSample<Scalar>::from_values(zs, "disc");
}

/// count >= 2 equispaced samples including both endpoints.
template <typename Scalar = double>
BasicCompactSetSample<Scalar> segment(std::complex<Scalar> from, std::complex<Scalar> to,
                                      int count) {
  if (count < 2) throw InvalidArgument("segment: need at least 2 samples");
  std::vector<std::complex<Scalar>> zs;
  for (int j = 0; j < count; ++j) zs.push_back(from + (to - from) * (Scalar(j) / (count - 1)));
  return BasicCompactSetSample<Scalar>::from_values(zs, "segment");
}

/// Concentric circles from inner to outer radius.
template <typename Scalar = double>
BasicCompactSetSample<Scalar> annulus(std::complex<Scalar> center, Scalar inner, Scalar outer,
                                      int per_circle, int rings) {
  if (rings < 2 || per_circle < 1 || !(inner > 0) || !(outer > inner))
    throw InvalidArgument("annulus: bad parameters");
  std::vector<std::complex<Scalar>> zs;
  for (int r = 0; r < rings; ++r) {
    const Scalar rad = inner + (outer - inner) * r / (rings - 1);
    for (int j = 0; j < per_circle; ++j)
      zs.push_back(center + std::polar(rad, 2 * std::numbers::pi_v<Scalar> * j / per_circle));
  }
  return BasicCompactSetSample<Scalar>::from_values(zs, "annulus");
}

/// Distinguished boundary {|z1| = r1, |z2| = r2} of a bidisc in C^2.
template <typename Scalar = double>
BasicCompactSetSample<Scalar> torus(Scalar r1, Scalar r2, int n1, int n2) {
  if (n1 < 1 || n2 < 1) throw InvalidArgument("torus: bad sample counts");
  PointMatrixT<Scalar> pts(static_cast<Eigen::Index>(n1) * n2, 2);
  Eigen::Index row = 0;
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n2; ++b, ++row) {
      pts(row, 0) = std::polar(r1, 2 * std::numbers::pi_v<Scalar> * a / n1);
      pts(row, 1) = std::polar(r2, 2 * std::numbers::pi_v<Scalar> * b / n2);
    }
  return BasicCompactSetSample<Scalar>(std::move(pts), "torus");
}

}  // namespace samples

/// Regular lattice over a box of 1 to 4 real axes. Axes pair up into complex
/// coordinates (x, y) -> x + iy; an odd trailing axis is a real coordinate.
/// Node index runs with the first axis fastest.
template <typename Scalar>
class BasicGrid {
 public:
  using Interval = std::pair<Scalar, Scalar>;

  BasicGrid(std::vector<Interval> bbox, std::vector<int> resolution)
      : bbox_(std::move(bbox)), resolution_(std::move(resolution)) {
    if (bbox_.empty() || bbox_.size() > 4) throw InvalidArgument("grid needs 1 to 4 axes");
    if (bbox_.size() != resolution_.size())
      throw InvalidArgument("grid bbox and resolution differ in length");
    node_count_ = 1;
    for (std::size_t a = 0; a < bbox_.size(); ++a) {
      if (!(bbox_[a].second > bbox_[a].first) || !std::isfinite(bbox_[a].first) ||
          !std::isfinite(bbox_[a].second))
        throw InvalidArgument("grid bbox must have positive side lengths");
      if (resolution_[a] <= 0) throw InvalidArgument("grid resolution must be positive");
      node_count_ *= resolution_[a] + 1;
    }
  }

  int axes() const { return static_cast<int>(bbox_.size()); }
  int complex_dimension() const { return (axes() + 1) / 2; }
  Eigen::Index node_count() const { return node_count_; }
  const std::vector<Interval>& bbox() const { return bbox_; }
  const std::vector<int>& resolution() const { return resolution_; }
  int points_on_axis(int axis) const { return resolution_[static_cast<std::size_t>(axis)] + 1; }

  Scalar spacing(int axis) const {
    const auto& [lo, hi] = bbox_[static_cast<std::size_t>(axis)];
    return (hi - lo) / resolution_[static_cast<std::size_t>(axis)];
  }

  Scalar cell_diagonal() const {
    Scalar s = 0;
    for (int a = 0; a < axes(); ++a) s += spacing(a) * spacing(a);
    return std::sqrt(s);
  }

  /// Corners are reproduced exactly.
  Scalar coordinate(int axis, int i) const {
    const auto& [lo, hi] = bbox_[static_cast<std::size_t>(axis)];
    const int res = resolution_[static_cast<std::size_t>(axis)];
    if (i == res) return hi;
    return lo + (hi - lo) * Scalar(i) / Scalar(res);
  }

  std::vector<int> multi_index(Eigen::Index node) const {
    std::vector<int> idx(bbox_.size());
    for (std::size_t a = 0; a < bbox_.size(); ++a) {
      const int n = resolution_[a] + 1;
      idx[a] = static_cast<int>(node % n);
      node /= n;
    }
    return idx;
  }

  Eigen::Index flat_index(const std::vector<int>& idx) const {
    Eigen::Index flat = 0;
    for (std::size_t a = bbox_.size(); a-- > 0;) flat = flat * (resolution_[a] + 1) + idx[a];
    return flat;
  }

  std::vector<Scalar> real_coordinates(Eigen::Index node) const {
    const auto idx = multi_index(node);
    std::vector<Scalar> x(idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) x[a] = coordinate(static_cast<int>(a), idx[a]);
    return x;
  }

  ComplexPointT<Scalar> node(Eigen::Index n) const {
    const auto x = real_coordinates(n);
    ComplexPointT<Scalar> z(complex_dimension());
    for (int c = 0; c < complex_dimension(); ++c) {
      const std::size_t re = 2 * static_cast<std::size_t>(c);
      z(c) = std::complex<Scalar>(x[re], re + 1 < x.size() ? x[re + 1] : Scalar(0));
    }
    return z;
  }

  PointMatrixT<Scalar> nodes() const {
    PointMatrixT<Scalar> m(node_count_, complex_dimension());
    for (Eigen::Index n = 0; n < node_count_; ++n) m.row(n) = node(n).transpose();
    return m;
  }

  bool operator==(const BasicGrid&) const = default;

 private:
  std::vector<Interval> bbox_;
  std::vector<int> resolution_;
  Eigen::Index node_count_ = 0;
};

using Grid = BasicGrid<double>;

template <typename Scalar>
BasicGrid<Scalar> build_grid(std::vector<typename BasicGrid<Scalar>::Interval> bbox,
                             std::vector<int> resolution) {
  return BasicGrid<Scalar>(std::move(bbox), std::move(resolution));
}

inline Grid build_grid(std::vector<Grid::Interval> bbox, std::vector<int> resolution) {
  return Grid(std::move(bbox), std::move(resolution));
}

/// Square grid on [lo, hi]^2 viewed as a rectangle in C.
inline Grid square_grid(double lo, double hi, int resolution) {
  return Grid({{lo, hi}, {lo, hi}}, {resolution, resolution});
}

using MaskBits = Eigen::Array<bool, Eigen::Dynamic, 1>;

template <typename Scalar>
struct BasicGridMask {
  BasicGrid<Scalar> grid;
  MaskBits bits;

  BasicGridMask(BasicGrid<Scalar> g, MaskBits b) : grid(std::move(g)), bits(std::move(b)) {
    if (bits.size() != grid.node_count()) throw InvalidArgument("mask size differs from grid");
  }
  BasicGridMask(BasicGrid<Scalar> g, bool value)
      : grid(std::move(g)), bits(MaskBits::Constant(grid.node_count(), value)) {}

  Eigen::Index count() const { return bits.count(); }
};

using GridMask = BasicGridMask<double>;

template <typename Scalar>
Eigen::Index symmetric_difference(const BasicGridMask<Scalar>& a, const BasicGridMask<Scalar>& b) {
  if (!(a.grid == b.grid)) throw InvalidArgument("masks live on different grids");
  return (a.bits != b.bits).count();
}

/// Number of nodes set in `inner` but not in `outer`.
template <typename Scalar>
Eigen::Index subset_violations(const BasicGridMask<Scalar>& inner,
                               const BasicGridMask<Scalar>& outer) {
  if (!(inner.grid == outer.grid)) throw InvalidArgument("masks live on different grids");
  return (inner.bits && !outer.bits).count();
}

/// Distance from every grid node to the sample set.
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> node_distances(const BasicCompactSetSample<Scalar>& k,
                                                       const BasicGrid<Scalar>& grid) {
  if (grid.complex_dimension() != k.dimension())
    throw InvalidArgument("grid and compact set differ in dimension");
  Eigen::Array<Scalar, Eigen::Dynamic, 1> d(grid.node_count());
  for (Eigen::Index n = 0; n < grid.node_count(); ++n) d(n) = distance_to_set(grid.node(n), k);
  return d;
}

/// Nodes within `tol` of a sample point (the sampled stand-in for K itself).
template <typename Scalar>
BasicGridMask<Scalar> incidence_mask(const BasicCompactSetSample<Scalar>& k,
                                     const BasicGrid<Scalar>& grid, Scalar tol) {
  return BasicGridMask<Scalar>(grid, (node_distances(k, grid) <= tol).eval());
}

/// Polynomial hull of a planar sample by flood fill: K with its bounded
/// complementary components filled. Nodes farther than `tol` from K are
/// passable; the fill starts from every passable node on the grid border and
/// moves in 4-connected steps. Unreached nodes form the mask. `tol` defaults
/// to the cell diagonal.
template <typename Scalar>
BasicGridMask<Scalar> fill_oracle_1d(const BasicCompactSetSample<Scalar>& k,
                                     const BasicGrid<Scalar>& grid,
                                     std::optional<Scalar> tol = std::nullopt) {
  if (k.dimension() != 1) throw InvalidArgument("fill_oracle_1d needs a one-variable set");
  if (grid.axes() != 2) throw InvalidArgument("fill_oracle_1d needs a grid with two real axes");
  const Scalar t = tol.value_or(grid.cell_diagonal());
  const auto dist = node_distances(k, grid);
  const int nx = grid.points_on_axis(0);
  const int ny = grid.points_on_axis(1);
  MaskBits reached = MaskBits::Constant(grid.node_count(), false);
  std::deque<Eigen::Index> queue;
  auto seed = [&](int i, int j) {
    const Eigen::Index n = static_cast<Eigen::Index>(j) * nx + i;
    if (!reached(n) && dist(n) > t) {
      reached(n) = true;
      queue.push_back(n);
    }
  };
  for (int i = 0; i < nx; ++i) {
    seed(i, 0);
    seed(i, ny - 1);
  }
  for (int j = 0; j < ny; ++j) {
    seed(0, j);
    seed(nx - 1, j);
  }
  while (!queue.empty()) {
    const Eigen::Index n = queue.front();
    queue.pop_front();
    const int i = static_cast<int>(n % nx);
    const int j = static_cast<int>(n / nx);
    if (i > 0) seed(i - 1, j);
    if (i + 1 < nx) seed(i + 1, j);
    if (j > 0) seed(i, j - 1);
    if (j + 1 < ny) seed(i, j + 1);
  }
  return BasicGridMask<Scalar>(grid, (!reached).eval());
}

}  // namespace rca
