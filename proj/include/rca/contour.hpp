#pragma once

// Oriented polygonal contours around a planar sample set, winding numbers,
// and arc partitions of a contour.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <set>
#include <utility>
#include <vector>

#include "rca/errors.hpp"
#include "rca/geometry.hpp"

namespace rca {

/// Closed polygonal chain; the first vertex is repeated at the end.
template <typename Scalar>
struct BasicChain {
  std::vector<std::complex<Scalar>> vertices;

  std::size_t segment_count() const { return vertices.size() - 1; }

  Scalar length() const {
    Scalar l = 0;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) l += std::abs(vertices[i + 1] - vertices[i]);
    return l;
  }

  /// Twice the signed area; positive for counter-clockwise chains.
  Scalar signed_area2() const {
    Scalar a = 0;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
      a += vertices[i].real() * vertices[i + 1].imag() - vertices[i + 1].real() * vertices[i].imag();
    return a;
  }
};

template <typename Scalar>
class BasicContour {
 public:
  using Chain = BasicChain<Scalar>;

  explicit BasicContour(std::vector<Chain> chains) : chains_(std::move(chains)) {
    if (chains_.empty()) throw InvalidArgument("contour needs at least one chain");
    total_length_ = 0;
    for (const auto& c : chains_) {
      if (c.vertices.size() < 4) throw InvalidArgument("contour chain needs at least 4 vertices");
      if (c.vertices.front() != c.vertices.back()) throw InvalidArgument("contour chain is not closed");
      total_length_ += c.length();
    }
    if (!(total_length_ > 0)) throw InvalidArgument("contour has zero length");
  }

  const std::vector<Chain>& chains() const { return chains_; }
  Scalar total_length() const { return total_length_; }

 private:
  std::vector<Chain> chains_;
  Scalar total_length_ = 0;
};

using Contour = BasicContour<double>;

namespace detail {

using LatticeCell = std::pair<std::int64_t, std::int64_t>;
using LatticeVertex = std::pair<std::int64_t, std::int64_t>;

struct LatticeEdge {
  LatticeVertex from, to;
  LatticeCell cell;
};

struct TracedVertex {
  LatticeVertex v;
  bool pinch = false;
};

inline int direction_code(const LatticeVertex& a, const LatticeVertex& b) {
  const auto dx = b.first - a.first;
  const auto dy = b.second - a.second;
  return dx > 0 ? 0 : dy > 0 ? 1 : dx < 0 ? 2 : 3;
}

}  // namespace detail

/// Contour around a one-variable sample set. The squares [i, i+1] x [j, j+1]
/// (scaled by `cell`) within distance `cell` of some sample are unioned and
/// the boundary of the union is traced: outer chains counter-clockwise,
/// hole chains clockwise. Every sample then has winding number 1 and every
/// point farther than 3 * cell from the samples has winding number 0.
///
/// Where two selected squares touch only at a corner the chains are cut
/// by a quarter cell at that corner so that distinct chains stay disjoint.
template <typename Scalar>
BasicContour<Scalar> build_contour(const BasicCompactSetSample<Scalar>& k, Scalar cell) {
  using namespace detail;
  if (!(cell > 0)) throw InvalidArgument("build_contour: cell size must be positive");
  if (k.dimension() != 1) throw InvalidArgument("build_contour: one-variable sets only");

  std::set<LatticeCell> cells;
  for (Eigen::Index s = 0; s < k.size(); ++s) {
    const Scalar x = k.points()(s, 0).real();
    const Scalar y = k.points()(s, 0).imag();
    const auto i0 = static_cast<std::int64_t>(std::floor((x - cell) / cell));
    const auto i1 = static_cast<std::int64_t>(std::floor((x + cell) / cell));
    const auto j0 = static_cast<std::int64_t>(std::floor((y - cell) / cell));
    const auto j1 = static_cast<std::int64_t>(std::floor((y + cell) / cell));
    for (auto i = i0; i <= i1; ++i)
      for (auto j = j0; j <= j1; ++j) {
        const Scalar lo_x = Scalar(i) * cell, hi_x = Scalar(i + 1) * cell;
        const Scalar lo_y = Scalar(j) * cell, hi_y = Scalar(j + 1) * cell;
        const Scalar dx = std::max({lo_x - x, Scalar(0), x - hi_x});
        const Scalar dy = std::max({lo_y - y, Scalar(0), y - hi_y});
        if (dx * dx + dy * dy <= cell * cell) cells.insert({i, j});
      }
  }

  auto selected = [&](std::int64_t i, std::int64_t j) { return cells.count({i, j}) > 0; };

  // Counter-clockwise boundary edges of each square, kept where the neighbour
  // across the edge is not selected; interior edges cancel.
  std::map<LatticeVertex, std::vector<std::size_t>> outgoing;
  std::vector<LatticeEdge> edges;
  for (const auto& [i, j] : cells) {
    const LatticeVertex v00{i, j}, v10{i + 1, j}, v11{i + 1, j + 1}, v01{i, j + 1};
    auto add = [&](LatticeVertex a, LatticeVertex b) {
      outgoing[a].push_back(edges.size());
      edges.push_back({a, b, {i, j}});
    };
    if (!selected(i, j - 1)) add(v00, v10);
    if (!selected(i + 1, j)) add(v10, v11);
    if (!selected(i, j + 1)) add(v11, v01);
    if (!selected(i - 1, j)) add(v01, v00);
  }

  std::vector<bool> used(edges.size(), false);
  std::vector<BasicChain<Scalar>> chains;
  for (std::size_t start = 0; start < edges.size(); ++start) {
    if (used[start]) continue;
    std::vector<TracedVertex> trace;
    std::size_t e = start;
    while (!used[e]) {
      used[e] = true;
      const auto& options = outgoing[edges[e].to];
      std::size_t next = options.front();
      const bool pinch = options.size() > 1;
      if (pinch) {
        // Continue around the same square: a left turn.
        for (auto o : options)
          if (edges[o].cell == edges[e].cell) next = o;
      }
      trace.push_back({edges[e].to, pinch});
      e = next;
    }
    // trace[i] is the end vertex of the i-th edge; drop straight-through vertices.
    const std::size_t n = trace.size();
    std::vector<TracedVertex> corners;
    for (std::size_t t = 0; t < n; ++t) {
      const auto& prev = trace[(t + n - 1) % n].v;
      const auto& cur = trace[t].v;
      const auto& nxt = trace[(t + 1) % n].v;
      if (trace[t].pinch || direction_code(prev, cur) != direction_code(cur, nxt)) corners.push_back(trace[t]);
    }
    BasicChain<Scalar> chain;
    const std::size_t m = corners.size();
    auto to_complex = [cell](const LatticeVertex& v) {
      return std::complex<Scalar>(Scalar(v.first) * cell, Scalar(v.second) * cell);
    };
    for (std::size_t t = 0; t < m; ++t) {
      const auto here = to_complex(corners[t].v);
      if (!corners[t].pinch) {
        chain.vertices.push_back(here);
        continue;
      }
      const auto before = to_complex(corners[(t + m - 1) % m].v);
      const auto after = to_complex(corners[(t + 1) % m].v);
      const Scalar cut = cell / 4;
      chain.vertices.push_back(here + (before - here) / std::abs(before - here) * cut);
      chain.vertices.push_back(here + (after - here) / std::abs(after - here) * cut);
    }
    chain.vertices.push_back(chain.vertices.front());
    chains.push_back(std::move(chain));
  }
  return BasicContour<Scalar>(std::move(chains));
}

/// Distance from z to the segment [a, b].
template <typename Scalar>
Scalar segment_distance(std::complex<Scalar> z, std::complex<Scalar> a, std::complex<Scalar> b) {
  const auto ab = b - a;
  const Scalar len2 = std::norm(ab);
  Scalar t = len2 > 0 ? ((z - a) * std::conj(ab)).real() / len2 : Scalar(0);
  t = std::clamp(t, Scalar(0), Scalar(1));
  return std::abs(z - (a + t * ab));
}

/// Index of z with respect to the contour: the total change of arg(zeta - z)
/// along all chains over 2 pi, rounded. Points on the contour are rejected.
template <typename Scalar>
int winding_number(const BasicContour<Scalar>& contour, std::complex<Scalar> z) {
  const Scalar on_tol = Scalar(1e-12) * (1 + std::abs(z));
  Scalar turns = 0;
  for (const auto& c : contour.chains()) {
    for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i) {
      const auto a = c.vertices[i];
      const auto b = c.vertices[i + 1];
      if (segment_distance(z, a, b) <= on_tol) throw InvalidArgument("winding_number: point lies on the contour");
      turns += std::arg((b - z) / (a - z));
    }
  }
  return static_cast<int>(std::lround(turns / (2 * std::numbers::pi_v<Scalar>)));
}

/// Arc partition of a contour: node j is the initial point of arc j and
/// increments(j) is the arc's end point minus its initial point.
template <typename Scalar>
struct BasicPartition {
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> increments;
  std::vector<Eigen::Index> chain_offsets;  // first arc of each chain, plus a final end offset
  Scalar mesh = 0;                          // longest arc
  Scalar total_length = 0;                  // L of the contour

  Eigen::Index size() const { return nodes.size(); }
  std::size_t chain_count() const { return chain_offsets.size() - 1; }
};

using Partition = BasicPartition<double>;

/// Each chain of length L is cut into m equal-length arcs, m the least power
/// of two with L / m <= max_arc (and m >= 4). Halving max_arc doubles every
/// m, and the coarse nodes are a subset of the fine ones.
template <typename Scalar>
BasicPartition<Scalar> partition_contour(const BasicContour<Scalar>& contour, Scalar max_arc) {
  if (!(max_arc > 0)) throw InvalidArgument("partition_contour: arc length must be positive");
  std::vector<std::complex<Scalar>> nodes;
  std::vector<Eigen::Index> offsets;
  Scalar mesh = 0;
  for (const auto& c : contour.chains()) {
    offsets.push_back(static_cast<Eigen::Index>(nodes.size()));
    const Scalar length = c.length();
    std::int64_t m = 4;
    while (length / Scalar(m) > max_arc) m *= 2;
    const Scalar arc = length / Scalar(m);
    mesh = std::max(mesh, arc);
    std::size_t seg = 0;
    Scalar seg_start = 0;  // arclength at vertices[seg]
    for (std::int64_t k = 0; k < m; ++k) {
      const Scalar t = length * Scalar(k) / Scalar(m);
      while (seg + 1 < c.segment_count() &&
             seg_start + std::abs(c.vertices[seg + 1] - c.vertices[seg]) <= t) {
        seg_start += std::abs(c.vertices[seg + 1] - c.vertices[seg]);
        ++seg;
      }
      const auto a = c.vertices[seg];
      const auto b = c.vertices[seg + 1];
      const Scalar seg_len = std::abs(b - a);
      const Scalar u = std::clamp((t - seg_start) / seg_len, Scalar(0), Scalar(1));
      nodes.push_back(a + u * (b - a));
    }
  }
  offsets.push_back(static_cast<Eigen::Index>(nodes.size()));

  BasicPartition<Scalar> p;
  p.nodes.resize(static_cast<Eigen::Index>(nodes.size()));
  p.increments.resize(p.nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) p.nodes(static_cast<Eigen::Index>(i)) = nodes[i];
  for (std::size_t ch = 0; ch + 1 < offsets.size(); ++ch) {
    for (Eigen::Index j = offsets[ch]; j < offsets[ch + 1]; ++j) {
      const Eigen::Index next = j + 1 < offsets[ch + 1] ? j + 1 : offsets[ch];
      p.increments(j) = p.nodes(next) - p.nodes(j);
    }
  }
  p.chain_offsets = std::move(offsets);
  p.mesh = mesh;
  p.total_length = contour.total_length();
  return p;
}

}  // namespace rca
