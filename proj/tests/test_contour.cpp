#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rca/contour.hpp"

using namespace rca;
using cd = std::complex<double>;

namespace {

Contour square(double half, bool ccw = true) {
  std::vector<cd> v{{-half, -half}, {half, -half}, {half, half}, {-half, half}};
  if (!ccw) std::reverse(v.begin(), v.end());
  v.push_back(v.front());
  return Contour({{v}});
}

Contour annulus_squares() {
  auto outer = square(2).chains().front();
  auto inner = square(1, false).chains().front();
  return Contour({outer, inner});
}

// Minimum distance between two chains, vertex-to-segment in both directions.
double chain_gap(const Contour::Chain& a, const Contour::Chain& b) {
  double best = std::numeric_limits<double>::infinity();
  for (auto v : a.vertices)
    for (std::size_t i = 0; i + 1 < b.vertices.size(); ++i)
      best = std::min(best, segment_distance(v, b.vertices[i], b.vertices[i + 1]));
  for (auto v : b.vertices)
    for (std::size_t i = 0; i + 1 < a.vertices.size(); ++i)
      best = std::min(best, segment_distance(v, a.vertices[i], a.vertices[i + 1]));
  return best;
}

void check_contour_indices(const CompactSetSample& k, double cell, const Grid& grid) {
  const Contour c = build_contour(k, cell);
  const auto pts = oracle::values(k);
  for (auto z : pts) CHECK(winding_number(c, z) == 1);
  int far = 0;
  for (Eigen::Index n = 0; n < grid.node_count(); ++n) {
    const cd z = grid.node(n)(0);
    if (oracle::min_distance(z, pts) > 3 * cell) {
      ++far;
      CHECK(winding_number(c, z) == 0);
    }
  }
  CHECK(far > 0);
  for (std::size_t i = 0; i < c.chains().size(); ++i)
    for (std::size_t j = i + 1; j < c.chains().size(); ++j) CHECK(chain_gap(c.chains()[i], c.chains()[j]) > 0);
}

}  // namespace

TEST_SUITE("contour") {
  TEST_CASE("winding number of simple squares") {
    CHECK(winding_number(square(1), cd(0)) == 1);
    CHECK(winding_number(square(1), cd(3)) == 0);
    CHECK(winding_number(square(1, false), cd(0)) == -1);
    const Contour ring = annulus_squares();
    CHECK(winding_number(ring, cd(1.5, 0)) == 1);
    CHECK(winding_number(ring, cd(0.2, 0.3)) == 0);
    CHECK(oracle::ray_crossing_parity(ring, cd(1.5, 0)) == 1);
    CHECK(oracle::ray_crossing_parity(ring, cd(0.2, 0.3)) == 0);
  }

  TEST_CASE("winding number rejects points on the contour") {
    CHECK_THROWS_AS(winding_number(square(1), cd(1, 0.5)), InvalidArgument);
    CHECK_THROWS_AS(winding_number(square(1), cd(-1, -1)), InvalidArgument);
  }

  TEST_CASE("contour around a single point") {
    const auto k = CompactSetSample::from_values({0.0});
    const Contour c = build_contour(k, 1.0);
    CHECK(winding_number(c, cd(0)) == 1);
    CHECK(winding_number(c, cd(3.5, 0)) == 0);
    CHECK(c.chains().size() == 1);
  }

  TEST_CASE("contour around a circle is an annular pair") {
    const auto k = samples::circle<double>(0.0, 1.0, 256);
    const Contour c = build_contour(k, 0.25);
    CHECK(c.chains().size() == 2);
    CHECK(winding_number(c, cd(1)) == 1);
    CHECK(winding_number(c, cd(0)) == 0);
    double area = 0;
    for (const auto& ch : c.chains()) area += ch.signed_area2();
    CHECK(area > 0);
    check_contour_indices(k, 0.25, square_grid(-2.5, 2.5, 60));
  }

  TEST_CASE("contour around a segment is a single outer chain") {
    const auto k = samples::segment<double>(-1.0, 1.0, 101);
    const Contour c = build_contour(k, 0.5);
    CHECK(c.chains().size() == 1);
    CHECK(c.chains().front().signed_area2() > 0);
    CHECK(winding_number(c, cd(0)) == 1);
    check_contour_indices(k, 0.5, square_grid(-3.5, 3.5, 50));
  }

  TEST_CASE("contour with diagonal pinches keeps chains disjoint") {
    // two far-apart points whose lattice squares meet only at a corner
    const auto k = CompactSetSample::from_values({cd(-1.9, -0.5), cd(1.9, 0.5)});
    const Contour c = build_contour(k, 1.0);
    check_contour_indices(k, 1.0, square_grid(-6.3, 6.3, 63));
    // a scattered cloud exercises many pinch configurations
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-3, 3);
    std::vector<cd> pts(40);
    for (auto& z : pts) z = {u(rng), u(rng)};
    check_contour_indices(CompactSetSample::from_values(pts), 0.3, square_grid(-5.1, 5.1, 51));
  }

  TEST_CASE("winding number agrees with ray-crossing parity") {
    const auto k = samples::annulus<double>(0.0, 0.6, 1.0, 128, 3);
    const Contour c = build_contour(k, 0.1);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.7, 1.7);
    int tested = 0;
    while (tested < 1000) {
      const cd z(u(rng), u(rng));
      bool on = false;
      for (const auto& ch : c.chains())
        for (std::size_t i = 0; i + 1 < ch.vertices.size(); ++i)
          if (segment_distance(z, ch.vertices[i], ch.vertices[i + 1]) < 1e-9) on = true;
      if (on) continue;
      CHECK(winding_number(c, z) == oracle::ray_crossing_parity(c, z));
      ++tested;
    }
  }

  TEST_CASE("partition of the unit-side square") {
    const Contour c = square(0.5);
    const Partition p = partition_contour(c, 1.0);
    REQUIRE(p.size() == 4);
    CHECK(p.increments.sum() == cd(0));
    CHECK(p.increments(0) == cd(1, 0));
    CHECK(p.increments(1) == cd(0, 1));
    CHECK(p.nodes(0) == cd(-0.5, -0.5));
    CHECK(partition_contour(c, 0.5).size() == 8);
    CHECK(p.increments.array().abs().sum() <= c.total_length() + 1e-12);
    CHECK_THROWS_AS(partition_contour(c, 0.0), InvalidArgument);
  }

  TEST_CASE("partition refinement doubles and stays closed") {
    const auto k = samples::disc<double>(0.0, 1.0, 128, 50);
    const Contour c = build_contour(k, 0.25);
    double delta = 0.2;
    Partition previous = partition_contour(c, delta);
    for (int step = 0; step < 5; ++step) {
      delta /= 2;
      const Partition p = partition_contour(c, delta);
      CHECK(p.size() >= 2 * previous.size());
      CHECK(p.mesh <= delta);
      for (std::size_t ch = 0; ch < p.chain_count(); ++ch) {
        const auto first = p.chain_offsets[ch];
        const auto len = p.chain_offsets[ch + 1] - first;
        CHECK(std::abs(p.increments.segment(first, len).sum()) < 1e-12);
        for (Eigen::Index j = first; j < first + len; ++j) {
          // coarse nodes reappear every other fine node
          if ((j - first) % 2 == 0) {
            const auto coarse = previous.chain_offsets[ch] + (j - first) / 2;
            CHECK(p.nodes(j) == previous.nodes(coarse));
          }
        }
      }
      CHECK(p.increments.array().abs().sum() <= c.total_length() + 1e-9);
      previous = p;
    }
  }
}
