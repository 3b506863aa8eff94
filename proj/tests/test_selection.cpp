#include <doctest.h>

#include "oracles.hpp"
#include "rca/selection.hpp"

using namespace rca;
using cd = std::complex<double>;

namespace {

FunctionPayload constant(cd c) { return Polynomial::constant(1, c); }

// f = 0, term j is 1/j on the first atom and 2^-j on the second.
ApproximationSequence two_rate(int terms) {
  const auto space = ParameterSpace::uniform(2);
  std::vector<SequenceTerm> seq;
  for (int j = 1; j <= terms; ++j)
    seq.emplace_back(RandomFunction(space, {constant(1.0 / j), constant(std::ldexp(1.0, -j))}));
  const auto fiber = samples::disc<double>(0.0, 1.0, 16, 8);
  return ApproximationSequence(seq, RandomFunction::constant(space, constant(0.0)),
                               RandomCompactSet::constant(space, fiber));
}

// Joint sup over every atom and fiber sample.
double joint_error(const UniformizedFunction& g, const ApproximationSequence& seq) {
  double worst = 0;
  for (std::size_t a = 0; a < seq.space().size(); ++a) {
    const auto& fiber = seq.compact_set().fiber(a);
    for (Eigen::Index i = 0; i < fiber.size(); ++i)
      worst = std::max(worst, std::abs(g(a, fiber.point(i)) - evaluate(seq.target().payload(a), fiber.point(i))));
  }
  return worst;
}

}  // namespace

TEST_SUITE("selection") {
  TEST_CASE("two-rate selection") {
    const auto seq = two_rate(40);
    const auto map = compute_selection(seq, 0.1);
    CHECK(map.index == std::vector<std::size_t>{10, 4});
    CHECK(map.epsilon == 0.1);
    CHECK_THROWS_AS(compute_selection(seq, 0.01), ConvergenceError);
    try {
      compute_selection(seq, 0.01);
    } catch (const ConvergenceError& e) {
      CHECK(std::string(e.what()).find("w0") != std::string::npos);
      CHECK(std::string(e.what()).find("w1") == std::string::npos);
    }
  }

  TEST_CASE("exact terms select the first index") {
    const auto space = ParameterSpace::uniform(3);
    const RandomFunction f(space, {Polynomial::dense(Eigen::Vector2cd(1, 2)), constant(cd(0, 1)), ShiftedReciprocal{4.0}});
    const auto k = RandomCompactSet::constant(space, samples::circle<double>(0.0, 1.0, 32));
    const ApproximationSequence seq({f, f, f}, f, k);
    CHECK(compute_selection(seq, 1e-300).index == std::vector<std::size_t>{1, 1, 1});
  }

  TEST_CASE("tail selection on one atom") {
    const auto space = ParameterSpace::uniform(1);
    Eigen::MatrixXd errors(1, 6);
    errors << 0.5, 0.2, 0.05, 0.04, 0.03, 0.01;
    CHECK(select_from_errors(errors, space, 0.1).index.front() == 3);
    // a late bump moves the index past it
    errors(0, 3) = 0.2;
    CHECK(select_from_errors(errors, space, 0.1).index.front() == 5);
    CHECK(select_from_errors(errors, space, 0.01).index.front() == 6);
    CHECK_THROWS_AS(select_from_errors(errors, space, 0.001), ConvergenceError);
    CHECK_THROWS_AS(select_from_errors(errors, space, 0.0), InvalidArgument);
  }

  TEST_CASE("selection soundness and monotonicity on random tables") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(0, 1);
    const auto space = ParameterSpace::uniform(5);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::MatrixXd errors(5, 30);
      for (Eigen::Index a = 0; a < 5; ++a)
        for (Eigen::Index j = 0; j < 30; ++j) errors(a, j) = u(rng) / (1 + j);
      errors.col(29).setConstant(1e-6);
      std::vector<std::size_t> previous(5, 0);
      for (double eps : {0.5, 0.1, 0.05, 0.02, 0.01}) {
        const auto map = select_from_errors(errors, space, eps);
        for (std::size_t a = 0; a < 5; ++a) {
          // brute force: least n such that every later term is inside eps
          std::size_t brute = 30;
          for (std::size_t n = 30; n >= 1; --n) {
            if (errors(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(n - 1)) > eps) break;
            brute = n;
          }
          CHECK(map.index[a] == brute);
          for (auto j = map.index[a]; j <= 30; ++j)
            CHECK(errors(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j - 1)) <= eps);
          CHECK(map.index[a] >= previous[a]);
          previous[a] = map.index[a];
        }
      }
    }
  }

  TEST_CASE("uniformize splices input terms") {
    const auto seq = two_rate(1000);
    const std::vector<double> eps{0.1, 0.01, 0.001};
    const auto fs = uniformize(seq, eps);
    REQUIRE(fs.size() == 3);
    CHECK(fs[0].selection.index == std::vector<std::size_t>{10, 4});
    CHECK(fs[1].selection.index == std::vector<std::size_t>{100, 7});
    CHECK(fs[2].selection.index == std::vector<std::size_t>{1000, 10});
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(joint_error(fs[j], seq) <= eps[j]);
      for (std::size_t a = 0; a < 2; ++a)
        CHECK(fs[j].per_atom[a] == atom_function(seq.terms()[fs[j].selection.index[a] - 1], a));
    }
    CHECK_THROWS_AS(uniformize(seq, {0.01, 0.1}), InvalidArgument);
  }

  TEST_CASE("uniformize over a runge sequence") {
    const auto space = ParameterSpace::uniform(2);
    const auto disc = samples::disc<double>(0.0, 1.0, 128, 40);
    const RandomFunction f(space, {ShiftedReciprocal{2.0}, ShiftedReciprocal{cd(0, -3)}});
    const auto runge = random_runge_sequence(f, {1.0, 2.0}, disc, {1e-1, 1e-2});
    std::vector<SequenceTerm> terms(runge.begin(), runge.end());
    const ApproximationSequence seq(terms, f, RandomCompactSet::constant(space, disc));
    const auto fs = uniformize(seq, {1e-1, 1e-2});
    CHECK(joint_error(fs[0], seq) <= 1e-1);
    CHECK(joint_error(fs[1], seq) <= 1e-2);
    const auto table = error_table(seq);
    for (std::size_t a = 0; a < 2; ++a) {
      const auto expected = table(static_cast<Eigen::Index>(a), 0) <= 1e-2 ? 1u : 2u;
      CHECK(fs[1].selection.index[a] == expected);
    }
    CHECK(std::holds_alternative<RationalApproximant>(fs[1].per_atom[0]));
  }

  TEST_CASE("poles count as infinite error") {
    const auto space = ParameterSpace::uniform(1);
    const auto k = RandomCompactSet::constant(space, CompactSetSample::from_values({cd(0), cd(1)}));
    const RandomFunction target(space, {constant(0.0)});
    const ApproximationSequence seq({RandomFunction(space, {ShiftedReciprocal{1.0}}), target}, target, k);
    const auto table = error_table(seq);
    CHECK(table(0, 0) == std::numeric_limits<double>::infinity());
    CHECK(compute_selection(seq, 0.1).index.front() == 2);
  }

  TEST_CASE("convexity proxy") {
    CHECK(polynomially_convex_proxy(samples::disc<double>(0.0, 1.0, 256, 100)));
    CHECK(polynomially_convex_proxy(samples::segment<double>(-1.0, 1.0, 50)));
    CHECK(polynomially_convex_proxy(CompactSetSample::from_values({cd(0)})));
    CHECK(polynomially_convex_proxy(CompactSetSample::from_values({cd(0), cd(3, 1)})));
    CHECK_FALSE(polynomially_convex_proxy(samples::circle<double>(0.0, 1.0, 256)));
    CHECK_FALSE(polynomially_convex_proxy(samples::annulus<double>(0.0, 0.5, 1.0, 128, 4)));
  }

  TEST_CASE("oka weil fits on the disc") {
    const auto space = ParameterSpace::uniform(2);
    const auto disc = samples::disc<double>(0.0, 1.0, 256, 100);
    Eigen::VectorXcd exp_series(13);
    double fact = 1;
    for (int j = 0; j < 13; ++j) {
      exp_series(j) = 1.0 / fact;
      fact *= j + 1;
    }
    const RandomFunction f(space, {ShiftedReciprocal{2.0}, Polynomial::dense(exp_series)});
    const auto r = oka_weil_random(f, {1.0, 10.0}, RandomCompactSet::constant(space, disc), {1e-3, 1e-3});
    MESSAGE("degrees " << r.degrees[0] << " " << r.degrees[1] << " errors " << r.validation_error[0] << " "
                       << r.validation_error[1]);
    CHECK(r.certified == std::vector<bool>{true, true});
    CHECK(r.exceptional_weight == 0.0);
    CHECK(r.degrees[0] <= 16);
    CHECK(r.degrees[0] >= 6);
    // recheck the returned payloads on the samples
    for (std::size_t a = 0; a < 2; ++a) {
      double err = 0;
      for (Eigen::Index i = 0; i < disc.size(); ++i)
        err = std::max(err, std::abs(evaluate(r.polynomials.payload(a), disc.point(i)) - evaluate(f.payload(a), disc.point(i))));
      CHECK(err < 1e-3);
    }

    const RandomFunction mixed(space, {ShiftedReciprocal{2.0}, ShiftedReciprocal{2.0}});
    const auto m = oka_weil_random(mixed, {1.0, 1.0}, RandomCompactSet::constant(space, disc), {1e-2, 1e-4});
    CHECK(m.degrees[0] < m.degrees[1]);
  }

  TEST_CASE("oka weil reproduces polynomials") {
    const auto space = ParameterSpace::uniform(1);
    const auto disc = samples::disc<double>(0.0, 1.0, 64, 20);
    const RandomFunction cube(space, {Polynomial(1, {Monomial{{3, 0}, 1.0}})});
    const auto r = oka_weil_random(cube, {100.0}, RandomCompactSet::constant(space, disc), {1e-10});
    CHECK(r.degrees[0] == 3);
    CHECK(r.validation_error[0] < 1e-13);
  }

  TEST_CASE("oka weil failures") {
    const auto space = ParameterSpace({"ok", "hard"}, Eigen::Vector2d(1, 3));
    const auto disc = samples::disc<double>(0.0, 1.0, 128, 40);
    const RandomFunction f(space, {ShiftedReciprocal{3.0}, ShiftedReciprocal{1.05}});
    const auto k = RandomCompactSet::constant(space, disc);
    try {
      oka_weil_random(f, {2.0, 0.05}, k, {1e-3, 1e-6});
      FAIL("expected a certification failure");
    } catch (const ConvergenceError& e) {
      CHECK(std::string(e.what()).find("hard") != std::string::npos);
      CHECK(std::string(e.what()).find("ok (") == std::string::npos);
    }
    const auto r = oka_weil_random(f, {2.0, 0.05}, k, {1e-3, 1e-6}, OkaWeilOptions{.allow_exceptional = true});
    CHECK(r.certified == std::vector<bool>{true, false});
    CHECK(r.exceptional_weight == 3.0);

    const auto ring = RandomCompactSet::constant(space, samples::circle<double>(0.0, 1.0, 128));
    CHECK_THROWS_AS(oka_weil_random(f, {2.0, 0.05}, ring, {1e-3, 1e-3}), InvalidArgument);
  }
}
