#include <cmath>

#include "doctest.h"
#include "nsdyn/markov.hpp"

using namespace nsdyn;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;

namespace {

MatrixXd golden_p() {
  MatrixXd p(2, 2);
  p << 0.5, 0.5, 1.0, 0.0;
  return p;
}

RowVectorXd golden_pi() {
  RowVectorXd pi(2);
  pi << 2.0 / 3.0, 1.0 / 3.0;
  return pi;
}

MatrixXd golden_window(double a) {
  MatrixXd p(2, 2);
  p << a, 1.0 - a, 1.0, 0.0;
  return p;
}

MarkovFamily perturbed() { return MarkovFamily(Sft::golden_mean(), golden_p(), golden_pi(), -1, {golden_window(0.3), golden_window(0.6)}); }

// Plain product formula with marginals propagated from the window start.
struct Oracle {
  Coord start;
  std::vector<MatrixXd> window;
  MatrixXd p;
  RowVectorXd pi;
  const MatrixXd& trans(Coord k) const {
    if (k >= start && k < start + static_cast<Coord>(window.size())) return window[static_cast<std::size_t>(k - start)];
    return p;
  }
  RowVectorXd marginal(Coord k) const {
    RowVectorXd m = pi;
    for (Coord j = start; j < k; ++j) m = m * trans(j);
    return m;
  }
  double measure(Coord left, const std::vector<Symbol>& w) const {
    double v = marginal(left)(w[0] - 1);
    for (std::size_t i = 0; i + 1 < w.size(); ++i) v *= trans(left + static_cast<Coord>(i))(w[i] - 1, w[i + 1] - 1);
    return v;
  }
};

const Oracle kOracle{-1, {golden_window(0.3), golden_window(0.6)}, golden_p(), golden_pi()};

}  // namespace

TEST_SUITE("markov") {
  TEST_CASE("sft validation and primitivity") {
    Eigen::MatrixXi bad(2, 2);
    bad << 1, 2, 1, 0;
    CHECK_THROWS_AS(Sft{bad}, std::invalid_argument);
    CHECK(primitivity_index(Sft::golden_mean()) == 2);
    CHECK(primitivity_index(Sft::full(3)) == 1);
    Eigen::MatrixXi flip(2, 2);
    flip << 0, 1, 1, 0;
    CHECK_FALSE(primitivity_index(Sft(flip)).has_value());
    CHECK(Sft::golden_mean().admissible({1, 2, 1, 1}));
    CHECK_FALSE(Sft::golden_mean().admissible({1, 2, 2}));
    std::size_t words = 0;
    for_each_admissible_word(Sft::golden_mean(), 5, [&](const std::vector<Symbol>&) { ++words; });
    CHECK(words == 13);  // Fibonacci count of golden-mean words of length 5.
  }

  TEST_CASE("family validation") {
    MatrixXd p = golden_p();
    CHECK_NOTHROW(MarkovFamily(Sft::golden_mean(), p, golden_pi()));
    MatrixXd not_stochastic = p;
    not_stochastic(0, 0) = 0.6;
    CHECK_THROWS_AS(MarkovFamily(Sft::golden_mean(), not_stochastic, golden_pi()), std::invalid_argument);
    CHECK_THROWS_AS(MarkovFamily(Sft::full(2), p, golden_pi()), std::invalid_argument);
    RowVectorXd wrong(2);
    wrong << 0.5, 0.5;
    CHECK_THROWS_AS(MarkovFamily(Sft::golden_mean(), p, wrong), std::invalid_argument);
    const RowVectorXd pi = stationary_distribution(p);
    CHECK(pi(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  }

  TEST_CASE("cylinder measures") {
    const auto stat = MarkovFamily::homogeneous(Sft::golden_mean(), golden_p());
    CHECK(markov_cylinder_measure(stat, Cylinder(0, {1, 2})) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(markov_cylinder_measure(stat, Cylinder(0, {2, 2})), std::invalid_argument);
    CHECK(markov_cylinder_measure(stat, Cylinder()) == 1.0);
    const auto fam = perturbed();
    for (Coord left : {-4, -2, -1, 0, 1, 3}) {
      for_each_admissible_word(fam.sft(), 4, [&](const std::vector<Symbol>& w) {
        CHECK(markov_cylinder_measure(fam, Cylinder(left, w)) == doctest::Approx(kOracle.measure(left, w)).epsilon(1e-14));
      });
    }
    // Far to the right the marginal approaches pi again by mixing.
    const RowVectorXd far = fam.marginal(200);
    CHECK(std::abs(far(0) - 2.0 / 3.0) < 1e-12);
  }

  TEST_CASE("stationary chains have Z_n identically one") {
    const auto stat = MarkovFamily::homogeneous(Sft::golden_mean(), golden_p());
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Configuration x = stat.sample(seed);
      for (Coord n = 0; n <= 6; ++n) CHECK(z_n(stat, x, n).log_magnitude == 0.0);
    }
  }

  TEST_CASE("samples are admissible") {
    const auto fam = perturbed();
    for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(fam.sft().admissible(fam.sample(seed).read(-40, 40)));
  }

  TEST_CASE("rn derivative equals the stabilized cylinder ratio") {
    const auto fam = perturbed();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Configuration x = fam.sample(seed);
      for (Coord shift : {-2, 1, 3}) {
        const LogValue v = rn_derivative_markov(fam, x, shift);
        CHECK(v.certified());
        const Coord n = 20;
        const auto w = x.read(-n, n);
        const double oracle = std::log(kOracle.measure(-n - shift, w)) - std::log(kOracle.measure(-n, w));
        CHECK(v.log_magnitude == doctest::Approx(oracle).epsilon(1e-12));
      }
    }
    CHECK_FALSE(rn_derivative_markov(fam, fam.sample(1), 1, 0).certified());
  }

  TEST_CASE("martingale defect vanishes") {
    const auto fam = perturbed();
    for (Coord n = 0; n <= 3; ++n) {
      for_each_admissible_word(fam.sft(), static_cast<std::size_t>(2 * n + 1), [&](const std::vector<Symbol>& w) {
        CHECK(std::abs(martingale_defect(fam, Cylinder(-n, w))) <= 1e-12);
      });
    }
  }

  TEST_CASE("transition ratio constant") {
    const auto stat = MarkovFamily::homogeneous(Sft::golden_mean(), golden_p());
    const auto t = transition_ratio_constant(stat);
    CHECK(t.value == 1.0);
    CHECK_FALSE(t.floor_ok);
    CHECK(t.corrected_floor_ok);
    CHECK(transition_ratio_constant(perturbed()).value == doctest::Approx(0.7 / 0.3));
  }

  TEST_CASE("coupling certificate on the golden mean") {
    const auto stat = MarkovFamily::homogeneous(Sft::golden_mean(), golden_p());
    const auto cert = couple_cylinders(stat, Cylinder(-1, {1, 2, 1}), Cylinder(-1, {2, 1, 1}));
    CHECK(cert.bijective);
    CHECK(cert.pushforward_error <= 1e-15);
    CHECK(cert.b_ext.length() == 7);
    CHECK(cert.b_ext.at(-3) == cert.hub);
    CHECK(cert.c_ext.at(3) == cert.hub);
    const double b_prime = kOracle.measure(-3, cert.b_ext.word());
    const double b = kOracle.measure(-1, {1, 2, 1});
    CHECK(cert.b_fraction == doctest::Approx(b_prime / b).epsilon(1e-14));
    CHECK(cert.corrected_ok);
    const Configuration x = Configuration::from_window(-3, cert.b_ext.word(), stat.sampler(), 1);
    CHECK(apply_coupling(cert, x).in(cert.c_ext));
    CHECK_THROWS_AS(couple_cylinders(stat, Cylinder(-1, {1, 2, 1}), Cylinder(-2, {1, 1, 1, 1, 1})), std::invalid_argument);
  }

  TEST_CASE("tail triviality probe") {
    const auto fam = perturbed();
    const auto whole = tail_triviality_probe(fam, {Cylinder()}, 1);
    CHECK_FALSE(whole.violated());
    CHECK(whole.dense_cylinder.has_value());
    const auto small = tail_triviality_probe(fam, {Cylinder(-1, {2, 1, 2})}, 1);
    CHECK(small.cylinders_checked > 0);
  }
}
