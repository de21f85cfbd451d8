#include <cmath>

#include "doctest.h"
#include "nsdyn/ergodic.hpp"

using namespace nsdyn;

namespace {

BernoulliFamily compact() {
  return BernoulliFamily::compactly_perturbed(SiteMeasure({0.5, 0.5}), -1,
                                              {SiteMeasure({0.8, 0.2}), SiteMeasure({0.3, 0.7})});
}

}  // namespace

TEST_SUITE("ergodic") {
  TEST_CASE("observables") {
    const auto f = CylinderObservable{1.0, {{2.0, Cylinder(0, {1})}, {-1.0, Cylinder(1, {2})}}};
    CHECK(f.sup() == 3.0);
    CHECK(f.inf() == 0.0);
    const Configuration x = Configuration::from_window(0, {1, 2});
    CHECK(f(x) == 2.0);
  }

  TEST_CASE("integrals and norms") {
    const auto sys = bernoulli_system(compact());
    const auto f = CylinderObservable::indicator(Cylinder(-1, {1, 2}));
    CHECK(integral(*sys, f) == doctest::Approx(0.8 * 0.7).epsilon(1e-15));
    CHECK(l1_norm(*sys, CylinderObservable{-0.5, {{1.0, Cylinder(0, {1})}}}) == doctest::Approx(0.5));
    CHECK(checkpoint_grid(100) == std::vector<Coord>{1, 2, 4, 8, 16, 32, 64, 100});
  }

  TEST_CASE("dual series of one counts steps on measure-preserving systems") {
    const auto sys = bernoulli_system(BernoulliFamily::iid(SiteMeasure({0.3, 0.7})));
    const auto s = dual_series(*sys, CylinderObservable::constant_function(1.0), sys->sample(3), 1000);
    for (const auto& p : s.checkpoints) CHECK(p.value == static_cast<double>(p.n));
  }

  TEST_CASE("dual series against a direct sum of RN weights") {
    const auto fam = compact();
    const auto sys = bernoulli_system(fam);
    const Configuration x = sys->sample(4);
    const auto f = CylinderObservable::indicator(Cylinder(0, {1}));
    const auto s = dual_series(*sys, f, x, 64);
    double direct = 0.0;
    for (Coord k = 0; k < 64; ++k) {
      double log_w = 0.0;
      for (Coord j = -80; j <= 80; ++j) log_w += fam.log_prob(j + k, x.at(j)) - fam.log_prob(j, x.at(j));
      direct += (x.at(-k) == 1 ? 1.0 : 0.0) * std::exp(log_w);
    }
    CHECK(s.checkpoints.back().value == doctest::Approx(direct).epsilon(1e-12));
  }

  TEST_CASE("birkhoff and hurewicz ratios approach the mean") {
    const auto sys = bernoulli_system(BernoulliFamily::iid(SiteMeasure({0.5, 0.5})));
    const auto f = CylinderObservable::indicator(Cylinder(0, {1}));
    const Configuration x = sys->sample(9);
    CHECK(std::abs(birkhoff_series(f, x, 100000).empirical_limit - 0.5) < 0.01);
    CHECK(std::abs(hurewicz_ratio_series(*sys, f, x, 100000).empirical_limit - 0.5) < 0.01);
    const auto msys = markov_system(MarkovFamily::homogeneous(Sft::golden_mean(), [] {
      Eigen::MatrixXd p(2, 2);
      p << 0.5, 0.5, 1.0, 0.0;
      return p;
    }()));
    CHECK(std::abs(hurewicz_ratio_series(*msys, f, msys->sample(2), 100000).empirical_limit - 2.0 / 3.0) < 0.01);
  }

  TEST_CASE("maximal inequality") {
    const auto sys = bernoulli_system(compact());
    const auto f = CylinderObservable::indicator(Cylinder(0, {1}));
    const auto r = maximal_inequality_probe(*sys, f, 0.9, 64, 2000, 5);
    CHECK(r.ok);
    CHECK(r.empirical_tail <= r.bound + r.slack);
    CHECK(r.l1_norm == doctest::Approx(0.3));
  }

  TEST_CASE("liminf probe on a fair coin") {
    const auto sys = bernoulli_system(BernoulliFamily::iid(SiteMeasure({0.5, 0.5})));
    const auto f = CylinderObservable::indicator(Cylinder(0, {1}));
    std::vector<std::int64_t> times(1024);
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<std::int64_t>(i);
    const auto r = theorem11_probe(symbolic_trajectory(sys, f), times, {64, 128, 256, 512, 1024}, 1.0, 0.5, 200, 1);
    CHECK(r.estimates.size() == 200);
    CHECK(r.pass);
    CHECK(r.quantile05 < 0.5);
    CHECK_THROWS_AS(theorem11_probe(symbolic_trajectory(sys, f), times, {2048}, 1.0, 0.5, 10, 1), std::invalid_argument);
  }
}
