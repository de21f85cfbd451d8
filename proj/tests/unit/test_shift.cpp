#include "doctest.h"
#include "nsdyn/bernoulli.hpp"
#include "nsdyn/shift.hpp"

using namespace nsdyn;

TEST_SUITE("shift") {
  TEST_CASE("alphabet and cylinder validation") {
    CHECK_THROWS_AS(Alphabet(1), std::invalid_argument);
    const Alphabet a(3);
    CHECK(a.contains(3));
    CHECK_FALSE(a.contains(0));
    CHECK_NOTHROW(Cylinder(-1, {1, 2, 3}).validate(a));
    CHECK_THROWS_AS(Cylinder(-1, {1, 4, 3}).validate(a), std::invalid_argument);
    CHECK_THROWS_AS(Cylinder(0, 3, {1, 2}), std::invalid_argument);
    const Cylinder c(-2, {1, 2, 1, 2, 2});
    CHECK(c.right() == 2);
    CHECK(c.at(0) == 1);
    CHECK(c.covers(-2));
    CHECK_FALSE(c.covers(3));
  }

  TEST_CASE("configurations are reproducible and independent of read order") {
    const auto fam = BernoulliFamily::iid(SiteMeasure({0.3, 0.7}));
    const Configuration x = fam.sample(11);
    const Configuration y = fam.sample(11);
    std::vector<Symbol> forward;
    for (Coord k = -50; k <= 50; ++k) forward.push_back(x.at(k));
    for (Coord k = 50; k >= -50; --k) CHECK(y.at(k) == forward[static_cast<std::size_t>(k + 50)]);
    CHECK(x.read(-50, 50) == forward);
    const Configuration z = fam.sample(12);
    CHECK(z.read(-50, 50) != forward);
  }

  TEST_CASE("shift moves coordinates left") {
    const auto fam = BernoulliFamily::iid(SiteMeasure({0.5, 0.5}));
    const Configuration x = fam.sample(5);
    for (Coord n : {-7, -1, 0, 1, 13}) {
      const Configuration y = shift(x, n);
      for (Coord k = -20; k <= 20; ++k) CHECK(y.at(k) == x.at(k + n));
      const Configuration back = shift(y, -n);
      CHECK(back.read(-20, 20) == x.read(-20, 20));
    }
  }

  TEST_CASE("rewire replaces only the block") {
    const auto fam = BernoulliFamily::iid(SiteMeasure({0.5, 0.5}));
    const Configuration x = fam.sample(8);
    const Cylinder block(-1, {2, 2, 2});
    const Configuration y = rewire(x, block);
    CHECK(y.in(block));
    for (Coord k = -30; k <= 30; ++k) {
      if (!block.covers(k)) CHECK(y.at(k) == x.at(k));
    }
    // Rewiring a shifted configuration acts in its own coordinates.
    const Configuration s = rewire(shift(x, 4), block);
    CHECK(s.in(block));
    CHECK(s.at(5) == x.at(9));
  }

  TEST_CASE("explicit windows") {
    const Configuration w = Configuration::from_window(-1, {1, 2, 1});
    CHECK(w.at(0) == 2);
    CHECK_THROWS_AS(w.at(2), std::out_of_range);
    const auto fam = BernoulliFamily::iid(SiteMeasure({0.5, 0.5}));
    const Configuration t = Configuration::from_window(-1, {1, 2, 1}, fam.sampler(), 3);
    CHECK(t.in(Cylinder(-1, {1, 2, 1})));
    CHECK_NOTHROW(t.at(1000));
    CHECK_THROWS_AS(Configuration::from_window(0, {}), std::invalid_argument);
  }

  TEST_CASE("coordinate cap") {
    const auto fam = BernoulliFamily::iid(SiteMeasure({0.5, 0.5}));
    const Configuration x = fam.sample(1, 100);
    CHECK_THROWS_AS(x.read(-100, 100), std::length_error);
  }

  TEST_CASE("homoclinic radius") {
    const auto fam = BernoulliFamily::iid(SiteMeasure({0.5, 0.5}));
    const Configuration x = fam.sample(2);
    CHECK(homoclinic_radius(x, x, 10) == Coord{0});
    const Configuration y = rewire(x, Cylinder(3, {x.at(3) == 1 ? 2 : 1}));
    CHECK(homoclinic_radius(x, y, 10) == Coord{3});
    const Configuration far = rewire(x, Cylinder(-9, {x.at(-9) == 1 ? 2 : 1}));
    // A disagreement inside the slack band means the pair is not resolved.
    CHECK_FALSE(homoclinic_radius(x, far, 10).has_value());
    CHECK(homoclinic_radius(x, far, 10, 0) == Coord{9});
  }
}
