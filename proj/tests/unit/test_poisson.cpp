#include <cmath>

#include "doctest.h"
#include "nsdyn/poisson.hpp"

using namespace nsdyn;

namespace {

double pmf(double w, int k) {
  double v = std::exp(-w);
  for (int i = 1; i <= k; ++i) v *= w / i;
  return v;
}

}  // namespace

TEST_SUITE("poisson") {
  TEST_CASE("regions") {
    CHECK(make_region({3, 1, 3, 2}) == Region{1, 2, 3});
    CHECK(interval(2, 4) == Region{2, 3, 4});
    CHECK(intersect({1, 2, 3}, {2, 3, 4}) == Region{2, 3});
    CHECK(unite({1, 5}, {2, 5}) == Region{1, 2, 5});
  }

  TEST_CASE("ground spaces") {
    const auto z = GroundSpace::integer_translation(0.5, 2);
    CHECK(z.apply(3, 4) == 11);
    CHECK(z.pull_back({0, 1}, 1) == Region{-2, -1});
    CHECK(z.weight({0, 1, 2}) == doctest::Approx(1.5));
    const auto c = GroundSpace::cyclic(5, 2);
    CHECK(c.apply(4, 1) == 1);
    CHECK(c.apply(0, -1) == 3);
    CHECK_THROWS(c.weight(Region{7}));
    const auto f = GroundSpace::finite({1.0, 2.0, 1.0}, {1, 0, 2});
    CHECK_FALSE(f.measure_preserving());
    CHECK(f.apply(0, 3) == 1);
    CHECK_THROWS_AS(GroundSpace::finite({1.0, 1.0}, {0, 0}), std::invalid_argument);
  }

  TEST_CASE("event probabilities against brute-force enumeration") {
    const auto gs = GroundSpace::integer_translation(1.0);
    CHECK(poisson_pmf(1.0, 0) == doctest::Approx(std::exp(-1.0)));
    PoissonEvent nested{{{{0}, 0}, {{0, 1}, 0}}};
    CHECK(event_probability(gs, nested) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));

    // [N({0,1}) = 1] and [N({1,2}) = 1] by summing over the counts at 0, 1, 2.
    PoissonEvent overlap{{{{0, 1}, 1}, {{1, 2}, 1}}};
    double oracle = 0.0;
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; b <= 3; ++b)
        for (int c = 0; c <= 3; ++c)
          if (a + b == 1 && b + c == 1) oracle += pmf(1, a) * pmf(1, b) * pmf(1, c);
    CHECK(event_probability(gs, overlap) == doctest::Approx(oracle).epsilon(1e-14));

    PoissonEvent impossible{{{{0, 1}, 0}, {{1}, 1}}};
    CHECK(event_probability(gs, impossible) == 0.0);
    CHECK(event_probability(gs, PoissonEvent{}) == 1.0);
  }

  TEST_CASE("mixing gap worked case") {
    const auto gs = GroundSpace::integer_translation(1.0);
    const auto g = mixing_gap(gs, PoissonEvent{{{{0}, 0}}}, PoissonEvent{{{{0, 1}, 0}}});
    CHECK(std::abs(g.gap - (std::exp(-2.0) - std::exp(-3.0))) < 1e-15);
    CHECK(std::abs(g.gap - 0.085548) < 1e-6);
    CHECK(g.bound == 2.0);
    CHECK(g.ok);
    const auto disjoint = mixing_gap(gs, PoissonEvent{{{{0}, 1}}}, PoissonEvent{{{{5}, 2}}});
    CHECK(disjoint.gap < 1e-16);
  }

  TEST_CASE("null subsequences") {
    const auto gs = GroundSpace::integer_translation(1.0);
    const Region a = interval(0, 3);
    const auto t = find_null_subsequence(gs, {a}, 20, 1000);
    REQUIRE(t.size() == 20);
    std::vector<std::int64_t> all{0};
    all.insert(all.end(), t.begin(), t.end());
    for (std::size_t j = 1; j < all.size(); ++j) {
      CHECK(all[j] > all[j - 1]);
      for (std::size_t l = 0; l < j; ++l) {
        CHECK(gs.weight(intersect(gs.pull_back(a, all[l]), gs.pull_back(a, all[j]))) < std::ldexp(1.0, -static_cast<int>(j)));
      }
    }
    CHECK(t.front() == 4);
    const auto cyc = GroundSpace::cyclic(3, 1);
    CHECK_THROWS_AS(find_null_subsequence(cyc, {Region{0, 1}}, 3, 100), HorizonExhausted);
  }

  TEST_CASE("point samples are pure and Poisson distributed") {
    const auto gs = GroundSpace::integer_translation(0.7);
    const PointSample s(gs, 5), same(gs, 5);
    for (Point p = -20; p <= 20; ++p) CHECK(s.count(p) == same.count(p));
    CHECK(s.count(interval(0, 9)) == [&] {
      int n = 0;
      for (Point p = 0; p <= 9; ++p) n += s.count(p);
      return n;
    }());
    double sum = 0.0;
    const int n = 20000;
    for (Point p = 0; p < n; ++p) sum += s.count(p);
    CHECK(std::abs(sum / n - 0.7) < 5.0 * std::sqrt(0.7 / n));
  }

  TEST_CASE("suspension indicator reads the pulled-back region") {
    const auto gs = GroundSpace::integer_translation(1.0);
    const PointSample s(gs, 9);
    const PoissonEvent e{{{interval(0, 2), 1}}};
    for (std::int64_t n = -5; n <= 5; ++n) {
      CHECK(suspension_indicator(s, e, n) == (s.count(interval(-n, 2 - n)) == 1 ? 1 : 0));
    }
  }

  TEST_CASE("block averages of independent times") {
    const auto gs = GroundSpace::integer_translation(0.1);
    const PoissonEvent e{{{interval(0, 9), 0}}};
    std::vector<std::int64_t> times;
    for (int j = 0; j < 64; ++j) times.push_back(10 * j);
    const auto stats = subsequence_average_experiment(gs, e, times, {16, 64}, 4000, 1);
    const double p = std::exp(-1.0);
    for (const auto& b : stats) {
      CHECK(std::abs(b.mean - p) < 5.0 * std::sqrt(p * (1 - p) / (4000.0 * static_cast<double>(b.n))));
      CHECK(b.variance / (p * (1 - p) / static_cast<double>(b.n)) == doctest::Approx(1.0).epsilon(0.15));
    }
  }

  TEST_CASE("event combinations and weak mixing") {
    const auto gs = GroundSpace::integer_translation(1.0);
    const EventCombination f{0.0, {{1.0, PoissonEvent{{{{0}, 0}}}}}};
    CHECK(f.integral(gs) == doctest::Approx(std::exp(-1.0)));
    const auto pts = weak_mixing_probe(gs, f, f, {0, 5, 50}, 2000, 3);
    CHECK(pts[0].limit == doctest::Approx(std::exp(-2.0)));
    CHECK(std::abs(pts[0].estimate - std::exp(-1.0)) < 0.05);
    CHECK(pts[1].within_interval);
    CHECK(pts[2].within_interval);
  }

  TEST_CASE("banach density filter") {
    const auto b = banach_density_filter([](std::int64_t n) { return 1.0 / static_cast<double>(n); }, 0.01, 1000);
    CHECK(b.members.size() == 900);
    CHECK(b.density == doctest::Approx(0.9));
  }
}
