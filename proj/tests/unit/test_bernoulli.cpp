#include <cmath>

#include "doctest.h"
#include "nsdyn/bernoulli.hpp"
#include "nsdyn/random.hpp"

using namespace nsdyn;

namespace {

// Site measures of a compact family as a plain lookup, kept apart from the library.
struct Table {
  std::vector<double> base;
  Coord start;
  std::vector<std::vector<double>> window;
  const std::vector<double>& at(Coord k) const {
    if (k >= start && k < start + static_cast<Coord>(window.size())) return window[static_cast<std::size_t>(k - start)];
    return base;
  }
  BernoulliFamily family() const {
    std::vector<SiteMeasure> w;
    for (const auto& p : window) w.emplace_back(p);
    return BernoulliFamily::compactly_perturbed(SiteMeasure(base), start, w);
  }
};

double brute_log_rn(const Table& t, const Configuration& x, Coord n, Coord width) {
  double s = 0.0;
  for (Coord k = -width; k <= width; ++k) {
    const auto i = static_cast<std::size_t>(x.at(k) - 1);
    s += std::log(t.at(k - n)[i]) - std::log(t.at(k)[i]);
  }
  return s;
}

const Table kTable{{0.5, 0.5}, -1, {{0.8, 0.2}, {0.3, 0.7}, {0.6, 0.4}}};

}  // namespace

TEST_SUITE("bernoulli") {
  TEST_CASE("site measure validation and draws") {
    CHECK_THROWS_AS(SiteMeasure({0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(SiteMeasure({1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(SiteMeasure({-0.5, 1.5}), std::invalid_argument);
    const SiteMeasure m({0.2, 0.3, 0.5});
    CHECK(m.ratio() == doctest::Approx(2.5));
    CHECK(m.draw(0.0) == 1);
    CHECK(m.draw(0.19) == 1);
    CHECK(m.draw(0.21) == 2);
    CHECK(m.draw(0.99) == 3);
  }

  TEST_CASE("hellinger term closed form") {
    const double expect = 2.0 * std::pow(std::sqrt(0.75) - std::sqrt(0.25), 2);
    CHECK(hellinger_term(SiteMeasure({0.75, 0.25}), SiteMeasure({0.25, 0.75})) == doctest::Approx(expect).epsilon(1e-15));
    CHECK(expect == doctest::Approx(0.267949).epsilon(1e-6));
    CHECK(hellinger_term(SiteMeasure({0.5, 0.5}), SiteMeasure({0.5, 0.5})) == 0.0);
  }

  TEST_CASE("kakutani sums") {
    CHECK(kakutani_sum(BernoulliFamily::iid(SiteMeasure({0.3, 0.7})), 50).value == 0.0);

    const auto alt = BernoulliFamily::periodic({SiteMeasure({0.75, 0.25}), SiteMeasure({0.25, 0.75})});
    const auto k = kakutani_sum(alt, 100);
    CHECK(k.verdict == Verdict::divergent_certified);
    CHECK(k.value / 201.0 == doctest::Approx(2.0 * std::pow(std::sqrt(0.75) - std::sqrt(0.25), 2)).epsilon(1e-12));
    CHECK_FALSE(alt.nonsingular());

    double oracle = 0.0;
    for (Coord j = -100; j <= 100; ++j) {
      const auto& a = kTable.at(j);
      const auto& b = kTable.at(j - 1);
      for (std::size_t s = 0; s < a.size(); ++s) oracle += std::pow(std::sqrt(a[s]) - std::sqrt(b[s]), 2);
    }
    const auto c = kakutani_sum(kTable.family(), 100);
    CHECK(c.verdict == Verdict::convergent_certified);
    CHECK(std::abs(c.value - oracle) <= 1e-12);
    CHECK(c.tail_bound == 0.0);
    // A short horizon moves the boundary terms into the tail.
    const auto h = kakutani_sum(kTable.family(), 1);
    CHECK(std::abs(h.value + h.tail_bound - oracle) <= 1e-12);
  }

  TEST_CASE("rn derivative against brute force") {
    const auto fam = kTable.family();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Configuration x = fam.sample(seed);
      for (Coord n : {-5, -1, 0, 1, 2, 7}) {
        const LogValue v = rn_derivative(fam, x, n);
        CHECK(v.exact());
        CHECK(v.log_magnitude == doctest::Approx(brute_log_rn(kTable, x, n, 40)).epsilon(1e-13));
      }
    }
    CHECK(rn_derivative(BernoulliFamily::iid(SiteMeasure({0.2, 0.8})), fam.sample(1), 5).log_magnitude == 0.0);
  }

  TEST_CASE("summable family truncation is within its bound") {
    const SiteMeasure base({0.5, 0.5});
    const SiteMeasure alt({0.9, 0.1});
    const auto fam = BernoulliFamily::geometric_mixture(base, alt, 0.5, 0.7);
    const Configuration x = fam.sample(4);
    for (Coord n : {-3, 1, 4}) {
      double brute = 0.0;
      for (Coord k = -3000; k <= 3000; ++k) brute += fam.log_prob(k - n, x.at(k)) - fam.log_prob(k, x.at(k));
      const LogValue v = rn_derivative(fam, x, n, 1e-10);
      CHECK(v.certified());
      CHECK(v.error_bound <= 1e-10);
      CHECK(std::abs(v.log_magnitude - brute) <= v.error_bound + 1e-12);
    }
    const auto k = kakutani_sum(fam, 200, 1e-9);
    CHECK(k.verdict == Verdict::convergent_certified);
  }

  TEST_CASE("cocycle identity") {
    const auto fam = kTable.family();
    for (std::uint64_t i = 0; i < 100; ++i) {
      CounterStream s(i);
      const Configuration x = fam.sample(s.next_bits());
      const Coord n = static_cast<Coord>(s.next_bits() % 21) - 10;
      const Coord m = static_cast<Coord>(s.next_bits() % 21) - 10;
      CHECK(cocycle_check(fam, x, n, m));
    }
  }

  TEST_CASE("singular families") {
    const auto alt = BernoulliFamily::periodic({SiteMeasure({0.75, 0.25}), SiteMeasure({0.25, 0.75})});
    CHECK_THROWS_AS(rn_derivative(alt, alt.sample(1), 1), std::domain_error);
    // Shifting by a full period is fine.
    CHECK(rn_derivative(alt, alt.sample(1), 2).log_magnitude == 0.0);
  }

  TEST_CASE("uniformity constant") {
    const auto alt = BernoulliFamily::periodic({SiteMeasure({0.75, 0.25}), SiteMeasure({0.25, 0.75})});
    CHECK(uniformity_constant(alt, 10).value == doctest::Approx(3.0));
    CHECK(uniformity_constant(kTable.family(), 10).value == doctest::Approx(0.8 / 0.2));
  }

  TEST_CASE("homoclinic pairs obey the per-site product bound") {
    const auto fam = kTable.family();
    const Configuration x = fam.sample(9);
    for (Coord r = 0; r <= 2; ++r) {
      for (Symbol a = 1; a <= 2; ++a) {
        std::vector<Symbol> w(static_cast<std::size_t>(2 * r + 1), a);
        const Configuration y = rewire(x, Cylinder(-r, w));
        for (Coord n = -4; n <= 4; ++n) {
          const auto c = homoclinic_ratio_bound_check(fam, x, y, r, n);
          CHECK(c.within_product_bound);
          CHECK(c.within_site_bound);
          const double direct = rn_derivative(fam, x, n).log_magnitude - rn_derivative(fam, y, n).log_magnitude;
          CHECK(c.ratio_log == doctest::Approx(direct).epsilon(1e-12));
        }
      }
    }
  }

  TEST_CASE("conservativity") {
    const auto iid = BernoulliFamily::iid(SiteMeasure({0.5, 0.5}));
    const auto r = conservativity_probe(iid, iid.sample(1), 100);
    CHECK(r.partial_sums.back() == doctest::Approx(100.0));
    const auto fam = kTable.family();
    const auto c = conservativity_probe(fam, fam.sample(2), 1000);
    CHECK(c.verdict == Verdict::divergent_certified);
    CHECK(c.min_term >= c.term_lower_bound);
  }

  TEST_CASE("reindexing") {
    const auto fam = kTable.family();
    const auto moved = fam.reindexed(3);
    for (Coord k = -6; k <= 6; ++k) CHECK(moved.at(k) == fam.at(k - 3));
  }
}
