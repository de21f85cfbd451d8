#include <cmath>
#include <set>

#include "doctest.h"
#include "nsdyn/parallel.hpp"
#include "nsdyn/random.hpp"

using namespace nsdyn;

TEST_SUITE("random") {
  TEST_CASE("counter streams are pure functions of key and counter") {
    CounterStream a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
      const auto x = a.next_bits();
      CHECK(x == b.next_bits());
      CHECK(x != c.next_bits());
    }
  }

  TEST_CASE("derived seeds are distinct for distinct indices") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(7, i));
    CHECK(seen.size() == 10000);
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
  }

  TEST_CASE("unit doubles lie in [0,1) and look uniform") {
    CHECK(to_unit(0) == 0.0);
    CHECK(to_unit(~0ULL) < 1.0);
    CounterStream s(1);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += s.next();
    // Mean of U(0,1): sd of the average is 1/sqrt(12 n).
    CHECK(std::abs(sum / n - 0.5) < 5.0 / std::sqrt(12.0 * n));
  }

  TEST_CASE("poisson sampler matches mean and variance") {
    for (double mean : {0.3, 2.0, 25.0}) {
      CounterStream s(derive_seed(9, static_cast<std::uint64_t>(mean * 10)));
      const int n = 100000;
      double sum = 0.0, sq = 0.0;
      for (int i = 0; i < n; ++i) {
        const double k = sample_poisson(mean, s);
        sum += k;
        sq += k * k;
      }
      const double m = sum / n;
      const double v = sq / n - m * m;
      CHECK(std::abs(m - mean) < 5.0 * std::sqrt(mean / n));
      CHECK(std::abs(v / mean - 1.0) < 0.05);
    }
    CounterStream s(3);
    CHECK(sample_poisson(0.0, s) == 0);
  }

  TEST_CASE("parallel_map keeps index order and rethrows") {
    const auto v = parallel_map(1000, [](std::size_t i) { return i * i; }, 4);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == i * i);
    CHECK_THROWS_AS(parallel_map(10, [](std::size_t i) -> int {
                      if (i == 5) throw std::runtime_error("boom");
                      return 0;
                    }, 3),
                    std::runtime_error);
  }
}
