#include <doctest.h>

#include <cmath>
#include <vector>

#include "kex/rng.hpp"

using namespace kex;

TEST_SUITE("rng") {
  TEST_CASE("streams are reproducible and seed-sensitive") {
    Stream a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
      const auto x = a.next_u64();
      CHECK(x == b.next_u64());
      (void)c;
    }
    Stream d(42);
    CHECK(d.next_u64() != Stream(43).next_u64());
  }

  TEST_CASE("derive_seed separates labels") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(derive_seed(7, 5, 6) == derive_seed(7, 5, 6));
  }

  TEST_CASE("uniform stays in [0, 1)") {
    Stream s(3);
    for (int i = 0; i < 100000; ++i) {
      const double u = s.uniform();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
    }
    KeyedStream k(9);
    for (int i = 0; i < 1000; ++i) {
      const double u = k.uniform();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
    }
  }

  TEST_CASE("poisson mean and variance") {
    for (double mean : {0.0, 1.5, 12.0, 37.0, 800.0}) {
      Stream s(11);
      const int n = 40000;
      double sum = 0, sq = 0;
      for (int i = 0; i < n; ++i) {
        const double x = s.poisson(mean);
        sum += x;
        sq += x * x;
      }
      const double m = sum / n;
      const double var = sq / n - m * m;
      CHECK(m == doctest::Approx(mean).epsilon(0.02));
      if (mean > 0) CHECK(var == doctest::Approx(mean).epsilon(0.05));
    }
    Stream s(1);
    CHECK_THROWS(s.poisson(-1.0));
  }

  TEST_CASE("categorical frequencies follow the probabilities") {
    Stream s(5);
    const std::vector<double> p{0.03, 0.46, 0.42, 0.09};
    std::vector<int> count(4, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++count[s.categorical(p)];
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(count[i] / double(n) - p[i]) < 0.005);
    const std::vector<double> zero_first{0.0, 1.0};
    for (int i = 0; i < 100; ++i) CHECK(s.categorical(zero_first) == 1);
  }
}
