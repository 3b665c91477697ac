#include <catch2/catch_amalgamated.hpp>

#include "aif/rng.hpp"

using aif::Rng;

TEST_CASE("same key reproduces the same sequence") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different keys and streams differ") {
  Rng a(42), b(43);
  int same = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++same;
  }
  REQUIRE(same == 0);

  Rng root(7);
  Rng s1 = root.derive(1), s2 = root.derive(2);
  REQUIRE(s1.next_u64() != s2.next_u64());
}

TEST_CASE("uniform doubles stay in [0, 1)") {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("next_index covers the range uniformly-ish") {
  Rng rng(3);
  std::vector<int> counts(10, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[rng.next_index(10)];
  // 3 sigma of binomial(1e5, 0.1)
  const double sigma = std::sqrt(draws * 0.1 * 0.9);
  for (int c : counts) {
    REQUIRE(std::abs(c - draws / 10) < 3.0 * sigma);
  }
}

TEST_CASE("gaussian draws have roughly standard moments") {
  Rng rng(5);
  double sum = 0.0, sum2 = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double g = rng.next_gaussian();
    sum += g;
    sum2 += g * g;
  }
  REQUIRE(std::abs(sum / n) < 0.02);
  REQUIRE(std::abs(sum2 / n - 1.0) < 0.05);
}

TEST_CASE("categorical sampling matches probabilities") {
  Rng rng(9);
  const std::vector<double> probs{0.7, 0.2, 0.1};
  std::vector<int> counts(3, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[rng.sample_categorical(probs)];
  for (int a = 0; a < 3; ++a) {
    const double freq = double(counts[a]) / draws;
    REQUIRE(std::abs(freq - probs[a]) < 0.01);
  }
}
