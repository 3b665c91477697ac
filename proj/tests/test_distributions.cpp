#include <catch2/catch_amalgamated.hpp>

#include "aif/distributions.hpp"
#include "aif/rng.hpp"

using namespace aif;

TEST_CASE("softmax of equal logits is uniform") {
  const auto two = softmax_with_log({0.0, 0.0});
  REQUIRE(two.probs[0] == Catch::Approx(0.5).epsilon(1e-15));
  REQUIRE(two.probs[1] == Catch::Approx(0.5).epsilon(1e-15));

  const auto three = softmax_with_log({-4.2, -4.2, -4.2});
  for (double p : three.probs) REQUIRE(p == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("softmax reproduces the precision-weighted example") {
  // -gamma * G with gamma = 1, G = [0, ln 9] gives probs [0.9, 0.1].
  const auto sm = softmax_with_log({-0.0, -std::log(9.0)});
  REQUIRE(sm.probs[0] == Catch::Approx(0.9).epsilon(1e-12));
  REQUIRE(sm.probs[1] == Catch::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("softmax normalization and shift invariance over random logits") {
  Rng rng(101);
  for (int rep = 0; rep < 1000; ++rep) {
    Vec logits(4);
    for (double& v : logits) v = rng.next_uniform(-30.0, 30.0);
    const auto sm = softmax_with_log(logits);
    double sum = 0.0;
    for (double p : sm.probs) sum += p;
    REQUIRE(std::abs(sum - 1.0) <= 1e-12);

    const double shift = rng.next_uniform(-50.0, 50.0);
    Vec shifted = logits;
    for (double& v : shifted) v += shift;
    const auto sm2 = softmax_with_log(shifted);
    for (int i = 0; i < 4; ++i) {
      REQUIRE(std::abs(sm.probs[i] - sm2.probs[i]) <= 1e-12);
    }
    // log_probs are consistent with probs
    for (int i = 0; i < 4; ++i) {
      REQUIRE(std::exp(sm.log_probs[i]) == Catch::Approx(sm.probs[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("softmax rejects non-finite logits") {
  REQUIRE_THROWS_AS(softmax_with_log({1.0, std::nan("")}), NumericsError);
}

TEST_CASE("entropy of known distributions") {
  REQUIRE(categorical_entropy({1.0, 0.0, 0.0}) == 0.0);
  REQUIRE(categorical_entropy({0.5, 0.5}) == Catch::Approx(std::log(2.0)).epsilon(1e-12));
  REQUIRE(categorical_entropy({1.0 / 3, 1.0 / 3, 1.0 / 3}) ==
          Catch::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("entropy bounded by [0, log n] on random distributions") {
  Rng rng(103);
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = 2 + rng.next_index(6);
    Vec p(n);
    double sum = 0.0;
    for (double& v : p) {
      v = -std::log(1.0 - rng.next_double());
      sum += v;
    }
    for (double& v : p) v /= sum;
    const double h = categorical_entropy(p);
    REQUIRE(h >= 0.0);
    REQUIRE(h <= std::log(double(n)) + 1e-12);
  }
}

TEST_CASE("entropy rejects non-distributions") {
  REQUIRE_THROWS_AS(categorical_entropy({0.5, 0.2}), std::invalid_argument);
  REQUIRE_THROWS_AS(categorical_entropy({1.5, -0.5}), std::invalid_argument);
}

TEST_CASE("gaussian kl identities and worked values") {
  const DiagGaussian std1({0.0}, {0.0});
  REQUIRE(diag_gaussian_kl(std1, std1) == 0.0);

  const DiagGaussian shifted({1.0}, {0.0});
  REQUIRE(diag_gaussian_kl(shifted, std1) == Catch::Approx(0.5).epsilon(1e-12));

  // N(0,1) vs N(0,4): ln 2 + 1/8 - 1/2
  const DiagGaussian wide({0.0}, {std::log(4.0)});
  REQUIRE(diag_gaussian_kl(std1, wide) ==
          Catch::Approx(std::log(2.0) + 0.125 - 0.5).epsilon(1e-12));
}

TEST_CASE("gaussian kl nonnegative on random pairs, zero on identical") {
  Rng rng(107);
  for (int rep = 0; rep < 1000; ++rep) {
    const int dim = 1 + rng.next_index(5);
    Vec mp(dim), mq(dim), lp(dim), lq(dim);
    for (int d = 0; d < dim; ++d) {
      mp[d] = rng.next_gaussian();
      mq[d] = rng.next_gaussian();
      lp[d] = rng.next_uniform(-5.0, 1.5);
      lq[d] = rng.next_uniform(-5.0, 1.5);
    }
    const DiagGaussian p(mp, lp), q(mq, lq);
    REQUIRE(diag_gaussian_kl(p, q) >= 0.0);
    REQUIRE(diag_gaussian_kl(p, p) == 0.0);
  }
}

TEST_CASE("gaussian kl dimension mismatch") {
  REQUIRE_THROWS_AS(diag_gaussian_kl(DiagGaussian({0.0}, {0.0}),
                                     DiagGaussian({0.0, 0.0}, {0.0, 0.0})),
                    std::invalid_argument);
}

TEST_CASE("log-variance clamps to [-6, 2] at construction") {
  const DiagGaussian g({0.0, 0.0}, {10.0, -30.0});
  REQUIRE(g.log_var[0] == 2.0);
  REQUIRE(g.log_var[1] == -6.0);
}

TEST_CASE("logpdf at the mean of a unit gaussian") {
  const DiagGaussian g({0.0}, {0.0});
  REQUIRE(diag_gaussian_logpdf({0.0}, g) ==
          Catch::Approx(-0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("logpdf is translation invariant") {
  Rng rng(109);
  for (int rep = 0; rep < 100; ++rep) {
    const Vec x{rng.next_gaussian(), rng.next_gaussian()};
    const Vec mu{rng.next_gaussian(), rng.next_gaussian()};
    const Vec lv{rng.next_uniform(-2, 2), rng.next_uniform(-2, 2)};
    const double shift = rng.next_gaussian();
    const double a = diag_gaussian_logpdf(x, DiagGaussian(mu, lv));
    const double b = diag_gaussian_logpdf({x[0] + shift, x[1] + shift},
                                          DiagGaussian({mu[0] + shift, mu[1] + shift}, lv));
    REQUIRE(a == Catch::Approx(b).margin(1e-9));
  }
}

TEST_CASE("logpdf strictly decreases away from the mean") {
  const DiagGaussian g({1.0}, {0.5});
  double prev = diag_gaussian_logpdf({1.0}, g);
  for (double offset = 0.5; offset < 5.0; offset += 0.5) {
    const double lp = diag_gaussian_logpdf({1.0 + offset}, g);
    REQUIRE(lp < prev);
    prev = lp;
  }
}
