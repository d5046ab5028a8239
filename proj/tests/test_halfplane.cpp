#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "linmix/halfplane.hpp"

using namespace linmix;

TEST_CASE("normalization and the closed-form case") {
  CHECK(h2_norm(constant_function(1.0)).norm == doctest::Approx(1.0).epsilon(1e-8));
  // pi^{-1} int (1 + t^2)^{-3} dt = 3/8.
  const NormEstimate e = h2_norm(decayed_profile(1));
  CHECK(std::abs(e.squared - 0.375) < 1e-8);
  CHECK(e.squared_error < 1e-8);
}

TEST_CASE("translation is a group action") {
  const DecayedFunction Q = decayed_profile(4);
  const DecayedFunction a = translate(translate(Q, 1), 2), b = translate(Q, 3), z = translate(Q, 0);
  for (int i = 0; i < 100; ++i) {
    const double x = -20.0 + 0.4 * i;
    CHECK(a(x) == doctest::Approx(b(x)).epsilon(1e-15));
    CHECK(z(x) == Q(x));
  }
  CHECK(h2_norm(z).norm == doctest::Approx(h2_norm(Q).norm).epsilon(1e-12));
  // The hump of tau_k Q sits at x = -k.
  const DecayedFunction t = translate(Q, 7);
  CHECK(t(-7.0) == doctest::Approx(1.0));
  CHECK(t(-7.0) > t(-6.9));
  CHECK(t(-7.0) > t(-7.1));
  REQUIRE(t.centers().size() == 1);
  CHECK(t.centers()[0] == doctest::Approx(-7.0));
}

TEST_CASE("squared norm of a far translate follows the local mass") {
  // Near t = -k the weight is about 1/(1 + k^2), so ||tau_k Q||^2 ~ pi^{-1} k^{-2} int (1 + u^2)^{-2p} du.
  const int p = 4;
  const double k = 512.0;
  const double local = std::tgamma(2.0 * p - 0.5) * std::sqrt(M_PI) / std::tgamma(2.0 * p) / M_PI;
  const NormEstimate e = h2_norm(translate(decayed_profile(p), k));
  CHECK(e.squared * (1.0 + k * k) == doctest::Approx(local).epsilon(1e-3));
}

TEST_CASE("translation decay exponent for p = 4") {
  const DecayFitResult r = translation_decay_fit(4, {8, 16, 32, 64, 128, 256, 512});
  CHECK(r.exponent == doctest::Approx(1.0).epsilon(0.05));
  CHECK(r.guaranteed == doctest::Approx(8.0 / 9.0));
  CHECK(r.exponent >= r.guaranteed);
  CHECK_THROWS_AS(translation_decay_fit(4, {1}), std::invalid_argument);
}

TEST_CASE("the fitted exponent does not depend on p") {
  const std::vector<std::int64_t> grid = {8, 16, 32, 64, 128, 256, 512};
  const double e4 = translation_decay_fit(4, grid).exponent;
  CHECK(translation_decay_fit(5, grid).exponent == doctest::Approx(e4).epsilon(1e-3));
  CHECK(translation_decay_fit(6, grid).exponent == doctest::Approx(e4).epsilon(1e-3));
}

TEST_CASE("envelope sums") {
  const EnvelopeCheck one = envelope_sum_check(4, {1.0}, 1);
  CHECK(one.lhs == doctest::Approx(h2_norm(translate(decayed_profile(4), 1)).norm).epsilon(1e-10));
  CHECK(one.lhs <= one.rhs);
  double lo = 1e300, hi = 0.0;
  for (int K : {16, 32, 64}) {
    const EnvelopeCheck e = envelope_sum_check(4, std::vector<double>(K, 1.0), K);
    lo = std::min(lo, e.ratio);
    hi = std::max(hi, e.ratio);
  }
  CHECK(hi / lo <= 1.5);
}

TEST_CASE("comparable indices") {
  // Overlap of [-k - k^{1/4}, -k + k^{1/4}] and the same for j, enumerated by hand for k = 16.
  int n = 0;
  for (int j = 1; j <= 64; ++j)
    if (std::abs(16.0 - j) <= std::pow(16.0, 0.25) + std::pow(double(j), 0.25)) ++n;
  CHECK(comparable_count(16, 64) == n);
  CHECK(n <= 4.0 * std::pow(16.0, 0.25));
  CHECK(comparable(16, 13));
  CHECK_FALSE(comparable(16, 12));
  CHECK(comparable_count(16, 64, false) == n - 1);
  CHECK(comparability_constant(4096, 2) <= 2.0);
  CHECK(comparability_constant(4096, 1) > 2.0);
}
