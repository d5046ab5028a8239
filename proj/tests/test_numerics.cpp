#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "linmix/numerics.hpp"

using namespace linmix;

TEST_CASE("power tails against zeta values and direct sums") {
  CHECK(power_tail(2.0, 0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(1e-14));
  CHECK(power_tail(4.0, 0) == doctest::Approx(std::pow(std::numbers::pi, 4) / 90.0).epsilon(1e-14));
  // Direct summation to 10^7 plus the integral remainder, which is far below the tolerance for s = 3.
  double direct = 0.0;
  for (long k = 10000000; k > 100; --k) direct += std::pow(static_cast<double>(k), -3.0);
  direct += 0.5 * std::pow(1e7, -2.0);
  CHECK(power_tail(3.0, 100) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("log_sum_exp does not overflow") {
  const std::vector<double> x = {1000.0, 1000.0};
  CHECK(log_sum_exp(x) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(std::isinf(log_sum_exp(std::vector<double>{})));
}

TEST_CASE("least squares recovers an exact line") {
  const std::vector<double> x = {0, 1, 2, 3, 4};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 - 2.0 * v);
  const LineFit f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(-2.0));
  CHECK(f.intercept == doctest::Approx(3.0));
  CHECK(f.slope_se == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("Student t quantile") {
  CHECK(student_t_quantile(0.975, 10) == doctest::Approx(2.2281388519649385).epsilon(1e-9));
}

TEST_CASE("dyadic grid") {
  CHECK(dyadic_grid(4, 64) == std::vector<std::int64_t>{4, 8, 16, 32, 64});
  CHECK(dyadic_grid(1, 1) == std::vector<std::int64_t>{1});
}
