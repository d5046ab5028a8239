#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace linmix {

/** Raised when a computation cannot reach the accuracy it promises. */
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** Sum of k^{-s} over k > n, for s > 1 and n >= 0. Euler-Maclaurin beyond a short direct block. */
double power_tail(double s, std::int64_t n);

/** log(sum(exp(x))) without overflow; returns -inf for an empty input. */
double log_sum_exp(std::span<const double> x);

/** Ordinary least squares of y on x. */
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  std::size_t points = 0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/** Two-sided Student t quantile used for slope confidence intervals. */
double student_t_quantile(double prob, double dof);

/** Dyadic integer grid lo, 2lo, 4lo, ... up to hi inclusive. */
std::vector<std::int64_t> dyadic_grid(std::int64_t lo, std::int64_t hi);

}  // namespace linmix
