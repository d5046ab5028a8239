#include "linmix/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

namespace linmix {

double power_tail(double s, std::int64_t n) {
  if (!(s > 1.0)) throw std::invalid_argument("power_tail: exponent must exceed 1");
  if (n < 0) n = 0;
  constexpr std::int64_t kDirect = 64;
  const double a = static_cast<double>(n + kDirect + 1);
  // Euler-Maclaurin for sum_{k >= a} k^{-s}.
  double tail = std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s) +
                s * std::pow(a, -s - 1.0) / 12.0 -
                s * (s + 1.0) * (s + 2.0) * std::pow(a, -s - 3.0) / 720.0;
  for (std::int64_t k = n + kDirect; k > n; --k) tail += std::pow(static_cast<double>(k), -s);
  return tail;
}

double log_sum_exp(std::span<const double> x) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : x) mx = std::max(mx, v);
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (double v : x) acc += std::exp(v - mx);
  return mx + std::log(acc);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("fit_line: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return f;
}

double student_t_quantile(double prob, double dof) {
  boost::math::students_t dist(dof);
  return boost::math::quantile(dist, prob);
}

std::vector<std::int64_t> dyadic_grid(std::int64_t lo, std::int64_t hi) {
  if (lo < 1 || hi < lo) throw std::invalid_argument("dyadic_grid: need 1 <= lo <= hi");
  std::vector<std::int64_t> out;
  for (std::int64_t v = lo; v <= hi; v *= 2) out.push_back(v);
  return out;
}

}  // namespace linmix
