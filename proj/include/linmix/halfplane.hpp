#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace linmix {

/**
 * A boundary function on R with known hump locations. Translates and finite sums keep track of
 * the humps so quadrature can split there.
 */
class DecayedFunction {
 public:
  DecayedFunction() = default;
  DecayedFunction(std::function<double(double)> f, std::vector<double> centers);

  double operator()(double x) const { return f_(x); }
  const std::vector<double>& centers() const { return centers_; }

 private:
  std::function<double(double)> f_;
  std::vector<double> centers_;
};

/** theta * (1 + x^2)^{-p}. */
DecayedFunction decayed_profile(int p, double theta = 1.0);
DecayedFunction constant_function(double c);
/** x -> F(x + k). */
DecayedFunction translate(const DecayedFunction& F, double k);
DecayedFunction sum(const std::vector<DecayedFunction>& parts);

struct QuadratureConfig {
  double tolerance = 1e-12;  // absolute, on the squared norm
  int max_depth = 40;
  std::vector<double> split_points;  // extra split points on R
};

struct NormEstimate {
  double norm = 0.0;
  double error = 0.0;  // bound on |norm - true norm|
  double squared = 0.0;
  double squared_error = 0.0;
};

/**
 * (pi^{-1} int |F(t)|^2 dt / (1 + t^2))^{1/2}, integrated in theta = atan(t) so the whole line is
 * a finite interval; panels split at every hump.
 */
NormEstimate h2_norm(const DecayedFunction& F, const QuadratureConfig& q = {});

struct DecayFitResult {
  std::vector<std::int64_t> k;
  std::vector<double> norms;
  std::vector<double> errors;
  double exponent = 0.0;  // -slope of log norm against log k
  double guaranteed = 0.0;  // 2p / (2p + 1), the best exponent the epsilon split certifies
  std::vector<double> constants;  // norm * k^exponent
  std::vector<std::string> warnings;
};

/** ||tau_k Q||_2 over k_grid with Q = (1 + x^2)^{-p}. */
DecayFitResult translation_decay_fit(int p, const std::vector<std::int64_t>& k_grid, const QuadratureConfig& q = {});

/** Exponent certified by min(1 - eps/2, eps p) at its best eps. */
double guaranteed_decay_exponent(int p);

struct EnvelopeCheck {
  double lhs = 0.0;
  double lhs_error = 0.0;
  double rhs = 0.0;  // sum theta_k^2 k^{-3/2}
  double ratio = 0.0;
};

/** || sum_{k=1}^{k_max} tau_k (theta_k Q) ||_2 against sum theta_k^2 k^{-3/2}. */
EnvelopeCheck envelope_sum_check(int p, const std::vector<double>& theta, int k_max, const QuadratureConfig& q = {});

/** k ~ j when [-k - k^{1/4}, -k + k^{1/4}] and [-j - j^{1/4}, -j + j^{1/4}] meet. */
bool comparable(std::int64_t k, std::int64_t j);
/** Number of j in [1, j_max] with j ~ k; include_self counts j = k. */
int comparable_count(std::int64_t k, std::int64_t j_max, bool include_self = true);
/** Smallest C with k/C <= j <= C k over all comparable pairs up to n. */
double comparability_constant(std::int64_t n, std::int64_t min_index = 1);

}  // namespace linmix
