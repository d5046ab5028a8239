#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "linmix/measure_params.hpp"

namespace linmix {

/** Read-only view of coordinates y_m = z_m / W_m. */
struct CoordinateView {
  const double* z = nullptr;
  const double* W = nullptr;
  std::size_t count = 0;

  double operator[](std::size_t m) const { return m < count ? z[m] / W[m] : 0.0; }
};

/**
 * A point y_0..y_D of l^p(Z_+). Coordinates are held as z_m = W_m y_m against a shared weight
 * table so that the backward shift is a pure index shift.
 */
class LpVector {
 public:
  LpVector() = default;
  static LpVector from_coords(std::vector<double> y, double p_exp, double tail_bound = 0.0);
  static LpVector from_weighted(std::vector<double> z, std::shared_ptr<const std::vector<double>> W,
                                double p_exp, double tail_bound);

  std::size_t size() const { return z_.size(); }
  double coord(std::size_t m) const;
  std::vector<double> coords() const;
  double norm() const;
  double p_exp() const { return p_exp_; }
  /** Bound on the norm of everything beyond the stored coordinates. */
  double tail_bound() const { return tail_bound_; }
  CoordinateView view() const { return {z_.data(), W_->data(), z_.size()}; }
  std::span<const double> weighted() const { return z_; }
  const std::shared_ptr<const std::vector<double>>& scale() const { return W_; }

  void write_csv(std::ostream& os) const;

 private:
  std::vector<double> z_;
  std::shared_ptr<const std::vector<double>> W_;
  double p_exp_ = 2.0;
  double tail_bound_ = 0.0;
};

/** || a - b ||_p over stored coordinates. */
double distance(const LpVector& a, const LpVector& b);

/** Backward shift with W_m = m^alpha (W_0 = 1) and seeds x_n = alpha_n e_0. */
class ShiftModel {
 public:
  double alpha() const { return alpha_; }
  double p_exp() const { return p_exp_; }
  int depth() const { return M_; }
  double weight(int m) const;
  /** W_k = k^alpha for any k >= 0, not limited to the truncation. */
  double cumulative_weight(double k) const;
  const std::shared_ptr<const std::vector<double>>& weight_table() const { return W_; }
  int seed_count() const { return static_cast<int>(seeds_.size()); }
  double seed(int n) const;
  const std::vector<double>& seeds() const { return seeds_; }
  /** max |alpha_n| over n <= count. */
  double seed_bound(int count) const;
  /** (sum_{m >= j} W_m^{-p})^{1/p}, the norm of unit-envelope coordinates from j on. */
  double weight_tail(std::int64_t j) const;

  double forward_orbit_norm(int n, int k) const { return k == 0 ? std::abs(seed(n)) : 0.0; }
  double backward_orbit_norm(int n, int k) const { return std::abs(seed(n)) / cumulative_weight(k); }

 private:
  friend ShiftModel canonical_shift(double, double, int, const GrowthChain&, int);
  double alpha_ = 2.0;
  double p_exp_ = 2.0;
  int M_ = 0;
  std::shared_ptr<const std::vector<double>> W_;
  std::vector<double> seeds_;
};

/** Seeds enumerate the dyadic grid 0, 1, -1, 1/2, -1/2, 3/2, ... keeping |x|^p <= omega_0(n). */
ShiftModel canonical_shift(double alpha, double p_exp, int M, const GrowthChain& chain, int seed_count = 0);

LpVector apply_T(const ShiftModel& model, const LpVector& v, int steps);
LpVector apply_S(const ShiftModel& model, int seed_index, int k);

/** A finite combination sum S_k x_{n} approximating a target. */
struct SeedCombination {
  std::vector<std::pair<int, int>> terms;  // (seed index, k)
  LpVector value;
  double residual = 0.0;
};
SeedCombination approximate_with_seeds(const ShiftModel& model, const LpVector& target, double delta,
                                       int max_terms_per_coord = 64);

}  // namespace linmix
