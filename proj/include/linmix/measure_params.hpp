#pragma once

#include <functional>
#include <map>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace linmix {

/** A class weight omega(kappa) > 1 on positive integers, tagged for serialization. */
struct GrowthSpec {
  std::string kind;  // "log": log(k + shift); "affine": a + b k
  std::map<std::string, double> params;

  double operator()(int kappa) const;
};

GrowthSpec log_growth(double shift = 2.718281828459045);
GrowthSpec affine_growth(double a, double b);

/**
 * The chain (omega, omega_1, omega_0) tabulated on 1..K_max (omega_0 on 1..2K_max).
 *
 * omega_1(k) = min(omega(k)^{1/4}, 2 omega_1(k-1)) and omega_0(k) = sqrt(omega_1(ceil(k/2))).
 */
class GrowthChain {
 public:
  /** Direct tables; used for test chains such as omega_0(k) = k. No invariants are checked. */
  static GrowthChain from_tables(std::vector<double> omega, std::vector<double> omega1,
                                 std::vector<double> omega0);

  int k_max() const { return static_cast<int>(omega_.size()); }
  int omega0_range() const { return static_cast<int>(omega0_.size()); }
  double omega(int k) const;
  double omega1(int k) const;
  double omega0(int k) const;
  double log_omega0(int k) const;
  const GrowthSpec& spec() const { return spec_; }

  /** Number of (k, k') pairs with k + k' <= K_max violating omega_0(k+k')^{k+k'} <= omega_1(k)^k omega_1(k')^{k'}. */
  int omega0_failures() const;
  /** First index from which omega_1^2/omega is nonincreasing up to K_max, or -1 if it never settles. */
  int ratio_monotone_from() const;
  bool doubling_holds() const;

 private:
  friend GrowthChain build_growth_chain(const GrowthSpec&, int);
  GrowthSpec spec_;
  std::vector<double> omega_, omega1_, omega0_;
};

/** Throws std::invalid_argument if omega is not > 1, nondecreasing and increasing overall on [1, K_max]. */
GrowthChain build_growth_chain(const GrowthSpec& omega, int k_max);

/**
 * Probabilities p_1..p_L stored as logarithms. Mass beyond L is declared as a remainder and
 * folded into symbol L for sampling; q_l are tails of the folded masses.
 */
class SymbolWeights {
 public:
  static SymbolWeights from_log_masses(std::vector<double> log_p, double log_remainder);
  /** p_l = (1 - r) r^{l-1} with the geometric tail as remainder. */
  static SymbolWeights geometric(double ratio, int L);

  int size() const { return static_cast<int>(log_p_.size()); }
  double p(int l) const;
  double log_p(int l) const;
  double remainder() const;
  double log_remainder() const { return log_remainder_; }
  /** Folded mass: p_l for l < L, p_L + remainder for l = L. */
  double mass(int l) const;
  /** q_l = sum_{m >= l} mass(m), l in 1..L+1. */
  double tail(int l) const;
  const std::vector<double>& log_masses() const { return log_p_; }

 private:
  std::vector<double> log_p_;
  double log_remainder_ = 0.0;
  std::vector<double> mass_;
  std::vector<double> q_;
};

/**
 * Halving recursion layered with omega_0(l)^{2d} <= p_l^{-1/2} for l >= 2d, d <= d_max.
 * Given block levels N_1..N_{L+1}, the terms (N_{l+1} - N_l) p_l^{1/(4 d_max)} are also forced
 * to halve from l = 2 d_max on, which makes the level-weighted sums summable for every d <= d_max.
 */
SymbolWeights build_symbol_weights(const GrowthChain& chain, int d_max, int L,
                                   std::span<const std::int64_t> levels = {});

struct ConditionFit {
  double constant = 0.0;
  int worst_l = 0;
  int worst_k = 0;
  bool holds = false;
  bool growing_in_k = false;
};

struct PolynomialCondition {
  int d = 0;
  double margin = 0.0;  // max over l >= 2d of 2d log omega_0(l) + log(p_l)/2; <= 0 required
  std::vector<double> partial_sums;  // sum (N_{l+1} - N_l) p_l^{1/(4d)}
  bool sums_cauchy = false;
  bool holds = false;
};

struct ConditionReport {
  ConditionFit tail_ratio;                 // max_l q_{l+1}/p_l against 1/2
  bool tail_ratio_decreasing = false;
  std::optional<ConditionFit> sqrt_moment;  // sum_{m>=l} sqrt(p_m) w0(m)^k vs sqrt(p_l) max(w0(k)^k, w0(l)^k)
  std::optional<ConditionFit> moment;       // same without square roots
  std::vector<PolynomialCondition> polynomial;
  bool all_hold() const;
};

class BlockSchedule;

/** Fitted constants are judged against `limit`. */
ConditionReport check_weight_conditions(const SymbolWeights& w, const GrowthChain& chain, int k_max,
                                        const BlockSchedule* schedule = nullptr, int d_max = 0,
                                        double limit = 4.0);

}  // namespace linmix
