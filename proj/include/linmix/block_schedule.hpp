#pragma once

#include <cstdint>
#include <vector>

#include "linmix/measure_params.hpp"
#include "linmix/shift_model.hpp"

namespace linmix {

/**
 * Levels N_1 < N_2 < ... with convex gaps, chosen so that the orbit tail beyond N_n for symbols
 * of rank at most n is below 2^{-n}. beta_l = (1 - q_{l+1})^{N_{l+1} - N_l} is kept in log form.
 */
class BlockSchedule {
 public:
  BlockSchedule() = default;
  BlockSchedule(std::vector<std::int64_t> N, std::vector<std::int64_t> minimal, std::vector<double> log_beta,
                std::vector<double> tails);

  int levels() const { return static_cast<int>(N_.size()); }
  std::int64_t N(int n) const;
  const std::vector<std::int64_t>& values() const { return N_; }
  /** Smallest level before convexity inflation. */
  const std::vector<std::int64_t>& minimal() const { return minimal_; }
  double log_beta(int l) const;
  const std::vector<double>& log_betas() const { return log_beta_; }
  /** Certified tail at each stored level. */
  const std::vector<double>& tails() const { return tails_; }
  /** sum_{l >= from} 2 log beta_l, the log of prod beta_l^2. */
  double log_beta_product(int from = 1) const;
  bool gaps_convex() const;

 private:
  std::vector<std::int64_t> N_;
  std::vector<std::int64_t> minimal_;
  std::vector<double> log_beta_;
  std::vector<double> tails_;
};

/** Worst-case orbit tail sum_{|k| > N} sup_{m <= min(|k|, L)} ||T^k x_m|| using the omega_0 envelope. */
double orbit_tail(const ShiftModel& model, const GrowthChain& chain, int L, std::int64_t N);

/** Levels N_1..N_R: smallest N with orbit_tail <= 2^{-n}, then inflated to strictly convex gaps. */
std::vector<std::int64_t> block_levels(const ShiftModel& model, const GrowthChain& chain, int L, int R,
                                       std::vector<std::int64_t>* minimal = nullptr);

BlockSchedule build_block_schedule(const ShiftModel& model, const SymbolWeights& w, const GrowthChain& chain,
                                   int R);

/**
 * Symbol weights for the measure on this model: levels N_1..N_{L+1} feed the summability cap.
 * For alpha <= 1 no schedule exists and the uncapped weights are returned.
 */
SymbolWeights build_measure_weights(const ShiftModel& model, const GrowthChain& chain, int d_max, int L);

}  // namespace linmix
