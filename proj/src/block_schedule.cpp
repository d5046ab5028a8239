#include "linmix/block_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "linmix/numerics.hpp"

namespace linmix {

BlockSchedule::BlockSchedule(std::vector<std::int64_t> N, std::vector<std::int64_t> minimal,
                             std::vector<double> log_beta, std::vector<double> tails)
    : N_(std::move(N)), minimal_(std::move(minimal)), log_beta_(std::move(log_beta)), tails_(std::move(tails)) {}

std::int64_t BlockSchedule::N(int n) const {
  if (n < 1 || n > levels()) throw std::out_of_range("BlockSchedule::N: level out of range");
  return N_[n - 1];
}

double BlockSchedule::log_beta(int l) const {
  if (l < 1 || l > static_cast<int>(log_beta_.size())) throw std::out_of_range("BlockSchedule::log_beta");
  return log_beta_[l - 1];
}

double BlockSchedule::log_beta_product(int from) const {
  double acc = 0.0;
  for (int l = std::max(from, 1); l <= static_cast<int>(log_beta_.size()); ++l) acc += 2.0 * log_beta_[l - 1];
  return acc;
}

bool BlockSchedule::gaps_convex() const {
  for (std::size_t n = 0; n + 2 < N_.size(); ++n)
    if (!(N_[n + 2] - N_[n + 1] > N_[n + 1] - N_[n])) return false;
  return true;
}

double orbit_tail(const ShiftModel& model, const GrowthChain& chain, int L, std::int64_t N) {
  const double alpha = model.alpha();
  if (!(alpha > 1.0))
    throw std::invalid_argument("orbit tail: envelope sum of k^{-alpha} diverges for alpha <= 1");
  const double p = model.p_exp();
  // Backward orbit only: T^k x_m = 0 for k >= 1. Envelope |alpha_m| <= omega_0(m)^{1/p}.
  double env = 0.0;
  double acc = 0.0;
  std::int64_t k = N + 1;
  for (; k <= L; ++k) {
    env = 0.0;
    for (int m = 1; m <= k; ++m) env = std::max(env, std::pow(chain.omega0(m), 1.0 / p));
    acc += env / model.cumulative_weight(static_cast<double>(k));
  }
  double top = 0.0;
  for (int m = 1; m <= L; ++m) top = std::max(top, std::pow(chain.omega0(m), 1.0 / p));
  return acc + top * power_tail(alpha, std::max<std::int64_t>(k - 1, N));
}

std::vector<std::int64_t> block_levels(const ShiftModel& model, const GrowthChain& chain, int L, int R,
                                       std::vector<std::int64_t>* minimal_out) {
  if (R < 0) throw std::invalid_argument("block_levels: R must be nonnegative");
  if (L > chain.omega0_range()) throw std::invalid_argument("block_levels: L beyond chain tables");
  std::vector<std::int64_t> minimal(R);
  for (int n = 1; n <= R; ++n) {
    const double target = std::ldexp(1.0, -n);
    std::int64_t lo = 0, hi = 1;
    while (orbit_tail(model, chain, L, hi) > target) {
      lo = hi;
      if (hi > (std::int64_t{1} << 61)) throw NumericError("block_levels: level search overflow");
      hi *= 2;
    }
    while (hi - lo > 1) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      if (orbit_tail(model, chain, L, mid) <= target)
        hi = mid;
      else
        lo = mid;
    }
    minimal[n - 1] = std::max<std::int64_t>(hi, 1);
  }
  std::vector<std::int64_t> N = minimal;
  for (int n = 1; n < R; ++n) {
    std::int64_t need = N[n - 1] + 1;
    if (n >= 2) need = std::max(need, 2 * N[n - 1] - N[n - 2] + 1);
    N[n] = std::max(N[n], need);
  }
  if (minimal_out) *minimal_out = std::move(minimal);
  return N;
}

BlockSchedule build_block_schedule(const ShiftModel& model, const SymbolWeights& w, const GrowthChain& chain,
                                   int R) {
  if (R < 0) throw std::invalid_argument("build_block_schedule: R must be nonnegative");
  if (R == 0) return {};
  const int L = w.size();
  std::vector<std::int64_t> minimal;
  std::vector<std::int64_t> N = block_levels(model, chain, L, R, &minimal);
  std::vector<double> tails(R);
  for (int n = 1; n <= R; ++n) tails[n - 1] = orbit_tail(model, chain, L, N[n - 1]);

  std::vector<double> log_beta;
  for (int l = 1; l < R; ++l) {
    const double q = l + 1 <= L ? w.tail(l + 1) : 0.0;
    log_beta.push_back(static_cast<double>(N[l] - N[l - 1]) * std::log1p(-q));
  }
  return BlockSchedule(std::move(N), std::move(minimal), std::move(log_beta), std::move(tails));
}

SymbolWeights build_measure_weights(const ShiftModel& model, const GrowthChain& chain, int d_max, int L) {
  if (!(model.alpha() > 1.0)) return build_symbol_weights(chain, d_max, L);
  const std::vector<std::int64_t> N = block_levels(model, chain, L, L + 1);
  return build_symbol_weights(chain, d_max, L, N);
}

}  // namespace linmix
