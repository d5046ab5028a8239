#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "linmix/block_schedule.hpp"
#include "linmix/measure_params.hpp"
#include "linmix/shift_model.hpp"

namespace linmix {

/** splitmix64 finalizer. */
std::uint64_t mix64(std::uint64_t x);

/**
 * Counter-based generator: draw i of (seed, stream) is a pure function of the triple,
 * so results never depend on how work is scheduled.
 */
struct SamplerState {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t counter = 0;

  std::uint64_t next();
  /** Uniform on (0, 1) with 53 random bits. */
  double uniform();
};

/** Symbols n_lo..n_hi, each in [1, L]. */
struct SymbolWindow {
  std::int64_t lo = 0;
  std::int64_t hi = -1;
  std::vector<int> symbols;

  std::size_t length() const { return symbols.size(); }
  int at(std::int64_t k) const;
  bool covers(std::int64_t k) const { return k >= lo && k <= hi; }
  /** sigma^p: (sigma^p n)_k = n_{k-p}. */
  SymbolWindow shifted(std::int64_t p) const;
  void write_csv(std::ostream& os) const;
};

/** Inverse-CDF table over the folded masses. */
class SymbolSampler {
 public:
  explicit SymbolSampler(const SymbolWeights& w);
  int draw(double u) const;
  int size() const { return static_cast<int>(cdf_.size()); }

 private:
  std::vector<double> cdf_;
};

SymbolWindow sample_window(const SymbolWeights& w, std::int64_t lo, std::int64_t hi, SamplerState& state);
SymbolWindow sample_window(const SymbolSampler& sampler, std::int64_t lo, std::int64_t hi, SamplerState& state);

/** Coordinate m = alpha_{n_{-m}} / W_m for 0 <= m <= min(-lo, M). */
LpVector phi(const ShiftModel& model, const SymbolWindow& win);

/** Weighted coordinates z_t = alpha_{n_{-t}}, t = 0..count-1, for windows whose lo <= -(count-1). */
void seed_values(const ShiftModel& model, const SymbolWindow& win, std::int64_t top, std::size_t count,
                 std::vector<double>& z);

struct IntertwiningCheck {
  double residual = 0.0;
  double tail_bound = 0.0;
};
/** || T phi(win) - phi(sigma win) || together with the truncation bound it must respect. */
IntertwiningCheck verify_intertwining(const ShiftModel& model, const SymbolWindow& win);

struct SupportProbeResult {
  double empirical = 0.0;
  std::size_t hits = 0;
  std::size_t trials = 0;
  int level = 0;
  double log_analytic_bound = 0.0;
  double analytic_bound = 0.0;
  std::vector<int> target_symbols;  // n_0, n_{-1}, ...
};

/** Fraction of R windows on [-M, 0] with ||phi - target|| < delta, plus the product-mass certificate. */
SupportProbeResult support_probe(const ShiftModel& model, const SymbolWeights& w, const BlockSchedule& schedule,
                                 const LpVector& target, double delta, std::size_t R, SamplerState state);

}  // namespace linmix
