#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "linmix/bernoulli_model.hpp"
#include "linmix/measure_params.hpp"
#include "linmix/observables.hpp"
#include "linmix/shift_model.hpp"
#include "linmix/spectral_basis.hpp"

namespace linmix {

enum class DecayRegime { Slow, Critical, Fast };

/** 1/2 < alpha < 1: n^{1-2alpha}; alpha = 1: log(n+1)/n; alpha > 1: n^{-alpha}. */
DecayRegime regime_of(double alpha);
double theoretical_slope(double alpha);
const char* regime_name(DecayRegime r);

struct DecayReport {
  double alpha = 0.0;
  bool monte_carlo = false;
  std::vector<std::int64_t> lags;
  std::vector<double> cov;
  std::vector<double> error;  // standard error, or truncation remainder for exact values
  std::vector<double> exact;  // exact values next to Monte Carlo ones; empty if not computed
};

struct DecayFit {
  double slope = 0.0;
  double slope_se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t used = 0;
  double theory = 0.0;
  DecayRegime regime = DecayRegime::Fast;
  // Critical regime only: spread of cov * n / log(n + 1) over the window.
  double band_min = 0.0;
  double band_max = 0.0;
};

DecayReport exact_decay(const FourierTable& F, const FourierTable& G, const std::vector<std::int64_t>& lags,
                        double alpha);

/** Sample i uses stream base + (i mod streams). Requires depth >= max lag + observable support. */
DecayReport empirical_covariance(const ShiftModel& model, const SymbolWeights& w, const ObservableExpr& f,
                                 const ObservableExpr& g, const std::vector<std::int64_t>& lags,
                                 std::size_t samples, std::int64_t depth, SamplerState state,
                                 unsigned streams = 16, unsigned workers = 0);

/** Fits over lags in [lag_lo, lag_hi] whose |cov| exceeds 10x its error. */
DecayFit decay_exponent_fit(const DecayReport& report, std::int64_t lag_lo, std::int64_t lag_hi);

struct KsResult {
  double distance = 0.0;
  double mean = 0.0;
  double sd = 0.0;
};
/** Kolmogorov-Smirnov distance to the normal law with the sample's own mean and deviation. */
KsResult ks_normal_fitted(std::vector<double> x);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};
Moments sample_moments(const std::vector<double>& x);

struct CltReport {
  std::int64_t N = 0;
  std::size_t R = 0;
  std::vector<double> samples;  // S_N(f) / sqrt(N) per replica
  Moments moments;
  double ks = 0.0;
  double ks_threshold = 0.0;
  double skew_bound = 0.0;
  double kurt_bound = 0.0;
  double sigma2_hat = 0.0;
  std::optional<double> sigma2_series;
  std::int64_t series_lags = 0;
  bool zero_variance = false;
  bool exploratory = false;

  bool ks_ok() const { return !zero_variance && ks < ks_threshold; }
  bool moments_ok() const;
  bool variance_ok(double rel_tol) const;
};

struct CltOptions {
  unsigned streams = 16;
  unsigned workers = 0;
  bool exploratory = false;
  bool force_generic = false;  // skip the prefix-sum path for linear observables
};

/** R replicas of S_N(f)/sqrt(N); f must be centered. */
CltReport clt_experiment(const ShiftModel& model, const SymbolWeights& w, const ObservableExpr& f, std::int64_t N,
                         std::size_t R, SamplerState state, const CltOptions& opt = {});

/** Var(f) + 2 sum_{p >= 1} Cov(f o T^p, f), stopping once |cov| < 1e-12 cov(0). */
double variance_series(const FourierTable& F, std::int64_t* lags_used = nullptr);

struct BlockTrend {
  std::vector<double> blocks;  // sums over n in [2^k, 2^{k+1})
  std::vector<double> ratios;  // blocks[k] / blocks[k+1]
  double min_ratio = 0.0;
  bool cauchy = false;         // all ratios >= 1.5
  double tail_estimate = 0.0;  // geometric extrapolation past the last block
};

struct MwDiagnostics {
  std::vector<std::int64_t> n;
  std::vector<double> adapted_sq;     // ||E(S_n F | F_0)||^2
  std::vector<double> nonadapted_sq;  // ||S_n F - E(S_n F | F_n)||^2
  std::vector<double> adapted_partial;
  std::vector<double> nonadapted_partial;
  BlockTrend adapted_blocks;
  BlockTrend nonadapted_blocks;
  std::vector<double> envelope_constant;  // adapted_sq / max(n^{3-2alpha}, log(n+1)) on the grid
  bool envelope_bounded = false;
};

MwDiagnostics mw_diagnostics(const FourierTable& F, double alpha, const std::vector<std::int64_t>& n_grid);

struct FactOneRow {
  std::int64_t n = 0;
  double lhs = 0.0;
  double tail_bound = 0.0;
  double envelope = 0.0;
  double constant = 0.0;
};

struct FactTwoRow {
  std::int64_t n = 0;
  double lhs = 0.0;        // truncated double sum
  double lhs_upper = 0.0;  // plus truncation bound
  double rhs = 0.0;
  bool holds = false;
};

struct FactReport {
  double alpha = 0.0;
  std::vector<FactOneRow> fact1;
  double c_min = 0.0;
  double c_max = 0.0;
  bool stable = false;  // c_max / c_min < 2
  bool sup_early = false;
  std::vector<FactTwoRow> fact2;
  bool fact2_holds = false;
};

/** sum_{j >= 0} (sum_{p < n} (1 + j + p)^{-alpha})^2 with an upper bound on the truncated tail. */
FactOneRow fact_one(double alpha, std::int64_t n);
/** r = 2 instance of the expanded-square bound. */
FactTwoRow fact_two(double alpha, std::int64_t n, std::int64_t J = 1024);

FactReport fact_bound_check(double alpha, const std::vector<std::int64_t>& n_list, std::int64_t fact2_max_n = 8);

}  // namespace linmix
