// Acceptance checks, one line per criterion. Tolerances are fixed here and nowhere else.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "linmix/bernoulli_model.hpp"
#include "linmix/block_schedule.hpp"
#include "linmix/cli/commands.hpp"
#include "linmix/cli/manifest.hpp"
#include "linmix/halfplane.hpp"
#include "linmix/limit_stats.hpp"
#include "linmix/measure_params.hpp"
#include "linmix/numerics.hpp"
#include "linmix/observables.hpp"
#include "linmix/shift_model.hpp"
#include "linmix/spectral_basis.hpp"

using namespace linmix;

namespace {

constexpr int kL = 40;
constexpr int kDmax = 3;
constexpr int kKmax = 64;

constexpr double kGramTol = 1e-10;
constexpr double kL1Factor = 4.0;
constexpr double kTailRatio = 0.5;
constexpr double kMomentLimit = 4.0;
constexpr int kMomentK = 20;
constexpr double kSlopeTol = 0.1;
constexpr double kBandFactor = 2.0;
constexpr double kZ = 3.0;
constexpr std::size_t kMcSamples = 100000;
constexpr double kSigmaRel = 0.1;
constexpr double kBlockRatio = 1.5;
constexpr double kFactStable = 2.0;
constexpr double kParsevalTol = 1e-10;
constexpr double kEnvelopeStable = 1.05;
constexpr double kQuadTol = 1e-8;
constexpr double kExpLo = 0.9, kExpHi = 1.1;
constexpr double kEnvelopeSpread = 1.5;
constexpr double kCountFactor = 4.0;
constexpr double kDelta = 0.25;

struct Result {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void note(Result& r, bool ok, const std::string& what) {
  r.pass = r.pass && ok;
  if (!r.detail.empty()) r.detail += "; ";
  r.detail += what + (ok ? "" : " [fail]");
}

struct Measure {
  GrowthChain chain;
  ShiftModel model;
  SymbolWeights w;
};

Measure measure(double alpha, int depth) {
  GrowthChain chain = build_growth_chain(log_growth(), kKmax);
  ShiftModel model = canonical_shift(alpha, 2.0, depth, chain);
  SymbolWeights w = build_measure_weights(model, chain, kDmax, kL);
  return {std::move(chain), std::move(model), std::move(w)};
}

double seed_variance(const Measure& m) {
  const double m1 = seed_moment(m.model, m.w, 1), m2 = seed_moment(m.model, m.w, 2);
  return m2 - m1 * m1;
}

Result basis() {
  const Measure m = measure(2.0, 64);
  const TriangularBasis b(m.w);
  Result r;
  note(r, b.gram_error() < kGramTol, "max|Gram-I| = " + fmt("%.2e", b.gram_error()));
  double worst = 0.0;
  for (int l = 1; l <= b.top(); ++l) worst = std::max(worst, b.l1_norm(l) / std::sqrt(m.w.mass(l)));
  note(r, worst <= kL1Factor, "max l1/sqrt(p_l) = " + fmt("%.4f", worst));
  return r;
}

Result conjugacy() {
  const int depth = 128;
  const Measure m = measure(2.0, depth);
  SamplerState st{2024, 0, 0};
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const SymbolWindow win = sample_window(m.w, -depth, 1, st);
    worst = std::max(worst, verify_intertwining(m.model, win).residual);
  }
  Result r;
  note(r, worst == 0.0, "max residual over 1000 windows = " + fmt("%.3g", worst));
  return r;
}

Result weight_conditions() {
  const Measure m = measure(2.0, 256);
  const BlockSchedule s = build_block_schedule(m.model, m.w, m.chain, kL + 1);
  const ConditionReport c = check_weight_conditions(m.w, m.chain, kMomentK, &s, kDmax, kMomentLimit);
  Result r;
  note(r, c.tail_ratio.constant <= kTailRatio, "max q_{l+1}/p_l = " + fmt("%.4f", c.tail_ratio.constant));
  note(r, c.sqrt_moment && c.sqrt_moment->constant <= kMomentLimit,
       "sqrt-moment constant = " + fmt("%.4f", c.sqrt_moment ? c.sqrt_moment->constant : NAN));
  note(r, c.moment && c.moment->constant <= kMomentLimit,
       "moment constant = " + fmt("%.4f", c.moment ? c.moment->constant : NAN));
  for (const auto& pc : c.polynomial)
    note(r, pc.holds, "d=" + std::to_string(pc.d) + " margin " + fmt("%.3f", pc.margin) + " sum " +
                          fmt("%.4g", pc.partial_sums.empty() ? NAN : pc.partial_sums.back()));
  return r;
}

Result covariance_regimes() {
  Result r;
  const int D = 1 << 20;
  for (double alpha : {0.75, 1.0, 2.0}) {
    const Measure m = measure(alpha, D);
    const TriangularBasis b(m.w);
    const FourierTable F = fourier_linear(m.model, b, std::vector<double>(D, 1.0), -(D - 1), 0, b.top());
    const DecayFit fit = decay_exponent_fit(exact_decay(F, F, dyadic_grid(16, 4096), alpha), 16, 4096);
    if (regime_of(alpha) == DecayRegime::Critical)
      note(r, fit.band_max / fit.band_min < kBandFactor,
           "alpha=1 band max/min = " + fmt("%.4f", fit.band_max / fit.band_min));
    else
      note(r, std::abs(fit.slope - fit.theory) <= kSlopeTol,
           "alpha=" + fmt("%g", alpha) + " slope " + fmt("%.4f", fit.slope) + " vs " + fmt("%g", fit.theory));
  }
  return r;
}

Result oracle_vs_mc() {
  Result r;
  const int support = 256;
  for (double alpha : {0.75, 1.0, 2.0}) {
    const Measure m = measure(alpha, 2 * support);
    const TriangularBasis b(m.w);
    const ObservableExpr f = ObservableExpr::linear_ones(support);
    const FourierTable F = fourier_linear(m.model, b, f.coefficients(), -(support - 1), 0, b.top());
    const std::vector<std::int64_t> lags = dyadic_grid(1, 256);
    const DecayReport rep =
        empirical_covariance(m.model, m.w, f, f, lags, kMcSamples, 2 * support, SamplerState{555, 0, 0});
    double worst = 0.0;
    for (std::size_t i = 0; i < lags.size(); ++i)
      worst = std::max(worst, std::abs(rep.cov[i] - covariance_exact(F, F, lags[i]).value) / rep.error[i]);
    note(r, worst <= kZ, "alpha=" + fmt("%g", alpha) + " max |z| = " + fmt("%.3f", worst));
  }
  return r;
}

void clt_checks(Result& r, const std::string& name, const CltReport& c) {
  note(r, c.ks_ok(), name + " KS " + fmt("%.4f", c.ks) + " < " + fmt("%.4f", c.ks_threshold));
  note(r, c.moments_ok(), name + " skew " + fmt("%.3f", c.moments.skewness) + " kurt " +
                              fmt("%.3f", c.moments.excess_kurtosis));
  note(r, c.variance_ok(kSigmaRel), name + " sigma2 " + fmt("%.5g", c.sigma2_hat) + " vs " +
                                        fmt("%.5g", c.sigma2_series.value_or(NAN)));
}

Result clt() {
  const Measure m = measure(2.0, 256);
  Result r;
  const ObservableExpr ones = centered(ObservableExpr::linear_ones(256), m.model, m.w);
  clt_checks(r, "c=1", clt_experiment(m.model, m.w, ones, 4096, 2000, SamplerState{7, 0, 0}));
  const ObservableExpr d0 = centered(ObservableExpr::linear({1.0}), m.model, m.w);
  clt_checks(r, "delta_0", clt_experiment(m.model, m.w, d0, 4096, 2000, SamplerState{8, 0, 0}));
  return r;
}

Result maxwell_woodroofe() {
  const int D = 16384;
  const Measure m = measure(2.0, D);
  const TriangularBasis b(m.w);
  const FourierTable F = fourier_linear(m.model, b, std::vector<double>(D, 1.0), -(D - 1), 0, b.top());
  const MwDiagnostics d = mw_diagnostics(F, 2.0, dyadic_grid(1, 4096));
  Result r;
  note(r, d.adapted_blocks.min_ratio >= kBlockRatio, "adapted block ratio min " + fmt("%.4f", d.adapted_blocks.min_ratio));
  note(r, d.nonadapted_blocks.min_ratio >= kBlockRatio,
       "nonadapted block ratio min " + fmt("%.4f", d.nonadapted_blocks.min_ratio));
  note(r, d.envelope_bounded, "envelope constant bounded");
  return r;
}

Result facts() {
  Result r;
  for (double alpha : {1.5, 2.0}) {
    const FactReport f = fact_bound_check(alpha, dyadic_grid(4, 4096), 8);
    note(r, f.c_max / f.c_min < kFactStable, "alpha=" + fmt("%g", alpha) + " square-sum C max/min " + fmt("%.4f", f.c_max / f.c_min));
    note(r, f.fact2_holds, "alpha=" + fmt("%g", alpha) + " expanded-square bound (r=2, n<=8)");
  }
  return r;
}

Result fourier_coefficients() {
  const Measure m = measure(2.0, 1024);
  const TriangularBasis b(m.w);
  Result r;
  const McEstimate e = fourier_mc(ObservableExpr::linear_ones(8), m.model, b, TensorIndex({1, 2}, {-2, 0}), 100000,
                                  SamplerState{99, 0, 0}, -16);
  note(r, std::abs(e.estimate) <= kZ * e.std_error, "degree-1 rank-2 coefficient z = " + fmt("%.3f", e.estimate / e.std_error));
  double lo = INFINITY, hi = 0.0;
  for (int D : {64, 256, 1024}) {
    const FourierTable t = fourier_linear(m.model, b, std::vector<double>(D, 1.0), -(D - 1), 0, b.top());
    const double c = envelope_constant(t, m.w, 2.0).constant;
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  note(r, hi / lo <= kEnvelopeStable, "envelope constant " + fmt("%.5f", hi) + " spread " + fmt("%.3g", hi / lo - 1.0));
  double parseval = 0.0;
  for (double a : linear_amplitudes(m.model, b, b.top())) parseval += a * a;
  note(r, std::abs(parseval - seed_variance(m)) <= kParsevalTol,
       "Parseval error " + fmt("%.2e", std::abs(parseval - seed_variance(m))));
  return r;
}

Result halfplane() {
  Result r;
  const double one = h2_norm(constant_function(1.0)).norm;
  note(r, std::abs(one - 1.0) <= kQuadTol, "||1|| - 1 = " + fmt("%.2e", one - 1.0));
  const double sq = h2_norm(decayed_profile(1)).squared;
  note(r, std::abs(sq - 0.375) <= kQuadTol, "||Q_1||^2 - 3/8 = " + fmt("%.2e", sq - 0.375));
  const DecayFitResult fit = translation_decay_fit(4, dyadic_grid(8, 512));
  note(r, fit.exponent >= kExpLo && fit.exponent <= kExpHi && fit.exponent > fit.guaranteed,
       "p=4 exponent " + fmt("%.5f", fit.exponent) + " (certified " + fmt("%.4f", fit.guaranteed) + ")");
  double lo = INFINITY, hi = 0.0;
  for (int K : {16, 32, 64}) {
    const double ratio = envelope_sum_check(4, std::vector<double>(K, 1.0), K).ratio;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  note(r, hi / lo <= kEnvelopeSpread, "envelope ratio spread " + fmt("%.4f", hi / lo));
  double worst = 0.0;
  int worst_k = 0;
  for (int k = 1; k <= 64; ++k) {
    const double v = comparable_count(k, 256) / (kCountFactor * std::pow(k, 0.25));
    if (v > worst) worst = v, worst_k = k;
  }
  note(r, worst <= 1.0, "max #{j ~ k}/(4k^{1/4}) = " + fmt("%.4f", worst) + " at k=" + std::to_string(worst_k));
  return r;
}

Result support() {
  const Measure m = measure(2.0, 256);
  const BlockSchedule s = build_block_schedule(m.model, m.w, m.chain, 24);
  Result r;
  // weighted values W_m y_m at m = 0, 1, 2
  const std::vector<std::vector<double>> targets = {{1.0}, {1.0, -1.0}, {0.5, 0.0, -0.5}};
  for (std::size_t i = 0; i < targets.size(); ++i) {
    std::vector<double> y = targets[i];
    for (std::size_t k = 0; k < y.size(); ++k) y[k] /= m.model.weight(static_cast<int>(k));
    const LpVector t = LpVector::from_coords(std::move(y), 2.0);
    const SupportProbeResult p = support_probe(m.model, m.w, s, t, kDelta, 20000, SamplerState{31, i, 0});
    note(r, p.empirical > 0.0 && p.analytic_bound > 0.0,
         "target " + std::to_string(i + 1) + " hit rate " + fmt("%.4g", p.empirical) + " bound " +
             fmt("%.3g", p.analytic_bound));
  }
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

Result determinism() {
  namespace fs = std::filesystem;
  const std::vector<std::string> manifests = {
      "command = weights-check\n",
      "command = basis-check\n",
      "command = cov-decay\nalpha = 2\nmode = mc\nR = 20000\n",
      "command = clt\nalpha = 2\nN = 4096\nR = 2000\nseed = 7\n",
      "command = mw\n",
      "command = facts\n",
      "command = halfplane-decay\n",
      "command = envelope-check\n",
      "command = support-probe\n",
  };
  const fs::path root = fs::temp_directory_path() / "linmix-acceptance";
  Result r;
  int identical = 0;
  for (std::size_t i = 0; i < manifests.size(); ++i) {
    std::ostringstream log;
    const fs::path a = root / (std::to_string(i) + "a"), b = root / (std::to_string(i) + "b");
    fs::remove_all(a);
    fs::remove_all(b);
    cli::run(cli::Manifest::parse_text(manifests[i]), {a, 1}, log);
    std::ifstream replay(a / "manifest.replay");
    cli::run(cli::Manifest::parse(replay), {b, 4}, log);
    bool same = true;
    for (const char* f : {"report.json", "data.csv", "manifest.replay"})
      same = same && fs::exists(a / f) && slurp(a / f) == slurp(b / f);
    identical += same;
    if (!same) note(r, false, "artifacts differ for manifest " + std::to_string(i + 1));
  }
  note(r, identical == static_cast<int>(manifests.size()),
       std::to_string(identical) + "/" + std::to_string(manifests.size()) + " commands byte-identical on replay with 1 vs 4 workers");
  return r;
}

struct Criterion {
  const char* name;
  std::function<Result()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-12)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {"basis correctness", basis},
      {"conjugacy", conjugacy},
      {"weight conditions", weight_conditions},
      {"covariance regimes", covariance_regimes},
      {"oracle vs Monte Carlo", oracle_vs_mc},
      {"CLT", clt},
      {"Maxwell-Woodroofe diagnostics", maxwell_woodroofe},
      {"square-sum bounds", facts},
      {"Fourier coefficients", fourier_coefficients},
      {"half-plane norms", halfplane},
      {"support probe", support},
      {"determinism", determinism},
  };
  if (only < 0 || only > static_cast<int>(all.size())) {
    std::cerr << "criterion must be in 1.." << all.size() << '\n';
    return 2;
  }
  bool ok = true;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    Result res;
    try {
      res = all[i].run();
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("error: ") + e.what();
    }
    ok = ok && res.pass;
    std::cout << "criterion " << i + 1 << " " << all[i].name << ": " << (res.pass ? "PASS" : "FAIL") << " ("
              << res.detail << ")" << std::endl;
  }
  return ok ? 0 : 1;
}
