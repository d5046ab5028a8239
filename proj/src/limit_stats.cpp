#include "linmix/limit_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "linmix/numerics.hpp"
#include "linmix/parallel.hpp"

namespace linmix {

DecayRegime regime_of(double alpha) {
  if (!(alpha > 0.5)) throw std::invalid_argument("regime_of: alpha must exceed 1/2");
  if (alpha < 1.0) return DecayRegime::Slow;
  if (alpha == 1.0) return DecayRegime::Critical;
  return DecayRegime::Fast;
}

double theoretical_slope(double alpha) {
  switch (regime_of(alpha)) {
    case DecayRegime::Slow:
      return 1.0 - 2.0 * alpha;
    case DecayRegime::Critical:
      return -1.0;
    case DecayRegime::Fast:
      return -alpha;
  }
  return 0.0;
}

const char* regime_name(DecayRegime r) {
  switch (r) {
    case DecayRegime::Slow:
      return "n^(1-2alpha)";
    case DecayRegime::Critical:
      return "log(n+1)/n";
    case DecayRegime::Fast:
      return "n^(-alpha)";
  }
  return "";
}

DecayReport exact_decay(const FourierTable& F, const FourierTable& G, const std::vector<std::int64_t>& lags,
                        double alpha) {
  DecayReport rep;
  rep.alpha = alpha;
  rep.lags = lags;
  for (std::int64_t p : lags) {
    const CovarianceValue c = covariance_exact(F, G, p);
    rep.cov.push_back(c.value);
    rep.error.push_back(c.remainder);
  }
  return rep;
}

namespace {

int read_depth(const ObservableExpr& o) { return o.support_depth() < 0 ? 1 : std::max(o.support_depth(), 1); }

}  // namespace

DecayReport empirical_covariance(const ShiftModel& model, const SymbolWeights& w, const ObservableExpr& f,
                                 const ObservableExpr& g, const std::vector<std::int64_t>& lags,
                                 std::size_t samples, std::int64_t depth, SamplerState state, unsigned streams,
                                 unsigned workers) {
  if (lags.empty()) throw std::invalid_argument("empirical_covariance: no lags");
  if (samples < 2) throw std::invalid_argument("empirical_covariance: need at least two samples");
  if (streams == 0) throw std::invalid_argument("empirical_covariance: streams must be positive");
  const std::int64_t max_lag = *std::max_element(lags.begin(), lags.end());
  if (*std::min_element(lags.begin(), lags.end()) < 0) throw std::invalid_argument("empirical_covariance: negative lag");
  const std::int64_t need = max_lag + std::max(read_depth(f), read_depth(g));
  if (depth < need)
    throw std::invalid_argument("empirical_covariance: insufficient depth " + std::to_string(depth) + " < " +
                                std::to_string(need));
  if (depth > model.depth() + 1) throw std::invalid_argument("empirical_covariance: depth exceeds model truncation");
  if (w.size() > model.seed_count()) throw std::invalid_argument("empirical_covariance: more symbols than seeds");

  const std::size_t K = lags.size();
  const SymbolSampler sampler(w);
  const double* W = model.weight_table()->data();
  std::vector<double> gv(samples), fv(samples * K);
  parallel_for(samples, workers, [&](std::size_t i) {
    SamplerState s{state.seed, state.stream + i % streams, state.counter + (i / streams) * static_cast<std::uint64_t>(depth)};
    const SymbolWindow win = sample_window(sampler, -(depth - 1), 0, s);
    std::vector<double> z;
    seed_values(model, win, 0, static_cast<std::size_t>(depth), z);
    gv[i] = g.evaluate(CoordinateView{z.data(), W, static_cast<std::size_t>(depth)}, model.p_exp());
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t p = static_cast<std::size_t>(lags[k]);
      fv[i * K + k] = f.evaluate(CoordinateView{z.data() + p, W, static_cast<std::size_t>(depth) - p}, model.p_exp());
    }
  });

  DecayReport rep;
  rep.alpha = model.alpha();
  rep.monte_carlo = true;
  rep.lags = lags;
  const double n = static_cast<double>(samples);
  double mg = 0.0;
  for (double v : gv) mg += v;
  mg /= n;
  for (std::size_t k = 0; k < K; ++k) {
    double mf = 0.0;
    for (std::size_t i = 0; i < samples; ++i) mf += fv[i * K + k];
    mf /= n;
    double mean = 0.0;
    for (std::size_t i = 0; i < samples; ++i) mean += (fv[i * K + k] - mf) * (gv[i] - mg);
    mean /= n;
    double ss = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      const double d = (fv[i * K + k] - mf) * (gv[i] - mg) - mean;
      ss += d * d;
    }
    rep.cov.push_back(mean);
    rep.error.push_back(std::sqrt(ss / (n - 1.0) / n));
  }
  return rep;
}

DecayFit decay_exponent_fit(const DecayReport& report, std::int64_t lag_lo, std::int64_t lag_hi) {
  std::vector<double> x, y;
  DecayFit fit;
  fit.regime = regime_of(report.alpha);
  fit.theory = theoretical_slope(report.alpha);
  fit.band_min = std::numeric_limits<double>::infinity();
  fit.band_max = 0.0;
  for (std::size_t i = 0; i < report.lags.size(); ++i) {
    const std::int64_t p = report.lags[i];
    if (p < lag_lo || p > lag_hi || p < 1) continue;
    const double c = std::abs(report.cov[i]);
    if (!(c > 10.0 * report.error[i]) || c == 0.0) continue;
    x.push_back(std::log(static_cast<double>(p)));
    y.push_back(std::log(c));
    const double band = c * static_cast<double>(p) / std::log(static_cast<double>(p) + 1.0);
    fit.band_min = std::min(fit.band_min, band);
    fit.band_max = std::max(fit.band_max, band);
  }
  if (x.empty()) throw NumericError("decay_exponent_fit: no signal, every covariance is statistically zero");
  if (x.size() < 5) throw std::invalid_argument("decay_exponent_fit: fewer than 5 usable lags");
  const LineFit lf = fit_line(x, y);
  fit.slope = lf.slope;
  fit.slope_se = lf.slope_se;
  fit.used = lf.points;
  const double t = student_t_quantile(0.975, static_cast<double>(lf.points - 2));
  fit.ci_lo = lf.slope - t * lf.slope_se;
  fit.ci_hi = lf.slope + t * lf.slope_se;
  return fit;
}

KsResult ks_normal_fitted(std::vector<double> x) {
  if (x.size() < 2) throw std::invalid_argument("ks_normal_fitted: need at least two points");
  const Moments m = sample_moments(x);
  KsResult out;
  out.mean = m.mean;
  out.sd = std::sqrt(m.variance);
  if (out.sd == 0.0) throw NumericError("ks_normal_fitted: zero variance");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = 0.5 * std::erfc(-(x[i] - out.mean) / (out.sd * std::sqrt(2.0)));
    out.distance = std::max({out.distance, (i + 1) / n - F, F - i / n});
  }
  return out;
}

Moments sample_moments(const std::vector<double>& x) {
  Moments m;
  const double n = static_cast<double>(x.size());
  if (x.empty()) return m;
  for (double v : x) m.mean += v;
  m.mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - m.mean, d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.variance = x.size() > 1 ? m2 * n / (n - 1.0) : 0.0;
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

bool CltReport::moments_ok() const {
  return !zero_variance && std::abs(moments.skewness) <= skew_bound && std::abs(moments.excess_kurtosis) <= kurt_bound;
}

bool CltReport::variance_ok(double rel_tol) const {
  if (!sigma2_series || zero_variance) return false;
  return std::abs(sigma2_hat - *sigma2_series) <= rel_tol * std::abs(*sigma2_series);
}

double variance_series(const FourierTable& F, std::int64_t* lags_used) {
  const double c0 = covariance_exact(F, F, 0).value;
  double total = c0;
  const std::int64_t span = F.is_factorized() ? F.j_hi() - F.j_lo() + 1 : std::numeric_limits<std::int64_t>::max();
  std::int64_t p = 1;
  for (; p < span; ++p) {
    const double c = covariance_exact(F, F, p).value;
    if (std::abs(c) < 1e-12 * std::abs(c0)) break;
    total += 2.0 * c;
  }
  if (lags_used) *lags_used = p - 1;
  return total;
}

CltReport clt_experiment(const ShiftModel& model, const SymbolWeights& w, const ObservableExpr& f, std::int64_t N,
                         std::size_t R, SamplerState state, const CltOptions& opt) {
  if (R < 100) throw std::invalid_argument("clt_experiment: R < 100 leaves the KS test unusable");
  if (N < 1) throw std::invalid_argument("clt_experiment: N must be positive");
  if (opt.streams == 0) throw std::invalid_argument("clt_experiment: streams must be positive");
  if (!(model.alpha() > 1.0) && !opt.exploratory)
    throw std::invalid_argument("clt_experiment: alpha <= 1 has no normal limit guarantee; flag the run as exploratory");
  if (!f.centered()) {
    if (f.kind() == ObservableKind::NormPower || std::abs(exact_mean(f, model, w)) > 1e-12)
      throw std::invalid_argument("clt_experiment: observable must be mean-subtracted");
  }
  if (w.size() > model.seed_count()) throw std::invalid_argument("clt_experiment: more symbols than seeds");
  const std::int64_t D = f.support_depth() < 0 ? model.depth() + 1 : std::max(f.support_depth(), 1);
  if (D > model.depth() + 1) throw std::invalid_argument("clt_experiment: observable deeper than model truncation");

  const std::int64_t len = D + N - 1;
  const SymbolSampler sampler(w);
  const double* W = model.weight_table()->data();
  const bool fast = f.kind() == ObservableKind::Linear && !opt.force_generic;
  std::vector<double> g;
  if (fast) {
    g.assign(static_cast<std::size_t>(D), 0.0);
    for (std::int64_t m = 0; m < D && m < static_cast<std::int64_t>(f.coefficients().size()); ++m)
      g[m] = f.coefficients()[m] / W[m];
  }

  CltReport rep;
  rep.N = N;
  rep.R = R;
  rep.exploratory = opt.exploratory;
  rep.samples.resize(R);
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  parallel_for(R, opt.workers, [&](std::size_t r) {
    SamplerState s{state.seed, state.stream + r % opt.streams,
                   state.counter + (r / opt.streams) * static_cast<std::uint64_t>(len)};
    const SymbolWindow win = sample_window(sampler, -(len - 1), 0, s);
    std::vector<double> z;
    seed_values(model, win, 0, static_cast<std::size_t>(len), z);
    double S = 0.0;
    if (fast) {
      std::vector<double> P(z.size() + 1, 0.0);
      for (std::size_t t = 0; t < z.size(); ++t) P[t + 1] = P[t] + z[t];
      for (std::int64_t m = 0; m < D; ++m) S += g[m] * (P[m + N] - P[m]);
      S -= static_cast<double>(N) * f.offset();
    } else {
      for (std::int64_t p = 0; p < N; ++p)
        S += f.evaluate(CoordinateView{z.data() + p, W, static_cast<std::size_t>(D)}, model.p_exp());
    }
    rep.samples[r] = S * scale;
  });

  rep.moments = sample_moments(rep.samples);
  rep.sigma2_hat = rep.moments.variance;
  rep.zero_variance = !(rep.moments.variance > 0.0);
  rep.ks_threshold = 1.5 * 1.63 / std::sqrt(static_cast<double>(R));
  rep.skew_bound = 4.0 * std::sqrt(6.0 / static_cast<double>(R));
  rep.kurt_bound = 4.0 * std::sqrt(24.0 / static_cast<double>(R));
  rep.ks = rep.zero_variance ? std::numeric_limits<double>::quiet_NaN() : ks_normal_fitted(rep.samples).distance;

  if (f.kind() == ObservableKind::Linear) {
    const TriangularBasis basis(w);
    const FourierTable table = fourier_linear(model, basis, f.coefficients(), -(D - 1), 0, basis.top());
    rep.sigma2_series = variance_series(table, &rep.series_lags);
  }
  return rep;
}

namespace {

BlockTrend block_trend(const std::vector<double>& x) {
  // x[n - 1] holds the term for n.
  BlockTrend bt;
  for (std::size_t lo = 1; 2 * lo - 1 <= x.size(); lo *= 2) {
    double acc = 0.0;
    for (std::size_t n = 2 * lo - 1; n >= lo; --n) acc += x[n - 1];
    bt.blocks.push_back(acc);
  }
  bt.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < bt.blocks.size(); ++k) {
    const double r = bt.blocks[k + 1] > 0.0 ? bt.blocks[k] / bt.blocks[k + 1] : std::numeric_limits<double>::infinity();
    bt.ratios.push_back(r);
    bt.min_ratio = std::min(bt.min_ratio, r);
  }
  bt.cauchy = !bt.ratios.empty() && bt.min_ratio >= 1.5;
  if (!bt.ratios.empty()) {
    const double last = bt.ratios.back();
    bt.tail_estimate = last > 1.0 ? bt.blocks.back() / (last - 1.0) : std::numeric_limits<double>::infinity();
  }
  return bt;
}

}  // namespace

MwDiagnostics mw_diagnostics(const FourierTable& F, double alpha, const std::vector<std::int64_t>& n_grid) {
  if (!F.is_factorized()) throw std::invalid_argument("mw_diagnostics: needs a closed-form linear table");
  if (n_grid.empty()) throw std::invalid_argument("mw_diagnostics: empty n grid");
  const std::int64_t n_max = *std::max_element(n_grid.begin(), n_grid.end());
  if (*std::min_element(n_grid.begin(), n_grid.end()) < 1) throw std::invalid_argument("mw_diagnostics: n must be >= 1");

  double amp = 0.0;
  for (double a : F.amplitudes()) amp += a * a;
  const auto& g = F.profile();
  const std::int64_t lo = F.j_lo(), hi = F.j_hi();
  std::vector<double> pre(g.size() + 1, 0.0);
  for (std::size_t t = 0; t < g.size(); ++t) pre[t + 1] = pre[t] + g[t];
  auto G = [&](std::int64_t j, std::int64_t n) {
    const std::int64_t a = std::max(j, lo), b = std::min(j + n - 1, hi);
    return a > b ? 0.0 : pre[b - lo + 1] - pre[a - lo];
  };

  std::vector<double> ad(n_max), na(n_max);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    double s = 0.0;
    for (std::int64_t j = hi; j >= std::max<std::int64_t>(0, lo - n + 1); --j) {
      const double v = G(j, n);
      s += v * v;
    }
    ad[n - 1] = amp * s;
    s = 0.0;
    for (std::int64_t j = lo - n + 1; j <= -n - 1; ++j) {
      const double v = G(j, n);
      s += v * v;
    }
    na[n - 1] = amp * s;
  }

  std::vector<double> xa(n_max), xn(n_max), ca(n_max), cn(n_max);
  double acc_a = 0.0, acc_n = 0.0;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const double w = std::pow(static_cast<double>(n), -1.5);
    xa[n - 1] = std::sqrt(ad[n - 1]) * w;
    xn[n - 1] = std::sqrt(na[n - 1]) * w;
    acc_a += xa[n - 1];
    acc_n += xn[n - 1];
    ca[n - 1] = acc_a;
    cn[n - 1] = acc_n;
  }

  MwDiagnostics out;
  for (std::int64_t n : n_grid) {
    out.n.push_back(n);
    out.adapted_sq.push_back(ad[n - 1]);
    out.nonadapted_sq.push_back(na[n - 1]);
    out.adapted_partial.push_back(ca[n - 1]);
    out.nonadapted_partial.push_back(cn[n - 1]);
    const double env = std::max(std::pow(static_cast<double>(n), 3.0 - 2.0 * alpha), std::log(n + 1.0));
    out.envelope_constant.push_back(ad[n - 1] / env);
  }
  out.adapted_blocks = block_trend(xa);
  out.nonadapted_blocks = block_trend(xn);
  const std::size_t half = out.envelope_constant.size() / 2;
  const double early = *std::max_element(out.envelope_constant.begin(), out.envelope_constant.begin() + std::max<std::size_t>(half, 1));
  const double late = *std::max_element(out.envelope_constant.begin() + half, out.envelope_constant.end());
  out.envelope_bounded = late <= early * (1.0 + 1e-9);
  return out;
}

FactOneRow fact_one(double alpha, std::int64_t n) {
  if (!(alpha > 1.0)) throw std::invalid_argument("fact_one: alpha must exceed 1");
  if (n < 1) throw std::invalid_argument("fact_one: n must be positive");
  const std::int64_t J = std::max<std::int64_t>(std::int64_t{1} << 20, 256 * n);
  const std::int64_t top = J + n;
  std::vector<double> suffix(static_cast<std::size_t>(top + 2), 0.0);
  for (std::int64_t k = top; k >= 1; --k) suffix[k] = suffix[k + 1] + std::pow(static_cast<double>(k), -alpha);
  FactOneRow row;
  row.n = n;
  for (std::int64_t j = J - 1; j >= 0; --j) {
    const double inner = suffix[1 + j] - suffix[1 + j + n];
    row.lhs += inner * inner;
  }
  row.tail_bound = static_cast<double>(n) * static_cast<double>(n) * power_tail(2.0 * alpha, J);
  row.envelope = std::max(std::pow(static_cast<double>(n), 3.0 - 2.0 * alpha), std::log(n + 1.0));
  row.constant = (row.lhs + row.tail_bound) / row.envelope;
  return row;
}

FactTwoRow fact_two(double alpha, std::int64_t n, std::int64_t J) {
  if (!(alpha > 1.0)) throw std::invalid_argument("fact_two: alpha must exceed 1");
  if (n < 1 || J <= 2 * n) throw std::invalid_argument("fact_two: need n >= 1 and J > 2n");
  auto a = [alpha](std::int64_t x) { return std::pow(1.0 + std::abs(static_cast<double>(x)), -alpha); };
  // a(x) for x in [-J - n, J + n]
  const std::int64_t off = J + n;
  std::vector<double> tab(static_cast<std::size_t>(2 * off + 1));
  for (std::int64_t x = -off; x <= off; ++x) tab[x + off] = a(x);

  FactTwoRow row;
  row.n = n;
  double X = 0.0;
  for (std::int64_t j1 = -J; j1 < -n; ++j1) {
    double s1 = 0.0;
    for (std::int64_t p = 0; p < n; ++p) s1 += tab[j1 + p + off];
    X += s1 * s1;
    for (std::int64_t j2 = -J; j2 <= J; ++j2) {
      double s = 0.0;
      for (std::int64_t p = 0; p < n; ++p) s += tab[j1 + p + off] * tab[j2 + p + off];
      row.lhs += s * s;
    }
  }
  const double nn = static_cast<double>(n);
  const double sq_sum = 1.0 + 2.0 * power_tail(2.0 * alpha, 1);
  const double j1_tail = nn * nn * power_tail(2.0 * alpha, J - n + 1);
  const double X_full = X + j1_tail;
  row.lhs_upper = row.lhs + X_full * 2.0 * power_tail(2.0 * alpha, J - n + 1) + j1_tail * nn * sq_sum;
  const double lin_sum = 1.0 + 2.0 * power_tail(alpha, 1);
  row.rhs = X * lin_sum;
  row.holds = row.lhs_upper <= row.rhs;
  return row;
}

FactReport fact_bound_check(double alpha, const std::vector<std::int64_t>& n_list, std::int64_t fact2_max_n) {
  if (!(alpha > 1.0)) throw std::invalid_argument("fact_bound_check: alpha must exceed 1");
  if (n_list.empty()) throw std::invalid_argument("fact_bound_check: empty n list");
  FactReport rep;
  rep.alpha = alpha;
  rep.c_min = std::numeric_limits<double>::infinity();
  std::size_t argmax = 0;
  for (std::int64_t n : n_list) {
    rep.fact1.push_back(fact_one(alpha, n));
    const double c = rep.fact1.back().constant;
    rep.c_min = std::min(rep.c_min, c);
    if (c > rep.c_max) {
      rep.c_max = c;
      argmax = rep.fact1.size() - 1;
    }
  }
  rep.stable = rep.c_max / rep.c_min < 2.0;
  rep.sup_early = argmax < (rep.fact1.size() + 1) / 2;
  rep.fact2_holds = true;
  for (std::int64_t n = 1; n <= fact2_max_n; ++n) {
    rep.fact2.push_back(fact_two(alpha, n));
    rep.fact2_holds = rep.fact2_holds && rep.fact2.back().holds;
  }
  return rep;
}

}  // namespace linmix
