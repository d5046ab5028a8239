#include "linmix/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "linmix/bernoulli_model.hpp"
#include "linmix/block_schedule.hpp"
#include "linmix/halfplane.hpp"
#include "linmix/limit_stats.hpp"
#include "linmix/measure_params.hpp"
#include "linmix/numerics.hpp"
#include "linmix/observables.hpp"
#include "linmix/serialization.hpp"
#include "linmix/shift_model.hpp"
#include "linmix/spectral_basis.hpp"

namespace linmix::cli {

namespace {

using nlohmann::ordered_json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Check {
  std::string name;
  double value;
  double threshold;
  std::string relation;  // "<", "<=", ">=", ">"
  bool pass;
};

Check check(std::string name, double value, const std::string& rel, double threshold) {
  bool ok = false;
  if (rel == "<") ok = value < threshold;
  else if (rel == "<=") ok = value <= threshold;
  else if (rel == ">=") ok = value >= threshold;
  else ok = value > threshold;
  return {std::move(name), value, threshold, rel, ok};
}

struct Outcome {
  ordered_json result = ordered_json::object();
  std::vector<Check> checks;
  std::string csv;
};

struct Setup {
  GrowthChain chain;
  SymbolWeights w;
  ShiftModel model;
};

GrowthSpec growth_of(const Manifest& m) {
  const std::string s = m.str("omega");
  if (s == "log") return log_growth();
  const std::string body = s.substr(std::string("affine:").size());
  const auto comma = body.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument("comma");
    return affine_growth(std::stod(body.substr(0, comma)), std::stod(body.substr(comma + 1)));
  } catch (const std::invalid_argument&) {
    throw ManifestError("field 'omega': expected 'affine:a,b' (got '" + s + "')", 0, "omega");
  }
}

Setup setup(const Manifest& m) {
  GrowthChain chain = build_growth_chain(growth_of(m), static_cast<int>(m.integer("K_max")));
  ShiftModel model = canonical_shift(m.real("alpha"), m.real("p_exp"), static_cast<int>(m.integer("depth")), chain);
  SymbolWeights w =
      build_measure_weights(model, chain, static_cast<int>(m.integer("d_max")), static_cast<int>(m.integer("L")));
  return {std::move(chain), std::move(w), std::move(model)};
}

ObservableSpec observable_of(const Manifest& m) {
  try {
    return parse_observable(m.str("obs"));
  } catch (const std::invalid_argument& e) {
    throw ManifestError(std::string("field 'obs': ") + e.what(), 0, "obs");
  }
}

SamplerState state_of(const Manifest& m) { return SamplerState{m.u64("seed"), 0, 0}; }

ordered_json condition_json(const ConditionFit& f) {
  return {{"constant", f.constant}, {"worst_l", f.worst_l}, {"worst_k", f.worst_k},
          {"holds", f.holds},       {"growing_in_k", f.growing_in_k}};
}

Outcome weights_check(const Manifest& m, unsigned) {
  const Setup s = setup(m);
  const BlockSchedule sched = build_block_schedule(s.model, s.w, s.chain, static_cast<int>(m.integer("levels")));
  const double limit = m.real("tolerance");
  const ConditionReport rep =
      check_weight_conditions(s.w, s.chain, static_cast<int>(m.integer("k_max")), &sched,
                              static_cast<int>(m.integer("d_max")), limit);
  Outcome o;
  o.result["measure"] = measure_document(s.chain, s.w, sched);
  o.result["tail_ratio"] = condition_json(rep.tail_ratio);
  o.result["tail_ratio_decreasing"] = rep.tail_ratio_decreasing;
  if (rep.sqrt_moment) o.result["sqrt_moment"] = condition_json(*rep.sqrt_moment);
  if (rep.moment) o.result["moment"] = condition_json(*rep.moment);
  ordered_json poly = ordered_json::array();
  for (const auto& pc : rep.polynomial)
    poly.push_back({{"d", pc.d}, {"margin", pc.margin}, {"partial_sums", pc.partial_sums},
                    {"sums_cauchy", pc.sums_cauchy}, {"holds", pc.holds}});
  o.result["polynomial"] = poly;
  o.result["beta_product_from_1"] = std::exp(sched.log_beta_product(1));
  o.result["beta_product_from_2"] = sched.levels() >= 2 ? std::exp(sched.log_beta_product(2)) : 1.0;
  o.result["gaps_convex"] = sched.gaps_convex();

  o.checks.push_back(check("tail_ratio_max", rep.tail_ratio.constant, "<=", 0.5));
  if (rep.sqrt_moment) o.checks.push_back(check("sqrt_moment_constant", rep.sqrt_moment->constant, "<=", limit));
  if (rep.moment) o.checks.push_back(check("moment_constant", rep.moment->constant, "<=", limit));
  for (const auto& pc : rep.polynomial) {
    o.checks.push_back(check("polynomial_margin_d" + std::to_string(pc.d), pc.margin, "<=", 0.0));
    o.checks.push_back(check("polynomial_sums_cauchy_d" + std::to_string(pc.d), pc.sums_cauchy ? 1 : 0, ">=", 1));
  }
  o.checks.push_back(check("gaps_convex", sched.gaps_convex() ? 1 : 0, ">=", 1));

  std::ostringstream csv;
  csv << "l,log_p,mass,tail,tail_ratio\n";
  for (int l = 1; l <= s.w.size(); ++l)
    csv << l << ',' << num(s.w.log_p(l)) << ',' << num(s.w.mass(l)) << ',' << num(s.w.tail(l)) << ','
        << num(s.w.tail(l + 1) / s.w.p(l)) << '\n';
  o.csv = csv.str();
  return o;
}

Outcome basis_check(const Manifest& m, unsigned) {
  const Setup s = setup(m);
  const TriangularBasis basis(s.w);
  const double gram = basis.gram_error();
  std::ostringstream csv;
  csv << "l,p_l,l1_norm,l1_over_sqrt_p\n";
  double worst = 0.0;
  for (int l = 1; l <= basis.top(); ++l) {
    const double l1 = basis.l1_norm(l), r = l1 / std::sqrt(s.w.mass(l));
    worst = std::max(worst, r);
    csv << l << ',' << num(s.w.mass(l)) << ',' << num(l1) << ',' << num(r) << '\n';
  }
  const std::vector<double> A = linear_amplitudes(s.model, basis, basis.top());
  double parseval = 0.0;
  for (double a : A) parseval += a * a;
  const double m1 = seed_moment(s.model, s.w, 1), m2 = seed_moment(s.model, s.w, 2);
  const double var = m2 - m1 * m1;

  Outcome o;
  o.result["top"] = basis.top();
  o.result["gram_error"] = gram;
  o.result["l1_ratio_max"] = worst;
  o.result["parseval_sum"] = parseval;
  o.result["seed_variance"] = var;
  if (!basis.warning().empty()) o.result["warning"] = basis.warning();
  o.checks.push_back(check("gram_error", gram, "<", m.real("tolerance")));
  o.checks.push_back(check("l1_ratio_max", worst, "<=", 4.0));
  o.checks.push_back(check("parseval_error", std::abs(parseval - var), "<=", 1e-10));
  o.csv = csv.str();
  return o;
}

std::vector<double> linear_coefficients(const ObservableSpec& spec, const std::string& who) {
  if (spec.expr.kind() != ObservableKind::Linear)
    throw ManifestError("field 'obs': " + who + " needs a linear observable", 0, "obs");
  return spec.expr.coefficients();
}

Outcome cov_decay(const Manifest& m, unsigned workers) {
  const Setup s = setup(m);
  const TriangularBasis basis(s.w);
  const ObservableSpec spec = observable_of(m);
  const std::vector<std::int64_t> lags = m.int_list("lags");
  const double tol = m.real("tolerance");
  const bool exact = m.str("mode") == "exact";
  const std::vector<double> c = linear_coefficients(spec, "cov-decay");
  const auto D = static_cast<std::int64_t>(c.size());
  if (D > s.model.depth() + 1) throw ManifestError("field 'obs': observable deeper than 'depth'", 0, "obs");
  const FourierTable F = fourier_linear(s.model, basis, c, -(D - 1), 0, basis.top());

  DecayReport rep;
  if (exact) {
    rep = exact_decay(F, F, lags, s.model.alpha());
  } else {
    const ObservableExpr f = spec.expr;
    rep = empirical_covariance(s.model, s.w, f, f, lags, static_cast<std::size_t>(m.integer("R")),
                               m.integer("depth"), state_of(m), static_cast<unsigned>(m.integer("streams")), workers);
    for (std::int64_t p : lags) rep.exact.push_back(covariance_exact(F, F, p).value);
  }
  DecayFit fit;
  bool fitted = true;
  try {
    fit = decay_exponent_fit(rep, lags.front(), lags.back());
  } catch (const std::exception&) {
    if (exact) throw;
    fitted = false;
  }

  Outcome o;
  o.result["mode"] = exact ? "exact" : "mc";
  o.result["observable"] = spec.expr.descriptor();
  o.result["regime"] = regime_name(regime_of(s.model.alpha()));
  o.result["theory_slope"] = theoretical_slope(s.model.alpha());
  if (fitted) {
    o.result["fit"] = {{"slope", fit.slope},   {"slope_se", fit.slope_se}, {"ci_lo", fit.ci_lo},
                       {"ci_hi", fit.ci_hi},   {"used", fit.used},         {"band_min", fit.band_min},
                       {"band_max", fit.band_max}};
  }
  std::ostringstream csv;
  if (exact) {
    csv << "lag,cov,remainder,band,fitted_slope,theory_slope\n";
    for (std::size_t i = 0; i < lags.size(); ++i) {
      const double p = static_cast<double>(lags[i]);
      csv << lags[i] << ',' << num(rep.cov[i]) << ',' << num(rep.error[i]) << ','
          << num(rep.cov[i] * p / std::log(p + 1.0)) << ',' << num(fit.slope) << ','
          << num(theoretical_slope(s.model.alpha())) << '\n';
    }
    if (fit.regime == DecayRegime::Critical)
      o.checks.push_back(check("band_ratio", fit.band_max / fit.band_min, "<", 2.0));
    else
      o.checks.push_back(check("slope_deviation", std::abs(fit.slope - fit.theory), "<=", tol));
  } else {
    csv << "lag,cov,std_error,exact,z\n";
    double worst = 0.0;
    for (std::size_t i = 0; i < lags.size(); ++i) {
      const double z = rep.error[i] > 0.0 ? std::abs(rep.cov[i] - rep.exact[i]) / rep.error[i]
                                          : (rep.cov[i] == rep.exact[i] ? 0.0 : INFINITY);
      worst = std::max(worst, z);
      csv << lags[i] << ',' << num(rep.cov[i]) << ',' << num(rep.error[i]) << ',' << num(rep.exact[i]) << ','
          << num(z) << '\n';
    }
    o.result["max_z"] = worst;
    o.checks.push_back(check("max_z", worst, "<=", tol));
  }
  o.csv = csv.str();
  return o;
}

Outcome clt(const Manifest& m, unsigned workers) {
  const Setup s = setup(m);
  const ObservableSpec spec = observable_of(m);
  const ObservableExpr f = spec.center ? centered(spec.expr, s.model, s.w) : spec.expr;
  CltOptions opt;
  opt.streams = static_cast<unsigned>(m.integer("streams"));
  opt.workers = workers;
  opt.exploratory = m.integer("exploratory") != 0;
  const CltReport rep = clt_experiment(s.model, s.w, f, m.integer("N"), static_cast<std::size_t>(m.integer("R")),
                                       state_of(m), opt);
  const double tol = m.real("tolerance");
  Outcome o;
  o.result["observable"] = f.descriptor();
  o.result["N"] = rep.N;
  o.result["R"] = rep.R;
  o.result["mean"] = rep.moments.mean;
  o.result["variance"] = rep.moments.variance;
  o.result["skewness"] = rep.moments.skewness;
  o.result["excess_kurtosis"] = rep.moments.excess_kurtosis;
  o.result["ks"] = rep.zero_variance ? ordered_json() : ordered_json(rep.ks);
  o.result["ks_threshold"] = rep.ks_threshold;
  o.result["sigma2_hat"] = rep.sigma2_hat;
  o.result["sigma2_series"] = rep.sigma2_series ? ordered_json(*rep.sigma2_series) : ordered_json();
  o.result["series_lags"] = rep.series_lags;
  o.result["zero_variance"] = rep.zero_variance;
  o.result["exploratory"] = rep.exploratory;
  o.checks.push_back(check("ks", rep.zero_variance ? INFINITY : rep.ks, "<", rep.ks_threshold));
  o.checks.push_back(check("abs_skewness", std::abs(rep.moments.skewness), "<=", rep.skew_bound));
  o.checks.push_back(check("abs_excess_kurtosis", std::abs(rep.moments.excess_kurtosis), "<=", rep.kurt_bound));
  if (rep.sigma2_series)
    o.checks.push_back(check("sigma2_relative_error",
                             std::abs(rep.sigma2_hat - *rep.sigma2_series) / std::abs(*rep.sigma2_series), "<=", tol));
  std::ostringstream csv;
  csv << "replica,value\n";
  for (std::size_t i = 0; i < rep.samples.size(); ++i) csv << i << ',' << num(rep.samples[i]) << '\n';
  o.csv = csv.str();
  return o;
}

ordered_json trend_json(const BlockTrend& b) {
  return {{"blocks", b.blocks}, {"ratios", b.ratios}, {"min_ratio", b.min_ratio}, {"tail_estimate", b.tail_estimate}};
}

Outcome mw(const Manifest& m, unsigned) {
  const Setup s = setup(m);
  const TriangularBasis basis(s.w);
  const ObservableSpec spec = observable_of(m);
  const std::vector<double> c = linear_coefficients(spec, "mw");
  const auto D = static_cast<std::int64_t>(c.size());
  if (D > s.model.depth() + 1) throw ManifestError("field 'obs': observable deeper than 'depth'", 0, "obs");
  const FourierTable F = fourier_linear(s.model, basis, c, -(D - 1), 0, basis.top());
  const MwDiagnostics d = mw_diagnostics(F, s.model.alpha(), dyadic_grid(1, m.integer("n_max")));
  const double tol = m.real("tolerance");
  Outcome o;
  o.result["observable"] = spec.expr.descriptor();
  o.result["adapted_blocks"] = trend_json(d.adapted_blocks);
  o.result["nonadapted_blocks"] = trend_json(d.nonadapted_blocks);
  o.result["envelope_bounded"] = d.envelope_bounded;
  o.checks.push_back(check("adapted_block_ratio_min", d.adapted_blocks.min_ratio, ">=", tol));
  o.checks.push_back(check("nonadapted_block_ratio_min", d.nonadapted_blocks.min_ratio, ">=", tol));
  o.checks.push_back(check("envelope_bounded", d.envelope_bounded ? 1 : 0, ">=", 1));
  std::ostringstream csv;
  csv << "n,adapted_sq,nonadapted_sq,adapted_partial,nonadapted_partial,envelope_constant\n";
  for (std::size_t i = 0; i < d.n.size(); ++i)
    csv << d.n[i] << ',' << num(d.adapted_sq[i]) << ',' << num(d.nonadapted_sq[i]) << ','
        << num(d.adapted_partial[i]) << ',' << num(d.nonadapted_partial[i]) << ',' << num(d.envelope_constant[i])
        << '\n';
  o.csv = csv.str();
  return o;
}

Outcome facts(const Manifest& m, unsigned) {
  const FactReport r = fact_bound_check(m.real("alpha"), m.int_list("lags"), m.integer("fact2_n"));
  Outcome o;
  o.result["c_min"] = r.c_min;
  o.result["c_max"] = r.c_max;
  o.result["stable"] = r.stable;
  o.result["sup_early"] = r.sup_early;
  o.result["fact2_holds"] = r.fact2_holds;
  o.checks.push_back(check("fact1_constant_ratio", r.c_max / r.c_min, "<", m.real("tolerance")));
  o.checks.push_back(check("fact2_holds", r.fact2_holds ? 1 : 0, ">=", 1));
  std::ostringstream csv;
  csv << "fact,n,lhs,bound,constant\n";
  for (const auto& row : r.fact1)
    csv << "1," << row.n << ',' << num(row.lhs) << ',' << num(row.envelope) << ',' << num(row.constant) << '\n';
  for (const auto& row : r.fact2)
    csv << "2," << row.n << ',' << num(row.lhs_upper) << ',' << num(row.rhs) << ',' << num(row.lhs_upper / row.rhs)
        << '\n';
  o.csv = csv.str();
  return o;
}

Outcome halfplane_decay(const Manifest& m, unsigned) {
  QuadratureConfig q;
  q.tolerance = m.real("tolerance");
  const DecayFitResult r = translation_decay_fit(static_cast<int>(m.integer("power")), m.int_list("lags"), q);
  Outcome o;
  o.result["exponent"] = r.exponent;
  o.result["guaranteed"] = r.guaranteed;
  o.result["warnings"] = r.warnings;
  o.checks.push_back(check("exponent_min", r.exponent, ">=", 0.9));
  o.checks.push_back(check("exponent_max", r.exponent, "<=", 1.1));
  o.checks.push_back(check("exponent_over_guaranteed", r.exponent, ">=", r.guaranteed));
  std::ostringstream csv;
  csv << "k,norm,error,constant\n";
  for (std::size_t i = 0; i < r.k.size(); ++i)
    csv << r.k[i] << ',' << num(r.norms[i]) << ',' << num(r.errors[i]) << ',' << num(r.constants[i]) << '\n';
  o.csv = csv.str();
  return o;
}

Outcome envelope_check(const Manifest& m, unsigned) {
  const int p = static_cast<int>(m.integer("power"));
  const double theta = m.real("theta");
  std::ostringstream csv;
  csv << "k_max,lhs,lhs_error,rhs,ratio\n";
  double lo = INFINITY, hi = 0.0;
  for (std::int64_t K : m.int_list("lags")) {
    const EnvelopeCheck e = envelope_sum_check(p, std::vector<double>(static_cast<std::size_t>(K), theta),
                                               static_cast<int>(K));
    lo = std::min(lo, e.ratio);
    hi = std::max(hi, e.ratio);
    csv << K << ',' << num(e.lhs) << ',' << num(e.lhs_error) << ',' << num(e.rhs) << ',' << num(e.ratio) << '\n';
  }
  const std::int64_t count_k = m.integer("count_k");
  double worst = 0.0;
  std::int64_t worst_k = 0;
  ordered_json counts = ordered_json::array();
  for (std::int64_t k = 1; k <= count_k; ++k) {
    const int n = comparable_count(k, 4 * count_k);
    counts.push_back(n);
    const double r = n / (4.0 * std::pow(static_cast<double>(k), 0.25));
    if (r > worst) worst = r, worst_k = k;
  }
  Outcome o;
  o.result["ratio_min"] = lo;
  o.result["ratio_max"] = hi;
  o.result["comparable_counts"] = counts;
  o.result["count_over_bound_max"] = worst;
  o.result["count_over_bound_argmax"] = worst_k;
  o.checks.push_back(check("ratio_spread", hi / lo, "<=", m.real("tolerance")));
  o.checks.push_back(check("comparable_count_over_bound", worst, "<=", 1.0));
  o.csv = csv.str();
  return o;
}

LpVector target_of(const Manifest& m, const ShiftModel& model) {
  std::map<int, double> z;
  std::istringstream is(m.str("target"));
  std::string item;
  int top = 0;
  try {
    while (std::getline(is, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("colon");
      const int k = std::stoi(item.substr(0, colon));
      if (k < 0) throw std::invalid_argument("negative");
      z[k] = std::stod(item.substr(colon + 1));
      top = std::max(top, k);
    }
  } catch (const std::exception&) {
    throw ManifestError("field 'target': expected 'm:value,...' (got '" + m.str("target") + "')", 0, "target");
  }
  if (z.empty()) throw ManifestError("field 'target': empty", 0, "target");
  if (top > model.depth()) throw ManifestError("field 'target': deeper than 'depth'", 0, "target");
  std::vector<double> y(static_cast<std::size_t>(top) + 1, 0.0);
  for (auto [k, v] : z) y[k] = v / model.weight(k);
  return LpVector::from_coords(std::move(y), model.p_exp());
}

Outcome support(const Manifest& m, unsigned) {
  const Setup s = setup(m);
  const BlockSchedule sched = build_block_schedule(s.model, s.w, s.chain, static_cast<int>(m.integer("levels")));
  const LpVector target = target_of(m, s.model);
  const SupportProbeResult r = support_probe(s.model, s.w, sched, target, m.real("delta"),
                                             static_cast<std::size_t>(m.integer("R")), state_of(m));
  Outcome o;
  o.result["hits"] = r.hits;
  o.result["trials"] = r.trials;
  o.result["empirical"] = r.empirical;
  o.result["level"] = r.level;
  o.result["log_analytic_bound"] = r.log_analytic_bound;
  o.result["analytic_bound"] = r.analytic_bound;
  o.result["target_symbols"] = r.target_symbols;
  o.checks.push_back(check("empirical_hit_rate", r.empirical, ">", 0.0));
  o.checks.push_back(check("analytic_bound", r.analytic_bound, ">", 0.0));
  std::ostringstream csv;
  csv << "m,target,symbol\n";
  for (std::size_t k = 0; k < target.size(); ++k)
    csv << k << ',' << num(target.coord(k)) << ',' << (k < r.target_symbols.size() ? r.target_symbols[k] : 0)
        << '\n';
  o.csv = csv.str();
  return o;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

}  // namespace

int run(Manifest manifest, const RunOptions& opt, std::ostream& log) {
  try {
    manifest.validate();
  } catch (const ManifestError& e) {
    log << "invalid manifest: " << e.what() << '\n';
    return kInvalidManifest;
  }
  const std::string cmd = manifest.str("command");
  const std::string hash = manifest.hash();
  Outcome o;
  try {
    if (cmd == "weights-check") o = weights_check(manifest, opt.workers);
    else if (cmd == "basis-check") o = basis_check(manifest, opt.workers);
    else if (cmd == "cov-decay") o = cov_decay(manifest, opt.workers);
    else if (cmd == "clt") o = clt(manifest, opt.workers);
    else if (cmd == "mw") o = mw(manifest, opt.workers);
    else if (cmd == "facts") o = facts(manifest, opt.workers);
    else if (cmd == "halfplane-decay") o = halfplane_decay(manifest, opt.workers);
    else if (cmd == "envelope-check") o = envelope_check(manifest, opt.workers);
    else o = support(manifest, opt.workers);
  } catch (const ManifestError& e) {
    log << "invalid manifest: " << e.what() << '\n';
    return kInvalidManifest;
  } catch (const std::exception& e) {
    log << cmd << ": " << e.what() << '\n';
    return kModuleError;
  }

  bool pass = true;
  ordered_json checks = ordered_json::array();
  for (const Check& c : o.checks) {
    pass = pass && c.pass;
    checks.push_back({{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"threshold", c.threshold},
                      {"pass", c.pass}});
    log << (c.pass ? "PASS " : "FAIL ") << c.name << ' ' << num(c.value) << ' ' << c.relation << ' '
        << num(c.threshold) << '\n';
  }
  ordered_json report;
  report["command"] = cmd;
  report["manifest_hash"] = hash;
  ordered_json mf = ordered_json::object();
  for (const auto& [k, v] : manifest.values()) mf[k] = v;
  report["manifest"] = mf;
  report["result"] = o.result;
  report["checks"] = checks;
  report["pass"] = pass;

  try {
    std::filesystem::create_directories(opt.out);
    write_file(opt.out / "report.json", report.dump(2) + "\n");
    write_file(opt.out / "data.csv", "# manifest_hash=" + hash + "\n" + o.csv);
    write_file(opt.out / "manifest.replay", "# manifest_hash=" + hash + "\n" + manifest.canonical());
  } catch (const std::exception& e) {
    log << "output: " << e.what() << '\n';
    return kModuleError;
  }
  return pass ? kPass : kToleranceFailed;
}

}  // namespace linmix::cli
