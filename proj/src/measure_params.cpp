#include "linmix/measure_params.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "linmix/block_schedule.hpp"
#include "linmix/numerics.hpp"

namespace linmix {

double GrowthSpec::operator()(int kappa) const {
  const double k = static_cast<double>(kappa);
  if (kind == "log") return std::log(k + params.at("shift"));
  if (kind == "affine") return params.at("a") + params.at("b") * k;
  throw std::invalid_argument("unknown growth kind '" + kind + "'");
}

GrowthSpec log_growth(double shift) { return GrowthSpec{"log", {{"shift", shift}}}; }

GrowthSpec affine_growth(double a, double b) { return GrowthSpec{"affine", {{"a", a}, {"b", b}}}; }

GrowthChain build_growth_chain(const GrowthSpec& omega, int k_max) {
  if (k_max < 1) throw std::invalid_argument("build_growth_chain: K_max must be positive");
  GrowthChain c;
  c.spec_ = omega;
  c.omega_.resize(k_max);
  for (int k = 1; k <= k_max; ++k) {
    const double v = omega(k);
    if (!(v > 1.0) || !std::isfinite(v))
      throw std::invalid_argument("build_growth_chain: omega(" + std::to_string(k) + ") must exceed 1");
    if (k > 1 && v < c.omega_[k - 2])
      throw std::invalid_argument("build_growth_chain: omega decreases at " + std::to_string(k));
    c.omega_[k - 1] = v;
  }
  if (!(c.omega_.back() > c.omega_.front()))
    throw std::invalid_argument("build_growth_chain: omega is not increasing on [1, K_max]");

  c.omega1_.resize(k_max);
  for (int k = 1; k <= k_max; ++k) {
    double v = std::pow(c.omega_[k - 1], 0.25);
    if (k > 1) v = std::min(v, 2.0 * c.omega1_[k - 2]);
    c.omega1_[k - 1] = v;
  }
  c.omega0_.resize(2 * static_cast<std::size_t>(k_max));
  for (int k = 1; k <= 2 * k_max; ++k) c.omega0_[k - 1] = std::sqrt(c.omega1_[(k + 1) / 2 - 1]);

  if (c.omega0_failures() != 0) throw NumericError("build_growth_chain: omega_0 compatibility fails");
  if (!c.doubling_holds()) throw NumericError("build_growth_chain: omega_1 doubling bound fails");
  return c;
}

GrowthChain GrowthChain::from_tables(std::vector<double> omega, std::vector<double> omega1,
                                     std::vector<double> omega0) {
  if (omega.empty() || omega1.size() != omega.size() || omega0.size() < omega.size())
    throw std::invalid_argument("GrowthChain::from_tables: inconsistent table sizes");
  GrowthChain c;
  c.spec_ = GrowthSpec{"table", {}};
  c.omega_ = std::move(omega);
  c.omega1_ = std::move(omega1);
  c.omega0_ = std::move(omega0);
  return c;
}

namespace {
double lookup(const std::vector<double>& t, int k, const char* what) {
  if (k < 1 || k > static_cast<int>(t.size()))
    throw std::out_of_range(std::string(what) + ": index " + std::to_string(k) + " outside table");
  return t[k - 1];
}
}  // namespace

double GrowthChain::omega(int k) const { return lookup(omega_, k, "omega"); }
double GrowthChain::omega1(int k) const { return lookup(omega1_, k, "omega1"); }
double GrowthChain::omega0(int k) const { return lookup(omega0_, k, "omega0"); }
double GrowthChain::log_omega0(int k) const { return std::log(omega0(k)); }

int GrowthChain::omega0_failures() const {
  const int K = k_max();
  int failures = 0;
  for (int k = 1; k < K; ++k) {
    for (int kp = 1; k + kp <= K; ++kp) {
      const double lhs = (k + kp) * std::log(omega0(k + kp));
      const double rhs = k * std::log(omega1(k)) + kp * std::log(omega1(kp));
      if (lhs > rhs + 1e-12 * std::max(1.0, std::abs(rhs))) ++failures;
    }
  }
  return failures;
}

int GrowthChain::ratio_monotone_from() const {
  const int K = k_max();
  std::vector<double> r(K);
  for (int k = 1; k <= K; ++k) r[k - 1] = omega1(k) * omega1(k) / omega(k);
  int from = K;
  while (from > 1 && r[from - 2] >= r[from - 1]) --from;
  if (from == K && K > 1) return -1;
  if (!(r.back() < r[from - 1])) return -1;
  return from;
}

bool GrowthChain::doubling_holds() const {
  for (int k = 1; k < k_max(); ++k)
    if (omega1(k + 1) > 2.0 * omega1(k)) return false;
  return true;
}

SymbolWeights SymbolWeights::from_log_masses(std::vector<double> log_p, double log_remainder) {
  if (log_p.empty()) throw std::invalid_argument("SymbolWeights: empty weight sequence");
  for (std::size_t i = 0; i < log_p.size(); ++i) {
    if (!std::isfinite(log_p[i])) throw std::invalid_argument("SymbolWeights: non-finite log mass");
    if (i > 0 && !(log_p[i] < log_p[i - 1]))
      throw std::invalid_argument("SymbolWeights: masses must be strictly decreasing");
  }
  SymbolWeights w;
  w.log_p_ = std::move(log_p);
  w.log_remainder_ = log_remainder;
  const int L = w.size();
  w.mass_.resize(L);
  for (int l = 1; l <= L; ++l) w.mass_[l - 1] = std::exp(w.log_p_[l - 1]);
  w.mass_[L - 1] += w.remainder();
  w.q_.assign(L + 1, 0.0);
  for (int l = L; l >= 1; --l) w.q_[l - 1] = w.mass_[l - 1] + w.q_[l];
  return w;
}

SymbolWeights SymbolWeights::geometric(double ratio, int L) {
  if (!(ratio > 0.0 && ratio < 1.0) || L < 1)
    throw std::invalid_argument("SymbolWeights::geometric: need 0 < ratio < 1 and L >= 1");
  std::vector<double> lp(L);
  for (int l = 1; l <= L; ++l) lp[l - 1] = std::log1p(-ratio) + (l - 1) * std::log(ratio);
  return from_log_masses(std::move(lp), L * std::log(ratio));
}

double SymbolWeights::p(int l) const { return std::exp(log_p(l)); }

double SymbolWeights::log_p(int l) const {
  if (l < 1 || l > size()) throw std::out_of_range("SymbolWeights: symbol out of range");
  return log_p_[l - 1];
}

double SymbolWeights::remainder() const { return std::exp(log_remainder_); }

double SymbolWeights::mass(int l) const {
  if (l < 1 || l > size()) throw std::out_of_range("SymbolWeights: symbol out of range");
  return mass_[l - 1];
}

double SymbolWeights::tail(int l) const {
  if (l < 1 || l > size() + 1) throw std::out_of_range("SymbolWeights: tail index out of range");
  return q_[l - 1];
}

SymbolWeights build_symbol_weights(const GrowthChain& chain, int d_max, int L, std::span<const std::int64_t> levels) {
  if (d_max < 0) throw std::invalid_argument("build_symbol_weights: d_max must be nonnegative");
  if (L < 2 * d_max || L < 2)
    throw std::invalid_argument("build_symbol_weights: need L >= 2 d_max and L >= 2");
  const int range = chain.omega0_range();
  if (L > range)
    throw std::invalid_argument("build_symbol_weights: L exceeds the omega_0 table (2 K_max)");

  const bool capped = !levels.empty() && d_max > 0;
  if (capped && static_cast<int>(levels.size()) < L + 1)
    throw std::invalid_argument("build_symbol_weights: need block levels N_1..N_{L+1}");
  auto log_gap = [&](int l) {
    const std::int64_t g = levels[l] - levels[l - 1];
    if (g < 1) throw std::invalid_argument("build_symbol_weights: block levels must increase");
    return std::log(static_cast<double>(g));
  };

  const int extent = std::min(range, L + 64);
  std::vector<double> lp(extent);
  lp[0] = 0.0;
  double prev_step = 0.0;
  for (int l = 1; l < extent; ++l) {
    double step = 2.0 * (l * chain.log_omega0(l) - (l + 1) * chain.log_omega0(l + 1) - std::log(2.0));
    if (l > 1) step = std::min(step, prev_step);
    double next = lp[l - 1] + step;
    const int d = std::min(d_max, (l + 1) / 2);
    if (d > 0) next = std::min(next, -4.0 * d * chain.log_omega0(l + 1));
    if (capped && l + 1 > 2 * d_max && l + 1 <= L)
      next = std::min(next, lp[l - 1] + 4.0 * d_max * (log_gap(l) - log_gap(l + 1) - std::log(2.0)));
    lp[l] = next;
    prev_step = next - lp[l - 1];
  }
  // Remainder: the computed extension past L plus a geometric bound at the last ratio.
  std::vector<double> rest(lp.begin() + L, lp.end());
  rest.push_back(lp.back() + prev_step - std::log1p(-std::exp(prev_step)));
  std::vector<double> all(lp.begin(), lp.begin() + L);
  const double log_rest = log_sum_exp(rest);
  all.push_back(log_rest);
  const double log_z = log_sum_exp(all);
  std::vector<double> out(lp.begin(), lp.begin() + L);
  for (double& v : out) v -= log_z;
  if (out.back() < std::log(DBL_MIN))
    throw NumericError("build_symbol_weights: p_L underflows double precision; use a smaller L");
  return SymbolWeights::from_log_masses(std::move(out), log_rest - log_z);
}

namespace {

ConditionFit fit_moment_condition(const SymbolWeights& w, const GrowthChain& chain, int k_max,
                                  double power, double limit) {
  const int L = w.size();
  ConditionFit best;
  best.constant = 0.0;
  double half_constant = 0.0;
  const int half = (k_max + 1) / 2;
  for (int k = 1; k <= k_max; ++k) {
    std::vector<double> terms;
    double lhs = -std::numeric_limits<double>::infinity();
    for (int l = L; l >= 1; --l) {
      const double t = power * std::log(w.mass(l)) + k * chain.log_omega0(l);
      terms.push_back(t);
      lhs = log_sum_exp(terms);
      const double rhs = power * w.log_p(l) + k * std::max(chain.log_omega0(k), chain.log_omega0(l));
      const double c = std::exp(lhs - rhs);
      if (c > best.constant) {
        best.constant = c;
        best.worst_l = l;
        best.worst_k = k;
      }
      if (k <= half) half_constant = std::max(half_constant, c);
    }
  }
  best.holds = best.constant <= limit;
  best.growing_in_k = k_max >= 2 && best.constant > 1.1 * half_constant;
  return best;
}

}  // namespace

bool ConditionReport::all_hold() const {
  bool ok = tail_ratio.holds && tail_ratio_decreasing;
  if (sqrt_moment) ok = ok && sqrt_moment->holds;
  if (moment) ok = ok && moment->holds;
  for (const auto& c : polynomial) ok = ok && c.holds;
  return ok;
}

ConditionReport check_weight_conditions(const SymbolWeights& w, const GrowthChain& chain, int k_max,
                                        const BlockSchedule* schedule, int d_max, double limit) {
  ConditionReport rep;
  const int L = w.size();
  rep.tail_ratio.constant = 0.0;
  rep.tail_ratio_decreasing = true;
  double prev = std::numeric_limits<double>::infinity();
  for (int l = 1; l < L; ++l) {
    const double r = w.tail(l + 1) / w.p(l);
    if (r > rep.tail_ratio.constant) {
      rep.tail_ratio.constant = r;
      rep.tail_ratio.worst_l = l;
    }
    if (r > prev * (1.0 + 1e-12)) rep.tail_ratio_decreasing = false;
    prev = r;
  }
  rep.tail_ratio.holds = rep.tail_ratio.constant <= 0.5;

  if (k_max > 0) {
    if (k_max > chain.omega0_range() || L > chain.omega0_range())
      throw std::invalid_argument("check_weight_conditions: k_max or L outside the chain tables");
    rep.sqrt_moment = fit_moment_condition(w, chain, k_max, 0.5, limit);
    rep.moment = fit_moment_condition(w, chain, k_max, 1.0, limit);
  }

  for (int d = 1; d <= d_max; ++d) {
    PolynomialCondition pc;
    pc.d = d;
    pc.margin = -std::numeric_limits<double>::infinity();
    for (int l = 2 * d; l <= L; ++l)
      pc.margin = std::max(pc.margin, 2.0 * d * chain.log_omega0(l) + 0.5 * w.log_p(l));
    pc.holds = pc.margin <= 1e-12;
    if (schedule != nullptr && schedule->levels() >= 2) {
      double acc = 0.0;
      const int top = std::min(schedule->levels() - 1, L);
      for (int l = 1; l <= top; ++l) {
        const double gap = static_cast<double>(schedule->N(l + 1) - schedule->N(l));
        acc += gap * std::exp(w.log_p(l) / (4.0 * d));
        pc.partial_sums.push_back(acc);
      }
      const std::size_t n = pc.partial_sums.size();
      pc.sums_cauchy = n >= 2 && (pc.partial_sums[n - 1] - pc.partial_sums[n - 2]) <= 1e-6 * pc.partial_sums[n - 1];
      pc.holds = pc.holds && pc.sums_cauchy;
    }
    rep.polynomial.push_back(std::move(pc));
  }
  return rep;
}

}  // namespace linmix
