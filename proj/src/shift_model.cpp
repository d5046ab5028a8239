#include "linmix/shift_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <stdexcept>

#include "linmix/numerics.hpp"

namespace linmix {

LpVector LpVector::from_coords(std::vector<double> y, double p_exp, double tail_bound) {
  if (!(p_exp >= 1.0)) throw std::invalid_argument("LpVector: p_exp must be >= 1");
  LpVector v;
  v.W_ = std::make_shared<const std::vector<double>>(y.size(), 1.0);
  v.z_ = std::move(y);
  v.p_exp_ = p_exp;
  v.tail_bound_ = tail_bound;
  return v;
}

LpVector LpVector::from_weighted(std::vector<double> z, std::shared_ptr<const std::vector<double>> W,
                                 double p_exp, double tail_bound) {
  if (!W || W->size() < z.size()) throw std::invalid_argument("LpVector: weight table too short");
  LpVector v;
  v.z_ = std::move(z);
  v.W_ = std::move(W);
  v.p_exp_ = p_exp;
  v.tail_bound_ = tail_bound;
  return v;
}

double LpVector::coord(std::size_t m) const { return m < z_.size() ? z_[m] / (*W_)[m] : 0.0; }

std::vector<double> LpVector::coords() const {
  std::vector<double> y(z_.size());
  for (std::size_t m = 0; m < y.size(); ++m) y[m] = coord(m);
  return y;
}

double LpVector::norm() const {
  double acc = 0.0;
  if (p_exp_ == 2.0) {
    for (std::size_t m = 0; m < z_.size(); ++m) {
      const double y = coord(m);
      acc += y * y;
    }
    return std::sqrt(acc);
  }
  for (std::size_t m = 0; m < z_.size(); ++m) acc += std::pow(std::abs(coord(m)), p_exp_);
  return std::pow(acc, 1.0 / p_exp_);
}

void LpVector::write_csv(std::ostream& os) const {
  os << "m,y_m\n";
  char buf[64];
  for (std::size_t m = 0; m < z_.size(); ++m) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", m, coord(m));
    os << buf;
  }
}

double distance(const LpVector& a, const LpVector& b) {
  const std::size_t n = std::max(a.size(), b.size());
  const double p = a.p_exp();
  double acc = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double d = std::abs(a.coord(m) - b.coord(m));
    acc += p == 2.0 ? d * d : std::pow(d, p);
  }
  return p == 2.0 ? std::sqrt(acc) : std::pow(acc, 1.0 / p);
}

double ShiftModel::weight(int m) const {
  if (m < 0 || m > M_) throw std::out_of_range("ShiftModel::weight: index beyond truncation");
  return (*W_)[m];
}

double ShiftModel::cumulative_weight(double k) const { return k == 0.0 ? 1.0 : std::pow(k, alpha_); }

double ShiftModel::seed(int n) const {
  if (n < 1 || n > seed_count()) throw std::out_of_range("ShiftModel::seed: index out of range");
  return seeds_[n - 1];
}

double ShiftModel::seed_bound(int count) const {
  double a = 0.0;
  for (int n = 1; n <= std::min(count, seed_count()); ++n) a = std::max(a, std::abs(seeds_[n - 1]));
  return a;
}

double ShiftModel::weight_tail(std::int64_t j) const {
  const double s = alpha_ * p_exp_;
  double acc = power_tail(s, std::max<std::int64_t>(j - 1, 0));
  if (j <= 0) acc += 1.0;
  return std::pow(acc, 1.0 / p_exp_);
}

namespace {

/** Dyadic candidates of one stage: j 2^{-s} with |value| <= s + 1, by magnitude, positive first. */
void append_stage(int s, std::vector<double>& out, std::set<double>& seen) {
  const double step = std::ldexp(1.0, -s);
  const long top = static_cast<long>((s + 1) / step);
  for (long j = 0; j <= top; ++j) {
    const double v = j * step;
    for (double c : {v, -v}) {
      if (seen.insert(c).second) out.push_back(c);
    }
  }
}

}  // namespace

ShiftModel canonical_shift(double alpha, double p_exp, int M, const GrowthChain& chain, int seed_count) {
  if (!(alpha > 0.5)) throw std::invalid_argument("canonical_shift: alpha must exceed 1/2");
  if (!(p_exp >= 1.0)) throw std::invalid_argument("canonical_shift: p_exp must be >= 1");
  if (!(alpha * p_exp > 1.0))
    throw std::invalid_argument("canonical_shift: alpha * p_exp <= 1, sum of W_n^{-p} diverges");
  if (M < 1) throw std::invalid_argument("canonical_shift: M must be positive");
  if (seed_count <= 0) seed_count = chain.omega0_range();
  if (seed_count > chain.omega0_range())
    throw std::invalid_argument("canonical_shift: more seeds than the omega_0 table covers");

  ShiftModel m;
  m.alpha_ = alpha;
  m.p_exp_ = p_exp;
  m.M_ = M;
  auto W = std::make_shared<std::vector<double>>(M + 1);
  (*W)[0] = 1.0;
  for (int k = 1; k <= M; ++k) (*W)[k] = std::pow(static_cast<double>(k), alpha);
  m.W_ = std::move(W);

  std::vector<double> candidates;
  std::vector<bool> used;
  std::set<double> seen;
  int stage = 0;
  for (int n = 1; n <= seed_count; ++n) {
    const double bound = chain.omega0(n);
    bool placed = false;
    while (!placed) {
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (used[i] || std::pow(std::abs(candidates[i]), p_exp) > bound) continue;
        used[i] = true;
        m.seeds_.push_back(candidates[i]);
        placed = true;
        break;
      }
      if (!placed) {
        append_stage(stage++, candidates, seen);
        used.resize(candidates.size(), false);
      }
    }
  }
  return m;
}

LpVector apply_T(const ShiftModel& model, const LpVector& v, int steps) {
  if (steps < 0) throw std::invalid_argument("apply_T: steps must be nonnegative");
  const auto& W = model.weight_table();
  const std::size_t D = v.size();
  if (D > W->size()) throw std::invalid_argument("apply_T: vector deeper than the model truncation");
  if (steps == 0 && v.scale() == W) return v;

  std::vector<double> z(D, 0.0);
  const bool native = v.scale() == W;
  for (std::size_t m = 0; m + steps < D; ++m) {
    const std::size_t src = m + steps;
    z[m] = native ? v.weighted()[src] : v.coord(src) * (*W)[src];
  }
  double tail = v.tail_bound();
  if (tail > 0.0 && steps > 0) {
    const double m0 = static_cast<double>(D > static_cast<std::size_t>(steps) ? D - steps : 0);
    double ratio = model.cumulative_weight(m0 + steps) / model.cumulative_weight(m0);
    if (m0 == 0.0) ratio = std::max(ratio, model.cumulative_weight(1.0 + steps));
    tail *= ratio;
  }
  return LpVector::from_weighted(std::move(z), W, v.p_exp(), tail);
}

LpVector apply_S(const ShiftModel& model, int seed_index, int k) {
  if (k < 0) throw std::invalid_argument("apply_S: k must be nonnegative");
  if (k > model.depth()) throw std::out_of_range("apply_S: k exceeds the truncation depth");
  std::vector<double> z(model.depth() + 1, 0.0);
  z[k] = model.seed(seed_index);
  return LpVector::from_weighted(std::move(z), model.weight_table(), model.p_exp(), 0.0);
}

SeedCombination approximate_with_seeds(const ShiftModel& model, const LpVector& target, double delta,
                                       int max_terms_per_coord) {
  if (!(delta > 0.0)) throw std::invalid_argument("approximate_with_seeds: delta must be positive");
  if (target.size() > static_cast<std::size_t>(model.depth()) + 1)
    throw std::invalid_argument("approximate_with_seeds: target deeper than the model");
  const auto& W = *model.weight_table();
  SeedCombination out;
  std::vector<double> z(model.depth() + 1, 0.0);
  for (std::size_t m = 0; m < target.size(); ++m) {
    double t = target.coord(m) * W[m];
    for (int it = 0; it < max_terms_per_coord && t != 0.0; ++it) {
      int best = 0;
      double best_gap = std::abs(t);
      for (int n = 1; n <= model.seed_count(); ++n) {
        const double gap = std::abs(t - model.seed(n));
        if (gap < best_gap) {
          best_gap = gap;
          best = n;
        }
      }
      if (best == 0) break;
      t -= model.seed(best);
      z[m] += model.seed(best);
      out.terms.emplace_back(best, static_cast<int>(m));
    }
  }
  out.value = LpVector::from_weighted(std::move(z), model.weight_table(), model.p_exp(), 0.0);
  out.residual = distance(out.value, target);
  return out;
}

}  // namespace linmix
