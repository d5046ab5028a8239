#include "linmix/spectral_basis.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "linmix/parallel.hpp"

namespace linmix {

TriangularBasis::TriangularBasis(const SymbolWeights& w) : w_(w) {
  for (int l = 1; l < w.size(); ++l) {
    const double q = w.tail(l), q1 = w.tail(l + 1), p = w.mass(l);
    if (!(q1 >= DBL_MIN)) {
      warning_ = "basis truncated at l = " + std::to_string(l) + ": tail mass underflows";
      break;
    }
    diag_.push_back(std::sqrt(q1) / (std::sqrt(p) * std::sqrt(q)));
    above_.push_back(-std::sqrt(p) / (std::sqrt(q1) * std::sqrt(q)));
  }
}

TriangularBasis build_basis(const SymbolWeights& w) { return TriangularBasis(w); }

double TriangularBasis::diag(int l) const {
  if (l == 0) return 1.0;
  if (l < 0 || l > top()) throw std::out_of_range("TriangularBasis: index out of range");
  return diag_[l - 1];
}

double TriangularBasis::above(int l) const {
  if (l == 0) return 1.0;
  if (l < 0 || l > top()) throw std::out_of_range("TriangularBasis: index out of range");
  return above_[l - 1];
}

double TriangularBasis::value(int l, int u) const {
  if (u < 1 || u > w_.size()) throw std::out_of_range("TriangularBasis: symbol out of range");
  if (l == 0) return 1.0;
  if (u < l) return 0.0;
  return u == l ? diag(l) : above(l);
}

double TriangularBasis::inner(int l, int k) const {
  double acc = 0.0;
  for (int u = w_.size(); u >= std::max({l, k, 1}); --u) acc += w_.mass(u) * value(l, u) * value(k, u);
  return acc;
}

double TriangularBasis::l1_norm(int l) const {
  double acc = 0.0;
  for (int u = w_.size(); u >= std::max(l, 1); --u) acc += w_.mass(u) * std::abs(value(l, u));
  return acc;
}

double TriangularBasis::gram_error() const {
  double worst = 0.0;
  for (int l = 0; l <= top(); ++l)
    for (int k = l; k <= top(); ++k) worst = std::max(worst, std::abs(inner(l, k) - (l == k ? 1.0 : 0.0)));
  return worst;
}

TensorIndex::TensorIndex(std::vector<int> l_, std::vector<std::int64_t> j_) : l(std::move(l_)), j(std::move(j_)) {
  if (l.empty() || l.size() != j.size()) throw std::invalid_argument("TensorIndex: need |l| = |j| >= 1");
  for (int v : l)
    if (v < 1) throw std::invalid_argument("TensorIndex: symbol indices must be >= 1");
  for (std::size_t i = 1; i < j.size(); ++i)
    if (!(j[i - 1] < j[i])) throw std::invalid_argument("TensorIndex: positions must be strictly increasing");
}

TensorIndex TensorIndex::translated(std::int64_t p) const {
  TensorIndex t = *this;
  for (auto& v : t.j) v += p;
  return t;
}

FourierTable FourierTable::factorized(std::vector<double> amplitudes, std::int64_t j_lo, std::vector<double> profile,
                                      std::string descriptor, double remainder) {
  FourierTable t;
  t.factorized_ = true;
  t.amplitudes_ = std::move(amplitudes);
  t.j_lo_ = j_lo;
  t.profile_ = std::move(profile);
  t.descriptor_ = std::move(descriptor);
  t.remainder_ = remainder;
  return t;
}

FourierTable FourierTable::sparse(std::map<TensorIndex, double> entries, std::string descriptor, double remainder) {
  FourierTable t;
  for (const auto& [idx, v] : entries) {
    (void)v;
    t.r_max_ = std::max(t.r_max_, idx.rank());
    for (int l : idx.l) t.l_max_ = std::max(t.l_max_, l);
  }
  t.entries_ = std::move(entries);
  t.descriptor_ = std::move(descriptor);
  t.remainder_ = remainder;
  return t;
}

double FourierTable::profile_at(std::int64_t j) const {
  if (j < j_lo_ || j > j_hi()) return 0.0;
  return profile_[static_cast<std::size_t>(j - j_lo_)];
}

double FourierTable::value(const TensorIndex& idx) const {
  if (factorized_) {
    if (idx.rank() != 1 || idx.l[0] > static_cast<int>(amplitudes_.size())) return 0.0;
    return amplitudes_[idx.l[0] - 1] * profile_at(idx.j[0]);
  }
  const auto it = entries_.find(idx);
  return it == entries_.end() ? 0.0 : it->second;
}

double FourierTable::norm() const {
  double acc = 0.0;
  if (factorized_) {
    double a = 0.0, g = 0.0;
    for (double v : amplitudes_) a += v * v;
    for (double v : profile_) g += v * v;
    acc = a * g;
  } else {
    for (const auto& [idx, v] : entries_) acc += v * v;
  }
  return std::sqrt(acc);
}

std::map<TensorIndex, double> FourierTable::entries() const {
  if (!factorized_) return entries_;
  std::map<TensorIndex, double> out;
  for (std::size_t i = 0; i < profile_.size(); ++i) {
    if (profile_[i] == 0.0) continue;
    for (std::size_t l = 0; l < amplitudes_.size(); ++l)
      out.emplace(TensorIndex({static_cast<int>(l) + 1}, {j_lo_ + static_cast<std::int64_t>(i)}),
                  amplitudes_[l] * profile_[i]);
  }
  return out;
}

FourierTable FourierTable::translated(std::int64_t p) const {
  FourierTable t = *this;
  if (factorized_) {
    t.j_lo_ -= p;
  } else {
    t.entries_.clear();
    for (const auto& [idx, v] : entries_) t.entries_.emplace(idx.translated(-p), v);
  }
  return t;
}

void FourierTable::write_csv(std::ostream& os) const {
  os << "r,l_tuple,j_tuple,value\n";
  char buf[40];
  for (const auto& [idx, v] : entries()) {
    os << idx.rank() << ',';
    for (int i = 0; i < idx.rank(); ++i) os << (i ? "-" : "") << idx.l[i];
    os << ',';
    for (int i = 0; i < idx.rank(); ++i) os << (i ? "-" : "") << idx.j[i];
    std::snprintf(buf, sizeof buf, ",%.17g\n", v);
    os << buf;
  }
}

std::vector<double> linear_amplitudes(const ShiftModel& model, const TriangularBasis& basis, int l_max) {
  const SymbolWeights& w = basis.weights();
  if (w.size() > model.seed_count()) throw std::invalid_argument("linear_amplitudes: more symbols than seeds");
  const int top = std::min(l_max, basis.top());
  std::vector<double> A(std::max(top, 0));
  for (int l = 1; l <= top; ++l) {
    double acc = 0.0;
    for (int m = w.size(); m >= l; --m) acc += w.mass(m) * basis.value(l, m) * model.seed(m);
    A[l - 1] = acc;
  }
  return A;
}

FourierTable fourier_linear(const ShiftModel& model, const TriangularBasis& basis, const std::vector<double>& c,
                            std::int64_t j_lo, std::int64_t j_hi, int l_max, std::int64_t lag) {
  if (j_lo > j_hi) throw std::invalid_argument("fourier_linear: empty j range");
  if (lag < 0) throw std::invalid_argument("fourier_linear: lag must be nonnegative");
  const std::vector<double> all = linear_amplitudes(model, basis, basis.top());
  const int keep = std::min<int>(std::max(l_max, 0), static_cast<int>(all.size()));
  std::vector<double> A(all.begin(), all.begin() + keep);
  double a_kept = 0.0, a_omit = 0.0;
  for (int l = 0; l < static_cast<int>(all.size()); ++l) (l < keep ? a_kept : a_omit) += all[l] * all[l];

  auto g_of = [&](std::int64_t j) {
    const std::int64_t m = -j - lag;
    if (m < 0 || m >= static_cast<std::int64_t>(c.size())) return 0.0;
    return c[m] / model.cumulative_weight(static_cast<double>(m));
  };
  std::vector<double> g(static_cast<std::size_t>(j_hi - j_lo + 1));
  for (std::int64_t j = j_lo; j <= j_hi; ++j) g[j - j_lo] = g_of(j);
  double g_all = 0.0, g_omit = 0.0;
  for (std::int64_t m = 0; m < static_cast<std::int64_t>(c.size()); ++m) {
    const double v = c[m] / model.cumulative_weight(static_cast<double>(m));
    g_all += v * v;
    const std::int64_t j = -m - lag;
    if (j < j_lo || j > j_hi) g_omit += v * v;
  }
  const double remainder = std::sqrt(a_omit * g_all + a_kept * g_omit);
  std::string desc = ObservableExpr::linear(c).descriptor();
  if (lag) desc += "@lag" + std::to_string(lag);
  return FourierTable::factorized(std::move(A), j_lo, std::move(g), desc, remainder);
}

McEstimate fourier_mc(const ObservableExpr& obs, const ShiftModel& model, const TriangularBasis& basis,
                      const TensorIndex& index, std::size_t R, SamplerState state, std::int64_t window_lo,
                      std::int64_t window_hi, unsigned workers) {
  if (R < 2) throw std::invalid_argument("fourier_mc: need at least two samples");
  if (!(window_lo <= 0 && window_hi >= 0)) throw std::invalid_argument("fourier_mc: window must cover 0");
  for (std::int64_t j : index.j)
    if (j < window_lo || j > window_hi) throw std::invalid_argument("fourier_mc: window too small for index");
  if (obs.support_depth() > 1 - window_lo) throw std::invalid_argument("fourier_mc: window too small for observable");
  for (int l : index.l)
    if (l > basis.top()) throw std::invalid_argument("fourier_mc: basis index beyond truncation");

  const SymbolSampler sampler(basis.weights());
  const std::uint64_t len = static_cast<std::uint64_t>(window_hi - window_lo + 1);
  std::vector<double> vals(R);
  parallel_for(R, workers, [&](std::size_t i) {
    SamplerState s{state.seed, state.stream, state.counter + i * len};
    const SymbolWindow win = sample_window(sampler, window_lo, window_hi, s);
    double e = 1.0;
    for (int r = 0; r < index.rank(); ++r) e *= basis.value(index.l[r], win.at(index.j[r]));
    vals[i] = e == 0.0 ? 0.0 : e * evaluate(obs, phi(model, win));
  });
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(R);
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(R - 1) / static_cast<double>(R))};
}

CovarianceValue covariance_exact(const FourierTable& F, const FourierTable& G, std::int64_t p) {
  CovarianceValue out;
  if (F.is_factorized() && G.is_factorized()) {
    double amp = 0.0;
    const std::size_t n = std::min(F.amplitudes().size(), G.amplitudes().size());
    for (std::size_t l = 0; l < n; ++l) amp += F.amplitudes()[l] * G.amplitudes()[l];
    double prof = 0.0;
    const std::int64_t lo = std::max(F.j_lo(), G.j_lo() + p), hi = std::min(F.j_hi(), G.j_hi() + p);
    for (std::int64_t j = lo; j <= hi; ++j) prof += F.profile_at(j) * G.profile_at(j - p);
    out.value = amp * prof;
  } else {
    const auto gmap = G.entries();
    for (const auto& [idx, a] : F.entries()) {
      const auto it = gmap.find(idx.translated(-p));
      if (it != gmap.end()) out.value += a * it->second;
    }
  }
  out.remainder = F.remainder() * G.norm() + F.norm() * G.remainder() + F.remainder() * G.remainder();
  return out;
}

EnvelopeFit envelope_constant(const FourierTable& table, const SymbolWeights& w, double alpha) {
  EnvelopeFit fit;
  auto consider = [&](const TensorIndex& idx, double a) {
    double env = 1.0;
    for (int r = 0; r < idx.rank(); ++r)
      env *= std::sqrt(w.mass(idx.l[r])) * std::pow(1.0 + std::abs(static_cast<double>(idx.j[r])), -alpha);
    const double c = std::abs(a) / env;
    if (c > fit.constant) {
      fit.constant = c;
      fit.worst = idx;
    }
  };
  if (table.is_factorized()) {
    for (std::size_t l = 0; l < table.amplitudes().size(); ++l)
      for (std::int64_t j = table.j_lo(); j <= table.j_hi(); ++j)
        if (table.profile_at(j) != 0.0)
          consider(TensorIndex({static_cast<int>(l) + 1}, {j}), table.amplitudes()[l] * table.profile_at(j));
  } else {
    for (const auto& [idx, a] : table.entries()) consider(idx, a);
  }
  return fit;
}

}  // namespace linmix
