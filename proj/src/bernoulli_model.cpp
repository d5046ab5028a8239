#include "linmix/bernoulli_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace linmix {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t SamplerState::next() {
  const std::uint64_t key = mix64(seed ^ mix64(stream * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
  return mix64(key + 0x9e3779b97f4a7c15ULL * ++counter);
}

double SamplerState::uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

int SymbolWindow::at(std::int64_t k) const {
  if (!covers(k)) throw std::out_of_range("SymbolWindow: index " + std::to_string(k) + " outside window");
  return symbols[static_cast<std::size_t>(k - lo)];
}

SymbolWindow SymbolWindow::shifted(std::int64_t p) const {
  SymbolWindow out = *this;
  out.lo += p;
  out.hi += p;
  return out;
}

void SymbolWindow::write_csv(std::ostream& os) const {
  os << "k,symbol\n";
  for (std::int64_t k = lo; k <= hi; ++k) os << k << ',' << at(k) << '\n';
}

SymbolSampler::SymbolSampler(const SymbolWeights& w) : cdf_(w.size()) {
  double acc = 0.0;
  for (int l = 1; l <= w.size(); ++l) {
    acc += w.mass(l);
    cdf_[l - 1] = acc;
  }
  cdf_.back() = 1.0;
}

int SymbolSampler::draw(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1);
  return static_cast<int>(idx) + 1;
}

SymbolWindow sample_window(const SymbolSampler& sampler, std::int64_t lo, std::int64_t hi, SamplerState& state) {
  if (lo > hi) throw std::invalid_argument("sample_window: need lo <= hi");
  SymbolWindow win;
  win.lo = lo;
  win.hi = hi;
  win.symbols.resize(static_cast<std::size_t>(hi - lo + 1));
  for (auto& s : win.symbols) s = sampler.draw(state.uniform());
  return win;
}

SymbolWindow sample_window(const SymbolWeights& w, std::int64_t lo, std::int64_t hi, SamplerState& state) {
  return sample_window(SymbolSampler(w), lo, hi, state);
}

LpVector phi(const ShiftModel& model, const SymbolWindow& win) {
  if (!(win.lo <= 0 && win.hi >= 0)) throw std::invalid_argument("phi: window does not cover index 0");
  const std::int64_t D = std::min<std::int64_t>(-win.lo, model.depth());
  std::vector<double> z(static_cast<std::size_t>(D + 1));
  for (std::int64_t m = 0; m <= D; ++m) z[m] = model.seed(win.at(-m));
  const double tail = model.seed_bound(model.seed_count()) * model.weight_tail(D + 1);
  return LpVector::from_weighted(std::move(z), model.weight_table(), model.p_exp(), tail);
}

void seed_values(const ShiftModel& model, const SymbolWindow& win, std::int64_t top, std::size_t count,
                 std::vector<double>& z) {
  if (!win.covers(top) || !win.covers(top - static_cast<std::int64_t>(count) + 1))
    throw std::invalid_argument("seed_values: window too short");
  z.resize(count);
  const auto& seeds = model.seeds();
  for (std::size_t t = 0; t < count; ++t) z[t] = seeds[win.symbols[top - static_cast<std::int64_t>(t) - win.lo] - 1];
}

IntertwiningCheck verify_intertwining(const ShiftModel& model, const SymbolWindow& win) {
  const LpVector a = apply_T(model, phi(model, win), 1);
  const LpVector b = phi(model, win.shifted(1));
  IntertwiningCheck out;
  out.residual = distance(a, b);
  const std::int64_t D = std::min<std::int64_t>(-win.lo, model.depth());
  out.tail_bound = model.seed_bound(model.seed_count()) * model.weight_tail(D) + b.tail_bound();
  return out;
}

SupportProbeResult support_probe(const ShiftModel& model, const SymbolWeights& w, const BlockSchedule& schedule,
                                 const LpVector& target, double delta, std::size_t R, SamplerState state) {
  if (!(delta > 0.0)) throw std::invalid_argument("support_probe: delta must be positive");
  if (target.size() > static_cast<std::size_t>(model.depth()) + 1)
    throw std::invalid_argument("support_probe: target deeper than the model truncation");
  const int L = std::min(w.size(), model.seed_count());

  SupportProbeResult out;
  int top = 0;
  for (std::size_t m = 0; m < target.size(); ++m) {
    const double t = target.coord(m) * model.weight(static_cast<int>(m));
    int symbol = 0;
    for (int s = 1; s <= L; ++s) {
      if (std::abs(model.seed(s) - t) <= 1e-12 * std::max(1.0, std::abs(t))) {
        symbol = s;
        break;
      }
    }
    if (symbol == 0)
      throw std::invalid_argument("support_probe: coordinate " + std::to_string(m) +
                                  " is not representable by the seed grid");
    out.target_symbols.push_back(symbol);
    if (t != 0.0) top = static_cast<int>(m);
  }
  out.target_symbols.resize(static_cast<std::size_t>(top) + 1);

  int n = 1;
  while (n <= schedule.levels() && !(schedule.N(n) > top && std::ldexp(1.0, -n) < delta)) ++n;
  if (n > schedule.levels())
    throw std::invalid_argument("support_probe: block schedule too short for this target and delta");
  out.level = n;
  const std::int64_t Nn = schedule.N(n);
  double log_bound = 0.0;
  for (int s : out.target_symbols) log_bound += std::log(w.mass(s));
  log_bound += static_cast<double>(2 * Nn + 1 - static_cast<std::int64_t>(out.target_symbols.size())) *
               std::log(w.mass(1));
  log_bound += schedule.log_beta_product(n);
  out.log_analytic_bound = log_bound;
  out.analytic_bound = std::exp(log_bound);

  const SymbolSampler sampler(w);
  for (std::size_t i = 0; i < R; ++i) {
    const SymbolWindow win = sample_window(sampler, -model.depth(), 0, state);
    if (distance(phi(model, win), target) < delta) ++out.hits;
  }
  out.trials = R;
  out.empirical = R ? static_cast<double>(out.hits) / static_cast<double>(R) : 0.0;
  return out;
}

}  // namespace linmix
