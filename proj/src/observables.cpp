#include "linmix/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace linmix {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ObservableExpr ObservableExpr::constant(double c) { return monomials({Monomial{c, {}}}); }

ObservableExpr ObservableExpr::linear(std::vector<double> c) {
  ObservableExpr o;
  o.kind_ = ObservableKind::Linear;
  o.linear_ = std::move(c);
  return o;
}

ObservableExpr ObservableExpr::linear_ones(int depth) {
  if (depth < 1) throw std::invalid_argument("linear_ones: depth must be positive");
  return linear(std::vector<double>(depth, 1.0));
}

ObservableExpr ObservableExpr::monomials(std::vector<Monomial> terms) {
  ObservableExpr o;
  o.kind_ = ObservableKind::MonomialSum;
  for (auto& t : terms) {
    for (int c : t.coords)
      if (c < 0) throw std::invalid_argument("monomial: negative coordinate");
    std::sort(t.coords.begin(), t.coords.end());
  }
  o.terms_ = std::move(terms);
  return o;
}

ObservableExpr ObservableExpr::norm_power(int d) {
  if (d < 1) throw std::invalid_argument("norm_power: d must be positive");
  ObservableExpr o;
  o.kind_ = ObservableKind::NormPower;
  o.power_ = d;
  return o;
}

int ObservableExpr::degree() const {
  switch (kind_) {
    case ObservableKind::Linear:
      return 1;
    case ObservableKind::MonomialSum: {
      int d = 0;
      for (const auto& t : terms_)
        if (t.coef != 0.0) d = std::max(d, static_cast<int>(t.coords.size()));
      return d;
    }
    case ObservableKind::NormPower:
      return -1;
  }
  return -1;
}

int ObservableExpr::support_depth() const {
  switch (kind_) {
    case ObservableKind::Linear:
      return static_cast<int>(linear_.size());
    case ObservableKind::MonomialSum: {
      int d = 0;
      for (const auto& t : terms_)
        if (!t.coords.empty()) d = std::max(d, t.coords.back() + 1);
      return d;
    }
    case ObservableKind::NormPower:
      return -1;
  }
  return -1;
}

ObservableExpr ObservableExpr::with_offset(double mean) const {
  ObservableExpr o = *this;
  o.offset_ = mean;
  o.centered_ = true;
  return o;
}

std::string ObservableExpr::descriptor() const {
  std::string s;
  switch (kind_) {
    case ObservableKind::Linear: {
      bool ones = !linear_.empty();
      for (double c : linear_) ones = ones && c == 1.0;
      if (ones) {
        s = "linones:" + std::to_string(linear_.size());
      } else {
        s = "lin:";
        bool first = true;
        for (std::size_t m = 0; m < linear_.size(); ++m) {
          if (linear_[m] == 0.0) continue;
          if (!first) s += ',';
          s += std::to_string(m) + "=" + fmt(linear_[m]);
          first = false;
        }
      }
      break;
    }
    case ObservableKind::MonomialSum: {
      if (terms_.size() == 1 && terms_[0].coords.empty()) {
        s = "const:" + fmt(terms_[0].coef);
        break;
      }
      s = "mono:";
      for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i) s += ';';
        s += '(';
        for (std::size_t j = 0; j < terms_[i].coords.size(); ++j) {
          if (j) s += ',';
          s += std::to_string(terms_[i].coords[j]);
        }
        s += ")=" + fmt(terms_[i].coef);
      }
      break;
    }
    case ObservableKind::NormPower:
      s = "normp:" + std::to_string(power_);
      break;
  }
  return centered_ ? "c:" + s : s;
}

double ObservableExpr::evaluate(const CoordinateView& y, double p_exp) const {
  double acc = 0.0;
  switch (kind_) {
    case ObservableKind::Linear: {
      const std::size_t n = std::min(linear_.size(), y.count);
      for (std::size_t m = 0; m < n; ++m) acc += linear_[m] * (y.z[m] / y.W[m]);
      break;
    }
    case ObservableKind::MonomialSum:
      for (const auto& t : terms_) {
        double v = t.coef;
        for (int c : t.coords) v *= y[static_cast<std::size_t>(c)];
        acc += v;
      }
      break;
    case ObservableKind::NormPower: {
      double s = 0.0;
      for (std::size_t m = 0; m < y.count; ++m) {
        const double a = std::abs(y[m]);
        s += p_exp == 2.0 ? a * a : std::pow(a, p_exp);
      }
      acc = std::pow(s, power_ / p_exp);
      break;
    }
  }
  return acc - offset_;
}

double evaluate(const ObservableExpr& obs, const LpVector& v) { return obs.evaluate(v.view(), v.p_exp()); }

ObservableExpr combine(double a, const ObservableExpr& f, double b, const ObservableExpr& g) {
  if (f.kind() != g.kind() || f.kind() == ObservableKind::NormPower)
    throw std::invalid_argument("combine: observables must share a polynomial family");
  ObservableExpr out;
  if (f.kind() == ObservableKind::Linear) {
    std::vector<double> c(std::max(f.coefficients().size(), g.coefficients().size()), 0.0);
    for (std::size_t m = 0; m < f.coefficients().size(); ++m) c[m] += a * f.coefficients()[m];
    for (std::size_t m = 0; m < g.coefficients().size(); ++m) c[m] += b * g.coefficients()[m];
    out = ObservableExpr::linear(std::move(c));
  } else {
    std::vector<Monomial> t;
    for (auto m : f.terms()) {
      m.coef *= a;
      t.push_back(m);
    }
    for (auto m : g.terms()) {
      m.coef *= b;
      t.push_back(m);
    }
    out = ObservableExpr::monomials(std::move(t));
  }
  if (f.offset() != 0.0 || g.offset() != 0.0) out = out.with_offset(a * f.offset() + b * g.offset());
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double to_double(const std::string& s, const std::string& ctx) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(trim(s), &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("observable '" + ctx + "': bad number '" + s + "'");
  }
  if (pos != trim(s).size()) throw std::invalid_argument("observable '" + ctx + "': bad number '" + s + "'");
  return v;
}

int to_index(const std::string& s, const std::string& ctx) {
  const double v = to_double(s, ctx);
  if (v < 0 || v != std::floor(v) || v > 1e8)
    throw std::invalid_argument("observable '" + ctx + "': bad coordinate '" + s + "'");
  return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

ObservableSpec parse_observable(const std::string& text) {
  ObservableSpec spec;
  std::string s = trim(text);
  if (s.rfind("c:", 0) == 0) {
    spec.center = true;
    s = s.substr(2);
  }
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("observable '" + text + "': missing kind prefix");
  const std::string kind = s.substr(0, colon);
  const std::string body = s.substr(colon + 1);
  if (kind == "lin") {
    std::map<int, double> entries;
    for (const auto& part : split(body, ',')) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("observable '" + text + "': expected m=value");
      entries[to_index(part.substr(0, eq), text)] += to_double(part.substr(eq + 1), text);
    }
    if (entries.empty()) throw std::invalid_argument("observable '" + text + "': no coefficients");
    std::vector<double> c(entries.rbegin()->first + 1, 0.0);
    for (const auto& [m, v] : entries) c[m] = v;
    spec.expr = ObservableExpr::linear(std::move(c));
  } else if (kind == "linones") {
    spec.expr = ObservableExpr::linear_ones(to_index(body, text));
  } else if (kind == "mono") {
    std::vector<Monomial> terms;
    for (const auto& part : split(body, ';')) {
      const auto open = part.find('(');
      const auto close = part.find(')');
      const auto eq = part.find('=', close == std::string::npos ? 0 : close);
      if (open == std::string::npos || close == std::string::npos || eq == std::string::npos || close < open)
        throw std::invalid_argument("observable '" + text + "': expected (i,j,...)=value");
      Monomial m;
      const std::string inner = trim(part.substr(open + 1, close - open - 1));
      if (!inner.empty())
        for (const auto& c : split(inner, ',')) m.coords.push_back(to_index(c, text));
      m.coef = to_double(part.substr(eq + 1), text);
      terms.push_back(std::move(m));
    }
    spec.expr = ObservableExpr::monomials(std::move(terms));
  } else if (kind == "normp") {
    spec.expr = ObservableExpr::norm_power(to_index(body, text));
  } else if (kind == "const") {
    spec.expr = ObservableExpr::constant(to_double(body, text));
  } else {
    throw std::invalid_argument("observable '" + text + "': unknown kind '" + kind + "'");
  }
  return spec;
}

double seed_moment(const ShiftModel& model, const SymbolWeights& w, int k) {
  if (w.size() > model.seed_count()) throw std::invalid_argument("seed_moment: more symbols than seeds");
  double acc = 0.0;
  for (int l = w.size(); l >= 1; --l) acc += w.mass(l) * std::pow(model.seed(l), k);
  return acc;
}

double exact_mean(const ObservableExpr& obs, const ShiftModel& model, const SymbolWeights& w) {
  const double m1 = seed_moment(model, w, 1);
  switch (obs.kind()) {
    case ObservableKind::Linear: {
      if (obs.support_depth() > model.depth() + 1) throw std::invalid_argument("exact_mean: observable deeper than model");
      double acc = 0.0;
      for (std::size_t m = 0; m < obs.coefficients().size(); ++m)
        acc += obs.coefficients()[m] * m1 / model.weight(static_cast<int>(m));
      return acc;
    }
    case ObservableKind::MonomialSum: {
      if (obs.support_depth() > model.depth() + 1) throw std::invalid_argument("exact_mean: observable deeper than model");
      double acc = 0.0;
      for (const auto& t : obs.terms()) {
        std::map<int, int> mult;
        for (int c : t.coords) ++mult[c];
        double v = t.coef;
        for (const auto& [c, k] : mult) v *= seed_moment(model, w, k) / std::pow(model.weight(c), k);
        acc += v;
      }
      return acc;
    }
    case ObservableKind::NormPower:
      throw std::invalid_argument("exact_mean: no closed form for norm powers");
  }
  return 0.0;
}

ObservableExpr centered(const ObservableExpr& obs, const ShiftModel& model, const SymbolWeights& w) {
  ObservableExpr base = obs.with_offset(0.0);
  return obs.with_offset(exact_mean(base, model, w));
}

EOmegaCertificate e_omega_norm(const ObservableExpr& obs, const GrowthChain& chain, double p_exp) {
  EOmegaCertificate cert;
  if (obs.kind() == ObservableKind::NormPower)
    throw std::invalid_argument("e_omega_norm: norm powers are not entire functions of finite type here");
  if (obs.kind() == ObservableKind::Linear) {
    double dual = 0.0;
    if (p_exp == 1.0) {
      for (double c : obs.coefficients()) dual = std::max(dual, std::abs(c));
    } else {
      const double q = p_exp / (p_exp - 1.0);
      for (double c : obs.coefficients()) dual += std::pow(std::abs(c), q);
      dual = std::pow(dual, 1.0 / q);
    }
    cert.u = {std::abs(obs.offset()), dual};
  } else {
    const int deg = obs.degree();
    cert.u.assign(deg + 1, 0.0);
    double value_at_zero = -obs.offset();
    for (const auto& t : obs.terms()) {
      if (t.coords.empty())
        value_at_zero += t.coef;
      else
        cert.u[t.coords.size()] += std::abs(t.coef);
    }
    cert.u[0] = std::abs(value_at_zero);
    double fact = 1.0;
    for (int k = 1; k <= deg; ++k) {
      fact *= k;
      cert.u[k] *= fact;
    }
  }
  for (std::size_t k = 0; k < cert.u.size(); ++k) {
    const double w = k == 0 ? 1.0 : std::pow(chain.omega(static_cast<int>(k)), static_cast<double>(k));
    const double v = cert.u[k] * w;
    if (v > cert.value) {
      cert.value = v;
      cert.argmax = static_cast<int>(k);
    }
  }
  return cert;
}

CompositionBound analytic_composition_bound(int d, double B, double A, double tau, double sigma, int K) {
  if (d < 1) throw std::invalid_argument("analytic_composition_bound: degree must be >= 1");
  if (!(sigma > d)) throw std::invalid_argument("analytic_composition_bound: need sigma > deg(P)");
  if (!(A > 0 && tau > 0 && B > 0)) throw std::invalid_argument("analytic_composition_bound: A, tau, B must be positive");
  if (K < 1) throw std::invalid_argument("analytic_composition_bound: K must be positive");
  const double bt = std::max(B * tau, 1.0);
  const double lbt = std::log(bt);
  CompositionBound out;
  out.halving_from = 0;
  for (int k = 1; k <= K; ++k) {
    const int base = k / d;
    // sum_{j0 >= 0} bt^{j0} / ((base + j0)!)^sigma in log form
    double lsum = -std::numeric_limits<double>::infinity();
    double prev = lsum;
    for (int j0 = 0; j0 < 100000; ++j0) {
      const double t = j0 * lbt - sigma * std::lgamma(base + j0 + 1.0);
      lsum = std::max(lsum, t) + std::log1p(std::exp(-std::abs(lsum - t)));
      if (t < prev && t < lsum - 40.0) break;
      prev = t;
    }
    if (out.halving_from == 0 && std::pow(base + 1.0, sigma) >= 2.0 * bt) out.halving_from = k;
    const double log_beta = std::log(A) + d * std::log(static_cast<double>(k)) + k * lbt + lsum +
                            std::lgamma(k + 1.0) + k * std::log(std::log(k + 2.718281828459045));
    out.beta.push_back(std::exp(log_beta));
  }
  for (int k = 1; k <= K; ++k) {
    if (out.beta[k - 1] > out.sup) {
      out.sup = out.beta[k - 1];
      out.argmax = k;
    }
  }
  out.decreasing_from = K;
  while (out.decreasing_from > 1 && out.beta[out.decreasing_from - 2] >= out.beta[out.decreasing_from - 1])
    --out.decreasing_from;
  return out;
}

}  // namespace linmix
