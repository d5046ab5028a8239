#include "linmix/halfplane.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "linmix/numerics.hpp"

namespace linmix {

DecayedFunction::DecayedFunction(std::function<double(double)> f, std::vector<double> centers)
    : f_(std::move(f)), centers_(std::move(centers)) {}

DecayedFunction decayed_profile(int p, double theta) {
  if (p < 1) throw std::invalid_argument("decayed_profile: p must be positive");
  return DecayedFunction([p, theta](double x) { return theta * std::pow(1.0 + x * x, -p); }, {0.0});
}

DecayedFunction constant_function(double c) {
  return DecayedFunction([c](double) { return c; }, {});
}

DecayedFunction translate(const DecayedFunction& F, double k) {
  if (k == 0.0) return F;
  std::vector<double> centers = F.centers();
  for (double& c : centers) c -= k;
  return DecayedFunction([F, k](double x) { return F(x + k); }, std::move(centers));
}

DecayedFunction sum(const std::vector<DecayedFunction>& parts) {
  std::vector<double> centers;
  for (const auto& p : parts) centers.insert(centers.end(), p.centers().begin(), p.centers().end());
  return DecayedFunction(
      [parts](double x) {
        double acc = 0.0;
        for (const auto& p : parts) acc += p(x);
        return acc;
      },
      std::move(centers));
}

namespace {

struct Panel {
  double a, b, value, error;
  int depth;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class G>
Panel gk_panel(const G& g, double a, double b, int depth) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(g, a, b, 0, 0.0, &err);
  // With no refinement the library reports the error of the panel mapped to [-1, 1].
  return {a, b, v, err * 0.5 * (b - a), depth};
}

}  // namespace

NormEstimate h2_norm(const DecayedFunction& F, const QuadratureConfig& q) {
  if (!(q.tolerance > 0.0)) throw std::invalid_argument("h2_norm: tolerance must be positive");
  const double half_pi = std::numbers::pi / 2.0;
  auto g = [&F](double th) {
    const double v = F(std::tan(th));
    return v * v;
  };
  std::vector<double> cuts = {-half_pi, half_pi};
  auto add_cut = [&](double t) {
    const double th = std::atan(t);
    if (th > -half_pi && th < half_pi) cuts.push_back(th);
  };
  for (double c : F.centers())
    for (double d : {0.0, -1.0, 1.0}) add_cut(c + d);
  for (double s : q.split_points) add_cut(s);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel> heap;
  double total = 0.0, total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    Panel p = gk_panel(g, cuts[i], cuts[i + 1], 0);
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }
  std::size_t iterations = 0;
  while (total_err > q.tolerance && !heap.empty()) {
    Panel worst = heap.top();
    if (worst.depth >= q.max_depth || ++iterations > 200000) break;
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = gk_panel(g, worst.a, mid, worst.depth + 1);
    Panel right = gk_panel(g, mid, worst.b, worst.depth + 1);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum from the panels to shed the drift of incremental updates.
  total = 0.0;
  total_err = 0.0;
  std::vector<Panel> panels;
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const auto& p : panels) {
    total += p.value;
    total_err += p.error;
  }
  NormEstimate out;
  out.squared = total / std::numbers::pi;
  out.squared_error = total_err / std::numbers::pi;
  out.norm = std::sqrt(std::max(out.squared, 0.0));
  out.error = out.norm > 0.0 ? out.squared_error / (2.0 * out.norm) : std::sqrt(out.squared_error);
  if (total_err > q.tolerance)
    throw NumericError("h2_norm: adaptive refinement did not converge; last estimate " + std::to_string(out.norm) +
                       " with error " + std::to_string(out.error));
  return out;
}

double guaranteed_decay_exponent(int p) { return 2.0 * p / (2.0 * p + 1.0); }

DecayFitResult translation_decay_fit(int p, const std::vector<std::int64_t>& k_grid, const QuadratureConfig& q) {
  if (p < 4) throw std::invalid_argument("translation_decay_fit: p must be >= 4");
  if (k_grid.size() < 2) throw std::invalid_argument("translation_decay_fit: need at least two grid points");
  DecayFitResult out;
  out.guaranteed = guaranteed_decay_exponent(p);
  const DecayedFunction Q = decayed_profile(p);
  for (std::int64_t k : k_grid) {
    if (k < 1) throw std::invalid_argument("translation_decay_fit: k must be >= 1");
    try {
      const NormEstimate e = h2_norm(translate(Q, static_cast<double>(k)), q);
      out.k.push_back(k);
      out.norms.push_back(e.norm);
      out.errors.push_back(e.error);
    } catch (const NumericError& err) {
      out.warnings.push_back("grid truncated at k = " + std::to_string(k) + ": " + err.what());
      break;
    }
  }
  if (out.k.size() < 2) throw NumericError("translation_decay_fit: fewer than two grid points survived");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < out.k.size(); ++i) {
    x.push_back(std::log(static_cast<double>(out.k[i])));
    y.push_back(std::log(out.norms[i]));
  }
  out.exponent = -fit_line(x, y).slope;
  for (std::size_t i = 0; i < out.k.size(); ++i)
    out.constants.push_back(out.norms[i] * std::pow(static_cast<double>(out.k[i]), out.exponent));
  return out;
}

EnvelopeCheck envelope_sum_check(int p, const std::vector<double>& theta, int k_max, const QuadratureConfig& q) {
  if (p < 4) throw std::invalid_argument("envelope_sum_check: p must be >= 4");
  if (k_max < 1 || static_cast<int>(theta.size()) < k_max)
    throw std::invalid_argument("envelope_sum_check: need theta_1..theta_kmax");
  std::vector<DecayedFunction> parts;
  EnvelopeCheck out;
  for (int k = 1; k <= k_max; ++k) {
    parts.push_back(translate(decayed_profile(p, theta[k - 1]), static_cast<double>(k)));
    out.rhs += theta[k - 1] * theta[k - 1] * std::pow(static_cast<double>(k), -1.5);
  }
  const NormEstimate e = h2_norm(sum(parts), q);
  out.lhs = e.norm;
  out.lhs_error = e.error;
  out.ratio = out.lhs / out.rhs;
  return out;
}

bool comparable(std::int64_t k, std::int64_t j) {
  const double rk = std::pow(static_cast<double>(k), 0.25), rj = std::pow(static_cast<double>(j), 0.25);
  return std::abs(static_cast<double>(k - j)) <= rk + rj;
}

int comparable_count(std::int64_t k, std::int64_t j_max, bool include_self) {
  int n = 0;
  for (std::int64_t j = 1; j <= j_max; ++j)
    if ((include_self || j != k) && comparable(k, j)) ++n;
  return n;
}

double comparability_constant(std::int64_t n, std::int64_t min_index) {
  double c = 1.0;
  for (std::int64_t k = min_index; k <= n; ++k)
    for (std::int64_t j = min_index; j <= n; ++j)
      if (comparable(k, j)) c = std::max(c, static_cast<double>(std::max(j, k)) / static_cast<double>(std::min(j, k)));
  return c;
}

}  // namespace linmix
