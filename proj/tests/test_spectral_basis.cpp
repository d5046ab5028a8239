#include <doctest.h>

#include <cmath>
#include <sstream>

#include "linmix/bernoulli_model.hpp"
#include "linmix/block_schedule.hpp"
#include "linmix/measure_params.hpp"
#include "linmix/observables.hpp"
#include "linmix/shift_model.hpp"
#include "linmix/spectral_basis.hpp"

using namespace linmix;

namespace {
struct Fixture {
  GrowthChain chain = build_growth_chain(log_growth(), 64);
  ShiftModel model = canonical_shift(2.0, 2.0, 1024, chain);
  SymbolWeights w = build_measure_weights(model, chain, 3, 40);
  TriangularBasis basis{w};
  double var = 0.0;
  Fixture() {
    double m1 = 0.0, m2 = 0.0;
    for (int l = 1; l <= w.size(); ++l) m1 += w.mass(l) * model.seed(l), m2 += w.mass(l) * model.seed(l) * model.seed(l);
    var = m2 - m1 * m1;
  }
};
const Fixture& fx() {
  static const Fixture f;
  return f;
}
}  // namespace

TEST_CASE("geometric weights give e_1 = (1, -1, -1, ...)") {
  const SymbolWeights g = SymbolWeights::geometric(0.5, 12);
  CHECK(g.p(1) == doctest::Approx(0.5));
  const TriangularBasis b(g);
  CHECK(b.value(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  for (int u = 2; u <= 12; ++u) CHECK(b.value(1, u) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("orthonormality by direct summation") {
  const TriangularBasis& b = fx().basis;
  const SymbolWeights& w = fx().w;
  REQUIRE(b.top() == 39);
  double e00 = 0.0;
  for (int u = 1; u <= w.size(); ++u) e00 += w.mass(u);
  CHECK(e00 == doctest::Approx(1.0).epsilon(1e-14));
  for (int l = 1; l <= b.top(); ++l) {
    double mean = 0.0, sq = 0.0;
    for (int u = w.size(); u >= 1; --u) mean += w.mass(u) * b.value(l, u), sq += w.mass(u) * b.value(l, u) * b.value(l, u);
    CHECK(std::abs(mean) <= 1e-14 * std::max(1.0, b.diag(l) * w.mass(l)));
    CHECK(sq == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.l1_norm(l) <= 4.0 * std::sqrt(w.mass(l)));
  }
  CHECK(b.gram_error() < 1e-10);
}

TEST_CASE("delta_0 functional has coefficients only at j = 0") {
  const FourierTable t = fourier_linear(fx().model, fx().basis, {1.0}, -5, 3, fx().basis.top());
  const std::vector<double> A = linear_amplitudes(fx().model, fx().basis, fx().basis.top());
  for (int l = 1; l <= fx().basis.top(); ++l) {
    CHECK(t.value(TensorIndex({l}, {0})) == doctest::Approx(A[l - 1]));
    CHECK(t.value(TensorIndex({l}, {3})) == 0.0);
    CHECK(t.value(TensorIndex({l}, {-2})) == 0.0);
  }
  double parseval = 0.0;
  for (double a : A) parseval += a * a;
  CHECK(std::abs(parseval - fx().var) <= 1e-10);
}

TEST_CASE("exact covariances of linear functionals") {
  const int top = fx().basis.top();
  const FourierTable d0 = fourier_linear(fx().model, fx().basis, {1.0}, -8, 0, top);
  for (int p = 1; p <= 4; ++p) CHECK(covariance_exact(d0, d0, p).value == 0.0);
  CHECK(covariance_exact(d0, d0, 0).value == doctest::Approx(fx().var).epsilon(1e-12));

  const FourierTable two = fourier_linear(fx().model, fx().basis, {1.0, 1.0}, -8, 0, top);
  CHECK(covariance_exact(two, two, 1).value == doctest::Approx(fx().var).epsilon(1e-12));
  CHECK(covariance_exact(two, two, 0).value == doctest::Approx(fx().var * (1.0 + 1.0)).epsilon(1e-12));

  // c = 1 on 0..63: Var * sum_m 1/(W_m W_{m+p}).
  const FourierTable ones = fourier_linear(fx().model, fx().basis, std::vector<double>(64, 1.0), -63, 0, top);
  for (int p : {0, 1, 5, 30}) {
    double s = 0.0;
    for (int m = 0; m + p < 64; ++m) s += 1.0 / (std::pow(std::max(m, 1), 2.0) * std::pow(std::max(m + p, 1), 2.0));
    CHECK(covariance_exact(ones, ones, p).value == doctest::Approx(fx().var * s).epsilon(1e-12));
  }
}

TEST_CASE("Monte Carlo Fourier coefficients") {
  const TriangularBasis& b = fx().basis;
  const ObservableExpr lin = ObservableExpr::linear_ones(8);
  const McEstimate zero2 = fourier_mc(lin, fx().model, b, TensorIndex({1, 1}, {-1, 0}), 40000, SamplerState{21, 0, 0}, -16);
  CHECK(std::abs(zero2.estimate) <= 3.0 * zero2.std_error);
  const McEstimate cst = fourier_mc(ObservableExpr::constant(2.0), fx().model, b, TensorIndex({1}, {0}), 40000,
                                    SamplerState{22, 0, 0}, -4);
  CHECK(std::abs(cst.estimate) <= 3.0 * cst.std_error);
  const std::vector<double> A = linear_amplitudes(fx().model, b, 2);
  const McEstimate a1 = fourier_mc(ObservableExpr::linear({1.0}), fx().model, b, TensorIndex({1}, {0}), 40000,
                                   SamplerState{23, 0, 0}, -4);
  CHECK(std::abs(a1.estimate - A[0]) <= 3.0 * a1.std_error);
}

TEST_CASE("Monte Carlo estimates do not depend on the worker count") {
  const ObservableExpr lin = ObservableExpr::linear_ones(8);
  const TensorIndex idx({1}, {-2});
  const McEstimate a = fourier_mc(lin, fx().model, fx().basis, idx, 5000, SamplerState{5, 0, 0}, -16, 0, 1);
  const McEstimate b = fourier_mc(lin, fx().model, fx().basis, idx, 5000, SamplerState{5, 0, 0}, -16, 0, 3);
  CHECK(a.estimate == b.estimate);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("linear coefficient envelope is stable across truncations") {
  double first = 0.0;
  for (int D : {64, 256, 1024}) {
    const FourierTable t = fourier_linear(fx().model, fx().basis, std::vector<double>(D, 1.0), -(D - 1), 0, fx().basis.top());
    const EnvelopeFit e = envelope_constant(t, fx().w, 2.0);
    if (first == 0.0) first = e.constant;
    CHECK(e.constant == doctest::Approx(first).epsilon(1e-9));
  }
}

TEST_CASE("table csv and translation") {
  const FourierTable t = fourier_linear(fx().model, fx().basis, {1.0, 2.0}, -1, 0, 2);
  const FourierTable s = t.translated(3);
  CHECK(s.value(TensorIndex({1}, {-3})) == t.value(TensorIndex({1}, {0})));
  std::ostringstream os;
  t.write_csv(os);
  CHECK(os.str().rfind("r,l_tuple,j_tuple,value\n", 0) == 0);
}
