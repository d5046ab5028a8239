#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "linmix/block_schedule.hpp"
#include "linmix/measure_params.hpp"
#include "linmix/shift_model.hpp"

using namespace linmix;

namespace {

// Pair check written out directly from the tables.
int pair_failures(const GrowthChain& c) {
  int bad = 0;
  for (int k = 1; k < c.k_max(); ++k)
    for (int kk = 1; k + kk <= c.k_max(); ++kk) {
      const double lhs = (k + kk) * std::log(c.omega0(k + kk));
      const double rhs = k * std::log(c.omega1(k)) + kk * std::log(c.omega1(kk));
      if (lhs > rhs + 1e-12) ++bad;
    }
  return bad;
}

}  // namespace

TEST_CASE("growth chain for log(k + e)") {
  const GrowthChain c = build_growth_chain(log_growth(), 64);
  CHECK(c.omega0(2) == doctest::Approx(std::sqrt(c.omega1(1))).epsilon(1e-15));
  CHECK(c.omega1(1) == doctest::Approx(std::pow(std::log(1.0 + std::exp(1.0)), 0.25)));
  CHECK(c.omega0_failures() == 0);
  CHECK(pair_failures(c) == 0);
  CHECK(c.doubling_holds());
  CHECK(c.omega0_range() == 128);
}

TEST_CASE("affine growth 1 + k passes the pair check") {
  const GrowthChain c = build_growth_chain(affine_growth(1.0, 1.0), 32);
  CHECK(c.omega0_failures() == 0);
  CHECK(pair_failures(c) == 0);
}

TEST_CASE("bounded growth is rejected") {
  CHECK_THROWS_AS(build_growth_chain(affine_growth(2.0, 0.0), 16), std::invalid_argument);
  CHECK_THROWS_AS(build_growth_chain(affine_growth(0.5, 0.0), 16), std::invalid_argument);
}

TEST_CASE("symbol weights from the log chain") {
  const GrowthChain c = build_growth_chain(log_growth(), 64);
  const SymbolWeights w = build_symbol_weights(c, 3, 40);
  REQUIRE(w.size() == 40);
  double total = w.remainder();
  for (int l = 1; l <= 40; ++l) total += w.p(l);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  for (int l = 1; l < 40; ++l) {
    CHECK(w.p(l + 1) < w.p(l));
    CHECK(w.p(l + 1) / w.p(l) <= 0.25);
    // Tail by direct summation of the stored masses.
    double tail = w.remainder();
    for (int m = 40; m > l; --m) tail += w.p(m);
    CHECK(tail <= 0.5 * w.p(l));
    CHECK(w.tail(l + 1) == doctest::Approx(tail).epsilon(1e-12));
  }
  for (int d = 1; d <= 3; ++d)
    for (int l = 2 * d; l <= 40; ++l) CHECK(2.0 * d * std::log(c.omega0(l)) <= -0.5 * w.log_p(l) + 1e-12);
}

TEST_CASE("too few symbols is an error") {
  const GrowthChain c = build_growth_chain(log_growth(), 64);
  CHECK_THROWS_AS(build_symbol_weights(c, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_symbol_weights(c, 3, 5), std::invalid_argument);
}

TEST_CASE("conditions on the built weights") {
  const GrowthChain c = build_growth_chain(log_growth(), 64);
  const SymbolWeights w = build_symbol_weights(c, 3, 40);
  const ConditionReport r = check_weight_conditions(w, c, 20);
  CHECK(r.tail_ratio.constant <= 0.5);
  REQUIRE(r.sqrt_moment);
  REQUIRE(r.moment);
  CHECK(std::isfinite(r.sqrt_moment->constant));
  CHECK(r.sqrt_moment->constant <= 4.0);
  CHECK(r.moment->constant <= 4.0);
}

TEST_CASE("geometric weights against omega_0(k) = k fail the moment condition") {
  std::vector<double> om, om1, om0;
  for (int k = 1; k <= 40; ++k) om.push_back(k + 1.0), om1.push_back(k + 1.0);
  for (int k = 1; k <= 80; ++k) om0.push_back(k);
  const GrowthChain c = GrowthChain::from_tables(om, om1, om0);
  const SymbolWeights w = SymbolWeights::geometric(0.5, 40);
  const ConditionReport r = check_weight_conditions(w, c, 20);
  REQUIRE(r.sqrt_moment);
  CHECK(r.sqrt_moment->growing_in_k);
  CHECK_FALSE(r.sqrt_moment->holds);
  CHECK_FALSE(r.all_hold());
}

TEST_CASE("k_max = 0 leaves only the tail ratio") {
  const GrowthChain c = build_growth_chain(log_growth(), 64);
  const ConditionReport r = check_weight_conditions(build_symbol_weights(c, 3, 40), c, 0);
  CHECK_FALSE(r.sqrt_moment);
  CHECK_FALSE(r.moment);
  CHECK(r.tail_ratio.holds);
}

TEST_CASE("block schedule for W_m = m^2") {
  const GrowthChain c = build_growth_chain(log_growth(), 64);
  const ShiftModel model = canonical_shift(2.0, 2.0, 256, c);
  const SymbolWeights w = build_symbol_weights(c, 3, 40);
  const BlockSchedule s = build_block_schedule(model, w, c, 12);
  REQUIRE(s.levels() == 12);
  CHECK(s.gaps_convex());
  // Independent tail: direct sum over k <= 10^6 of the running envelope max plus an integral bound.
  auto tail = [&](std::int64_t N) {
    double env = 0.0, top = 0.0, acc = 0.0;
    for (int m = 1; m <= 40; ++m) top = std::max(top, std::sqrt(c.omega0(m)));
    for (std::int64_t k = 1; k <= 1000000; ++k) {
      if (k <= 40) env = std::max(env, std::sqrt(c.omega0(static_cast<int>(k))));
      if (k > N) acc += env / (static_cast<double>(k) * k);
    }
    return acc + top / 1e6;
  };
  for (int n = 1; n <= 12; ++n) {
    CHECK(tail(s.N(n)) <= std::ldexp(1.0, -n) * (1 + 1e-9));
    const std::int64_t m = s.minimal()[n - 1];
    if (m > 1) CHECK(tail(m - 1) > std::ldexp(1.0, -n) * (1 - 1e-9));
  }
}

TEST_CASE("harmonic envelope has no schedule") {
  const GrowthChain c = build_growth_chain(log_growth(), 64);
  const ShiftModel model = canonical_shift(1.0, 2.0, 64, c);
  const SymbolWeights w = build_symbol_weights(c, 3, 40);
  CHECK_THROWS_AS(build_block_schedule(model, w, c, 4), std::invalid_argument);
  CHECK(build_block_schedule(model, w, c, 0).levels() == 0);
}

TEST_CASE("measure weights make level-weighted sums halve") {
  const GrowthChain c = build_growth_chain(log_growth(), 64);
  const ShiftModel model = canonical_shift(2.0, 2.0, 256, c);
  const SymbolWeights w = build_measure_weights(model, c, 3, 40);
  const std::vector<std::int64_t> N = block_levels(model, c, 40, 41);
  for (int l = 7; l <= 40; ++l) {
    const double prev = (N[l - 1] - N[l - 2]) * std::exp(w.log_p(l - 1) / 12.0);
    const double cur = (N[l] - N[l - 1]) * std::exp(w.log_p(l) / 12.0);
    CHECK(cur <= 0.5 * prev * (1 + 1e-9));
  }
  const BlockSchedule s = build_block_schedule(model, w, c, 41);
  const ConditionReport r = check_weight_conditions(w, c, 20, &s, 3);
  REQUIRE(r.polynomial.size() == 3);
  for (const auto& pc : r.polynomial) CHECK(pc.holds);
  CHECK(r.all_hold());
}
