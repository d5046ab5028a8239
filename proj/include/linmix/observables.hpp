#pragma once

#include <string>
#include <vector>

#include "linmix/measure_params.hpp"
#include "linmix/shift_model.hpp"

namespace linmix {

enum class ObservableKind { Linear, MonomialSum, NormPower };

/** c * prod y_m over a multiset of coordinates (sorted). An empty multiset is a constant. */
struct Monomial {
  double coef = 0.0;
  std::vector<int> coords;
};

/**
 * Linear functionals, finite polynomials in coordinates, and ||y||^d. An offset is subtracted on
 * evaluation; centering sets it to the exact mean under the model's measure.
 */
class ObservableExpr {
 public:
  static ObservableExpr constant(double c);
  static ObservableExpr linear(std::vector<double> c);
  /** c_m = 1 for m < depth. */
  static ObservableExpr linear_ones(int depth);
  static ObservableExpr monomials(std::vector<Monomial> terms);
  static ObservableExpr norm_power(int d);

  ObservableKind kind() const { return kind_; }
  /** Polynomial degree; -1 for norm powers. */
  int degree() const;
  /** Number of leading coordinates the observable reads; 0 for constants, -1 for norm powers. */
  int support_depth() const;
  double offset() const { return offset_; }
  bool centered() const { return centered_; }
  ObservableExpr with_offset(double mean) const;

  const std::vector<double>& coefficients() const { return linear_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  int power() const { return power_; }
  /** Compact text form accepted by parse_observable. */
  std::string descriptor() const;

  double evaluate(const CoordinateView& y, double p_exp) const;

 private:
  ObservableKind kind_ = ObservableKind::Linear;
  std::vector<double> linear_;
  std::vector<Monomial> terms_;
  int power_ = 0;
  double offset_ = 0.0;
  bool centered_ = false;
};

double evaluate(const ObservableExpr& obs, const LpVector& v);

/** a f + b g for observables of the same polynomial family (linear or monomial sums). */
ObservableExpr combine(double a, const ObservableExpr& f, double b, const ObservableExpr& g);

/**
 * Descriptors: "lin:0=1,1=0.5", "linones:256", "mono:(0,1)=1;(2)=0.5;()=3", "normp:2", "const:1".
 * A leading "c:" asks for exact centering by the caller.
 */
struct ObservableSpec {
  ObservableExpr expr;
  bool center = false;
};
ObservableSpec parse_observable(const std::string& text);

/** E[f(phi(n))] under the product measure, for linear and monomial observables. */
double exact_mean(const ObservableExpr& obs, const ShiftModel& model, const SymbolWeights& w);
ObservableExpr centered(const ObservableExpr& obs, const ShiftModel& model, const SymbolWeights& w);

/** E[alpha^k] for the symbol distribution. */
double seed_moment(const ShiftModel& model, const SymbolWeights& w, int k);

struct EOmegaCertificate {
  std::vector<double> u;  // u_kappa >= ||D^kappa f(0)||, kappa = 0..degree
  double value = 0.0;     // max_kappa u_kappa omega(kappa)^kappa
  int argmax = 0;
};

/** Coefficient l1 bounds times kappa!; linear parts use the dual l^q norm, which is exact. */
EOmegaCertificate e_omega_norm(const ObservableExpr& obs, const GrowthChain& chain, double p_exp = 2.0);

struct CompositionBound {
  std::vector<double> beta;  // beta_k for k = 1..K
  double sup = 0.0;
  int argmax = 0;
  int decreasing_from = 0;  // beta nonincreasing on [decreasing_from, K]
  int halving_from = 0;     // first k where the j_0 series is dominated by a ratio-1/2 geometric series
};

/** Bound on ||Q_k|| k! omega(k)^k, omega(k) = log(k + e), for phi o P with deg P = d. */
CompositionBound analytic_composition_bound(int d, double B, double A, double tau, double sigma, int K);

}  // namespace linmix
