#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "linmix/bernoulli_model.hpp"
#include "linmix/measure_params.hpp"
#include "linmix/observables.hpp"
#include "linmix/shift_model.hpp"

namespace linmix {

/**
 * Orthonormal basis e_0 = 1, e_1, ..., e_{L-1} of l^2 over the folded symbol masses, with e_l
 * vanishing below l and constant above l.
 */
class TriangularBasis {
 public:
  explicit TriangularBasis(const SymbolWeights& w);

  const SymbolWeights& weights() const { return w_; }
  /** Highest index l with a usable e_l. */
  int top() const { return static_cast<int>(diag_.size()); }
  double diag(int l) const;
  double above(int l) const;
  /** e_l(u) for symbols u in [1, L]. */
  double value(int l, int u) const;
  double inner(int l, int k) const;
  /** sum_u p_u |e_l(u)|. */
  double l1_norm(int l) const;
  /** Largest |<e_l, e_k> - delta_lk| over 0 <= l, k <= top(). */
  double gram_error() const;
  const std::string& warning() const { return warning_; }

 private:
  SymbolWeights w_;
  std::vector<double> diag_, above_;
  std::string warning_;
};

TriangularBasis build_basis(const SymbolWeights& w);

/** (l_1..l_r; j_1 < ... < j_r). */
struct TensorIndex {
  std::vector<int> l;
  std::vector<std::int64_t> j;

  TensorIndex() = default;
  TensorIndex(std::vector<int> l_, std::vector<std::int64_t> j_);
  int rank() const { return static_cast<int>(l.size()); }
  TensorIndex translated(std::int64_t p) const;
  bool operator<(const TensorIndex& o) const { return std::tie(j, l) < std::tie(o.j, o.l); }
  bool operator==(const TensorIndex& o) const { return j == o.j && l == o.l; }
};

/**
 * Coefficients a_{l,j} of an observable. Linear observables are stored in factorized form
 * a_{l,j} = A_l g_j; everything else is a sparse map.
 */
class FourierTable {
 public:
  static FourierTable factorized(std::vector<double> amplitudes, std::int64_t j_lo, std::vector<double> profile,
                                 std::string descriptor, double remainder);
  static FourierTable sparse(std::map<TensorIndex, double> entries, std::string descriptor, double remainder);

  bool is_factorized() const { return factorized_; }
  double value(const TensorIndex& idx) const;
  const std::vector<double>& amplitudes() const { return amplitudes_; }
  const std::vector<double>& profile() const { return profile_; }
  std::int64_t j_lo() const { return j_lo_; }
  std::int64_t j_hi() const { return j_lo_ + static_cast<std::int64_t>(profile_.size()) - 1; }
  double profile_at(std::int64_t j) const;
  int r_max() const { return factorized_ ? 1 : r_max_; }
  int l_max() const { return factorized_ ? static_cast<int>(amplitudes_.size()) : l_max_; }
  /** l^2 norm bound of the coefficients left out of the table. */
  double remainder() const { return remainder_; }
  /** l^2 norm of the stored coefficients. */
  double norm() const;
  const std::string& descriptor() const { return descriptor_; }
  std::map<TensorIndex, double> entries() const;
  /** Coefficients of F o sigma^p: every j moves to j - p. */
  FourierTable translated(std::int64_t p) const;

  void write_csv(std::ostream& os) const;

 private:
  bool factorized_ = false;
  std::vector<double> amplitudes_;
  std::int64_t j_lo_ = 0;
  std::vector<double> profile_;
  std::map<TensorIndex, double> entries_;
  int r_max_ = 0, l_max_ = 0;
  double remainder_ = 0.0;
  std::string descriptor_;
};

/** A_l = sum_{m >= l} p_m e_l(m) alpha_m. */
std::vector<double> linear_amplitudes(const ShiftModel& model, const TriangularBasis& basis, int l_max);

/**
 * Closed-form table of y -> sum_m c_m y_m over j in [j_lo, j_hi]: a_{l,j} = A_l c_{-j}/W_{-j} for j <= 0.
 * Pass lag p to tabulate F o sigma^p directly instead.
 */
FourierTable fourier_linear(const ShiftModel& model, const TriangularBasis& basis, const std::vector<double>& c,
                            std::int64_t j_lo, std::int64_t j_hi, int l_max, std::int64_t lag = 0);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/** Monte Carlo <e_{l,j}, F> on windows [window_lo, window_hi]. */
McEstimate fourier_mc(const ObservableExpr& obs, const ShiftModel& model, const TriangularBasis& basis,
                      const TensorIndex& index, std::size_t R, SamplerState state, std::int64_t window_lo,
                      std::int64_t window_hi = 0, unsigned workers = 0);

struct CovarianceValue {
  double value = 0.0;
  double remainder = 0.0;
};

/** sum a_{l,j} b_{l,j-p}, with a Cauchy-Schwarz bound from the table remainders. */
CovarianceValue covariance_exact(const FourierTable& F, const FourierTable& G, std::int64_t p);

struct EnvelopeFit {
  double constant = 0.0;
  TensorIndex worst;
};
/** Smallest C with |a_{l,j}| <= C sqrt(p_{l_1} ... p_{l_r}) prod (1 + |j_i|)^{-alpha}. */
EnvelopeFit envelope_constant(const FourierTable& table, const SymbolWeights& w, double alpha);

}  // namespace linmix
