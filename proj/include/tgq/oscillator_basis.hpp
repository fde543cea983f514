#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "tgq/summation.hpp"

namespace tgq {

enum class QuenchDirection { forward, reverse };

// Relative-coordinate eigenstates in harmonic oscillator units (m = hbar =
// omega = 1). psi_n are the noninteracting states b_n H_n(z) e^{-z^2/2} with
// E_n = n + 1/2; the Tonks-Girardeau states are phi_{2n}(z) = psi_{2n+1}(|z|)
// (symmetrized branch) and phi_{2n+1}(z) = psi_{2n+1}(z), doubly degenerate
// with eps_{2n} = eps_{2n+1} = E_{2n+1}. The CM states chi_n reuse psi_eval.

double psi_energy(int n);            // n + 1/2
double phi_energy(int n);            // 2*floor(n/2) + 3/2
double log_psi_normalization(int n); // ln b_n

// psi_n(z) via the normalized three-term recurrence (stable to n ~ 1e4; never
// forms raw Hermite values).
double psi_eval(int n, double z);
double phi_eval(int n, double z);

// Fills out[0..n_max] with psi_k(z) for k = 0..n_max in one recurrence pass.
void psi_eval_upto(int n_max, double z, std::span<double> out);

// Closed-form overlap c_mn = <phi_2n|psi_2m>, evaluated in signed log space
// (valid to m, n ~ 1e4). The denominator 2n+1-2m is odd, never zero.
double overlap_cmn(int m, int n);

// Raw half-line integral I_mn = (-2)^{m+n} (2m-1)!! (2n+1)!! / (2n+1-2m).
// Signed log representation; value() overflows to +-inf past m+n ~ 280.
struct SignedLogValue {
  double log_abs;
  int sign;  // -1, 0, +1
  double value() const;
};
SignedLogValue raw_integral_Imn(int m, int n);

// Streaming access to a coefficient sequence at fixed initial index m:
// forward: n -> c_{mn} (row of the overlap matrix), reverse: n -> c_{nm}.
// Used by the series evaluators; start value in log space, then exact ratios.
class CoefficientStream {
 public:
  CoefficientStream(int m, QuenchDirection dir);
  double current() const { return value_; }
  void advance();  // n -> n+1

 private:
  int m_, n_ = 0;
  QuenchDirection dir_;
  double value_;
};

// Immutable table of overlap coefficients. direction tags how entry(m, n) is
// read: forward = <phi_2n|psi_2m> = c_mn, reverse = <phi_2m|psi_2n> = c_nm.
class OverlapTable {
 public:
  OverlapTable(int m_count, int n_count, QuenchDirection direction);
  double at(int m, int n) const;
  int m_count() const { return m_count_; }
  int n_count() const { return n_count_; }
  QuenchDirection direction() const { return direction_; }
  double row_square_sum(int m) const;
  void write_csv(std::ostream& os) const;  // header: m,n,c_mn

 private:
  int m_count_, n_count_;
  QuenchDirection direction_;
  std::vector<double> entries_;
};

// Least-squares slope of log(y) against log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

// Fitted decay exponent of c^2 over n in [n_lo, n_hi]; -3/2 forward, -5/2
// reverse asymptotically. Range must lie in [50, 1e4] with >= 100 points.
double coefficient_decay_exponent(int m, QuenchDirection dir, int n_lo, int n_hi);

// Partial sums of the post-quench energy expectation, Sum_{n<=N} c^2 * E.
// Diverges ~ sqrt(N) forward, converges reverse.
double energy_partial_sum(int m, QuenchDirection dir, int n_max);

}  // namespace tgq
