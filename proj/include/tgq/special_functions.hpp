#pragma once

#include <array>
#include <complex>

#include "tgq/summation.hpp"

namespace tgq {

// n!! with (-1)!! = 0!! = 1. Exact as an integer while representable in a
// double (n <= 33 for odd chains stays below 2^53); overflows to inf past
// n ~ 300 -- use log_double_factorial there.
double double_factorial(int n);

// ln(n!!), valid for all n >= -1.
double log_double_factorial(int n);

// ln(n!)
double log_factorial(int n);

// Physicist's Hermite polynomial H_n(x) by the three-term recurrence.
double hermite(int n, double x);

struct ErfEval {
  Complex value;
  bool accuracy_degraded = false;  // |w| > 8: outside the validated range
};

// Error function of a complex argument, erf(w) = (2/sqrt(pi)) int_0^w e^{-s^2} ds.
// Relative error <= 1e-12 for |w| <= 8; odd symmetry and conjugate symmetry
// hold exactly. Maclaurin series for |w| <= 3, continued fraction of the
// scaled complementary function for Re w >= 0.5, and an imaginary-axis split
// (erfi series plus a short quadrature) in between.
ErfEval erf_complex_eval(Complex w);
Complex erf_complex(Complex w);

struct Hyp3F2Result {
  Complex value;
  SeriesStats stats;
};

// 3F2(a1,a2,a3; b1,b2; x) by direct summation with stall-window stopping.
// No b parameter may be a nonpositive integer.
Hyp3F2Result hyp3f2_series(const std::array<double, 3>& a, const std::array<double, 2>& b,
                           Complex x, const SummationControl& ctrl);

// 3F2 on the unit circle with argument exp(-2it). Throws GuardZoneError when
// t is within kGuardDelta of a multiple of pi (term decay ~ n^{-3/2} with a
// non-rotating phase stalls there).
Hyp3F2Result hyp3f2_unit(const std::array<double, 3>& a, const std::array<double, 2>& b,
                         double t, const SummationControl& ctrl);

// Mehler kernel (1-u^2)^{-1/2} exp[(2xyu - (x^2+y^2)u^2)/(1-u^2)], principal
// square root. Certified strictly inside the unit disk; |u| >= 1 throws.
Complex mehler_kernel(double x, double y, Complex u);

}  // namespace tgq
