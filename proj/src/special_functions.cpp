#include "tgq/special_functions.hpp"

#include <cmath>
#include <deque>
#include <vector>

namespace tgq {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoOverSqrtPi = 1.1283791670955125739;
}  // namespace

double distance_to_pi_multiple(double t) {
  const double r = std::remainder(t, kPi);
  return std::abs(r);
}

bool in_guard_zone(double t) { return distance_to_pi_multiple(t) < kGuardDelta; }

double double_factorial(int n) {
  if (n < -1) throw std::domain_error("double_factorial: n must be >= -1");
  double v = 1.0;
  for (int k = n; k > 1; k -= 2) v *= k;
  return v;
}

double log_double_factorial(int n) {
  if (n < -1) throw std::domain_error("log_double_factorial: n must be >= -1");
  if (n <= 1) return 0.0;
  if (n % 2 == 0) {
    const double j = n / 2;
    return j * std::log(2.0) + std::lgamma(j + 1.0);
  }
  // (2j-1)!! = (2j)! / (2^j j!)  with  n = 2j-1
  const double j = (n + 1) / 2;
  return std::lgamma(2.0 * j + 1.0) - j * std::log(2.0) - std::lgamma(j + 1.0);
}

double log_factorial(int n) {
  if (n < 0) throw std::domain_error("log_factorial: n must be >= 0");
  return std::lgamma(n + 1.0);
}

double hermite(int n, double x) {
  if (n < 0) throw std::domain_error("hermite: n must be >= 0");
  if (n == 0) return 1.0;
  double hm = 1.0, h = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double hn = 2.0 * x * h - 2.0 * k * hm;
    hm = h;
    h = hn;
  }
  return h;
}

namespace {

Complex erf_maclaurin(Complex w) {
  const Complex w2 = w * w;
  Complex term = w;
  Complex sum = w;
  for (int n = 1; n < 200; ++n) {
    term *= -w2 / static_cast<double>(n);
    const Complex add = term / static_cast<double>(2 * n + 1);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return kTwoOverSqrtPi * sum;
}

// erfi by its all-positive Maclaurin series; no cancellation for any real y.
double erfi_series(double y) {
  const double y2 = y * y;
  double term = y, sum = y;
  for (int n = 1; n < 400; ++n) {
    term *= y2 / n;
    const double add = term / (2 * n + 1);
    sum += add;
    if (add < 1e-18 * sum) break;
  }
  return kTwoOverSqrtPi * sum;
}

// sqrt(pi) e^{w^2} erfc(w) = 1/(w+ (1/2)/(w+ 1/(w+ (3/2)/(w+ ...)))), Re w > 0.
// Modified Lentz.
Complex erfc_scaled_cf(Complex w) {
  const double tiny = 1e-300;
  // b_0 = w, a_k = k/2
  Complex f = w, C = w, D = 0.0;
  for (int k = 1; k < 500; ++k) {
    const double a = 0.5 * k;
    const Complex b = w;  // all denominators are w in this layout
    D = b + a * D;
    if (std::abs(D) < tiny) D = tiny;
    C = b + a / C;
    if (std::abs(C) < tiny) C = tiny;
    D = 1.0 / D;
    const Complex delta = C * D;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 / f;
}

// erf(x+iy) for 0 <= x < 1/2, y >= 0, |w| > 3: erf(iy) + integral along the
// horizontal segment, (2/sqrt(pi)) e^{y^2} int_0^x e^{-u^2} e^{-2iuy} du.
Complex erf_near_axis(double x, double y) {
  // 12-point Gauss-Legendre on [0,1]
  static const double gl_x[12] = {
      0.009219682876640375, 0.047941371814762546, 0.11504866290284765, 0.20634102285669128,
      0.31608425050090994,  0.43738329574426554,  0.5626167042557344,  0.68391574949909,
      0.7936589771433087,   0.8849513370971523,   0.9520586281852375,  0.9907803171233596};
  static const double gl_w[12] = {
      0.023587668193255914, 0.05346966299765922, 0.08003916427167311, 0.10158371336153296,
      0.11674626826917742,  0.1245735229067014,  0.1245735229067014,  0.11674626826917742,
      0.10158371336153296,  0.08003916427167311, 0.05346966299765922, 0.023587668193255914};
  const int panels = 4;
  Complex integral = 0.0;
  const double hw = x / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = p * hw;
    for (int i = 0; i < 12; ++i) {
      const double u = a + gl_x[i] * hw;
      integral += hw * gl_w[i] * std::exp(Complex(-u * u, -2.0 * u * y));
    }
  }
  return Complex(0.0, erfi_series(y)) + kTwoOverSqrtPi * std::exp(y * y) * integral;
}

Complex erf_dispatch(Complex w) {
  // exact odd reflection into Re w >= 0 (and Im >= 0 on the axis)
  if (std::real(w) < 0.0 || (std::real(w) == 0.0 && std::imag(w) < 0.0))
    return -erf_dispatch(-w);
  // exact conjugate reflection into the upper half plane for the split branch
  const double r = std::abs(w);
  if (r <= 3.0) return erf_maclaurin(w);
  if (std::real(w) >= 0.5) return 1.0 - std::exp(-w * w) * erfc_scaled_cf(w) / std::sqrt(kPi);
  if (std::imag(w) < 0.0) return std::conj(erf_dispatch(std::conj(w)));
  return erf_near_axis(std::real(w), std::imag(w));
}

}  // namespace

ErfEval erf_complex_eval(Complex w) {
  if (!(std::isfinite(std::real(w)) && std::isfinite(std::imag(w))))
    throw std::domain_error("erf_complex: non-finite argument");
  ErfEval out;
  out.accuracy_degraded = std::abs(w) > 8.0;
  out.value = (w == Complex(0.0, 0.0)) ? Complex(0.0, 0.0) : erf_dispatch(w);
  return out;
}

Complex erf_complex(Complex w) { return erf_complex_eval(w).value; }

Hyp3F2Result hyp3f2_series(const std::array<double, 3>& a, const std::array<double, 2>& b,
                           Complex x, const SummationControl& ctrl) {
  ctrl.validate();
  for (double bi : b) {
    if (bi <= 0.0 && bi == std::floor(bi))
      throw std::domain_error("hyp3f2: nonpositive integer lower parameter");
  }
  Complex term = 1.0, sum = 1.0;
  if (x == Complex(0.0, 0.0)) return {sum, {1, 0.0}};

  // Widen the stall window to cover a full rotation of the term phase, so a
  // slowly turning partial-sum spiral cannot fake convergence.
  const double rot = std::abs(std::arg(x));
  std::size_t window = ctrl.stall_window;
  if (rot > 1e-9) {
    const std::size_t full_turn = static_cast<std::size_t>(std::ceil(2.0 * kPi / rot));
    window = std::min<std::size_t>(std::max(window, full_turn), 100000);
  }

  std::deque<Complex> recent;
  recent.push_back(sum);
  double achieved = std::abs(term);
  for (std::size_t n = 0; n < ctrl.max_terms; ++n) {
    const double dn = static_cast<double>(n);
    const Complex ratio = (a[0] + dn) * (a[1] + dn) * (a[2] + dn) /
                          ((b[0] + dn) * (b[1] + dn) * (dn + 1.0)) * x;
    term *= ratio;
    sum += term;
    recent.push_back(sum);
    if (recent.size() > window + 1) recent.pop_front();
    if (recent.size() == window + 1) {
      double spread = 0.0;
      for (const Complex& s : recent) spread = std::max(spread, std::abs(s - sum));
      achieved = spread;
      if (spread <= ctrl.abs_tol) return {sum, {n + 2, spread}};
    }
  }
  throw ConvergenceError("hyp3f2: no stall within max_terms", sum,
                         {ctrl.max_terms, achieved});
}

Hyp3F2Result hyp3f2_unit(const std::array<double, 3>& a, const std::array<double, 2>& b,
                         double t, const SummationControl& ctrl) {
  if (in_guard_zone(t)) throw GuardZoneError(t);
  return hyp3f2_series(a, b, std::exp(Complex(0.0, -2.0 * t)), ctrl);
}

Complex mehler_kernel(double x, double y, Complex u) {
  if (std::abs(u) >= 1.0)
    throw std::domain_error("mehler_kernel: |u| must be < 1");
  const Complex one_minus_u2 = 1.0 - u * u;
  const Complex expo = (2.0 * x * y * u - (x * x + y * y) * u * u) / one_minus_u2;
  return std::exp(expo) / std::sqrt(one_minus_u2);
}

}  // namespace tgq
