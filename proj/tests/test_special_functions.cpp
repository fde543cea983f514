#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "tgq/special_functions.hpp"

using tgq::Complex;

namespace {

// Test-local reference series, independent of the library implementation.
// long double keeps the alternating-series cancellation below 1e-13 out to
// |w| ~ 4.5.
Complex erf_reference(Complex w) {
  const std::complex<long double> wl(w.real(), w.imag());
  std::complex<long double> term = wl, sum = wl;
  for (int n = 1; n < 300; ++n) {
    term *= -wl * wl / static_cast<long double>(n);
    sum += term / static_cast<long double>(2 * n + 1);
    if (std::abs(term) < 1e-25L * std::abs(sum)) break;
  }
  sum *= 2.0L / std::sqrt(3.14159265358979323846L);
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

double erfi_reference(double y) {
  double term = y, sum = y;
  for (int n = 1; n < 400; ++n) {
    term *= y * y / n;
    sum += term / (2 * n + 1);
    if (term < 1e-22 * sum) break;
  }
  return 2.0 / std::sqrt(M_PI) * sum;
}

// Left-hand side of the Mehler identity through orthonormal oscillator
// functions: sqrt(pi) e^{(x^2+y^2)/2} sum_n psi_n(x) psi_n(y) u^n.
Complex mehler_series_reference(double x, double y, Complex u, int terms) {
  std::vector<double> hx(terms), hy(terms);
  const double pim4 = std::pow(M_PI, -0.25);
  hx[0] = pim4 * std::exp(-0.5 * x * x);
  hy[0] = pim4 * std::exp(-0.5 * y * y);
  if (terms > 1) {
    hx[1] = std::sqrt(2.0) * x * hx[0];
    hy[1] = std::sqrt(2.0) * y * hy[0];
  }
  for (int k = 1; k + 1 < terms; ++k) {
    hx[k + 1] = std::sqrt(2.0 / (k + 1.0)) * x * hx[k] - std::sqrt(k / (k + 1.0)) * hx[k - 1];
    hy[k + 1] = std::sqrt(2.0 / (k + 1.0)) * y * hy[k] - std::sqrt(k / (k + 1.0)) * hy[k - 1];
  }
  Complex up = 1.0, sum = 0.0;
  for (int n = 0; n < terms; ++n) {
    sum += hx[n] * hy[n] * up;
    up *= u;
  }
  return std::sqrt(M_PI) * std::exp(0.5 * (x * x + y * y)) * sum;
}

}  // namespace

TEST_CASE("double factorial conventions and values") {
  CHECK(tgq::double_factorial(-1) == 1.0);
  CHECK(tgq::double_factorial(0) == 1.0);
  CHECK(tgq::double_factorial(5) == 15.0);
  CHECK(tgq::double_factorial(6) == 48.0);
  CHECK_THROWS_AS(tgq::double_factorial(-2), std::domain_error);
  for (int n : {1, 7, 12, 33, 101, 250}) {
    CHECK(tgq::log_double_factorial(n) ==
          doctest::Approx(std::log(tgq::double_factorial(n))).epsilon(1e-13));
  }
}

TEST_CASE("hermite recurrence and parity") {
  CHECK(tgq::hermite(0, 3.7) == 1.0);
  CHECK(tgq::hermite(3, 0.0) == 0.0);
  CHECK(tgq::hermite(2, 1.0) == doctest::Approx(2.0));  // 4x^2 - 2
  CHECK(tgq::hermite(3, 0.8) == doctest::Approx(8 * 0.8 * 0.8 * 0.8 - 12 * 0.8));
  // recurrence residual H_{n+1} - 2x H_n + 2n H_{n-1} = 0
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> xd(-8.0, 8.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 60;
    const double x = xd(rng);
    const double lhs = tgq::hermite(n + 1, x) - 2 * x * tgq::hermite(n, x) +
                       2.0 * n * tgq::hermite(n - 1, x);
    const double scale = std::abs(tgq::hermite(n + 1, x)) + std::abs(2 * x * tgq::hermite(n, x));
    CHECK(std::abs(lhs) <= 1e-10 * std::max(scale, 1.0));
  }
}

TEST_CASE("erf of complex argument") {
  CHECK(tgq::erf_complex({0.0, 0.0}) == Complex(0.0, 0.0));
  CHECK(std::abs(tgq::erf_complex({1.0, 0.0}) - Complex(0.8427007929497149, 0.0)) < 1e-13);
  // erf(i) = i erfi(1)
  const Complex ei = tgq::erf_complex({0.0, 1.0});
  CHECK(std::abs(ei - Complex(0.0, 1.6504257587975429)) < 1e-13);
  CHECK(std::abs(ei - Complex(0.0, erfi_reference(1.0))) < 1e-13);

  SUBCASE("reference-series agreement inside |w| <= 4") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> d(-4.0, 4.0);
    for (int i = 0; i < 300; ++i) {
      Complex w(d(rng), d(rng));
      if (std::abs(w) > 4.0) continue;
      const Complex ref = erf_reference(w);
      CHECK(std::abs(tgq::erf_complex(w) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
  }

  SUBCASE("real axis matches std::erf up to |w| = 8") {
    for (double x = 0.25; x <= 8.0; x += 0.25) {
      CHECK(std::abs(tgq::erf_complex({x, 0.0}).real() - std::erf(x)) < 1e-13);
    }
  }

  SUBCASE("imaginary axis matches the erfi series up to |w| = 8") {
    for (double y = 0.5; y <= 8.0; y += 0.5) {
      const Complex v = tgq::erf_complex({0.0, y});
      const double ref = erfi_reference(y);
      CHECK(std::abs(v.imag() - ref) <= 1e-12 * ref);
      CHECK(std::abs(v.real()) <= 1e-12 * ref);
    }
  }

  SUBCASE("branch-boundary consistency on rings near |w| = 3 and Re w = 0.5") {
    for (int i = 0; i < 48; ++i) {
      const double th = 2 * M_PI * i / 48.0;
      for (double r : {2.995, 3.005}) {
        const Complex w = std::polar(r, th);
        const Complex ref = erf_reference(w);
        CHECK(std::abs(tgq::erf_complex(w) - ref) <= 2e-12 * std::max(1.0, std::abs(ref)));
      }
    }
    // derivative identity erf' = (2/sqrt(pi)) e^{-w^2} as a central difference
    // straddling the CF/axis-split boundary; a branch mismatch would dominate
    // the h^2 truncation
    for (double y = 3.2; y <= 7.5; y += 0.6) {
      const double h = 1e-3;
      const Complex a = tgq::erf_complex({0.5 - h, y});
      const Complex b = tgq::erf_complex({0.5 + h, y});
      const Complex want = 2.0 / std::sqrt(M_PI) * std::exp(-Complex(0.5, y) * Complex(0.5, y));
      const Complex got = (b - a) / (2.0 * h);
      CHECK(std::abs(got - want) <= 1e-3 * std::abs(want));
    }
  }

  SUBCASE("odd and conjugate symmetry hold exactly") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> d(-7.0, 7.0);
    for (int i = 0; i < 200; ++i) {
      const Complex w(d(rng), d(rng));
      const Complex v = tgq::erf_complex(w);
      CHECK(tgq::erf_complex(-w) == -v);
      CHECK(tgq::erf_complex(std::conj(w)) == std::conj(v));
    }
  }

  SUBCASE("degraded flag beyond the validated range") {
    CHECK_FALSE(tgq::erf_complex_eval({5.0, 5.0}).accuracy_degraded);
    CHECK(tgq::erf_complex_eval({8.0, 4.0}).accuracy_degraded);
  }
}

TEST_CASE("3F2 series: argument zero, arcsin identity, coefficient-series oracle") {
  // partial-sum spread decays like N^{-3/2}; 2e-9 lands near N ~ 5e5 terms
  tgq::SummationControl ctrl;
  ctrl.max_terms = 2000000;
  ctrl.abs_tol = 2e-9;
  ctrl.stall_window = 4;

  SUBCASE("formal argument-zero entry point") {
    const auto r = tgq::hyp3f2_series({1.5, 0.5, 0.5}, {1.5, 1.5}, Complex(0.0, 0.0), ctrl);
    CHECK(r.value == Complex(1.0, 0.0));
  }

  SUBCASE("ground-state identity  3F2 = (pi/2) e^{3it/2} L_0(t)") {
    // equivalent: 3F2(3/2,1/2,1/2;3/2,3/2;e^{-2it}) = e^{it} arcsin(e^{-it})
    const double t = 0.5;
    const auto r = tgq::hyp3f2_unit({1.5, 0.5, 0.5}, {1.5, 1.5}, t, ctrl);
    const Complex lhs = r.value;
    const Complex rhs = std::exp(Complex(0, t)) * std::asin(std::exp(Complex(0, -t)));
    CHECK(std::abs(lhs - rhs) < 1e-8);
  }

  SUBCASE("reverse-quench series oracle at t = 0.7") {
    const double t = 0.7;
    const auto r = tgq::hyp3f2_unit({0.5, -0.5, -0.5}, {0.5, 0.5}, t, ctrl);
    // direct sum over c_{n0}^2 with a local ratio recurrence
    Complex phase = 1.0, sum = 0.0;
    const Complex step = std::exp(Complex(0.0, -2.0 * t));
    double c2 = 2.0 / M_PI;  // c_00^2
    for (int n = 0; n < 400000; ++n) {
      sum += c2 * phase;
      const double r1 = (2 * n + 1) / (2.0 * n + 2.0);
      const double r2 = (1.0 - 2 * n) / (-1.0 - 2 * n);
      c2 *= r1 * r2 * r2;
      phase *= step;
    }
    const Complex lhs = (2.0 / M_PI) * r.value;  // prefactor of L^r_0 without e^{-it/2}
    CHECK(std::abs(lhs - sum) < 2e-8);
  }

  SUBCASE("guard zone throws toward the closed forms") {
    CHECK_THROWS_AS(tgq::hyp3f2_unit({1.5, 0.5, 0.5}, {1.5, 1.5}, 0.01, ctrl),
                    tgq::GuardZoneError);
    CHECK_THROWS_AS(tgq::hyp3f2_unit({1.5, 0.5, 0.5}, {1.5, 1.5}, M_PI - 0.01, ctrl),
                    tgq::GuardZoneError);
  }

  SUBCASE("non-convergence carries the last partial sum") {
    tgq::SummationControl tight;
    tight.max_terms = 50;
    tight.abs_tol = 1e-14;
    tight.stall_window = 4;
    try {
      tgq::hyp3f2_unit({1.5, 0.5, 0.5}, {1.5, 1.5}, 1.0, tight);
      CHECK(false);
    } catch (const tgq::ConvergenceError& e) {
      CHECK(std::abs(e.last_partial()) > 0.0);
      CHECK(e.stats().terms == 50);
    }
  }

  SUBCASE("partial sums are Cauchy within the reported tolerance") {
    const auto r = tgq::hyp3f2_unit({1.5, 0.5, 0.5}, {1.5, 1.5}, 1.1, ctrl);
    CHECK(r.stats.achieved_tol <= ctrl.abs_tol);
    CHECK(r.stats.terms > 10);
  }

  SUBCASE("nonpositive integer lower parameter rejected") {
    CHECK_THROWS_AS(tgq::hyp3f2_series({1.5, 0.5, 0.5}, {-1.0, 1.5}, Complex(0.5, 0.0), ctrl),
                    std::domain_error);
  }
}

TEST_CASE("Mehler kernel") {
  CHECK(tgq::mehler_kernel(0.3, -1.2, {0.0, 0.0}) == Complex(1.0, 0.0));
  CHECK(std::abs(tgq::mehler_kernel(0.0, 0.0, {0.5, 0.0}) - 1.0 / std::sqrt(0.75)) < 1e-14);
  CHECK_THROWS_AS(tgq::mehler_kernel(0.0, 0.0, {1.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(tgq::mehler_kernel(0.0, 0.0, {0.8, 0.7}), std::domain_error);

  SUBCASE("60-term partial sum at u = 0.5") {
    const Complex lhs = mehler_series_reference(1.0, 0.0, {0.5, 0.0}, 60);
    CHECK(std::abs(tgq::mehler_kernel(1.0, 0.0, {0.5, 0.0}) - lhs) < 1e-10);
  }

  SUBCASE("series agreement over |u| <= 0.9, |x|,|y| <= 3") {
    // The series needs ~200+ terms near (u, x, y) = (0.9, 3, 3); sum it to a
    // geometric tail bound below 1e-12 before asserting 1e-9 agreement.
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> xd(-3.0, 3.0), ud(0.05, 0.9), pd(0.0, 2 * M_PI);
    for (int i = 0; i < 40; ++i) {
      const double x = xd(rng), y = xd(rng);
      const Complex u = std::polar(ud(rng), pd(rng));
      const int terms = static_cast<int>(std::ceil(std::log(1e-13) / std::log(std::abs(u)))) + 40;
      const Complex lhs = mehler_series_reference(x, y, u, std::min(terms, 800));
      const Complex rhs = tgq::mehler_kernel(x, y, u);
      CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)));
    }
    // the worst corner explicitly
    const Complex corner = tgq::mehler_kernel(3.0, 3.0, {0.9, 0.0});
    const Complex ref = mehler_series_reference(3.0, 3.0, {0.9, 0.0}, 800);
    CHECK(std::abs(corner - ref) <= 1e-9 * std::abs(ref));
  }
}

TEST_CASE("guard zone geometry") {
  CHECK(tgq::distance_to_pi_multiple(0.0) == 0.0);
  CHECK(tgq::distance_to_pi_multiple(M_PI) == doctest::Approx(0.0));
  CHECK(tgq::distance_to_pi_multiple(1.0) == doctest::Approx(1.0));
  CHECK(tgq::distance_to_pi_multiple(M_PI - 0.03) == doctest::Approx(0.03));
  CHECK(tgq::in_guard_zone(3 * M_PI + 0.01));
  CHECK_FALSE(tgq::in_guard_zone(1.0));
}

TEST_CASE("summation control validation") {
  tgq::SummationControl bad;
  bad.stall_window = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.abs_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.max_terms = 1;
  bad.stall_window = 2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
