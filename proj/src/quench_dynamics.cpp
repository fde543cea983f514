#include "tgq/quench_dynamics.hpp"

#include <cmath>
#include <deque>

#include "tgq/special_functions.hpp"

namespace tgq {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPiQuarterInv = 0.75112554446494248;   // pi^{-1/4}
constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kGibbsZone = 0.2;

bool on_pi_multiple(double t) { return distance_to_pi_multiple(t) < 1e-12; }

Complex i_pow(long k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// Asymptotic series S(w) = sum_k (-1)^k (2k-1)!!/(2w^2)^k of the erf tail,
// truncated at the smallest term.
Complex erf_asymptotic_sum(Complex w2) {
  Complex term = 1.0, sum = 1.0;
  double prev = 1.0;
  for (int k = 1; k < 40; ++k) {
    term *= -(2.0 * k - 1.0) / (2.0 * w2);
    const double mag = std::abs(term);
    if (mag > prev) break;
    sum += term;
    if (mag < 1e-18) break;
    prev = mag;
  }
  return sum;
}

// 1 - S(w) = sum_{k>=1} -(-1)^k (2k-1)!!/(2w^2)^k, needed where the leading
// asymptotic orders of Phi_0 cancel.
Complex erf_asymptotic_sum_minus_one(Complex w2) {
  Complex term = 1.0, sum = 0.0;
  double prev = 1e300;
  for (int k = 1; k < 40; ++k) {
    term *= -(2.0 * k - 1.0) / (2.0 * w2);
    const double mag = std::abs(term);
    if (mag > prev) break;
    sum -= term;
    if (mag < 1e-18 * std::abs(sum)) break;
    prev = mag;
  }
  return sum;
}

// |w|^2 beyond which the asymptotic route is used; erf_complex stays inside
// its validated |w| <= 8 range below it (sqrt(60) < 8).
constexpr double kAsymptoticW2 = 60.0;

}  // namespace

void QuenchScenario::validate() const {
  if (initial_index < 0)
    throw std::invalid_argument("QuenchScenario: initial_index must be >= 0");
  if (second_quench_time) {
    const double t1 = *second_quench_time;
    if (!(t1 > 0.0) || t1 > kPi)
      throw std::invalid_argument("QuenchScenario: second quench time must lie in (0, pi]");
  }
}

GFactor g_factor(double t) {
  if (on_pi_multiple(t))
    throw std::domain_error("g_factor: t is a multiple of pi (closed forms take the limit)");
  const Complex e = std::exp(Complex(0.0, -t));
  const Complex e2 = std::exp(Complex(0.0, -2.0 * t));
  GFactor out;
  out.g = e / std::sqrt(1.0 - e2);  // Re(1 - e^{-2it}) = 1 - cos 2t >= 0: principal branch safe
  out.g_squared = Complex(-0.5, -0.5 / std::tan(t));
  return out;
}

Complex psi0_closed(double z, double t) {
  if (on_pi_multiple(t)) {
    const long k = std::lround(t / kPi);
    return i_pow(k) * psi_eval(0, z);
  }
  const GFactor gf = g_factor(t);
  const double az = std::abs(z);
  const Complex w = az * gf.g;
  const Complex phase = std::exp(Complex(0.0, -0.5 * t));
  const Complex w2 = w * w;
  if (std::abs(w2) > kAsymptoticW2) {
    // erf(w) = 1 - e^{-w^2}/(sqrt(pi) w) S(w), valid on |arg w| < 3pi/4;
    // e^{-z^2/2 - w^2} is a pure phase (Re g^2 = -1/2 exactly).
    const Complex expo = -z * z * (0.5 + gf.g_squared);
    return kPiQuarterInv * phase *
           (std::exp(-0.5 * z * z) -
            std::exp(expo) / (kSqrtPi * w) * erf_asymptotic_sum(w2));
  }
  return kPiQuarterInv * phase * std::exp(-0.5 * z * z) * erf_complex(w);
}

Complex phi0_closed(double z, double t) {
  if (on_pi_multiple(t)) {
    const long k = std::lround(t / kPi);
    return i_pow(-k) * phi_eval(0, z);
  }
  const GFactor gf = g_factor(t);
  const Complex phase = std::exp(Complex(0.0, -1.5 * t));
  const double pref = std::sqrt(2.0) * kPiQuarterInv;
  const Complex w = z * gf.g;
  const Complex w2 = w * w;
  if (std::abs(w2) > kAsymptoticW2) {
    // z erf(zg) = |z| - e^{-z^2/2-w^2}/(sqrt(pi) g) S: the leading 1/g terms
    // of the bracket cancel, leaving (1-S)/(sqrt(pi) g) plus the |z| piece.
    const Complex expo = -z * z * (0.5 + gf.g_squared);
    return pref * phase *
           (std::exp(expo) / (kSqrtPi * gf.g) * erf_asymptotic_sum_minus_one(w2) +
            std::abs(z) * std::exp(-0.5 * z * z));
  }
  const Complex bracket = std::exp(-w2) / (kSqrtPi * gf.g) + z * erf_complex(w);
  return pref * phase * std::exp(-0.5 * z * z) * bracket;
}

namespace {

// One tapered partial sum: raw terms to n_half, cos^2 taper to n_total.
// term_fn(n) must return the n-th term; summation order is fixed.
template <typename TermFn>
Complex tapered_sum(std::size_t n_total, TermFn&& term_fn) {
  const std::size_t n_half = n_total / 2;
  Complex sum = 0.0;
  for (std::size_t n = 0; n <= n_total; ++n) {
    double wgt = 1.0;
    if (n > n_half) {
      const double s = static_cast<double>(n - n_half) / static_cast<double>(n_total - n_half);
      const double c = std::cos(0.5 * kPi * s);
      wgt = c * c;
    }
    sum += wgt * term_fn(n);
  }
  return sum;
}

// Doubling scheme: evaluate tapered sums at N, 2N, ... until stall_window
// consecutive agreements within abs_tol.
template <typename MakeTermFn>
std::pair<Complex, SeriesStats> converge_tapered(const SummationControl& ctrl,
                                                 MakeTermFn&& make_term_fn) {
  ctrl.validate();
  std::size_t n = 256;
  Complex prev = tapered_sum(std::min(n, ctrl.max_terms), make_term_fn());
  std::size_t agreements = 0;
  double delta = 0.0;
  while (n < ctrl.max_terms) {
    n = std::min(n * 2, ctrl.max_terms);
    const Complex cur = tapered_sum(n, make_term_fn());
    delta = std::abs(cur - prev);
    agreements = (delta <= ctrl.abs_tol) ? agreements + 1 : 0;
    prev = cur;
    if (agreements >= ctrl.stall_window) return {cur, {n, delta}};
  }
  throw ConvergenceError("series: tapered sums did not stall within max_terms", prev,
                         {n, delta});
}

// Terms of the forward series c_mn e^{-i(2n+3/2)t} psi_{2n+1}(|z|) streamed
// with O(1) work per n.
class ForwardTerms {
 public:
  ForwardTerms(int m, double z, double t)
      : coeff_(m, QuenchDirection::forward),
        phase_(std::exp(Complex(0.0, -1.5 * t))),
        step_(std::exp(Complex(0.0, -2.0 * t))),
        z_(std::abs(z)) {
    h_prev_ = kPiQuarterInv * std::exp(-0.5 * z_ * z_);       // psi_0
    h_cur_ = std::sqrt(2.0) * z_ * h_prev_;                   // psi_1
    order_ = 1;
  }

  Complex operator()(std::size_t) {
    const Complex term = coeff_.current() * phase_ * h_cur_;
    coeff_.advance();
    phase_ *= step_;
    step_two_orders();
    return term;
  }

 private:
  void step_two_orders() {
    for (int r = 0; r < 2; ++r) {
      const int k = order_;
      const double hn =
          std::sqrt(2.0 / (k + 1.0)) * z_ * h_cur_ - std::sqrt(k / (k + 1.0)) * h_prev_;
      h_prev_ = h_cur_;
      h_cur_ = hn;
      ++order_;
    }
  }

  CoefficientStream coeff_;
  Complex phase_, step_;
  double z_;
  double h_prev_, h_cur_;
  int order_;
};

// Terms of the reverse series c_nm e^{-i(2n+1/2)t} psi_{2n}(z).
class ReverseTerms {
 public:
  ReverseTerms(int m, double z, double t)
      : coeff_(m, QuenchDirection::reverse),
        phase_(std::exp(Complex(0.0, -0.5 * t))),
        step_(std::exp(Complex(0.0, -2.0 * t))),
        z_(z) {
    h_cur_ = kPiQuarterInv * std::exp(-0.5 * z_ * z_);  // psi_0
    h_next_ = std::sqrt(2.0) * z_ * h_cur_;             // psi_1
    order_ = 0;
  }

  Complex operator()(std::size_t) {
    const Complex term = coeff_.current() * phase_ * h_cur_;
    coeff_.advance();
    phase_ *= step_;
    step_two_orders();
    return term;
  }

 protected:
  void step_two_orders() {
    for (int r = 0; r < 2; ++r) {
      const int k = order_ + 1;
      const double hn =
          std::sqrt(2.0 / (k + 1.0)) * z_ * h_next_ - std::sqrt(k / (k + 1.0)) * h_cur_;
      h_cur_ = h_next_;
      h_next_ = hn;
      ++order_;
    }
  }

  CoefficientStream coeff_;
  Complex phase_, step_;
  double z_;
  double h_cur_, h_next_;  // psi_{order}, psi_{order+1}
  int order_;
};

// Terms of Sigma_m(z,t) = pi^{1/4} e^{z^2/2} sum_n e^{-2int} d_n psi_{2n}(z)
// / (2m+1-2n), d_n = (-1)^n (2n-1)!!/sqrt((2n)!).
class SigmaTerms {
 public:
  SigmaTerms(int m, double z, double t)
      : m_(m), step_(std::exp(Complex(0.0, -2.0 * t))), z_(z) {
    phase_ = 1.0;
    d_ = 1.0;
    n_ = 0;
    scale_ = std::pow(kPi, 0.25) * std::exp(0.5 * z_ * z_);
    h_cur_ = kPiQuarterInv * std::exp(-0.5 * z_ * z_);
    h_next_ = std::sqrt(2.0) * z_ * h_cur_;
    order_ = 0;
  }

  Complex operator()(std::size_t) {
    const double denom = 2.0 * m_ + 1.0 - 2.0 * n_;
    const Complex term = scale_ * phase_ * d_ * h_cur_ / denom;
    phase_ *= step_;
    d_ *= -std::sqrt((2.0 * n_ + 1.0) / (2.0 * n_ + 2.0));
    ++n_;
    for (int r = 0; r < 2; ++r) {
      const int k = order_ + 1;
      const double hn =
          std::sqrt(2.0 / (k + 1.0)) * z_ * h_next_ - std::sqrt(k / (k + 1.0)) * h_cur_;
      h_cur_ = h_next_;
      h_next_ = hn;
      ++order_;
    }
    return term;
  }

 private:
  int m_;
  Complex phase_, step_;
  double z_, d_, scale_;
  double h_cur_, h_next_;
  int n_;
  int order_;
};

}  // namespace

Complex f_m_prefactor(int m, double z, double t) {
  if (m < 0) throw std::invalid_argument("f_m_prefactor: m must be >= 0");
  const double log_mfac = log_double_factorial(2 * m - 1) - 0.5 * log_factorial(2 * m);
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  return std::sqrt(2.0) * std::pow(kPi, -0.75) * sign * std::exp(log_mfac) *
         std::exp(Complex(-0.5 * z * z, -0.5 * t));
}

SeriesEval psi_m_series(int m, double z, double t, const SummationControl& ctrl) {
  if (m < 0) throw std::invalid_argument("psi_m_series: m must be >= 0");
  SeriesEval out;
  out.gibbs_zone = std::abs(z) < kGibbsZone;
  if (in_guard_zone(t)) {
    if (m == 0) {
      out.value = psi0_closed(z, t);
      out.method = EvalMethod::closed_form;
      return out;
    }
    throw GuardZoneError(t);
  }
  auto [value, stats] = converge_tapered(ctrl, [&] { return ForwardTerms(m, z, t); });
  out.value = value;
  out.stats = stats;
  return out;
}

SeriesEval phi_m_series(int m, double z, double t, const SummationControl& ctrl) {
  if (m < 0) throw std::invalid_argument("phi_m_series: m must be >= 0");
  SeriesEval out;
  if (in_guard_zone(t)) {
    if (m == 0) {
      out.value = phi0_closed(z, t);
      out.method = EvalMethod::closed_form;
      return out;
    }
    throw GuardZoneError(t);
  }
  auto [value, stats] = converge_tapered(ctrl, [&] { return ReverseTerms(m, z, t); });
  out.value = value;
  out.stats = stats;
  return out;
}

SeriesEval sigma_m_series(int m, double z, double t, const SummationControl& ctrl) {
  if (m < 0) throw std::invalid_argument("sigma_m_series: m must be >= 0");
  if (in_guard_zone(t)) throw GuardZoneError(t);
  auto [value, stats] = converge_tapered(ctrl, [&] { return SigmaTerms(m, z, t); });
  SeriesEval out;
  out.value = value;
  out.stats = stats;
  return out;
}

EvolvedState::EvolvedState(QuenchScenario scenario, double time, Representation representation,
                           SummationControl ctrl)
    : scenario_(std::move(scenario)), time_(time), representation_(representation),
      ctrl_(ctrl) {
  scenario_.validate();
  ctrl_.validate();
  if (scenario_.second_quench_time)
    throw std::invalid_argument("EvolvedState: single-quench scenarios only");
  if (representation_ == Representation::closed_form && scenario_.initial_index != 0)
    throw std::invalid_argument("EvolvedState: the closed form exists only for m = 0");
  m_prefactor_ = f_m_prefactor(scenario_.initial_index, 0.0, time_);
}

Complex EvolvedState::value(double z) const {
  const bool forward = scenario_.direction == QuenchDirection::forward;
  if (representation_ == Representation::closed_form)
    return forward ? psi0_closed(z, time_) : phi0_closed(z, time_);
  return forward ? psi_m_series(scenario_.initial_index, z, time_, ctrl_).value
                 : phi_m_series(scenario_.initial_index, z, time_, ctrl_).value;
}

std::vector<Complex> EvolvedState::evaluate_many(std::span<const double> z) const {
  std::vector<Complex> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = value(z[i]);
  return out;
}

SummationControl fidelity_default_control() {
  // fidelity-series terms decay only like n^{-3/2}, and the 3F2 terms for
  // m ~ 10 peak near 1e3 before decaying, so the cap must be generous
  SummationControl ctrl;
  ctrl.max_terms = 20000000;
  ctrl.abs_tol = 2e-9;
  ctrl.stall_window = 6;
  return ctrl;
}

Complex arcsin_unit(Complex w) {
  return Complex(0.0, -1.0) * std::log(Complex(0.0, 1.0) * w + std::sqrt(1.0 - w * w));
}

namespace {

FidelityResult make_fidelity(Complex L, EvalMethod method) {
  FidelityResult r;
  r.overlap = L;
  r.magnitude = std::abs(L);
  r.echo = r.magnitude * r.magnitude;
  r.method = method;
  return r;
}

Complex fidelity_series_sum(int m, double t, QuenchDirection dir, const SummationControl& ctrl) {
  ctrl.validate();
  // revival points: every coefficient phase collapses to a k-independent unit
  if (on_pi_multiple(t)) {
    const long k = std::lround(t / kPi);
    return (dir == QuenchDirection::forward) ? i_pow(k) : i_pow(-k);
  }
  CoefficientStream coeff(m, dir);
  const Complex step = std::exp(Complex(0.0, -2.0 * t));
  Complex phase = std::exp(Complex(0.0, (dir == QuenchDirection::forward ? -1.5 : -0.5) * t));
  // widen the stall window to one full rotation of the term phase 2t mod 2pi
  const double rot = std::abs(std::remainder(2.0 * t, 2.0 * kPi));
  std::size_t window = ctrl.stall_window;
  if (rot > 1e-9)
    window = std::min<std::size_t>(
        std::max(window, static_cast<std::size_t>(std::ceil(2.0 * kPi / rot))), 100000);
  std::deque<Complex> recent;
  Complex sum = 0.0;
  double achieved = 1.0;
  for (std::size_t n = 0; n < ctrl.max_terms; ++n) {
    const double c = coeff.current();
    sum += c * c * phase;
    coeff.advance();
    phase *= step;
    recent.push_back(sum);
    if (recent.size() > window + 1) recent.pop_front();
    if (recent.size() == window + 1) {
      double spread = 0.0;
      for (const Complex& s : recent) spread = std::max(spread, std::abs(s - sum));
      achieved = spread;
      if (spread <= ctrl.abs_tol) return sum;
    }
  }
  throw ConvergenceError("fidelity series: no stall within max_terms", sum,
                         {ctrl.max_terms, achieved});
}

}  // namespace

FidelityResult loschmidt_forward(int m, double t, FidelityMethod method,
                                 const SummationControl& ctrl) {
  if (m < 0) throw std::invalid_argument("loschmidt_forward: m must be >= 0");
  if (method == FidelityMethod::automatic)
    method = (m == 0) ? FidelityMethod::closed_form : FidelityMethod::hyp3f2;
  switch (method) {
    case FidelityMethod::closed_form: {
      if (m != 0)
        throw std::invalid_argument("loschmidt_forward: closed form exists only for m = 0");
      // revival points carry an exact unit phase; e^{-i k pi} would land a
      // rounding ulp off the branch point otherwise
      if (on_pi_multiple(t))
        return make_fidelity(i_pow(std::lround(t / kPi)), EvalMethod::closed_form);
      const Complex e = std::exp(Complex(0.0, -t));
      const Complex L = std::exp(Complex(0.0, -0.5 * t)) * (2.0 / kPi) * arcsin_unit(e);
      return make_fidelity(L, EvalMethod::closed_form);
    }
    case FidelityMethod::hyp3f2: {
      if (on_pi_multiple(t)) return make_fidelity(i_pow(std::lround(t / kPi)), EvalMethod::hyp3f2);
      const double md = m;
      const auto f = hyp3f2_unit({1.5, 0.5 - md, 0.5 - md}, {1.5 - md, 1.5 - md}, t, ctrl);
      const double pref =
          std::exp(2.0 * log_double_factorial(2 * m - 1) - log_factorial(2 * m)) /
          ((2.0 * md - 1.0) * (2.0 * md - 1.0));
      const Complex L = (2.0 / kPi) * std::exp(Complex(0.0, -1.5 * t)) * pref * f.value;
      return make_fidelity(L, EvalMethod::hyp3f2);
    }
    case FidelityMethod::series:
      return make_fidelity(fidelity_series_sum(m, t, QuenchDirection::forward, ctrl),
                           EvalMethod::series);
    default:
      throw std::logic_error("loschmidt_forward: bad method");
  }
}

FidelityResult loschmidt_reverse(int m, double t, FidelityMethod method,
                                 const SummationControl& ctrl) {
  if (m < 0) throw std::invalid_argument("loschmidt_reverse: m must be >= 0");
  if (method == FidelityMethod::automatic)
    method = (m == 0) ? FidelityMethod::closed_form : FidelityMethod::hyp3f2;
  switch (method) {
    case FidelityMethod::closed_form: {
      if (m != 0)
        throw std::invalid_argument("loschmidt_reverse: closed form exists only for m = 0");
      if (on_pi_multiple(t))
        return make_fidelity(i_pow(-std::lround(t / kPi)), EvalMethod::closed_form);
      const Complex e = std::exp(Complex(0.0, -t));
      const Complex e2 = std::exp(Complex(0.0, -2.0 * t));
      const Complex L = std::exp(Complex(0.0, -0.5 * t)) * (2.0 / kPi) *
                        (std::sqrt(1.0 - e2) + e * arcsin_unit(e));
      return make_fidelity(L, EvalMethod::closed_form);
    }
    case FidelityMethod::hyp3f2: {
      if (on_pi_multiple(t))
        return make_fidelity(i_pow(-std::lround(t / kPi)), EvalMethod::hyp3f2);
      const double md = m;
      const auto f = hyp3f2_unit({0.5, -0.5 - md, -0.5 - md}, {0.5 - md, 0.5 - md}, t, ctrl);
      const double pref =
          std::exp(2.0 * log_double_factorial(2 * m + 1) - log_factorial(2 * m + 1)) /
          ((2.0 * md + 1.0) * (2.0 * md + 1.0));
      const Complex L = (2.0 / kPi) * std::exp(Complex(0.0, -0.5 * t)) * pref * f.value;
      return make_fidelity(L, EvalMethod::hyp3f2);
    }
    case FidelityMethod::series:
      return make_fidelity(fidelity_series_sum(m, t, QuenchDirection::reverse, ctrl),
                           EvalMethod::series);
    default:
      throw std::logic_error("loschmidt_reverse: bad method");
  }
}

double verify_derivative_relation(int m, double z, double t, double h,
                                  const SummationControl& ctrl) {
  if (z == 0.0 || std::abs(z) <= kGibbsZone)
    throw std::invalid_argument("verify_derivative_relation: require |z| > 0.2");
  if (!(h > 0.0) || h >= std::abs(z))
    throw std::invalid_argument("verify_derivative_relation: bad step");
  if (in_guard_zone(t)) throw GuardZoneError(t);
  const double az = std::abs(z);
  // Both difference points are summed with the same truncation length so the
  // truncation errors, smooth in z, cancel in the central difference.
  const SeriesEval center = sigma_m_series(m, az, t, ctrl);
  const std::size_t n_fixed = std::max<std::size_t>(2 * center.stats.terms, 2048);
  const Complex sp = tapered_sum(n_fixed, SigmaTerms(m, az + h, t));
  const Complex sm = tapered_sum(n_fixed, SigmaTerms(m, az - h, t));
  const Complex dsigma = (sp - sm) / (2.0 * h);
  const Complex lhs =
      std::exp(Complex(0.0, t)) / std::sqrt(2.0) * f_m_prefactor(m, z, t) * dsigma;
  const Complex rhs = psi_m_series(m, z, t, ctrl).value;
  return std::abs(lhs - rhs) / std::abs(rhs);
}

DoubleQuenchState double_quench_state(const QuenchScenario& scenario, double t, int k_max,
                                      const SummationControl& ctrl) {
  scenario.validate();
  if (!scenario.second_quench_time)
    throw std::invalid_argument("double_quench_state: scenario has no second quench time");
  if (k_max < 0 || k_max > 1000)
    throw std::invalid_argument("double_quench_state: k_max must be in [0, 1000]");
  const double t1 = *scenario.second_quench_time;
  if (!(t > t1)) throw std::invalid_argument("double_quench_state: require t > t1");
  const int m = scenario.initial_index;
  const bool forward = scenario.direction == QuenchDirection::forward;

  DoubleQuenchState out;
  out.scenario = scenario;
  out.time = t;
  out.coefficients.resize(k_max + 1);

  // <psi_2k|Psi_m(t1)> = sum_n e^{-i eps_2n t1} c_mn c_kn  (scenario a)
  // <phi_2k|Phi_m(t1)> = sum_n e^{-i E_2n  t1} c_nm c_nk  (scenario b)
  double norm_sum = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    CoefficientStream cm(m, forward ? QuenchDirection::forward : QuenchDirection::reverse);
    CoefficientStream ck(k, forward ? QuenchDirection::forward : QuenchDirection::reverse);
    const Complex step = std::exp(Complex(0.0, -2.0 * t1));
    Complex phase = std::exp(Complex(0.0, (forward ? -1.5 : -0.5) * t1));
    const double rot = std::abs(std::remainder(2.0 * t1, 2.0 * kPi));
    std::size_t window = ctrl.stall_window;
    if (rot > 1e-9)
      window = std::min<std::size_t>(
          std::max(window, static_cast<std::size_t>(std::ceil(2.0 * kPi / rot))), 100000);
    std::deque<Complex> recent;
    Complex sum = 0.0;
    bool stalled = false;
    double achieved = 1.0;
    for (std::size_t n = 0; n < ctrl.max_terms; ++n) {
      sum += cm.current() * ck.current() * phase;
      cm.advance();
      ck.advance();
      phase *= step;
      recent.push_back(sum);
      if (recent.size() > window + 1) recent.pop_front();
      if (recent.size() == window + 1) {
        double spread = 0.0;
        for (const Complex& s : recent) spread = std::max(spread, std::abs(s - sum));
        achieved = spread;
        if (spread <= ctrl.abs_tol) {
          stalled = true;
          break;
        }
      }
    }
    if (!stalled)
      throw ConvergenceError("double_quench_state: projection series did not stall", sum,
                             {ctrl.max_terms, achieved});
    // free phase evolution in the final basis from t1 to t
    const double ef = forward ? psi_energy(2 * k) : phi_energy(2 * k);
    out.coefficients[k] = std::exp(Complex(0.0, -ef * (t - t1))) * sum;
    norm_sum += std::norm(out.coefficients[k]);
  }
  out.unitarity_defect = 1.0 - norm_sum;
  return out;
}

double double_quench_overlap(const QuenchScenario& scenario, double t,
                             const SummationControl& ctrl) {
  const DoubleQuenchState st = double_quench_state(scenario, t, scenario.initial_index, ctrl);
  return std::abs(st.coefficients[scenario.initial_index]);
}

}  // namespace tgq
