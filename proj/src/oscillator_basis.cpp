#include "tgq/oscillator_basis.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "tgq/special_functions.hpp"

namespace tgq {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kPiQuarterInv = 0.75112554446494248;  // pi^{-1/4}

void check_nonneg(int n, const char* who) {
  if (n < 0) throw std::domain_error(std::string(who) + ": quantum number must be >= 0");
}
}  // namespace

double psi_energy(int n) {
  check_nonneg(n, "psi_energy");
  return n + 0.5;
}

double phi_energy(int n) {
  check_nonneg(n, "phi_energy");
  return 2 * (n / 2) + 1.5;
}

double log_psi_normalization(int n) {
  check_nonneg(n, "log_psi_normalization");
  return -0.25 * std::log(kPi) - 0.5 * (n * std::log(2.0) + log_factorial(n));
}

double psi_eval(int n, double z) {
  check_nonneg(n, "psi_eval");
  double hm = 0.0;
  double h = kPiQuarterInv * std::exp(-0.5 * z * z);
  for (int k = 0; k < n; ++k) {
    const double hn = std::sqrt(2.0 / (k + 1.0)) * z * h - std::sqrt(k / (k + 1.0)) * hm;
    hm = h;
    h = hn;
  }
  return h;
}

void psi_eval_upto(int n_max, double z, std::span<double> out) {
  check_nonneg(n_max, "psi_eval_upto");
  if (out.size() < static_cast<std::size_t>(n_max) + 1)
    throw std::invalid_argument("psi_eval_upto: output span too small");
  out[0] = kPiQuarterInv * std::exp(-0.5 * z * z);
  if (n_max >= 1) out[1] = std::sqrt(2.0) * z * out[0];
  for (int k = 1; k < n_max; ++k)
    out[k + 1] = std::sqrt(2.0 / (k + 1.0)) * z * out[k] - std::sqrt(k / (k + 1.0)) * out[k - 1];
}

double phi_eval(int n, double z) {
  check_nonneg(n, "phi_eval");
  const int base = 2 * (n / 2) + 1;
  return (n % 2 == 0) ? psi_eval(base, std::abs(z)) : psi_eval(base, z);
}

double overlap_cmn(int m, int n) {
  check_nonneg(m, "overlap_cmn");
  check_nonneg(n, "overlap_cmn");
  const int denom = 2 * n + 1 - 2 * m;
  const double log_abs = 0.5 * std::log(2.0 / kPi) + log_double_factorial(2 * m - 1) +
                         log_double_factorial(2 * n + 1) -
                         0.5 * (log_factorial(2 * m) + log_factorial(2 * n + 1)) -
                         std::log(std::abs(static_cast<double>(denom)));
  const int sign = (((m + n) % 2 == 0) ? 1 : -1) * (denom > 0 ? 1 : -1);
  return sign * std::exp(log_abs);
}

double SignedLogValue::value() const {
  if (sign == 0) return 0.0;
  return sign * std::exp(log_abs);
}

SignedLogValue raw_integral_Imn(int m, int n) {
  check_nonneg(m, "raw_integral_Imn");
  check_nonneg(n, "raw_integral_Imn");
  const int denom = 2 * n + 1 - 2 * m;
  SignedLogValue v;
  v.log_abs = (m + n) * std::log(2.0) + log_double_factorial(2 * m - 1) +
              log_double_factorial(2 * n + 1) - std::log(std::abs(static_cast<double>(denom)));
  v.sign = (((m + n) % 2 == 0) ? 1 : -1) * (denom > 0 ? 1 : -1);
  return v;
}

CoefficientStream::CoefficientStream(int m, QuenchDirection dir) : m_(m), dir_(dir) {
  check_nonneg(m, "CoefficientStream");
  value_ = (dir == QuenchDirection::forward) ? overlap_cmn(m, 0) : overlap_cmn(0, m);
}

void CoefficientStream::advance() {
  const int n = n_;
  if (dir_ == QuenchDirection::forward) {
    // c_{m,n+1}/c_{m,n}
    value_ *= -std::sqrt((2 * n + 3) / (2 * n + 2.0)) *
              (2 * n + 1 - 2 * m_) / (2 * n + 3.0 - 2 * m_);
  } else {
    // c_{n+1,m}/c_{n,m}
    value_ *= -std::sqrt((2 * n + 1) / (2 * n + 2.0)) *
              (2 * m_ + 1 - 2 * n) / (2 * m_ - 1.0 - 2 * n);
  }
  ++n_;
}

OverlapTable::OverlapTable(int m_count, int n_count, QuenchDirection direction)
    : m_count_(m_count), n_count_(n_count), direction_(direction) {
  if (m_count <= 0 || n_count <= 0)
    throw std::invalid_argument("OverlapTable: counts must be positive");
  entries_.resize(static_cast<std::size_t>(m_count) * n_count);
  for (int m = 0; m < m_count; ++m) {
    CoefficientStream s(m, direction);
    for (int n = 0; n < n_count; ++n) {
      entries_[static_cast<std::size_t>(m) * n_count + n] = s.current();
      s.advance();
    }
  }
}

double OverlapTable::at(int m, int n) const {
  if (m < 0 || m >= m_count_ || n < 0 || n >= n_count_)
    throw std::out_of_range("OverlapTable::at");
  return entries_[static_cast<std::size_t>(m) * n_count_ + n];
}

double OverlapTable::row_square_sum(int m) const {
  double s = 0.0;
  for (int n = 0; n < n_count_; ++n) {
    const double c = at(m, n);
    s += c * c;
  }
  return s;
}

void OverlapTable::write_csv(std::ostream& os) const {
  os << "m,n,c_mn\n";
  char buf[40];
  for (int m = 0; m < m_count_; ++m)
    for (int n = 0; n < n_count_; ++n) {
      std::snprintf(buf, sizeof(buf), "%.17g", at(m, n));
      os << m << ',' << n << ',' << buf << '\n';
    }
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("log_log_slope: need matching inputs, >= 2 points");
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::domain_error("log_log_slope: inputs must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double det = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / det;
}

double coefficient_decay_exponent(int m, QuenchDirection dir, int n_lo, int n_hi) {
  if (n_lo < 50 || n_hi > 10000 || n_hi - n_lo + 1 < 100)
    throw std::invalid_argument(
        "coefficient_decay_exponent: range must lie in [50, 1e4] with >= 100 points");
  std::vector<double> ns, c2;
  ns.reserve(n_hi - n_lo + 1);
  c2.reserve(n_hi - n_lo + 1);
  CoefficientStream s(m, dir);
  for (int n = 0; n <= n_hi; ++n) {
    if (n >= n_lo) {
      ns.push_back(n);
      c2.push_back(s.current() * s.current());
    }
    s.advance();
  }
  return log_log_slope(ns, c2);
}

double energy_partial_sum(int m, QuenchDirection dir, int n_max) {
  check_nonneg(n_max, "energy_partial_sum");
  CoefficientStream s(m, dir);
  double sum = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const double c = s.current();
    const double e = (dir == QuenchDirection::forward) ? phi_energy(2 * n) : psi_energy(2 * n);
    sum += c * c * e;
    s.advance();
  }
  return sum;
}

}  // namespace tgq
