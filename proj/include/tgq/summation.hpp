#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace tgq {

using Complex = std::complex<double>;

// Stopping rule for the infinite sums (wave-function series, fidelity series,
// 3F2). Terms on the unit circle decay only like a power of n with an
// oscillating phase, so stopping on term smallness alone is unreliable;
// instead a run of consecutive partial-sum estimates must agree.
struct SummationControl {
  std::size_t max_terms = 200000;
  double abs_tol = 1e-10;
  std::size_t stall_window = 2;

  void validate() const {
    if (max_terms == 0 || stall_window == 0 || max_terms < stall_window)
      throw std::invalid_argument("SummationControl: require max_terms >= stall_window >= 1");
    if (!(abs_tol > 0.0))
      throw std::invalid_argument("SummationControl: require abs_tol > 0");
  }
};

struct SeriesStats {
  std::size_t terms = 0;
  double achieved_tol = 0.0;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& msg, Complex last_partial, SeriesStats stats)
      : std::runtime_error(msg), last_partial_(last_partial), stats_(stats) {}
  Complex last_partial() const { return last_partial_; }
  const SeriesStats& stats() const { return stats_; }

 private:
  Complex last_partial_;
  SeriesStats stats_;
};

// Thrown when a series is requested within the guard zone around t in pi*Z,
// where the phase exp(-2it) stalls; callers should use the closed forms there.
class GuardZoneError : public std::domain_error {
 public:
  explicit GuardZoneError(double t)
      : std::domain_error("t = " + std::to_string(t) +
                          " is within the guard zone of a multiple of pi; use the closed form") {}
};

inline constexpr double kGuardDelta = 0.05;

// Distance of t to the nearest multiple of pi.
double distance_to_pi_multiple(double t);
bool in_guard_zone(double t);

}  // namespace tgq
