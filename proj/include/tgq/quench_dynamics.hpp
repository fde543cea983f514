#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tgq/oscillator_basis.hpp"
#include "tgq/summation.hpp"

namespace tgq {

// Single or double interaction quench between kappa = 0 and kappa = infinity.
// direction forward = 0 -> inf (initial psi_2m), reverse = inf -> 0 (initial
// phi_2m). The first quench happens at t0 = 0; second_quench_time is present
// only for double quenches and must lie in (0, pi].
struct QuenchScenario {
  QuenchDirection direction = QuenchDirection::forward;
  int initial_index = 0;
  std::optional<double> second_quench_time;

  void validate() const;
};

struct GFactor {
  Complex g;          // e^{-it}/sqrt(1 - e^{-2it}), principal branch
  Complex g_squared;  // -1/2 - (i/2) cot t
};

// Throws std::domain_error for t on a multiple of pi (use the limit
// convention of the closed forms there).
GFactor g_factor(double t);

// Closed form for the evolved ground state after the 0 -> inf quench,
// pi^{-1/4} e^{-it/2} e^{-z^2/2} erf(|z| g(t)).  At t = k*pi the t->0-first
// limit convention applies and i^k psi_0(z) is returned. z = 0 gives 0 for
// t outside pi*Z (non-uniform limit; density plots near the origin carry the
// Gibbs-like oscillation).
Complex psi0_closed(double z, double t);

// Closed form for the reverse quench ground state,
// sqrt(2) pi^{-1/4} e^{-3it/2} e^{-z^2/2} [ e^{-z^2 g^2}/(sqrt(pi) g) + z erf(z g) ].
Complex phi0_closed(double z, double t);

enum class EvalMethod { series, hyp3f2, closed_form };

struct SeriesEval {
  Complex value;
  SeriesStats stats;
  bool gibbs_zone = false;  // |z| < 0.2, forward series only
  EvalMethod method = EvalMethod::series;
};

// Eigenbasis series of the evolved state after the 0 -> inf quench,
// sum_n c_mn e^{-i(2n+3/2)t} psi_{2n+1}(|z|). Inside the guard zone the m = 0
// call is served by the closed form; m >= 1 throws GuardZoneError.
SeriesEval psi_m_series(int m, double z, double t, const SummationControl& ctrl = {});

// Reverse-quench series sum_n c_nm e^{-i(2n+1/2)t} psi_{2n}(z) (uniformly
// convergent, no Gibbs zone).
SeriesEval phi_m_series(int m, double z, double t, const SummationControl& ctrl = {});

// The series Sigma_m(z,t) of the reverse-quench wave function, such that
// Phi_m = f_m(z,t) sqrt(2m+1) Sigma_m(z,t).
SeriesEval sigma_m_series(int m, double z, double t, const SummationControl& ctrl = {});

// Common prefactor f_m(z,t) = sqrt(2) pi^{-3/4} e^{-it/2 - z^2/2}
//                             (-1)^m (2m-1)!!/sqrt((2m)!).
Complex f_m_prefactor(int m, double z, double t);

enum class Representation { series, closed_form };

// An evolved relative wave function pinned to one scenario and one time.
// Immutable after construction; grid evaluation uses a fixed summation order
// per point, so results do not depend on how a grid is partitioned. The
// closed form exists for the ground state only; |value| is even in z and
// pi-periodic in t.
class EvolvedState {
 public:
  EvolvedState(QuenchScenario scenario, double time,
               Representation representation = Representation::closed_form,
               SummationControl ctrl = {});

  Complex value(double z) const;
  std::vector<Complex> evaluate_many(std::span<const double> z) const;

  const QuenchScenario& scenario() const { return scenario_; }
  double time() const { return time_; }
  Representation representation() const { return representation_; }
  Complex f_m(double z) const { return m_prefactor_ * std::exp(-0.5 * z * z); }

 private:
  QuenchScenario scenario_;
  double time_;
  Representation representation_;
  SummationControl ctrl_;
  Complex m_prefactor_;  // z-independent part of f_m(z,t), cached
};

struct FidelityResult {
  Complex overlap;   // L(t), the autocorrelation
  double magnitude;  // |L| (fidelity)
  double echo;       // |L|^2 (Loschmidt echo)
  EvalMethod method;
};

enum class FidelityMethod { automatic, closed_form, hyp3f2, series };

SummationControl fidelity_default_control();

// L_m(t) = <psi_2m|Psi_m(t)>. m = 0 has the closed form
// e^{-it/2} (2/pi) arcsin(e^{-it}), valid for all t with continuous boundary
// limits; excited states go through the 3F2 form (guard zone applies).
// The series method sums c_mn^2 phases directly.
FidelityResult loschmidt_forward(int m, double t, FidelityMethod method = FidelityMethod::automatic,
                                 const SummationControl& ctrl = fidelity_default_control());

// L^r_m(t) = <phi_2m|Phi_m(t)>; m = 0 closed form
// e^{-it/2} (2/pi) (sqrt(1-e^{-2it}) + e^{-it} arcsin(e^{-it})).
FidelityResult loschmidt_reverse(int m, double t, FidelityMethod method = FidelityMethod::automatic,
                                 const SummationControl& ctrl = fidelity_default_control());

// Principal arcsin continued to the unit circle via
// arcsin(w) = -i log(iw + sqrt(1-w^2)).
Complex arcsin_unit(Complex w);

// Relative discrepancy of the differentiation relation linking the two
// quench directions: compares (e^{it}/sqrt2) f_m(z,t) (d Sigma_m/dz)(|z|,t)
// (central difference, step h) against psi_m_series(m,z,t). Requires
// |z| > 0.2 and t outside the guard zone.
double verify_derivative_relation(int m, double z, double t, double h,
                                  const SummationControl& ctrl = {});

// Double quench: spectral coefficients over the final basis at time t > t1.
// Scenario a (forward): coefficients <psi_2k|Psi_m(t1)> phase-evolved to t;
// scenario b (reverse): <phi_2k|Phi_m(t1)>.
struct DoubleQuenchState {
  QuenchScenario scenario;
  double time;
  std::vector<Complex> coefficients;  // k = 0..K
  double unitarity_defect;            // 1 - sum |coeff|^2 (truncation bound)
};

DoubleQuenchState double_quench_state(const QuenchScenario& scenario, double t, int k_max,
                                      const SummationControl& ctrl = fidelity_default_control());

// |<initial|state(t)>| for the double quench; constant in t and equal to
// |L_m(t1)| (scenario a) or |L^r_m(t1)| (scenario b).
double double_quench_overlap(const QuenchScenario& scenario, double t,
                             const SummationControl& ctrl = fidelity_default_control());

}  // namespace tgq
