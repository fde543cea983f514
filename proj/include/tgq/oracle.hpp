#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tgq/oscillator_basis.hpp"
#include "tgq/summation.hpp"

namespace tgq {

class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gauss rule for the weight e^{-z^2} on the half line z >= 0, built by a
// discretized Stieltjes procedure and Golub-Welsch. Weights carry the e^{x^2}
// factor, so integrands are passed whole (their Gaussian included):
//   int_0^inf F(z) dz  ~=  sum_i W_i F(x_i).
class HalfRangeRule {
 public:
  explicit HalfRangeRule(int nodes);
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  // Largest oscillator-order sum a+b for which psi_a * psi_b is integrated
  // exactly (polynomial degree a+b <= 2q-1).
  int max_product_order() const { return 2 * size() - 1; }

 private:
  std::vector<double> nodes_, weights_;
};

// The reference 200-node rule shared by all overlap checks.
const HalfRangeRule& reference_rule();

enum class Basis { noninteracting, tonks_girardeau };

struct EigenstateRef {
  Basis basis = Basis::noninteracting;
  int index = 0;
  double operator()(double z) const;
  double energy() const;
  int oscillator_order() const;  // polynomial degree of the state
  bool even_parity() const;
};

using RealFn = std::function<double(double)>;

// <f|g> = int f g dz over the full line, split at z = 0 into two mirrored
// half-range rules (handles the |z| kink of the TG states).
double quadrature_overlap(const RealFn& f, const RealFn& g);
double quadrature_overlap(const RealFn& f, const RealFn& g, const HalfRangeRule& rule);

// Resolution-checked variant; throws ResolutionError when the product degree
// exceeds the rule's exactness capacity.
double quadrature_overlap(const EigenstateRef& a, const EigenstateRef& b);

// Truncated-eigenbasis propagation per the spectral ansatz: the initial state
// is expanded over the first n_states final-regime eigenstates of matching
// parity with quadrature overlaps (never the closed-form c_mn), then each
// component picks up its phase e^{-iEt}.
struct TruncatedPropagation {
  Basis initial_basis;
  int initial_index = 0;
  Basis final_basis;
  int n_states = 0;
  double time = 0.0;
  std::vector<double> coefficients;  // quadrature overlaps, real
  std::vector<double> energies;
  std::vector<int> state_indices;    // final-basis indices retained
  double unitarity_defect = 0.0;     // 1 - sum coeff^2

  Complex evaluate(double z) const;
  std::vector<Complex> evaluate_many(std::span<const double> z) const;
};

TruncatedPropagation truncated_propagate(EigenstateRef initial, Basis final_basis, int n_states,
                                         double t);

struct CompareResult {
  double sup_error = 0.0;
  double l2_error = 0.0;
};

// Errors between two sampled functions over the region abs_lo <= |z| <= abs_hi;
// l2 uses trapezoid weights of the z grid restricted to the region.
CompareResult compare(std::span<const Complex> a, std::span<const Complex> b,
                      std::span<const double> z, double abs_lo, double abs_hi);

struct VerifyCheck {
  std::string name;
  std::string region;
  int n_max = 0;
  double sup_error = 0.0;
  double l2_error = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

// The oracle battery behind the `verify` CLI command. Thresholds here are the
// honest measured envelopes of this implementation (with margin), recorded in
// each check.
std::vector<VerifyCheck> run_verification();

}  // namespace tgq
