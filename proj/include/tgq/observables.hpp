#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "tgq/summation.hpp"

namespace tgq {

// Symmetric position grid [-L, L]. points is even, so z = 0 is never a node
// (which also keeps the Psi_0 origin advisory case off density grids).
struct GridSpec {
  double half_width = 12.0;
  int points = 512;

  void validate() const;
  double spacing() const { return 2.0 * half_width / (points - 1); }
  std::vector<double> coords() const;
  std::vector<double> weights() const;  // trapezoid; sums to 2L exactly
  bool operator==(const GridSpec&) const = default;
};

// Analytic envelope for the probability mass outside [-L, L]. The evolved
// forward-quench state carries 1/z^2 density tails, the reverse one 1/z^4.
enum class TailModel { none, forward_quench, reverse_quench };

double tail_mass_estimate(TailModel model, double t, double half_width);

using RelativeFn = std::function<Complex(double)>;

// Two-body lab-frame function Xi(z1, z2) = rel((z1-z2)/sqrt2) chi_0((z1+z2)/sqrt2) e^{-it/2},
// sampled on the coarse z1 grid times an integer-refined z2 grid. Refinement
// keeps the |z_rel| kink (which falls on z2 = z1, a coarse node) on fine
// nodes and drives the z2-quadrature error below 1e-6.
class TwoBodyState {
 public:
  TwoBodyState(GridSpec grid, int refinement, double time, TailModel tail,
               Eigen::MatrixXcd fine_values);
  const GridSpec& grid() const { return grid_; }
  int refinement() const { return refinement_; }
  double time() const { return time_; }
  TailModel tail_model() const { return tail_; }
  Complex at(int i, int j) const;  // coarse x coarse view
  const Eigen::MatrixXcd& fine_values() const { return fine_; }
  std::vector<double> fine_coords() const;
  std::vector<double> fine_weights() const;

 private:
  GridSpec grid_;
  int refinement_;
  double time_;
  TailModel tail_;
  Eigen::MatrixXcd fine_;  // rows: coarse z1, cols: fine z2
};

TwoBodyState lab_frame_state(const RelativeFn& relative, double t, const GridSpec& grid,
                             TailModel tail = TailModel::none, int refinement = 16);

struct ReducedDensityMatrix {
  GridSpec grid;
  Eigen::MatrixXcd values;  // rho(z1, z1')
  double trace_estimate = 0.0;
  double tail_estimate = 0.0;
  bool accuracy_warning = false;  // tail_estimate > 1e-2

  double hermiticity_defect() const;
  std::vector<double> density() const;      // real diagonal
  ReducedDensityMatrix renormalized() const;  // trace scaled to one on the grid
};

ReducedDensityMatrix sdm_build(const TwoBodyState& xi, const GridSpec& grid);

struct SpectralDecomposition {
  GridSpec grid;
  std::vector<double> populations;  // descending, retained above 1e-8 * trace
  Eigen::MatrixXcd orbitals;        // column i: beta_i, L2-orthonormal w.r.t. grid weights
  double trace = 0.0;
};

// Weighted Hermitian eigenproblem of the discretized SDM. Throws when an
// eigenvalue falls below -1e-8 * trace (PSD violation).
SpectralDecomposition natural_orbitals(const ReducedDensityMatrix& rho);

struct MomentumDistribution {
  std::vector<double> k;
  std::vector<double> values;
  double normalization_estimate = 0.0;
  int clipped_points = 0;  // entries below -1e-12 clipped to zero

  MomentumDistribution renormalized() const;
};

// n(k) = sum_i lambda_i |beta~_i(k)|^2 with the 1/sqrt(2 pi) transform
// convention. Orbital grid spacing must resolve k_max (spacing <= pi/k_max).
MomentumDistribution momentum_distribution(const SpectralDecomposition& dec, double k_max,
                                           int points);

// Analytic reference states: rho_b, rho_f, rho_sf as RDMs; n_b, n_f closed
// form, n_sf through the full pipeline from phi_0 (no closed form exists).
ReducedDensityMatrix reference_rdm(std::string_view name, const GridSpec& grid);
MomentumDistribution reference_momentum(std::string_view name, const GridSpec& grid, double k_max,
                                        int points);
std::variant<ReducedDensityMatrix, MomentumDistribution> reference_state(std::string_view name,
                                                                         const GridSpec& grid,
                                                                         double k_max = 12.0,
                                                                         int points = 1024);

// Local log-log slope over k in [k_lo, k_hi]; needs >= 10 points, all values
// above 1e-14.
double tail_exponent(const MomentumDistribution& dist, double k_lo, double k_hi);

// Quadrature-weighted L2 distances on matching grids.
double distribution_distance(const ReducedDensityMatrix& a, const ReducedDensityMatrix& b);
double distribution_distance(const MomentumDistribution& a, const MomentumDistribution& b);

int count_local_maxima(std::span<const double> values);

struct SlopeWindow {
  double k_lo = 0.0, k_hi = 0.0, slope = 0.0;
  int points = 0;
};

// Longest contiguous k > 0 run whose smoothed local log-log slope stays
// within tol of target.
std::optional<SlopeWindow> find_slope_plateau(const MomentumDistribution& dist, double target,
                                              double tol, int min_points);

}  // namespace tgq
