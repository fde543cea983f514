#include "tgq/observables.hpp"

#include <cmath>

#include "tgq/oscillator_basis.hpp"
#include "tgq/quench_dynamics.hpp"

namespace tgq {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSqrt2 = 1.4142135623730951;
}  // namespace

void GridSpec::validate() const {
  if (points < 64 || points % 2 != 0)
    throw std::invalid_argument("GridSpec: points must be even and >= 64");
  if (!(half_width >= 6.0))
    throw std::invalid_argument("GridSpec: half_width must be >= 6");
}

std::vector<double> GridSpec::coords() const {
  std::vector<double> z(points);
  for (int i = 0; i < points; ++i)
    z[i] = -half_width + 2.0 * half_width * i / (points - 1.0);
  return z;
}

std::vector<double> GridSpec::weights() const {
  std::vector<double> w(points, spacing());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

double tail_mass_estimate(TailModel model, double t, double half_width) {
  const double s = std::abs(std::sin(t));
  switch (model) {
    case TailModel::none:
      return std::erfc(half_width);  // Gaussian-decaying states
    case TailModel::forward_quench:
      // rho(z1) -> sqrt(2) sin t / (pi^{3/2} z1^2): mass 2 c / L
      return 2.0 * kSqrt2 * s / (std::pow(kPi, 1.5) * half_width);
    case TailModel::reverse_quench:
      // rho(z1) -> (2 sin t)^3 / (4 sqrt2 pi^{3/2} z1^4): mass (2/3) c / L^3
      return std::pow(2.0 * s, 3.0) /
             (6.0 * kSqrt2 * std::pow(kPi, 1.5) * std::pow(half_width, 3.0));
  }
  return 0.0;
}

TwoBodyState::TwoBodyState(GridSpec grid, int refinement, double time, TailModel tail,
                           Eigen::MatrixXcd fine_values)
    : grid_(grid), refinement_(refinement), time_(time), tail_(tail),
      fine_(std::move(fine_values)) {
  grid_.validate();
  if (refinement_ < 1) throw std::invalid_argument("TwoBodyState: refinement must be >= 1");
  const int nf = refinement_ * (grid_.points - 1) + 1;
  if (fine_.rows() != grid_.points || fine_.cols() != nf)
    throw std::invalid_argument("TwoBodyState: value matrix does not match the grids");
}

Complex TwoBodyState::at(int i, int j) const {
  return fine_(i, static_cast<Eigen::Index>(j) * refinement_);
}

std::vector<double> TwoBodyState::fine_coords() const {
  const int nf = refinement_ * (grid_.points - 1) + 1;
  std::vector<double> z(nf);
  for (int i = 0; i < nf; ++i)
    z[i] = -grid_.half_width + 2.0 * grid_.half_width * i / (nf - 1.0);
  return z;
}

std::vector<double> TwoBodyState::fine_weights() const {
  const int nf = refinement_ * (grid_.points - 1) + 1;
  std::vector<double> w(nf, 2.0 * grid_.half_width / (nf - 1.0));
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

TwoBodyState lab_frame_state(const RelativeFn& relative, double t, const GridSpec& grid,
                             TailModel tail, int refinement) {
  grid.validate();
  const std::vector<double> z1 = grid.coords();
  const int nf = refinement * (grid.points - 1) + 1;
  Eigen::MatrixXcd xi(grid.points, nf);
  const Complex cm_phase = std::exp(Complex(0.0, -0.5 * t));
  for (int j = 0; j < nf; ++j) {
    const double z2 = -grid.half_width + 2.0 * grid.half_width * j / (nf - 1.0);
    for (int i = 0; i < grid.points; ++i) {
      const double rel = (z1[i] - z2) / kSqrt2;
      const double cm = (z1[i] + z2) / kSqrt2;
      xi(i, j) = relative(rel) * psi_eval(0, cm) * cm_phase;
    }
  }
  return TwoBodyState(grid, refinement, t, tail, std::move(xi));
}

ReducedDensityMatrix sdm_build(const TwoBodyState& xi, const GridSpec& grid) {
  grid.validate();
  if (!(xi.grid() == grid))
    throw std::invalid_argument("sdm_build: Xi is not sampled on the requested grid");
  const std::vector<double> wf = xi.fine_weights();
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(wf.data(), wf.size());

  ReducedDensityMatrix rho;
  rho.grid = grid;
  rho.values = xi.fine_values() * w.asDiagonal() * xi.fine_values().adjoint();

  const std::vector<double> wc = grid.weights();
  double tr = 0.0;
  for (int i = 0; i < grid.points; ++i) tr += wc[i] * std::real(rho.values(i, i));
  rho.trace_estimate = tr;
  rho.tail_estimate = tail_mass_estimate(xi.tail_model(), xi.time(), grid.half_width);
  rho.accuracy_warning = rho.tail_estimate > 1e-2;
  return rho;
}

double ReducedDensityMatrix::hermiticity_defect() const {
  return (values - values.adjoint()).cwiseAbs().maxCoeff();
}

std::vector<double> ReducedDensityMatrix::density() const {
  std::vector<double> d(values.rows());
  for (Eigen::Index i = 0; i < values.rows(); ++i) d[i] = std::real(values(i, i));
  return d;
}

ReducedDensityMatrix ReducedDensityMatrix::renormalized() const {
  ReducedDensityMatrix out = *this;
  out.values /= trace_estimate;
  out.trace_estimate = 1.0;
  return out;
}

SpectralDecomposition natural_orbitals(const ReducedDensityMatrix& rho) {
  const int n = rho.grid.points;
  const std::vector<double> wv = rho.grid.weights();
  Eigen::VectorXd sqw(n);
  for (int i = 0; i < n; ++i) sqw[i] = std::sqrt(wv[i]);

  // weight-similarity transform makes the problem Hermitian in l2
  Eigen::MatrixXcd b = sqw.asDiagonal() * rho.values * sqw.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b);
  if (es.info() != Eigen::Success) throw std::runtime_error("natural_orbitals: eigensolve failed");

  const double trace = rho.trace_estimate;
  const double floor = 1e-8 * trace;
  if (es.eigenvalues()(0) < -floor)
    throw std::runtime_error("natural_orbitals: positive-semidefiniteness violated");

  SpectralDecomposition dec;
  dec.grid = rho.grid;
  dec.trace = trace;
  std::vector<int> keep;
  for (int i = n - 1; i >= 0; --i) {
    if (es.eigenvalues()(i) > floor) keep.push_back(i);
  }
  double kept_sum = 0.0;
  for (int i : keep) kept_sum += es.eigenvalues()(i);
  // populations renormalized to the trace estimate: the retention cutoff
  // discards up to N * 1e-8 * trace of eigenvalue mass
  const double rescale = (kept_sum > 0.0) ? trace / kept_sum : 1.0;
  dec.populations.resize(keep.size());
  dec.orbitals.resize(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    dec.populations[j] = rescale * es.eigenvalues()(keep[j]);
    Eigen::VectorXcd beta = es.eigenvectors().col(keep[j]).cwiseQuotient(sqw.cast<Complex>());
    // sign convention: the largest-magnitude component is real positive
    Eigen::Index imax;
    beta.cwiseAbs().maxCoeff(&imax);
    const Complex piv = beta(imax);
    beta *= std::conj(piv) / std::abs(piv);
    dec.orbitals.col(j) = beta;
  }
  return dec;
}

MomentumDistribution momentum_distribution(const SpectralDecomposition& dec, double k_max,
                                           int points) {
  if (points < 16) throw std::invalid_argument("momentum_distribution: too few points");
  if (!(k_max > 0.0)) throw std::invalid_argument("momentum_distribution: k_max must be positive");
  if (dec.grid.spacing() > kPi / k_max)
    throw std::domain_error("momentum_distribution: grid spacing does not resolve k_max");

  const std::vector<double> zv = dec.grid.coords();
  const std::vector<double> wv = dec.grid.weights();
  const int n = dec.grid.points;

  MomentumDistribution out;
  out.k.resize(points);
  out.values.assign(points, 0.0);
  for (int j = 0; j < points; ++j)
    out.k[j] = -k_max + 2.0 * k_max * j / (points - 1.0);

  Eigen::MatrixXcd ft(points, n);
  for (int j = 0; j < points; ++j)
    for (int i = 0; i < n; ++i)
      ft(j, i) = wv[i] / std::sqrt(2.0 * kPi) * std::exp(Complex(0.0, -out.k[j] * zv[i]));

  Eigen::MatrixXcd transformed = ft * dec.orbitals;  // points x orbitals
  for (std::size_t o = 0; o < dec.populations.size(); ++o)
    for (int j = 0; j < points; ++j)
      out.values[j] += dec.populations[o] * std::norm(transformed(j, o));

  for (double& v : out.values) {
    if (v < -1e-12) {
      v = 0.0;
      ++out.clipped_points;
    }
  }
  const double hk = 2.0 * k_max / (points - 1.0);
  double norm = 0.0;
  for (int j = 0; j < points; ++j) {
    const double w = (j == 0 || j == points - 1) ? 0.5 * hk : hk;
    norm += w * out.values[j];
  }
  out.normalization_estimate = norm;
  return out;
}

MomentumDistribution MomentumDistribution::renormalized() const {
  MomentumDistribution out = *this;
  for (double& v : out.values) v /= normalization_estimate;
  out.normalization_estimate = 1.0;
  return out;
}

namespace {

ReducedDensityMatrix analytic_rdm(const GridSpec& grid,
                                  const std::function<double(double, double)>& f) {
  ReducedDensityMatrix rho;
  rho.grid = grid;
  const std::vector<double> z = grid.coords();
  rho.values.resize(grid.points, grid.points);
  for (int i = 0; i < grid.points; ++i)
    for (int j = 0; j < grid.points; ++j) rho.values(i, j) = f(z[i], z[j]);
  const std::vector<double> w = grid.weights();
  double tr = 0.0;
  for (int i = 0; i < grid.points; ++i) tr += w[i] * std::real(rho.values(i, i));
  rho.trace_estimate = tr;
  rho.tail_estimate = tail_mass_estimate(TailModel::none, 0.0, grid.half_width);
  return rho;
}

double rho_b_fn(double z1, double z1p) {
  return std::exp(-0.5 * (z1 * z1 + z1p * z1p)) / kSqrtPi;
}

double rho_f_fn(double z1, double z1p) {
  return (1.0 + 2.0 * z1 * z1p) / (2.0 * kSqrtPi) * std::exp(-0.5 * (z1 * z1 + z1p * z1p));
}

double rho_sf_fn(double z1, double z1p) {
  // split form with sgn(z1'-z1); the sgn-ambiguous bracket vanishes on the
  // diagonal, which defines it by continuity
  double v = rho_f_fn(z1, z1p);
  if (z1 == z1p) return v;
  const double sgn = (z1p > z1) ? 1.0 : -1.0;
  const double bracket = z1p * std::exp(-z1 * z1) - z1 * std::exp(-z1p * z1p) +
                         kSqrtPi * (z1 * z1p + 0.5) * (std::erf(z1) - std::erf(z1p));
  return v + std::exp(-0.5 * (z1 * z1 + z1p * z1p)) / kPi * sgn * bracket;
}

}  // namespace

ReducedDensityMatrix reference_rdm(std::string_view name, const GridSpec& grid) {
  grid.validate();
  if (name == "rho_b") return analytic_rdm(grid, rho_b_fn);
  if (name == "rho_f") return analytic_rdm(grid, rho_f_fn);
  if (name == "rho_sf") return analytic_rdm(grid, rho_sf_fn);
  throw std::invalid_argument("reference_rdm: unknown state name");
}

MomentumDistribution reference_momentum(std::string_view name, const GridSpec& grid, double k_max,
                                        int points) {
  if (name == "n_b" || name == "n_f") {
    MomentumDistribution out;
    out.k.resize(points);
    out.values.resize(points);
    for (int j = 0; j < points; ++j) {
      const double k = -k_max + 2.0 * k_max * j / (points - 1.0);
      out.k[j] = k;
      out.values[j] = (name == "n_b")
                          ? std::exp(-k * k) / kSqrtPi
                          : (1.0 + 2.0 * k * k) / (2.0 * kSqrtPi) * std::exp(-k * k);
    }
    const double hk = 2.0 * k_max / (points - 1.0);
    double norm = 0.0;
    for (int j = 0; j < points; ++j)
      norm += ((j == 0 || j == points - 1) ? 0.5 * hk : hk) * out.values[j];
    out.normalization_estimate = norm;
    return out;
  }
  if (name == "n_sf") {
    // no closed form: full pipeline from phi_0
    const TwoBodyState xi = lab_frame_state([](double z) { return Complex(phi_eval(0, z), 0.0); },
                                            0.0, grid, TailModel::none);
    const ReducedDensityMatrix rho = sdm_build(xi, grid);
    const SpectralDecomposition dec = natural_orbitals(rho);
    return momentum_distribution(dec, k_max, points);
  }
  throw std::invalid_argument("reference_momentum: unknown state name");
}

std::variant<ReducedDensityMatrix, MomentumDistribution> reference_state(std::string_view name,
                                                                         const GridSpec& grid,
                                                                         double k_max, int points) {
  if (name == "rho_b" || name == "rho_f" || name == "rho_sf") return reference_rdm(name, grid);
  return reference_momentum(name, grid, k_max, points);
}

double tail_exponent(const MomentumDistribution& dist, double k_lo, double k_hi) {
  std::vector<double> ks, vs;
  for (std::size_t i = 0; i < dist.k.size(); ++i) {
    if (dist.k[i] >= k_lo && dist.k[i] <= k_hi) {
      ks.push_back(dist.k[i]);
      vs.push_back(dist.values[i]);
    }
  }
  if (ks.size() < 10) throw std::invalid_argument("tail_exponent: fewer than 10 points in window");
  for (double v : vs)
    if (v < 1e-14) throw std::underflow_error("tail_exponent: values below 1e-14 in window");
  return log_log_slope(ks, vs);
}

double distribution_distance(const ReducedDensityMatrix& a, const ReducedDensityMatrix& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("distribution_distance: grid mismatch");
  const std::vector<double> w = a.grid.weights();
  double acc = 0.0;
  for (int i = 0; i < a.grid.points; ++i)
    for (int j = 0; j < a.grid.points; ++j)
      acc += w[i] * w[j] * std::norm(a.values(i, j) - b.values(i, j));
  return std::sqrt(acc);
}

double distribution_distance(const MomentumDistribution& a, const MomentumDistribution& b) {
  if (a.k.size() != b.k.size() || a.k.front() != b.k.front() || a.k.back() != b.k.back())
    throw std::invalid_argument("distribution_distance: grid mismatch");
  const double hk = a.k[1] - a.k[0];
  double acc = 0.0;
  for (std::size_t i = 0; i < a.k.size(); ++i) {
    const double w = (i == 0 || i + 1 == a.k.size()) ? 0.5 * hk : hk;
    const double d = a.values[i] - b.values[i];
    acc += w * d * d;
  }
  return std::sqrt(acc);
}

int count_local_maxima(std::span<const double> values) {
  // rise-then-fall transitions; tolerant of the flat two-point summit every
  // symmetric density has on an even grid
  int count = 0;
  int trend = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    if (d > 0.0) {
      trend = 1;
    } else if (d < 0.0) {
      if (trend == 1) ++count;
      trend = -1;
    }
  }
  return count;
}

std::optional<SlopeWindow> find_slope_plateau(const MomentumDistribution& dist, double target,
                                              double tol, int min_points) {
  // smoothed local slope on the positive-k half
  std::vector<double> ks, ls;
  for (std::size_t i = 0; i < dist.k.size(); ++i) {
    if (dist.k[i] > 0.0 && dist.values[i] > 1e-14) {
      ks.push_back(std::log(dist.k[i]));
      ls.push_back(std::log(dist.values[i]));
    }
  }
  const int n = static_cast<int>(ks.size());
  if (n < min_points) return std::nullopt;
  const int half = 2;
  std::vector<double> slope(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half), hi = std::min(n - 1, i + half);
    slope[i] = (ls[hi] - ls[lo]) / (ks[hi] - ks[lo]);
  }
  int best_lo = -1, best_len = 0;
  int run_lo = -1;
  for (int i = 0; i <= n; ++i) {
    const bool ok = (i < n) && std::abs(slope[i] - target) <= tol;
    if (ok && run_lo < 0) run_lo = i;
    if (!ok && run_lo >= 0) {
      if (i - run_lo > best_len) {
        best_len = i - run_lo;
        best_lo = run_lo;
      }
      run_lo = -1;
    }
  }
  if (best_len < min_points) return std::nullopt;
  SlopeWindow w;
  w.k_lo = std::exp(ks[best_lo]);
  w.k_hi = std::exp(ks[best_lo + best_len - 1]);
  w.points = best_len;
  double s = 0.0;
  for (int i = best_lo; i < best_lo + best_len; ++i) s += slope[i];
  w.slope = s / best_len;
  return w;
}

}  // namespace tgq
