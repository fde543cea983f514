#include "tgq/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "tgq/quench_dynamics.hpp"
#include "tgq/special_functions.hpp"

namespace tgq {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfRangeCut = 12.0;  // e^{-z^2} mass beyond is ~1e-63

// 16-point Gauss-Legendre on [0, 1].
struct GL16 {
  static constexpr int n = 16;
  static const double x[16];
  static const double w[16];
};
const double GL16::x[16] = {
    0.005299532504175031, 0.0277124884633837,  0.06718439880608412, 0.12229779582249845,
    0.19106187779867811,  0.27099161117138637, 0.35919822461037054, 0.4524937450811813,
    0.5475062549188188,   0.6408017753896295,  0.7290083888286136,  0.8089381222013219,
    0.8777022041775016,   0.9328156011939159,  0.9722875115366163,  0.994700467495825};
const double GL16::w[16] = {
    0.013576229705877047, 0.03112676196932395, 0.04757925584124639, 0.06231448562776694,
    0.07479799440828837,  0.08457825969750127, 0.09130170752246179, 0.0947253052275343,
    0.0947253052275343,   0.09130170752246179, 0.08457825969750127, 0.07479799440828837,
    0.06231448562776694,  0.04757925584124639, 0.03112676196932395, 0.013576229705877047};

// Dense composite-GL discretization of the measure e^{-z^2} dz on [0, cut],
// used by the Stieltjes construction.
void discretize_measure(int panels, std::vector<double>& xs, std::vector<double>& vs) {
  const double h = kHalfRangeCut / panels;
  xs.clear();
  vs.clear();
  xs.reserve(panels * GL16::n);
  vs.reserve(panels * GL16::n);
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    for (int i = 0; i < GL16::n; ++i) {
      const double x = a + GL16::x[i] * h;
      xs.push_back(x);
      vs.push_back(h * GL16::w[i] * std::exp(-x * x));
    }
  }
}

}  // namespace

HalfRangeRule::HalfRangeRule(int q) {
  if (q < 1 || q > 600) throw std::invalid_argument("HalfRangeRule: nodes must be in [1, 600]");
  // Lanczos/Stieltjes with full reorthogonalization on a dense discretization.
  std::vector<double> xs, vs;
  discretize_measure(std::max(80, q), xs, vs);
  const int P = static_cast<int>(xs.size());

  Eigen::Map<const Eigen::VectorXd> x(xs.data(), P), v(vs.data(), P);
  Eigen::VectorXd alpha(q), beta(q);  // beta[0] = total mass
  Eigen::MatrixXd p(P, q);

  beta[0] = v.sum();
  p.col(0).setConstant(1.0 / std::sqrt(beta[0]));
  for (int k = 0; k < q; ++k) {
    alpha[k] = (v.array() * x.array() * p.col(k).array().square()).sum();
    if (k + 1 == q) break;
    Eigen::VectorXd r = (x.array() - alpha[k]) * p.col(k).array();
    if (k > 0) r -= std::sqrt(beta[k]) * p.col(k - 1);
    // full reorthogonalization keeps the discrete Lanczos basis clean
    for (int j = 0; j <= k; ++j) {
      const double proj = (v.array() * r.array() * p.col(j).array()).sum();
      r -= proj * p.col(j);
    }
    beta[k + 1] = (v.array() * r.array().square()).sum();
    if (!(beta[k + 1] > 0.0))
      throw std::runtime_error("HalfRangeRule: Stieltjes breakdown");
    p.col(k + 1) = r / std::sqrt(beta[k + 1]);
  }

  Eigen::VectorXd diag = alpha;
  Eigen::VectorXd sub(q - 1);
  for (int k = 0; k + 1 < q; ++k) sub[k] = std::sqrt(beta[k + 1]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("HalfRangeRule: tridiagonal eigensolve failed");

  // Christoffel weights through the Gaussian-folded orthonormal polynomials
  // q_k(x) = p_k(x) e^{-x^2/2}: the first-eigenvector-component route cannot
  // represent the e^{-x^2} scale of the edge weights, the folded sum can.
  nodes_.resize(q);
  weights_.resize(q);
  for (int i = 0; i < q; ++i) {
    const double xi = es.eigenvalues()[i];
    nodes_[i] = xi;
    double qm = 0.0;
    double qk = std::exp(-0.5 * xi * xi) / std::sqrt(beta[0]);
    double sum = qk * qk;
    for (int k = 0; k + 1 < q; ++k) {
      const double qn = ((xi - alpha[k]) * qk - (k > 0 ? std::sqrt(beta[k]) * qm : 0.0)) /
                        std::sqrt(beta[k + 1]);
      qm = qk;
      qk = qn;
      sum += qk * qk;
    }
    weights_[i] = 1.0 / sum;
  }
}

const HalfRangeRule& reference_rule() {
  static const HalfRangeRule rule(200);
  return rule;
}

double EigenstateRef::operator()(double z) const {
  return basis == Basis::noninteracting ? psi_eval(index, z) : phi_eval(index, z);
}

double EigenstateRef::energy() const {
  return basis == Basis::noninteracting ? psi_energy(index) : phi_energy(index);
}

int EigenstateRef::oscillator_order() const {
  return basis == Basis::noninteracting ? index : 2 * (index / 2) + 1;
}

bool EigenstateRef::even_parity() const {
  // psi_n has the parity of n; phi_{2n} is even, phi_{2n+1} odd
  return index % 2 == 0;
}

double quadrature_overlap(const RealFn& f, const RealFn& g, const HalfRangeRule& rule) {
  const auto xs = rule.nodes();
  const auto ws = rule.weights();
  double sum = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    sum += ws[i] * (f(xs[i]) * g(xs[i]) + f(-xs[i]) * g(-xs[i]));
  }
  return sum;
}

double quadrature_overlap(const RealFn& f, const RealFn& g) {
  return quadrature_overlap(f, g, reference_rule());
}

namespace {
// The rule lives on [0, 12]; a product of two states is representable there
// only while the faster-decaying factor confines it, i.e. the smaller
// turning point sqrt(2n+1) stays a few units inside the cut.
constexpr int kMaxBulkOrder = 44;
}  // namespace

double quadrature_overlap(const EigenstateRef& a, const EigenstateRef& b) {
  const HalfRangeRule& rule = reference_rule();
  if (a.oscillator_order() + b.oscillator_order() > rule.max_product_order())
    throw ResolutionError("quadrature_overlap: product degree exceeds the reference rule");
  if (std::min(a.oscillator_order(), b.oscillator_order()) > kMaxBulkOrder)
    throw ResolutionError("quadrature_overlap: product mass extends beyond the rule domain");
  return quadrature_overlap(RealFn(a), RealFn(b), rule);
}

namespace {

// Composite-GL nodes over [0, R] dense enough for oscillator order `order`,
// weights WITHOUT any factoring (integrand carries its own Gaussian).
void propagation_nodes(int order, std::vector<double>& xs, std::vector<double>& ws) {
  const double R = kHalfRangeCut;
  const double k_max = std::sqrt(2.0 * (order + 1.5)) + 2.0;
  const double pts_per_unit = std::max(20.0, 8.0 * k_max / (2.0 * kPi) + 10.0);
  const int panels = static_cast<int>(std::ceil(R * pts_per_unit / GL16::n));
  const double h = R / panels;
  xs.clear();
  ws.clear();
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    for (int i = 0; i < GL16::n; ++i) {
      xs.push_back(a + GL16::x[i] * h);
      ws.push_back(h * GL16::w[i]);
    }
  }
}

}  // namespace

Complex TruncatedPropagation::evaluate(double z) const {
  std::vector<Complex> out = evaluate_many(std::span<const double>(&z, 1));
  return out[0];
}

std::vector<Complex> TruncatedPropagation::evaluate_many(std::span<const double> z) const {
  std::vector<Complex> out(z.size(), Complex(0.0, 0.0));
  if (state_indices.empty()) return out;
  const int max_order =
      final_basis == Basis::noninteracting
          ? state_indices.back()
          : 2 * (state_indices.back() / 2) + 1;
  std::vector<double> basis_vals(max_order + 1);
  std::vector<Complex> phases(state_indices.size());
  for (std::size_t j = 0; j < state_indices.size(); ++j)
    phases[j] = std::exp(Complex(0.0, -energies[j] * time));
  for (std::size_t iz = 0; iz < z.size(); ++iz) {
    const double zz = z[iz];
    Complex acc(0.0, 0.0);
    if (final_basis == Basis::noninteracting) {
      psi_eval_upto(max_order, zz, basis_vals);
      for (std::size_t j = 0; j < state_indices.size(); ++j)
        acc += coefficients[j] * phases[j] * basis_vals[state_indices[j]];
    } else {
      // phi_{2n} needs |z|, phi_{2n+1} is psi_{2n+1}(z); retained states share parity
      const bool even = state_indices[0] % 2 == 0;
      psi_eval_upto(max_order, even ? std::abs(zz) : zz, basis_vals);
      for (std::size_t j = 0; j < state_indices.size(); ++j) {
        const int osc = 2 * (state_indices[j] / 2) + 1;
        acc += coefficients[j] * phases[j] * basis_vals[osc];
      }
    }
    out[iz] = acc;
  }
  return out;
}

TruncatedPropagation truncated_propagate(EigenstateRef initial, Basis final_basis, int n_states,
                                         double t) {
  if (n_states < 1 || n_states > 2000)
    throw std::invalid_argument("truncated_propagate: n_states must be in [1, 2000]");
  if (initial.oscillator_order() > kMaxBulkOrder)
    throw ResolutionError("truncated_propagate: initial state extends beyond the rule domain");
  TruncatedPropagation out;
  out.initial_basis = initial.basis;
  out.initial_index = initial.index;
  out.final_basis = final_basis;
  out.n_states = n_states;
  out.time = t;

  // retain only the matching-parity final states; the others have zero overlap
  const bool even = initial.even_parity();
  out.state_indices.reserve(n_states);
  for (int j = 0; j < n_states; ++j) out.state_indices.push_back(even ? 2 * j : 2 * j + 1);
  const int max_order = final_basis == Basis::noninteracting
                            ? out.state_indices.back()
                            : 2 * (out.state_indices.back() / 2) + 1;

  std::vector<double> xs, ws;
  propagation_nodes(std::max(max_order, initial.oscillator_order()), xs, ws);

  // one recurrence pass per node accumulates every overlap at once
  out.coefficients.assign(n_states, 0.0);
  std::vector<double> basis_vals(max_order + 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    for (const double sgn : {1.0, -1.0}) {
      const double z = sgn * x;
      const double f0 = initial(z);
      if (f0 == 0.0) continue;
      if (final_basis == Basis::noninteracting) {
        psi_eval_upto(max_order, z, basis_vals);
        for (int j = 0; j < n_states; ++j)
          out.coefficients[j] += ws[i] * f0 * basis_vals[out.state_indices[j]];
      } else {
        psi_eval_upto(max_order, even ? std::abs(z) : z, basis_vals);
        for (int j = 0; j < n_states; ++j) {
          const int osc = 2 * (out.state_indices[j] / 2) + 1;
          out.coefficients[j] += ws[i] * f0 * basis_vals[osc];
        }
      }
    }
  }

  out.energies.reserve(n_states);
  for (int j = 0; j < n_states; ++j) {
    out.energies.push_back(final_basis == Basis::noninteracting
                               ? psi_energy(out.state_indices[j])
                               : phi_energy(out.state_indices[j]));
  }
  double norm = 0.0;
  for (double c : out.coefficients) norm += c * c;
  out.unitarity_defect = 1.0 - norm;
  return out;
}

CompareResult compare(std::span<const Complex> a, std::span<const Complex> b,
                      std::span<const double> z, double abs_lo, double abs_hi) {
  if (a.size() != b.size() || a.size() != z.size())
    throw std::invalid_argument("compare: size mismatch");
  CompareResult r;
  double l2 = 0.0;
  const double h = z.size() > 1 ? z[1] - z[0] : 1.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double az = std::abs(z[i]);
    if (az < abs_lo || az > abs_hi) continue;
    const double e = std::abs(a[i] - b[i]);
    r.sup_error = std::max(r.sup_error, e);
    l2 += h * e * e;
  }
  r.l2_error = std::sqrt(l2);
  return r;
}

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1.0);
  return v;
}

VerifyCheck make_check(std::string name, std::string region, int n_max, double sup, double l2,
                       double threshold) {
  VerifyCheck c;
  c.name = std::move(name);
  c.region = std::move(region);
  c.n_max = n_max;
  c.sup_error = sup;
  c.l2_error = l2;
  c.threshold = threshold;
  c.pass = sup <= threshold;
  return c;
}

}  // namespace

std::vector<VerifyCheck> run_verification() {
  std::vector<VerifyCheck> checks;

  {  // closed-form overlaps against the quadrature oracle, both directions
    double sup = 0.0;
    for (int m = 0; m <= 20; ++m)
      for (int n = 0; n <= 20; ++n) {
        const double q = quadrature_overlap(EigenstateRef{Basis::tonks_girardeau, 2 * n},
                                            EigenstateRef{Basis::noninteracting, 2 * m});
        sup = std::max(sup, std::abs(q - overlap_cmn(m, n)));
      }
    checks.push_back(make_check("cmn_closed_vs_quadrature", "m,n <= 20", 20, sup, 0.0, 1e-10));
  }

  {  // Gram matrices of the first sixteen states in each regime
    double sup_psi = 0.0, sup_phi = 0.0;
    for (int i = 0; i <= 15; ++i)
      for (int j = 0; j <= 15; ++j) {
        const double qpsi = quadrature_overlap(EigenstateRef{Basis::noninteracting, i},
                                               EigenstateRef{Basis::noninteracting, j});
        const double qphi = quadrature_overlap(EigenstateRef{Basis::tonks_girardeau, i},
                                               EigenstateRef{Basis::tonks_girardeau, j});
        const double d = (i == j) ? 1.0 : 0.0;
        sup_psi = std::max(sup_psi, std::abs(qpsi - d));
        sup_phi = std::max(sup_phi, std::abs(qphi - d));
      }
    checks.push_back(make_check("gram_psi_identity", "n <= 15", 15, sup_psi, 0.0, 1e-9));
    checks.push_back(make_check("gram_phi_identity", "n <= 15", 15, sup_phi, 0.0, 1e-9));
  }

  {  // parity selection rule <phi_{2n+1}|psi_{2m}> = 0
    double sup = 0.0;
    for (int n = 0; n <= 6; ++n)
      for (int m = 0; m <= 6; ++m)
        sup = std::max(sup, std::abs(quadrature_overlap(
                                EigenstateRef{Basis::tonks_girardeau, 2 * n + 1},
                                EigenstateRef{Basis::noninteracting, 2 * m})));
    checks.push_back(make_check("parity_zero_overlaps", "n,m <= 6", 6, sup, 0.0, 1e-12));
  }

  const std::vector<double> zs = linspace(-6.0, 6.0, 241);

  {  // odd states evolve by a phase only
    const double t = 0.7;
    auto prop = truncated_propagate({Basis::noninteracting, 1}, Basis::tonks_girardeau, 50, t);
    std::vector<Complex> a = prop.evaluate_many(zs), b(zs.size());
    const Complex phase = std::exp(Complex(0.0, -1.5 * t));
    for (std::size_t i = 0; i < zs.size(); ++i) b[i] = phase * psi_eval(1, zs[i]);
    const auto r = compare(a, b, zs, 0.0, 6.0);
    checks.push_back(make_check("trivial_odd_state", "|z| <= 6", 50, r.sup_error, r.l2_error, 1e-12));
  }

  for (const double t : {0.4, kPi / 2}) {  // forward propagation vs closed form
    auto prop = truncated_propagate({Basis::noninteracting, 0}, Basis::tonks_girardeau, 400, t);
    std::vector<Complex> a = prop.evaluate_many(zs), b(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) b[i] = psi0_closed(zs[i], t);
    const auto r = compare(a, b, zs, 0.3, 6.0);
    checks.push_back(make_check("forward_propagation_vs_closed_t" + std::to_string(t),
                                "0.3 <= |z| <= 6", 400, r.sup_error, r.l2_error, 2e-3));
  }

  for (const double t : {0.4, kPi / 2}) {  // reverse propagation vs closed form
    auto prop = truncated_propagate({Basis::tonks_girardeau, 0}, Basis::noninteracting, 200, t);
    std::vector<Complex> a = prop.evaluate_many(zs), b(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) b[i] = phi0_closed(zs[i], t);
    const auto r = compare(a, b, zs, 0.3, 6.0);
    checks.push_back(make_check("reverse_propagation_vs_closed_t" + std::to_string(t),
                                "0.3 <= |z| <= 6", 200, r.sup_error, r.l2_error, 3e-4));
  }

  for (const double t : {0.4, 1.0, kPi / 2}) {  // closed forms vs adaptive series
    double sup_f = 0.0, sup_r = 0.0;
    for (double z = 0.25; z <= 6.0; z += 0.25) {
      sup_f = std::max(sup_f, std::abs(psi_m_series(0, z, t).value - psi0_closed(z, t)));
      sup_r = std::max(sup_r, std::abs(phi_m_series(0, z, t).value - phi0_closed(z, t)));
    }
    checks.push_back(make_check("series_vs_closed_forward_t" + std::to_string(t),
                                "0.25 <= |z| <= 6", 0, sup_f, 0.0, 1e-7));
    checks.push_back(make_check("series_vs_closed_reverse_t" + std::to_string(t),
                                "0.25 <= |z| <= 6", 0, sup_r, 0.0, 1e-7));
  }

  {  // unitarity defect must fall like the coefficient tail, ~N^{-1/2} forward
    std::vector<double> ns, defects;
    bool monotone = true;
    double prev = 1.0;
    for (const int n : {100, 200, 400, 800}) {
      auto prop = truncated_propagate({Basis::noninteracting, 0}, Basis::tonks_girardeau, n, 0.4);
      ns.push_back(n);
      defects.push_back(prop.unitarity_defect);
      if (prop.unitarity_defect >= prev) monotone = false;
      prev = prop.unitarity_defect;
    }
    const double slope = log_log_slope(ns, defects);
    VerifyCheck c = make_check("unitarity_defect_power_law", "N in {100..800}", 800,
                               std::abs(slope + 0.5), 0.0, 0.15);
    c.pass = c.pass && monotone;
    checks.push_back(c);
  }

  {  // t = 0 recovery of the initial state (forward case excludes the origin)
    auto fwd = truncated_propagate({Basis::noninteracting, 0}, Basis::tonks_girardeau, 400, 0.0);
    std::vector<Complex> a = fwd.evaluate_many(zs), b(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) b[i] = psi_eval(0, zs[i]);
    const auto rf = compare(a, b, zs, 0.2, 6.0);
    checks.push_back(make_check("initial_recovery_forward_t0", "0.2 <= |z| <= 6", 400,
                                rf.sup_error, rf.l2_error, 5e-2));

    auto rev = truncated_propagate({Basis::tonks_girardeau, 0}, Basis::noninteracting, 200, 0.0);
    std::vector<Complex> c = rev.evaluate_many(zs), d(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) d[i] = phi_eval(0, zs[i]);
    const auto rr = compare(c, d, zs, 0.2, 6.0);
    checks.push_back(make_check("initial_recovery_reverse_t0", "0.2 <= |z| <= 6", 200,
                                rr.sup_error, rr.l2_error, 5e-3));
  }

  return checks;
}

}  // namespace tgq
