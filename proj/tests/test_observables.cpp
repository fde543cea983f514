#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tgq/observables.hpp"
#include "tgq/oscillator_basis.hpp"
#include "tgq/quench_dynamics.hpp"

using tgq::Complex;
using tgq::GridSpec;
using tgq::TailModel;

namespace {

GridSpec small_grid() { return GridSpec{8.0, 128}; }

tgq::RelativeFn psi0_fn() {
  return [](double z) { return Complex(tgq::psi_eval(0, z), 0.0); };
}
tgq::RelativeFn phi0_fn() {
  return [](double z) { return Complex(tgq::phi_eval(0, z), 0.0); };
}

}  // namespace

TEST_CASE("grid spec") {
  GridSpec g{12.0, 512};
  g.validate();
  const auto w = g.weights();
  double sum = 0.0;
  for (double x : w) sum += x;
  CHECK(sum == doctest::Approx(24.0).epsilon(1e-14));
  CHECK(g.coords().front() == -12.0);
  CHECK(g.coords().back() == 12.0);
  CHECK_THROWS_AS((GridSpec{12.0, 511}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GridSpec{12.0, 32}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GridSpec{4.0, 128}.validate()), std::invalid_argument);
}

TEST_CASE("lab-frame state of the noninteracting ground state is a product Gaussian") {
  const GridSpec g = small_grid();
  const auto xi = lab_frame_state(psi0_fn(), 0.0, g, TailModel::none, 4);
  const auto z = g.coords();
  for (int i : {3, 40, 64, 100}) {
    for (int j : {5, 41, 90}) {
      const double want = std::exp(-0.5 * (z[i] * z[i] + z[j] * z[j])) / std::sqrt(M_PI);
      CHECK(std::abs(xi.at(i, j) - Complex(want, 0.0)) < 1e-12);
      CHECK(std::abs(xi.at(i, j) - xi.at(j, i)) < 1e-12);  // bosonic symmetry
    }
  }
}

TEST_CASE("SDM from psi_0 reproduces rho_b") {
  const GridSpec g = small_grid();
  const auto xi = lab_frame_state(psi0_fn(), 0.0, g, TailModel::none, 4);
  const auto rho = sdm_build(xi, g);
  const auto ref = tgq::reference_rdm("rho_b", g);
  double sup = 0.0;
  for (int i = 0; i < g.points; i += 7)
    for (int j = 0; j < g.points; j += 7)
      sup = std::max(sup, std::abs(rho.values(i, j) - ref.values(i, j)));
  CHECK(sup < 1e-8);
  CHECK(rho.hermiticity_defect() < 1e-10);
  CHECK(rho.trace_estimate == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_FALSE(rho.accuracy_warning);
}

TEST_CASE("SDM from phi_0 reproduces the closed-form rho_sf") {
  // the |z| kink limits the z2 quadrature to O(h_fine^2); the coarse unit-test
  // grid needs a deeper refinement than the production default
  const GridSpec g = small_grid();
  const auto xi = lab_frame_state(phi0_fn(), 0.0, g, TailModel::none, 48);
  const auto rho = sdm_build(xi, g);
  const auto ref = tgq::reference_rdm("rho_sf", g);
  double sup = 0.0;
  for (int i = 0; i < g.points; ++i)
    for (int j = 0; j < g.points; ++j)
      sup = std::max(sup, std::abs(rho.values(i, j) - ref.values(i, j)));
  CHECK(sup < 1e-6);
  // rho_sf and rho_f share their diagonal
  const auto rf = tgq::reference_rdm("rho_f", g);
  for (int i = 0; i < g.points; i += 5)
    CHECK(std::abs(ref.values(i, i) - rf.values(i, i)) < 1e-14);
}

TEST_CASE("natural orbitals") {
  const GridSpec g = small_grid();
  SUBCASE("pure product state has one population") {
    const auto dec = natural_orbitals(tgq::reference_rdm("rho_b", g));
    CHECK(dec.populations[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK((dec.populations.size() < 2 || dec.populations[1] < 1e-7));
  }
  SUBCASE("fermionic ground state splits into two equal halves") {
    const auto dec = natural_orbitals(tgq::reference_rdm("rho_f", g));
    REQUIRE(dec.populations.size() >= 2);
    CHECK(dec.populations[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(dec.populations[1] == doctest::Approx(0.5).epsilon(1e-6));
    // the degenerate pair spans {psi_0, psi_1}: the projector onto the two
    // leading orbitals must reproduce both states (individual orbitals may be
    // arbitrary rotations within the subspace)
    const auto z = g.coords();
    const auto w = g.weights();
    for (int state : {0, 1}) {
      std::vector<Complex> proj(g.points, 0.0);
      for (int orb : {0, 1}) {
        Complex coef = 0.0;
        for (int i = 0; i < g.points; ++i)
          coef += w[i] * std::conj(dec.orbitals(i, orb)) * tgq::psi_eval(state, z[i]);
        for (int i = 0; i < g.points; ++i) proj[i] += coef * dec.orbitals(i, orb);
      }
      double dev = 0.0;
      for (int i = 0; i < g.points; ++i)
        dev = std::max(dev, std::abs(proj[i] - tgq::psi_eval(state, z[i])));
      CHECK(dev < 1e-6);
    }
  }
  SUBCASE("populations sum to the trace and orbitals are orthonormal") {
    const auto rho = tgq::reference_rdm("rho_sf", g);
    const auto dec = natural_orbitals(rho);
    double sum = 0.0;
    for (double l : dec.populations) sum += l;
    CHECK(sum == doctest::Approx(rho.trace_estimate).epsilon(1e-8));
    const auto w = g.weights();
    for (std::size_t a = 0; a < dec.populations.size(); a += 3) {
      for (std::size_t b = 0; b < dec.populations.size(); b += 3) {
        Complex gram = 0.0;
        for (int i = 0; i < g.points; ++i)
          gram += w[i] * dec.orbitals(i, a) * std::conj(dec.orbitals(i, b));
        CHECK(std::abs(gram - (a == b ? 1.0 : 0.0)) < 1e-8);
      }
    }
  }
}

TEST_CASE("momentum distributions of the reference states") {
  const GridSpec g{12.0, 512};
  SUBCASE("pipeline n(k) from rho_b and rho_f match the closed forms") {
    for (const char* pair : {"b", "f"}) {
      const std::string rho_name = std::string("rho_") + pair;
      const std::string n_name = std::string("n_") + pair;
      const auto dec = natural_orbitals(tgq::reference_rdm(rho_name, g));
      const auto nk = momentum_distribution(dec, 12.0, 1024);
      const auto ref = tgq::reference_momentum(n_name, g, 12.0, 1024);
      double sup = 0.0;
      for (std::size_t i = 0; i < nk.values.size(); ++i)
        sup = std::max(sup, std::abs(nk.values[i] - ref.values[i]));
      CHECK(sup < 1e-6);
    }
  }
  SUBCASE("closed-form values at the origin") {
    const auto nb = tgq::reference_momentum("n_b", g, 12.0, 1025);  // odd: k = 0 on the grid
    const auto nf = tgq::reference_momentum("n_f", g, 12.0, 1025);
    CHECK(nb.values[512] == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-14));
    CHECK(nf.values[512] == doctest::Approx(1.0 / (2.0 * std::sqrt(M_PI))).epsilon(1e-14));
  }
  SUBCASE("n_sf normalizes through the pipeline") {
    const auto nsf = tgq::reference_momentum("n_sf", g, 12.0, 1024);
    CHECK(nsf.normalization_estimate == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(nsf.clipped_points == 0);
    // even in k
    for (std::size_t i = 0; i < nsf.k.size() / 2; i += 37)
      CHECK(nsf.values[i] ==
            doctest::Approx(nsf.values[nsf.k.size() - 1 - i]).epsilon(1e-10));
  }
  SUBCASE("resolution precondition") {
    const auto dec = natural_orbitals(tgq::reference_rdm("rho_b", GridSpec{12.0, 64}));
    CHECK_THROWS_AS(momentum_distribution(dec, 12.0, 256), std::domain_error);
  }
}

TEST_CASE("tail exponent estimator") {
  const GridSpec g{12.0, 512};
  const auto nb = tgq::reference_momentum("n_b", g, 6.0, 512);
  // Gaussian decay: slope far below -4 and steepening with k
  const double s1 = tgq::tail_exponent(nb, 1.5, 2.5);
  const double s2 = tgq::tail_exponent(nb, 3.0, 4.0);
  CHECK(s1 < -4.0);
  CHECK(s2 < s1);
  CHECK_THROWS_AS(tgq::tail_exponent(nb, 1.0, 1.05), std::invalid_argument);
  tgq::MomentumDistribution tiny = nb;
  for (double& v : tiny.values) v = 1e-16;
  CHECK_THROWS_AS(tgq::tail_exponent(tiny, 1.0, 2.0), std::underflow_error);
}

TEST_CASE("distribution distances and maxima counting") {
  const GridSpec g = small_grid();
  const auto rb = tgq::reference_rdm("rho_b", g);
  const auto rf = tgq::reference_rdm("rho_f", g);
  CHECK(tgq::distribution_distance(rb, rb) == 0.0);
  CHECK(tgq::distribution_distance(rb, rf) > 0.0);
  CHECK_THROWS_AS(tgq::distribution_distance(rb, tgq::reference_rdm("rho_b", GridSpec{12.0, 512})),
                  std::invalid_argument);

  CHECK(tgq::count_local_maxima(rb.density()) == 1);
  CHECK(tgq::count_local_maxima(rf.density()) == 2);

  const auto nb = tgq::reference_momentum("n_b", g, 8.0, 256);
  const auto nf = tgq::reference_momentum("n_f", g, 8.0, 256);
  CHECK(tgq::distribution_distance(nb, nf) > 0.0);
  CHECK(tgq::distribution_distance(nb, nb) == 0.0);
}

TEST_CASE("evolved forward-quench SDM at pi/2") {
  const GridSpec g{12.0, 256};
  const double t = M_PI / 2;
  const auto xi = lab_frame_state([t](double z) { return tgq::psi0_closed(z, t); }, t, g,
                                  TailModel::forward_quench, 8);
  const auto rho = sdm_build(xi, g);
  CHECK(rho.accuracy_warning);  // 1/z^2 tails leave ~4% outside the box
  CHECK(rho.tail_estimate == doctest::Approx(0.0423).epsilon(0.02));
  CHECK(rho.trace_estimate + rho.tail_estimate == doctest::Approx(1.0).epsilon(5e-3));
  CHECK(rho.hermiticity_defect() < 1e-10);

  // density has exactly two maxima at the half period
  CHECK(tgq::count_local_maxima(rho.density()) == 2);

  // populations are grid-stable
  const auto dec = natural_orbitals(rho);
  const GridSpec g2{12.0, 512};
  const auto xi2 = lab_frame_state([t](double z) { return tgq::psi0_closed(z, t); }, t, g2,
                                   TailModel::forward_quench, 8);
  const auto dec2 = natural_orbitals(sdm_build(xi2, g2));
  for (int i = 0; i < 4; ++i)
    CHECK(std::abs(dec.populations[i] - dec2.populations[i]) < 1e-4);
}

TEST_CASE("reverse-quench tail estimate") {
  CHECK(tgq::tail_mass_estimate(TailModel::reverse_quench, M_PI / 2, 12.0) <
        tgq::tail_mass_estimate(TailModel::forward_quench, M_PI / 2, 12.0));
  CHECK(tgq::tail_mass_estimate(TailModel::none, 1.0, 12.0) < 1e-60);
}

TEST_CASE("reference state dispatch") {
  const GridSpec g = small_grid();
  CHECK(std::holds_alternative<tgq::ReducedDensityMatrix>(tgq::reference_state("rho_sf", g)));
  CHECK(std::holds_alternative<tgq::MomentumDistribution>(tgq::reference_state("n_b", g)));
  CHECK_THROWS_AS(tgq::reference_state("nonsense", g), std::invalid_argument);
}
