import cmath
import math

import numpy as np
import pytest

import tgquench as tgq


def test_eigenstates():
    assert tgq.psi(0, 0.0) == pytest.approx(math.pi ** -0.25, rel=1e-14)
    assert tgq.phi(0, 0.0) == 0.0
    assert tgq.phi(0, -1.3) == tgq.psi(1, 1.3)
    assert tgq.psi_energy(3) == 3.5
    assert tgq.phi_energy(2) == 3.5
    z = np.linspace(-4, 4, 101)
    vals = tgq.psi(6, z)
    assert vals.shape == z.shape
    assert np.allclose(vals[::-1], vals)  # even state


def test_overlaps_and_special_functions():
    assert tgq.overlap_cmn(0, 0) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-14)
    assert tgq.overlap_cmn(1, 0) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-14)
    assert tgq.double_factorial(5) == 15
    assert tgq.erf(1.0 + 0j) == pytest.approx(0.8427007929497149, rel=1e-12)
    assert tgq.erf(1j).imag == pytest.approx(1.6504257587975429, rel=1e-12)
    value, terms, tol = tgq.hyp3f2([1.5, 0.5, 0.5], [1.5, 1.5], 0j)
    assert value == 1.0 and terms == 1
    kernel = tgq.mehler_kernel(0.0, 0.0, 0.5 + 0j)
    assert kernel == pytest.approx(1 / math.sqrt(0.75), rel=1e-13)


def test_closed_forms_and_series():
    z, t = 1.2, 0.9
    closed = tgq.psi0_closed(z, t)
    series = tgq.psi_series(0, z, t)
    assert abs(closed - series) < 1e-8
    closed_r = tgq.phi0_closed(z, t)
    series_r = tgq.phi_series(0, z, t)
    assert abs(closed_r - series_r) < 1e-8
    # vectorized evaluation
    zs = np.linspace(-3, 3, 61)
    vals = tgq.psi0_closed(zs, t)
    assert vals.shape == zs.shape
    assert np.allclose(vals, vals[::-1])  # even in z


def test_fidelities():
    L, mag, echo = tgq.loschmidt_forward(0, math.pi / 2)
    assert mag == pytest.approx((2 / math.pi) * math.log(1 + math.sqrt(2)), rel=1e-10)
    assert echo == pytest.approx(mag * mag)
    _, mag_r, _ = tgq.loschmidt_reverse(0, math.pi / 2)
    assert mag_r == pytest.approx(
        (2 / math.pi) * (math.sqrt(2) - math.log(1 + math.sqrt(2))), rel=1e-10
    )
    assert tgq.double_quench_overlap("forward", 0, math.pi / 2, 3.0) == pytest.approx(
        mag, abs=1e-7
    )


def test_derivative_relation():
    assert tgq.verify_derivative_relation(0, 1.0, 0.8, 1e-5) < 1e-6


def test_observable_pipeline():
    out = tgq.evolved_sdm("forward", math.pi / 2, grid_L=8.0, grid_N=128)
    assert out["rho"].shape == (128, 128)
    assert out["trace_estimate"] + out["tail_estimate"] == pytest.approx(1.0, abs=5e-3)
    pops = out["populations"]
    assert pops[0] > pops[-1] > 0

    mom = tgq.evolved_momentum("reverse", 0.7, grid_L=8.0, grid_N=128, k_max=8.0, points=256)
    assert mom["n"].min() >= 0
    assert mom["normalization_estimate"] == pytest.approx(1.0, abs=1e-2)

    k, n = tgq.reference_momentum("n_b", grid_L=8.0, grid_N=128, k_max=8.0, points=257)
    assert n[128] == pytest.approx(1 / math.sqrt(math.pi), rel=1e-12)


def test_oracle_propagation():
    zs = np.linspace(0.3, 5.0, 40)
    vals, defect = tgq.truncated_propagate(
        "noninteracting", 0, "tonks_girardeau", 400, 0.4, zs
    )
    closed = tgq.psi0_closed(zs, 0.4)
    assert np.max(np.abs(vals - closed)) < 2e-3
    assert 0 < defect < 0.05
