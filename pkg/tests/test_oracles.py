"""Tests for the quadrature cross-check module itself."""
from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate

from noise_radiance.errors import InvariantViolationError, PointwiseUndefinedError
from noise_radiance.kernels import KernelParams, kernel_T1, kernel_T2, kernel_T3
from noise_radiance.noise import NoiseModel, NoiseSum, eval_correlation, spectral_density
from noise_radiance.oracles import (
    brute_force_kernel,
    correlation_pair_integral,
    fourier_transform_quadrature,
    oracle_dT1_dt,
    oracle_dT2_dt,
    oracle_dT3_dt,
    polarization_overlap_quadrature,
)
from noise_radiance.rate import ANGULAR_POLARIZATION_FACTOR


def _params() -> KernelParams:
    return KernelParams(
        delta_fn=1.2,
        delta_ni=-0.4,
        delta_fm=0.9,
        delta_mi=-0.1,
        omega_k=0.8,
        gamma_n=0.25,
        gamma_m=0.4,
    )


# ---------------------------------------------------------------------------
# pair integral
# ---------------------------------------------------------------------------


def test_pair_integral_white_closed_form():
    white = NoiseModel.white(scale=1.4)
    t = 3.0
    # cancelling exponents: the diagonal delta integrates to scale * t
    got = correlation_pair_integral(white, 0.3 + 1.0j, -0.3 - 1.0j, t)
    assert got == pytest.approx(1.4 * t, rel=1e-12)
    pu, pw = 0.5 + 0.2j, 0.1 - 0.9j
    s = pu + pw
    expected = 1.4 * (1.0 - np.exp(-s * t)) / s
    assert correlation_pair_integral(white, pu, pw, t) == pytest.approx(expected, rel=1e-12)


def test_pair_integral_matches_dblquad():
    noise = NoiseModel.exponential(tau=0.8, scale=1.3)
    pu, pw, t = 0.4 + 0.9j, -0.2 - 0.3j, 2.0

    def integrand(w, u, part):
        val = eval_correlation(noise, np.array([w - u]))[0] * np.exp(-pu * u - pw * w)
        return val.real if part == "re" else val.imag

    re, _ = integrate.dblquad(integrand, 0, t, 0, t, args=("re",), epsabs=1e-11)
    im, _ = integrate.dblquad(integrand, 0, t, 0, t, args=("im",), epsabs=1e-11)
    got = correlation_pair_integral(noise, pu, pw, t)
    # the adaptive reference is itself limited to ~1e-8 by the cusp along w = u
    assert got == pytest.approx(complex(re, im), rel=1e-6)


def test_pair_integral_sums_over_parts():
    parts = NoiseSum([NoiseModel.white(scale=0.5), NoiseModel.exponential(tau=1.0)])
    pu, pw, t = 0.2 + 0.5j, 0.1 - 0.5j, 2.5
    total = correlation_pair_integral(parts, pu, pw, t)
    split = correlation_pair_integral(parts.parts[0], pu, pw, t) + \
        correlation_pair_integral(parts.parts[1], pu, pw, t)
    assert total == pytest.approx(split, rel=1e-14)


# ---------------------------------------------------------------------------
# slice oracles really are time derivatives
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "noise",
    [NoiseModel.exponential(tau=0.7, scale=1.2), NoiseModel.white(scale=0.9)],
    ids=["exponential", "white"],
)
@pytest.mark.parametrize(
    "kernel,oracle",
    [(kernel_T1, oracle_dT1_dt), (kernel_T2, oracle_dT2_dt), (kernel_T3, oracle_dT3_dt)],
    ids=["T1", "T2", "T3"],
)
def test_slice_oracle_is_kernel_derivative(noise, kernel, oracle):
    p = _params()
    t, h = 2.0, 1e-4

    def val(x):
        return kernel(p, noise, x)

    fd = (val(t + h) - val(t - h)) / (2 * h)
    fd2 = (val(t + h / 2) - val(t - h / 2)) / h
    richardson = (4 * fd2 - fd) / 3
    assert oracle(p, noise, t) == pytest.approx(richardson, rel=1e-6)


# ---------------------------------------------------------------------------
# brute force guard rails
# ---------------------------------------------------------------------------


def test_brute_force_rejects_unknown_kernel():
    with pytest.raises(InvariantViolationError, match="unknown kernel"):
        brute_force_kernel("T9", _params(), NoiseModel.exponential(tau=1.0), 1.0)


def test_brute_force_rejects_even_grid():
    with pytest.raises(InvariantViolationError, match="odd"):
        brute_force_kernel("T1", _params(), NoiseModel.exponential(tau=1.0), 1.0, n=10)


def test_brute_force_needs_pointwise_correlation():
    with pytest.raises(PointwiseUndefinedError):
        brute_force_kernel("T1", _params(), NoiseModel.white(), 1.0, n=11)


# ---------------------------------------------------------------------------
# transform and sphere quadratures
# ---------------------------------------------------------------------------


def test_transform_quadrature_white_is_flat():
    assert fourier_transform_quadrature(NoiseModel.white(scale=2.2), 13.7) == 2.2


@pytest.mark.parametrize("omega", [0.0, 1.3, 7.0])
def test_transform_quadrature_matches_closed_form(omega):
    noise = NoiseModel.exponential(tau=0.9, scale=1.5)
    got = fourier_transform_quadrature(noise, omega)
    assert got == pytest.approx(spectral_density(noise, omega), rel=1e-9)


def test_transform_quadrature_sums_over_parts():
    parts = NoiseSum([NoiseModel.white(scale=0.3), NoiseModel.gaussian(tau=1.1)])
    got = fourier_transform_quadrature(parts, 0.8)
    assert got == pytest.approx(spectral_density(parts, 0.8), rel=1e-9)


def test_polarization_overlap_diagonal():
    for j in range(3):
        got = polarization_overlap_quadrature(j, j)
        assert got == pytest.approx(ANGULAR_POLARIZATION_FACTOR, rel=1e-12)


def test_polarization_overlap_off_diagonal():
    for j in range(3):
        for jp in range(3):
            if j != jp:
                assert abs(polarization_overlap_quadrature(j, jp)) < 1e-12
