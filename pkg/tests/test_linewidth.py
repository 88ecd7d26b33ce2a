"""Tests for radiative level widths and shifts."""
from __future__ import annotations

import math

import numpy as np
import pytest

from noise_radiance.errors import InvariantViolationError
from noise_radiance.linewidth import (
    beta_constant,
    fill_widths,
    generic_linewidth,
    ho_energy_shift,
    oscillator_linewidth,
    single_quantum_width,
)
from noise_radiance.system import (
    CouplingConstants,
    SystemSpec,
    builtin_harmonic_oscillator,
    builtin_oscillator_3d,
)


def test_beta_constant_natural_units():
    assert beta_constant(1.0) == pytest.approx(1.0 / (6.0 * math.pi), rel=1e-15)
    assert beta_constant(2.0) == pytest.approx(4.0 / (6.0 * math.pi), rel=1e-15)
    assert beta_constant(-1.0) == beta_constant(1.0)  # enters squared


def test_single_quantum_width_arithmetic():
    # Lambda = beta * omega0^2 / (2 m)
    lam = single_quantum_width(omega0=2.0, mass=3.0)
    assert lam == pytest.approx((1.0 / (6.0 * math.pi)) * 4.0 / 6.0, rel=1e-14)
    with pytest.raises(InvariantViolationError):
        single_quantum_width(omega0=0.0, mass=1.0)
    with pytest.raises(InvariantViolationError):
        single_quantum_width(omega0=1.0, mass=-2.0)


def test_oscillator_linewidth_counts_quanta():
    lam = single_quantum_width(omega0=1.4, mass=0.9)
    assert oscillator_linewidth(0, omega0=1.4, mass=0.9) == 0.0
    assert oscillator_linewidth(2, omega0=1.4, mass=0.9) == pytest.approx(2 * lam, rel=1e-15)
    assert oscillator_linewidth((1, 2, 0), omega0=1.4, mass=0.9) == pytest.approx(
        3 * lam, rel=1e-15
    )
    with pytest.raises(InvariantViolationError):
        oscillator_linewidth(-1, omega0=1.4, mass=0.9)


def test_ho_energy_shift_is_minus_hbar_lambda_per_quantum():
    lam = single_quantum_width(omega0=1.0, mass=1.0)
    assert ho_energy_shift(0, omega0=1.0, mass=1.0) == 0.0
    assert ho_energy_shift(3, omega0=1.0, mass=1.0) == pytest.approx(-3 * lam, rel=1e-14)
    doubled_hbar = CouplingConstants(hbar=2.0)
    assert ho_energy_shift(1, omega0=1.0, mass=1.0, constants=doubled_hbar) == pytest.approx(
        -2.0 * single_quantum_width(1.0, 1.0, constants=doubled_hbar), rel=1e-14
    )


def test_generic_linewidth_collapses_on_oscillator():
    # the golden-rule sum over lower levels must reduce to n * Lambda
    omega0, mass, charge = 1.3, 2.1, 0.7
    spec = builtin_harmonic_oscillator(n_levels=6, omega0=omega0, mass=mass, charge=charge)
    lam = single_quantum_width(omega0, mass, charge)
    assert generic_linewidth(spec, 0) == 0.0  # ground level, exactly
    for n in range(1, 6):
        assert generic_linewidth(spec, n) == pytest.approx(n * lam, rel=1e-12)


def test_generic_linewidth_3d_oscillator_spot_checks():
    spec = builtin_oscillator_3d(n_max=2, omega0=0.8, mass=1.5)
    lam = single_quantum_width(0.8, 1.5)
    assert generic_linewidth(spec, spec.labels.index("0,0,0")) == 0.0
    assert generic_linewidth(spec, spec.labels.index("1,1,0")) == pytest.approx(
        2 * lam, rel=1e-12
    )
    assert generic_linewidth(spec, spec.labels.index("2,2,2")) == pytest.approx(
        6 * lam, rel=1e-12
    )


def test_degenerate_partners_do_not_decay():
    p = np.array([[0.0, 1j], [-1j, 0.0]], dtype=complex)
    nz = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    spec = SystemSpec(
        labels=("a", "b"),
        energies=np.array([1.0, 1.0]),  # exactly degenerate
        widths=np.zeros(2),
        noise_ops=(nz,),
        dipole_p=(p,),
    )
    assert generic_linewidth(spec, 0) == 0.0
    assert generic_linewidth(spec, 1) == 0.0


def test_generic_linewidth_rejects_bad_level():
    spec = builtin_harmonic_oscillator(n_levels=3)
    with pytest.raises(InvariantViolationError):
        generic_linewidth(spec, 7)


def test_fill_widths_stamps_every_level():
    spec = builtin_harmonic_oscillator(n_levels=4, omega0=1.1, mass=0.8)
    filled = fill_widths(spec)
    for n in range(4):
        assert filled.widths[n] == generic_linewidth(spec, n)
    assert np.all(spec.widths == 0.0)  # original untouched
