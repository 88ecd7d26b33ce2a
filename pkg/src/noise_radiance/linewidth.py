"""Radiative level widths and shifts from the system's own dipole coupling.

The same coupling that lets the driven system radiate also gives each level
a finite lifetime; those widths are what regularize the long-time emission
rate.  Everything follows from one constant with dimensions of time,

    beta = charge^2 / (6 pi epsilon0 c^3),

the classical radiation-damping time scale of the particle.

* ``generic_linewidth``: golden-rule decay width of one level of an
  arbitrary finite system, summing dipole decays to every strictly lower
  level,

    Gamma_i = (beta / (hbar m^2)) * sum_{n: E_n < E_i} delta_in
              * sum_j |<n| p_j |i>|^2 .

* ``oscillator_linewidth`` / ``ho_energy_shift``: closed forms for the
  charged harmonic oscillator, where the ladder algebra collapses the sum:
  each quantum contributes Lambda = beta omega0^2 / (2 m) to the width and
  -hbar Lambda / 2 ... see the function for the shift convention used.

``fill_widths`` stamps the generic widths onto a system in one call.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import InvariantViolationError
from .system import CouplingConstants, SystemSpec

_DEGENERACY_RTOL = 1e-12


def beta_constant(charge: float, constants: CouplingConstants | None = None) -> float:
    """Radiation-damping time scale charge^2 / (6 pi epsilon0 c^3)."""
    c = constants or CouplingConstants()
    return charge * charge / (6.0 * math.pi * c.epsilon0 * c.light_speed**3)


def single_quantum_width(
    omega0: float,
    mass: float,
    charge: float = 1.0,
    constants: CouplingConstants | None = None,
) -> float:
    """Width per oscillator quantum: Lambda = beta * omega0^2 / (2 m)."""
    if omega0 <= 0.0 or mass <= 0.0:
        raise InvariantViolationError("need positive frequency and mass")
    return beta_constant(charge, constants) * omega0 * omega0 / (2.0 * mass)


def oscillator_linewidth(
    quanta,
    omega0: float,
    mass: float,
    charge: float = 1.0,
    constants: CouplingConstants | None = None,
) -> float:
    """Width of an oscillator level: Lambda times the total quantum number.

    ``quanta`` is an int for one axis or a tuple for several independent
    axes; the ground level (all zeros) has exactly zero width.
    """
    total = int(quanta) if np.isscalar(quanta) else int(sum(quanta))
    if total < 0:
        raise InvariantViolationError("quantum numbers must be >= 0")
    return total * single_quantum_width(omega0, mass, charge, constants)


def ho_energy_shift(
    quanta,
    omega0: float,
    mass: float,
    charge: float = 1.0,
    constants: CouplingConstants | None = None,
) -> float:
    """Radiative energy shift of an oscillator level.

    The coupling to the field pulls every quantum down by the same amount,
    hbar * Lambda per quantum with Lambda = beta omega0^2 / (2 m); the
    common shift of the zero of energy is unobservable and dropped:

        shift = -hbar * Lambda * total_quanta
    """
    c = constants or CouplingConstants()
    total = int(quanta) if np.isscalar(quanta) else int(sum(quanta))
    if total < 0:
        raise InvariantViolationError("quantum numbers must be >= 0")
    lam = single_quantum_width(omega0, mass, charge, constants)
    return -c.hbar * lam * total


def generic_linewidth(
    spec: SystemSpec,
    level: int,
    constants: CouplingConstants | None = None,
) -> float:
    """Golden-rule radiative width of one level of a finite system.

    Sums over every level strictly below in energy (degenerate partners do
    not open a decay channel) and over all dipole directions the system
    carries.
    """
    c = constants or CouplingConstants()
    if not (0 <= level < spec.size):
        raise InvariantViolationError("level index out of range")
    beta = beta_constant(spec.charge, c)
    e_i = float(spec.energies[level])
    scale = max(1.0, float(np.max(np.abs(spec.energies))))
    total = 0.0
    for n in range(spec.size):
        e_n = float(spec.energies[n])
        if e_n >= e_i - _DEGENERACY_RTOL * scale:
            continue
        delta_in = (e_i - e_n) / c.hbar
        strength = sum(float(abs(p[n, level]) ** 2) for p in spec.dipole_p)
        total += delta_in * strength
    return beta / (c.hbar * spec.mass**2) * total


def fill_widths(spec: SystemSpec, constants: CouplingConstants | None = None) -> SystemSpec:
    """Return a copy of the system with all widths set to their radiative values."""
    widths = np.array([generic_linewidth(spec, n, constants) for n in range(spec.size)])
    return spec.with_widths(widths)
