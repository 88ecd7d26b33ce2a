"""Bound-system descriptions: levels, widths, couplings, and constants.

A system is a finite ladder of energy eigenstates together with

* the Hermitian operators ``noise_ops`` through which classical noise
  channels drive transitions,
* the Hermitian momentum components ``dipole_p`` through which the system
  radiates, and
* the single-particle data (mass, charge) fixing the radiation prefactor.

Everything downstream (kernels, rate engine, Monte Carlo) consumes this one
dataclass plus a :class:`CouplingConstants` bundle, so unit conventions live
here and nowhere else.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvariantViolationError, ParseError

HERMITICITY_TOL = 1e-12

_DIRECTIONS = ("x", "y", "z")


@dataclass(frozen=True)
class CouplingConstants:
    """Physical constants and the overall noise strength.

    Defaults are natural units (hbar = c = epsilon0 = 1, unit noise
    strength), which every test and toy uses; ``si()`` gives SI values.

    ``gamma`` multiplies the noise correlation: the driving field has
    correlation gamma * f(t - t').
    """

    gamma: float = 1.0
    hbar: float = 1.0
    light_speed: float = 1.0
    epsilon0: float = 1.0

    def __post_init__(self):
        for name in ("gamma", "hbar", "light_speed", "epsilon0"):
            v = getattr(self, name)
            if not (v > 0.0) or not math.isfinite(v):
                raise InvariantViolationError(f"{name} must be positive and finite")

    @classmethod
    def si(cls, gamma: float = 1.0) -> "CouplingConstants":
        return cls(
            gamma=gamma,
            hbar=1.054571817e-34,
            light_speed=2.99792458e8,
            epsilon0=8.8541878128e-12,
        )


def csl_equivalent_gamma(collapse_rate: float, mass: float, r_c: float, m0: float) -> float:
    """Noise strength equivalent to a mass-proportional collapse model.

    Maps the parameter pair (collapse_rate lambda at reference mass ``m0``,
    correlation length ``r_c``) of a mass-proportional spontaneous-collapse
    model onto the white-noise strength used here, in the point-particle
    (small system) limit:

        gamma = lambda * (mass / m0)**2 / r_c**2

    This is the "2 eta" normalization: the position-localization rate of the
    equivalent single-particle model is eta = gamma / 2.  Nothing in the rate
    machinery depends on this mapping; it is a convenience for expressing
    results in collapse-model parameters.
    """
    if collapse_rate < 0.0 or mass <= 0.0 or r_c <= 0.0 or m0 <= 0.0:
        raise InvariantViolationError("collapse mapping needs nonnegative rate, positive scales")
    return collapse_rate * (mass / m0) ** 2 / (r_c * r_c)


def _as_complex_matrix(m, n: int, what: str) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.shape != (n, n):
        raise InvariantViolationError(f"{what} must be {n}x{n}, got {a.shape}")
    return a


def _check_hermitian(a: np.ndarray, what: str) -> None:
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.conj().T)) > HERMITICITY_TOL * scale:
        raise InvariantViolationError(f"{what} is not Hermitian")


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """A finite bound system coupled to noise channels and the photon field.

    Attributes
    ----------
    labels : tuple of str
        One name per level, e.g. ``("g", "e")`` or ``("0,0,1", ...)``.
    energies : ndarray
        Level energies (same units as hbar * frequency).
    widths : ndarray
        Level decay widths Gamma_n >= 0 (inverse time).  Zero widths are
        allowed; the rate engine rejects them only where they would actually
        enter a divergent propagator.
    noise_ops : tuple of ndarray
        Hermitian coupling operator per independent noise channel.
    dipole_p : tuple of ndarray
        Hermitian momentum components (1 to 3 Cartesian directions).
    mass, charge : float
        Single-particle data for the radiation matrix element.
    initial : int
        Index of the initially occupied level.
    radiation_override : tuple of ndarray, optional
        Explicit matrices replacing (-charge/mass) * dipole_p in the
        radiation element, one per direction.  For synthetic systems.
    """

    labels: tuple[str, ...]
    energies: np.ndarray
    widths: np.ndarray
    noise_ops: tuple[np.ndarray, ...]
    dipole_p: tuple[np.ndarray, ...]
    mass: float = 1.0
    charge: float = 1.0
    initial: int = 0
    radiation_override: tuple[np.ndarray, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        n = len(self.labels)
        if n < 2:
            raise InvariantViolationError("need at least two levels")
        energies = np.asarray(self.energies, dtype=float)
        widths = np.asarray(self.widths, dtype=float)
        if energies.shape != (n,) or widths.shape != (n,):
            raise InvariantViolationError("energies and widths must match the label count")
        if not np.all(np.isfinite(energies)):
            raise InvariantViolationError("energies must be finite")
        if not np.all(np.isfinite(widths)) or np.any(widths < 0.0):
            raise InvariantViolationError("widths must be finite and >= 0")
        if not (0 <= self.initial < n):
            raise InvariantViolationError("initial level out of range")
        if not (self.mass > 0.0) or not math.isfinite(self.mass):
            raise InvariantViolationError("mass must be positive")
        if not math.isfinite(self.charge):
            raise InvariantViolationError("charge must be finite")
        if not self.noise_ops:
            raise InvariantViolationError("need at least one noise channel")
        if not 1 <= len(self.dipole_p) <= 3:
            raise InvariantViolationError("need 1 to 3 dipole directions")
        noise_ops = tuple(
            _as_complex_matrix(op, n, f"noise operator {ell}")
            for ell, op in enumerate(self.noise_ops)
        )
        dipole_p = tuple(
            _as_complex_matrix(op, n, f"momentum component {j}")
            for j, op in enumerate(self.dipole_p)
        )
        for ell, op in enumerate(noise_ops):
            _check_hermitian(op, f"noise operator {ell}")
        for j, op in enumerate(dipole_p):
            _check_hermitian(op, f"momentum component {j}")
        override = self.radiation_override
        if override is not None:
            if len(override) != len(dipole_p):
                raise InvariantViolationError(
                    "radiation override must supply one matrix per dipole direction"
                )
            override = tuple(
                _as_complex_matrix(op, n, f"radiation override {j}")
                for j, op in enumerate(override)
            )
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "widths", widths)
        object.__setattr__(self, "noise_ops", noise_ops)
        object.__setattr__(self, "dipole_p", dipole_p)
        object.__setattr__(self, "radiation_override", override)

    @property
    def size(self) -> int:
        return len(self.labels)

    def with_widths(self, widths) -> "SystemSpec":
        return replace(self, widths=np.asarray(widths, dtype=float))

    def with_initial(self, initial: int) -> "SystemSpec":
        return replace(self, initial=initial)


def bohr_frequency(spec: SystemSpec, a: int, b: int, constants: CouplingConstants | None = None) -> float:
    """Transition frequency (E_a - E_b) / hbar."""
    c = constants or CouplingConstants()
    return float((spec.energies[a] - spec.energies[b]) / c.hbar)


def delta_matrix(spec: SystemSpec, constants: CouplingConstants | None = None) -> np.ndarray:
    """All Bohr frequencies: delta[a, b] = (E_a - E_b) / hbar."""
    c = constants or CouplingConstants()
    e = spec.energies / c.hbar
    return e[:, None] - e[None, :]


def mode_amplitude(k: float, constants: CouplingConstants | None = None) -> float:
    """Single-mode field normalization sqrt(hbar / (2 epsilon0 omega_k (2 pi)^3))."""
    c = constants or CouplingConstants()
    if not (k > 0.0):
        raise InvariantViolationError("wavenumber must be positive")
    omega = c.light_speed * k
    return math.sqrt(c.hbar / (2.0 * c.epsilon0 * omega * (2.0 * math.pi) ** 3))


def radiation_matrix(
    spec: SystemSpec, k: float, direction: int, constants: CouplingConstants | None = None
) -> np.ndarray:
    """Radiation matrix element R_j(k) for one Cartesian direction.

    R_j(k) = mode_amplitude(k) * (-charge/mass) * p_j, unless the system
    carries an explicit override matrix for that direction.
    """
    alpha = mode_amplitude(k, constants)
    if spec.radiation_override is not None:
        return alpha * spec.radiation_override[direction]
    return alpha * (-spec.charge / spec.mass) * spec.dipole_p[direction]


def radiation_element(
    spec: SystemSpec,
    k: float,
    f: int,
    n: int,
    direction: int = 0,
    constants: CouplingConstants | None = None,
) -> complex:
    """Single matrix element of :func:`radiation_matrix`."""
    return complex(radiation_matrix(spec, k, direction, constants)[f, n])


# ---------------------------------------------------------------------------
# built-in systems
# ---------------------------------------------------------------------------


def _ladder_ops(n_levels: int) -> tuple[np.ndarray, np.ndarray]:
    a = np.zeros((n_levels, n_levels), dtype=complex)
    for m in range(n_levels - 1):
        a[m, m + 1] = math.sqrt(m + 1)
    return a, a.conj().T


def builtin_harmonic_oscillator(
    n_levels: int = 6,
    omega0: float = 1.0,
    mass: float = 1.0,
    charge: float = 1.0,
    constants: CouplingConstants | None = None,
    initial: int = 0,
) -> SystemSpec:
    """Charged 1-d oscillator, noise on position, truncated to n_levels.

    Widths are left zero; fill them with ``linewidth.fill_widths`` or pass
    explicit values via ``with_widths``.
    """
    c = constants or CouplingConstants()
    if n_levels < 2:
        raise InvariantViolationError("need at least two levels")
    a, adag = _ladder_ops(n_levels)
    x = math.sqrt(c.hbar / (2.0 * mass * omega0)) * (a + adag)
    p = 1j * math.sqrt(mass * c.hbar * omega0 / 2.0) * (adag - a)
    energies = c.hbar * omega0 * (np.arange(n_levels) + 0.5)
    return SystemSpec(
        labels=tuple(str(m) for m in range(n_levels)),
        energies=energies,
        widths=np.zeros(n_levels),
        noise_ops=(x,),
        dipole_p=(p,),
        mass=mass,
        charge=charge,
        initial=initial,
    )


def builtin_oscillator_3d(
    n_max: int = 3,
    omega0: float = 1.0,
    mass: float = 1.0,
    charge: float = 1.0,
    constants: CouplingConstants | None = None,
    initial: int = 0,
) -> SystemSpec:
    """Isotropic 3-d oscillator as a product basis, quanta 0..n_max per axis.

    States are labelled "nx,ny,nz"; operators are Kronecker products of the
    1-d ladder algebra.  Noise couples to all three position components
    (one channel per axis); all three momentum components radiate.
    """
    c = constants or CouplingConstants()
    d = n_max + 1
    a1, adag1 = _ladder_ops(d)
    eye = np.eye(d, dtype=complex)
    x1 = math.sqrt(c.hbar / (2.0 * mass * omega0)) * (a1 + adag1)
    p1 = 1j * math.sqrt(mass * c.hbar * omega0 / 2.0) * (adag1 - a1)

    def kron3(mats):
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    xs = [kron3([x1 if ax == i else eye for i in range(3)]) for ax in range(3)]
    ps = [kron3([p1 if ax == i else eye for i in range(3)]) for ax in range(3)]

    quanta = [(nx, ny, nz) for nx in range(d) for ny in range(d) for nz in range(d)]
    # np.kron index convention: leftmost factor varies slowest
    labels = tuple(f"{nx},{ny},{nz}" for nx, ny, nz in quanta)
    energies = c.hbar * omega0 * (np.array([sum(q) for q in quanta], dtype=float) + 1.5)
    return SystemSpec(
        labels=labels,
        energies=energies,
        widths=np.zeros(len(labels)),
        noise_ops=tuple(xs),
        dipole_p=tuple(ps),
        mass=mass,
        charge=charge,
        initial=initial,
    )


def two_level_toy(
    gap: float = 1.0,
    widths: tuple[float, float] = (0.1, 0.15),
    noise_asymmetry: float = 1.0,
) -> SystemSpec:
    """Two levels with diagonal noise coupling and off-diagonal radiation.

    The noise operator is diagonal (sigma_z-like), so noise dresses the
    levels while the momentum operator carries the photon transition.  Both
    orderings of the second-order amplitude (radiate-then-kick and
    kick-then-radiate) are nonzero, which makes this the smallest system
    exercising every interference term.  Initial state is the upper level.
    """
    nz = np.diag([1.0, -noise_asymmetry]).astype(complex)
    p = np.array([[0.0, 1j], [-1j, 0.0]], dtype=complex)
    return SystemSpec(
        labels=("lo", "hi"),
        energies=np.array([0.0, gap]),
        widths=np.array(widths, dtype=float),
        noise_ops=(nz,),
        dipole_p=(p,),
        mass=1.0,
        charge=1.0,
        initial=1,
    )


def near_degenerate_toy(
    splitting: float = 2e-3,
    top: float = 1.0,
    mid_width: float = 0.05,
) -> SystemSpec:
    """Three levels with a near-degenerate pair feeding a single pathway.

    Noise couples only the ground pair (0 <-> 1, gap ``splitting``); the
    momentum operator couples only 1 <-> 2.  Starting from level 0 the
    second-order amplitude has exactly one ordering (kick to 1, then
    radiate), so the emission rate isolates the term weighted by the noise
    spectrum at the tiny gap - the configuration where an unregularized
    calculation is most sensitive to spectral weight near zero frequency.
    """
    n_op = np.array(
        [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]], dtype=complex
    )
    p = np.array(
        [[0.0, 0.0, 0.0], [0.0, 0.0, 1j], [0.0, -1j, 0.0]], dtype=complex
    )
    return SystemSpec(
        labels=("g", "g'", "e"),
        energies=np.array([0.0, splitting, top]),
        widths=np.array([0.0, mid_width, 0.0]),
        noise_ops=(n_op,),
        dipole_p=(p,),
        mass=1.0,
        charge=1.0,
        initial=0,
    )


# ---------------------------------------------------------------------------
# file round trip
# ---------------------------------------------------------------------------


def _format_complex_matrix(m: np.ndarray) -> list[str]:
    lines = []
    n = m.shape[0]
    for r in range(n):
        for cidx in range(n):
            z = complex(m[r, cidx])
            if z != 0.0:
                lines.append(f"{r} {cidx} = {z.real!r} {z.imag!r}")
    return lines


def save_system(spec: SystemSpec, path) -> None:
    """Write a system description in the sectioned key=value format."""
    out: list[str] = ["[levels]"]
    out.append("labels = " + ", ".join(spec.labels))
    out.append("energies = " + ", ".join(repr(float(e)) for e in spec.energies))
    out.append(f"initial = {spec.initial}")
    out.append("")
    out.append("[widths]")
    out.append("values = " + ", ".join(repr(float(w)) for w in spec.widths))
    out.append("")
    out.append("[constants]")
    out.append(f"mass = {spec.mass!r}")
    out.append(f"charge = {spec.charge!r}")
    out.append("")
    for ell, op in enumerate(spec.noise_ops):
        out.append(f"[noise_coupling {ell}]")
        out.extend(_format_complex_matrix(op))
        out.append("")
    for j, op in enumerate(spec.dipole_p):
        out.append(f"[dipole {_DIRECTIONS[j]}]")
        out.extend(_format_complex_matrix(op))
        out.append("")
    if spec.radiation_override is not None:
        for j, op in enumerate(spec.radiation_override):
            out.append(f"[radiation {_DIRECTIONS[j]}]")
            out.extend(_format_complex_matrix(op))
            out.append("")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out))


def _parse_matrix_section(cp: configparser.ConfigParser, section: str, n: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=complex)
    for key, value in cp.items(section):
        idx = key.split()
        if len(idx) != 2:
            raise ParseError(0, f"[{section}] key {key!r}: expected 'row col'")
        try:
            r, cidx = int(idx[0]), int(idx[1])
        except ValueError:
            raise ParseError(0, f"[{section}] key {key!r}: indices must be integers") from None
        if not (0 <= r < n and 0 <= cidx < n):
            raise ParseError(0, f"[{section}] key {key!r}: index out of range for {n} levels")
        parts = value.split()
        if len(parts) != 2:
            raise ParseError(0, f"[{section}] {key}: expected 're im', got {value!r}")
        try:
            m[r, cidx] = complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise ParseError(0, f"[{section}] {key}: could not parse {value!r}") from None
    return m


def _split_csv(text: str) -> list[str]:
    return [tok.strip() for tok in text.split(",") if tok.strip()]


def load_system(path) -> SystemSpec:
    """Read a system description written by :func:`save_system`."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cp.read_file(fh, source=str(path))
    except configparser.ParsingError as exc:
        first = exc.errors[0] if getattr(exc, "errors", None) else (0, "")
        raise ParseError(int(first[0]), f"malformed system file: {first[1]}") from None
    if not cp.has_section("levels"):
        raise ParseError(0, "missing [levels] section")
    labels = tuple(_split_csv(cp.get("levels", "labels", fallback="")))
    if not labels:
        raise ParseError(0, "[levels] labels missing or empty")
    n = len(labels)
    try:
        energies = np.array([float(v) for v in _split_csv(cp.get("levels", "energies"))])
    except (configparser.NoOptionError, ValueError):
        raise ParseError(0, "[levels] energies missing or unreadable") from None
    initial = cp.getint("levels", "initial", fallback=0)
    if cp.has_section("widths"):
        try:
            widths = np.array([float(v) for v in _split_csv(cp.get("widths", "values"))])
        except (configparser.NoOptionError, ValueError):
            raise ParseError(0, "[widths] values unreadable") from None
    else:
        widths = np.zeros(n)
    mass = cp.getfloat("constants", "mass", fallback=1.0)
    charge = cp.getfloat("constants", "charge", fallback=1.0)

    noise_sections = sorted(
        (s for s in cp.sections() if s.startswith("noise_coupling")),
        key=lambda s: int(s.split()[-1]),
    )
    if not noise_sections:
        raise ParseError(0, "no [noise_coupling <index>] sections")
    noise_ops = tuple(_parse_matrix_section(cp, s, n) for s in noise_sections)

    dipole_sections = [f"dipole {d}" for d in _DIRECTIONS if cp.has_section(f"dipole {d}")]
    if not dipole_sections:
        raise ParseError(0, "no [dipole x|y|z] sections")
    dipole_p = tuple(_parse_matrix_section(cp, s, n) for s in dipole_sections)

    override = None
    radiation_sections = [f"radiation {d}" for d in _DIRECTIONS if cp.has_section(f"radiation {d}")]
    if radiation_sections:
        if len(radiation_sections) != len(dipole_sections):
            raise ParseError(0, "radiation override must match the dipole directions")
        override = tuple(_parse_matrix_section(cp, s, n) for s in radiation_sections)

    return SystemSpec(
        labels=labels,
        energies=energies,
        widths=widths,
        noise_ops=noise_ops,
        dipole_p=dipole_p,
        mass=mass,
        charge=charge,
        initial=initial,
        radiation_override=override,
    )
