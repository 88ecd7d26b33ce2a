"""Monte Carlo validation of the finite-time transition probabilities.

The closed-form kernels promise the noise-averaged probability of finding
the system in level f with one photon of wavenumber k at time t.  This
module checks that promise the hard way: synthesize random noise
trajectories with the requested correlation, integrate the two time-ordered
second-order amplitudes along each trajectory, and average the squared sum.

Trajectory synthesis is spectral: independent Gaussian weights on a
frequency grid shaped by f~, inverse-FFT'd to a stationary real process
whose autocovariance converges to f (``empirical_autocovariance`` measures
it).  Streams are counter-based, so trajectory r of seed s is the same
numbers no matter the batch size or call pattern.

Assumption to keep in mind: trajectories are *Gaussian* by construction.
Every second-order result in this package only ever uses the two-point
correlation, so Gaussianity is no loss for validation - but the synthesized
ensemble is not a stand-in for arbitrary non-Gaussian noise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _sci_integrate

from .errors import (
    InadmissibleNoiseError,
    InvariantViolationError,
    TrajectoryTooShortError,
)
from .noise import AnyNoise, correlation_time, spectral_density
from .rate import finite_time_probability
from .system import CouplingConstants, SystemSpec, delta_matrix, radiation_matrix

#: trajectory samples per shortest period / correlation time
OVERSAMPLING = 40.0

#: extra sampled time beyond the requested duration, in correlation times
PADDING_CORR_TIMES = 10.0


@dataclass(frozen=True)
class NoiseRealization:
    """A batch of sampled noise trajectories on a uniform time grid."""

    times: np.ndarray
    values: np.ndarray  # shape (n_traj, n_steps)
    dt: float

    @property
    def n_traj(self) -> int:
        return int(self.values.shape[0])

    @property
    def duration(self) -> float:
        return float(self.times[-1])


@dataclass(frozen=True)
class AmplitudeEstimate:
    """Sample mean and standard error of the transition probability."""

    mean: float
    stderr: float
    n_samples: int
    dt: float


def default_time_step(spec: SystemSpec, noise: AnyNoise, k: float,
                      constants: CouplingConstants | None = None) -> float:
    """Step resolving both the fastest system phase and the noise memory."""
    c = constants or CouplingConstants()
    deltas = delta_matrix(spec, c)
    omega_k = c.light_speed * k
    fastest = float(np.max(np.abs(deltas))) + omega_k
    dt = 2.0 * math.pi / fastest / OVERSAMPLING
    tau = correlation_time(noise)
    if tau > 0.0:
        dt = min(dt, tau / OVERSAMPLING)
    return dt


def sample_noise(
    noise: AnyNoise,
    duration: float,
    dt: float,
    n_traj: int,
    seed: int,
    stream_offset: int = 0,
) -> NoiseRealization:
    """Draw stationary Gaussian trajectories with autocovariance f.

    Spectral synthesis: frequency bin j of an M-point grid gets variance
    M * f~(omega_j) / dt, split between independent real and imaginary
    Gaussian weights; the inverse real FFT is then a real process with
    E[w(t) w(t+s)] -> f(s) as the grid refines.  The grid is padded past
    ``duration`` by several correlation times so periodic wraparound
    cannot reach the window that is returned.

    Trajectory ``stream_offset + r`` always consumes its own counter
    block of the underlying bit generator: results are independent of
    batching.
    """
    if duration <= 0.0 or dt <= 0.0:
        raise InvariantViolationError("duration and dt must be positive")
    n_steps = int(math.ceil(duration / dt)) + 1
    if n_steps < 8:
        raise TrajectoryTooShortError(
            f"only {n_steps} samples over the requested duration; lower dt"
        )
    pad = int(math.ceil(PADDING_CORR_TIMES * correlation_time(noise) / dt)) + 1
    m = 1 << (n_steps + pad - 1).bit_length()
    omega = 2.0 * math.pi * np.fft.rfftfreq(m, d=dt)
    density = np.asarray(spectral_density(noise, omega), dtype=float)
    floor = -1e-9 * float(np.max(np.abs(density), initial=1.0))
    if np.any(density < floor):
        raise InadmissibleNoiseError(
            "spectral density is negative on the synthesis grid; "
            "not a valid correlation function"
        )
    amp = np.sqrt(np.clip(density, 0.0, None) * m / dt)

    values = np.empty((n_traj, n_steps), dtype=float)
    for r in range(n_traj):
        bitgen = np.random.Philox(key=[seed, 0], counter=[0, 0, 0, stream_offset + r])
        rng = np.random.Generator(bitgen)
        xi = rng.standard_normal(amp.size)
        eta = rng.standard_normal(amp.size)
        coeff = amp * (xi + 1j * eta) / math.sqrt(2.0)
        # zero-frequency and Nyquist bins must be real for a real signal
        coeff[0] = amp[0] * xi[0]
        coeff[-1] = amp[-1] * xi[-1]
        values[r] = np.fft.irfft(coeff, n=m)[:n_steps]
    times = np.arange(n_steps) * dt
    return NoiseRealization(times=times, values=values, dt=dt)


def _cumulative_trapezoid(y: np.ndarray, dx: float) -> np.ndarray:
    out = _sci_integrate.cumulative_trapezoid(y, dx=dx, axis=-1, initial=0.0)
    return out


def amplitude_paths(
    spec: SystemSpec,
    realization: NoiseRealization,
    f: int,
    k: float,
    t: float,
    constants: CouplingConstants | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Second-order amplitudes along each trajectory, both orderings.

    Returns (photon-last, photon-first) complex arrays of shape (n_traj,).
    Only single-channel, single-direction systems are supported here - with
    several independent channels a single scalar trajectory would correlate
    vertices that the theory treats as independent.
    """
    if len(spec.noise_ops) != 1 or len(spec.dipole_p) != 1:
        raise InvariantViolationError(
            "trajectory amplitudes need exactly one noise channel and one dipole direction"
        )
    c = constants or CouplingConstants()
    if t > realization.duration + 1e-9 * realization.dt:
        raise TrajectoryTooShortError(
            f"amplitudes requested at t={t} but trajectories end at {realization.duration}"
        )
    n_steps = int(round(t / realization.dt)) + 1
    n_steps = min(n_steps, realization.times.size)
    times = realization.times[:n_steps]
    w = realization.values[:, :n_steps]
    dt = realization.dt

    deltas = delta_matrix(spec, c)
    omega_k = c.light_speed * k
    r_mat = radiation_matrix(spec, k, 0, c)
    n_mat = spec.noise_ops[0]
    i = spec.initial

    a_last = np.zeros(realization.n_traj, dtype=complex)
    a_first = np.zeros(realization.n_traj, dtype=complex)
    for n in range(spec.size):
        gamma_n = float(spec.widths[n])
        x_n = complex(r_mat[f, n] * n_mat[n, i])
        y_n = complex(n_mat[f, n] * r_mat[n, i])
        if x_n != 0.0:
            # noise kick at the early time, photon at the late time
            inner = _cumulative_trapezoid(
                w * np.exp((1j * deltas[n, i] + gamma_n) * times), dt
            )
            outer = np.trapezoid(
                np.exp((1j * (deltas[f, n] + omega_k) - gamma_n) * times) * inner,
                dx=dt,
                axis=-1,
            )
            a_last += x_n * outer
        if y_n != 0.0:
            # photon at the early time, noise kick at the late time
            inner = _cumulative_trapezoid(
                np.exp((1j * (deltas[n, i] + omega_k) + gamma_n) * times), dt
            )
            outer = np.trapezoid(
                w * np.exp((1j * deltas[f, n] - gamma_n) * times) * inner,
                dx=dt,
                axis=-1,
            )
            a_first += y_n * outer
    return a_last, a_first


def predicted_Pfi(
    spec: SystemSpec,
    noise: AnyNoise,
    f: int,
    k: float,
    t: float,
    constants: CouplingConstants | None = None,
) -> float:
    """Closed-form finite-time probability the Monte Carlo is tested against."""
    return finite_time_probability(spec, noise, f, k, t, constants)


def estimate_Pfi(
    spec: SystemSpec,
    noise: AnyNoise,
    f: int,
    k: float,
    t: float,
    n_traj: int,
    seed: int,
    dt: float | None = None,
    batch: int = 100,
    constants: CouplingConstants | None = None,
) -> AmplitudeEstimate:
    """Monte Carlo estimate of the same probability, batched over streams."""
    c = constants or CouplingConstants()
    if n_traj < 2:
        raise InvariantViolationError("need at least two trajectories")
    step = dt if dt is not None else default_time_step(spec, noise, k, c)
    pref = c.gamma / (c.hbar * c.hbar)
    samples = np.empty(n_traj, dtype=float)
    done = 0
    while done < n_traj:
        take = min(batch, n_traj - done)
        real = sample_noise(noise, t, step, take, seed, stream_offset=done)
        a_last, a_first = amplitude_paths(spec, real, f, k, t, c)
        samples[done : done + take] = pref * np.abs(a_last + a_first) ** 2
        done += take
    mean = float(np.sum(samples) / n_traj)
    var = float(np.sum((samples - mean) ** 2) / (n_traj - 1))
    return AmplitudeEstimate(
        mean=mean,
        stderr=math.sqrt(var / n_traj),
        n_samples=n_traj,
        dt=step,
    )


def empirical_autocovariance(
    realization: NoiseRealization, n_lags: int, lag_step: int = 1
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Measured E[w(t) w(t + lag)] with a cross-trajectory standard error.

    Returns (lags, mean, stderr); entry 0 is the variance.  Each trajectory
    contributes one time-averaged covariance per lag, so the scatter across
    trajectories gives an honest error bar.  ``lag_step`` spaces the probed
    lags by that many grid steps, so a fine grid (small discretization bias)
    can still cover several correlation times with few lags.
    """
    if lag_step < 1:
        raise InvariantViolationError("lag_step must be a positive integer")
    w = realization.values
    n_steps = w.shape[1]
    if n_lags * lag_step >= n_steps:
        raise TrajectoryTooShortError("more lags requested than samples available")
    offsets = np.arange(n_lags) * lag_step
    lags = offsets * realization.dt
    per_traj = np.empty((w.shape[0], n_lags))
    for idx, r_idx in enumerate(offsets):
        prod = w[:, : n_steps - r_idx] * w[:, r_idx:]
        per_traj[:, idx] = np.mean(prod, axis=1)
    mean = np.mean(per_traj, axis=0)
    stderr = np.std(per_traj, axis=0, ddof=1) / math.sqrt(w.shape[0])
    return lags, mean, stderr
