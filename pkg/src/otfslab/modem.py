"""Discrete OTFS transmit/receive chain under ideal rectangular-window pulses.

The chain is

    delay-Doppler frame --isfft--> time-frequency grid --heisenberg--> samples
    samples --wigner--> time-frequency grid --sfft--> delay-Doppler frame

with the normalization split so that the noiseless end-to-end chain over an
identity channel is exactly the identity map.  ``apply_td_channel`` acts on
the sample stream and is constructed so that the full chain reproduces the
dense delay-Doppler matrix model to machine precision (see the chain test).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelProfile
from .errors import ConfigurationError, UnsupportedOperationError
from .grid import DDFrame, OtfsGrid

__all__ = [
    "TFGrid",
    "TimeFrame",
    "PhaseRotation",
    "isfft",
    "sfft",
    "heisenberg",
    "wigner",
    "apply_td_channel",
    "add_awgn",
    "default_phi",
    "phase_rotate",
    "phase_derotate",
]


@dataclass(frozen=True)
class TFGrid:
    """Time-frequency samples ``values[n, m]``: n time slots by m subcarriers."""

    grid: OtfsGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.complex128)
        if arr.shape != (self.grid.N, self.grid.M):
            raise ConfigurationError(
                f"TF grid shape {arr.shape} does not match (N={self.grid.N}, M={self.grid.M})"
            )
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class TimeFrame:
    """MN complex baseband samples at rate M*delta_f (sample interval T/M)."""

    grid: OtfsGrid
    samples: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.samples, dtype=np.complex128)
        if arr.shape != (self.grid.frame_size,):
            raise ConfigurationError(
                f"time frame length {arr.shape} does not match M*N={self.grid.frame_size}"
            )
        object.__setattr__(self, "samples", arr)


@dataclass(frozen=True)
class PhaseRotation:
    """Diagonal unit-modulus precoder, entry i = exp(j * exponents[i])."""

    exponents: np.ndarray

    def __post_init__(self) -> None:
        exps = np.asarray(self.exponents, dtype=np.float64)
        if exps.ndim != 1 or exps.size < 1:
            raise ConfigurationError("exponents must be a nonempty 1-D array")
        if len(np.unique(exps)) != exps.size:
            raise ConfigurationError("phase-rotation exponents must be pairwise distinct")
        object.__setattr__(self, "exponents", exps)

    @property
    def phi(self) -> np.ndarray:
        return np.exp(1j * self.exponents)

    def __len__(self) -> int:
        return self.exponents.size


def isfft(dd: DDFrame) -> TFGrid:
    """Inverse symplectic finite Fourier transform.

    X[n,m] = (1/(MN)) sum_{k,l} x[k,l] e^{j 2 pi (nk/N - ml/M)}.
    """
    M, N = dd.grid.M, dd.grid.N
    t = np.fft.ifft(dd.symbols, axis=0) * N  # sum over k with e^{+j2pi nk/N}
    X = np.fft.fft(t, axis=1) / (M * N)  # sum over l with e^{-j2pi ml/M}
    return TFGrid(dd.grid, X)


def sfft(tf: TFGrid) -> DDFrame:
    """Symplectic finite Fourier transform; exact inverse of :func:`isfft`.

    x[k,l] = sum_{n,m} X[n,m] e^{-j 2 pi (nk/N - ml/M)} (no 1/(MN) factor —
    the normalization lives entirely in the inverse).
    """
    M, N = tf.grid.M, tf.grid.N
    t = np.fft.fft(tf.values, axis=0)  # sum over n with e^{-j2pi nk/N}
    x = np.fft.ifft(t, axis=1) * M  # sum over m with e^{+j2pi ml/M}
    return DDFrame(tf.grid, x)


def heisenberg(tf: TFGrid) -> TimeFrame:
    """Multicarrier modulator for rectangular pulses.

    s[nM + p] = sum_m X[n,m] e^{j 2 pi m p / M}: a per-symbol inverse DFT
    across subcarriers with the N symbols concatenated in time.
    """
    M = tf.grid.M
    s = (M * np.fft.ifft(tf.values, axis=1)).ravel()
    return TimeFrame(tf.grid, s)


def wigner(frame: TimeFrame) -> TFGrid:
    """Matched-filter sampler inverting :func:`heisenberg`.

    Y[n,m] = (1/M) sum_p y[nM+p] e^{-j 2 pi m p / M}.
    """
    M, N = frame.grid.M, frame.grid.N
    Y = np.fft.fft(frame.samples.reshape(N, M), axis=1) / M
    return TFGrid(frame.grid, Y)


def apply_td_channel(frame: TimeFrame, profile: ChannelProfile) -> TimeFrame:
    """Integer-tap doubly-dispersive channel acting on the sample stream.

    y[nM+p] = sum_i h_i * e^{j 2 pi beta_i (nM - alpha_i)/(MN)}
                       * s[nM + ((p - alpha_i) mod M)]

    Each path delays cyclically *within* each M-sample symbol and advances
    its Doppler phase from symbol to symbol, the phase being evaluated at the
    delayed symbol start.  This is the discretization of the ideal
    bi-orthogonal-pulse receiver under which the time-domain chain and the
    dense delay-Doppler matrix agree exactly: per-symbol cyclicity is what the
    matched filter of an ideal pulse sees, and anchoring the ramp at nM -
    alpha_i makes the constant e^{-j 2 pi nu_i tau_i} factor of the matrix
    model emerge with no correction terms.  (A whole-frame cyclic shift with a
    per-sample ramp instead produces the reduced-cyclic-prefix variant, whose
    extra phases break that equivalence for M > 1.)
    """
    if not profile.is_integer:
        raise UnsupportedOperationError(
            "time-domain application supports integer taps only; "
            "use build_H_fractional for fractional delay/Doppler"
        )
    if profile.grid != frame.grid:
        raise ConfigurationError("profile and time frame are bound to different grids")
    M, N = frame.grid.M, frame.grid.N
    sm = frame.samples.reshape(N, M)
    out = np.zeros((N, M), dtype=np.complex128)
    n = np.arange(N)[:, None]
    for p in profile.paths:
        ramp = p.gain * np.exp(2j * np.pi * p.beta * (n * M - p.alpha) / (M * N))
        out += ramp * np.roll(sm, p.alpha, axis=1)
    return TimeFrame(frame.grid, out.ravel())


def add_awgn(signal, N0: float, seed):
    """Add i.i.d. circularly-symmetric complex Gaussian noise of variance N0.

    Accepts a TimeFrame or a bare complex array and returns the same type.
    N0 = 0 returns the input unchanged.
    """
    if N0 < 0:
        raise ConfigurationError(f"noise variance must be >= 0, got {N0}")
    arr = signal.samples if isinstance(signal, TimeFrame) else np.asarray(signal)
    if N0 == 0:
        noisy = arr
    else:
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        z = rng.standard_normal(arr.shape + (2,))
        noise = np.sqrt(N0 / 2.0) * (z[..., 0] + 1j * z[..., 1])
        noisy = arr + noise
    if isinstance(signal, TimeFrame):
        return TimeFrame(signal.grid, noisy)
    return noisy


def default_phi(MN: int) -> PhaseRotation:
    """The standard transmit rotation: entry i = e^{j i / MN} (radians i/MN).

    The MN exponents 0, 1/MN, ..., (MN-1)/MN are pairwise distinct and
    pairwise non-opposite, which is what makes rotated symbol differences
    avoid cancellation in the rank analysis.
    """
    if MN < 1:
        raise ConfigurationError(f"need MN >= 1, got {MN}")
    return PhaseRotation(np.arange(MN) / MN)


def phase_rotate(x: np.ndarray, phi: PhaseRotation) -> np.ndarray:
    """Elementwise multiply by the rotation diagonal."""
    x = np.asarray(x)
    if x.shape[-1] != len(phi):
        raise ConfigurationError(
            f"vector length {x.shape[-1]} does not match rotation size {len(phi)}"
        )
    return x * phi.phi


def phase_derotate(x: np.ndarray, phi: PhaseRotation) -> np.ndarray:
    """Inverse of :func:`phase_rotate` (conjugate diagonal)."""
    x = np.asarray(x)
    if x.shape[-1] != len(phi):
        raise ConfigurationError(
            f"vector length {x.shape[-1]} does not match rotation size {len(phi)}"
        )
    return x * np.conj(phi.phi)
