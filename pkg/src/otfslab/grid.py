"""Frame geometry, modulation alphabets and the delay-Doppler frame container.

Index conventions used throughout the package:

* ``k`` is the Doppler index, ``k in [0, N)``; ``l`` is the delay index,
  ``l in [0, M)``.
* A frame flattens to a vector with element ``k + N*l`` equal to ``x[k, l]``
  (Doppler-major ordering).  Every matrix in the package uses this layout.
* The symbol duration ``T`` is never stored: it is always ``1/delta_f``, so
  ``T * delta_f == 1`` cannot drift.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "OtfsGrid",
    "Alphabet",
    "DDFrame",
    "bpsk",
    "qam8",
    "make_alphabet",
    "vectorize",
    "devectorize",
    "grid_from_requirements",
]


@dataclass(frozen=True)
class OtfsGrid:
    """Geometry of one delay-Doppler frame.

    M delay bins by N Doppler bins on a lattice with subcarrier spacing
    ``delta_f`` (Hz).  ``fc`` is carrier frequency metadata only; nothing in
    the math depends on it.
    """

    M: int
    N: int
    delta_f: float = 1.0
    fc: float = 0.0

    def __post_init__(self) -> None:
        if self.M < 1 or self.N < 1:
            raise ConfigurationError(f"grid needs M >= 1 and N >= 1, got ({self.M}, {self.N})")
        if self.delta_f <= 0:
            raise ConfigurationError(f"subcarrier spacing must be positive, got {self.delta_f}")

    @property
    def T(self) -> float:
        """Symbol duration in seconds; exactly 1/delta_f."""
        return 1.0 / self.delta_f

    @property
    def frame_size(self) -> int:
        return self.M * self.N

    @property
    def delay_resolution(self) -> float:
        """Delay bin width, 1/(M*delta_f) seconds."""
        return 1.0 / (self.M * self.delta_f)

    @property
    def doppler_resolution(self) -> float:
        """Doppler bin width, 1/(N*T) Hz."""
        return self.delta_f / self.N


@dataclass(frozen=True)
class Alphabet:
    """Unit-energy modulation alphabet with an explicit bit labeling.

    ``points[v]`` is the constellation point whose label is the integer ``v``
    read from the bit pattern MSB-first, so ordering points by index orders
    them lexicographically by label.  This is what makes deterministic
    lexicographic tie-breaking in the ML detector fall out of ``argmin``.
    """

    name: str
    points: np.ndarray
    bits_per_symbol: int
    _bit_table: np.ndarray = field(repr=False, default=None)  # (2^b, b) uint8

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.complex128)
        if pts.ndim != 1 or len(pts) != 2**self.bits_per_symbol:
            raise ConfigurationError(
                f"alphabet {self.name!r}: need 2^{self.bits_per_symbol} points, got {pts.shape}"
            )
        mean_energy = float(np.mean(np.abs(pts) ** 2))
        if abs(mean_energy - 1.0) > 1e-12:
            raise ConfigurationError(
                f"alphabet {self.name!r}: mean energy {mean_energy} != 1"
            )
        object.__setattr__(self, "points", pts)
        n = len(pts)
        table = ((np.arange(n)[:, None] >> np.arange(self.bits_per_symbol - 1, -1, -1)) & 1)
        object.__setattr__(self, "_bit_table", table.astype(np.uint8))

    def __len__(self) -> int:
        return len(self.points)

    def bits_to_indices(self, bits: np.ndarray) -> np.ndarray:
        """Pack bits (last axis = bits_per_symbol, MSB first) into label integers."""
        bits = np.asarray(bits)
        if bits.shape[-1] != self.bits_per_symbol:
            raise ConfigurationError(
                f"last axis must hold {self.bits_per_symbol} bits, got shape {bits.shape}"
            )
        weights = 1 << np.arange(self.bits_per_symbol - 1, -1, -1)
        return (bits * weights).sum(axis=-1)

    def map_bits(self, bits: np.ndarray) -> np.ndarray:
        """Map a flat bit array (length divisible by bits_per_symbol) to symbols."""
        bits = np.asarray(bits).reshape(-1, self.bits_per_symbol)
        return self.points[self.bits_to_indices(bits)]

    def indices_to_bits(self, idx: np.ndarray) -> np.ndarray:
        """Unpack label integers into bits, MSB first, flattened."""
        return self._bit_table[np.asarray(idx)].reshape(np.shape(idx) + (self.bits_per_symbol,))

    def slice(self, soft: np.ndarray) -> np.ndarray:
        """Nearest-point hard decision; returns label indices."""
        soft = np.asarray(soft, dtype=np.complex128)
        d = np.abs(soft[..., None] - self.points)
        return np.argmin(d, axis=-1)


def bpsk() -> Alphabet:
    """BPSK with the fixed convention bit 0 -> +1, bit 1 -> -1."""
    return Alphabet("bpsk", np.array([1.0 + 0j, -1.0 + 0j]), 1)


def qam8() -> Alphabet:
    """Rectangular 4x2 8-QAM, Gray labeled, unit energy.

    Bits (b0 b1 b2), b0 = MSB: b0 b1 select the real level through the Gray
    sequence 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3 (scaled by 1/sqrt(6));
    b2 selects the imaginary level, 0 -> +1, 1 -> -1 (same scale).  The mean
    point energy is (5 + 1)/6 = 1 exactly.
    """
    scale = 1.0 / np.sqrt(6.0)
    gray_real = {0b00: -3.0, 0b01: -1.0, 0b11: 1.0, 0b10: 3.0}
    pts = np.empty(8, dtype=np.complex128)
    for label in range(8):
        re = gray_real[label >> 1]
        im = 1.0 if (label & 1) == 0 else -1.0
        pts[label] = scale * (re + 1j * im)
    return Alphabet("8qam", pts, 3)


_ALPHABETS = {"bpsk": bpsk, "8qam": qam8, "qam8": qam8}


def make_alphabet(name: str) -> Alphabet:
    try:
        return _ALPHABETS[name.lower()]()
    except KeyError:
        raise ConfigurationError(
            f"unknown alphabet {name!r}; available: {sorted(_ALPHABETS)}"
        ) from None


@dataclass(frozen=True)
class DDFrame:
    """One delay-Doppler frame: ``symbols[k, l]`` with shape (N, M)."""

    grid: OtfsGrid
    symbols: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.symbols, dtype=np.complex128)
        if arr.shape != (self.grid.N, self.grid.M):
            raise ConfigurationError(
                f"frame shape {arr.shape} does not match grid (N={self.grid.N}, M={self.grid.M})"
            )
        object.__setattr__(self, "symbols", arr)


def vectorize(frame: DDFrame) -> np.ndarray:
    """Flatten a frame Doppler-major: element ``k + N*l`` is ``symbols[k, l]``."""
    return frame.symbols.ravel(order="F").copy()


def devectorize(vec: np.ndarray, grid: OtfsGrid) -> DDFrame:
    """Inverse of :func:`vectorize`."""
    vec = np.asarray(vec, dtype=np.complex128)
    if vec.shape != (grid.frame_size,):
        raise ConfigurationError(
            f"vector length {vec.shape} does not match grid frame size {grid.frame_size}"
        )
    return DDFrame(grid, vec.reshape(grid.N, grid.M, order="F"))


def grid_from_requirements(
    bandwidth: float,
    latency: float,
    tau_max: float,
    nu_max: float,
    delta_f: float,
    fc: float = 0.0,
) -> OtfsGrid:
    """Size a grid from system requirements.

    The subcarrier spacing must strictly dominate the largest Doppler shift
    and the symbol duration must strictly dominate the largest delay
    (``nu_max < delta_f < 1/tau_max``); then M delay bins cover the bandwidth
    and N Doppler bins cover the latency budget.
    """
    if not nu_max < delta_f:
        raise ConfigurationError(
            f"need nu_max < delta_f, got nu_max={nu_max} Hz, delta_f={delta_f} Hz"
        )
    if tau_max > 0 and not delta_f < 1.0 / tau_max:
        raise ConfigurationError(
            f"need delta_f < 1/tau_max, got delta_f={delta_f} Hz, 1/tau_max={1.0 / tau_max} Hz"
        )
    M = int(np.floor(bandwidth / delta_f))
    N = int(np.floor(latency * delta_f))
    if M < 1 or N < 1:
        raise ConfigurationError(
            f"requirements give an empty grid: M={M}, N={N}"
        )
    return OtfsGrid(M=M, N=N, delta_f=delta_f, fc=fc)
