"""Doubly-dispersive channel synthesis in the delay-Doppler tap domain.

A channel is a sparse set of P paths, each with a complex gain ``h_i``, an
integer delay tap ``alpha_i`` (bin width 1/(M*delta_f)), an integer Doppler
tap ``beta_i`` (bin width 1/(N*T)) and fractional parts ``a_i, b_i`` in
(-1/2, 1/2].  The physical delay and Doppler are

    tau_i = (alpha_i + a_i) / (M * delta_f),    nu_i = (beta_i + b_i) / (N * T),

so ``nu_i * tau_i = (alpha_i + a_i)(beta_i + b_i) / (M*N)``.

Two exact effective-matrix builders are provided for the vectorized relation
``y = H x + v`` over the Doppler-major flattening:

* integer taps: each received bin sees exactly P cyclically shifted copies of
  the transmit vector, weighted by ``h_i' = h_i * exp(-j 2 pi nu_i tau_i)``;
* fractional taps: each path smears over all M*N bins through the Dirichlet
  leakage kernels F (delay) and G (Doppler).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError
from .grid import OtfsGrid

__all__ = [
    "PathSpec",
    "ChannelProfile",
    "EffectiveChannel",
    "gen_gains",
    "gen_jakes_dopplers",
    "quantize_doppler",
    "effective_gain",
    "build_H_integer",
    "build_H_fractional",
    "frac_kernel_G",
    "frac_kernel_F",
    "full_grid_taps",
    "corner_taps",
    "profile_from_taps",
    "gather_index",
    "batch_gather_index",
    "apply_taps_batch",
    "build_H_integer_batch",
    "build_H_fractional_batch",
]


@dataclass(frozen=True)
class PathSpec:
    """One propagation path in tap coordinates."""

    gain: complex
    alpha: int
    beta: int
    frac_delay: float = 0.0
    frac_doppler: float = 0.0

    def __post_init__(self) -> None:
        for name, frac in (("frac_delay", self.frac_delay), ("frac_doppler", self.frac_doppler)):
            if not (-0.5 < frac <= 0.5):
                raise ConfigurationError(f"{name}={frac} outside (-1/2, 1/2]")

    @property
    def is_integer(self) -> bool:
        return self.frac_delay == 0.0 and self.frac_doppler == 0.0


@dataclass(frozen=True)
class ChannelProfile:
    """A grid-bound list of paths."""

    grid: OtfsGrid
    paths: tuple[PathSpec, ...]

    def __post_init__(self) -> None:
        paths = tuple(self.paths)
        if len(paths) < 1:
            raise ConfigurationError("profile needs at least one path")
        for p in paths:
            if not (0 <= p.alpha < self.grid.M):
                raise ConfigurationError(f"delay tap {p.alpha} outside [0, M={self.grid.M})")
            if not (0 <= p.beta < self.grid.N):
                raise ConfigurationError(f"Doppler tap {p.beta} outside [0, N={self.grid.N})")
        if all(p.is_integer for p in paths):
            bins = [(p.alpha, p.beta) for p in paths]
            if len(set(bins)) != len(bins):
                raise ConfigurationError(f"duplicate integer delay-Doppler bins in profile: {bins}")
        object.__setattr__(self, "paths", paths)

    @property
    def P(self) -> int:
        return len(self.paths)

    @property
    def is_integer(self) -> bool:
        return all(p.is_integer for p in self.paths)

    def gains(self) -> np.ndarray:
        return np.array([p.gain for p in self.paths], dtype=np.complex128)

    def alphas(self) -> np.ndarray:
        return np.array([p.alpha for p in self.paths], dtype=np.int64)

    def betas(self) -> np.ndarray:
        return np.array([p.beta for p in self.paths], dtype=np.int64)

    def frac_delays(self) -> np.ndarray:
        return np.array([p.frac_delay for p in self.paths])

    def frac_dopplers(self) -> np.ndarray:
        return np.array([p.frac_doppler for p in self.paths])

    def delays(self) -> np.ndarray:
        """Physical delays tau_i in seconds."""
        return (self.alphas() + self.frac_delays()) / (self.grid.M * self.grid.delta_f)

    def dopplers(self) -> np.ndarray:
        """Physical Dopplers nu_i in Hz."""
        return (self.betas() + self.frac_dopplers()) * self.grid.delta_f / self.grid.N


@dataclass(frozen=True)
class EffectiveChannel:
    """Dense effective matrix for ``y = H x + v`` plus its provenance."""

    H: np.ndarray
    profile: ChannelProfile
    kind: str  # "integer-tap" | "fractional"


def gen_gains(P: int, seed) -> np.ndarray:
    """Draw P i.i.d. circularly-symmetric complex Gaussian gains, variance 1/P.

    ``seed`` may be an integer or a ``numpy.random.Generator``.
    """
    if P < 1:
        raise ConfigurationError(f"need P >= 1, got {P}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    scale = np.sqrt(1.0 / (2.0 * P))
    z = rng.standard_normal((P, 2))
    return scale * (z[:, 0] + 1j * z[:, 1])


def gen_jakes_dopplers(nu_max: float, P: int, seed) -> np.ndarray:
    """Doppler shifts nu_i = nu_max * cos(theta_i), theta_i ~ Uniform[-pi, pi].

    The classic isotropic-scattering law: nu/nu_max follows the arcsine
    density on [-1, 1].
    """
    if nu_max < 0:
        raise ConfigurationError(f"nu_max must be >= 0, got {nu_max}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    theta = rng.uniform(-np.pi, np.pi, size=P)
    return nu_max * np.cos(theta)


def quantize_doppler(nu: float, grid: OtfsGrid) -> tuple[int, float]:
    """Split a physical Doppler into (integer tap beta, fractional part b).

    beta + b = nu * N * T with beta the nearest integer (so b in [-1/2, 1/2];
    a -1/2 remainder is folded to +1/2 to honor the (-1/2, 1/2] convention)
    and beta reduced modulo N onto the grid.
    """
    total = nu * grid.N * grid.T
    beta = int(np.round(total))
    b = total - beta
    if b == -0.5:
        b = 0.5
        beta -= 1
    return beta % grid.N, float(b)


def effective_gain(path: PathSpec, grid: OtfsGrid) -> complex:
    """The per-path gain as seen in the delay-Doppler I/O relation.

    h_i' = h_i * exp(-j 2 pi nu_i tau_i), with the phase reducing to
    -2 pi (alpha+a)(beta+b) / (M N).
    """
    phase = -2.0 * np.pi * (path.alpha + path.frac_delay) * (path.beta + path.frac_doppler) / (
        grid.M * grid.N
    )
    return complex(path.gain * np.exp(1j * phase))


def gather_index(profile: ChannelProfile) -> np.ndarray:
    """(P, MN) index map of the integer-tap shifts.

    Row i maps output bin ``k + N*l`` to input bin
    ``((k - beta_i) mod N) + N*((l - alpha_i) mod M)``.  The same map builds
    the effective matrix, applies the channel, and forms the symbol matrix
    used in rank analysis; keeping it in one place keeps those three in sync.
    """
    M, N = profile.grid.M, profile.grid.N
    k = np.arange(N)[:, None]  # (N, 1)
    l = np.arange(M)[None, :]  # (1, M)
    out = np.empty((profile.P, M * N), dtype=np.int64)
    for i, p in enumerate(profile.paths):
        src = (k - p.beta) % N + N * ((l - p.alpha) % M)  # (N, M) at [k, l]
        out[i] = src.ravel(order="F")
    return out


def build_H_integer(profile: ChannelProfile) -> EffectiveChannel:
    """Dense MN x MN effective matrix for an integer-tap profile.

    (H x)_{k+Nl} = sum_i h_i' x_{((k-beta_i) mod N) + N((l-alpha_i) mod M)};
    every row and column ends up with exactly P nonzero entries.
    """
    if not profile.is_integer:
        raise ConfigurationError(
            "profile has fractional delay/Doppler parts; use build_H_fractional"
        )
    MN = profile.grid.frame_size
    gidx = gather_index(profile)
    H = np.zeros((MN, MN), dtype=np.complex128)
    rows = np.arange(MN)
    for i, p in enumerate(profile.paths):
        H[rows, gidx[i]] += effective_gain(p, profile.grid)
    return EffectiveChannel(H=H, profile=profile, kind="integer-tap")


def _dirichlet(val: np.ndarray | float, count: int, sign: float) -> np.ndarray:
    """Closed form of sum_{n=0}^{count-1} exp(sign * j * (2 pi / count) * val * n).

    Geometric series with ratio exp(sign*j*2*pi*val/count); when the ratio
    phase sits within 1e-9 of a multiple of 2 pi the sum degenerates to
    ``count`` exactly (all terms are 1), which is returned directly instead of
    evaluating 0/0.
    """
    val = np.asarray(val, dtype=np.float64)
    # distance of the ratio phase (2 pi val / count) from the nearest multiple of 2 pi
    cycles = val / count
    degenerate = np.abs(2.0 * np.pi * (cycles - np.round(cycles))) < 1e-9
    safe = np.where(degenerate, 0.25, cycles)  # dummy value, masked out below
    num = np.sin(np.pi * val)
    den = np.sin(np.pi * safe)
    phase = np.exp(sign * 1j * np.pi * val * (count - 1) / count)
    out = np.where(degenerate, complex(count), phase * num / den)
    return out


def frac_kernel_G(k: int, k_prime: int, beta: int, b: float, N: int) -> complex:
    """Doppler leakage kernel sum_{n'=0}^{N-1} e^{-j(2 pi/N)(k-k'-beta-b) n'}.

    Peaks (magnitude N) at k' = (k - beta) mod N and collapses to an exact
    Kronecker delta (scaled by N) when b = 0.
    """
    return complex(_dirichlet(k - k_prime - beta - b, N, -1.0))


def frac_kernel_F(l: int, l_prime: int, alpha: int, a: float, M: int) -> complex:
    """Delay leakage kernel sum_{m'=0}^{M-1} e^{+j(2 pi/M)(l-l'-alpha-a) m'}."""
    return complex(_dirichlet(l - l_prime - alpha - a, M, +1.0))


def _frac_coeff_FG(profile: ChannelProfile) -> tuple[np.ndarray, np.ndarray]:
    """Per-path normalized leakage coefficient vectors.

    Returns (Fc, Gc) with shapes (P, M) and (P, N):
    Fc[i, q]  = frac_kernel_F evaluated at delay offset q, divided by M;
    Gc[i, q'] = frac_kernel_G at Doppler offset q', divided by N.
    Offset q means the contribution of input delay bin (l - alpha_i + q) mod M
    to output bin l (and similarly q' for Doppler).
    """
    M, N = profile.grid.M, profile.grid.N
    a = profile.frac_delays()[:, None]
    b = profile.frac_dopplers()[:, None]
    q = np.arange(M)[None, :]
    qp = np.arange(N)[None, :]
    Fc = _dirichlet(-q - a, M, +1.0) / M
    Gc = _dirichlet(-qp - b, N, -1.0) / N
    return Fc, Gc


def build_H_fractional(profile: ChannelProfile) -> EffectiveChannel:
    """Dense MN x MN effective matrix with fractional delay/Doppler leakage.

    H[k+Nl, k'+Nl'] = sum_i h_i e^{-j 2 pi tau_i nu_i}
                      * Fc_i[(l'-l+alpha_i) mod M] * Gc_i[(k'-k+beta_i) mod N]

    where Fc/Gc are the normalized Dirichlet coefficient vectors.  With all
    fractional parts zero the coefficients are Kronecker deltas and the matrix
    equals the integer-tap build.
    """
    grid = profile.grid
    M, N = grid.M, grid.N
    Fc, Gc = _frac_coeff_FG(profile)
    # (l, l') and (k, k') relative-offset index grids, reused per path
    dl = (np.arange(M)[None, :] - np.arange(M)[:, None]) % M  # (l, l') -> (l'-l) mod M
    dk = (np.arange(N)[None, :] - np.arange(N)[:, None]) % N
    H = np.zeros((M * N, M * N), dtype=np.complex128)
    for i, p in enumerate(profile.paths):
        hp = effective_gain(p, grid)
        Fmat = Fc[i][(dl + p.alpha) % M]  # (M, M) indexed [l, l']
        Gmat = Gc[i][(dk + p.beta) % N]  # (N, N) indexed [k, k']
        # Doppler-major flattening makes the path contribution kron(Fmat, Gmat)
        H += hp * np.kron(Fmat, Gmat)
    return EffectiveChannel(H=H, profile=profile, kind="fractional")


def batch_gather_index(grid: OtfsGrid, alphas: np.ndarray, betas: np.ndarray) -> np.ndarray:
    """(P, MN) integer-tap shift map from raw tap arrays (no profile needed)."""
    M, N = grid.M, grid.N
    k = np.arange(N)[:, None]
    l = np.arange(M)[None, :]
    out = np.empty((len(alphas), M * N), dtype=np.int64)
    for i, (a, b) in enumerate(zip(alphas, betas)):
        out[i] = ((k - b) % N + N * ((l - a) % M)).ravel(order="F")
    return out


def apply_taps_batch(x: np.ndarray, hp: np.ndarray, gidx: np.ndarray) -> np.ndarray:
    """Batched noiseless integer-tap channel action, y = H x without forming H.

    x: (B, MN) transmit vectors; hp: (B, P) effective gains h_i';
    gidx: (P, MN) shift map.  Returns (B, MN).
    """
    y = np.zeros_like(x)
    for i in range(gidx.shape[0]):
        y += hp[:, i, None] * x[:, gidx[i]]
    return y


def build_H_integer_batch(
    grid: OtfsGrid, gains: np.ndarray, alphas: np.ndarray, betas: np.ndarray
) -> np.ndarray:
    """(B, MN, MN) effective matrices for B gain draws over fixed integer taps."""
    MN = grid.frame_size
    gidx = batch_gather_index(grid, alphas, betas)
    phases = np.exp(-2j * np.pi * alphas * betas / MN)
    hp = gains * phases[None, :]
    B = gains.shape[0]
    H = np.zeros((B, MN, MN), dtype=np.complex128)
    rows = np.arange(MN)
    for i in range(len(alphas)):
        H[:, rows, gidx[i]] += hp[:, i, None]
    return H


def build_H_fractional_batch(
    grid: OtfsGrid,
    gains: np.ndarray,
    alphas: np.ndarray,
    betas: np.ndarray,
    frac_delays: np.ndarray,
    frac_dopplers: np.ndarray,
) -> np.ndarray:
    """(B, MN, MN) effective matrices with per-frame taps and fractional parts.

    All tap arrays are (B, P); gains is (B, P).  Matches build_H_fractional
    row by row for each frame, just vectorized over the batch.
    """
    M, N = grid.M, grid.N
    B, P = gains.shape
    a = frac_delays[..., None]
    b = frac_dopplers[..., None]
    Fc = _dirichlet(-np.arange(M)[None, None, :] - a, M, +1.0) / M  # (B, P, M)
    Gc = _dirichlet(-np.arange(N)[None, None, :] - b, N, -1.0) / N  # (B, P, N)
    dl = (np.arange(M)[None, :] - np.arange(M)[:, None]) % M
    dk = (np.arange(N)[None, :] - np.arange(N)[:, None]) % N
    idxF = (dl[None, None] + alphas[:, :, None, None]) % M  # (B, P, M, M)
    idxG = (dk[None, None] + betas[:, :, None, None]) % N
    bi = np.arange(B)[:, None, None, None]
    pi = np.arange(P)[None, :, None, None]
    Fmat = Fc[bi, pi, idxF]  # (B, P, M, M) indexed [l, l']
    Gmat = Gc[bi, pi, idxG]  # (B, P, N, N) indexed [k, k']
    hp = gains * np.exp(
        -2j * np.pi * (alphas + frac_delays) * (betas + frac_dopplers) / (M * N)
    )
    H = np.einsum("bp,bplm,bpkn->blkmn", hp, Fmat, Gmat, optimize=True)
    return H.reshape(B, M * N, M * N)


def full_grid_taps(grid: OtfsGrid) -> list[tuple[int, int]]:
    """All MN (alpha, beta) bins, delay-major: path index = beta + N*alpha."""
    return [(a, b) for a in range(grid.M) for b in range(grid.N)]


def corner_taps(grid: OtfsGrid, P: int) -> list[tuple[int, int]]:
    """The first P taps of the smallest square corner block of the tap grid.

    For P=4 this is the classic low-corner profile
    (0,0), (0,1), (1,0), (1,1) — delays {0, 1/(M delta_f)} crossed with
    Dopplers {0, 1/(N T)}.
    """
    side = int(np.ceil(np.sqrt(P)))
    if side > grid.M or side > grid.N:
        raise ConfigurationError(
            f"corner profile with P={P} needs a {side}x{side} tap block; grid is "
            f"M={grid.M} by N={grid.N}"
        )
    taps = [(a, b) for a in range(side) for b in range(side)]
    return taps[:P]


def profile_from_taps(
    grid: OtfsGrid,
    gains: Sequence[complex],
    taps: Sequence[tuple[int, int]],
    fracs: Sequence[tuple[float, float]] | None = None,
) -> ChannelProfile:
    """Assemble a profile from parallel gain/tap/(frac) lists."""
    if len(gains) != len(taps):
        raise ConfigurationError(f"{len(gains)} gains for {len(taps)} taps")
    if fracs is None:
        fracs = [(0.0, 0.0)] * len(taps)
    paths = tuple(
        PathSpec(gain=complex(h), alpha=int(a), beta=int(b), frac_delay=fa, frac_doppler=fb)
        for h, (a, b), (fa, fb) in zip(gains, taps, fracs)
    )
    return ChannelProfile(grid=grid, paths=paths)
