"""Multi-antenna stacking of the delay-Doppler channel.

Every (receive, transmit) antenna pair sees the same set of delay-Doppler
tap positions but draws its complex gains independently.  The per-pair
effective matrices are stacked into one block matrix so that the whole
frame can be detected jointly with the ordinary ML / MMSE machinery.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analysis import RankReport, min_rank_over_pairs
from .channel import (
    ChannelProfile,
    build_H_fractional,
    build_H_fractional_batch,
    build_H_integer,
    build_H_integer_batch,
    gen_gains,
    profile_from_taps,
)
from .errors import ConfigurationError
from .grid import Alphabet, OtfsGrid
from .modem import PhaseRotation


@dataclass(frozen=True)
class MimoConfig:
    """Antenna counts for a spatial configuration."""

    n_t: int
    n_r: int

    def __post_init__(self) -> None:
        if self.n_t < 1 or self.n_r < 1:
            raise ConfigurationError(
                f"antenna counts must be >= 1, got n_t={self.n_t}, n_r={self.n_r}"
            )


@dataclass(frozen=True)
class MimoChannel:
    """Stacked effective matrix plus the per-antenna-pair profiles.

    ``profiles[l][k]`` is the profile from transmit antenna ``k`` to receive
    antenna ``l``; the corresponding block of ``H`` is
    ``H[l*MN:(l+1)*MN, k*MN:(k+1)*MN]``.
    """

    cfg: MimoConfig
    profiles: tuple[tuple[ChannelProfile, ...], ...]
    H: np.ndarray


def _tap_signature(profile: ChannelProfile):
    return tuple(
        (p.alpha, p.beta, p.frac_delay, p.frac_doppler) for p in profile.paths
    )


def gen_mimo_profiles(
    grid: OtfsGrid,
    taps: Sequence[tuple[int, int]],
    cfg: MimoConfig,
    seed,
    fracs: Sequence[tuple[float, float]] | None = None,
) -> list[list[ChannelProfile]]:
    """Draw one profile per antenna pair over a shared tap geometry.

    Gains are i.i.d. CN(0, 1/P) across pairs, drawn row-major (receive
    antenna outer, transmit antenna inner) so a fixed seed fixes the whole
    spatial realization.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    P = len(taps)
    return [
        [profile_from_taps(grid, gen_gains(P, rng), taps, fracs) for _ in range(cfg.n_t)]
        for _ in range(cfg.n_r)
    ]


def build_H_mimo(
    profiles: Sequence[Sequence[ChannelProfile]],
    grid: OtfsGrid,
    cfg: MimoConfig,
) -> MimoChannel:
    """Stack per-pair effective matrices into the joint block matrix.

    ``profiles`` is indexed ``[receive][transmit]`` and must be
    ``n_r`` x ``n_t`` with every profile on ``grid`` and sharing one tap
    geometry (positions and fractional offsets; gains are free).
    """
    if len(profiles) != cfg.n_r or any(len(row) != cfg.n_t for row in profiles):
        raise ConfigurationError(
            f"profile grid must be n_r x n_t = {cfg.n_r} x {cfg.n_t}, "
            f"got {len(profiles)} row(s) of lengths {[len(r) for r in profiles]}"
        )
    flat = [p for row in profiles for p in row]
    for p in flat:
        if p.grid != grid:
            raise ConfigurationError("all profiles must be bound to the same grid")
    sig = _tap_signature(flat[0])
    for p in flat[1:]:
        if _tap_signature(p) != sig:
            raise ConfigurationError(
                "antenna pairs must share one delay-Doppler tap geometry"
            )

    build = build_H_integer if flat[0].is_integer else build_H_fractional
    mn = grid.frame_size
    H = np.zeros((cfg.n_r * mn, cfg.n_t * mn), dtype=np.complex128)
    kept: list[tuple[ChannelProfile, ...]] = []
    for l, row in enumerate(profiles):
        kept.append(tuple(row))
        for k, prof in enumerate(row):
            H[l * mn : (l + 1) * mn, k * mn : (k + 1) * mn] = build(prof).H
    return MimoChannel(cfg=cfg, profiles=tuple(kept), H=H)


def build_H_mimo_batch(
    grid: OtfsGrid,
    gains: np.ndarray,
    taps: Sequence[tuple[int, int]],
    cfg: MimoConfig,
    fracs: Sequence[tuple[float, float]] | None = None,
) -> np.ndarray:
    """(B, n_r*MN, n_t*MN) stacked matrices for B spatial gain draws.

    ``gains`` has shape (B, n_r, n_t, P) over one shared tap geometry and
    fills the same blocks as build_H_mimo does for per-frame profiles built
    from the same numbers.  The Monte Carlo engine uses this to sidestep
    per-frame profile objects.
    """
    gains = np.asarray(gains, dtype=np.complex128)
    P = len(taps)
    want = (cfg.n_r, cfg.n_t, P)
    if gains.ndim != 4 or gains.shape[1:] != want:
        raise ConfigurationError(
            f"gain tensor must be (B, n_r, n_t, P) = (B,) + {want}, "
            f"got {gains.shape}"
        )
    B = gains.shape[0]
    mn = grid.frame_size
    alphas = np.asarray([t[0] for t in taps])
    betas = np.asarray([t[1] for t in taps])
    if fracs is None:
        def block(g: np.ndarray) -> np.ndarray:
            return build_H_integer_batch(grid, g, alphas, betas)
    else:
        al = np.broadcast_to(alphas, (B, P))
        be = np.broadcast_to(betas, (B, P))
        fa = np.broadcast_to(np.asarray([f[0] for f in fracs]), (B, P))
        fb = np.broadcast_to(np.asarray([f[1] for f in fracs]), (B, P))

        def block(g: np.ndarray) -> np.ndarray:
            return build_H_fractional_batch(grid, g, al, be, fa, fb)

    H = np.zeros((B, cfg.n_r * mn, cfg.n_t * mn), dtype=np.complex128)
    for l in range(cfg.n_r):
        for k in range(cfg.n_t):
            H[:, l * mn : (l + 1) * mn, k * mn : (k + 1) * mn] = block(
                gains[:, l, k]
            )
    return H


def mimo_phase_rotate(x_mimo: np.ndarray, phi: PhaseRotation) -> np.ndarray:
    """Apply the same diagonal rotation to each per-antenna segment."""
    x_mimo = np.asarray(x_mimo)
    L = len(phi)
    if x_mimo.ndim != 1 or x_mimo.shape[0] % L != 0:
        raise ConfigurationError(
            f"stacked vector length {x_mimo.shape} is not a multiple of {L}"
        )
    segs = x_mimo.reshape(-1, L)
    return (segs * phi.phi[None, :]).ravel()


def mimo_min_rank(
    grid: OtfsGrid,
    profile: ChannelProfile,
    alphabet: Alphabet,
    cfg: MimoConfig,
    phi: PhaseRotation | None = None,
    **scan_kwargs,
) -> RankReport:
    """Worst-case pair rank for the stacked system.

    Receive antennas see independent copies of every symbol difference, so
    the stacked worst case is ``n_r`` times the per-antenna one.  With a
    shared tap geometry every transmit antenna produces the same pair scan,
    hence a single scan covers the minimum over antennas.  ``kappa`` and
    ``witnesses`` in the returned report describe that per-antenna scan.
    """
    rep = min_rank_over_pairs(grid, profile, alphabet, phi, **scan_kwargs)
    if rep.min_rank is None:
        return rep
    return dataclasses.replace(rep, min_rank=cfg.n_r * rep.min_rank)


__all__ = [
    "MimoConfig",
    "MimoChannel",
    "gen_mimo_profiles",
    "build_H_mimo",
    "build_H_mimo_batch",
    "mimo_phase_rotate",
    "mimo_min_rank",
]
