"""Monte Carlo engine and experiment runners.

Frames are simulated in a config-fixed schedule of 100-frame batches; every
batch owns purpose-tagged random streams derived from the base seed, so a
run is bit-reproducible for any worker count and any single batch can be
replayed in isolation.  Error counters are plain integers merged in batch
order, and the stopping rule is evaluated only at batch boundaries.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import isfinite

import numpy as np

from .analysis import (
    PAIR_ENUMERATION_CAP,
    BoundCurve,
    RankReport,
    ber_lower_bound,
    ber_lower_bound_asymptotic,
    build_symbol_matrix,
    build_symbol_matrix_frac,
    enumerate_rank_one_pairs,
    min_rank_over_pairs,
    union_upper_bound,
)
from .channel import (
    build_H_fractional,
    build_H_integer,
    build_H_integer_batch,
    build_H_fractional_batch,
    effective_gain,
    full_grid_taps,
    gen_gains,
    gen_jakes_dopplers,
    profile_from_taps,
    quantize_doppler,
)
from .config import SYSTEMS, ExperimentConfig
from .detect import ml_detect_batch, mmse_equalize_batch
from .errors import ConfigurationError
from .grid import OtfsGrid, devectorize, make_alphabet, vectorize
from .mimo import MimoConfig, build_H_mimo_batch, mimo_min_rank
from .modem import (
    PhaseRotation,
    apply_td_channel,
    default_phi,
    heisenberg,
    isfft,
    sfft,
    wigner,
)
from .ofdm import (
    OfdmConfig,
    ofdm_apply_channel,
    ofdm_demodulate,
    ofdm_effective_matrices,
    ofdm_mmse_detect,
    ofdm_modulate,
)

BATCH_FRAMES = 100
MIN_FRAMES_PER_POINT = 100

_PURPOSE_CHANNEL = 0
_PURPOSE_DATA = 1
_PURPOSE_NOISE = 2
_FIXED_DOPPLER_INDEX = 1 << 20  # reserved snr_index slot, outside any real sweep


# ------------------------------------------------------------ results


@dataclass(frozen=True)
class SnrPoint:
    snr_db: float
    frames: int
    bit_errors: int
    ber: float
    seed: int
    wall_time: float = field(compare=False, default=0.0)


@dataclass(frozen=True)
class SweepResult:
    config: ExperimentConfig
    fingerprint: str
    points: tuple[SnrPoint, ...]

    def snr_array(self) -> np.ndarray:
        return np.array([p.snr_db for p in self.points])

    def ber_array(self) -> np.ndarray:
        return np.array([p.ber for p in self.points])


@dataclass(frozen=True)
class CompareResult:
    first: SweepResult
    second: SweepResult
    gains_db: dict  # target BER -> SNR advantage of `first` in dB (None = no crossing)


# ------------------------------------------------------------ seeding


def _stream(cfg: ExperimentConfig, purpose: int, tag: int, snr_index: int, batch_index: int):
    seq = np.random.SeedSequence(
        cfg.base_seed, spawn_key=(purpose, tag, snr_index, batch_index)
    )
    return np.random.default_rng(seq)


def _system_tag(cfg: ExperimentConfig) -> int:
    # channel streams are untagged (shared across paired systems); data and
    # noise streams fold the system in so paired runs stay independent there
    return SYSTEMS.index(cfg.system) + 1


# ------------------------------------------------------------ config plumbing


def _grid(cfg: ExperimentConfig) -> OtfsGrid:
    return OtfsGrid(M=cfg.M, N=cfg.N, delta_f=cfg.delta_f)


def _phi(cfg: ExperimentConfig) -> PhaseRotation | None:
    if not cfg.rotated:
        return None
    if cfg.phi_exponents is not None:
        return PhaseRotation(np.array(cfg.phi_exponents))
    return default_phi(cfg.frame_size)


def _static_taps(cfg: ExperimentConfig, grid: OtfsGrid):
    if cfg.profile_kind == "explicit":
        return list(cfg.taps)
    if cfg.profile_kind == "full-grid":
        return full_grid_taps(grid)
    return None  # per-frame geometry


def _pdp_weights(cfg: ExperimentConfig) -> np.ndarray:
    w = np.exp(-cfg.pdp_decay * np.arange(cfg.P))
    return w / w.sum()


def _cp_len(cfg: ExperimentConfig, grid: OtfsGrid) -> int:
    if cfg.cp_len is not None:
        return cfg.cp_len
    taps = _static_taps(cfg, grid)
    if taps is None:
        return cfg.P - 1  # one tap per delay bin 0..P-1
    return max(a for a, _ in taps)


def _fixed_dopplers(cfg: ExperimentConfig) -> np.ndarray:
    rng = _stream(cfg, _PURPOSE_CHANNEL, 0, _FIXED_DOPPLER_INDEX, 0)
    return gen_jakes_dopplers(cfg.nu_max, cfg.P, rng)


def _draw_channel(cfg: ExperimentConfig, grid: OtfsGrid, rng, n_frames: int):
    """Per-frame path parameters for one batch, all (B, P) arrays.

    Returns (gains, alphas, betas, frac_delays, frac_dopplers, static) where
    ``static`` marks a tap geometry shared by every frame with no fractional
    parts (enabling the faster integer batch builder).
    """
    P = cfg.path_count
    if cfg.profile_kind in ("explicit", "full-grid"):
        taps = _static_taps(cfg, grid)
        gains = np.stack([gen_gains(P, rng) for _ in range(n_frames)])
        al = np.tile(np.array([a for a, _ in taps]), (n_frames, 1))
        be = np.tile(np.array([b for _, b in taps]), (n_frames, 1))
        if cfg.fracs is not None:
            fa = np.tile(np.array([a for a, _ in cfg.fracs]), (n_frames, 1))
            fb = np.tile(np.array([b for _, b in cfg.fracs]), (n_frames, 1))
        else:
            fa = np.zeros((n_frames, P))
            fb = np.zeros((n_frames, P))
        static = not (fa.any() or fb.any())
        return gains, al, be, fa, fb, static

    # exponential power profile over delay bins 0..P-1 with Jakes Doppler
    scale = np.sqrt(P * _pdp_weights(cfg))
    fixed = None if cfg.redraw_per_frame else _fixed_dopplers(cfg)
    gains = np.empty((n_frames, P), dtype=np.complex128)
    be = np.empty((n_frames, P), dtype=np.int64)
    fb = np.empty((n_frames, P))
    for f in range(n_frames):
        gains[f] = gen_gains(P, rng) * scale
        nus = gen_jakes_dopplers(cfg.nu_max, P, rng) if fixed is None else fixed
        for i, nu in enumerate(nus):
            beta, b = quantize_doppler(nu, grid)
            be[f, i] = beta
            fb[f, i] = b if cfg.fractional else 0.0
    al = np.tile(np.arange(P), (n_frames, 1))
    return gains, al, be, np.zeros((n_frames, P)), fb, False


def _frame_profile(grid, gains, al, be, fa, fb):
    taps = list(zip(al.tolist(), be.tolist()))
    fracs = list(zip(fa.tolist(), fb.tolist())) if (fa.any() or fb.any()) else None
    return profile_from_taps(grid, gains, taps, fracs)


def _static_profile(cfg: ExperimentConfig, grid: OtfsGrid):
    """Fixed tap geometry with placeholder gains, for rank/bound analysis."""
    taps = _static_taps(cfg, grid)
    if taps is None:
        raise ConfigurationError(
            "rank and bound analysis need a fixed tap geometry "
            "(explicit or full-grid profile)"
        )
    gains = gen_gains(len(taps), _stream(cfg, _PURPOSE_CHANNEL, 0, 0, 0))
    return profile_from_taps(grid, gains, taps, cfg.fracs)


def _n0(snr_db: float) -> float:
    return float(10.0 ** (-snr_db / 10.0)) if isfinite(snr_db) else 0.0


# ------------------------------------------------------------ batch runners


def _cn(rng, shape, var):
    if var == 0.0:
        return 0.0
    s = np.sqrt(var / 2.0)
    return s * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _slice_bits(soft, alphabet, n_frames):
    idx = alphabet.slice(soft)
    return alphabet.indices_to_bits(idx).reshape(n_frames, -1)


def _batch_otfs(cfg, grid, alphabet, B, N0, rng_ch, rng_da, rng_no):
    gains, al, be, fa, fb, static = _draw_channel(cfg, grid, rng_ch, B)
    if static:
        Hs = build_H_integer_batch(grid, gains, al[0], be[0])
    else:
        Hs = build_H_fractional_batch(grid, gains, al, be, fa, fb)
    bits = rng_da.integers(0, 2, size=(B, cfg.bits_per_frame), dtype=np.uint8)
    x = alphabet.map_bits(bits).reshape(B, cfg.frame_size)
    phi = _phi(cfg)
    if phi is not None:
        Hs = Hs * phi.phi[None, None, :]  # fold the rotation into the channel
    y = np.einsum("bnl,bl->bn", Hs, x) + _cn(rng_no, (B, cfg.frame_size), N0)
    if cfg.detector == "ml":
        det = ml_detect_batch(y, Hs, alphabet)
    else:
        if N0 > 0:
            soft = mmse_equalize_batch(y, Hs, N0)
        else:
            soft = np.linalg.solve(Hs, y[..., None])[..., 0]
        det = _slice_bits(soft, alphabet, B)
    return int(np.count_nonzero(det != bits))


def _batch_ofdm(cfg, grid, alphabet, B, N0, rng_ch, rng_da, rng_no):
    gains, al, be, fa, fb, _ = _draw_channel(cfg, grid, rng_ch, B)
    ocfg = OfdmConfig(M=cfg.M, N=cfg.N, cp_len=_cp_len(cfg, grid), delta_f=cfg.delta_f)
    bits = rng_da.integers(0, 2, size=(B, cfg.bits_per_frame), dtype=np.uint8)
    noise = _cn(rng_no, (B, ocfg.frame_len), N0)
    whole = cfg.equalizer == "whole-frame"
    errors = 0
    for f in range(B):
        prof = _frame_profile(grid, gains[f], al[f], be[f], fa[f], fb[f])
        vals = alphabet.map_bits(bits[f]).reshape(cfg.N, cfg.M)
        rx = ofdm_apply_channel(ofdm_modulate(vals, ocfg), prof, ocfg)
        z = ofdm_demodulate(rx.samples + (noise[f] if N0 > 0 else 0.0), ocfg)
        mats = ofdm_effective_matrices(prof, ocfg, whole_frame=whole)
        det = ofdm_mmse_detect(z, mats, N0, alphabet)
        errors += int(np.count_nonzero(det.bits != bits[f]))
    return errors


def _batch_mimo(cfg, grid, alphabet, B, N0, rng_ch, rng_da, rng_no):
    mcfg = MimoConfig(n_t=cfg.n_t, n_r=cfg.n_r)
    taps = _static_taps(cfg, grid)
    P = len(taps)
    shape = (B, cfg.n_r, cfg.n_t, P)
    scale = np.sqrt(1.0 / (2.0 * P))
    gains = scale * (rng_ch.standard_normal(shape) + 1j * rng_ch.standard_normal(shape))
    Hs = build_H_mimo_batch(grid, gains, taps, mcfg, cfg.fracs)
    phi = _phi(cfg)
    if phi is not None:
        Hs = Hs * np.tile(phi.phi, cfg.n_t)[None, None, :]
    bits = rng_da.integers(0, 2, size=(B, cfg.bits_per_frame), dtype=np.uint8)
    x = alphabet.map_bits(bits).reshape(B, cfg.n_t * cfg.frame_size)
    y = np.einsum("bnl,bl->bn", Hs, x) + _cn(rng_no, (B, cfg.n_r * cfg.frame_size), N0)
    if cfg.detector == "ml":
        det = ml_detect_batch(y, Hs, alphabet)
    else:
        if N0 > 0:
            soft = mmse_equalize_batch(y, Hs, N0)
        else:
            soft = np.stack(
                [np.linalg.lstsq(h, v, rcond=None)[0] for h, v in zip(Hs, y)]
            )
        det = _slice_bits(soft, alphabet, B)
    return int(np.count_nonzero(det != bits))


def _batch_size(cfg: ExperimentConfig, batch_index: int) -> int:
    start = batch_index * BATCH_FRAMES
    return max(0, min(BATCH_FRAMES, cfg.max_frames - start))


def _run_batch(cfg: ExperimentConfig, snr_index: int, batch_index: int) -> tuple[int, int]:
    """Simulate one batch; returns (frames, bit_errors).  Replayable alone."""
    B = _batch_size(cfg, batch_index)
    if B == 0:
        return 0, 0
    grid = _grid(cfg)
    alphabet = make_alphabet(cfg.alphabet)
    N0 = _n0(cfg.snr_db[snr_index])
    tag = _system_tag(cfg)
    rng_ch = _stream(cfg, _PURPOSE_CHANNEL, 0, snr_index, batch_index)
    rng_da = _stream(cfg, _PURPOSE_DATA, tag, snr_index, batch_index)
    rng_no = _stream(cfg, _PURPOSE_NOISE, tag, snr_index, batch_index)
    if cfg.system == "ofdm":
        errors = _batch_ofdm(cfg, grid, alphabet, B, N0, rng_ch, rng_da, rng_no)
    elif cfg.system.startswith("mimo"):
        errors = _batch_mimo(cfg, grid, alphabet, B, N0, rng_ch, rng_da, rng_no)
    else:
        errors = _batch_otfs(cfg, grid, alphabet, B, N0, rng_ch, rng_da, rng_no)
    return B, errors


# ------------------------------------------------------------ sweep engine


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get("OTFS_WORKERS", "").strip()
        if not env:
            return 1  # auto: serial in-process (numpy already uses BLAS threads)
        try:
            workers = int(env)
        except ValueError as exc:
            raise ConfigurationError(f"OTFS_WORKERS must be an integer, got {env!r}") from exc
    if workers < 1:
        raise ConfigurationError(f"worker count must be >= 1, got {workers}")
    return workers


def run_ber_sweep(cfg: ExperimentConfig, workers: int | None = None) -> SweepResult:
    """BER vs SNR sweep with the config's stopping rule.

    Identical output for any worker count: batches are consumed in schedule
    order and any batch computed past the stopping point is discarded.
    """
    workers = _resolve_workers(workers)
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    points = []
    try:
        for si in range(len(cfg.snr_db)):
            t0 = time.perf_counter()
            frames = 0
            errors = 0
            next_batch = 0
            stopped = False
            while not stopped:
                window = [
                    b
                    for b in range(next_batch, next_batch + workers)
                    if _batch_size(cfg, b) > 0
                ]
                if not window:
                    break  # frame budget exhausted
                if pool is not None:
                    outs = list(
                        pool.map(_run_batch, [cfg] * len(window), [si] * len(window), window)
                    )
                else:
                    outs = [_run_batch(cfg, si, b) for b in window]
                for b, (f, e) in zip(window, outs):
                    frames += f
                    errors += e
                    next_batch = b + 1
                    if frames >= cfg.max_frames or (
                        errors >= cfg.min_bit_errors and frames >= MIN_FRAMES_PER_POINT
                    ):
                        stopped = True
                        break
            denom = frames * cfg.bits_per_frame
            points.append(
                SnrPoint(
                    snr_db=cfg.snr_db[si],
                    frames=frames,
                    bit_errors=errors,
                    ber=(errors / denom) if denom else 0.0,
                    seed=cfg.base_seed,
                    wall_time=time.perf_counter() - t0,
                )
            )
    finally:
        if pool is not None:
            pool.shutdown()
    return SweepResult(config=cfg, fingerprint=cfg.fingerprint(), points=tuple(points))


# ------------------------------------------------------------ analysis runners


def run_rank_analysis(cfg: ExperimentConfig) -> RankReport:
    """Pair-rank scan for the configured system, with automatic mode choice.

    auto picks: exhaustive when the ordered-pair space fits the cap, else the
    structured census (integer-tap BPSK without rotation), else sampling.
    """
    grid = _grid(cfg)
    alphabet = make_alphabet(cfg.alphabet)
    profile = _static_profile(cfg, grid)
    phi = _phi(cfg)
    mimo = cfg.system.startswith("mimo")
    mode = cfg.rank_mode
    if mode == "auto":
        n_vec = len(alphabet.points) ** cfg.frame_size
        if n_vec * (n_vec - 1) <= PAIR_ENUMERATION_CAP:
            mode = "exhaustive"
        elif phi is None and not mimo and cfg.alphabet == "bpsk" and profile.is_integer:
            mode = "structured"
        else:
            mode = "sampled"
    kwargs = dict(
        rel_tol=cfg.rank_rel_tol,
        mode=mode,
        n_samples=cfg.rank_samples,
        seed=cfg.base_seed,
    )
    if mimo:
        return mimo_min_rank(
            grid, profile, alphabet, MimoConfig(n_t=cfg.n_t, n_r=cfg.n_r), phi, **kwargs
        )
    if phi is not None:
        return min_rank_over_pairs(grid, profile, alphabet, phi, **kwargs)
    return enumerate_rank_one_pairs(grid, profile, alphabet, **kwargs)


def run_bounds(cfg: ExperimentConfig) -> list[BoundCurve]:
    """Lower, asymptotic-lower and (when enumerable) union-upper BER curves."""
    grid = _grid(cfg)
    alphabet = make_alphabet(cfg.alphabet)
    profile = _static_profile(cfg, grid)
    kappa = run_rank_analysis(cfg).kappa
    snr = np.array(cfg.snr_db, dtype=float)
    gammas = 10.0 ** (snr / 10.0)
    lower = np.array([ber_lower_bound(g, cfg.M, cfg.N, kappa) for g in gammas])
    asym = np.array(
        [ber_lower_bound_asymptotic(g, cfg.M, cfg.N, kappa) for g in gammas]
    )
    curves = [
        BoundCurve(snr, lower, "lower"),
        BoundCurve(snr, asym, "asymptotic-lower"),
    ]
    n_vec = len(alphabet.points) ** cfg.frame_size
    enumerable = (
        not cfg.system.startswith("mimo")
        and not cfg.rotated
        and n_vec * (n_vec - 1) <= PAIR_ENUMERATION_CAP
    )
    if enumerable:
        union = np.array([union_upper_bound(grid, profile, alphabet, g) for g in gammas])
        curves.append(BoundCurve(snr, union, "union-upper"))
    return curves


def snr_at_ber(result: SweepResult, target: float) -> float | None:
    """SNR (dB) where the measured curve first crosses ``target``, by
    log-linear interpolation; None when the curve never reaches it."""
    if not 0 < target < 1:
        raise ConfigurationError(f"target BER must be in (0, 1), got {target}")
    snr = result.snr_array()
    ber = result.ber_array()
    if ber[0] <= target:
        return float(snr[0])
    for i in range(len(snr) - 1):
        hi, lo = ber[i], ber[i + 1]
        if hi >= target >= lo:
            if lo <= 0.0:
                return float(snr[i + 1])
            span = np.log10(lo) - np.log10(hi)
            if abs(span) < 1e-15:
                return float(snr[i + 1])
            frac = (np.log10(target) - np.log10(hi)) / span
            return float(snr[i] + frac * (snr[i + 1] - snr[i]))
    return None


def snr_gain_at_ber(first: SweepResult, second: SweepResult, target: float) -> float | None:
    """How many dB less SNR ``first`` needs than ``second`` at ``target``."""
    a = snr_at_ber(first, target)
    b = snr_at_ber(second, target)
    if a is None or b is None:
        return None
    return b - a


def run_compare(
    cfg_first: ExperimentConfig,
    cfg_second: ExperimentConfig,
    targets: tuple[float, ...] = (1e-2,),
    workers: int | None = None,
) -> CompareResult:
    """Paired-seed comparison: same channel realizations per trial index."""
    if cfg_first.base_seed != cfg_second.base_seed:
        raise ConfigurationError("paired runs must share base_seed")
    if cfg_first.snr_db != cfg_second.snr_db:
        raise ConfigurationError("paired runs must share the snr_db grid")
    first = run_ber_sweep(cfg_first, workers)
    second = run_ber_sweep(cfg_second, workers)
    gains = {t: snr_gain_at_ber(first, second, t) for t in targets}
    return CompareResult(first=first, second=second, gains_db=gains)


# ------------------------------------------------------------ chain check


def chain_equivalence_report(trials: int = 100, seed: int = 0, max_mn: int = 8) -> dict:
    """Max deviations of the dual model routes over random instances.

    Routes compared: the sample-level modem chain vs the dense effective
    matrix, and the gain-vector/symbol-matrix product vs the matrix product
    (integer and fractional taps).
    """
    rng = np.random.default_rng(seed)
    worst = {"chain_vs_matrix": 0.0, "symbol_matrix_integer": 0.0, "symbol_matrix_fractional": 0.0}
    for _ in range(trials):
        M = int(rng.integers(1, max_mn + 1))
        N = int(rng.integers(1, max_mn + 1))
        grid = OtfsGrid(M=M, N=N)
        P = int(rng.integers(1, M * N + 1))
        bins = rng.choice(M * N, size=P, replace=False)
        taps = [(int(t // N), int(t % N)) for t in bins]
        prof = profile_from_taps(grid, gen_gains(P, rng), taps)
        x = rng.standard_normal(M * N) + 1j * rng.standard_normal(M * N)
        H = build_H_integer(prof).H
        dd = devectorize(x, grid)
        y_chain = vectorize(sfft(wigner(apply_td_channel(heisenberg(isfft(dd)), prof))))
        worst["chain_vs_matrix"] = max(worst["chain_vs_matrix"], float(np.abs(y_chain - H @ x).max()))
        hp = np.array([effective_gain(p, grid) for p in prof.paths])
        lhs = hp @ build_symbol_matrix(x, prof).X
        worst["symbol_matrix_integer"] = max(
            worst["symbol_matrix_integer"], float(np.abs(lhs - H @ x).max())
        )
        fracs = [tuple(rng.uniform(-0.499, 0.5, size=2)) for _ in range(P)]
        prof_f = profile_from_taps(grid, prof.gains(), taps, fracs)
        hp_f = np.array([effective_gain(p, grid) for p in prof_f.paths])
        lhs_f = hp_f @ build_symbol_matrix_frac(x, prof_f).X
        rhs_f = build_H_fractional(prof_f).H @ x
        worst["symbol_matrix_fractional"] = max(
            worst["symbol_matrix_fractional"], float(np.abs(lhs_f - rhs_f).max())
        )
    worst["trials"] = trials
    return worst


# ------------------------------------------------------------ serialization

CSV_HEADER = "snr_db,frames,bit_errors,ber,seed"


def sweep_to_csv(result: SweepResult) -> str:
    lines = [CSV_HEADER]
    for p in result.points:
        lines.append(f"{p.snr_db:g},{p.frames},{p.bit_errors},{p.ber:.8e},{p.seed}")
    return "\n".join(lines) + "\n"


def bounds_to_csv(curves: list[BoundCurve]) -> str:
    lines = ["kind,snr_db,value"]
    for c in curves:
        for s, v in zip(c.snr_db, c.values):
            lines.append(f"{c.kind},{s:g},{v:.8e}")
    return "\n".join(lines) + "\n"


def format_sweep_report(result: SweepResult) -> str:
    cfg = result.config
    lines = [
        "kind = ber-sweep",
        f"fingerprint = {result.fingerprint}",
        f"system = {cfg.system}",
        f"grid = {cfg.M}x{cfg.N}",
        f"alphabet = {cfg.alphabet}",
        f"detector = {cfg.detector}",
        f"profile = {cfg.profile_kind}",
        f"paths = {cfg.path_count}",
        f"fractional = {str(cfg.fractional).lower()}",
        f"base_seed = {cfg.base_seed}",
        f"stopping = {cfg.min_bit_errors} errors or {cfg.max_frames} frames",
        f"bits_per_frame = {cfg.bits_per_frame}",
    ]
    for i, p in enumerate(result.points):
        lines.append(
            f"point.{i} = snr_db {p.snr_db:g} | frames {p.frames} | "
            f"bit_errors {p.bit_errors} | ber {p.ber:.6e} | wall_s {p.wall_time:.2f}"
        )
    return "\n".join(lines) + "\n"


def format_rank_report(report: RankReport, cfg: ExperimentConfig) -> str:
    lines = [
        "kind = rank-report",
        f"fingerprint = {cfg.fingerprint()}",
        f"system = {cfg.system}",
        f"grid = {cfg.M}x{cfg.N}",
        f"alphabet = {cfg.alphabet}",
        f"mode = {report.mode}",
        f"pairs_checked = {report.pairs_checked}",
        f"rel_tol = {report.rel_tol:g}",
        f"kappa = {report.kappa}",
        f"min_rank = {report.min_rank}",
    ]
    for i, j, r in report.witnesses:
        lines.append(f"witness = pair ({i}, {j}) rank {r}")
    return "\n".join(lines) + "\n"


def format_compare_report(result: CompareResult) -> str:
    lines = [
        "kind = compare",
        f"first = {result.first.config.system} [{result.first.fingerprint}]",
        f"second = {result.second.config.system} [{result.second.fingerprint}]",
    ]
    for t, g in result.gains_db.items():
        shown = "no-crossing" if g is None else f"{g:+.2f} dB"
        lines.append(f"gain_at_ber_{t:g} = {shown}")
    return "\n".join(lines) + "\n"


__all__ = [
    "BATCH_FRAMES",
    "MIN_FRAMES_PER_POINT",
    "SnrPoint",
    "SweepResult",
    "CompareResult",
    "run_ber_sweep",
    "run_rank_analysis",
    "run_bounds",
    "run_compare",
    "snr_at_ber",
    "snr_gain_at_ber",
    "chain_equivalence_report",
    "sweep_to_csv",
    "bounds_to_csv",
    "format_sweep_report",
    "format_rank_report",
    "format_compare_report",
    "CSV_HEADER",
]
