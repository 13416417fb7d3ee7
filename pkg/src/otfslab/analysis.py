"""Diversity analysis of the delay-Doppler symbol matrix.

A transmitted vector x and a P-path integer-tap profile define the P x MN
symbol matrix X whose i-th row is the delay-Doppler shift of x seen by path
i, so that h' X equals (H x)^T.  Error-event geometry then lives in the
difference matrices D_ij = X_i - X_j of hypothesis pairs:

* the minimum rank of D_ij over all ordered pairs is the asymptotic diversity
  order of ML detection;
* kappa counts ordered pairs with rank-one difference, which dominate the
  high-SNR error probability and give a closed-form BER lower bound;
* for the full-grid profile (P = MN) the difference matrices are block
  circulant with circulant blocks, so their eigenvalues have a closed DFT
  form, and a unit-modulus phase rotation of the transmit vector provably
  removes every zero eigenvalue — restoring full diversity.

Everything here is deterministic linear algebra; Monte Carlo lives in the
harness module.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .channel import ChannelProfile, _frac_coeff_FG, gather_index
from .errors import (
    ComplexityError,
    ConfigurationError,
    NumericalError,
    UnsupportedOperationError,
)
from .grid import Alphabet, OtfsGrid
from .modem import PhaseRotation

__all__ = [
    "SymbolMatrix",
    "RankReport",
    "BoundCurve",
    "build_symbol_matrix",
    "build_symbol_matrix_frac",
    "matrix_rank",
    "enumerate_rank_one_pairs",
    "min_rank_over_pairs",
    "rank_one_singular_value",
    "pep_chernoff_upper",
    "pep_exact_rank_one",
    "ber_lower_bound",
    "ber_lower_bound_asymptotic",
    "union_upper_bound",
    "block_circulant_eigs",
    "estimate_diversity_slope",
]

DEFAULT_RANK_REL_TOL = 1e-8
PAIR_ENUMERATION_CAP = 2**20


@dataclass(frozen=True)
class SymbolMatrix:
    """P x MN matrix X with h' X = (H x)^T, plus its provenance."""

    X: np.ndarray
    x: np.ndarray
    profile: ChannelProfile


@dataclass(frozen=True)
class RankReport:
    """Outcome of a difference-matrix scan over hypothesis pairs.

    ``witnesses`` lists up to ``MAX_WITNESSES`` (i, j, rank) label triples:
    every recorded rank-one pair in a kappa census, or the argmin pair of a
    min-rank scan.  ``mode`` is "exhaustive", "sampled" or "structured";
    sampled results certify only the pairs actually drawn.
    """

    min_rank: int | None
    kappa: int
    witnesses: tuple[tuple[int, int, int], ...]
    rel_tol: float
    mode: str
    pairs_checked: int

    MAX_WITNESSES = 64


@dataclass(frozen=True)
class BoundCurve:
    """An analytic BER bound evaluated on an SNR grid."""

    snr_db: np.ndarray
    values: np.ndarray
    kind: str  # "lower" | "asymptotic-lower" | "union-upper"

    def __post_init__(self) -> None:
        snr = np.asarray(self.snr_db, dtype=np.float64)
        val = np.asarray(self.values, dtype=np.float64)
        if snr.shape != val.shape or snr.ndim != 1:
            raise ConfigurationError("bound curve needs matching 1-D snr/value arrays")
        if self.kind not in ("lower", "asymptotic-lower", "union-upper"):
            raise ConfigurationError(f"unknown bound kind {self.kind!r}")
        if np.any(val < 0) or np.any(val > 1.0 + 1e-12):
            raise ConfigurationError("bound values must lie in [0, 1]")
        if np.any(np.diff(snr) <= 0):
            raise ConfigurationError("snr grid must be strictly increasing")
        if np.any(np.diff(val) > 1e-12):
            raise ConfigurationError("bound must be non-increasing in SNR")
        object.__setattr__(self, "snr_db", snr)
        object.__setattr__(self, "values", val)


# ------------------------------------------------------------ symbol matrices


def build_symbol_matrix(x: np.ndarray, profile: ChannelProfile) -> SymbolMatrix:
    """Row i = the cyclic delay-Doppler shift of x along path i (integer taps).

    Row i, column k+N*l holds x[((k - beta_i) mod N) + N((l - alpha_i) mod M)],
    so each row is a permutation of x and h' X = (H x)^T holds exactly.
    """
    if not profile.is_integer:
        raise UnsupportedOperationError(
            "profile has fractional parts; use build_symbol_matrix_frac"
        )
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (profile.grid.frame_size,):
        raise ConfigurationError(
            f"vector length {x.shape} does not match frame size {profile.grid.frame_size}"
        )
    return SymbolMatrix(X=x[gather_index(profile)], x=x, profile=profile)


def build_symbol_matrix_frac(x: np.ndarray, profile: ChannelProfile) -> SymbolMatrix:
    """Leakage-weighted symbol matrix for fractional delay/Doppler paths.

    Row i is the kernel-smeared combination of the shifts of x so that
    h' X = (H x)^T continues to hold with the fractional effective matrix.
    With all fractional parts zero this reduces to build_symbol_matrix.
    """
    x = np.asarray(x, dtype=np.complex128)
    grid = profile.grid
    M, N = grid.M, grid.N
    if x.shape != (grid.frame_size,):
        raise ConfigurationError(
            f"vector length {x.shape} does not match frame size {grid.frame_size}"
        )
    # Per-path relation: X[i] = kron(Fmat_i, Gmat_i) x, evaluated without the
    # Kronecker product as G_i Xm F_i^T on the (N, M) reshape of x.
    Fc, Gc = _frac_coeff_FG(profile)
    dl = (np.arange(M)[None, :] - np.arange(M)[:, None]) % M
    dk = (np.arange(N)[None, :] - np.arange(N)[:, None]) % N
    Xm = x.reshape(N, M, order="F")
    rows = np.empty((profile.P, grid.frame_size), dtype=np.complex128)
    for i, p in enumerate(profile.paths):
        Fmat = Fc[i][(dl + p.alpha) % M]
        Gmat = Gc[i][(dk + p.beta) % N]
        rows[i] = (Gmat @ Xm @ Fmat.T).ravel(order="F")
    return SymbolMatrix(X=rows, x=x, profile=profile)


def matrix_rank(D: np.ndarray, rel_tol: float = DEFAULT_RANK_REL_TOL) -> int:
    """Singular values above rel_tol x the largest one."""
    if not (0 < rel_tol < 1):
        raise ConfigurationError(f"rel_tol must be in (0, 1), got {rel_tol}")
    s = np.linalg.svd(np.asarray(D, dtype=np.complex128), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


# ------------------------------------------------------------ pair scans


def _alphabet_vectors(alphabet: Alphabet, L: int) -> np.ndarray:
    """All |A|^L hypothesis vectors ordered by label (MSB-first digits)."""
    Q = len(alphabet)
    powers = Q ** np.arange(L - 1, -1, -1, dtype=np.int64)
    digits = (np.arange(Q**L, dtype=np.int64)[:, None] // powers) % Q
    return alphabet.points[digits]


def _batched_ranks(diffs: np.ndarray, gidx: np.ndarray, phi, rel_tol: float) -> np.ndarray:
    """Ranks of the gathered difference matrices for a block of differences.

    diffs: (B, MN) difference vectors; returns (B,) integer ranks of the
    (B, P, MN) matrices formed by the per-path shifts (after optional
    rotation of the difference vector).
    """
    if phi is not None:
        diffs = diffs * phi.phi
    mats = diffs[:, gidx]  # (B, P, MN)
    s = np.linalg.svd(mats, compute_uv=False)
    lead = s[:, :1]
    return np.count_nonzero(s > rel_tol * np.where(lead > 0, lead, 1.0), axis=1)


def _pair_scan(
    grid: OtfsGrid,
    profile: ChannelProfile,
    alphabet: Alphabet,
    phi: PhaseRotation | None,
    rel_tol: float,
    mode: str,
    max_pairs: int,
    n_samples: int,
    seed,
) -> RankReport:
    if profile.grid != grid:
        raise ConfigurationError("profile is bound to a different grid")
    if not profile.is_integer:
        raise UnsupportedOperationError("pair scans support integer-tap profiles only")
    if phi is not None and len(phi) != grid.frame_size:
        raise ConfigurationError("rotation size does not match the frame")
    L = grid.frame_size
    n_vec = len(alphabet) ** L
    gidx = gather_index(profile)

    if mode == "structured":
        return _structured_census(grid, profile, alphabet, phi, rel_tol)

    if mode == "exhaustive":
        total_pairs = n_vec * (n_vec - 1)
        if total_pairs > max_pairs:
            raise ComplexityError(
                f"exhaustive scan needs {total_pairs} ordered pairs (> cap {max_pairs}); "
                "use mode='sampled' or, for BPSK integer taps, mode='structured'"
            )
        vecs = _alphabet_vectors(alphabet, L)
        min_rank = L + 1
        min_witness = None
        kappa = 0
        witnesses: list[tuple[int, int, int]] = []
        idx = np.arange(n_vec)
        for i in range(n_vec):
            diffs = vecs[i] - vecs
            j_idx = idx[idx != i]
            ranks = _batched_ranks(diffs[j_idx], gidx, phi, rel_tol)
            kappa += int(np.count_nonzero(ranks == 1))
            for j in j_idx[ranks == 1][: max(0, RankReport.MAX_WITNESSES - len(witnesses))]:
                witnesses.append((i, int(j), 1))
            lo = int(ranks.min())
            if lo < min_rank:
                min_rank = lo
                min_witness = (i, int(j_idx[int(np.argmin(ranks))]), lo)
        if min_witness is not None and min_witness not in witnesses:
            witnesses.append(min_witness)
        return RankReport(
            min_rank=min_rank,
            kappa=kappa,
            witnesses=tuple(witnesses[: RankReport.MAX_WITNESSES]),
            rel_tol=rel_tol,
            mode=mode,
            pairs_checked=total_pairs,
        )

    if mode == "sampled":
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        if n_samples < 1:
            raise ConfigurationError("sampled mode needs n_samples >= 1")
        Q = len(alphabet)
        powers = Q ** np.arange(L - 1, -1, -1, dtype=np.int64)
        min_rank = L + 1
        min_witness = None
        kappa = 0
        witnesses = []
        remaining = n_samples
        while remaining > 0:
            B = min(remaining, 8192)
            i_lab = rng.integers(0, n_vec, size=B)
            j_lab = rng.integers(0, n_vec, size=B)
            clash = i_lab == j_lab
            while np.any(clash):
                j_lab[clash] = rng.integers(0, n_vec, size=int(clash.sum()))
                clash = i_lab == j_lab
            xi = alphabet.points[(i_lab[:, None] // powers) % Q]
            xj = alphabet.points[(j_lab[:, None] // powers) % Q]
            ranks = _batched_ranks(xi - xj, gidx, phi, rel_tol)
            kappa += int(np.count_nonzero(ranks == 1))
            for b in np.flatnonzero(ranks == 1)[: max(0, RankReport.MAX_WITNESSES - len(witnesses))]:
                witnesses.append((int(i_lab[b]), int(j_lab[b]), 1))
            lo = int(ranks.min())
            if lo < min_rank:
                b = int(np.argmin(ranks))
                min_rank = lo
                min_witness = (int(i_lab[b]), int(j_lab[b]), lo)
            remaining -= B
        if min_witness is not None and min_witness not in witnesses:
            witnesses.append(min_witness)
        return RankReport(
            min_rank=min_rank,
            kappa=kappa,
            witnesses=tuple(witnesses[: RankReport.MAX_WITNESSES]),
            rel_tol=rel_tol,
            mode=mode,
            pairs_checked=n_samples,
        )

    raise ConfigurationError(f"unknown scan mode {mode!r}")


def _structured_census(
    grid: OtfsGrid,
    profile: ChannelProfile,
    alphabet: Alphabet,
    phi: PhaseRotation | None,
    rel_tol: float,
) -> RankReport:
    """Exact rank-one census without touching all |A|^MN (|A|^MN - 1) pairs.

    BPSK only, no rotation.  A difference matrix has rank one exactly when
    every per-path shift of the difference vector is a +/-1 multiple of the
    first (entries live in {0, +/-2}, so no other constants are possible).
    Write e for the first row as a (delay, Doppler) array; the condition says
    shifting e by each relative tap offset g_i multiplies it by a sign c_i.
    Consistent sign assignments extend to a character on the group the offsets
    generate; an inconsistent assignment forces e = 0.  Valid e are therefore
    free over {0, +/-2} per group orbit, modulated by the character — a small
    set enumerated directly.  Each surviving difference vector accounts for
    2^(number of zeros) ordered hypothesis pairs.  Every candidate is
    re-verified by SVD, and the construction was cross-checked against the
    exhaustive scan at the sizes where that is feasible (see tests).
    """
    if len(alphabet) != 2 or not np.array_equal(alphabet.points, [1.0 + 0j, -1.0 + 0j]):
        raise UnsupportedOperationError("structured census supports BPSK only")
    if phi is not None:
        raise UnsupportedOperationError(
            "structured census applies to unrotated differences only"
        )
    M, N = grid.M, grid.N
    alphas = profile.alphas()
    betas = profile.betas()
    a1, b1 = int(alphas[0]), int(betas[0])
    gens = [(int(a - a1) % M, int(b - b1) % N) for a, b in zip(alphas[1:], betas[1:])]

    patterns: set[tuple[float, ...]] = set()
    for signs in product((1.0, -1.0), repeat=len(gens)):
        char = _character_closure(gens, signs, M, N)
        if char is None:
            continue  # inconsistent signs force the zero vector
        group = sorted(char)
        seen: set[tuple[int, int]] = set()
        orbits = []
        for l in range(M):
            for k in range(N):
                if (l, k) in seen:
                    continue
                orbit = [((l + g[0]) % M, (k + g[1]) % N) for g in group]
                seen.update(orbit)
                orbits.append((l, k))
        for assign in product((0.0, 2.0, -2.0), repeat=len(orbits)):
            if all(v == 0.0 for v in assign):
                continue
            e = np.zeros((M, N))
            for rep, v in zip(orbits, assign):
                for g in group:
                    e[(rep[0] + g[0]) % M, (rep[1] + g[1]) % N] = v * char[g]
            # difference vector d is e shifted back by the first tap
            d = np.empty((M, N))
            for l in range(M):
                for k in range(N):
                    d[l, k] = e[(l + a1) % M, (k + b1) % N]
            patterns.add(tuple(d.ravel()))

    gidx = gather_index(profile)
    kappa = 0
    witnesses = []
    for pat in sorted(patterns):
        d_mat = np.array(pat).reshape(M, N)
        d = np.empty(M * N)
        for l in range(M):
            for k in range(N):
                d[k + N * l] = d_mat[l, k]
        r = int(_batched_ranks(d[None, :].astype(complex), gidx, None, rel_tol)[0])
        if r != 1:
            raise NumericalError(
                f"structured census produced a candidate of rank {r}; "
                "the character construction and the SVD disagree"
            )
        kappa += 2 ** int(np.count_nonzero(d == 0))
        if len(witnesses) < RankReport.MAX_WITNESSES:
            xi = np.where(d >= 0, 1.0, -1.0)
            xj = xi - d
            witnesses.append((_bpsk_label(xi), _bpsk_label(xj), 1))
    return RankReport(
        min_rank=1 if kappa > 0 else None,
        kappa=kappa,
        witnesses=tuple(witnesses),
        rel_tol=rel_tol,
        mode="structured",
        pairs_checked=len(patterns),
    )


def _character_closure(gens, signs, M: int, N: int):
    """Extend generator signs to the generated subgroup of Z_M x Z_N.

    Returns {group element: +/-1} or None when the signs are inconsistent
    (some element reachable with both signs).
    """
    value = {(0, 0): 1.0}
    frontier = [(0, 0)]
    while frontier:
        g = frontier.pop()
        for (ga, gb), c in zip(gens, signs):
            g2 = ((g[0] + ga) % M, (g[1] + gb) % N)
            v2 = value[g] * c
            if g2 in value:
                if value[g2] != v2:
                    return None
            else:
                value[g2] = v2
                frontier.append(g2)
    return value


def _bpsk_label(x: np.ndarray) -> int:
    """Label integer of a +/-1 vector (bit 0 <-> +1, MSB first)."""
    bits = (x < 0).astype(np.int64)
    return int((bits << np.arange(len(x) - 1, -1, -1)).sum())


def enumerate_rank_one_pairs(
    grid: OtfsGrid,
    profile: ChannelProfile,
    alphabet: Alphabet,
    *,
    rel_tol: float = DEFAULT_RANK_REL_TOL,
    mode: str = "exhaustive",
    max_pairs: int = PAIR_ENUMERATION_CAP,
    n_samples: int = 100_000,
    seed=0,
) -> RankReport:
    """Count ordered hypothesis pairs whose difference matrix has rank one.

    The default exhaustive mode also reports the global minimum rank (the
    asymptotic diversity order of unrotated ML detection).  Above the pair
    cap, "sampled" draws random pairs and "structured" (BPSK, integer taps)
    computes the exact census through the sign-character construction.
    """
    return _pair_scan(
        grid, profile, alphabet, None, rel_tol, mode, max_pairs, n_samples, seed
    )


def min_rank_over_pairs(
    grid: OtfsGrid,
    profile: ChannelProfile,
    alphabet: Alphabet,
    phi: PhaseRotation | None = None,
    *,
    rel_tol: float = DEFAULT_RANK_REL_TOL,
    mode: str = "exhaustive",
    max_pairs: int = PAIR_ENUMERATION_CAP,
    n_samples: int = 100_000,
    seed=0,
) -> RankReport:
    """Minimum difference-matrix rank over hypothesis pairs, optionally rotated.

    With ``phi`` given, differences are elementwise rotated before the
    per-path shifts — the construction whose minimum rank the rotation is
    designed to raise to P.
    """
    if mode == "structured":
        raise UnsupportedOperationError(
            "structured mode counts rank-one pairs; it cannot certify minimum rank"
        )
    return _pair_scan(
        grid, profile, alphabet, phi, rel_tol, mode, max_pairs, n_samples, seed
    )


# ------------------------------------------------------------ bounds


def rank_one_singular_value(M: int, N: int, P: int, alphabet: Alphabet | None = None) -> float:
    """The lone nonzero singular value of a BPSK all-flip difference matrix.

    Every entry of the difference is +/-2 and all P rows are sign multiples
    of one another, giving sqrt(4 P M N).
    """
    if alphabet is not None and not (
        len(alphabet) == 2 and np.array_equal(alphabet.points, [1.0 + 0j, -1.0 + 0j])
    ):
        raise UnsupportedOperationError("closed form applies to BPSK differences only")
    if M < 1 or N < 1 or P < 1:
        raise ConfigurationError("need M, N, P >= 1")
    return float(np.sqrt(4.0 * P * M * N))


def pep_chernoff_upper(D: np.ndarray, gamma, P: int, rel_tol: float = DEFAULT_RANK_REL_TOL):
    """Chernoff-style pairwise error bound prod_l 1/(1 + gamma lam_l^2 / (4P)).

    The product runs over singular values above the rank tolerance.  ``gamma``
    is linear SNR (scalar or array, >= 0).
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    if np.any(gamma < 0):
        raise ConfigurationError("SNR must be >= 0")
    s = np.linalg.svd(np.asarray(D, dtype=np.complex128), compute_uv=False)
    if s.size and s[0] > 0:
        s = s[s > rel_tol * s[0]]
    else:
        s = s[:0]
    out = np.prod(1.0 / (1.0 + gamma[..., None] * s**2 / (4.0 * P)), axis=-1)
    return float(out) if out.ndim == 0 else out


def pep_exact_rank_one(gamma, M: int, N: int):
    """Exact average pairwise error probability of a rank-one BPSK difference.

    (1/2) (1 - sqrt(MN / (MN + 1/gamma))), the closed form of the Rayleigh
    average for the singular value sqrt(4 P M N) with gain variance 1/P.
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    if np.any(gamma <= 0):
        raise ConfigurationError("SNR must be > 0")
    out = 0.5 * (1.0 - np.sqrt(M * N / (M * N + 1.0 / gamma)))
    return float(out) if out.ndim == 0 else out


def ber_lower_bound(gamma, M: int, N: int, kappa: int):
    """(kappa / 2^MN) x the exact rank-one PEP.

    Counts only the rank-one error events, each weighted by the probability
    of its transmit hypothesis; everything else is dropped, hence a lower
    bound.  (Used directly as a BER bound: the rank-one pairs at these
    profiles flip every bit in the frame.)
    """
    if kappa < 0:
        raise ConfigurationError("kappa must be >= 0")
    if kappa == 0:
        gamma = np.asarray(gamma, dtype=np.float64)
        out = np.zeros_like(gamma)
        return float(out) if out.ndim == 0 else out
    return (kappa / 2.0 ** (M * N)) * pep_exact_rank_one(gamma, M, N)


def ber_lower_bound_asymptotic(gamma, M: int, N: int, kappa: int):
    """High-SNR limit (kappa / 2^MN) / (4 gamma M N) of the lower bound."""
    gamma = np.asarray(gamma, dtype=np.float64)
    if np.any(gamma <= 0):
        raise ConfigurationError("SNR must be > 0")
    out = (kappa / 2.0 ** (M * N)) / (4.0 * gamma * M * N)
    return float(out) if out.ndim == 0 else out


def union_upper_bound(
    grid: OtfsGrid,
    profile: ChannelProfile,
    alphabet: Alphabet,
    gamma,
    *,
    rel_tol: float = DEFAULT_RANK_REL_TOL,
    max_pairs: int = PAIR_ENUMERATION_CAP,
):
    """Union bound over every ordered hypothesis pair, clamped to 1.

    |A|^-MN sum_{i != j} PEP_chernoff(D_ij): the average over equiprobable
    transmit hypotheses of the summed pairwise bounds, a frame-error upper
    bound used as the high-SNR BER proxy.
    """
    if not profile.is_integer:
        raise UnsupportedOperationError("union bound supports integer-tap profiles only")
    L = grid.frame_size
    n_vec = len(alphabet) ** L
    total_pairs = n_vec * (n_vec - 1)
    if total_pairs > max_pairs:
        raise ComplexityError(
            f"union bound needs {total_pairs} ordered pairs (> cap {max_pairs})"
        )
    gamma = np.asarray(gamma, dtype=np.float64)
    if np.any(gamma < 0):
        raise ConfigurationError("SNR must be >= 0")
    gidx = gather_index(profile)
    vecs = _alphabet_vectors(alphabet, L)
    acc = np.zeros(gamma.shape, dtype=np.float64)
    for i in range(n_vec):
        diffs = np.delete(vecs[i] - vecs, i, axis=0)
        s = np.linalg.svd(diffs[:, gidx], compute_uv=False)  # (n_vec-1, P)
        lead = s[:, :1]
        s = np.where(s > rel_tol * np.where(lead > 0, lead, 1.0), s, 0.0)
        terms = np.prod(
            1.0 / (1.0 + gamma[..., None, None] * s**2 / (4.0 * profile.P)), axis=-1
        )
        acc = acc + terms.sum(axis=-1)
    out = np.minimum(acc / n_vec, 1.0)
    return float(out) if out.ndim == 0 else out


# ------------------------------------------------------------ eigenstructure


def block_circulant_eigs(D: np.ndarray, M: int, N: int) -> np.ndarray:
    """Closed-form eigenvalues of a block-circulant matrix with circulant blocks.

    D is MN x MN, an M x M grid of N x N blocks where block (r, c) depends
    only on (c - r) mod M and each block is circulant.  Eigenvalue k = u + Nv
    is sum_l lam_u^(l) e^{j 2 pi v l / M} with lam_u^(l) the u-th DFT
    coefficient of block l's first row — two nested DFTs of the first block
    row of the matrix.  Raises a configuration error when D lacks the
    structure.
    """
    D = np.asarray(D, dtype=np.complex128)
    if D.shape != (M * N, M * N):
        raise ConfigurationError(f"expected {(M * N, M * N)} matrix, got {D.shape}")
    firstrows = np.stack([D[0, c * N : (c + 1) * N] for c in range(M)])  # (M, N)
    # structure check: rebuild every entry from the first block row
    rr = np.arange(M)
    blocks = firstrows[(rr[None, :] - rr[:, None]) % M]  # (M, M, N) first rows
    q = np.arange(N)
    circ = blocks[:, :, (q[None, :] - q[:, None]) % N]  # (M, M, N, N)
    rebuilt = circ.transpose(0, 2, 1, 3).reshape(M * N, M * N)
    if not np.allclose(rebuilt, D, rtol=0.0, atol=1e-12 * max(1.0, np.abs(D).max())):
        raise ConfigurationError(
            "matrix is not block-circulant with circulant blocks under the "
            "delay-block / Doppler-within layout"
        )
    lam = np.fft.fft(firstrows, axis=1)  # lam[l, u]
    mu = M * np.fft.ifft(lam, axis=0)  # mu[v, u] = sum_l lam[l, u] e^{j2pi vl/M}
    return mu.T.ravel(order="F")  # index k = u + N v


# ------------------------------------------------------------ slope fitting


def estimate_diversity_slope(curve) -> float:
    """Least-squares diversity order from (SNR dB, BER) points.

    Fits log10(BER) against SNR and reports decades per 10 dB, so a
    diversity-d curve reads d.  Zero-BER points are dropped; at least two
    positive points are required.
    """
    pts = [(float(s), float(b)) for s, b in curve if b > 0]
    if len(pts) < 2:
        raise ConfigurationError(
            f"slope fit needs >= 2 positive-BER points, got {len(pts)}"
        )
    snr = np.array([p[0] for p in pts])
    logb = np.log10([p[1] for p in pts])
    slope = np.polyfit(snr, logb, 1)[0]
    return float(-10.0 * slope)
