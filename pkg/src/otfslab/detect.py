"""ML and MMSE detection over the vectorized model y = H x + v.

Both detectors work on plain matrices, so the SISO and MIMO paths share them
(the MIMO layer simply hands in its stacked block matrix).

The ML search enumerates every hypothesis vector.  The metric is evaluated
through the decomposition

    ||y - Hx||^2 = ||y||^2 + x^H (H^H H) x - 2 Re[(H^H y)^H x],

which needs only the L-dimensional statistics z = H^H y and G = H^H H per
frame instead of an MN-dimensional matched filter per hypothesis.  For BPSK
the quadratic form is further expanded over +/-1 sequences: the metric as a
function of the bit pattern has only constant, single-bit and bit-pair terms,
so all 2^L metrics come from one real matrix product against a fixed +/-1
pattern table.  That is what makes exhaustive ML over 2^16 hypotheses cheap
enough for Monte Carlo use.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ComplexityError, ConfigurationError
from .grid import Alphabet

__all__ = [
    "DetectionResult",
    "ml_detect",
    "ml_detect_batch",
    "mmse_detect",
    "mmse_equalize_batch",
    "count_bit_errors",
]

ML_HYPOTHESIS_CAP = 2**20


@dataclass(frozen=True)
class DetectionResult:
    """Hard decisions for one frame."""

    symbols: np.ndarray
    bits: np.ndarray
    metric: float | None = None
    pinv_fallback: bool = False


def _as_matrix(H) -> np.ndarray:
    """Accept an EffectiveChannel-like object or a bare matrix."""
    return np.asarray(getattr(H, "H", H), dtype=np.complex128)


def _hypothesis_count(alphabet: Alphabet, length: int, cap: int) -> int:
    count = len(alphabet) ** length
    if count > cap:
        raise ComplexityError(
            f"ML enumeration needs {count} hypotheses for {length} symbols over "
            f"{len(alphabet)} points; cap is {cap}"
        )
    return count


@lru_cache(maxsize=2)
def _bpsk_pattern_tables(L: int) -> tuple[np.ndarray, np.ndarray]:
    """(Xpm, W) for BPSK exhaustive search over L symbols.

    Xpm[h] is the +/-1 symbol vector of label h (bit 0 -> +1, MSB first).
    W[h] is the pattern-function row [1, x_0..x_{L-1}, {x_a x_b}_{a<b}] so
    that metrics = coef @ W.T for the per-frame coefficient layout
    [const, linear, pair] used below.
    """
    n = 1 << L
    bits = (np.arange(n)[:, None] >> np.arange(L - 1, -1, -1)) & 1
    Xpm = (1 - 2 * bits).astype(np.float64)
    cols = [np.ones((n, 1)), Xpm]
    for a in range(L):
        for b in range(a + 1, L):
            cols.append((Xpm[:, a] * Xpm[:, b])[:, None])
    return Xpm, np.concatenate(cols, axis=1)


def _is_bpsk(alphabet: Alphabet) -> bool:
    return len(alphabet) == 2 and np.array_equal(alphabet.points, [1.0 + 0j, -1.0 + 0j])


def _ml_labels_batch(
    Y: np.ndarray, Hs: np.ndarray, alphabet: Alphabet, cap: int
) -> tuple[np.ndarray, np.ndarray]:
    """Exhaustive ML over a batch: Y (B, n), Hs (B, n, L) or (n, L) shared.

    Returns (labels (B,), metrics (B,)) with labels the integer bit/digit
    patterns of the argmin hypotheses.  Ties resolve to the lowest label
    because chunks are scanned in ascending label order with strict-less
    updates.
    """
    Y = np.asarray(Y, dtype=np.complex128)
    B = Y.shape[0]
    Hs = np.asarray(Hs, dtype=np.complex128)
    if Hs.ndim == 2:
        Hs = np.broadcast_to(Hs, (B,) + Hs.shape)
    L = Hs.shape[2]
    total = _hypothesis_count(alphabet, L, cap)

    z = np.einsum("bnl,bn->bl", Hs.conj(), Y)  # H^H y
    G = np.einsum("bnl,bnm->blm", Hs.conj(), Hs)  # H^H H
    const = np.sum(np.abs(Y) ** 2, axis=1)

    if _is_bpsk(alphabet) and L <= 16:
        Xpm, W = _bpsk_pattern_tables(L)
        iu = np.triu_indices(L, k=1)
        coef = np.empty((B, W.shape[1]))
        coef[:, 0] = const + np.trace(G.real, axis1=1, axis2=2)
        coef[:, 1 : 1 + L] = -2.0 * z.real
        coef[:, 1 + L :] = 2.0 * G.real[:, iu[0], iu[1]]
        metrics = coef @ W.T  # (B, 2^L) in float64
        labels = np.argmin(metrics, axis=1)
        return labels, metrics[np.arange(B), labels]

    Q = len(alphabet)
    powers = Q ** np.arange(L - 1, -1, -1, dtype=np.int64)
    best_metric = np.full(B, np.inf)
    best_label = np.zeros(B, dtype=np.int64)
    # chunk so that neither the (C, L^2) outer products nor the (B, C)
    # metric block grow past a few tens of MB
    chunk = max(1, (1 << 21) // max(L * L, B))
    for start in range(0, total, chunk):
        stop = min(total, start + chunk)
        digits = (np.arange(start, stop, dtype=np.int64)[:, None] // powers) % Q
        X = alphabet.points[digits]  # (C, L)
        lin = -2.0 * np.real(z @ X.conj().T)  # (B, C), equals -2 Re[z^H x]
        # x^H G x = sum_lm conj(x_l) G_lm x_m as a flat (L^2) inner product
        outer = (X.conj()[:, :, None] * X[:, None, :]).reshape(stop - start, L * L)
        quad = np.real(G.reshape(B, L * L) @ outer.T)
        m = const[:, None] + lin + quad
        local = np.argmin(m, axis=1)
        vals = m[np.arange(B), local]
        take = vals < best_metric
        best_metric = np.where(take, vals, best_metric)
        best_label = np.where(take, start + local, best_label)
    return best_label, best_metric


def _labels_to_decision(labels: np.ndarray, alphabet: Alphabet, L: int):
    """Expand integer hypothesis labels (B,) into symbols (B, L), bits (B, L*b)."""
    Q = len(alphabet)
    powers = Q ** np.arange(L - 1, -1, -1, dtype=np.int64)
    digits = (np.asarray(labels)[:, None] // powers) % Q
    symbols = alphabet.points[digits]
    bits = alphabet.indices_to_bits(digits).reshape(len(labels), -1)
    return symbols, bits


def ml_detect(
    y: np.ndarray, H, alphabet: Alphabet, *, max_hypotheses: int = ML_HYPOTHESIS_CAP
) -> DetectionResult:
    """Joint maximum-likelihood detection of one frame.

    Minimizes ||y - Hx||^2 over every x in the alphabet power set; ties break
    toward the lowest lexicographic bit pattern.  Raises a complexity error
    (with the computed count) when the enumeration exceeds ``max_hypotheses``.
    """
    Hm = _as_matrix(H)
    y = np.asarray(y, dtype=np.complex128)
    if y.shape != (Hm.shape[0],):
        raise ConfigurationError(f"received vector {y.shape} does not fit H {Hm.shape}")
    labels, metrics = _ml_labels_batch(y[None, :], Hm[None, :, :], alphabet, max_hypotheses)
    L = Hm.shape[1]
    symbols, bits = _labels_to_decision(labels, alphabet, L)
    return DetectionResult(symbols=symbols[0], bits=bits[0], metric=float(metrics[0]))


def ml_detect_batch(
    Y: np.ndarray, Hs: np.ndarray, alphabet: Alphabet, *, max_hypotheses: int = ML_HYPOTHESIS_CAP
) -> np.ndarray:
    """Exhaustive ML over a batch of frames; returns decided bits (B, L*b).

    ``Hs`` may be (B, n, L) per-frame matrices or one shared (n, L) matrix.
    """
    labels, _ = _ml_labels_batch(Y, Hs, alphabet, max_hypotheses)
    L = Hs.shape[-1]
    _, bits = _labels_to_decision(labels, alphabet, L)
    return bits


def mmse_detect(y: np.ndarray, H, N0: float, alphabet: Alphabet) -> DetectionResult:
    """Linear MMSE estimate followed by nearest-point slicing.

    x_tilde = H^H (H H^H + N0 I)^{-1} y.  At N0 = 0 a numerically singular
    Gram matrix falls back to the pseudo-inverse solution and flags it.
    """
    Hm = _as_matrix(H)
    y = np.asarray(y, dtype=np.complex128)
    if N0 < 0:
        raise ConfigurationError(f"noise variance must be >= 0, got {N0}")
    gram = Hm @ Hm.conj().T + N0 * np.eye(Hm.shape[0])
    fallback = False
    if N0 == 0 and np.linalg.cond(gram) > 1e12:
        x_soft = np.linalg.pinv(Hm) @ y
        fallback = True
    else:
        x_soft = Hm.conj().T @ np.linalg.solve(gram, y)
    idx = alphabet.slice(x_soft)
    return DetectionResult(
        symbols=alphabet.points[idx],
        bits=alphabet.indices_to_bits(idx).ravel(),
        metric=None,
        pinv_fallback=fallback,
    )


def mmse_equalize_batch(Y: np.ndarray, Hs: np.ndarray, N0: float) -> np.ndarray:
    """Batched MMSE equalizer (no slicing): returns soft estimates (B, L)."""
    if N0 <= 0:
        raise ConfigurationError("batched equalizer needs N0 > 0")
    Hs = np.asarray(Hs, dtype=np.complex128)
    Y = np.asarray(Y, dtype=np.complex128)
    gram = Hs @ np.conj(np.swapaxes(Hs, 1, 2)) + N0 * np.eye(Hs.shape[1])
    w = np.linalg.solve(gram, Y[..., None])[..., 0]
    return np.einsum("bnl,bn->bl", Hs.conj(), w)


def count_bit_errors(truth: np.ndarray, detected: np.ndarray) -> int:
    """Hamming distance between two equal-length bit arrays."""
    truth = np.asarray(truth)
    detected = np.asarray(detected)
    if truth.shape != detected.shape:
        raise ConfigurationError(
            f"bit arrays differ in shape: {truth.shape} vs {detected.shape}"
        )
    return int(np.count_nonzero(truth != detected))
