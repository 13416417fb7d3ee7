"""End-to-end acceptance checks for the delay-Doppler toolkit.

Twelve checks, one per release gate, each emitting a single PASS/FAIL
checklist line (collected into the terminal summary by conftest).  The
Monte Carlo checks pin their seeds and stopping rules so reruns are
bit-identical; slope fits use the deepest SNR windows that desk-scale
runs reach with roughly 200-error statistics.  Thresholds are fixed --
when a measurement misses one, the check fails loudly rather than
moving the goalpost (see README, "Acceptance suite").
"""

import time
from dataclasses import replace
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment

from otfslab.analysis import (
    ber_lower_bound,
    block_circulant_eigs,
    build_symbol_matrix,
    enumerate_rank_one_pairs,
    estimate_diversity_slope,
    matrix_rank,
    min_rank_over_pairs,
    rank_one_singular_value,
    union_upper_bound,
)
from otfslab.channel import (
    corner_taps,
    frac_kernel_F,
    frac_kernel_G,
    profile_from_taps,
)
from otfslab.config import ExperimentConfig, config_from_toml
from otfslab.grid import OtfsGrid, bpsk
from otfslab.harness import (
    chain_equivalence_report,
    run_ber_sweep,
    run_compare,
    snr_at_ber,
)
from otfslab.mimo import MimoConfig, mimo_min_rank
from otfslab.modem import default_phi

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"

CORNER_22 = ((0, 0), (0, 1), (1, 0), (1, 1))

# Checklist lines picked up by conftest.pytest_terminal_summary.
CHECKLIST = []


def _verdict(num, label, ok, detail=""):
    line = f"[{num:02d}] {label:<44} {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    CHECKLIST.append(line)
    print(line)
    return ok


def _bpsk_vec(label, L):
    bits = (label >> np.arange(L - 1, -1, -1)) & 1
    return (1.0 - 2.0 * bits).astype(complex)


def _unit_profile(M, N, P=4):
    grid = OtfsGrid(M=M, N=N)
    taps = corner_taps(grid, P)
    return grid, profile_from_taps(grid, np.ones(P, dtype=complex), taps)


def _slope(result, lo_snr):
    pts = [(p.snr_db, p.ber) for p in result.points if p.snr_db >= lo_snr]
    return estimate_diversity_slope(pts)


# --------------------------------------------------------------- 1: census


# The eight ordered BPSK pairs on the 2x2 grid / four-tap corner profile
# whose difference matrix has rank one.  Keyed by the label of the first
# hypothesis (MSB-first, bit 0 <-> +1); every pair is a complement pair,
# so the partner matrix is the negation and the difference is twice the
# first matrix.  Frozen by hand from the 4x4 symbol-matrix patterns.
RANK_ONE_TABLE = {
    (15, 0): [[-1, -1, -1, -1]] * 4,
    (3, 12): [[1, 1, -1, -1], [1, 1, -1, -1], [-1, -1, 1, 1], [-1, -1, 1, 1]],
    (9, 6): [[-1, 1, 1, -1], [1, -1, -1, 1], [1, -1, -1, 1], [-1, 1, 1, -1]],
    (5, 10): [[1, -1, 1, -1], [-1, 1, -1, 1], [1, -1, 1, -1], [-1, 1, -1, 1]],
    (6, 9): [[1, -1, -1, 1], [-1, 1, 1, -1], [-1, 1, 1, -1], [1, -1, -1, 1]],
    (10, 5): [[-1, 1, -1, 1], [1, -1, 1, -1], [-1, 1, -1, 1], [1, -1, 1, -1]],
    (12, 3): [[-1, -1, 1, 1], [-1, -1, 1, 1], [1, 1, -1, -1], [1, 1, -1, -1]],
    (0, 15): [[1, 1, 1, 1]] * 4,
}


def test_rank_one_pair_census_matches_frozen_table():
    grid, prof = _unit_profile(2, 2)
    t0 = time.perf_counter()
    rep = enumerate_rank_one_pairs(grid, prof, bpsk())
    elapsed = time.perf_counter() - t0

    found = {(i, j) for i, j, r in rep.witnesses if r == 1}
    ok = rep.kappa == 8 and found == set(RANK_ONE_TABLE)
    worst = 0.0
    for (i, j), rows in RANK_ONE_TABLE.items():
        T = np.asarray(rows, dtype=complex)
        Xi = build_symbol_matrix(_bpsk_vec(i, 4), prof).X
        Xj = build_symbol_matrix(_bpsk_vec(j, 4), prof).X
        worst = max(
            worst,
            float(np.abs(Xi - T).max()),
            float(np.abs(Xj + T).max()),
            float(np.abs((Xi - Xj) - 2.0 * T).max()),
        )
    ok = ok and worst < 1e-12 and elapsed < 1.0
    assert _verdict(
        1,
        "rank-one pair census (2x2, corner taps)",
        ok,
        f"kappa={rep.kappa}, entrywise dev {worst:.1e}, {elapsed * 1e3:.0f} ms",
    )


# ------------------------------------------------- 2: census across grids


def test_rank_one_share_across_grid_sizes():
    reports = {}
    for M, N, mode in ((2, 2, "exhaustive"), (4, 2, "exhaustive"), (4, 4, "structured")):
        grid, prof = _unit_profile(M, N)
        reports[(M, N)] = enumerate_rank_one_pairs(grid, prof, bpsk(), mode=mode)

    ok = all(rep.kappa == 8 for rep in reports.values())
    ok = ok and reports[(2, 2)].pairs_checked == 16 * 15
    ok = ok and reports[(4, 2)].pairs_checked == 256 * 255

    # The 4x4 codebook has ~4.3e9 ordered pairs; the structured count is
    # exact, and a 20000-pair random certification should never hit one of
    # the 8 rank-one pairs.
    grid, prof = _unit_profile(4, 4)
    samp = enumerate_rank_one_pairs(
        grid, prof, bpsk(), mode="sampled", n_samples=20000, seed=11
    )
    ok = ok and samp.mode == "sampled" and samp.pairs_checked == 20000
    ok = ok and samp.kappa == 0 and samp.min_rank >= 2
    assert _verdict(
        2,
        "rank-one share across grid sizes",
        ok,
        "kappa/2^MN = 8/16, 8/256, 8/65536; sampled cert clean",
    )


# ------------------------------------------- 3: rank-one singular value


def test_rank_one_singular_value_closed_form_matches_svd():
    worst = 0.0
    for P, M, N in ((4, 2, 2), (4, 4, 2), (4, 4, 4)):
        grid, prof = _unit_profile(M, N, P)
        ones = np.ones(M * N, dtype=complex)
        delta = (
            build_symbol_matrix(ones, prof).X
            - build_symbol_matrix(-ones, prof).X
        )
        assert matrix_rank(delta) == 1
        sigma = np.linalg.svd(delta, compute_uv=False)[0]
        target = np.sqrt(4.0 * P * M * N)
        assert abs(rank_one_singular_value(M, N, P) - target) < 1e-12
        worst = max(worst, abs(sigma - target))
    ok = worst < 1e-9
    assert _verdict(
        3,
        "rank-one singular value closed form",
        ok,
        f"max |svd - sqrt(4PMN)| = {worst:.1e}",
    )


# --------------------------------------------- 4: model route agreement


def test_model_route_agreement():
    t0 = time.perf_counter()
    rep = chain_equivalence_report(trials=100, seed=0, max_mn=8)
    elapsed = time.perf_counter() - t0
    ok = (
        rep["trials"] == 100
        and rep["symbol_matrix_integer"] < 1e-10
        and rep["symbol_matrix_fractional"] < 1e-9
        and rep["chain_vs_matrix"] < 1e-9
        and elapsed < 30.0
    )
    assert _verdict(
        4,
        "modem chain / matrix route agreement",
        ok,
        f"chain {rep['chain_vs_matrix']:.1e}, int {rep['symbol_matrix_integer']:.1e}, "
        f"frac {rep['symbol_matrix_fractional']:.1e}, {elapsed:.1f} s",
    )


# ------------------------------------------------- 5: BER between bounds


def test_siso_ber_sandwiched_by_bounds():
    # The sweep stops at 26 dB: beyond the 1e-4 crossing the measured curve
    # sits directly on the exact lower bound, where finite-error Monte Carlo
    # noise dips below it on roughly half of all seeds.  300-error stopping
    # keeps the deep points at ~6% relative noise.
    cfg = ExperimentConfig(
        system="otfs",
        M=2,
        N=2,
        snr_db=tuple(float(s) for s in range(0, 28, 2)),
        alphabet="bpsk",
        detector="ml",
        taps=CORNER_22,
        base_seed=33,
        min_bit_errors=300,
        max_frames=4_000_000,
    )
    res = run_ber_sweep(cfg)
    snr = res.snr_array()
    ber = res.ber_array()

    grid, prof = _unit_profile(2, 2)
    gamma = 10.0 ** (snr / 10.0)
    lower = ber_lower_bound(gamma, 2, 2, kappa=8)
    upper = union_upper_bound(grid, prof, bpsk(), gamma)

    mask = (lower < 0.5) & (upper < 0.5)
    sandwiched = bool(
        np.all(lower[mask] <= ber[mask]) and np.all(ber[mask] <= upper[mask])
    )

    below = np.nonzero(ber < 1e-4)[0]
    idx = int(below[0])
    ratio = float(ber[idx] / lower[idx])
    near_bound = 0.5 <= ratio <= 2.0

    slope = _slope(res, lo_snr=snr[-1] - 10.0)
    ok = sandwiched and near_bound and 0.8 <= slope <= 1.2
    assert _verdict(
        5,
        "BER between bounds (2x2 BPSK ML)",
        ok,
        f"sandwich={sandwiched}, x{ratio:.2f} of lower at {snr[idx]:.0f} dB, "
        f"tail slope {slope:.2f}",
    )


# ---------------------------------- 6: bound ordering, pre-floor slope


def test_lower_bound_ordering_and_steep_prefloor_slope():
    gamma = 10.0 ** (np.arange(10.0, 30.5, 1.0) / 10.0)
    lb = {
        (M, N): ber_lower_bound(gamma, M, N, kappa=8)
        for M, N in ((2, 2), (4, 2), (4, 4))
    }
    ordered = bool(
        np.all(lb[(4, 4)] < lb[(4, 2)]) and np.all(lb[(4, 2)] < lb[(2, 2)])
    )

    # The 4x4 grid holds a steep slope through the pre-floor window before
    # flattening toward its diversity-one bound at higher SNR.
    grid = OtfsGrid(M=4, N=4)
    cfg = ExperimentConfig(
        system="otfs",
        M=4,
        N=4,
        snr_db=(6.0, 8.0, 10.0, 12.0),
        alphabet="bpsk",
        detector="ml",
        taps=tuple(corner_taps(grid, 4)),
        base_seed=1,
        min_bit_errors=150,
        max_frames=1_000_000,
    )
    res = run_ber_sweep(cfg)
    slope = _slope(res, lo_snr=6.0)
    ok = ordered and slope > 1.5
    assert _verdict(
        6,
        "lower-bound ordering + pre-floor slope",
        ok,
        f"ordered={ordered}, 4x4 slope {slope:.2f} over 6-12 dB",
    )


# ------------------------------------- 7: rotation restores diversity


def test_phase_rotation_restores_full_diversity():
    grid, prof = _unit_profile(2, 2)
    rep = min_rank_over_pairs(
        grid, prof, bpsk(), phi=default_phi(4), rel_tol=1e-8
    )
    rank_ok = rep.min_rank == 4 and rep.pairs_checked == 240

    cfg = ExperimentConfig(
        system="otfs-rotated",
        M=2,
        N=2,
        snr_db=(14.0, 16.0, 18.0, 20.0),
        alphabet="bpsk",
        detector="ml",
        taps=CORNER_22,
        base_seed=1,
        min_bit_errors=150,
        max_frames=10_000_000,
    )
    res = run_ber_sweep(cfg)
    # 14 dB is still bending over; the fit uses the three deepest points.
    slope = _slope(res, lo_snr=16.0)
    ok = rank_ok and 3.0 <= slope <= 4.5
    assert _verdict(
        7,
        "rotation restores full diversity (2x2)",
        ok,
        f"min rank {rep.min_rank}/240 pairs, slope {slope:.2f} over 16-20 dB",
    )


# --------------------------------------------- 8: 8-QAM rotation gain


def test_rotation_gain_for_8qam():
    common = dict(
        M=2,
        N=2,
        alphabet="qam8",
        detector="ml",
        taps=CORNER_22,
        base_seed=7,
        min_bit_errors=250,
        max_frames=600_000,
    )
    plain = run_ber_sweep(
        ExperimentConfig(system="otfs", snr_db=(24.0, 26.0, 28.0), **common)
    )
    rotated = run_ber_sweep(
        ExperimentConfig(
            system="otfs-rotated", snr_db=(18.0, 20.0, 22.0), **common
        )
    )
    at_plain = snr_at_ber(plain, 1e-3)
    at_rot = snr_at_ber(rotated, 1e-3)
    gain = at_plain - at_rot

    # The rotation gain widens as the target BER drops: roughly 12 dB at
    # 1e-4 and 17-19 dB at 1e-5 (the fig9-* presets reach those depths;
    # see README).  At the 1e-3 desk-scale target the measured gain sits
    # near 5.8 dB, short of the 8 dB this check demands, so it fails; the
    # threshold is kept as-is rather than tuned to the measurement.
    ok = gain >= 8.0
    _verdict(
        8,
        "8-QAM rotation gain at BER 1e-3",
        ok,
        f"measured {gain:.2f} dB (plain {at_plain:.2f}, rotated {at_rot:.2f}); "
        "need >= 8 dB",
    )
    assert ok, (
        f"8-QAM rotation gain at BER 1e-3 is {gain:.2f} dB, below the 8 dB "
        "gate; deeper targets reach ~12 dB (1e-4) and ~17-19 dB (1e-5) via "
        "the long-running fig9 presets"
    )


# ------------------------------------------- 9: MIMO receive diversity


def test_mimo_receive_diversity():
    grid, prof = _unit_profile(2, 2)
    r11 = mimo_min_rank(grid, prof, bpsk(), MimoConfig(n_t=1, n_r=1))
    r22 = mimo_min_rank(grid, prof, bpsk(), MimoConfig(n_t=2, n_r=2))
    r22p = mimo_min_rank(
        grid, prof, bpsk(), MimoConfig(n_t=2, n_r=2), phi=default_phi(4)
    )
    rank_ok = (r11.min_rank, r22.min_rank, r22p.min_rank) == (1, 2, 8)

    common = dict(
        M=2,
        N=2,
        alphabet="bpsk",
        detector="ml",
        taps=CORNER_22,
        base_seed=3,
        min_bit_errors=150,
    )
    res1 = run_ber_sweep(
        ExperimentConfig(
            system="mimo-otfs",
            n_t=1,
            n_r=1,
            snr_db=tuple(float(s) for s in range(18, 29, 2)),
            max_frames=4_000_000,
            **common,
        )
    )
    res2 = run_ber_sweep(
        ExperimentConfig(
            system="mimo-otfs",
            n_t=2,
            n_r=2,
            snr_db=(12.0, 14.0, 16.0, 18.0),
            max_frames=8_000_000,
            **common,
        )
    )
    s1 = _slope(res1, lo_snr=18.0)
    s2 = _slope(res2, lo_snr=12.0)
    ok = rank_ok and 0.8 <= s1 <= 1.2 and 1.7 <= s2 <= 2.3
    assert _verdict(
        9,
        "MIMO receive diversity slopes",
        ok,
        f"min ranks {r11.min_rank}/{r22.min_rank}/{r22p.min_rank}, "
        f"slopes 1x1 {s1:.2f}, 2x2 {s2:.2f}",
    )


# --------------------------------------------- 10: OTFS vs OFDM (MMSE)


def test_delay_doppler_multiplexing_beats_ofdm():
    cfg_otfs = config_from_toml(str(CONFIG_DIR / "fig5-otfs.toml"))
    cfg_ofdm = config_from_toml(str(CONFIG_DIR / "fig5-ofdm.toml"))
    trim = dict(
        snr_db=tuple(float(s) for s in range(6, 17, 2)),
        min_bit_errors=400,
        max_frames=20_000,
    )
    cmp = run_compare(
        replace(cfg_otfs, **trim), replace(cfg_ofdm, **trim), targets=(1e-2,)
    )
    gain = cmp.gains_db[1e-2]

    # The wideband vehicular variant of the same comparison ships as a
    # preset pair but takes hours, so only its shape is checked here.
    wide_o = config_from_toml(str(CONFIG_DIR / "fig6-otfs-80211p.toml"))
    wide_f = config_from_toml(str(CONFIG_DIR / "fig6-ofdm-80211p.toml"))
    wide_ok = (
        (wide_o.M, wide_o.N, wide_o.P) == (64, 12, 8)
        and wide_o.system == "otfs"
        and wide_f.system == "ofdm"
        and wide_f.base_seed == wide_o.base_seed
    )

    ok = gain is not None and gain >= 2.5 and wide_ok
    assert _verdict(
        10,
        "delay-Doppler vs OFDM MMSE gain",
        ok,
        f"paired gain {gain:.2f} dB at BER 1e-2 (need >= 2.5)",
    )


# ------------------------------------- 11: fractional leakage, slopes


def test_fractional_leakage_and_diversity_one():
    rng = np.random.default_rng(2024)

    # Zero fractional offset collapses both leakage kernels to scaled
    # Kronecker deltas.
    worst_delta = 0.0
    for _ in range(200):
        N = int(rng.integers(2, 13))
        M = int(rng.integers(2, 13))
        k, beta = int(rng.integers(0, N)), int(rng.integers(0, N))
        l, alpha = int(rng.integers(0, M)), int(rng.integers(0, M))
        for kp in range(N):
            want = N if kp == (k - beta) % N else 0.0
            worst_delta = max(
                worst_delta, abs(frac_kernel_G(k, kp, beta, 0.0, N) - want)
            )
        for lp in range(M):
            want = M if lp == (l - alpha) % M else 0.0
            worst_delta = max(
                worst_delta, abs(frac_kernel_F(l, lp, alpha, 0.0, M) - want)
            )
    deltas_ok = worst_delta < 1e-12

    # With a sub-bin offset the Doppler kernel magnitude still peaks at
    # the integer bin carrying the path.
    peak_ok = True
    for _ in range(1000):
        N = int(rng.integers(2, 13))
        k, beta = int(rng.integers(0, N)), int(rng.integers(0, N))
        b = float(rng.uniform(-0.49, 0.49))
        mags = [abs(frac_kernel_G(k, kp, beta, b, N)) for kp in range(N)]
        peak_ok = peak_ok and int(np.argmax(mags)) == (k - beta) % N

    fracs = ((0.2, 0.3), (0.4, 0.1), (0.3, 0.45), (0.15, 0.25))
    common = dict(
        system="otfs",
        alphabet="bpsk",
        detector="ml",
        taps=CORNER_22,
        fracs=fracs,
        fractional=True,
        base_seed=1313,
        min_bit_errors=200,
    )
    res22 = run_ber_sweep(
        ExperimentConfig(
            M=2,
            N=2,
            snr_db=(16.0, 18.0, 20.0, 22.0, 24.0),
            max_frames=1_000_000,
            **common,
        )
    )
    res42 = run_ber_sweep(
        ExperimentConfig(
            M=4,
            N=2,
            snr_db=(22.0, 24.0, 26.0, 28.0),
            max_frames=8_000_000,
            **common,
        )
    )
    ber22_top = res22.points[-1].ber
    ber42_common = res42.points[1].ber  # both curves carry a 24 dB point
    below = ber42_common < ber22_top

    s22 = _slope(res22, lo_snr=16.0)
    # The 4x2 curve is still bending at 22 dB (local slope ~1.7); its
    # asymptote is fitted over the three deepest points.
    s42 = _slope(res42, lo_snr=24.0)
    slopes_ok = 0.8 <= s22 <= 1.3 and 0.8 <= s42 <= 1.3

    ok = deltas_ok and peak_ok and below and slopes_ok
    assert _verdict(
        11,
        "fractional leakage + diversity one",
        ok,
        f"delta dev {worst_delta:.1e}, peaks {'ok' if peak_ok else 'BAD'}, "
        f"4x2 below 2x2 at 24 dB: {below}, slopes {s22:.2f}/{s42:.2f}",
    )


# --------------------------------------- 12: block-circulant spectrum


def _random_bccb(rng, M, N):
    first = rng.standard_normal((M, N)) + 1j * rng.standard_normal((M, N))
    A = np.zeros((M * N, M * N), dtype=complex)
    for r in range(M):
        for c in range(M):
            row = first[(c - r) % M]
            block = np.empty((N, N), dtype=complex)
            for q in range(N):
                for qq in range(N):
                    block[q, qq] = row[(qq - q) % N]
            A[r * N : (r + 1) * N, c * N : (c + 1) * N] = block
    return A


def test_block_circulant_eigendecomposition():
    rng = np.random.default_rng(12)
    worst_eig = 0.0
    for _ in range(100):
        M = int(rng.integers(1, 5))
        N = int(rng.integers(1, 5))
        A = _random_bccb(rng, M, N)
        mu = block_circulant_eigs(A, M, N)
        ev = np.linalg.eigvals(A)
        cost = np.abs(mu[:, None] - ev[None, :])
        rr, cc = linear_sum_assignment(cost)
        worst_eig = max(worst_eig, float(cost[rr, cc].max()))
    eigs_ok = worst_eig < 1e-9

    # Under the default rotation every 2x2 BPSK difference keeps its whole
    # spectrum away from zero.
    grid, prof = _unit_profile(2, 2)
    phi = default_phi(4)
    worst_ratio = np.inf
    for i in range(16):
        for j in range(16):
            if i == j:
                continue
            d = (_bpsk_vec(i, 4) - _bpsk_vec(j, 4)) * phi.phi
            mu = block_circulant_eigs(build_symbol_matrix(d, prof).X, 2, 2)
            worst_ratio = min(worst_ratio, np.abs(mu).min() / np.abs(mu).max())
    ratio_ok = worst_ratio > 1e-6

    ok = eigs_ok and ratio_ok
    assert _verdict(
        12,
        "block-circulant eigen formula",
        ok,
        f"eig dev {worst_eig:.1e}, min/max |mu| ratio {worst_ratio:.1e}",
    )
