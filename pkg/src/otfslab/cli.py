"""Command-line front end.

Subcommands: ``sim`` (BER sweep -> CSV), ``rank`` (pair-rank report),
``bounds`` (bound curves -> CSV), ``compare`` (paired two-system run),
``chain-check`` (dual-route model consistency probe).

Exit codes: 0 success, 2 configuration error, 3 enumeration/complexity
guard, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import ExperimentConfig, config_from_toml
from .errors import ComplexityError, ConfigurationError, NumericalError, OtfslabError
from .harness import (
    bounds_to_csv,
    chain_equivalence_report,
    format_compare_report,
    format_rank_report,
    format_sweep_report,
    run_ber_sweep,
    run_bounds,
    run_compare,
    run_rank_analysis,
    sweep_to_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPLEXITY = 3
EXIT_NUMERICAL = 4


def _exit_code_for(exc: OtfslabError) -> int:
    if isinstance(exc, ComplexityError):
        return EXIT_COMPLEXITY
    if isinstance(exc, NumericalError):
        return EXIT_NUMERICAL
    return EXIT_CONFIG


def _parse_snr(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigurationError(f"bad --snr list {text!r}: {exc}") from exc


def _load(args) -> ExperimentConfig:
    cfg = config_from_toml(args.config)
    changes = {}
    if args.seed is not None:
        changes["base_seed"] = args.seed
    if getattr(args, "snr", None):
        changes["snr_db"] = _parse_snr(args.snr)
    return dataclasses.replace(cfg, **changes) if changes else cfg


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    elif not args.quiet:
        sys.stdout.write(text)


def _add_common(p, snr=True):
    p.add_argument("--config", required=True, help="experiment file (TOML)")
    p.add_argument("--seed", type=int, default=None, help="override base seed")
    if snr:
        p.add_argument("--snr", default=None, help="override SNR list, comma dB")
    p.add_argument("--out", default=None, help="write the result file here")
    p.add_argument("--quiet", action="store_true", help="suppress stdout")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otfslab",
        description="delay-Doppler link simulation and diversity analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    _add_common(sub.add_parser("sim", help="run a BER sweep, emit CSV"))
    _add_common(sub.add_parser("rank", help="pair-rank / census report"), snr=False)
    _add_common(sub.add_parser("bounds", help="BER bound curves, emit CSV"))

    comp = sub.add_parser("compare", help="paired two-system sweep")
    comp.add_argument(
        "--config",
        action="append",
        required=True,
        help="experiment file; pass twice (first, second)",
    )
    comp.add_argument("--seed", type=int, default=None)
    comp.add_argument("--snr", default=None)
    comp.add_argument(
        "--targets", default="1e-2", help="comma list of BERs for gain readout"
    )
    comp.add_argument("--out", default=None)
    comp.add_argument("--quiet", action="store_true")

    chain = sub.add_parser("chain-check", help="dual-route model consistency")
    chain.add_argument("--seed", type=int, default=0)
    chain.add_argument("--trials", type=int, default=100)
    chain.add_argument(
        "--tol", type=float, default=1e-6, help="max tolerated deviation"
    )
    chain.add_argument("--quiet", action="store_true")
    return parser


def _cmd_sim(args) -> int:
    cfg = _load(args)
    result = run_ber_sweep(cfg)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(sweep_to_csv(result))
    if not args.quiet:
        sys.stdout.write(format_sweep_report(result))
        if not args.out:
            sys.stdout.write(sweep_to_csv(result))
    return EXIT_OK


def _cmd_rank(args) -> int:
    cfg = _load(args)
    _emit(args, format_rank_report(run_rank_analysis(cfg), cfg))
    return EXIT_OK


def _cmd_bounds(args) -> int:
    cfg = _load(args)
    _emit(args, bounds_to_csv(run_bounds(cfg)))
    return EXIT_OK


def _cmd_compare(args) -> int:
    if len(args.config) != 2:
        raise ConfigurationError(
            f"compare needs exactly two --config files, got {len(args.config)}"
        )
    cfgs = []
    for path in args.config:
        cfg = config_from_toml(path)
        changes = {}
        if args.seed is not None:
            changes["base_seed"] = args.seed
        if args.snr:
            changes["snr_db"] = _parse_snr(args.snr)
        cfgs.append(dataclasses.replace(cfg, **changes) if changes else cfg)
    targets = tuple(float(t) for t in args.targets.split(","))
    result = run_compare(cfgs[0], cfgs[1], targets=targets)
    text = (
        format_compare_report(result)
        + "[first]\n"
        + sweep_to_csv(result.first)
        + "[second]\n"
        + sweep_to_csv(result.second)
    )
    _emit(args, text)
    return EXIT_OK


def _cmd_chain_check(args) -> int:
    report = chain_equivalence_report(trials=args.trials, seed=args.seed)
    if not args.quiet:
        sys.stdout.write("kind = chain-check\n")
        for key in ("trials", "chain_vs_matrix", "symbol_matrix_integer",
                    "symbol_matrix_fractional"):
            val = report[key]
            shown = f"{val:.3e}" if isinstance(val, float) else str(val)
            sys.stdout.write(f"{key} = {shown}\n")
    worst = max(
        report["chain_vs_matrix"],
        report["symbol_matrix_integer"],
        report["symbol_matrix_fractional"],
    )
    if worst > args.tol:
        raise NumericalError(
            f"model routes disagree: worst deviation {worst:.3e} > {args.tol:g}"
        )
    return EXIT_OK


_COMMANDS = {
    "sim": _cmd_sim,
    "rank": _cmd_rank,
    "bounds": _cmd_bounds,
    "compare": _cmd_compare,
    "chain-check": _cmd_chain_check,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except OtfslabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
