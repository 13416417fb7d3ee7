"""Experiment configuration: keyed-text (TOML) parsing and fingerprinting.

A config file fully determines an experiment; together with the base seed it
fully determines the output bits.  The fingerprint hashes exactly the
semantic fields (everything that can change a result), so two configs with
the same fingerprint are guaranteed interchangeable.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, fields

from .errors import ConfigurationError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SYSTEMS = ("otfs", "otfs-rotated", "ofdm", "mimo-otfs", "mimo-otfs-rotated")
ALPHABETS = ("bpsk", "qam8")
DETECTORS = ("ml", "mmse")
PROFILE_KINDS = ("explicit", "full-grid", "exp-jakes")
EQUALIZERS = ("per-symbol", "whole-frame")
RANK_MODES = ("auto", "exhaustive", "sampled", "structured")


@dataclass(frozen=True)
class ExperimentConfig:
    system: str
    M: int
    N: int
    snr_db: tuple[float, ...]
    alphabet: str = "bpsk"
    detector: str = "ml"
    delta_f: float = 1.0
    base_seed: int = 0
    min_bit_errors: int = 200
    max_frames: int = 10_000_000
    fractional: bool = False
    name: str = ""  # label only; excluded from the fingerprint
    # profile
    profile_kind: str = "explicit"
    taps: tuple[tuple[int, int], ...] = ()
    fracs: tuple[tuple[float, float], ...] | None = None
    P: int = 0
    nu_max: float = 0.0
    pdp_decay: float = 1.0
    redraw_per_frame: bool = True
    # rotation
    phi_exponents: tuple[float, ...] | None = None  # None = default schedule
    # mimo
    n_t: int = 1
    n_r: int = 1
    # ofdm
    cp_len: int | None = None  # None = longest delay tap
    equalizer: str = "per-symbol"
    # analysis knobs
    rank_mode: str = "auto"
    rank_rel_tol: float = 1e-8
    rank_samples: int = 100_000

    def __post_init__(self) -> None:
        if self.system not in SYSTEMS:
            raise ConfigurationError(f"unknown system {self.system!r}; expected one of {SYSTEMS}")
        if self.alphabet not in ALPHABETS:
            raise ConfigurationError(f"unknown alphabet {self.alphabet!r}")
        if self.detector not in DETECTORS:
            raise ConfigurationError(f"unknown detector {self.detector!r}")
        if self.profile_kind not in PROFILE_KINDS:
            raise ConfigurationError(f"unknown profile kind {self.profile_kind!r}")
        if self.equalizer not in EQUALIZERS:
            raise ConfigurationError(f"unknown equalizer {self.equalizer!r}")
        if self.rank_mode not in RANK_MODES:
            raise ConfigurationError(f"unknown rank mode {self.rank_mode!r}")
        if self.M < 1 or self.N < 1:
            raise ConfigurationError(f"grid must be at least 1x1, got ({self.M}, {self.N})")
        if not self.snr_db:
            raise ConfigurationError("snr_db list must be nonempty")
        if any(b <= a for a, b in zip(self.snr_db, self.snr_db[1:])):
            raise ConfigurationError("snr_db must be strictly increasing")
        if self.min_bit_errors < 1:
            raise ConfigurationError(f"min_bit_errors must be >= 1, got {self.min_bit_errors}")
        if self.max_frames < 1:
            raise ConfigurationError(f"max_frames must be >= 1, got {self.max_frames}")
        if self.system == "ofdm" and self.detector != "mmse":
            raise ConfigurationError(
                "the multicarrier baseline supports only the mmse detector"
            )
        if self.system.startswith("mimo"):
            if self.n_t < 1 or self.n_r < 1:
                raise ConfigurationError("antenna counts must be >= 1")
            if self.profile_kind == "exp-jakes":
                raise ConfigurationError(
                    "mimo systems take explicit or full-grid profiles"
                )
        elif (self.n_t, self.n_r) != (1, 1):
            raise ConfigurationError("antenna counts apply only to mimo systems")
        if self.phi_exponents is not None and not self.system.endswith("rotated"):
            raise ConfigurationError("phi applies only to the *-rotated systems")
        # profile-kind coherence
        if self.profile_kind == "explicit":
            if not self.taps:
                raise ConfigurationError("explicit profile needs a taps list")
            if self.fracs is not None:
                if len(self.fracs) != len(self.taps):
                    raise ConfigurationError("fracs must pair up with taps")
                if not self.fractional and any(a or b for a, b in self.fracs):
                    raise ConfigurationError(
                        "nonzero fracs require fractional = true"
                    )
        elif self.profile_kind == "full-grid":
            if self.taps or self.fracs is not None:
                raise ConfigurationError("full-grid profile takes no taps/fracs")
            if self.fractional:
                raise ConfigurationError("full-grid profile is integer-tap only")
        else:  # exp-jakes
            if self.taps or self.fracs is not None:
                raise ConfigurationError("exp-jakes profile takes no explicit taps")
            if self.P < 1:
                raise ConfigurationError("exp-jakes profile needs P >= 1")
            if self.P > self.M:
                raise ConfigurationError(
                    f"exp-jakes places one tap per delay bin; P={self.P} > M={self.M}"
                )
            if self.nu_max < 0:
                raise ConfigurationError("nu_max must be >= 0")

    @property
    def path_count(self) -> int:
        if self.profile_kind == "explicit":
            return len(self.taps)
        if self.profile_kind == "full-grid":
            return self.M * self.N
        return self.P

    @property
    def frame_size(self) -> int:
        return self.M * self.N

    @property
    def bits_per_frame(self) -> int:
        bps = 1 if self.alphabet == "bpsk" else 3
        return self.M * self.N * bps * (self.n_t if self.system.startswith("mimo") else 1)

    @property
    def rotated(self) -> bool:
        return self.system.endswith("rotated")

    def semantic_dict(self) -> dict:
        d = {}
        for f in fields(self):
            if f.name == "name":
                continue
            d[f.name] = getattr(self, f.name)
        return d

    def fingerprint(self) -> str:
        blob = json.dumps(self.semantic_dict(), sort_keys=True, default=list)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


_SECTION_KEYS = {
    "experiment": {
        "name", "system", "alphabet", "detector", "snr_db", "base_seed",
        "min_bit_errors", "max_frames", "fractional",
    },
    "grid": {"M", "N", "delta_f"},
    "profile": {"kind", "taps", "fracs", "P", "nu_max", "pdp_decay", "redraw_per_frame"},
    "phi": {"exponents"},
    "mimo": {"n_t", "n_r"},
    "ofdm": {"cp_len", "equalizer"},
    "rank": {"mode", "rel_tol", "samples"},
}


def config_from_dict(doc: dict) -> ExperimentConfig:
    """Build a validated config from a parsed keyed-text document."""
    for section, table in doc.items():
        if section not in _SECTION_KEYS:
            raise ConfigurationError(f"unknown config section [{section}]")
        if not isinstance(table, dict):
            raise ConfigurationError(f"[{section}] must be a table")
        extra = set(table) - _SECTION_KEYS[section]
        if extra:
            raise ConfigurationError(
                f"unknown key(s) in [{section}]: {sorted(extra)}"
            )
    exp = doc.get("experiment", {})
    grid = doc.get("grid", {})
    prof = doc.get("profile", {})
    kw = {}
    for key in ("system", "alphabet", "detector", "base_seed", "min_bit_errors",
                "max_frames", "fractional", "name"):
        if key in exp:
            kw[key] = exp[key]
    if "system" not in kw:
        raise ConfigurationError("missing required key: experiment.system")
    if "snr_db" not in exp:
        raise ConfigurationError("missing required key: experiment.snr_db")
    kw["snr_db"] = tuple(float(s) for s in exp["snr_db"])
    for key in ("M", "N"):
        if key not in grid:
            raise ConfigurationError(f"missing required key: grid.{key}")
        kw[key] = int(grid[key])
    if "delta_f" in grid:
        kw["delta_f"] = float(grid["delta_f"])
    if prof:
        kw["profile_kind"] = prof.get("kind", "explicit")
        if "taps" in prof:
            kw["taps"] = tuple((int(a), int(b)) for a, b in prof["taps"])
        if "fracs" in prof:
            kw["fracs"] = tuple((float(a), float(b)) for a, b in prof["fracs"])
        for src, dst in (("P", "P"), ("nu_max", "nu_max"), ("pdp_decay", "pdp_decay"),
                         ("redraw_per_frame", "redraw_per_frame")):
            if src in prof:
                kw[dst] = prof[src]
    if "phi" in doc and "exponents" in doc["phi"]:
        kw["phi_exponents"] = tuple(float(v) for v in doc["phi"]["exponents"])
    for key in ("n_t", "n_r"):
        if key in doc.get("mimo", {}):
            kw[key] = int(doc["mimo"][key])
    ofdm = doc.get("ofdm", {})
    if "cp_len" in ofdm:
        kw["cp_len"] = int(ofdm["cp_len"])
    if "equalizer" in ofdm:
        kw["equalizer"] = ofdm["equalizer"]
    rank = doc.get("rank", {})
    if "mode" in rank:
        kw["rank_mode"] = rank["mode"]
    if "rel_tol" in rank:
        kw["rank_rel_tol"] = float(rank["rel_tol"])
    if "samples" in rank:
        kw["rank_samples"] = int(rank["samples"])
    try:
        return ExperimentConfig(**kw)
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from exc


def config_from_toml(path) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigurationError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"bad config syntax in {path}: {exc}") from exc
    return config_from_dict(doc)


__all__ = [
    "ExperimentConfig",
    "config_from_dict",
    "config_from_toml",
    "SYSTEMS",
    "ALPHABETS",
    "DETECTORS",
    "PROFILE_KINDS",
]
