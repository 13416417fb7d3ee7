"""Experiment config parsing, validation, and fingerprinting."""

import dataclasses

import pytest

from otfslab.config import ExperimentConfig, config_from_dict, config_from_toml
from otfslab.errors import ConfigurationError

MINIMAL = {
    "experiment": {"system": "otfs", "snr_db": [0.0, 5.0]},
    "grid": {"M": 2, "N": 2},
    "profile": {"kind": "explicit", "taps": [[0, 0], [0, 1], [1, 0], [1, 1]]},
}


def _doc(**overrides):
    doc = {k: dict(v) for k, v in MINIMAL.items()}
    for section, table in overrides.items():
        doc.setdefault(section, {}).update(table)
    return doc


def test_minimal_document():
    cfg = config_from_dict(MINIMAL)
    assert cfg.system == "otfs"
    assert cfg.M == 2 and cfg.N == 2
    assert cfg.snr_db == (0.0, 5.0)
    assert cfg.taps == ((0, 0), (0, 1), (1, 0), (1, 1))
    assert cfg.min_bit_errors == 200
    assert cfg.max_frames == 10_000_000
    assert cfg.detector == "ml"
    assert cfg.path_count == 4
    assert cfg.bits_per_frame == 4


def test_unknown_section_and_key_rejected():
    with pytest.raises(ConfigurationError, match=r"unknown config section"):
        config_from_dict({**MINIMAL, "extra": {}})
    with pytest.raises(ConfigurationError, match=r"unknown key"):
        config_from_dict(_doc(experiment={"typo_key": 1}))


def test_missing_required_keys():
    with pytest.raises(ConfigurationError, match="system"):
        config_from_dict({"experiment": {"snr_db": [0]}, "grid": {"M": 2, "N": 2}})
    with pytest.raises(ConfigurationError, match="snr_db"):
        config_from_dict({"experiment": {"system": "otfs"}, "grid": {"M": 2, "N": 2}})
    with pytest.raises(ConfigurationError, match="grid.N"):
        config_from_dict(
            {"experiment": {"system": "otfs", "snr_db": [0]}, "grid": {"M": 2}}
        )


def test_enum_fields_validated():
    for bad in (
        _doc(experiment={"system": "qpsk-otfs"}),
        _doc(experiment={"alphabet": "qam64"}),
        _doc(experiment={"detector": "sphere"}),
        _doc(profile={"kind": "uniform"}),
    ):
        with pytest.raises(ConfigurationError, match="unknown"):
            config_from_dict(bad)


def test_snr_must_increase():
    with pytest.raises(ConfigurationError, match="increasing"):
        config_from_dict(_doc(experiment={"snr_db": [5.0, 5.0]}))
    with pytest.raises(ConfigurationError, match="increasing"):
        config_from_dict(_doc(experiment={"snr_db": [10.0, 5.0]}))


def test_baseline_requires_mmse():
    with pytest.raises(ConfigurationError, match="mmse"):
        config_from_dict(_doc(experiment={"system": "ofdm", "detector": "ml"}))


def test_profile_kind_coherence():
    with pytest.raises(ConfigurationError, match="taps"):
        config_from_dict({**MINIMAL, "profile": {"kind": "explicit"}})
    with pytest.raises(ConfigurationError, match="no taps"):
        config_from_dict(_doc(profile={"kind": "full-grid"}))
    with pytest.raises(ConfigurationError, match="P >= 1"):
        config_from_dict({**MINIMAL, "profile": {"kind": "exp-jakes"}})
    with pytest.raises(ConfigurationError, match="one tap per delay bin"):
        config_from_dict({**MINIMAL, "profile": {"kind": "exp-jakes", "P": 5}})
    # nonzero fracs demand the fractional flag
    with pytest.raises(ConfigurationError, match="fractional"):
        config_from_dict(
            _doc(profile={"taps": [[0, 0]], "fracs": [[0.2, 0.0]]})
        )
    cfg = config_from_dict(
        _doc(
            experiment={"fractional": True},
            profile={"taps": [[0, 0]], "fracs": [[0.2, 0.0]]},
        )
    )
    assert cfg.fracs == ((0.2, 0.0),)


def test_antenna_and_phi_scoping():
    with pytest.raises(ConfigurationError, match="mimo"):
        config_from_dict(_doc(mimo={"n_t": 2, "n_r": 2}))
    cfg = config_from_dict(
        _doc(experiment={"system": "mimo-otfs"}, mimo={"n_t": 2, "n_r": 2})
    )
    assert (cfg.n_t, cfg.n_r) == (2, 2)
    assert cfg.bits_per_frame == 8
    with pytest.raises(ConfigurationError, match="rotated"):
        config_from_dict(_doc(phi={"exponents": [0.0, 1.0, 2.0, 3.0]}))
    cfg = config_from_dict(
        _doc(experiment={"system": "otfs-rotated"}, phi={"exponents": [0.0, 1.0, 2.0, 3.0]})
    )
    assert cfg.phi_exponents == (0.0, 1.0, 2.0, 3.0)


def test_fingerprint_tracks_semantics_only():
    a = config_from_dict(MINIMAL)
    b = config_from_dict(_doc(experiment={"name": "a label"}))
    assert a.fingerprint() == b.fingerprint()
    for changed in (
        _doc(experiment={"base_seed": 1}),
        _doc(experiment={"snr_db": [0.0, 5.0, 10.0]}),
        _doc(grid={"M": 4}),
        _doc(experiment={"detector": "mmse"}),
        _doc(experiment={"min_bit_errors": 100}),
    ):
        assert config_from_dict(changed).fingerprint() != a.fingerprint()


def test_fingerprint_stable_across_processes():
    # sha256 of the canonical field dump: no PYTHONHASHSEED dependence
    cfg = config_from_dict(MINIMAL)
    assert cfg.fingerprint() == dataclasses.replace(cfg).fingerprint()
    assert len(cfg.fingerprint()) == 16
    assert all(c in "0123456789abcdef" for c in cfg.fingerprint())


def test_toml_file_round_trip(tmp_path):
    path = tmp_path / "exp.toml"
    path.write_text(
        """
[experiment]
system = "otfs-rotated"
alphabet = "qam8"
snr_db = [0.0, 4.0, 8.0]
base_seed = 99
max_frames = 500

[grid]
M = 2
N = 2

[profile]
kind = "full-grid"
"""
    )
    cfg = config_from_toml(path)
    assert cfg.system == "otfs-rotated"
    assert cfg.alphabet == "qam8"
    assert cfg.base_seed == 99
    assert cfg.profile_kind == "full-grid"
    assert cfg.path_count == 4
    assert cfg.bits_per_frame == 12


def test_toml_errors(tmp_path):
    with pytest.raises(ConfigurationError, match="not found"):
        config_from_toml(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("[experiment\nsystem=")
    with pytest.raises(ConfigurationError, match="syntax"):
        config_from_toml(bad)
