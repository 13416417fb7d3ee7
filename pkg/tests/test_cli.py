"""Command-line interface: exit codes, overrides, output files."""

import numpy as np
import pytest

from otfslab.cli import (
    EXIT_COMPLEXITY,
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    EXIT_OK,
    _exit_code_for,
    main,
)
from otfslab.errors import (
    ComplexityError,
    ConfigurationError,
    NumericalError,
    UnsupportedOperationError,
)

SIM_TOML = """\
[experiment]
system = "otfs"
snr_db = [6.0, 10.0]
detector = "ml"
base_seed = 11
min_bit_errors = 25
max_frames = 500

[grid]
M = 2
N = 2

[profile]
kind = "explicit"
taps = [[0, 0], [0, 1], [1, 0], [1, 1]]
"""


@pytest.fixture()
def sim_config(tmp_path):
    path = tmp_path / "sim.toml"
    path.write_text(SIM_TOML)
    return path


def test_exit_code_mapping():
    assert _exit_code_for(ConfigurationError("x")) == EXIT_CONFIG
    assert _exit_code_for(UnsupportedOperationError("x")) == EXIT_CONFIG
    assert _exit_code_for(ComplexityError("x")) == EXIT_COMPLEXITY
    assert _exit_code_for(NumericalError("x")) == EXIT_NUMERICAL


def test_sim_writes_csv(sim_config, tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    rc = main(["sim", "--config", str(sim_config), "--out", str(out), "--quiet"])
    assert rc == EXIT_OK
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "snr_db,frames,bit_errors,ber,seed"
    assert len(lines) == 3  # header + one row per SNR point
    first = lines[1].split(",")
    assert first[0] == "6"
    assert int(first[1]) >= 100
    assert capsys.readouterr().out == ""


def test_sim_report_on_stdout(sim_config, capsys):
    rc = main(["sim", "--config", str(sim_config)])
    assert rc == EXIT_OK
    text = capsys.readouterr().out
    assert "kind = ber-sweep" in text
    assert "snr_db,frames,bit_errors,ber,seed" in text


def test_sim_snr_override(sim_config, tmp_path):
    out = tmp_path / "one.csv"
    rc = main([
        "sim", "--config", str(sim_config),
        "--snr", "8", "--out", str(out), "--quiet",
    ])
    assert rc == EXIT_OK
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 2
    assert lines[1].startswith("8,")


def test_sim_seed_override_changes_output(sim_config, tmp_path):
    outs = []
    for seed in (11, 12):
        out = tmp_path / f"s{seed}.csv"
        main(["sim", "--config", str(sim_config), "--seed", str(seed),
              "--out", str(out), "--quiet"])
        outs.append(out.read_text())
    assert outs[0] != outs[1]


def test_sim_same_invocation_is_reproducible(sim_config, tmp_path):
    texts = []
    for tag in "ab":
        out = tmp_path / f"{tag}.csv"
        main(["sim", "--config", str(sim_config), "--out", str(out), "--quiet"])
        texts.append(out.read_text())
    assert texts[0] == texts[1]


def test_missing_config_file_is_config_error(tmp_path, capsys):
    rc = main(["sim", "--config", str(tmp_path / "nope.toml")])
    assert rc == EXIT_CONFIG
    assert "error:" in capsys.readouterr().err


def test_bad_toml_is_config_error(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text("[experiment\nsystem=")
    assert main(["sim", "--config", str(path)]) == EXIT_CONFIG


def test_bad_snr_list_is_config_error(sim_config, capsys):
    rc = main(["sim", "--config", str(sim_config), "--snr", "3,up,7"])
    assert rc == EXIT_CONFIG
    assert "--snr" in capsys.readouterr().err


def test_rank_report(sim_config, capsys):
    rc = main(["rank", "--config", str(sim_config)])
    assert rc == EXIT_OK
    text = capsys.readouterr().out
    assert "kappa = 8" in text
    assert "mode = exhaustive" in text


def test_rank_cap_is_complexity_exit(tmp_path, capsys):
    path = tmp_path / "cap.toml"
    path.write_text(
        SIM_TOML.replace('system = "otfs"', 'system = "otfs"\nalphabet = "qam8"')
        + '\n[rank]\nmode = "exhaustive"\n'
    )
    rc = main(["rank", "--config", str(path)])
    assert rc == EXIT_COMPLEXITY
    assert "error:" in capsys.readouterr().err


def test_bounds_csv(sim_config, tmp_path):
    out = tmp_path / "bounds.csv"
    rc = main(["bounds", "--config", str(sim_config), "--out", str(out)])
    assert rc == EXIT_OK
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "kind,snr_db,value"
    kinds = {ln.split(",")[0] for ln in lines[1:]}
    assert {"lower", "asymptotic-lower", "union-upper"} <= kinds


def test_compare_needs_two_configs(sim_config, capsys):
    rc = main(["compare", "--config", str(sim_config)])
    assert rc == EXIT_CONFIG
    assert "two" in capsys.readouterr().err


def test_compare_identical_configs(sim_config, capsys):
    rc = main([
        "compare", "--config", str(sim_config), "--config", str(sim_config),
        "--targets", "2e-2",
    ])
    assert rc == EXIT_OK
    text = capsys.readouterr().out
    assert "kind = compare" in text
    assert "[first]" in text and "[second]" in text
    gains = [line for line in text.splitlines() if line.startswith("gain_at_ber_")]
    assert gains
    for line in gains:
        value = line.split("=")[1].replace("dB", "").strip()
        assert abs(float(value)) < 1e-12


def test_chain_check(capsys):
    rc = main(["chain-check", "--trials", "5", "--seed", "3"])
    assert rc == EXIT_OK
    text = capsys.readouterr().out
    assert "kind = chain-check" in text
    assert "trials = 5" in text
    devs = [float(ln.split("=")[1]) for ln in text.splitlines()
            if ln.startswith(("chain_vs_matrix", "symbol_matrix"))]
    assert len(devs) == 3
    assert max(devs) < 1e-9


def test_chain_check_impossible_tol_is_numerical_exit(capsys):
    rc = main(["chain-check", "--trials", "3", "--tol", "0", "--quiet"])
    assert rc == EXIT_NUMERICAL
    assert "disagree" in capsys.readouterr().err


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
