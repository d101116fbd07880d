"""Config parsing/validation and the command-line front end."""

import json
import math
import os
import subprocess
import sys
from pathlib import Path

import pytest

from weakamp import ConfigError, ExperimentConfig, parse_config
from weakamp.cli import main
from weakamp.config import SCHEMA_VERSION

MINIMAL = """
[experiment]
temperature = 1.0
theta = 0.7822565707438585
phi = 0.03
"""

#: compact grids so CLI end-to-end runs stay fast; spacing still <= Gamma/10
FAST_TOML = """
[experiment]
seed = 123
[velocity_grid]
n_points = 1024
[frequency_grid]
half_span_hz = 1.2e8
n_points = 4801
[sweep]
phi_min = 0.002
phi_max = 0.05
n_phi = 4
[noise]
snr = 10.0
n_trials = 40
"""


# ---------------------------------------------------------------------------
# parsing


def test_minimal_document_gets_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.temperature == 1.0
    assert cfg.phi == 0.03
    assert cfg.k_eff == ExperimentConfig().k_eff  # default applied
    assert cfg.n_phi == 200


def test_empty_document_is_all_defaults():
    assert parse_config("") == ExperimentConfig()


def test_range_violation_names_key_and_line():
    bad = "[experiment]\ntheta = 2.0\n"
    with pytest.raises(ConfigError, match=r"theta.*line 2"):
        parse_config(bad)


def test_duplicate_key_rejected():
    bad = "[experiment]\nphi = 0.01\nphi = 0.02\n"
    with pytest.raises(ConfigError):
        parse_config(bad)


def test_unknown_key_named_with_line():
    bad = "[experiment]\ntemperature = 1.0\nbogus_knob = 3\n"
    with pytest.raises(ConfigError, match=r"bogus_knob.*line 3"):
        parse_config(bad)


def test_unknown_section_rejected():
    with pytest.raises(ConfigError, match="mystery"):
        parse_config("[mystery]\nx = 1\n")


def test_type_mismatches_rejected():
    with pytest.raises(ConfigError, match="temperature"):
        parse_config('[experiment]\ntemperature = "hot"\n')
    with pytest.raises(ConfigError, match="n_phi"):
        parse_config("[sweep]\nn_phi = 10.5\n")
    with pytest.raises(ConfigError, match="seed"):
        parse_config("[experiment]\nseed = true\n")


def test_phi_range_enforced():
    with pytest.raises(ConfigError, match="phi"):
        parse_config("[experiment]\nphi = 3.5\n")


def test_seed_range_enforced():
    with pytest.raises(ConfigError):
        parse_config("[experiment]\nseed = -1\n")


def test_config_round_trips_through_dict():
    cfg = parse_config(FAST_TOML)
    assert ExperimentConfig.from_dict(cfg.as_dict()) == cfg


def test_from_dict_rejects_unknown_fields():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"nonsense": 1.0})


def test_replace_revalidates():
    with pytest.raises(ConfigError):
        ExperimentConfig().replace(theta=2.0)


def test_excited_lifetime_from_linewidth():
    cfg = ExperimentConfig()
    assert cfg.excited_lifetime == pytest.approx(1.0 / (2 * math.pi * 0.53e6), rel=1e-12)


# ---------------------------------------------------------------------------
# CLI


@pytest.fixture()
def fast_toml(tmp_path: Path) -> Path:
    path = tmp_path / "fast.toml"
    path.write_text(FAST_TOML, encoding="utf-8")
    return path


def run_cli(*args: str) -> int:
    return main(list(args))


def test_cli_weak_value(tmp_path, fast_toml, capsys):
    out = tmp_path / "wv"
    assert run_cli("--config", str(fast_toml), "--out", str(out), "weak-value") == 0
    summary = json.loads((out / "weak_value_summary.json").read_text())
    assert summary["schema_version"] == SCHEMA_VERSION
    assert summary["results"]["mismatch"]["summary"]
    printed = capsys.readouterr().out
    assert "definition" in printed and "closed_form" in printed


def test_cli_packet(tmp_path, fast_toml):
    out = tmp_path / "packet"
    assert run_cli("--config", str(fast_toml), "--out", str(out), "--quiet", "packet") == 0
    lines = (out / "packet.csv").read_text().splitlines()
    assert lines[0] == "v_mps,symmetric,asymmetric,total_signed,exact"
    assert len(lines) == 1 + 1024
    density_lines = (out / "exact_density.csv").read_text().splitlines()
    assert density_lines[0] == "v,value"
    results = json.loads((out / "packet_summary.json").read_text())["results"]
    # the conditioned centroid is visibly displaced: tens of branch kicks
    assert results["amplification_factor"] > 10.0
    assert abs(results["centroid_exact_mps"]) > 10.0 * results["branch_shift_mps"]


def test_cli_spectrum_reports_discrepancies(tmp_path, fast_toml):
    out = tmp_path / "spec"
    assert run_cli("--config", str(fast_toml), "--out", str(out), "--quiet", "spectrum") == 0
    results = json.loads((out / "spectrum_summary.json").read_text())["results"]
    assert results["transit_report"]["quoted_consistent"] is False
    assert results["transit_report"]["summary"]
    assert results["broadening"]["comparable"] is False


def test_cli_heatmap(tmp_path, fast_toml):
    out = tmp_path / "hm"
    assert run_cli("--config", str(fast_toml), "--out", str(out), "--quiet", "heatmap") == 0
    lines = (out / "heatmap.csv").read_text().splitlines()
    assert lines[0] == "phi_rad,detuning_hz,intensity"
    assert len(lines) == 1 + 4 * 4801


def test_cli_sweep_phi(tmp_path, fast_toml):
    out = tmp_path / "sw"
    assert run_cli("--config", str(fast_toml), "--out", str(out), "--quiet", "sweep-phi") == 0
    lines = (out / "sweep_phi.csv").read_text().splitlines()
    assert lines[0] == "phi_rad,centroid_hz,bimodal,success_prob,error"
    assert len(lines) == 1 + 4


def test_cli_noise_compare(tmp_path, fast_toml):
    out = tmp_path / "nc"
    assert run_cli("--config", str(fast_toml), "--out", str(out), "--quiet", "noise-compare") == 0
    results = json.loads((out / "noise_compare_summary.json").read_text())["results"]
    assert results["centroid"]["detected"] is True
    assert results["fringe"]["detected"] is False


def test_cli_perturb(tmp_path, fast_toml):
    out = tmp_path / "pt"
    assert run_cli("--config", str(fast_toml), "--out", str(out), "--quiet", "perturb") == 0
    results = json.loads((out / "perturb_summary.json").read_text())["results"]
    assert results["stark"]["far_detuned"] is True
    assert results["berry"]["phase_rad"] < 0.0


def test_cli_invalid_config_exits_nonzero_without_outputs(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("[experiment]\ntheta = 9.0\n", encoding="utf-8")
    out = tmp_path / "never"
    assert run_cli("--config", str(bad), "--out", str(out), "packet") == 2
    assert not out.exists()


def test_cli_seed_override_lands_in_echo(tmp_path, fast_toml):
    out = tmp_path / "seed"
    assert run_cli(
        "--config", str(fast_toml), "--out", str(out), "--seed", "999", "--quiet", "weak-value"
    ) == 0
    summary = json.loads((out / "weak_value_summary.json").read_text())
    assert summary["config"]["seed"] == 999


def test_cli_config_echo_round_trips(tmp_path, fast_toml):
    out = tmp_path / "echo"
    assert run_cli("--config", str(fast_toml), "--out", str(out), "--quiet", "weak-value") == 0
    summary = json.loads((out / "weak_value_summary.json").read_text())
    echoed = ExperimentConfig.from_dict(summary["config"])
    assert echoed == parse_config(FAST_TOML)


def test_cli_csv_precision_and_line_endings(tmp_path, fast_toml):
    out = tmp_path / "prec"
    assert run_cli("--config", str(fast_toml), "--out", str(out), "--quiet", "packet") == 0
    raw = (out / "packet.csv").read_bytes()
    assert b"\r" not in raw  # LF only
    first_cell = raw.decode().splitlines()[1].split(",")[0]
    digits = first_cell.replace("-", "").replace(".", "").split("e")[0].lstrip("0")
    assert len(digits) >= 12  # >= 12 significant digits written
    cfg = parse_config(FAST_TOML)
    assert float(first_cell) == pytest.approx(cfg.velocity_grid().points()[0], rel=1e-14)


def test_cli_runs_are_byte_identical(tmp_path, fast_toml):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    for out in (out_a, out_b):
        assert run_cli("--config", str(fast_toml), "--out", str(out), "--quiet", "sweep-phi") == 0
    assert (out_a / "sweep_phi.csv").read_bytes() == (out_b / "sweep_phi.csv").read_bytes()
    assert (out_a / "sweep_phi_summary.json").read_bytes() == (
        out_b / "sweep_phi_summary.json"
    ).read_bytes()


def test_cli_leaves_no_temp_files(tmp_path, fast_toml):
    out = tmp_path / "clean"
    assert run_cli("--config", str(fast_toml), "--out", str(out), "--quiet", "packet") == 0
    leftovers = [name for name in os.listdir(out) if name.endswith(".tmp")]
    assert leftovers == []


def test_cli_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "weakamp.cli", "--help"],
        capture_output=True,
        text=True,
        cwd=tmp_path,
    )
    assert proc.returncode == 0
    assert "sweep-phi" in proc.stdout
