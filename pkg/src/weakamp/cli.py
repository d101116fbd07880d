"""Command-line front end: config ingestion, subcommand dispatch, CSV/JSON output.

Output files are written to a temp name and renamed into place, so an
interrupted run never leaves a truncated file at the target path.  Every
summary carries a schema version and the fully resolved config, which
re-parses to an identical ExperimentConfig.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import harness, perturb, qdyn, spectrum, wavepacket
from .config import SCHEMA_VERSION, ExperimentConfig, load_config
from .errors import WeakampError


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.15g}"
    return str(value)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)  # mkstemp creates 0600; honor the umask instead
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    _atomic_write(path, "\n".join(lines) + "\n")


def write_summary(path: Path, subcommand: str, cfg: ExperimentConfig, results: dict,
                  outputs: list[str]) -> None:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": subcommand,
        "config": cfg.as_dict(),
        "results": results,
        "outputs": outputs,
    }
    _atomic_write(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


# ---------------------------------------------------------------------------
# subcommands


def _run_weak_value(cfg: ExperimentConfig, outdir: Path) -> dict:
    report = qdyn.weak_value_mismatch_report(cfg.theta, cfg.phi)
    results = {
        "definition": {"re": report.definition_re, "im": report.definition_im},
        "closed_form": {"re": report.closed_form_re, "im": report.closed_form_im},
        "mismatch": {
            "abs": report.abs_mismatch,
            "rel": report.rel_mismatch,
            "agrees": report.agrees,
            "summary": report.summary,
        },
    }
    write_summary(outdir / "weak_value_summary.json", "weak-value", cfg, results,
                  ["weak_value_summary.json"])
    return results


def _run_packet(cfg: ExperimentConfig, outdir: Path) -> dict:
    thermal = cfg.thermal()
    grid = cfg.velocity_grid()
    symmetric = wavepacket.maxwell_boltzmann(thermal, grid)
    signed = wavepacket.firstorder_signed(cfg.theta, cfg.phi, cfg.k_eff, thermal, grid)
    exact = wavepacket.exact_postselected(cfg.theta, cfg.phi, cfg.k_eff, thermal, grid)
    asym = signed.values - symmetric.values
    rows = zip(grid.points(), symmetric.values, asym, signed.values, exact.density.values)
    write_csv(outdir / "packet.csv",
              ["v_mps", "symmetric", "asymmetric", "total_signed", "exact"], rows)
    _atomic_write(outdir / "exact_density.csv", exact.density.to_csv())
    results = {
        "success_probability": exact.success_probability,
        "centroid_exact_mps": wavepacket.centroid(exact.density),
        "centroid_firstorder_signed_mps": wavepacket.centroid(signed),
        "amplification_factor": wavepacket.amplification_factor(
            exact.density, cfg.k_eff, cfg.atom_mass
        ),
        "branch_shift_mps": wavepacket.branch_shift(cfg.k_eff, cfg.atom_mass),
    }
    write_summary(outdir / "packet_summary.json", "packet", cfg, results,
                  ["packet.csv", "exact_density.csv", "packet_summary.json"])
    return results


def _run_spectrum(cfg: ExperimentConfig, outdir: Path) -> dict:
    raw = harness.pipeline_profile(cfg, cfg.phi, convolved=False)
    broadened = harness.pipeline_profile(cfg, cfg.phi, convolved=True)
    rows = zip(raw.grid.points(), raw.intensity, broadened.intensity)
    write_csv(outdir / "spectrum.csv",
              ["detuning_hz", "intensity", "intensity_convolved"], rows)

    fwhm_raw = spectrum.fwhm(raw)
    fwhm_conv = spectrum.fwhm(broadened)
    transit = spectrum.transit_time_check(
        cfg.beam_width,
        cfg.thermal().thermal_speed,
        cfg.excited_lifetime,
        quoted_transit_time=cfg.quoted_transit_time,
    )
    results = {
        "centroid_hz": spectrum.spectral_centroid(raw),
        "centroid_convolved_hz": spectrum.spectral_centroid(broadened),
        "fwhm_hz": fwhm_raw.width,
        "fwhm_multimodal": fwhm_raw.multimodal,
        "fwhm_convolved_hz": fwhm_conv.width,
        "fwhm_convolved_multimodal": fwhm_conv.multimodal,
        "bimodal": spectrum.bimodality(raw).bimodal,
        "bimodal_convolved": spectrum.bimodality(broadened).bimodal,
        "broadening": spectrum.broadening_comparison(cfg.line_params()),
        "transit_report": {
            "transit_time_s": transit.transit_time,
            "excited_lifetime_s": transit.excited_lifetime,
            "lifetime_ratio": transit.lifetime_ratio,
            "negligible": transit.negligible,
            "quoted_transit_time_s": transit.quoted_transit_time,
            "quoted_consistent": transit.quoted_consistent,
            "summary": transit.summary,
        },
    }
    write_summary(outdir / "spectrum_summary.json", "spectrum", cfg, results,
                  ["spectrum.csv", "spectrum_summary.json"])
    return results


def _run_heatmap(cfg: ExperimentConfig, outdir: Path) -> dict:
    spec = harness.SweepSpec.from_config(cfg)
    rows = harness.heatmap(spec)
    write_csv(outdir / "heatmap.csv", ["phi_rad", "detuning_hz", "intensity"], rows)
    results = {"n_rows": len(rows), "n_phi": cfg.n_phi,
               "n_detuning": cfg.frequency_n_points}
    write_summary(outdir / "heatmap_summary.json", "heatmap", cfg, results,
                  ["heatmap.csv", "heatmap_summary.json"])
    return results


def _run_sweep_phi(cfg: ExperimentConfig, outdir: Path) -> dict:
    rows = harness.phi_sweep(harness.SweepSpec.from_config(cfg))
    write_csv(
        outdir / "sweep_phi.csv",
        ["phi_rad", "centroid_hz", "bimodal", "success_prob", "error"],
        ((r.phi, r.centroid_hz, r.bimodal, r.success_prob, r.error or "") for r in rows),
    )
    good = [r for r in rows if r.error is None]
    results = {
        "n_rows": len(rows),
        "n_error_rows": len(rows) - len(good),
        "centroid_min_hz": min(r.centroid_hz for r in good) if good else None,
        "centroid_max_hz": max(r.centroid_hz for r in good) if good else None,
    }
    write_summary(outdir / "sweep_phi_summary.json", "sweep-phi", cfg, results,
                  ["sweep_phi.csv", "sweep_phi_summary.json"])
    return results


def _detection_dict(result: harness.DetectionResult) -> dict:
    return {
        "estimated_phase_rad": result.estimated_phase,
        "significance_sigma": result.significance,
        "detected": result.detected,
    }


def _run_noise_compare(cfg: ExperimentConfig, outdir: Path) -> dict:
    noise = harness.NoiseSpec(snr=cfg.snr, n_trials=cfg.n_trials, seed=cfg.seed)
    fringe, centroid = harness.noise_compare(cfg.true_phase, noise, cfg)
    results = {
        "true_phase_rad": cfg.true_phase,
        "snr": cfg.snr,
        "n_trials": cfg.n_trials,
        "seed": cfg.seed,
        "fringe": _detection_dict(fringe),
        "centroid": _detection_dict(centroid),
        "sql_limit_1e6_atoms": harness.sql_limit(10**6),
    }
    write_summary(outdir / "noise_compare_summary.json", "noise-compare", cfg, results,
                  ["noise_compare_summary.json"])
    return results


def _run_perturb(cfg: ExperimentConfig, outdir: Path) -> dict:
    stark = perturb.StarkParams(cfg.stark_rabi, cfg.stark_detuning, cfg.stark_duration)
    berry = perturb.BerryParams(cfg.berry_rabi, cfg.berry_detuning, cfg.berry_sweep_rate)
    stark_phase = perturb.ac_stark_phase(stark)
    berry_value = perturb.berry_phase(berry)
    thermal = cfg.thermal()
    grid = cfg.velocity_grid()

    def shift_dict(phase: float) -> dict:
        shift = perturb.amplified_pointer_shift(
            phase, cfg.theta, cfg.baseline_phi, cfg.k_eff, thermal, grid
        )
        return {
            "phase_rad": shift.phase,
            "linear_estimate_kgmps": shift.linear_estimate,
            "linear_estimate_sigma_z_kgmps": shift.linear_estimate_sigma_z,
            "pipeline_kgmps": shift.pipeline,
        }

    results = {
        "stark": {
            "phase_rad": stark_phase,
            "far_detuned": stark.far_detuned,
            "pointer_shift": shift_dict(stark_phase),
        },
        "berry": {
            "phase_rad": berry_value,
            "adiabatic": berry.adiabatic,
            "pointer_shift": shift_dict(berry_value),
        },
        "baseline_phi_rad": cfg.baseline_phi,
    }
    write_summary(outdir / "perturb_summary.json", "perturb", cfg, results,
                  ["perturb_summary.json"])
    return results


_RUNNERS = {
    "weak-value": _run_weak_value,
    "packet": _run_packet,
    "spectrum": _run_spectrum,
    "heatmap": _run_heatmap,
    "sweep-phi": _run_sweep_phi,
    "noise-compare": _run_noise_compare,
    "perturb": _run_perturb,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weakamp",
        description="Weak-value amplified single-pulse atom interferometer simulator",
    )
    parser.add_argument("--config", help="TOML config file (defaults apply when omitted)")
    parser.add_argument("--out", default="out", help="output directory (default: ./out)")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--quiet", action="store_true", help="suppress status output")
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "weak-value": "conditioned value both ways plus the mismatch report",
        "packet": "velocity densities: thermal, first-order parts, exact",
        "spectrum": "single-phi transmission spectrum with and without broadening",
        "heatmap": "phi x detuning transmission heat map",
        "sweep-phi": "spectral centroid and success probability across phi",
        "noise-compare": "fringe vs centroid detection under matched noise",
        "perturb": "Stark and geometric phases with pointer shifts",
    }
    for name, help_text in descriptions.items():
        sub.add_parser(name, help=help_text)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        if args.seed is not None:
            cfg = cfg.replace(seed=args.seed)
        outdir = Path(args.out)
        results = _RUNNERS[args.command](cfg, outdir)
    except WeakampError as exc:
        print(f"weakamp {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"weakamp {args.command}: {exc}", file=sys.stderr)
        return 1
    if not args.quiet:
        print(f"weakamp {args.command}: wrote {args.out}/")
        print(json.dumps(results, sort_keys=True, indent=2, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
