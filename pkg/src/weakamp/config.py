"""Experiment configuration: TOML ingestion, validation, defaults.

The config format is TOML (comment-capable, nested sections, duplicate
keys rejected by the parser).  Unknown sections or keys are errors, not
warnings: sweep configs are hand-edited and silent typos are worse than
strictness.  All quantities are SI; angles in radians; frequencies in Hz.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields

try:
    import tomllib  # py311+
except ModuleNotFoundError:  # pragma: no cover - py310 fallback
    import tomli as tomllib

from . import constants
from .errors import ConfigError
from .spectrum import FrequencyGrid, LineParams
from .wavepacket import ThermalParams, VelocityGrid

SCHEMA_VERSION = "1"

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, immutable parameter record; hashable so results can be memoized."""

    # core physics
    temperature: float = 1.0  # K
    theta: float = math.pi / 4 - math.pi / 1000  # rad
    phi: float = 0.03  # rad
    k_eff: float = constants.DEFAULT_K_EFF  # rad/m
    atom_mass: float = constants.CS133_MASS_KG  # kg
    probe_frequency: float = constants.CS_PROBE_FREQUENCY_HZ  # Hz
    natural_linewidth: float = constants.CS_8P32_LINEWIDTH_HZ  # Hz FWHM
    seed: int = 20260809
    beam_width: float = 1e-3  # m
    quoted_transit_time: float = constants.QUOTED_TRANSIT_TIME_S  # s
    true_phase: float = 0.005  # rad, noise-compare signal
    # velocity grid
    velocity_span_thermal_widths: float = 6.0
    velocity_n_points: int = 4096
    # frequency grid
    frequency_half_span_hz: float = 2.0e8
    frequency_n_points: int = 8001
    # phi sweep
    phi_min: float = 0.0005
    phi_max: float = 0.1
    n_phi: int = 200
    # noise comparison
    snr: float = 10.0
    n_trials: int = 100
    # perturbations
    stark_rabi: float = _TWO_PI * 1e5  # rad/s
    stark_detuning: float = _TWO_PI * 1e7  # rad/s
    stark_duration: float = 1e-6  # s
    berry_rabi: float = _TWO_PI * 1e5  # rad/s
    berry_detuning: float = _TWO_PI * 1e5  # rad/s
    berry_sweep_rate: float = 1e4  # rad/s
    baseline_phi: float = 0.1584  # rad, pointer-shift operating point

    def __post_init__(self) -> None:
        positive = (
            "temperature",
            "k_eff",
            "atom_mass",
            "probe_frequency",
            "natural_linewidth",
            "beam_width",
            "quoted_transit_time",
            "velocity_span_thermal_widths",
            "frequency_half_span_hz",
            "snr",
            "stark_rabi",
            "stark_detuning",
            "stark_duration",
            "berry_rabi",
            "berry_detuning",
            "berry_sweep_rate",
        )
        for name in positive:
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"{name} must be strictly positive")
        if not 0.0 < self.theta < math.pi / 2:
            raise ConfigError(f"theta = {self.theta!r} outside (0, pi/2)")
        for name in ("phi", "true_phase", "baseline_phi"):
            value = getattr(self, name)
            if not -math.pi < value <= math.pi:
                raise ConfigError(f"{name} = {value!r} outside (-pi, pi]")
        if self.velocity_n_points < 3 or self.frequency_n_points < 3:
            raise ConfigError("grids need at least 3 points")
        if not self.phi_min < self.phi_max:
            raise ConfigError("sweep needs phi_min < phi_max")
        if self.phi_max > math.pi:
            raise ConfigError("phi_max must not exceed pi (readout calibration window)")
        if self.n_phi < 2:
            raise ConfigError("sweep needs n_phi >= 2")
        if self.n_trials < 1:
            raise ConfigError("n_trials must be >= 1")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    # convenience views -------------------------------------------------

    def thermal(self) -> ThermalParams:
        return ThermalParams(mass=self.atom_mass, temperature=self.temperature)

    def velocity_grid(self) -> VelocityGrid:
        return VelocityGrid.for_thermal(
            self.thermal(),
            span_thermal_widths=self.velocity_span_thermal_widths,
            n_points=self.velocity_n_points,
        )

    def frequency_grid(self) -> FrequencyGrid:
        return FrequencyGrid(
            -self.frequency_half_span_hz, self.frequency_half_span_hz, self.frequency_n_points
        )

    def line_params(self) -> LineParams:
        return LineParams.for_thermal(
            self.thermal(), self.probe_frequency, self.natural_linewidth
        )

    @property
    def excited_lifetime(self) -> float:
        """Lifetime 1/(2 pi Gamma) implied by the natural linewidth."""
        return 1.0 / (_TWO_PI * self.natural_linewidth)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, mapping: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**mapping)

    def replace(self, **changes) -> "ExperimentConfig":
        merged = self.as_dict()
        merged.update(changes)
        return self.from_dict(merged)


#: (section, key) -> ExperimentConfig field; the whole accepted grammar.
_SCHEMA: dict[str, dict[str, str]] = {
    "experiment": {
        "temperature": "temperature",
        "theta": "theta",
        "phi": "phi",
        "k_eff": "k_eff",
        "atom_mass": "atom_mass",
        "probe_frequency": "probe_frequency",
        "natural_linewidth": "natural_linewidth",
        "seed": "seed",
        "beam_width": "beam_width",
        "quoted_transit_time": "quoted_transit_time",
        "true_phase": "true_phase",
    },
    "velocity_grid": {
        "span_thermal_widths": "velocity_span_thermal_widths",
        "n_points": "velocity_n_points",
    },
    "frequency_grid": {
        "half_span_hz": "frequency_half_span_hz",
        "n_points": "frequency_n_points",
    },
    "sweep": {"phi_min": "phi_min", "phi_max": "phi_max", "n_phi": "n_phi"},
    "noise": {"snr": "snr", "n_trials": "n_trials"},
    "perturb": {
        "stark_rabi": "stark_rabi",
        "stark_detuning": "stark_detuning",
        "stark_duration": "stark_duration",
        "berry_rabi": "berry_rabi",
        "berry_detuning": "berry_detuning",
        "berry_sweep_rate": "berry_sweep_rate",
        "baseline_phi": "baseline_phi",
    },
}

_INT_FIELDS = {"seed", "velocity_n_points", "frequency_n_points", "n_phi", "n_trials"}


def _line_of(text: str, token: str) -> int | None:
    """Best-effort line number of a key or [section] header in the source."""
    pattern = re.compile(rf"^\s*(\[\s*)?{re.escape(token)}\s*[\]=.]", re.MULTILINE)
    match = pattern.search(text)
    if match is None:
        return None
    return text.count("\n", 0, match.start()) + 1


def _located(text: str, token: str) -> str:
    line = _line_of(text, token)
    return f"{token!r} (line {line})" if line is not None else f"{token!r}"


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a TOML config document, applying defaults.

    Raises ConfigError naming the offending key (and its line where it
    can be located) for unknown keys, type mismatches, duplicate keys and
    range violations.
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    values: dict[str, object] = {}
    for section, entries in doc.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section {_located(text, section)}")
        if not isinstance(entries, dict):
            raise ConfigError(f"section {_located(text, section)} must be a table")
        keys = _SCHEMA[section]
        for key, raw in entries.items():
            if key not in keys:
                raise ConfigError(
                    f"unknown key {_located(text, key)} in section [{section}]"
                )
            field_name = keys[key]
            if field_name in _INT_FIELDS:
                if isinstance(raw, bool) or not isinstance(raw, int):
                    raise ConfigError(f"{_located(text, key)} must be an integer")
                values[field_name] = raw
            else:
                if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                    raise ConfigError(f"{_located(text, key)} must be a number")
                values[field_name] = float(raw)

    try:
        return ExperimentConfig(**values)
    except ConfigError as exc:
        # re-raise range violations with a line reference where possible
        first_word = str(exc).split(" ", 1)[0]
        reverse = {v: k for sec in _SCHEMA.values() for k, v in sec.items()}
        key = reverse.get(first_word, first_word)
        line = _line_of(text, key)
        if line is not None:
            raise ConfigError(f"{exc} (key {key!r}, line {line})") from exc
        raise


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
