"""Weak-value amplified single-pulse atom interferometry simulator.

A pi/2 Raman pulse entangles the internal state of a thermal atom with a
small momentum kick; a near-orthogonal post-selection then displaces the
momentum centroid by hundreds of kicks, and the displacement is read out
from the Doppler transmission spectrum of a probe line instead of
fluorescence.  Subpackages: qdyn (two-level algebra and weak values),
wavepacket (thermal and conditioned densities), spectrum (Doppler and
natural broadening), perturb (Stark and geometric phases), harness
(sweeps and the matched-noise study), cli (command-line front end).
"""

from .config import SCHEMA_VERSION, ExperimentConfig, load_config, parse_config
from .errors import (
    CalibrationRangeError,
    ConfigError,
    GridCoverageError,
    GridMismatchError,
    GridResolutionError,
    SingularPostselectionError,
    WeakampError,
)

__version__ = "0.1.0"

__all__ = [
    "SCHEMA_VERSION",
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "WeakampError",
    "ConfigError",
    "SingularPostselectionError",
    "GridCoverageError",
    "GridMismatchError",
    "GridResolutionError",
    "CalibrationRangeError",
    "__version__",
]
