import pytest

from weakamp import ExperimentConfig


@pytest.fixture(scope="session")
def cfg() -> ExperimentConfig:
    """Default configuration shared by the suite (cesium, 1 K, D2 kick)."""
    return ExperimentConfig()


@pytest.fixture(scope="session")
def fast_cfg(cfg) -> ExperimentConfig:
    """Compact grids for pipeline tests that iterate many phi values.

    The frequency grid keeps spacing <= Gamma/10 and span >= 4 Doppler
    widths so no resolution/coverage guard trips.
    """
    return cfg.replace(
        frequency_half_span_hz=1.2e8,
        frequency_n_points=4801,
        velocity_n_points=2048,
        n_phi=5,
    )
