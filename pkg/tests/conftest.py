import pytest

from maglaser.harness import calibrate
from maglaser.plant import PlantParams, with_calibration


@pytest.fixture(scope="session")
def calibrated_params() -> PlantParams:
    """The calibrated twin, fitted once per test session."""
    return calibrate(PlantParams(), seed=1234)


@pytest.fixture(scope="session")
def calibrated_noiseless(calibrated_params) -> PlantParams:
    return with_calibration(calibrated_params, current_noise_a=0.0)
