from pathlib import Path

import pytest

import arbc
from arbc.csv_io import read_measured_samples
from arbc.models import DiodeParams, LinkConfig
from arbc.pv_receiver import calibrate_area_factor

DATA_DIR = Path(arbc.__file__).parent / "data"
SYNTHETIC_CSV = DATA_DIR / "synthetic_samples.csv"


@pytest.fixture
def default_config() -> LinkConfig:
    return LinkConfig()


@pytest.fixture(scope="session")
def calibrated_params() -> DiodeParams:
    return calibrate_area_factor(DiodeParams())


@pytest.fixture(scope="session")
def synthetic_samples():
    return read_measured_samples(SYNTHETIC_CSV)


@pytest.fixture
def fixed_epoch(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    monkeypatch.delenv("ARBC_CONFIG", raising=False)


@pytest.fixture
def synthetic_csv() -> Path:
    return SYNTHETIC_CSV
