import os
from pathlib import Path

import numpy as np
import pytest

from ckdbench.dataset_io import ckd_surrogate_spec, gaussian_pair_spec, synth_generate
from ckdbench.preprocess import build_imputation_plan, encode, impute

ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = Path(__file__).resolve().parent / "data"

# where the UCI file is looked for when CKD_DATA is not set
UCI_CANDIDATES = [
    ROOT / "data" / "chronic_kidney_disease.arff",
    ROOT / "data" / "chronic_kidney_disease_full.arff",
    ROOT / "data" / "chronic_kidney_disease.csv",
]

ACCEPTANCE_LINES = []


def uci_path():
    env = os.environ.get("CKD_DATA")
    if env:
        return Path(env)
    for p in UCI_CANDIDATES:
        if p.is_file():
            return p
    return None


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def quirky_arff_text():
    return (DATA_DIR / "quirky.arff").read_text()


@pytest.fixture(scope="session")
def surrogate():
    return synth_generate(ckd_surrogate_spec(), 400, seed=11)


@pytest.fixture(scope="session")
def gaussian_pair():
    """Two classes at -5 / +5 on each of 2 features, unit spread, 100 rows."""
    return synth_generate(gaussian_pair_spec(separation=5.0, n_features=2), 100, seed=7)


@pytest.fixture(scope="session")
def gaussian_fm(gaussian_pair):
    return encode(impute(gaussian_pair, build_imputation_plan(gaussian_pair)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
