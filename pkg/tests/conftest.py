import numpy as np
import pytest
from hypothesis import settings

from enercast.dataset import generate_synthetic, raw_samples
from enercast.network import NetworkConfig, TrainConfig

settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def synthetic_240():
    return generate_synthetic(240, seed=7, noise=0.0)


@pytest.fixture(scope="session")
def small_dataset():
    return generate_synthetic(48, seed=3)


@pytest.fixture
def quick_train():
    return TrainConfig(learning_rate=0.05, max_epochs=30, mse_tolerance=0.0, patience=30)


@pytest.fixture
def small_net_cfg():
    return NetworkConfig((1, 4, 1), init_seed=1)


@pytest.fixture(scope="session")
def small_raw(small_dataset):
    return raw_samples(small_dataset, 6)


# Acceptance criteria report one line each in the terminal summary.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
