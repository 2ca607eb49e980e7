from dataclasses import replace

import pytest

from fibermem.config import Config


@pytest.fixture(scope="session")
def default_config():
    return Config()


@pytest.fixture
def spl_scenario(default_config):
    return default_config.build_scenario()


@pytest.fixture
def bright_scenario(default_config):
    return replace(
        default_config.build_scenario(),
        input_mean_photons=1e5,
        n_trials=2048,
        n_bins=40,
    )
