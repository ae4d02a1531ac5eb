from dataclasses import replace

import pytest

from fctls import preset, simulate_scenario


@pytest.fixture(scope="session")
def example5_result():
    """One shared full run of the noiseless benchmark preset."""
    return simulate_scenario(preset("example5"))


@pytest.fixture(scope="session")
def example5_noise_result():
    return simulate_scenario(preset("example5-noise"))


@pytest.fixture(scope="session")
def no_excitation_result():
    return simulate_scenario(preset("no-excitation"))


@pytest.fixture(scope="session")
def ls_standard_result():
    """Benchmark plant driven through the no-forgetting estimator."""
    config = replace(preset("example5"), estimators=frozenset({"ls_standard"}))
    return simulate_scenario(config)
