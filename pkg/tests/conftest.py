"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest

from skybeam.fleet import FleetConfig
from skybeam.sensing import SensingConfig
from skybeam.simulate import SimConfig
from skybeam.upa import LinkBudget


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def small_config(**overrides) -> SimConfig:
    """A fast configuration for integration tests: tiny fleet, short run."""
    fleet = overrides.pop("fleet", FleetConfig(k=4, horizon=20))
    return SimConfig(fleet=fleet, **overrides)


def noiseless_config(k=5, horizon=100) -> SimConfig:
    """Every stochastic source zeroed; initial tracks equal truth exactly."""
    return SimConfig(
        sensing=SensingConfig(sigma=0.0),
        fleet=FleetConfig(k=k, horizon=horizon, sigma_p=0.0, sigma_v=0.0),
    )


def comparison_config(scheme, **overrides) -> SimConfig:
    """The documented dense-confusion operating point for scheme comparisons.

    Transmit power 1.5 W puts measurement noise high enough that the
    association problem is genuinely hard, which is where the schemes
    separate; the package default (10 W) is the high-accuracy regime.
    """
    fleet = overrides.pop("fleet", FleetConfig(k=10, v_max_mps=20.0, horizon=500))
    link = overrides.pop("link", LinkBudget(power_w=1.5))
    return SimConfig(fleet=fleet, link=link, scheme=scheme, **overrides)
