"""Echo-derived measurement simulation.

The matched-filter / grid-search estimators are represented by their
asymptotic Gaussian error model: each observable is the true value plus
zero-mean noise whose variance scales inversely with the echo SNR.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, TargetUnobservableError
from .upa import SPEED_OF_LIGHT

TAU_FLOOR = 1e-9
"""Smallest delay a measurement may report, seconds."""


@dataclass(frozen=True)
class Measurement:
    """Anonymous echo measurement: no digital identity, by construction."""

    tau: float        # s
    mu: float         # Hz
    azimuth: float    # rad
    elevation: float  # rad
    var_tau: float
    var_mu: float
    var_az: float
    var_el: float

    def vector(self) -> np.ndarray:
        return np.array([self.tau, self.mu, self.azimuth, self.elevation])

    def variances(self) -> np.ndarray:
        return np.array([self.var_tau, self.var_mu, self.var_az, self.var_el])


@dataclass
class SensingConfig:
    g: float = 10.0       # matched-filter gain
    a1: float = 6.7e-7
    a2: float = 2e4
    a3: float = 1.0
    a4: float = 1.0
    sigma: float = 1.0    # echo noise std
    xi: float = 300.0     # radar cross-section scale, m^2
    nt: int = 64
    nrb: int = 64

    def __post_init__(self):
        if self.g < 1:
            raise ConfigError(f"matched-filter gain must be >= 1, got {self.g}")
        for name in ("a1", "a2", "a3", "a4"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be strictly positive")
        if self.sigma < 0:
            raise ConfigError("noise std cannot be negative")
        if self.xi < 0:
            raise ConfigError("radar cross-section cannot be negative")


def reflection_coefficient(tau: float, xi: float) -> float:
    """Reflection coefficient xi / (tau * c)."""
    if tau <= 0:
        raise DomainError(f"delay must be positive, got {tau}")
    return xi / (tau * SPEED_OF_LIGHT)


def noise_variances(p: float, beta: float, beam_gain: float, cfg: SensingConfig):
    """Measurement-noise variances (tau, mu, az, el) at transmit power p.

    Delay and Doppler variances scale with the full echo SNR including the
    array gains and reflection strength; the angle variances only with the
    matched-filter gain and power.
    """
    if p <= 0:
        raise DomainError("transmit power must be positive")
    if beam_gain <= 0 or beta == 0:
        raise TargetUnobservableError(
            "zero beam gain or reflection: delay/Doppler variance is infinite"
        )
    echo = cfg.g * cfg.nt * cfg.nrb * beta**2 * beam_gain * p
    var_tau = cfg.a1**2 * cfg.sigma**2 / echo
    var_mu = cfg.a2**2 * cfg.sigma**2 / echo
    var_az = cfg.a3**2 * cfg.sigma**2 / (cfg.g * p)
    var_el = cfg.a4**2 * cfg.sigma**2 / (cfg.g * p)
    return var_tau, var_mu, var_az, var_el


def simulate_measurement(geometry, variances, rng: np.random.Generator) -> Measurement:
    """Draw one noisy measurement around true (tau, mu, az, el).

    `variances` pairs with the geometry component-wise. The reported delay
    is clamped to TAU_FLOOR.
    """
    tau, mu, az, el = geometry
    v_tau, v_mu, v_az, v_el = variances
    tau_hat = max(tau + rng.normal(0.0, np.sqrt(v_tau)), TAU_FLOOR)
    mu_hat = mu + rng.normal(0.0, np.sqrt(v_mu))
    az_hat = az + rng.normal(0.0, np.sqrt(v_az))
    el_hat = el + rng.normal(0.0, np.sqrt(v_el))
    return Measurement(tau_hat, mu_hat, az_hat, el_hat, v_tau, v_mu, v_az, v_el)
