"""Uniform planar array model: steering vectors, beam gains, SNR and rate.

Conventions used throughout the package:

* angles are radians; azimuth is measured so that a position at distance d
  decomposes as (d sin(el) sin(az), d sin(el) cos(az), d cos(el));
* UPA elements are enumerated row-major over (na, nb) with nb fastest;
* steering vectors are unit-norm (1/sqrt(N) per-element modulus).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, DimensionMismatchError, DomainError

SPEED_OF_LIGHT = 299792458.0
"""Propagation speed in m/s."""


@dataclass(frozen=True)
class UpaConfig:
    """Planar array geometry: nx by ny elements at half-wavelength spacing."""

    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ConfigError(f"antenna counts must be >= 1, got {self.nx}x{self.ny}")

    @property
    def size(self) -> int:
        return self.nx * self.ny


@dataclass(frozen=True)
class Angles:
    """Azimuth/elevation pair in radians."""

    azimuth: float
    elevation: float


@dataclass(frozen=True)
class LinkBudget:
    """Link-level constants: transmit power, carrier, path gain, noise."""

    power_w: float = 40.0
    fc_hz: float = 28e9
    alpha: float = 1.0       # power gain at 1 m reference distance
    sigma_r: float = 1.0     # communication noise std, sqrt(W)
    sigma: float = 1.0       # echo noise std, sqrt(W)
    sigma_c: float = 1.0     # transmit-side reference noise std, sqrt(W)

    def __post_init__(self):
        for name in ("power_w", "fc_hz", "alpha", "sigma_r", "sigma", "sigma_c"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be strictly positive")


@lru_cache(maxsize=32)
def _element_grids(nx: int, ny: int):
    # zero-based (na, nb) indices, row-major with nb fastest
    na, nb = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    return na.ravel().astype(float), nb.ravel().astype(float)


def steering_vector(angles: Angles, upa: UpaConfig) -> np.ndarray:
    """Unit-norm steering vector of `upa` toward `angles`.

    Element (na, nb) carries phase pi*sin(el)*[na*cos(az) + nb*sin(az)]
    (zero-based indices, half-wavelength spacing).
    """
    na, nb = _element_grids(upa.nx, upa.ny)
    phase = np.pi * np.sin(angles.elevation) * (
        na * np.cos(angles.azimuth) + nb * np.sin(angles.azimuth)
    )
    return np.exp(1j * phase) / np.sqrt(upa.size)


def steering_matrix(angle_list, upa: UpaConfig) -> np.ndarray:
    """Stack steering vectors for several directions into a (K, N) matrix."""
    if len(angle_list) == 0:
        return np.zeros((0, upa.size), dtype=complex)
    return np.stack([steering_vector(a, upa) for a in angle_list])


def array_gain(a: np.ndarray, f: np.ndarray) -> float:
    """Beamforming gain |a^H f|^2 between two unit-norm steering vectors."""
    if a.shape != f.shape:
        raise DimensionMismatchError(f"steering vectors differ in length: {a.shape} vs {f.shape}")
    return float(np.abs(np.vdot(a, f)) ** 2)


def channel_coefficient(distance: float, budget: LinkBudget, n_t: int, n_r: int) -> complex:
    """LoS channel coefficient sqrt(Nt*Nr*p) * alpha/d * exp(j*2*pi*fc*d/c)."""
    if distance <= 0:
        raise DomainError(f"distance must be positive, got {distance}")
    mag = np.sqrt(n_t * n_r * budget.power_w) * budget.alpha / distance
    phase = 2.0 * np.pi * budget.fc_hz * distance / SPEED_OF_LIGHT
    return complex(mag * np.exp(1j * phase))


def link_snr(
    true_angles: Angles,
    tx_beam: Angles,
    rx_beam: Angles,
    distance: float,
    budget: LinkBudget,
    bs_upa: UpaConfig,
    uav_upa: UpaConfig,
) -> float:
    """Receive SNR of a single downlink beam.

    The transmit beam f and the array response a live on the BS UPA, the
    receive beam w and the response b on the UAV UPA.
    """
    a = steering_vector(true_angles, bs_upa)
    f = steering_vector(tx_beam, bs_upa)
    b = steering_vector(true_angles, uav_upa)
    w = steering_vector(rx_beam, uav_upa)
    coeff = channel_coefficient(distance, budget, bs_upa.size, uav_upa.size)
    g = coeff * np.vdot(w, b) * np.vdot(a, f)
    return float(budget.power_w * np.abs(g) ** 2 / budget.sigma_r**2)


def receive_snr_and_rate(
    true_angles,
    tx_beams,
    rx_beams,
    distances,
    budget: LinkBudget,
    bs_upa: UpaConfig,
    uav_upa: UpaConfig,
):
    """Per-link receive SNRs and the average achievable rate over K links.

    Returns (snr array of length K, rate in bit/s/Hz). Rate is the mean of
    log2(1 + SNR_k). Perfect pointing (tx = rx = true angles) maximizes
    every SNR.
    """
    k = len(true_angles)
    if not (len(tx_beams) == len(rx_beams) == len(distances) == k):
        raise DimensionMismatchError("per-link inputs must share the same length K")
    snr = np.array([
        link_snr(true_angles[i], tx_beams[i], rx_beams[i], distances[i], budget, bs_upa, uav_upa)
        for i in range(k)
    ])
    rate = float(np.mean(np.log2(1.0 + snr))) if k else 0.0
    return snr, rate
