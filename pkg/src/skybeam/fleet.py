"""Fleet generation and ground-truth kinematics.

UAVs start on a hemisphere around the base station, heading roughly toward
it, and then fly constant-velocity trajectories perturbed by white process
noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .tracking import angles_from_position
from .upa import SPEED_OF_LIGHT


@dataclass
class UavTruth:
    """Ground-truth kinematic state of one UAV."""

    d_id: int
    position: np.ndarray
    velocity: np.ndarray


@dataclass
class FleetConfig:
    k: int = 10
    radius_m: float = 100.0
    v_min_mps: float = 8.0
    v_max_mps: float = 20.0
    h_dev_deg: float = 10.0   # horizontal heading deviation about the BS bearing
    v_dev_deg: float = 10.0   # vertical pitch deviation about horizontal
    dt_s: float = 0.02
    horizon: int = 500
    sigma_p: float = 0.02     # per-axis position process noise std, m
    sigma_v: float = 0.2      # per-axis velocity process noise std, m/s

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"fleet size must be >= 1, got {self.k}")
        if not (0.0 < self.v_min_mps <= self.v_max_mps):
            raise ConfigError(
                f"need 0 < v_min <= v_max, got [{self.v_min_mps}, {self.v_max_mps}]"
            )
        if self.dt_s <= 0:
            raise ConfigError("slot duration must be positive")
        if self.radius_m <= 0:
            raise ConfigError("hemisphere radius must be positive")


def init_fleet(cfg: FleetConfig, rng: np.random.Generator, p_b=None) -> list[UavTruth]:
    """Draw K UAVs uniformly on the hemisphere of radius `radius_m` over `p_b`.

    Each heading points at the BS azimuth, perturbed horizontally within
    +/- h_dev_deg; the vertical pitch is drawn within +/- v_dev_deg and
    applied after the horizontal deviation. Speeds are uniform in
    [v_min, v_max].
    """
    p_b = np.zeros(3) if p_b is None else np.asarray(p_b, dtype=float)
    h_dev = np.deg2rad(cfg.h_dev_deg)
    v_dev = np.deg2rad(cfg.v_dev_deg)
    fleet = []
    for d_id in range(cfg.k):
        az = rng.uniform(-np.pi, np.pi)
        cos_pol = rng.uniform(0.0, 1.0)   # uniform-area hemisphere sampling
        sin_pol = np.sqrt(1.0 - cos_pol**2)
        offset = cfg.radius_m * np.array(
            [sin_pol * np.sin(az), sin_pol * np.cos(az), cos_pol]
        )
        position = p_b + offset

        # horizontal bearing from UAV toward the BS, ground-plane projection
        to_bs = p_b - position
        bearing = np.arctan2(to_bs[0], to_bs[1]) if (to_bs[0] != 0 or to_bs[1] != 0) else 0.0
        heading = bearing + rng.uniform(-h_dev, h_dev)
        pitch = rng.uniform(-v_dev, v_dev)
        speed = rng.uniform(cfg.v_min_mps, cfg.v_max_mps)
        velocity = speed * np.array([
            np.cos(pitch) * np.sin(heading),
            np.cos(pitch) * np.cos(heading),
            np.sin(pitch),
        ])
        fleet.append(UavTruth(d_id, position, velocity))
    return fleet


def step_motion(
    state: UavTruth,
    dt: float,
    sigma_p: float,
    sigma_v: float,
    rng: np.random.Generator,
) -> UavTruth:
    """Advance one slot of the constant-velocity model with white noise.

    UAVs that would cross below ground are reflected: z <- |z|, vz <- -vz.
    """
    if dt < 0:
        raise ConfigError("dt must be non-negative")
    position = state.position + dt * state.velocity + rng.normal(0.0, sigma_p, 3)
    velocity = state.velocity + rng.normal(0.0, sigma_v, 3)
    if position[2] < 0:
        position = position.copy()
        velocity = velocity.copy()
        position[2] = -position[2]
        velocity[2] = -velocity[2]
    return UavTruth(state.d_id, position, velocity)


def true_geometry(state: UavTruth, p_b: np.ndarray, fc: float):
    """Noiseless echo observables (d, tau, mu, angles) of a UAV.

    tau = 2d/c; mu = 2 v.(p - p_b) fc / (c d); angles per the shared
    spherical convention.
    """
    rel = state.position - np.asarray(p_b, dtype=float)
    d = float(np.linalg.norm(rel))
    if d == 0.0:
        raise DomainError("UAV coincides with the base station")
    _, angles = angles_from_position(rel)
    tau = 2.0 * d / SPEED_OF_LIGHT
    mu = 2.0 * float(state.velocity @ rel) * fc / (SPEED_OF_LIGHT * d)
    return d, tau, mu, angles
