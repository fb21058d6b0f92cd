"""Extended Kalman filtering for constant-velocity targets observed through
delay, Doppler and direction-of-arrival measurements.

State vector: x = [px, py, pz, vx, vy, vz] relative to a fixed frame with the
base station at `p_b`. Measurement vector: y = [tau, mu, az, el].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalFailureError, SingularGeometryError
from .upa import SPEED_OF_LIGHT, Angles, UpaConfig, _element_grids

_COND_LIMIT = 1e12
_ORIGIN = np.zeros(3)


@dataclass
class TrackState:
    """One target's filter state: label, 6-dim state and its MSE matrix."""

    d_id: object
    x: np.ndarray
    m: np.ndarray

    def position(self) -> np.ndarray:
        return self.x[:3]

    def velocity(self) -> np.ndarray:
        return self.x[3:]


@dataclass
class NoiseModel:
    """Process covariance Q_s (6x6) and measurement covariance Q_m (4x4)."""

    q_s: np.ndarray
    q_m: np.ndarray


@dataclass
class Prediction:
    """One- and two-step state extrapolations with their beam angles."""

    x_one: np.ndarray
    x_two: np.ndarray
    angles_one: Angles
    angles_two: Angles


def transition_matrix(dt: float) -> np.ndarray:
    g = np.eye(6)
    g[0, 3] = g[1, 4] = g[2, 5] = dt
    return g


def process_noise(sigma_p: float, sigma_v: float) -> np.ndarray:
    return np.diag([sigma_p**2] * 3 + [sigma_v**2] * 3)


def initial_mse() -> np.ndarray:
    """Default M0: 1 m position std, 1 m/s velocity std per axis."""
    return np.eye(6)


def angles_from_position(p: np.ndarray):
    """Range and (azimuth, elevation) of a position vector.

    Inverse of p = d*(sin(el)sin(az), sin(el)cos(az), cos(el)). At zenith
    (p[0] = p[1] = 0) azimuth tie-breaks to 0.
    """
    d = float(np.linalg.norm(p))
    if d == 0.0:
        raise DomainError("angles undefined at the origin")
    el = float(np.arccos(np.clip(p[2] / d, -1.0, 1.0)))
    az = float(np.arctan2(p[0], p[1])) if (p[0] != 0.0 or p[1] != 0.0) else 0.0
    return d, Angles(az, el)


def position_from_angles(d: float, angles: Angles) -> np.ndarray:
    """Forward spherical relations, the inverse of angles_from_position."""
    se = np.sin(angles.elevation)
    return d * np.array([
        se * np.sin(angles.azimuth),
        se * np.cos(angles.azimuth),
        np.cos(angles.elevation),
    ])


def measurement_function(x: np.ndarray, p_b: np.ndarray, fc: float) -> np.ndarray:
    """Noiseless measurement h(x) = [tau, mu, az, el]."""
    p = x[:3] - p_b
    v = x[3:]
    d, ang = angles_from_position(p)
    tau = 2.0 * d / SPEED_OF_LIGHT
    mu = 2.0 * float(v @ p) * fc / (SPEED_OF_LIGHT * d)
    return np.array([tau, mu, ang.azimuth, ang.elevation])


def jacobian(x: np.ndarray, p_b: np.ndarray, fc: float) -> np.ndarray:
    """Analytic 4x6 Jacobian of measurement_function at x.

    The delay row is [2 p_i / (c d), 0]; the Doppler row's velocity block is
    fc times that. At zenith the azimuth row is zeroed (no azimuth
    information there) and the elevation row keeps only its dp3 entry.
    """
    p = x[:3] - p_b
    v = x[3:]
    d2 = float(p @ p)
    if d2 == 0.0:
        raise SingularGeometryError("Jacobian undefined at zero range")
    d = np.sqrt(d2)
    rho2 = float(p[0] ** 2 + p[1] ** 2)
    rho = np.sqrt(rho2)

    h = np.zeros((4, 6))
    # tau row
    h[0, :3] = 2.0 * p / (SPEED_OF_LIGHT * d)
    # mu row: d(mu)/dp and d(mu)/dv
    pv = float(p @ v)
    h[1, :3] = 2.0 * fc * (v - p * pv / d2) / (SPEED_OF_LIGHT * d)
    h[1, 3:] = fc * h[0, :3]
    # azimuth row: az = atan2(p1, p2)
    if rho2 > 0.0:
        h[2, 0] = p[1] / rho2
        h[2, 1] = -p[0] / rho2
        # elevation row: el = arccos(p3/d)
        h[3, 0] = p[0] * p[2] / (d2 * rho)
        h[3, 1] = p[1] * p[2] / (d2 * rho)
        h[3, 2] = -rho / d2
    return h


def echo_response(
    theta: float,
    phi: float,
    theta_hat: float,
    phi_hat: float,
    beta: float,
    upa_tx: UpaConfig,
    upa_rx: UpaConfig,
) -> np.ndarray:
    """Compensated echo amplitude per receive element.

    eta = sqrt(Nt*Nrb) * beta * u(phi,theta) * a(phi,theta)^H a(phi_hat,theta_hat),
    where a is the transmit and u the receive steering vector.
    """
    ta, tb = _element_grids(upa_tx.nx, upa_tx.ny)
    ra, rb = _element_grids(upa_rx.nx, upa_rx.ny)
    g_tx = ta * np.cos(phi) + tb * np.sin(phi)
    g_hat = ta * np.cos(phi_hat) + tb * np.sin(phi_hat)
    g_rx = ra * np.cos(phi) + rb * np.sin(phi)
    inner = np.exp(1j * np.pi * (np.sin(theta_hat) * g_hat - np.sin(theta) * g_tx))
    return (
        beta / np.sqrt(upa_tx.size)
        * np.exp(1j * np.pi * np.sin(theta) * g_rx)
        * np.sum(inner)
    )


def partial_eta_theta(
    theta: float,
    phi: float,
    theta_hat: float,
    phi_hat: float,
    beta: float,
    upa_tx: UpaConfig,
    upa_rx: UpaConfig,
) -> np.ndarray:
    """Derivative of echo_response with respect to the true elevation theta.

    Entry r sums, over all transmit elements (i, j), the predicted-angle
    phase term times the log-derivative of the residual phase between
    receive element r and transmit element (i, j).
    """
    ta, tb = _element_grids(upa_tx.nx, upa_tx.ny)
    ra, rb = _element_grids(upa_rx.nx, upa_rx.ny)
    g_tx = ta * np.cos(phi) + tb * np.sin(phi)          # (Nt,)
    g_hat = ta * np.cos(phi_hat) + tb * np.sin(phi_hat)
    g_rx = ra * np.cos(phi) + rb * np.sin(phi)          # (Nrb,)

    # residual geometry factor per (receive, transmit) pair
    diff = g_rx[:, None] - g_tx[None, :]
    psi_hat = np.exp(1j * np.pi * np.sin(theta_hat) * g_hat)[None, :]
    phase = np.exp(1j * np.pi * np.sin(theta) * diff)
    chi = 1j * np.pi * np.cos(theta) * diff
    return beta / np.sqrt(upa_tx.size) * np.sum(psi_hat * phase * chi, axis=1)


def predict(state: TrackState, dt: float, p_b: np.ndarray = _ORIGIN) -> Prediction:
    """One- and two-step constant-velocity extrapolation with beam angles."""
    g = transition_matrix(dt)
    x_one = g @ state.x
    x_two = g @ x_one
    _, a_one = angles_from_position(x_one[:3] - p_b)
    _, a_two = angles_from_position(x_two[:3] - p_b)
    return Prediction(x_one, x_two, a_one, a_two)


def predict_mse(state: TrackState, dt: float, q_s: np.ndarray) -> np.ndarray:
    g = transition_matrix(dt)
    return g @ state.m @ g.T + q_s


def _wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    w = (a + np.pi) % (2.0 * np.pi) - np.pi
    return np.pi if w == -np.pi else w


def _innovation_scale(s: np.ndarray) -> np.ndarray:
    """Per-component stds of an innovation covariance, validated.

    A non-finite or non-positive diagonal means the covariance has been
    numerically destroyed (it can round below zero once the filter is very
    confident); the caller should coast rather than divide by it.
    """
    diag = np.diag(s)
    if not np.all(np.isfinite(s)) or np.any(diag <= 0.0):
        raise NumericalFailureError("innovation covariance has an invalid diagonal")
    return np.sqrt(diag)


def innovation_nis(
    state: TrackState,
    y: np.ndarray,
    noise: NoiseModel,
    dt: float,
    p_b: np.ndarray = _ORIGIN,
    fc: float = 28e9,
) -> float:
    """Normalized innovation squared of a candidate measurement.

    Chi-square distributed with 4 degrees of freedom when the measurement
    belongs to this track; far larger for a wrongly associated one, which
    makes it a usable association gate.
    """
    g = transition_matrix(dt)
    x_pred = g @ state.x
    m_pred = g @ state.m @ g.T + noise.q_s
    h = jacobian(x_pred, p_b, fc)
    s = noise.q_m + h @ m_pred @ h.T
    scale = _innovation_scale(s)
    innov = np.asarray(y, dtype=float) - measurement_function(x_pred, p_b, fc)
    innov[2] = _wrap_angle(innov[2])
    innov[3] = _wrap_angle(innov[3])
    z = innov / scale
    try:
        return float(z @ np.linalg.solve(s / np.outer(scale, scale), z))
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"innovation covariance is singular: {exc}") from exc


def ekf_step(
    state: TrackState,
    y: np.ndarray,
    noise: NoiseModel,
    dt: float,
    p_b: np.ndarray = _ORIGIN,
    fc: float = 28e9,
) -> TrackState:
    """One prediction + update cycle of the extended Kalman filter.

    `y` is the measurement vector [tau, mu, az, el]; noise.q_m must hold its
    variances on the diagonal. Angle innovations are wrapped to (-pi, pi].
    Raises NumericalFailureError when the innovation covariance is too
    ill-conditioned; the caller may then coast on the prediction.
    """
    g = transition_matrix(dt)
    x_pred = g @ state.x
    m_pred = g @ state.m @ g.T + noise.q_s

    h = jacobian(x_pred, p_b, fc)
    s = noise.q_m + h @ m_pred @ h.T
    # the measurement mixes units (s, Hz, rad), so test conditioning on the
    # diagonally rescaled matrix; the raw condition number is scale-dominated
    scale = _innovation_scale(s)
    s_norm = s / np.outer(scale, scale)
    if np.linalg.cond(s_norm) > _COND_LIMIT:
        raise NumericalFailureError("innovation covariance is near-singular")
    s_inv = np.linalg.inv(s_norm) / np.outer(scale, scale)

    gain = m_pred @ h.T @ s_inv
    innov = np.asarray(y, dtype=float) - measurement_function(x_pred, p_b, fc)
    innov[2] = _wrap_angle(innov[2])
    innov[3] = _wrap_angle(innov[3])

    x_new = x_pred + gain @ innov
    # Joseph form: stays positive semidefinite even with tiny or zero
    # measurement noise, unlike the short form (I - KH) M.
    ikh = np.eye(6) - gain @ h
    m_new = ikh @ m_pred @ ikh.T + gain @ noise.q_m @ gain.T
    m_new = 0.5 * (m_new + m_new.T)
    return TrackState(state.d_id, x_new, m_new)
