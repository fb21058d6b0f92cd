"""Physical-identity generation: feature extraction, prevalence-driven
weights, and the weighted harmonic-mean similarity matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateFeatureError
from .sensing import Measurement
from .tracking import Prediction, position_from_angles
from .upa import SPEED_OF_LIGHT, Angles

SIMILARITY_FLOOR = 1e-9


@dataclass
class FeatureSet:
    """M features for K targets; features[m] has shape (K, dim_m)."""

    features: list

    @property
    def k(self) -> int:
        return self.features[0].shape[0]

    @property
    def m(self) -> int:
        return len(self.features)

    def target(self, k: int, m: int) -> np.ndarray:
        return self.features[m][k]

    def select(self, m: int) -> "FeatureSet":
        return FeatureSet([self.features[m]])


@dataclass
class SimilarityMatrix:
    s: np.ndarray        # (K, K), entries in (0, 1]
    weights: np.ndarray  # (M,), non-negative, sums to 1


def feature_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity rescaled to (0, 1]: (1 + cos(a, b)) / 2.

    Clamped below at SIMILARITY_FLOOR so downstream reciprocals stay finite.
    """
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise DegenerateFeatureError("cosine similarity undefined for a zero vector")
    c = float(a @ b) / (na * nb)
    return float(np.clip((1.0 + c) / 2.0, SIMILARITY_FLOOR, 1.0))


def _pairwise_similarity(fa: np.ndarray, fb: np.ndarray) -> np.ndarray:
    """Rescaled cosine between every row of fa and every row of fb."""
    na = np.linalg.norm(fa, axis=1)
    nb = np.linalg.norm(fb, axis=1)
    if np.any(na == 0.0) or np.any(nb == 0.0):
        raise DegenerateFeatureError("cosine similarity undefined for a zero vector")
    c = (fa @ fb.T) / np.outer(na, nb)
    return np.clip((1.0 + c) / 2.0, SIMILARITY_FLOOR, 1.0)


def distinguishability(k: int, m: int, features: FeatureSet) -> float:
    """How separable target k's m-th feature is within the fleet.

    Sum over rivals j of C(k, j) times the product over the remaining
    targets q of (1 - C(k, q)); the empty product (K = 2) is 1.
    """
    if features.k < 2:
        raise ConfigError("distinguishability needs at least two targets")
    f = features.features[m]
    c = _pairwise_similarity(f[k : k + 1], f)[0]  # C(k, q) for all q
    total = 0.0
    for j in range(features.k):
        if j == k:
            continue
        prod = 1.0
        for q in range(features.k):
            if q != j and q != k:
                prod *= 1.0 - c[q]
        total += c[j] * prod
    return total


def feature_weights(features: FeatureSet) -> np.ndarray:
    """Normalized per-feature weights, averaged distinguishability over targets.

    Falls back to uniform weights when every raw weight is zero.
    """
    raw = np.array([
        np.mean([distinguishability(k, m, features) for k in range(features.k)])
        for m in range(features.m)
    ])
    total = raw.sum()
    if total <= 0.0:
        return np.full(features.m, 1.0 / features.m)
    return raw / total


def dispersion_weights(features: FeatureSet) -> np.ndarray:
    """Prevalence weights from mean pairwise dissimilarity, normalized.

    Alternative to feature_weights for fleets larger than a handful of
    targets: the product inside distinguishability vanishes once any two
    targets share a similar feature value, which with K >= 10 collapses
    the weight vector to winner-take-all even when the losing feature
    still separates the critical pairs. Averaging (1 - C) over unordered
    pairs keeps the same ordering (spread features weigh more, identical
    features weigh nothing) but degrades gracefully with fleet size.
    """
    if features.k < 2:
        raise ConfigError("dispersion weights need at least two targets")
    raw = np.empty(features.m)
    iu = np.triu_indices(features.k, k=1)
    for m in range(features.m):
        c = _pairwise_similarity(features.features[m], features.features[m])
        raw[m] = np.mean(1.0 - c[iu])
    total = raw.sum()
    if total <= 0.0:
        return np.full(features.m, 1.0 / features.m)
    return raw / total


def similarity_matrix(
    measured: FeatureSet,
    predicted: FeatureSet,
    weights: np.ndarray | None = None,
) -> SimilarityMatrix:
    """Weighted harmonic mean of per-feature similarities, measured x predicted.

    Weights default to the prevalence weights of the measured set; an
    explicit `weights` overrides them (used by the single-feature baselines).
    """
    if measured.m != predicted.m or measured.k != predicted.k:
        raise ConfigError("feature sets must agree in K and M")
    if weights is None:
        weights = feature_weights(measured)
    weights = np.asarray(weights, dtype=float)
    inv = np.zeros((measured.k, predicted.k))
    for m in range(measured.m):
        c = _pairwise_similarity(measured.features[m], predicted.features[m])
        inv += weights[m] / c
    return SimilarityMatrix(1.0 / inv, weights)


# ---------------------------------------------------------------------------
# Feature construction from tracks and raw measurements


RADIAL_SPEED_SCALE = 15.0
"""Default full-scale radial speed for the velocity embedding, m/s.

A single Doppler fixes only the speed along the line of sight, so the
velocity feature is the radial speed embedded on the unit circle:
v_r -> (cos g, sin g) with g = (pi/2) * v_r / scale. The cosine of two
embedded speeds is then cos of their angular difference — exactly 1
when the radial speeds agree, decreasing uniformly in |difference|,
and 0 for full-scale opposite speeds. The linear map keeps the
sensitivity per m/s constant across the speed range, which a raw
scalar (or a scalar-plus-constant pair) cannot do. The scale is a
fixed constant rather than the fleet's speed bound on purpose: tying
it to a small bound amplifies Doppler noise into spurious contrast,
while a fixed scale simply mutes the feature when the fleet's radial
speeds cluster."""


def _augment_rows(rows: np.ndarray) -> np.ndarray:
    """Append each row's norm, centered on the set mean, as an extra component.

    Centering keeps the magnitude channel zero-mean: a raw norm (~100 m for
    positions) would dominate every inner product and compress all cosines
    toward 1, which starves the prevalence weights of contrast.
    """
    norms = np.linalg.norm(rows, axis=1)
    return np.column_stack([rows, norms - norms.mean()])


def position_from_measurement(meas: Measurement) -> np.ndarray:
    """BS-relative position implied by (tau, az, el)."""
    d = meas.tau * SPEED_OF_LIGHT / 2.0
    return position_from_angles(d, Angles(meas.azimuth, meas.elevation))


def radial_speed_rows(v_r: np.ndarray, scale: float = RADIAL_SPEED_SCALE) -> np.ndarray:
    """Embed radial speeds on the unit circle (see RADIAL_SPEED_SCALE).

    Speeds beyond the full scale saturate at +-90 degrees, so the angular
    difference of two embedded speeds never exceeds 180 degrees and the
    cosine stays monotone in the speed difference.
    """
    if scale <= 0.0:
        raise ConfigError("radial-speed scale must be positive")
    gamma = 0.5 * np.pi * np.clip(np.asarray(v_r, dtype=float) / scale, -1.0, 1.0)
    return np.column_stack([np.cos(gamma), np.sin(gamma)])


def predicted_feature_set(
    predictions: list[Prediction],
    p_b: np.ndarray,
    speed_scale: float = RADIAL_SPEED_SCALE,
) -> FeatureSet:
    """Position and velocity features from one-step track predictions."""
    pos = np.stack([pr.x_one[:3] - p_b for pr in predictions])
    radial = []
    for pr in predictions:
        p = pr.x_one[:3] - p_b
        radial.append(float(pr.x_one[3:] @ p) / np.linalg.norm(p))
    return FeatureSet([_augment_rows(pos), radial_speed_rows(np.array(radial), speed_scale)])


def measured_feature_set(
    measurements: list[Measurement],
    p_b: np.ndarray,
    fc: float,
    speed_scale: float = RADIAL_SPEED_SCALE,
) -> FeatureSet:
    """Position and velocity features from one slot's anonymous measurements.

    The velocity estimate is the embedded Doppler-implied radial speed;
    the transverse component the echo cannot see is never fabricated
    from position proximity, so the velocity-only baseline cannot
    smuggle in position information.
    """
    pos_rows, radial = [], []
    for meas in measurements:
        pos_rows.append(position_from_measurement(meas))
        radial.append(meas.mu * SPEED_OF_LIGHT / (2.0 * fc))
    return FeatureSet([
        _augment_rows(np.stack(pos_rows)),
        radial_speed_rows(np.array(radial), speed_scale),
    ])
