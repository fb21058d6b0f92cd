"""End-to-end trial orchestration and the scheme comparison harness.

A trial initializes tracks from slot-0 ground truth (with a perfect initial
identity association), then per slot: point beams from predictions, advance
the fleet, simulate anonymous echo measurements, associate them to tracks
per the configured scheme, update each track's filter, and score link rates
with the mismatch rule (a wrongly associated beam earns zero rate).
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import assignment as asg
from . import identity, sensing, tracking
from .errors import ConfigError, NumericalFailureError, SingularGeometryError
from .fleet import FleetConfig, init_fleet, step_motion, true_geometry
from .sensing import SensingConfig
from .tracking import NoiseModel, TrackState
from .upa import Angles, LinkBudget, UpaConfig, link_snr, steering_vector

SCHEMES = ("dia", "classic-isac", "location-isac", "velocity-isac", "feedback")

FEEDBACK_GAIN = 1.0
"""Matched-filter gain of the single-pilot feedback scheme."""

_GAIN_FLOOR = 1e-12


@dataclass
class SimConfig:
    fleet: FleetConfig = field(default_factory=FleetConfig)
    sensing: SensingConfig = field(default_factory=SensingConfig)
    link: LinkBudget = field(default_factory=LinkBudget)
    bs_tx: UpaConfig = field(default_factory=lambda: UpaConfig(8, 8))
    bs_rx: UpaConfig = field(default_factory=lambda: UpaConfig(8, 8))
    uav: UpaConfig = field(default_factory=lambda: UpaConfig(8, 8))
    scheme: str = "dia"
    trials: int = 40
    master_seed: int = 0
    out_dir: str = "out"
    k_exact: int = asg.K_EXACT_DEFAULT
    gate_nis: float = 25.0   # association gate on normalized innovation squared

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.trials < 1:
            raise ConfigError("trial count must be >= 1")
        # keep the sensing model consistent with the array geometry
        self.sensing.nt = self.bs_tx.size
        self.sensing.nrb = self.bs_rx.size


@dataclass
class TrialResult:
    """Per-slot, per-UAV records of one trial (arrays of shape (horizon, K))."""

    scheme: str
    true_az: np.ndarray
    true_el: np.ndarray
    pred_az: np.ndarray
    pred_el: np.ndarray
    assigned_ok: np.ndarray
    snr_db: np.ndarray
    rate: np.ndarray
    meas_angle_sqerr: np.ndarray
    track_angle_sqerr: np.ndarray

    @property
    def horizon(self) -> int:
        return self.true_az.shape[0]

    @property
    def accuracy(self) -> float:
        if self.assigned_ok.size == 0:
            return 1.0   # vacuous trial
        return float(np.mean(self.assigned_ok))


@dataclass
class MetricsSummary:
    scheme: str
    trials: int
    accuracy_mean: float
    accuracy_std: float
    angle_rmse: list        # per-slot beam pointing RMSE, rad
    rate_series: list       # per-slot mean rate, bit/s/Hz
    mean_rate: float
    vacuous: bool = False


def _wrap(a):
    return (a + np.pi) % (2.0 * np.pi) - np.pi


def _direction(azimuth, elevation):
    return np.array([
        np.sin(elevation) * np.sin(azimuth),
        np.sin(elevation) * np.cos(azimuth),
        np.cos(elevation),
    ])


def _angular_sqerr(est: Angles, true: Angles) -> float:
    """Squared great-circle angle between two pointing directions.

    A per-component azimuth/elevation error is misleading near the zenith,
    where azimuth is ill-conditioned: a UAV passing overhead can flip the
    azimuth by ~pi while the beam barely moves.
    """
    cos = float(np.clip(
        _direction(est.azimuth, est.elevation)
        @ _direction(true.azimuth, true.elevation), -1.0, 1.0,
    ))
    return float(np.arccos(cos) ** 2)


class _TrialRunner:
    """Holds the per-trial mutable state shared across slots."""

    def __init__(self, cfg: SimConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.rng = rng
        self.p_b = np.zeros(3)
        self.truths = init_fleet(cfg.fleet, rng, self.p_b)
        k = cfg.fleet.k
        dt = cfg.fleet.dt_s
        # perfect initial association: tracks start at slot-0 ground truth
        self.tracks = [
            TrackState(u.d_id, np.concatenate([u.position, u.velocity]), tracking.initial_mse())
            for u in self.truths
        ]
        self.q_s = tracking.process_noise(cfg.fleet.sigma_p, cfg.fleet.sigma_v)
        # receive beams for the first slot: one-step extrapolation from slot 0
        self.pending_rx = [
            tracking.predict(t, dt, self.p_b).angles_one for t in self.tracks
        ]
        if cfg.scheme == "feedback":
            # last angles reported over the feedback channel (exact at init)
            self.fb_angles = [
                true_geometry(u, self.p_b, cfg.link.fc_hz)[3] for u in self.truths
            ]

    # -- scheme-specific association -------------------------------------

    def _associate(self, measurements, preds):
        """Map each track index to a measurement index."""
        cfg = self.cfg
        if cfg.scheme == "classic-isac":
            # greedy nearest predicted position, no bijection enforcement
            meas_pos = np.stack(
                [identity.position_from_measurement(m) for m in measurements]
            )
            choice = []
            for pr in preds:
                p = pr.x_one[:3] - self.p_b
                choice.append(int(np.argmin(np.linalg.norm(meas_pos - p, axis=1))))
            return choice
        predicted_fs = identity.predicted_feature_set(preds, self.p_b)
        measured_fs = identity.measured_feature_set(
            measurements, self.p_b, cfg.link.fc_hz
        )
        if cfg.scheme == "dia":
            sim = identity.similarity_matrix(
                measured_fs, predicted_fs,
                weights=identity.dispersion_weights(measured_fs),
            )
            result = asg.solve(1.0 / sim.s, self.rng, cfg.k_exact)
        elif cfg.scheme == "location-isac":
            result = asg.baseline_assignment(
                measured_fs, predicted_fs, "location", self.rng, cfg.k_exact
            )
        else:  # velocity-isac
            result = asg.baseline_assignment(
                measured_fs, predicted_fs, "velocity", self.rng, cfg.k_exact
            )
        track_to_meas = [0] * len(preds)
        for i, j in enumerate(result.perm):
            track_to_meas[j] = i
        return track_to_meas

    # -- one slot ---------------------------------------------------------

    def run_slot(self):
        cfg = self.cfg
        dt = cfg.fleet.dt_s
        k = cfg.fleet.k
        fc = cfg.link.fc_hz

        if cfg.scheme == "feedback":
            return self._run_slot_feedback()

        # 1. beams from predictions
        preds = [tracking.predict(t, dt, self.p_b) for t in self.tracks]
        tx_beams = [pr.angles_one for pr in preds]
        rx_beams = self.pending_rx
        self.pending_rx = [pr.angles_two for pr in preds]

        # 2. fleet advances
        self.truths = [
            step_motion(u, dt, cfg.fleet.sigma_p, cfg.fleet.sigma_v, self.rng)
            for u in self.truths
        ]
        geoms = [true_geometry(u, self.p_b, fc) for u in self.truths]

        # 3. anonymous measurements, noise driven by the strongest
        #    illuminating transmit beam
        tx_vecs = np.stack([steering_vector(a, cfg.bs_tx) for a in tx_beams])
        raw = []
        meas_sqerr = np.zeros(k)
        for idx, (d, tau, mu, ang) in enumerate(geoms):
            a_true = steering_vector(ang, cfg.bs_tx)
            gain = float(np.max(np.abs(tx_vecs @ a_true.conj()) ** 2))
            beta = sensing.reflection_coefficient(tau, cfg.sensing.xi)
            variances = sensing.noise_variances(
                cfg.link.power_w, beta, max(gain, _GAIN_FLOOR), cfg.sensing
            )
            m = sensing.simulate_measurement((tau, mu, ang.azimuth, ang.elevation),
                                             variances, self.rng)
            raw.append(m)
            meas_sqerr[idx] = _angular_sqerr(Angles(m.azimuth, m.elevation), ang)
        shuffle = self.rng.permutation(k)
        measurements = [raw[i] for i in shuffle]
        source_id = [self.truths[i].d_id for i in shuffle]

        # 4. association
        track_to_meas = self._associate(measurements, preds)
        assigned_ok = np.array(
            [source_id[track_to_meas[j]] == self.tracks[j].d_id for j in range(k)]
        )

        # 5. filter updates; implausible innovations (usually a wrong
        #    association) and numerical failures coast on the prediction.
        #    The classic scheme has no gate: it trusts every association
        #    and updates unconditionally, so wrong matches corrupt tracks.
        gated = cfg.scheme != "classic-isac"
        new_tracks = []
        for j, track in enumerate(self.tracks):
            meas = measurements[track_to_meas[j]]
            noise = NoiseModel(self.q_s, np.diag(meas.variances()))
            try:
                if gated:
                    nis = tracking.innovation_nis(
                        track, meas.vector(), noise, dt, self.p_b, fc
                    )
                    if nis > cfg.gate_nis:
                        raise NumericalFailureError("gated")
                new_tracks.append(
                    tracking.ekf_step(track, meas.vector(), noise, dt, self.p_b, fc)
                )
            except (NumericalFailureError, SingularGeometryError):
                new_tracks.append(
                    TrackState(track.d_id, preds[j].x_one,
                               tracking.predict_mse(track, dt, self.q_s))
                )
        self.tracks = new_tracks

        # 6. link scoring with the mismatch rule
        return self._score(tx_beams, rx_beams, assigned_ok, geoms, meas_sqerr)

    def _run_slot_feedback(self):
        """Feedback baseline: beams reuse the previous slot's reported angles."""
        cfg = self.cfg
        beams = list(self.fb_angles)
        self.truths = [
            step_motion(u, cfg.fleet.dt_s, cfg.fleet.sigma_p, cfg.fleet.sigma_v, self.rng)
            for u in self.truths
        ]
        geoms = [true_geometry(u, self.p_b, cfg.link.fc_hz) for u in self.truths]
        # single-pilot angle report for next slot (G = 1)
        var_az = cfg.sensing.a3**2 * cfg.sensing.sigma**2 / (FEEDBACK_GAIN * cfg.link.power_w)
        var_el = cfg.sensing.a4**2 * cfg.sensing.sigma**2 / (FEEDBACK_GAIN * cfg.link.power_w)
        self.fb_angles = [
            Angles(
                g[3].azimuth + self.rng.normal(0.0, math.sqrt(var_az)),
                g[3].elevation + self.rng.normal(0.0, math.sqrt(var_el)),
            )
            for g in geoms
        ]
        ok = np.ones(cfg.fleet.k, dtype=bool)  # D-ID rides on the feedback
        nan = np.full(cfg.fleet.k, np.nan)
        return self._score(beams, beams, ok, geoms, nan, track_sqerr=nan)

    def _score(self, tx_beams, rx_beams, assigned_ok, geoms, meas_sqerr, track_sqerr=None):
        cfg = self.cfg
        k = cfg.fleet.k
        snr_db = np.zeros(k)
        rate = np.zeros(k)
        true_az = np.zeros(k)
        true_el = np.zeros(k)
        pred_az = np.zeros(k)
        pred_el = np.zeros(k)
        if track_sqerr is None:
            track_sqerr = np.zeros(k)
            for j, track in enumerate(self.tracks):
                _, ang = tracking.angles_from_position(track.position() - self.p_b)
                track_sqerr[j] = _angular_sqerr(ang, geoms[j][3])
        for j in range(k):
            d, _, _, ang = geoms[j]
            snr = link_snr(ang, tx_beams[j], rx_beams[j], d, cfg.link, cfg.bs_tx, cfg.uav)
            snr_db[j] = 10.0 * np.log10(snr) if snr > 0 else -np.inf
            rate[j] = np.log2(1.0 + snr) if assigned_ok[j] else 0.0
            true_az[j], true_el[j] = ang.azimuth, ang.elevation
            pred_az[j], pred_el[j] = tx_beams[j].azimuth, tx_beams[j].elevation
        return dict(
            true_az=true_az, true_el=true_el, pred_az=pred_az, pred_el=pred_el,
            assigned_ok=assigned_ok, snr_db=snr_db, rate=rate,
            meas_angle_sqerr=meas_sqerr, track_angle_sqerr=track_sqerr,
        )


def run_trial(cfg: SimConfig, trial_seed) -> TrialResult:
    """Run one seeded trial over the configured horizon."""
    rng = np.random.default_rng(trial_seed)
    runner = _TrialRunner(cfg, rng)
    horizon = cfg.fleet.horizon
    k = cfg.fleet.k
    fields = ("true_az", "true_el", "pred_az", "pred_el", "assigned_ok",
              "snr_db", "rate", "meas_angle_sqerr", "track_angle_sqerr")
    out = {name: np.zeros((horizon, k)) for name in fields}
    out["assigned_ok"] = np.zeros((horizon, k), dtype=bool)
    for slot in range(horizon):
        rec = runner.run_slot()
        for name in fields:
            out[name][slot] = rec[name]
    return TrialResult(cfg.scheme, **out)


def trial_seed(master_seed: int, index: int):
    """Deterministic per-trial seed material."""
    return [master_seed, index]


def _trial_job(args):
    cfg, index = args
    return run_trial(cfg, trial_seed(cfg.master_seed, index))


def run_trials(cfg: SimConfig, workers: int = 1) -> list[TrialResult]:
    """All Monte-Carlo trials of one config, optionally on a process pool."""
    jobs = [(cfg, i) for i in range(cfg.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_trial_job, jobs))
    return [_trial_job(j) for j in jobs]


def summarize(results: list[TrialResult]) -> MetricsSummary:
    scheme = results[0].scheme
    acc = np.array([r.accuracy for r in results])
    vacuous = results[0].horizon == 0
    if vacuous:
        return MetricsSummary(scheme, len(results), 1.0, 0.0, [], [], 0.0, vacuous=True)
    beam_sqerr = np.stack([
        _wrap(r.pred_az - r.true_az) ** 2 + (r.pred_el - r.true_el) ** 2
        for r in results
    ])  # (trials, horizon, K)
    angle_rmse = np.sqrt(np.mean(beam_sqerr, axis=(0, 2)))
    rate_series = np.mean(np.stack([r.rate for r in results]), axis=(0, 2))
    return MetricsSummary(
        scheme=scheme,
        trials=len(results),
        accuracy_mean=float(acc.mean()),
        accuracy_std=float(acc.std()),
        angle_rmse=[float(v) for v in angle_rmse],
        rate_series=[float(v) for v in rate_series],
        mean_rate=float(rate_series.mean()),
    )


# ---------------------------------------------------------------------------
# Persistence

CSV_HEADER = ("trial", "slot", "uav", "true_az", "true_el", "pred_az",
              "pred_el", "assigned_ok", "snr_db", "rate_bps_hz")


def write_results_csv(path, results: list[TrialResult]):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for t, r in enumerate(results):
            for slot in range(r.horizon):
                for uav in range(r.true_az.shape[1]):
                    writer.writerow([
                        t, slot, uav,
                        repr(float(r.true_az[slot, uav])), repr(float(r.true_el[slot, uav])),
                        repr(float(r.pred_az[slot, uav])), repr(float(r.pred_el[slot, uav])),
                        int(r.assigned_ok[slot, uav]),
                        repr(float(r.snr_db[slot, uav])), repr(float(r.rate[slot, uav])),
                    ])


def summary_from_csv(path) -> dict:
    """Recompute the headline metrics from a stored results CSV."""
    ok, rates = [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            ok.append(int(row["assigned_ok"]))
            rates.append(float(row["rate_bps_hz"]))
    if not ok:
        return {"accuracy_mean": 1.0, "mean_rate": 0.0, "rows": 0}
    return {
        "accuracy_mean": float(np.mean(ok)),
        "mean_rate": float(np.mean(rates)),
        "rows": len(ok),
    }


def run_monte_carlo(cfg: SimConfig, workers: int = 1) -> MetricsSummary:
    """Run all trials, aggregate, and persist results + summary to out_dir."""
    results = run_trials(cfg, workers)
    summary = summarize(results)
    out = Path(cfg.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        write_results_csv(out / f"{cfg.scheme}_results.csv", results)
        with open(out / f"{cfg.scheme}_summary.json", "w") as fh:
            json.dump(asdict(summary), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"failed writing results under {out}: {exc}") from exc
    return summary


# ---------------------------------------------------------------------------
# Config file handling (flat JSON with nested sections)


def config_from_dict(data: dict) -> SimConfig:
    def section(name, cls, keymap):
        sub = data.get(name, {})
        unknown = set(sub) - set(keymap)
        if unknown:
            raise ConfigError(f"unknown keys in [{name}]: {sorted(unknown)}")
        return cls(**{keymap[k]: v for k, v in sub.items()})

    fleet = section("fleet", FleetConfig, {
        "k": "k", "radius_m": "radius_m", "v_min_mps": "v_min_mps",
        "v_max_mps": "v_max_mps", "h_dev_deg": "h_dev_deg", "v_dev_deg": "v_dev_deg",
        "dt_s": "dt_s", "horizon": "horizon", "sigma_p": "sigma_p", "sigma_v": "sigma_v",
    })
    sensing_cfg = section("sensing", SensingConfig, {
        "g": "g", "a1": "a1", "a2": "a2", "a3": "a3", "a4": "a4",
        "sigma": "sigma", "xi": "xi",
    })
    link = section("link", LinkBudget, {
        "power_w": "power_w", "fc_hz": "fc_hz", "alpha": "alpha", "sigma_r": "sigma_r",
    })
    arr = data.get("array", {})
    unknown = set(arr) - {"nt_x", "nt_y", "nrb_x", "nrb_y", "nru_x", "nru_y"}
    if unknown:
        raise ConfigError(f"unknown keys in [array]: {sorted(unknown)}")
    run = data.get("run", {})
    unknown = set(run) - {"scheme", "trials", "master_seed", "out_dir"}
    if unknown:
        raise ConfigError(f"unknown keys in [run]: {sorted(unknown)}")
    return SimConfig(
        fleet=fleet,
        sensing=sensing_cfg,
        link=link,
        bs_tx=UpaConfig(arr.get("nt_x", 8), arr.get("nt_y", 8)),
        bs_rx=UpaConfig(arr.get("nrb_x", 8), arr.get("nrb_y", 8)),
        uav=UpaConfig(arr.get("nru_x", 8), arr.get("nru_y", 8)),
        scheme=run.get("scheme", "dia"),
        trials=run.get("trials", 40),
        master_seed=run.get("master_seed", 0),
        out_dir=run.get("out_dir", "out"),
    )


def load_config(path) -> SimConfig:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return config_from_dict(data)
