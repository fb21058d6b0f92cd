"""Fleet initialization and ground-truth kinematics."""

import numpy as np
import pytest

from skybeam.errors import ConfigError, DomainError
from skybeam.fleet import FleetConfig, UavTruth, init_fleet, step_motion, true_geometry
from skybeam.upa import SPEED_OF_LIGHT


class TestFleetConfigValidation:
    def test_defaults_are_valid(self):
        cfg = FleetConfig()
        assert cfg.k == 10 and cfg.radius_m == 100.0 and cfg.dt_s == 0.02

    @pytest.mark.parametrize("kwargs", [
        dict(k=0),
        dict(v_min_mps=0.0),
        dict(v_min_mps=25.0, v_max_mps=20.0),
        dict(dt_s=0.0),
        dict(radius_m=-1.0),
    ])
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ConfigError):
            FleetConfig(**kwargs)


class TestInitFleet:
    def test_positions_on_hemisphere(self, rng):
        cfg = FleetConfig(k=50, radius_m=100.0)
        p_b = np.array([5.0, -3.0, 0.0])
        fleet = init_fleet(cfg, rng, p_b)
        assert len(fleet) == 50
        for u in fleet:
            assert np.linalg.norm(u.position - p_b) == pytest.approx(100.0)
            assert u.position[2] >= p_b[2]

    def test_speeds_within_bounds(self, rng):
        cfg = FleetConfig(k=100, v_min_mps=8.0, v_max_mps=20.0)
        for u in init_fleet(cfg, rng):
            assert 8.0 <= np.linalg.norm(u.velocity) <= 20.0

    def test_heading_deviation_bounded(self, rng):
        cfg = FleetConfig(k=100, h_dev_deg=10.0, v_dev_deg=10.0)
        for u in init_fleet(cfg, rng):
            to_bs = -u.position
            bearing = np.arctan2(to_bs[0], to_bs[1])
            heading = np.arctan2(u.velocity[0], u.velocity[1])
            dev = (heading - bearing + np.pi) % (2 * np.pi) - np.pi
            assert abs(dev) <= np.deg2rad(10.0) + 1e-9
            # vertical pitch bounded too
            h_speed = np.linalg.norm(u.velocity[:2])
            pitch = np.arctan2(u.velocity[2], h_speed)
            assert abs(pitch) <= np.deg2rad(10.0) + 1e-9

    def test_distinct_ids(self, rng):
        fleet = init_fleet(FleetConfig(k=20), rng)
        assert sorted(u.d_id for u in fleet) == list(range(20))

    def test_seeded_determinism(self):
        cfg = FleetConfig(k=5)
        a = init_fleet(cfg, np.random.default_rng(7))
        b = init_fleet(cfg, np.random.default_rng(7))
        for ua, ub in zip(a, b):
            assert np.array_equal(ua.position, ub.position)
            assert np.array_equal(ua.velocity, ub.velocity)


class TestStepMotion:
    def test_noise_free_step_is_linear(self, rng):
        u = UavTruth(0, np.array([10.0, 20.0, 30.0]), np.array([1.0, -2.0, 0.5]))
        u2 = step_motion(u, 0.1, 0.0, 0.0, rng)
        assert np.allclose(u2.position, u.position + 0.1 * u.velocity)
        assert np.array_equal(u2.velocity, u.velocity)
        assert u2.d_id == 0

    def test_ground_reflection(self, rng):
        u = UavTruth(1, np.array([0.0, 0.0, 0.05]), np.array([0.0, 0.0, -10.0]))
        u2 = step_motion(u, 0.1, 0.0, 0.0, rng)
        assert u2.position[2] == pytest.approx(0.95)
        assert u2.velocity[2] == pytest.approx(10.0)

    def test_negative_dt_rejected(self, rng):
        u = UavTruth(0, np.zeros(3) + 1.0, np.zeros(3))
        with pytest.raises(ConfigError):
            step_motion(u, -0.1, 0.0, 0.0, rng)

    def test_noise_statistics(self):
        rng = np.random.default_rng(0)
        u = UavTruth(0, np.array([0.0, 0.0, 50.0]), np.zeros(3))
        deltas = np.array([
            step_motion(u, 0.0, 0.5, 0.0, rng).position - u.position
            for _ in range(4000)
        ])
        assert np.std(deltas) == pytest.approx(0.5, rel=0.05)


class TestTrueGeometry:
    def test_delay_and_doppler_formulas(self):
        p_b = np.zeros(3)
        pos = np.array([30.0, 40.0, 0.0])
        vel = np.array([3.0, 4.0, 7.0])
        u = UavTruth(0, pos, vel)
        fc = 28e9
        d, tau, mu, ang = true_geometry(u, p_b, fc)
        assert d == pytest.approx(50.0)
        assert tau == pytest.approx(2 * 50.0 / SPEED_OF_LIGHT)
        # radial speed = v . p / d = (90+160)/50 = 5 m/s
        assert mu == pytest.approx(2 * 5.0 * fc / SPEED_OF_LIGHT)
        assert ang.azimuth == pytest.approx(np.arctan2(30.0, 40.0))
        assert ang.elevation == pytest.approx(np.pi / 2)

    def test_receding_target_positive_doppler_sign_convention(self):
        # velocity pointing away from the BS gives a positive radial speed
        u = UavTruth(0, np.array([0.0, 100.0, 0.0]), np.array([0.0, 10.0, 0.0]))
        _, _, mu, _ = true_geometry(u, np.zeros(3), 28e9)
        assert mu > 0

    def test_coincident_rejected(self):
        u = UavTruth(0, np.zeros(3), np.ones(3))
        with pytest.raises(DomainError):
            true_geometry(u, np.zeros(3), 28e9)
