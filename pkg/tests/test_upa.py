"""Steering vectors, beam gains, channel coefficient, SNR and rate."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from skybeam.errors import ConfigError, DimensionMismatchError, DomainError
from skybeam.upa import (
    SPEED_OF_LIGHT,
    Angles,
    LinkBudget,
    UpaConfig,
    array_gain,
    channel_coefficient,
    link_snr,
    receive_snr_and_rate,
    steering_matrix,
    steering_vector,
)

angles_st = st.builds(
    Angles,
    st.floats(-np.pi, np.pi, allow_nan=False),
    st.floats(0.0, np.pi / 2, allow_nan=False),
)
upa_st = st.builds(UpaConfig, st.integers(1, 12), st.integers(1, 12))


class TestUpaConfig:
    def test_size(self):
        assert UpaConfig(8, 8).size == 64
        assert UpaConfig(3, 5).size == 15

    @pytest.mark.parametrize("nx,ny", [(0, 4), (4, 0), (-1, 2)])
    def test_rejects_nonpositive_counts(self, nx, ny):
        with pytest.raises(ConfigError):
            UpaConfig(nx, ny)


class TestSteeringVector:
    def test_phase_matches_elementwise_definition(self):
        upa = UpaConfig(4, 3)
        ang = Angles(0.7, 1.1)
        v = steering_vector(ang, upa)
        n = upa.size
        idx = 0
        for na in range(upa.nx):
            for nb in range(upa.ny):
                phase = np.pi * np.sin(ang.elevation) * (
                    na * np.cos(ang.azimuth) + nb * np.sin(ang.azimuth)
                )
                assert v[idx] == pytest.approx(np.exp(1j * phase) / np.sqrt(n))
                idx += 1

    @given(angles_st, upa_st)
    def test_unit_norm(self, ang, upa):
        v = steering_vector(ang, upa)
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)

    def test_boresight_is_uniform(self):
        # elevation 0 gives zero phase everywhere
        v = steering_vector(Angles(0.3, 0.0), UpaConfig(4, 4))
        assert np.allclose(v, 1.0 / 4.0)

    def test_matrix_stacks_vectors(self):
        upa = UpaConfig(2, 2)
        angs = [Angles(0.1, 0.2), Angles(-0.5, 1.0)]
        m = steering_matrix(angs, upa)
        assert m.shape == (2, 4)
        assert np.allclose(m[1], steering_vector(angs[1], upa))
        assert steering_matrix([], upa).shape == (0, 4)


class TestArrayGain:
    def test_aligned_gain_is_one(self):
        v = steering_vector(Angles(0.4, 0.9), UpaConfig(8, 8))
        assert array_gain(v, v) == pytest.approx(1.0)

    @given(angles_st, angles_st)
    def test_gain_bounded_by_one(self, a1, a2):
        upa = UpaConfig(6, 6)
        g = array_gain(steering_vector(a1, upa), steering_vector(a2, upa))
        assert 0.0 <= g <= 1.0 + 1e-12

    def test_shape_mismatch_rejected(self):
        with pytest.raises(DimensionMismatchError):
            array_gain(np.ones(4), np.ones(9))


class TestChannelCoefficient:
    def test_magnitude_and_phase(self):
        budget = LinkBudget(power_w=4.0, fc_hz=28e9, alpha=2.0)
        d = 50.0
        c = channel_coefficient(d, budget, 64, 64)
        assert abs(c) == pytest.approx(np.sqrt(64 * 64 * 4.0) * 2.0 / 50.0)
        expected_phase = (2 * np.pi * 28e9 * d / SPEED_OF_LIGHT) % (2 * np.pi)
        assert np.angle(c) % (2 * np.pi) == pytest.approx(expected_phase, abs=1e-9)

    def test_rejects_nonpositive_distance(self):
        with pytest.raises(DomainError):
            channel_coefficient(0.0, LinkBudget(), 64, 64)


class TestLinkSnr:
    def test_perfect_pointing_value(self):
        budget = LinkBudget(power_w=2.0, sigma_r=1.0)
        ang = Angles(0.3, 0.8)
        d = 80.0
        bs = UpaConfig(8, 8)
        uav = UpaConfig(4, 4)
        snr = link_snr(ang, ang, ang, d, budget, bs, uav)
        # |g| = |coeff| when both beams are perfectly aligned
        expected = budget.power_w * abs(channel_coefficient(d, budget, 64, 16)) ** 2
        assert snr == pytest.approx(expected)

    def test_misalignment_never_beats_alignment(self, rng):
        budget = LinkBudget()
        bs = uav = UpaConfig(8, 8)
        ang = Angles(0.5, 1.0)
        best = link_snr(ang, ang, ang, 60.0, budget, bs, uav)
        for _ in range(50):
            off = Angles(ang.azimuth + rng.normal(0, 0.05),
                         ang.elevation + rng.normal(0, 0.05))
            assert link_snr(ang, off, ang, 60.0, budget, bs, uav) <= best + 1e-9


class TestReceiveSnrAndRate:
    def test_rate_is_mean_log2(self):
        budget = LinkBudget()
        bs = uav = UpaConfig(4, 4)
        angs = [Angles(0.1, 0.5), Angles(-0.9, 1.2)]
        snr, rate = receive_snr_and_rate(angs, angs, angs, [50.0, 90.0], budget, bs, uav)
        assert rate == pytest.approx(float(np.mean(np.log2(1 + snr))))

    def test_length_mismatch_rejected(self):
        with pytest.raises(DimensionMismatchError):
            receive_snr_and_rate([Angles(0, 1)], [], [], [10.0],
                                 LinkBudget(), UpaConfig(2, 2), UpaConfig(2, 2))

    def test_empty_fleet_rate_zero(self):
        snr, rate = receive_snr_and_rate([], [], [], [],
                                         LinkBudget(), UpaConfig(2, 2), UpaConfig(2, 2))
        assert snr.size == 0 and rate == 0.0


class TestLinkBudgetValidation:
    @pytest.mark.parametrize("field,value", [
        ("power_w", 0.0), ("fc_hz", -1.0), ("alpha", 0.0), ("sigma_r", 0.0),
    ])
    def test_rejects_nonpositive(self, field, value):
        with pytest.raises(ConfigError):
            LinkBudget(**{field: value})
