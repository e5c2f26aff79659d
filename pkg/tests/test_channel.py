import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wiretapbc import (
    MISOME,
    SADBC,
    SAMBC,
    SGMBC,
    ChannelInstance,
    DomainError,
    InputConstraint,
    InvalidInputError,
    MisomeChannel,
    aligned_from_general,
    classify,
    sdpc_rates,
    to_misome,
)
from wiretapbc.channel import whiten_eavesdropper

from conftest import random_feasible_split, random_pd


def aligned(N1, N2, N3, S=None):
    t = np.atleast_2d(N3).shape[0]
    return ChannelInstance.aligned([N1, N2], N3, InputConstraint.covariance(np.eye(t) if S is None else S))


class TestClassify:
    def test_scalar_multiple_ordering_is_degraded(self):
        I = np.eye(2)
        c = classify(aligned(I, 1.5 * I, 2 * I))
        assert c.tag == SADBC
        assert c.degradation_order_ok

    def test_crossing_noises_are_aligned_only(self):
        c = classify(aligned(np.diag([1.0, 2.0]), np.diag([2.0, 1.0]), 3 * np.eye(2)))
        assert c.tag == SAMBC
        assert not c.degradation_order_ok

    def test_single_antenna_receivers(self, rng):
        ch = ChannelInstance.two_user(
            rng.standard_normal((1, 3)), rng.standard_normal((1, 3)), rng.standard_normal((2, 3)),
            1.0, 1.0, np.eye(2), InputConstraint.power(10.0),
        )
        assert classify(ch).tag == MISOME

    def test_general(self, rng):
        H = [rng.standard_normal((2, 2)) for _ in range(3)]
        ch = ChannelInstance.two_user(*H, np.eye(2), np.eye(2), np.eye(2), InputConstraint.covariance(np.eye(2)))
        assert classify(ch).tag == SGMBC

    def test_stable_under_tiny_symmetric_noise(self, rng):
        I = np.eye(2)
        E = rng.standard_normal((2, 2)) * 1e-13
        ch = aligned(I + E + E.T, 1.5 * I, 2 * I)
        assert classify(ch) == classify(aligned(I, 1.5 * I, 2 * I))

    def test_degraded_implies_orderings(self, rng):
        N1 = random_pd(rng, 3)
        N2 = N1 + np.eye(3)
        N3 = N2 + np.eye(3)
        c = classify(aligned(N1, N2, N3))
        assert c.tag == SADBC and c.degradation_order_ok


class TestConstruction:
    def test_noise_must_be_pd(self):
        with pytest.raises(DomainError, match="N2"):
            aligned(np.eye(2), np.diag([1.0, 0.0]), 2 * np.eye(2))

    def test_column_mismatch(self):
        with pytest.raises(InvalidInputError, match="H2"):
            ChannelInstance.two_user(np.eye(2), np.ones((2, 3)), np.eye(2), np.eye(2), np.eye(2), np.eye(2),
                                     InputConstraint.power(1.0))

    def test_noise_shape_mismatch(self):
        with pytest.raises(InvalidInputError, match="N1"):
            ChannelInstance.two_user(np.eye(2), np.eye(2), np.eye(2), np.eye(3), np.eye(2), np.eye(2),
                                     InputConstraint.power(1.0))

    @pytest.mark.parametrize("bad", [0.0, -1.0, np.inf, None])
    def test_power_must_be_positive(self, bad):
        with pytest.raises(InvalidInputError):
            InputConstraint.power(bad)

    def test_covariance_must_be_psd(self):
        with pytest.raises(InvalidInputError):
            InputConstraint.covariance(np.diag([1.0, -1.0]))

    def test_constraint_size_checked(self):
        with pytest.raises(InvalidInputError, match="S"):
            aligned(np.eye(2), np.eye(2), np.eye(2), S=np.eye(3))


class TestAlignedFromGeneral:
    def test_aligned_returned_unchanged(self):
        ch = aligned(np.eye(2), 2 * np.eye(2), 3 * np.eye(2))
        assert aligned_from_general(ch) is ch

    def test_scalar_eavesdropper(self):
        ch = ChannelInstance.two_user(1.0, 1.0, 2.0, 1.0, 1.5, 4.0, InputConstraint.covariance(1.0))
        assert aligned_from_general(ch).N3[0, 0] == pytest.approx(1.0)

    def test_singular_gain_named(self):
        ch = ChannelInstance.two_user(np.eye(2), np.ones((2, 2)), np.eye(2), np.eye(2), np.eye(2), np.eye(2),
                                      InputConstraint.covariance(np.eye(2)))
        with pytest.raises(DomainError, match="H2"):
            aligned_from_general(ch)

    @given(st.integers(0, 2**32 - 1))
    def test_rates_preserved_for_both_orders(self, seed):
        rng = np.random.default_rng(seed)
        H = [rng.standard_normal((2, 2)) + 2 * np.eye(2) for _ in range(3)]
        ch = ChannelInstance.two_user(*H, random_pd(rng, 2), random_pd(rng, 2), random_pd(rng, 2),
                                      InputConstraint.covariance(random_pd(rng, 2, 1.0)))
        al = aligned_from_general(ch)
        split = random_feasible_split(rng, ch)
        for perm in ((1, 2), (2, 1)):
            np.testing.assert_allclose(sdpc_rates(perm, split, ch), sdpc_rates(perm, split, al), atol=1e-9)


class TestMisome:
    def test_normalization_records_scaling(self):
        ch = ChannelInstance.two_user([[1.0, 2.0]], [[0.5, 0.0]], [[1.0, 1.0]], 4.0, 0.25, 9.0,
                                      InputConstraint.power(2.0))
        mc = to_misome(ch)
        np.testing.assert_allclose(mc.noise_scaling, (0.5, 2.0))
        np.testing.assert_allclose(mc.h1, [0.5, 1.0])
        np.testing.assert_allclose(mc.h2, [1.0, 0.0])
        np.testing.assert_allclose(mc.H3, [[1 / 3, 1 / 3]])

    def test_round_trip_rates(self, rng):
        mc = MisomeChannel((rng.standard_normal(3), rng.standard_normal(3)), rng.standard_normal((2, 3)), 5.0)
        ch = mc.to_channel()
        again = to_misome(ch)
        np.testing.assert_allclose(again.h1, mc.h1)
        np.testing.assert_allclose(again.H3, mc.H3)
        assert again.P == 5.0

    def test_requires_power_constraint(self):
        ch = ChannelInstance.two_user([[1.0, 0.0]], [[0.0, 1.0]], np.eye(2), 1.0, 1.0, np.eye(2),
                                      InputConstraint.covariance(np.eye(2)))
        with pytest.raises(InvalidInputError):
            to_misome(ch)

    def test_zero_gain_rejected(self):
        with pytest.raises(InvalidInputError, match="h2"):
            MisomeChannel(([1.0, 0.0], [0.0, 0.0]), np.eye(2), 1.0)


def test_whitening_makes_eavesdropper_noise_identity(rng):
    ch = aligned(np.eye(2), 2 * np.eye(2), random_pd(rng, 2, 1.0))
    w = whiten_eavesdropper(ch)
    np.testing.assert_allclose(w.N3, np.eye(2))
    split = random_feasible_split(rng, ch)
    np.testing.assert_allclose(sdpc_rates((1, 2), split, ch), sdpc_rates((1, 2), split, w), atol=1e-10)
