import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arss.exceptions import ConfigError
from arss.shrinkage import ShrinkageParams, gst_matrix, gst_scalar, tau_threshold


def objective(y, c, p, lam):
    return lam * abs(y) ** p + 0.5 * (y - c) ** 2


def grid_minimum(c, p, lam, half_width=11.0, points=100_001):
    y = np.linspace(-half_width, half_width, points)
    return float(np.min(lam * np.abs(y) ** p + 0.5 * (y - c) ** 2))


class TestTauThreshold:
    def test_zero_penalty_gives_zero(self):
        for p in (0.2, 0.5, 1.0):
            assert tau_threshold(p, 0.0) == 0.0

    def test_half_exponent_unit_penalty(self):
        # [2*1*0.5]^(1/1.5) + 0.5*[2*1*0.5]^(-0.5/1.5) = 1 + 0.5
        assert tau_threshold(0.5, 1.0) == pytest.approx(1.5, abs=1e-12)

    def test_p_one_is_soft_threshold_kink(self):
        assert tau_threshold(1.0, 0.7) == pytest.approx(0.7, abs=1e-15)
        # below the kink the grid minimizer is zero
        assert objective(0.0, 0.69, 1.0, 0.7) <= grid_minimum(0.69, 1.0, 0.7) + 1e-9

    def test_gate_matches_grid_below_threshold(self):
        # just below tau(0.5, 1) = 1.5 the global minimizer is exactly 0
        assert objective(0.0, 1.49, 0.5, 1.0) <= grid_minimum(1.49, 0.5, 1.0) + 1e-9

    def test_domain_errors(self):
        with pytest.raises(ConfigError):
            tau_threshold(0.0, 1.0)
        with pytest.raises(ConfigError):
            tau_threshold(0.5, -1.0)


class TestGstScalar:
    def test_zero_input(self):
        assert gst_scalar(0.0, ShrinkageParams(p=0.5, lam=1.0)) == 0.0

    def test_soft_threshold_case(self):
        assert gst_scalar(3.0, ShrinkageParams(p=1.0, lam=1.0)) == pytest.approx(2.0, abs=1e-12)

    def test_below_gate_shrinks_to_zero(self):
        assert gst_scalar(1.3, ShrinkageParams(p=0.5, lam=1.0)) == 0.0

    def test_large_branch_root(self):
        # root of S - 2 + 0.5*S^(-1/2) = 0, frozen from an independent
        # bracketing root finder
        got = gst_scalar(2.0, ShrinkageParams(p=0.5, lam=1.0))
        assert got == pytest.approx(1.6053779404796, abs=1e-3)
        assert got == pytest.approx(1.6053779404796, abs=1e-9)

    def test_matches_grid_on_sampled_triples(self):
        rng = np.random.default_rng(99)
        for p in (0.2, 0.5, 0.8, 1.0):
            for _ in range(25):
                c = float(rng.uniform(-10, 10))
                lam = float(rng.uniform(1e-6, 5.0))
                y = gst_scalar(c, ShrinkageParams(p=p, lam=lam))
                assert objective(y, c, p, lam) <= grid_minimum(c, p, lam) + 1e-6

    @given(c=st.floats(-50, 50), lam=st.floats(0, 10),
           p=st.sampled_from([0.2, 0.5, 0.8, 1.0]))
    @settings(max_examples=200, deadline=None)
    def test_odd_symmetry_and_shrinkage(self, c, lam, p):
        params = ShrinkageParams(p=p, lam=lam)
        y = gst_scalar(c, params)
        assert gst_scalar(-c, params) == -y
        assert abs(y) <= abs(c) + 1e-15

    def test_monotone_magnitude_on_grid(self):
        for p in (0.2, 0.5, 0.8, 1.0):
            for lam in (0.3, 1.0, 4.0):
                params = ShrinkageParams(p=p, lam=lam)
                values = [gst_scalar(c, params) for c in np.linspace(0, 12, 400)]
                assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))

    def test_p_one_reduces_to_soft_threshold(self):
        params = ShrinkageParams(p=1.0, lam=0.8)
        for c in np.linspace(-4, 4, 81):
            expect = np.sign(c) * max(abs(c) - 0.8, 0.0)
            assert gst_scalar(float(c), params) == pytest.approx(expect, abs=1e-12)


class TestGstMatrix:
    def test_zero_matrix(self):
        out = gst_matrix(np.zeros((3, 4)), ShrinkageParams(p=0.5, lam=2.0))
        assert np.array_equal(out, np.zeros((3, 4)))

    def test_zero_penalty_identity(self, rng):
        H = rng.standard_normal((4, 5))
        assert np.array_equal(gst_matrix(H, ShrinkageParams(p=0.5, lam=0.0)), H)

    def test_elementwise_decoupling(self, rng):
        H = rng.standard_normal((4, 5)) * 3.0
        params = ShrinkageParams(p=0.5, lam=0.3)
        out = gst_matrix(H, params)
        for i in range(4):
            for j in range(5):
                assert out[i, j] == gst_scalar(H[i, j], params)


def test_params_validation():
    with pytest.raises(ConfigError):
        ShrinkageParams(p=0.05, lam=1.0)  # stiff fixed point rejected
    with pytest.raises(ConfigError):
        ShrinkageParams(p=1.5, lam=1.0)
    with pytest.raises(ConfigError):
        ShrinkageParams(p=0.5, lam=-0.1)
    with pytest.raises(ConfigError):
        ShrinkageParams(p=0.5, lam=1.0, max_inner_iters=0)
