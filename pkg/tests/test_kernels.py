import math

import pytest
from hypothesis import given, settings, strategies as st

from modeshift._kernels import backend_name, pure

try:
    from modeshift._kernels import _cykern
except ImportError:
    _cykern = None

compiled = pytest.mark.skipif(_cykern is None, reason="compiled kernel extension not built")


class TestBpr:
    def test_free_flow_at_zero_volume(self):
        assert pure.bpr_travel_time(10.0, 0.0, 2000.0) == 10.0

    def test_known_value(self):
        # t0 (1 + 0.15 (v/c)^4) with v/c = 1 -> t0 * 1.15
        assert pure.bpr_travel_time(10.0, 2000.0, 2000.0) == pytest.approx(11.5)

    def test_monotone_in_volume(self):
        ts = [pure.bpr_travel_time(8.0, v, 1800.0) for v in (0, 500, 1000, 2000, 4000)]
        assert all(b >= a for a, b in zip(ts, ts[1:]))

    @compiled
    @given(
        st.floats(0.5, 120.0),
        st.floats(0.0, 20_000.0),
        st.floats(100.0, 10_000.0),
    )
    @settings(deadline=None, max_examples=200)
    def test_backends_bit_identical(self, t0, vol, cap):
        assert pure.bpr_travel_time(t0, vol, cap) == _cykern.bpr_travel_time(t0, vol, cap)


class TestLogit:
    def test_probabilities_sum_to_one(self):
        probs = pure.logit_probabilities([-3.0, -1.0, -2.5], 2.0)
        assert sum(probs) == pytest.approx(1.0, abs=1e-12)

    def test_equal_utilities_symmetric(self):
        probs = pure.logit_probabilities([-1.0, -1.0], 1.0)
        assert probs[0] == pytest.approx(0.5)

    def test_unit_utility_gap_closed_form(self):
        # p(better) = 1 / (1 + e^-1) for a one-scale-unit gap
        probs = pure.logit_probabilities([0.0, -1.0], 1.0)
        assert probs[0] == pytest.approx(1.0 / (1.0 + math.exp(-1.0)), abs=1e-12)

    def test_choice_follows_cdf(self):
        # probs [0.5, 0.5]: draw below 0.5 picks 0
        assert pure.logit_choice([-1.0, -1.0], 1.0, 0.25) == 0
        assert pure.logit_choice([-1.0, -1.0], 1.0, 0.75) == 1
        assert pure.logit_choice([-1.0, -1.0], 1.0, 0.999999) == 1

    @compiled
    @given(
        st.lists(st.floats(-60.0, 5.0), min_size=1, max_size=6),
        st.floats(0.2, 10.0),
        st.floats(0.0, 1.0, exclude_max=True),
    )
    @settings(deadline=None, max_examples=200)
    def test_backends_bit_identical(self, utilities, scale, draw):
        p_pure = pure.logit_probabilities(utilities, scale)
        p_c = _cykern.logit_probabilities(utilities, scale)
        assert p_pure == p_c
        assert pure.logit_choice(utilities, scale, draw) == _cykern.logit_choice(utilities, scale, draw)

    @compiled
    def test_batch_bpr_identical(self):
        t0 = [5.0, 10.0, 3.3]
        vol = [100.0, 5000.0, 0.0]
        cap = [1800.0, 3600.0, 900.0]
        assert pure.bpr_travel_times(t0, vol, cap) == _cykern.bpr_travel_times(t0, vol, cap)


def test_backend_name_reports():
    assert backend_name() in {"pure", "compiled"}
