import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from modeshift import datasets
from modeshift.equity import (
    BARRIER_DECREASING,
    BARRIER_INCREASING,
    DegenerateRangeWarning,
    EXTERNAL_INDICATORS,
    EmptyTractSet,
    INTERNAL_INDICATORS,
    InsufficientAnchors,
    InvalidTerms,
    LoanTerms,
    NegativeWeight,
    TractProfile,
    ZeroChargers,
    affordability_gap,
    amortized_monthly_payment,
    charger_ratio,
    compute_equity_index,
    normalize_indicator,
    parse_period,
    project_adoption,
)


def _tract(tract_id="t1", income=60_000.0, **overrides):
    fields = dict(
        median_income=income,
        educational_attainment=0.3,
        poverty_rate=0.2,
        renter_rate=0.5,
        sub_two_car_rate=0.4,
        charger_access=2.0,
        ev_cost_index=55_000.0,
        incentive_usd=2_000.0,
    )
    fields.update(overrides)
    return TractProfile(tract_id=tract_id, **fields)


class TestNormalizeIndicator:
    def test_barrier_increasing(self):
        assert normalize_indicator([0, 5, 10], BARRIER_INCREASING) == [0.0, 0.5, 1.0]

    def test_barrier_decreasing_inverts(self):
        assert normalize_indicator([0, 5, 10], BARRIER_DECREASING) == [1.0, 0.5, 0.0]

    def test_degenerate_pins_to_half_with_warning(self):
        with pytest.warns(DegenerateRangeWarning):
            assert normalize_indicator([3, 3, 3], BARRIER_INCREASING) == [0.5, 0.5, 0.5]

    def test_too_few_values(self):
        with pytest.raises(ValueError):
            normalize_indicator([1.0], BARRIER_INCREASING)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            normalize_indicator([1.0, math.nan], BARRIER_INCREASING)

    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=40))
    @settings(deadline=None, max_examples=80)
    def test_output_bounded(self, values):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateRangeWarning)
            out = normalize_indicator(values, BARRIER_INCREASING)
        assert all(0.0 <= v <= 1.0 for v in out)


def brute_force_equity_oracle(tracts):
    """Independent straight-line reimplementation: min-max normalize each
    indicator, invert barrier-decreasing ones, equal-weight means within
    groups, then a 50/50 internal/external blend."""
    internal_defs = [
        ("educational_attainment", True),
        ("poverty_rate", False),
        ("renter_rate", False),
        ("sub_two_car_rate", False),
    ]
    external_defs = [
        ("charger_access", True),
        ("ev_cost_index", False),
        ("incentive_usd", True),
    ]
    norm = {}
    for name, invert in internal_defs + external_defs:
        raw = [getattr(t, name) for t in tracts]
        lo = raw[0]
        hi = raw[0]
        for v in raw[1:]:
            if v < lo:
                lo = v
            if v > hi:
                hi = v
        if hi == lo:
            col = [0.5] * len(raw)
        else:
            span = hi - lo
            col = [(v - lo) / span for v in raw]
            if invert:
                col = [1.0 - v for v in col]
        norm[name] = col

    out = []
    for i in range(len(tracts)):
        internal_total = 0.0
        internal_w = 0.0
        for name, _ in internal_defs:
            internal_total += 1.0 * norm[name][i]
            internal_w += 1.0
        internal = internal_total / internal_w
        external_total = 0.0
        external_w = 0.0
        for name, _ in external_defs:
            external_total += 1.0 * norm[name][i]
            external_w += 1.0
        external = external_total / external_w
        out.append((internal, external, 0.5 * internal + (1.0 - 0.5) * external))
    return out


class TestComputeEquityIndex:
    def test_identical_tracts_identical_scores(self):
        tracts = [_tract("a"), _tract("b")]
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateRangeWarning)
            scores = compute_equity_index(tracts)
        assert scores[0].index == scores[1].index

    def test_dominance_monotonicity(self):
        worse = _tract(
            "worse",
            educational_attainment=0.1,
            poverty_rate=0.5,
            renter_rate=0.8,
            sub_two_car_rate=0.7,
            charger_access=0.2,
            ev_cost_index=60_000.0,
            incentive_usd=0.0,
        )
        better = _tract(
            "better",
            educational_attainment=0.8,
            poverty_rate=0.05,
            renter_rate=0.2,
            sub_two_car_rate=0.1,
            charger_access=6.0,
            ev_cost_index=50_000.0,
            incentive_usd=7_500.0,
        )
        middle = _tract("middle")
        scores = {s.tract_id: s.index for s in compute_equity_index([worse, better, middle])}
        assert scores["worse"] >= scores["middle"] >= scores["better"]

    def test_bundled_set_matches_oracle_bit_for_bit(self, tracts):
        scores = compute_equity_index(tracts)
        oracle = brute_force_equity_oracle(tracts)
        assert len(scores) == 100
        for s, (internal, external, index) in zip(scores, oracle):
            assert s.internal == internal
            assert s.external == external
            assert s.index == index

    def test_ranking_invariant_under_affine_rescale(self, tracts):
        base = compute_equity_index(tracts)
        base_order = [s.tract_id for s in sorted(base, key=lambda s: s.index)]
        rescaled = [
            TractProfile(
                tract_id=t.tract_id,
                median_income=t.median_income,
                educational_attainment=t.educational_attainment,
                poverty_rate=t.poverty_rate,
                renter_rate=t.renter_rate,
                sub_two_car_rate=t.sub_two_car_rate,
                charger_access=t.charger_access * 12.5 + 3.0,  # positive affine
                ev_cost_index=t.ev_cost_index,
                incentive_usd=t.incentive_usd,
            )
            for t in tracts
        ]
        new = compute_equity_index(rescaled)
        new_order = [s.tract_id for s in sorted(new, key=lambda s: s.index)]
        assert new_order == base_order

    def test_empty_and_negative_weight(self):
        with pytest.raises(EmptyTractSet):
            compute_equity_index([])
        from modeshift.equity import EquityWeights

        bad = EquityWeights(internal={"poverty_rate": -1.0})
        with pytest.raises(NegativeWeight):
            compute_equity_index([_tract("a"), _tract("b", income=80_000)], bad)


def bisection_amortization_oracle(principal, apr, months):
    """Spreadsheet-style oracle: find the payment that zeroes the balance
    by simulating the schedule, independent of the closed form."""
    r = apr / 12.0

    def end_balance(payment):
        balance = principal
        for _ in range(months):
            balance = balance * (1 + r) - payment
        return balance

    lo, hi = 0.0, principal * (1 + r)
    for _ in range(200):
        mid = (lo + hi) / 2
        if end_balance(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


class TestAffordability:
    def test_spec_example_against_bisection_oracle(self):
        terms = LoanTerms(apr=0.07, term_months=60, down_payment_fraction=0.0)
        monthly = amortized_monthly_payment(48_000.0, terms)
        oracle = bisection_amortization_oracle(48_000.0, 0.07, 60)
        assert monthly == pytest.approx(oracle, rel=1e-9)
        assert 12 * monthly == pytest.approx(11_405, abs=5)
        report = affordability_gap([_tract("t", income=50_000.0)], 48_000.0, terms)
        assert report.affords["t"] is False

    def test_zero_principal_everyone_affords(self, tracts):
        report = affordability_gap(tracts, 4_000.0, LoanTerms(), incentive_usd=4_000.0)
        assert report.fraction_affording == 1.0

    def test_bundled_calibration_rates(self, tracts):
        new = affordability_gap(tracts, 55_000.0, LoanTerms())
        used = affordability_gap(tracts, 28_000.0, LoanTerms(), incentive_usd=4_000.0)
        assert new.fraction_affording == pytest.approx(0.19, abs=0.01)
        assert used.fraction_affording == pytest.approx(0.44, abs=0.01)

    def test_monotone_pass_set(self, tracts):
        base = affordability_gap(tracts, 40_000.0, LoanTerms())
        cheaper = affordability_gap(tracts, 35_000.0, LoanTerms())
        subsidized = affordability_gap(tracts, 40_000.0, LoanTerms(), incentive_usd=5_000.0)
        base_set = {t for t, ok in base.affords.items() if ok}
        assert base_set <= {t for t, ok in cheaper.affords.items() if ok}
        assert base_set <= {t for t, ok in subsidized.affords.items() if ok}

    def test_zero_apr(self):
        terms = LoanTerms(apr=0.0, term_months=60)
        assert amortized_monthly_payment(6_000.0, terms) == pytest.approx(100.0)

    def test_invalid_terms(self):
        with pytest.raises(InvalidTerms):
            LoanTerms(apr=-0.01)
        with pytest.raises(InvalidTerms):
            LoanTerms(term_months=0)
        with pytest.raises(InvalidTerms):
            affordability_gap([_tract()], 10_000.0, LoanTerms(), incentive_usd=11_000.0)


class TestChargerRatio:
    def test_national_ratio(self):
        assert charger_ratio(22_000, 1_000).per_charger == 22.0

    def test_texas_ratio(self):
        assert charger_ratio(25_800, 1_000).per_charger == 25.8

    def test_equal_counts(self):
        assert charger_ratio(500, 500).per_charger == 1.0

    def test_zero_chargers(self):
        with pytest.raises(ZeroChargers):
            charger_ratio(100, 0)


class TestProjectAdoption:
    def test_round_trip_logistic(self):
        k, t0 = 0.3, 2030.0
        anchors = [(year, 1.0 / (1.0 + math.exp(-k * (year - t0)))) for year in (2024, 2028, 2033)]
        fit = project_adoption(anchors, horizon=2050)
        assert fit.method == "logistic"
        assert fit.k == pytest.approx(k, abs=1e-6)
        assert fit.t0 == pytest.approx(t0, abs=1e-6)
        for year, share in anchors:
            assert fit.trajectory.value(year) == pytest.approx(share, abs=1e-9)

    def test_two_equal_anchors_degenerate_flat(self):
        fit = project_adoption([(2024, 0.1), (2025, 0.1)], horizon=2030)
        assert fit.degenerate and fit.method == "linear_clamp"
        assert fit.trajectory.value(2024) == pytest.approx(0.1)
        assert fit.trajectory.value(2030) == pytest.approx(0.1)

    def test_houston_anchors_increasing_and_bounded(self):
        fit = project_adoption([("H1-2024", 0.1453), ("Q4-2024", 0.16)], horizon=2040)
        values = [fit.trajectory.value(y) for y in range(2024, 2041)]
        assert all(0.0 <= v <= 1.0 for v in values)
        assert all(b > a for a, b in zip(values, values[1:]))
        assert fit.k > 0
        assert not math.isnan(fit.trajectory.value(2035))

    def test_pinned_share_falls_back(self):
        fit = project_adoption([(2020, 0.0), (2030, 0.4)], horizon=2040)
        assert fit.degenerate and fit.method == "linear_clamp"
        assert all(0.0 <= fit.trajectory.value(y) <= 1.0 for y in range(2020, 2041))

    def test_insufficient_anchors(self):
        with pytest.raises(InsufficientAnchors):
            project_adoption([(2024, 0.1)], horizon=2030)

    def test_parse_period(self):
        assert parse_period("2024") == 2024.5
        assert parse_period("H1-2024") == 2024.25
        assert parse_period("2024H1") == 2024.25
        assert parse_period("Q4-2024") == 2024.875
        assert parse_period(2024.25) == 2024.25

    @given(
        st.lists(
            st.tuples(st.integers(2015, 2045), st.floats(0.01, 0.99)),
            min_size=2,
            max_size=6,
            unique_by=lambda p: p[0],
        )
    )
    @settings(deadline=None, max_examples=60)
    def test_bounded_everywhere(self, anchors):
        fit = project_adoption(sorted(anchors), horizon=2060)
        for year in range(2015, 2061):
            assert -1e-12 <= fit.trajectory.value(year) <= 1.0 + 1e-12
