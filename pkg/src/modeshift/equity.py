"""Census-tract EV equity scoring, affordability gap, and adoption projection.

Index polarity: higher index = greater barriers to EV adoption, so the map
reads as a priority surface for charger siting and incentive targeting.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .trajectory import Trajectory


class EquityError(Exception):
    pass


class EmptyTractSet(EquityError):
    pass


class NegativeWeight(EquityError):
    pass


class InvalidTerms(EquityError):
    pass


class ZeroChargers(EquityError):
    pass


class InsufficientAnchors(EquityError):
    pass


class DegenerateRangeWarning(UserWarning):
    """All indicator values equal; normalized column pinned to 0.5."""


BARRIER_INCREASING = "barrier-increasing"
BARRIER_DECREASING = "barrier-decreasing"

#: (attribute, direction) pairs. Internal indicators describe the household;
#: external indicators describe the market and infrastructure around it.
INTERNAL_INDICATORS: tuple[tuple[str, str], ...] = (
    ("educational_attainment", BARRIER_DECREASING),
    ("poverty_rate", BARRIER_INCREASING),
    ("renter_rate", BARRIER_INCREASING),
    ("sub_two_car_rate", BARRIER_INCREASING),
)
EXTERNAL_INDICATORS: tuple[tuple[str, str], ...] = (
    ("charger_access", BARRIER_DECREASING),
    ("ev_cost_index", BARRIER_INCREASING),
    ("incentive_usd", BARRIER_DECREASING),
)


@dataclass(frozen=True)
class TractProfile:
    tract_id: str
    median_income: float
    educational_attainment: float
    poverty_rate: float
    renter_rate: float
    sub_two_car_rate: float
    charger_access: float
    ev_cost_index: float
    incentive_usd: float

    def __post_init__(self) -> None:
        if self.median_income <= 0:
            raise ValueError(f"tract {self.tract_id}: median_income must be > 0")
        if self.charger_access < 0:
            raise ValueError(f"tract {self.tract_id}: charger_access must be >= 0")
        for name in ("educational_attainment", "poverty_rate", "renter_rate", "sub_two_car_rate"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"tract {self.tract_id}: {name} must be in [0,1], got {v}")


@dataclass(frozen=True)
class EquityScore:
    tract_id: str
    internal: float
    external: float
    index: float


@dataclass(frozen=True)
class EquityWeights:
    """Per-indicator weights plus the internal/external blend.

    Defaults: equal weight within each group, 50/50 between groups.
    """

    internal: Mapping[str, float] = field(
        default_factory=lambda: {name: 1.0 for name, _ in INTERNAL_INDICATORS}
    )
    external: Mapping[str, float] = field(
        default_factory=lambda: {name: 1.0 for name, _ in EXTERNAL_INDICATORS}
    )
    internal_share: float = 0.5

    def validate(self) -> None:
        for table in (self.internal, self.external):
            for name, w in table.items():
                if w < 0:
                    raise NegativeWeight(f"weight for {name} must be >= 0, got {w}")
        if sum(self.internal.values()) <= 0 or sum(self.external.values()) <= 0:
            raise NegativeWeight("each indicator group needs positive total weight")
        if not 0 <= self.internal_share <= 1:
            raise ValueError("internal_share must be in [0,1]")


def normalize_indicator(values: Sequence[float], direction: str) -> list[float]:
    """Min-max normalize to [0,1]; barrier-decreasing columns are inverted.

    A degenerate column (all values equal) normalizes to 0.5 everywhere and
    emits DegenerateRangeWarning instead of failing.
    """
    if direction not in (BARRIER_INCREASING, BARRIER_DECREASING):
        raise ValueError(f"unknown direction {direction!r}")
    if len(values) < 2:
        raise ValueError("need at least 2 values to normalize")
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite indicator value {v}")
    lo = min(values)
    hi = max(values)
    if hi == lo:
        warnings.warn("degenerate indicator range; pinning to 0.5", DegenerateRangeWarning)
        return [0.5] * len(values)
    span = hi - lo
    normalized = [(v - lo) / span for v in values]
    if direction == BARRIER_DECREASING:
        normalized = [1.0 - v for v in normalized]
    return normalized


def compute_equity_index(
    tracts: Sequence[TractProfile],
    weights: EquityWeights | None = None,
) -> list[EquityScore]:
    """Score every tract; higher index = higher barriers to adoption.

    Min-max normalization makes the ranking invariant under positive affine
    rescaling of any raw indicator column.
    """
    if not tracts:
        raise EmptyTractSet("no tracts given")
    weights = weights or EquityWeights()
    weights.validate()

    columns: dict[str, list[float]] = {}
    for name, direction in INTERNAL_INDICATORS + EXTERNAL_INDICATORS:
        raw = [getattr(t, name) for t in tracts]
        columns[name] = normalize_indicator(raw, direction)

    scores = []
    for i, tract in enumerate(tracts):
        internal = _weighted_mean(columns, weights.internal, i)
        external = _weighted_mean(columns, weights.external, i)
        index = weights.internal_share * internal + (1.0 - weights.internal_share) * external
        scores.append(EquityScore(tract.tract_id, internal, external, index))
    return scores


def _weighted_mean(columns: Mapping[str, list[float]], weights: Mapping[str, float], row: int) -> float:
    total = 0.0
    weight_sum = 0.0
    for name, w in weights.items():
        total += w * columns[name][row]
        weight_sum += w
    return total / weight_sum


# ---------------------------------------------------------------------------
# Affordability: the 10%-of-income car-loan rule.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LoanTerms:
    apr: float = 0.07
    term_months: int = 60
    down_payment_fraction: float = 0.0
    budget_fraction: float = 0.10

    def __post_init__(self) -> None:
        if self.apr < 0:
            raise InvalidTerms("apr must be >= 0")
        if self.term_months < 1:
            raise InvalidTerms("term_months must be >= 1")
        for name in ("down_payment_fraction", "budget_fraction"):
            v = getattr(self, name)
            if not 0 <= v < 1:
                raise InvalidTerms(f"{name} must be in [0,1), got {v}")


def amortized_monthly_payment(principal: float, terms: LoanTerms) -> float:
    """Standard amortization payment P*r / (1 - (1+r)^-n), r = apr/12."""
    if principal <= 0:
        return 0.0
    r = terms.apr / 12.0
    n = terms.term_months
    if r == 0:
        return principal / n
    return principal * r / (1.0 - (1.0 + r) ** (-n))


@dataclass(frozen=True)
class AffordabilityReport:
    fraction_affording: float
    affords: Mapping[str, bool]
    annual_payment: float
    threshold_income: float


def affordability_gap(
    tracts: Sequence[TractProfile],
    ev_price: float,
    terms: LoanTerms,
    incentive_usd: float = 0.0,
) -> AffordabilityReport:
    """Which tracts' median-income households can carry the loan.

    A tract affords the vehicle iff twelve monthly payments on
    (price - incentive) x (1 - down payment) fit within
    budget_fraction x median income.
    """
    if not tracts:
        raise EmptyTractSet("no tracts given")
    if incentive_usd < 0 or ev_price < incentive_usd:
        raise InvalidTerms("need ev_price >= incentive_usd >= 0")
    principal = (ev_price - incentive_usd) * (1.0 - terms.down_payment_fraction)
    annual_payment = 12.0 * amortized_monthly_payment(principal, terms)
    flags = {t.tract_id: annual_payment <= terms.budget_fraction * t.median_income for t in tracts}
    threshold = annual_payment / terms.budget_fraction if terms.budget_fraction > 0 else math.inf
    return AffordabilityReport(
        fraction_affording=sum(flags.values()) / len(flags),
        affords=flags,
        annual_payment=annual_payment,
        threshold_income=threshold,
    )


@dataclass(frozen=True)
class ChargerRatio:
    per_charger: float
    label: str


def charger_ratio(ev_count: float, public_charger_count: float) -> ChargerRatio:
    """EVs per public charger port, reported in the 1:N convention."""
    if public_charger_count <= 0:
        raise ZeroChargers("public_charger_count must be > 0")
    per = ev_count / public_charger_count
    return ChargerRatio(per_charger=per, label=f"1:{per:g}")


# ---------------------------------------------------------------------------
# Adoption projection: logistic curve through observed sales-share anchors.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdoptionProjection:
    trajectory: Trajectory
    method: str  # "logistic" | "linear_clamp"
    k: float
    t0: float
    degenerate: bool
    rmse: float


def parse_period(period: str | float) -> float:
    """Fractional year for a period label: '2024', '2024H1', 'Q4-2024'...

    Annual periods map to mid-year; halves and quarters map to their own
    midpoints.
    """
    if isinstance(period, (int, float)):
        return float(period)
    text = period.strip().upper().replace("-", "")
    part = None
    for tag in ("H1", "H2", "Q1", "Q2", "Q3", "Q4"):
        if tag in text:
            part = tag
            text = text.replace(tag, "")
            break
    year = float(text)
    offsets = {None: 0.5, "H1": 0.25, "H2": 0.75, "Q1": 0.125, "Q2": 0.375, "Q3": 0.625, "Q4": 0.875}
    return year + offsets[part]


def project_adoption(
    anchors: Sequence[tuple[str | float, float]],
    horizon: int,
) -> AdoptionProjection:
    """Fit share(t) = 1 / (1 + exp(-k (t - t0))) through the anchors.

    The fit is least squares on the log-odds scale, which reproduces the
    anchors exactly whenever they already lie on a logistic. Anchors that
    cannot identify a slope (equal shares, or shares pinned to 0/1) fall
    back to a linear fit clamped into [0,1], flagged degenerate.
    """
    if len(anchors) < 2:
        raise InsufficientAnchors("need at least 2 anchors")
    times = []
    shares = []
    for period, share in anchors:
        if not 0 <= share <= 1:
            raise ValueError(f"share {share} outside [0,1]")
        times.append(parse_period(period))
        shares.append(share)

    t = np.asarray(times, dtype=float)
    y = np.asarray(shares, dtype=float)
    years = np.arange(math.floor(min(times)), horizon + 1, dtype=float)

    eps = 1e-9
    pinned = bool(np.any(y <= eps) or np.any(y >= 1 - eps))
    degenerate = pinned or float(np.ptp(y)) == 0.0 or float(np.ptp(t)) == 0.0

    if not degenerate:
        logit = np.log(y / (1.0 - y))
        design = np.column_stack([t, np.ones_like(t)])
        (slope, intercept), *_ = np.linalg.lstsq(design, logit, rcond=None)
        if slope == 0.0:
            degenerate = True
        else:
            k = float(slope)
            t0 = float(-intercept / slope)
            fitted = 1.0 / (1.0 + np.exp(-k * (years - t0)))
            resid = 1.0 / (1.0 + np.exp(-k * (t - t0))) - y
            return AdoptionProjection(
                trajectory=Trajectory.from_pairs(zip(years.tolist(), fitted.tolist())),
                method="logistic",
                k=k,
                t0=t0,
                degenerate=False,
                rmse=float(np.sqrt(np.mean(resid**2))),
            )

    # Fallback: least-squares line in share space, clamped to [0,1].
    if float(np.ptp(t)) == 0.0:
        slope, intercept = 0.0, float(np.mean(y))
    else:
        design = np.column_stack([t, np.ones_like(t)])
        (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = np.clip(slope * years + intercept, 0.0, 1.0)
    resid = np.clip(slope * t + intercept, 0.0, 1.0) - y
    return AdoptionProjection(
        trajectory=Trajectory.from_pairs(zip(years.tolist(), fitted.tolist())),
        method="linear_clamp",
        k=float(slope),
        t0=float("nan"),
        degenerate=True,
        rmse=float(np.sqrt(np.mean(resid**2))),
    )


# ---------------------------------------------------------------------------
# File interfaces.
# ---------------------------------------------------------------------------

TRACT_CSV_COLUMNS = (
    "tract_id",
    "median_income",
    "edu",
    "poverty",
    "renter",
    "sub_two_car",
    "charger_access",
    "ev_cost",
    "incentive",
)


def load_tracts_csv(path: str | Path) -> list[TractProfile]:
    tracts = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        have = set(reader.fieldnames or [])
        missing = set(TRACT_CSV_COLUMNS) - have
        if missing:
            raise ValueError(f"{path}: missing required columns {sorted(missing)}")
        for row in reader:
            tracts.append(
                TractProfile(
                    tract_id=row["tract_id"],
                    median_income=float(row["median_income"]),
                    educational_attainment=float(row["edu"]),
                    poverty_rate=float(row["poverty"]),
                    renter_rate=float(row["renter"]),
                    sub_two_car_rate=float(row["sub_two_car"]),
                    charger_access=float(row["charger_access"]),
                    ev_cost_index=float(row["ev_cost"]),
                    incentive_usd=float(row["incentive"]),
                )
            )
    return tracts


def write_tracts_csv(path: str | Path, tracts: Iterable[TractProfile]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACT_CSV_COLUMNS)
        for t in tracts:
            writer.writerow(
                [
                    t.tract_id,
                    f"{t.median_income:.2f}",
                    f"{t.educational_attainment:.4f}",
                    f"{t.poverty_rate:.4f}",
                    f"{t.renter_rate:.4f}",
                    f"{t.sub_two_car_rate:.4f}",
                    f"{t.charger_access:.4f}",
                    f"{t.ev_cost_index:.2f}",
                    f"{t.incentive_usd:.2f}",
                ]
            )


def scores_to_csv(scores: Sequence[EquityScore], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tract_id", "internal", "external", "index"])
        for s in scores:
            writer.writerow([s.tract_id, f"{s.internal:.10f}", f"{s.external:.10f}", f"{s.index:.10f}"])


def scores_to_geojson(
    scores: Sequence[EquityScore],
    tract_geometries: Mapping[str, dict] | None = None,
) -> dict:
    """Choropleth-ready FeatureCollection with the index as a property."""
    features = []
    for s in scores:
        geometry = tract_geometries.get(s.tract_id) if tract_geometries else None
        features.append(
            {
                "type": "Feature",
                "geometry": geometry,
                "properties": {
                    "tract_id": s.tract_id,
                    "internal": s.internal,
                    "external": s.external,
                    "index": s.index,
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}
