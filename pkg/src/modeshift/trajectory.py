"""Piecewise-linear time series with flat extrapolation beyond the anchors."""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass


class InvalidTrajectory(ValueError):
    pass


@dataclass(frozen=True)
class Trajectory:
    """Anchor points (year, value); linear between anchors, flat beyond ends."""

    anchors: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.anchors:
            raise InvalidTrajectory("trajectory needs at least one anchor")
        years = [y for y, _ in self.anchors]
        if any(b <= a for a, b in zip(years, years[1:])):
            raise InvalidTrajectory(f"anchor years must be strictly increasing, got {years}")

    @classmethod
    def from_pairs(cls, pairs) -> "Trajectory":
        return cls(tuple((float(y), float(v)) for y, v in pairs))

    @classmethod
    def constant(cls, value: float, year: float = 2014.0) -> "Trajectory":
        return cls(((float(year), float(value)),))

    def value(self, year: float) -> float:
        anchors = self.anchors
        if year <= anchors[0][0]:
            return anchors[0][1]
        if year >= anchors[-1][0]:
            return anchors[-1][1]
        years = [y for y, _ in anchors]
        i = bisect_right(years, year)
        y0, v0 = anchors[i - 1]
        y1, v1 = anchors[i]
        frac = (year - y0) / (y1 - y0)
        return v0 + frac * (v1 - v0)

    def min_value(self) -> float:
        return min(v for _, v in self.anchors)

    def max_value(self) -> float:
        return max(v for _, v in self.anchors)

    def to_pairs(self) -> list[list[float]]:
        return [[y, v] for y, v in self.anchors]
