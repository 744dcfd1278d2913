"""Integer intervals with an explicit infinity, the engine's value lattice."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInputError

INF = float("inf")


def _check_bound(v) -> None:
    if v == INF:
        return
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise InvalidInputError(f"interval bounds must be non-negative integers or inf, got {v!r}")


@dataclass(frozen=True)
class Interval:
    """Closed interval [lower, upper] over the non-negative integers plus inf."""

    lower: object = 0
    upper: object = INF

    def __post_init__(self):
        _check_bound(self.lower)
        _check_bound(self.upper)
        if self.lower > self.upper:
            raise InvalidInputError(f"empty interval [{self.lower}, {self.upper}]")

    def meet(self, other: "Interval"):
        """Intersection, or None when the result would be empty."""
        lo = max(self.lower, other.lower)
        hi = min(self.upper, other.upper)
        if lo > hi:
            return None
        return Interval(lo, hi)

    @property
    def is_singleton(self) -> bool:
        return self.lower == self.upper

    def __str__(self) -> str:
        lo = "inf" if self.lower == INF else self.lower
        hi = "inf" if self.upper == INF else self.upper
        return f"[{lo}, {hi}]"

    def to_json(self) -> dict:
        return {
            "lower": "inf" if self.lower == INF else self.lower,
            "upper": "inf" if self.upper == INF else self.upper,
        }

    @staticmethod
    def from_json(doc: dict) -> "Interval":
        def parse(v):
            if v == "inf":
                return INF
            if isinstance(v, int) and not isinstance(v, bool):
                return v
            raise InvalidInputError(f"bad interval bound {v!r}")

        return Interval(parse(doc["lower"]), parse(doc["upper"]))

    @staticmethod
    def exactly(v) -> "Interval":
        return Interval(v, v)

    @staticmethod
    def at_least(v) -> "Interval":
        return Interval(v, INF)

    @staticmethod
    def at_most(v) -> "Interval":
        return Interval(0, v)
