"""Real sets, boundedness probes, and the monotone witnesses behind them.

A set is statistically upward compact exactly when it is bounded below, and
statistically downward compact exactly when it is bounded above; the probes
here answer those questions from the set representation, build the step-2
witness sequences that certify failure, and extract statistically upward half
quasi-Cauchy subsequences from bounded-below data.
"""

from __future__ import annotations

import math
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .density import AnalysisConfig
from .errors import ExtractionRefused, NoWitnessError, ParseError, UndecidableError
from .sequences import IndexMap, Prefix, Sequence

__all__ = [
    "Interval",
    "RealSet",
    "IntervalUnion",
    "PointSet",
    "GeneratedSet",
    "REALS",
    "parse_set",
    "bounded_below",
    "bounded_above",
    "bounded",
    "stat_upward_compact",
    "stat_downward_compact",
    "descending_witness",
    "ascending_witness",
    "witness_sequence",
    "extract_stat_upward_hqc_subsequence",
]

WITNESS_STEP = 2.0
_SCAN_LIMIT = 1_000_000


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if math.isinf(lo) and self.lo_closed or math.isinf(hi) and self.hi_closed:
            raise ValueError("infinite endpoints must be open")
        if lo > hi or (lo == hi and not (self.lo_closed and self.hi_closed)):
            raise ValueError(f"empty interval {self}")

    def __str__(self) -> str:
        def fmt(v):
            return "inf" if v == math.inf else "-inf" if v == -math.inf else f"{v:g}"

        return f"{'[' if self.lo_closed else '('}{fmt(self.lo)},{fmt(self.hi)}{']' if self.hi_closed else ')'}"

    def contains(self, x: np.ndarray) -> np.ndarray:
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return above & below

    def max_point(self) -> float:
        return self.hi if self.hi_closed else float(np.nextafter(self.hi, -math.inf))

    def min_point(self) -> float:
        return self.lo if self.lo_closed else float(np.nextafter(self.lo, math.inf))


class RealSet(ABC):
    """A subset of the real line with decidable or declared bounds."""

    @abstractmethod
    def infimum(self) -> float:
        """Greatest lower bound (``-inf`` when unbounded below, ``+inf`` when empty)."""

    @abstractmethod
    def supremum(self) -> float:
        ...

    @abstractmethod
    def contains(self, values) -> np.ndarray:
        ...

    @abstractmethod
    def nearest(self, target: float) -> float:
        """A member of the set nearest to ``target`` (attained or one float step inside)."""

    @abstractmethod
    def largest_at_most(self, bound: float) -> float | None:
        ...

    @abstractmethod
    def smallest_at_least(self, bound: float) -> float | None:
        ...


class IntervalUnion(RealSet):
    """Finite union of intervals, stored sorted and merged."""

    def __init__(self, intervals: Iterable[Interval] = ()):
        self.intervals = self._normalize(list(intervals))

    @staticmethod
    def _normalize(items: list[Interval]) -> tuple[Interval, ...]:
        items.sort(key=lambda iv: (iv.lo, not iv.lo_closed))
        out: list[Interval] = []
        for iv in items:
            if out:
                last = out[-1]
                touches = iv.lo < last.hi or (iv.lo == last.hi and (last.hi_closed or iv.lo_closed))
                if touches:
                    if iv.hi > last.hi or (iv.hi == last.hi and iv.hi_closed):
                        hi, hi_closed = iv.hi, iv.hi_closed
                    else:
                        hi, hi_closed = last.hi, last.hi_closed
                    out[-1] = Interval(last.lo, hi, last.lo_closed, hi_closed)
                    continue
            out.append(iv)
        return tuple(out)

    def __repr__(self) -> str:
        return "IntervalUnion(" + " | ".join(str(iv) for iv in self.intervals) + ")"

    def __str__(self) -> str:
        return " | ".join(str(iv) for iv in self.intervals) or "{}"

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalUnion) and self.intervals == other.intervals

    def __hash__(self) -> int:
        return hash(self.intervals)

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion(self.intervals + other.intervals)

    def intersection(self, other: "IntervalUnion") -> "IntervalUnion":
        parts = []
        for a in self.intervals:
            for b in other.intervals:
                if a.lo > b.lo or (a.lo == b.lo and not a.lo_closed):
                    lo, lo_closed = a.lo, a.lo_closed
                else:
                    lo, lo_closed = b.lo, b.lo_closed
                if a.hi < b.hi or (a.hi == b.hi and not a.hi_closed):
                    hi, hi_closed = a.hi, a.hi_closed
                else:
                    hi, hi_closed = b.hi, b.hi_closed
                if lo < hi or (lo == hi and lo_closed and hi_closed):
                    parts.append(Interval(lo, hi, lo_closed, hi_closed))
        return IntervalUnion(parts)

    def infimum(self) -> float:
        return self.intervals[0].lo if self.intervals else math.inf

    def supremum(self) -> float:
        return self.intervals[-1].hi if self.intervals else -math.inf

    def contains(self, values) -> np.ndarray:
        x = np.asarray(values, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for iv in self.intervals:
            out |= iv.contains(x)
        return out

    def nearest(self, target: float) -> float:
        if not self.intervals:
            raise NoWitnessError("empty set has no points")
        if self.contains(target):
            return float(target)
        candidates = []
        for iv in self.intervals:
            if iv.lo > -math.inf:
                candidates.append(iv.min_point())
            if iv.hi < math.inf:
                candidates.append(iv.max_point())
        return min(candidates, key=lambda p: (abs(p - target), p))

    def largest_at_most(self, bound: float) -> float | None:
        if self.contains(bound):
            return float(bound)
        below = [iv for iv in self.intervals if iv.hi < bound or (iv.hi == bound and not iv.hi_closed)]
        if not below:
            return None
        return below[-1].max_point()

    def smallest_at_least(self, bound: float) -> float | None:
        if self.contains(bound):
            return float(bound)
        above = [iv for iv in self.intervals if iv.lo > bound or (iv.lo == bound and not iv.lo_closed)]
        if not above:
            return None
        return above[0].min_point()


REALS = IntervalUnion([Interval(-math.inf, math.inf, False, False)])


class PointSet(RealSet):
    """Finite set of points."""

    def __init__(self, points: Iterable[float]):
        pts = np.unique(np.asarray(list(points), dtype=float))
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        self.points = pts

    def __repr__(self) -> str:
        return "PointSet({" + ", ".join(f"{p:g}" for p in self.points) + "})"

    def infimum(self) -> float:
        return float(self.points[0]) if self.points.size else math.inf

    def supremum(self) -> float:
        return float(self.points[-1]) if self.points.size else -math.inf

    def contains(self, values) -> np.ndarray:
        return np.isin(np.asarray(values, dtype=float), self.points)

    def nearest(self, target: float) -> float:
        if not self.points.size:
            raise NoWitnessError("empty set has no points")
        i = int(np.argmin(np.abs(self.points - target)))
        return float(self.points[i])

    def largest_at_most(self, bound: float) -> float | None:
        below = self.points[self.points <= bound]
        return float(below[-1]) if below.size else None

    def smallest_at_least(self, bound: float) -> float | None:
        above = self.points[self.points >= bound]
        return float(above[0]) if above.size else None


class GeneratedSet(RealSet):
    """Set enumerated by ``generator(i)``, ``i = 1, 2, ...``, with declared bounds.

    ``infimum``/``supremum`` are metadata: ``None`` means undeclared, and the
    bound questions then raise :class:`UndecidableError` instead of guessing
    from samples.
    """

    def __init__(
        self,
        generator: Callable[[int], float],
        infimum: float | None = None,
        supremum: float | None = None,
        member: Callable[[float], bool] | None = None,
        name: str = "generated",
        check_samples: int = 256,
    ):
        self.generator = generator
        self._inf = infimum
        self._sup = supremum
        self._member = member
        self.name = name
        for i in range(1, check_samples + 1):
            p = float(generator(i))
            if not math.isfinite(p):
                raise ValueError(f"{name}: generator produced non-finite point at {i}")
            if (infimum is not None and p < infimum) or (supremum is not None and p > supremum):
                raise ValueError(f"{name}: sample {p} contradicts declared bounds")

    def __repr__(self) -> str:
        return f"GeneratedSet({self.name!r})"

    def infimum(self) -> float:
        if self._inf is None:
            raise UndecidableError(f"{self.name}: no declared infimum")
        return self._inf

    def supremum(self) -> float:
        if self._sup is None:
            raise UndecidableError(f"{self.name}: no declared supremum")
        return self._sup

    def contains(self, values) -> np.ndarray:
        if self._member is None:
            raise UndecidableError(f"{self.name}: membership test not declared")
        x = np.asarray(values, dtype=float)
        return np.vectorize(lambda v: bool(self._member(float(v))), otypes=[bool])(x)

    def _scan(self, accept: Callable[[float], bool]) -> float | None:
        for i in range(1, _SCAN_LIMIT + 1):
            p = float(self.generator(i))
            if accept(p):
                return p
        return None

    def nearest(self, target: float) -> float:
        pts = [float(self.generator(i)) for i in range(1, 1025)]
        return min(pts, key=lambda p: (abs(p - target), p))

    def largest_at_most(self, bound: float) -> float | None:
        return self._scan(lambda p: p <= bound)

    def smallest_at_least(self, bound: float) -> float | None:
        return self._scan(lambda p: p >= bound)


_NUM = r"[-+]?(?:inf|∞|\d+(?:\.\d*)?(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)"
_INTERVAL_RE = re.compile(rf"^([\[(])\s*({_NUM})\s*,\s*({_NUM})\s*([\])])$")
_POINTS_RE = re.compile(r"^\{(.*)\}$")


def _number(token: str) -> float:
    token = token.strip().replace("∞", "inf")
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"bad number {token!r}") from None


def parse_set(text: str) -> RealSet:
    """Parse ``[a,b]``, ``(a,inf)``, ``{v1,v2}``, ``R``; join pieces with ``|``, ``U`` or ``∪``."""
    pieces = [p.strip() for p in re.split(r"\s*(?:\||∪|\bU\b)\s*", text.strip()) if p.strip()]
    if not pieces:
        raise ParseError("empty set literal")
    intervals: list[Interval] = []
    points: list[float] = []
    for piece in pieces:
        if piece in ("R", "ℝ", "reals"):
            intervals.extend(REALS.intervals)
            continue
        m = _INTERVAL_RE.match(piece)
        if m:
            lo, hi = _number(m.group(2)), _number(m.group(3))
            try:
                intervals.append(Interval(lo, hi, m.group(1) == "[", m.group(4) == "]"))
            except ValueError as exc:
                raise ParseError(str(exc)) from None
            continue
        m = _POINTS_RE.match(piece)
        if m:
            body = m.group(1).strip()
            vals = [_number(t) for t in body.split(",")] if body else []
            if any(not math.isfinite(v) for v in vals):
                raise ParseError("set points must be finite")
            points.extend(vals)
            continue
        raise ParseError(f"cannot parse set piece {piece!r}")
    if not intervals:
        return PointSet(points)
    return IntervalUnion(intervals + [Interval(p, p) for p in points])


def bounded_below(s: RealSet) -> bool:
    return s.infimum() > -math.inf


def bounded_above(s: RealSet) -> bool:
    return s.supremum() < math.inf


def stat_upward_compact(s: RealSet) -> bool:
    """Every sequence in ``s`` has a statistically upward half quasi-Cauchy subsequence."""
    return bounded_below(s)


def stat_downward_compact(s: RealSet) -> bool:
    return bounded_above(s)


def bounded(s: RealSet) -> bool:
    return stat_upward_compact(s) and stat_downward_compact(s)


def _walk(s: RealSet, n: int, descending: bool, step: float) -> list[float]:
    x = s.nearest(0.0)
    out = [x]
    for _ in range(n - 1):
        nxt = s.largest_at_most(x - step) if descending else s.smallest_at_least(x + step)
        if nxt is None:
            raise NoWitnessError("set exhausted while building the witness")
        out.append(nxt)
        x = nxt
    return out


def descending_witness(s: RealSet, n: int, step: float = WITNESS_STEP) -> Prefix:
    """Points ``x_1, ..., x_n`` of ``s`` with ``x_{j+1} <= x_j - step``."""
    if bounded_below(s):
        raise NoWitnessError("set is bounded below: no descending witness exists")
    return Prefix(tuple(_walk(s, n, True, step)), f"descending-witness({s!r})")


def ascending_witness(s: RealSet, n: int, step: float = WITNESS_STEP) -> Prefix:
    if bounded_above(s):
        raise NoWitnessError("set is bounded above: no ascending witness exists")
    return Prefix(tuple(_walk(s, n, False, step)), f"ascending-witness({s!r})")


def witness_sequence(s: RealSet, descending: bool = True, step: float = WITNESS_STEP) -> Sequence:
    """The witness extended indefinitely by the same stepping rule."""
    make = descending_witness if descending else ascending_witness
    make(s, 1, step)  # raises NoWitnessError up front
    name = "descending-witness" if descending else "ascending-witness"
    return Sequence(prefix=lambda n: np.array(make(s, n, step).values), name=name)


def extract_stat_upward_hqc_subsequence(seq: Sequence, config: AnalysisConfig) -> IndexMap:
    """Select a subsequence of the horizon prefix that is statistically upward half quasi-Cauchy.

    Two candidates are built and the longer one returned: the future-minimum
    chain (indices whose value is <= every later value, hence nondecreasing),
    which is long when values drift to +inf; and a nested-bisection cluster
    of the value range, halving toward the more populated half until the
    cluster is narrower than the smallest epsilon, which is long when the
    prefix is bounded. Either way no drop reaches the smallest epsilon.
    """
    total = config.horizon + 1 if seq.length is None else min(config.horizon + 1, seq.length)
    x = seq.head(total)
    floor = -config.fail_threshold * config.horizon
    if x.min() < floor:
        i = int(np.argmin(x)) + 1
        raise ExtractionRefused(
            f"{seq.name}: x_{i} = {x[i - 1]:.6g} below {floor:.6g}; prefix looks unbounded below"
        )
    future_min = np.minimum.accumulate(x[::-1])[::-1]
    later_min = np.append(future_min[1:], np.inf)
    chain = np.flatnonzero(x <= later_min)

    width_target = min(config.epsilon_grid)
    lo, hi = float(x.min()), float(x.max())
    members = np.ones(x.size, dtype=bool)
    while hi - lo >= width_target:
        mid = lo + (hi - lo) / 2
        lower = members & (x <= mid)
        upper = members & (x > mid)
        if np.count_nonzero(upper) > np.count_nonzero(lower):
            members, lo = upper, mid
        else:
            members, hi = lower, mid
    cluster = np.flatnonzero(members)

    picked = chain if chain.size > cluster.size else cluster
    if picked.size < 2:
        raise ExtractionRefused(f"{seq.name}: prefix too short to extract a subsequence")
    return IndexMap.from_indices(picked + 1, name=f"extract({seq.name})")
