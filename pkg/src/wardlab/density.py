"""Natural-density counting and finite-horizon verdicts.

Every "(1/n)|{k <= n : ...}| -> 0" statement is judged at a finite horizon N
from a trace of exact rational densities at geometrically spaced checkpoints.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Sequence as Seq

import numpy as np

from .errors import ConfigError

__all__ = [
    "Status",
    "AnalysisConfig",
    "IndexPredicate",
    "DensityTrace",
    "Verdict",
    "checkpoints",
    "counting_density",
    "density_limit_verdict",
    "mask_verdict",
    "combine_all",
    "combine_any",
    "HORIZON_ENV",
]

HORIZON_ENV = "WARDLAB_DEFAULT_HORIZON"
MAX_WITNESSES = 10
FIRST_CHECKPOINT = 16


class Status(str, Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class AnalysisConfig:
    horizon: int = 100_000
    epsilon_grid: tuple[float, ...] = (1.0, 0.5, 0.1, 0.01)
    pass_tolerance: float = 0.02
    fail_threshold: float = 0.2
    checkpoint_count: int | None = None
    lambda_grid: tuple[float, ...] = (2.0, 1.5, 1.2, 1.1, 1.05)

    def __post_init__(self):
        object.__setattr__(self, "epsilon_grid", tuple(float(e) for e in self.epsilon_grid))
        object.__setattr__(self, "lambda_grid", tuple(float(v) for v in self.lambda_grid))
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        if not self.epsilon_grid or any(e <= 0 for e in self.epsilon_grid):
            raise ConfigError("epsilon grid must be non-empty and strictly positive")
        if any(a <= b for a, b in zip(self.epsilon_grid, self.epsilon_grid[1:])):
            raise ConfigError("epsilon grid must be sorted strictly descending")
        if not 0 < self.pass_tolerance < self.fail_threshold:
            raise ConfigError("need 0 < pass tolerance < fail threshold")
        if self.checkpoint_count is not None and self.checkpoint_count < 1:
            raise ConfigError("checkpoint count must be positive")
        if not self.lambda_grid or any(not 1 < v <= 2 for v in self.lambda_grid):
            raise ConfigError("lambda grid values must lie in (1, 2]")
        if any(a <= b for a, b in zip(self.lambda_grid, self.lambda_grid[1:])):
            raise ConfigError("lambda grid must be sorted strictly descending")

    def with_horizon(self, horizon: int) -> "AnalysisConfig":
        return replace(self, horizon=int(horizon))

    @classmethod
    def from_env(cls, **overrides) -> "AnalysisConfig":
        """Defaults, with the horizon taken from ``WARDLAB_DEFAULT_HORIZON`` when set."""
        raw = os.environ.get(HORIZON_ENV)
        if raw and "horizon" not in overrides:
            try:
                overrides["horizon"] = int(raw)
            except ValueError:
                raise ConfigError(f"{HORIZON_ENV} must be an integer, got {raw!r}") from None
        return cls(**overrides)

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "epsilonGrid": list(self.epsilon_grid),
            "passTolerance": self.pass_tolerance,
            "failThreshold": self.fail_threshold,
            "lambdaGrid": list(self.lambda_grid),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AnalysisConfig":
        return cls(
            horizon=data["horizon"],
            epsilon_grid=tuple(data["epsilonGrid"]),
            pass_tolerance=data["passTolerance"],
            fail_threshold=data["failThreshold"],
            lambda_grid=tuple(data["lambdaGrid"]),
        )


class IndexPredicate:
    """A deterministic test on positive indices.

    ``test`` is either scalar (``int -> bool``) or, with ``vectorized=True``,
    maps an int64 index array to a boolean array.
    """

    def __init__(self, test: Callable, description: str = "", *, vectorized: bool = False):
        self._test = test
        self.description = description
        self._vectorized = vectorized

    def __call__(self, k: int) -> bool:
        return bool(self.mask_at(np.array([k], dtype=np.int64))[0])

    def mask_at(self, idx: np.ndarray) -> np.ndarray:
        if self._vectorized:
            return np.asarray(self._test(idx), dtype=bool).reshape(idx.shape)
        return np.fromiter((bool(self._test(int(k))) for k in idx), dtype=bool, count=idx.size)

    def mask(self, n: int) -> np.ndarray:
        """Membership of indices ``1..n``."""
        return self.mask_at(np.arange(1, n + 1, dtype=np.int64))

    @classmethod
    def from_mask(cls, mask: np.ndarray, description: str = "") -> "IndexPredicate":
        """Predicate over a precomputed membership array (index k -> mask[k-1])."""
        mask = np.asarray(mask, dtype=bool)

        def test(idx):
            out = np.zeros(idx.shape, dtype=bool)
            inside = idx <= mask.size
            out[inside] = mask[idx[inside] - 1]
            return out

        return cls(test, description, vectorized=True)


def squares() -> IndexPredicate:
    def test(idx):
        r = np.floor(np.sqrt(idx.astype(float))).astype(np.int64)
        # float sqrt can land one below the true root for large squares
        r = np.where((r + 1) * (r + 1) <= idx, r + 1, r)
        return r * r == idx

    return IndexPredicate(test, "perfect squares", vectorized=True)


def evens() -> IndexPredicate:
    return IndexPredicate(lambda idx: idx % 2 == 0, "even indices", vectorized=True)


def from_index_file(indices: Iterable[int], description: str) -> IndexPredicate:
    members = np.unique(np.asarray(list(indices), dtype=np.int64))
    return IndexPredicate(lambda idx: np.isin(idx, members), description, vectorized=True)


@dataclass(frozen=True)
class DensityTrace:
    """Checkpoints ``(n, count)`` with ``count = |{k <= n : P(k)}|``."""

    checkpoints: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        ns = [n for n, _ in self.checkpoints]
        if any(a >= b for a, b in zip(ns, ns[1:])):
            raise ValueError("checkpoints must be strictly increasing")
        for n, c in self.checkpoints:
            if n < 1 or not 0 <= c <= n:
                raise ValueError(f"bad checkpoint ({n}, {c})")

    @property
    def densities(self) -> list[Fraction]:
        return [Fraction(c, n) for n, c in self.checkpoints]

    @property
    def final_density(self) -> Fraction | None:
        if not self.checkpoints:
            return None
        n, c = self.checkpoints[-1]
        return Fraction(c, n)

    def __len__(self) -> int:
        return len(self.checkpoints)


@dataclass(frozen=True)
class Verdict:
    status: Status
    horizon: int
    epsilon: float | None = None
    witness_indices: tuple[int, ...] = ()
    trace: DensityTrace = field(default_factory=DensityTrace)
    note: str = ""
    metric: float | None = None
    tail_density: Fraction | None = None
    components: tuple["Verdict", ...] = ()
    witness_sequence: str | None = None
    profile: tuple[tuple[float, float], ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "status", Status(self.status))
        if self.status is Status.VIOLATED and not self.witness_indices:
            raise ValueError("a violated verdict must carry witness indices")
        if self.trace.checkpoints and self.trace.checkpoints[-1][0] > self.horizon:
            raise ValueError("trace extends beyond the horizon")

    @property
    def satisfied(self) -> bool:
        return self.status is Status.SATISFIED

    @property
    def violated(self) -> bool:
        return self.status is Status.VIOLATED

    @property
    def inconclusive(self) -> bool:
        return self.status is Status.INCONCLUSIVE

    @property
    def final_density(self) -> Fraction | None:
        return self.trace.final_density

    def downgraded(self, reason: str) -> "Verdict":
        """Same evidence, reported as inconclusive."""
        note = f"{self.note}; {reason}" if self.note else reason
        return replace(self, status=Status.INCONCLUSIVE, note=note)

    def component_for(self, epsilon: float) -> "Verdict":
        for c in self.components:
            if c.epsilon == epsilon:
                return c
        if self.epsilon == epsilon:
            return self
        raise KeyError(epsilon)


def checkpoints(horizon: int, count: int | None = None) -> list[int]:
    """Geometric checkpoints (ratio 2 by default) from 16 up to and including ``horizon``."""
    if horizon <= FIRST_CHECKPOINT:
        return [horizon]
    if count is None:
        pts = []
        n = FIRST_CHECKPOINT
        while n < horizon:
            pts.append(n)
            n *= 2
        pts.append(horizon)
        return pts
    if count == 1:
        return [horizon]
    raw = np.geomspace(FIRST_CHECKPOINT, horizon, count)
    pts = sorted({int(round(v)) for v in raw} | {horizon})
    return [p for p in pts if p <= horizon]


def counting_density(pred: IndexPredicate, n: int) -> Fraction:
    """``|{k <= n : pred(k)}| / n`` exactly."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Fraction(int(np.count_nonzero(pred.mask(n))), n)


def _non_increasing(values: Seq[Fraction]) -> bool:
    return all(b <= a for a, b in zip(values, values[1:]))


def mask_verdict(
    mask: np.ndarray,
    config: AnalysisConfig,
    epsilon: float | None = None,
    label: str = "",
) -> Verdict:
    """Density verdict for the index set whose membership over ``1..N`` is ``mask``."""
    horizon = int(mask.size)
    if horizon < 1:
        raise ValueError("empty mask")
    counts = np.cumsum(mask, dtype=np.int64)
    cps = checkpoints(horizon, config.checkpoint_count)
    trace = DensityTrace(tuple((n, int(counts[n - 1])) for n in cps))
    dens = trace.densities
    final = dens[-1]
    half = horizon // 2
    tail = Fraction(int(counts[-1]) - (int(counts[half - 1]) if half else 0), horizon - half)
    trending_down = _non_increasing(dens[len(dens) // 2:])
    pass_tol = Fraction(config.pass_tolerance)
    fail_tol = Fraction(config.fail_threshold)

    if trending_down and (final <= pass_tol or tail <= pass_tol):
        status = Status.SATISFIED
        witnesses: tuple[int, ...] = ()
    elif final >= fail_tol and tail >= fail_tol:
        status = Status.VIOLATED
        members = np.flatnonzero(mask)
        witnesses = tuple(int(i) + 1 for i in members[-MAX_WITNESSES:])
    else:
        status = Status.INCONCLUSIVE
        witnesses = ()
    note = f"final density {float(final):.6g}, tail-window density {float(tail):.6g}"
    if not trending_down:
        note += ", trace not non-increasing over last half"
    return Verdict(
        status=status,
        horizon=horizon,
        epsilon=epsilon,
        witness_indices=witnesses,
        trace=trace,
        note=note,
        metric=float(final),
        tail_density=tail,
        label=label,
    )


def density_limit_verdict(
    pred: IndexPredicate,
    config: AnalysisConfig,
    epsilon: float | None = None,
) -> Verdict:
    """Judge ``lim (1/n)|{k <= n : pred(k)}| = 0`` at the configured horizon."""
    return mask_verdict(pred.mask(config.horizon), config, epsilon, pred.description)


def _merge(rep: Verdict, verdicts: Seq[Verdict], status: Status, label: str) -> Verdict:
    return replace(rep, status=status, components=tuple(verdicts), label=label or rep.label)


def combine_all(verdicts: Seq[Verdict], label: str = "") -> Verdict:
    """Conjunction: satisfied iff all are, violated if any is."""
    if not verdicts:
        raise ValueError("nothing to combine")
    for v in verdicts:
        if v.violated:
            return _merge(v, verdicts, Status.VIOLATED, label)
    if all(v.satisfied for v in verdicts):
        return _merge(verdicts[-1], verdicts, Status.SATISFIED, label)
    rep = next(v for v in verdicts if not v.satisfied)
    return _merge(rep, verdicts, Status.INCONCLUSIVE, label)


def combine_any(verdicts: Seq[Verdict], label: str = "") -> Verdict:
    """Disjunction: satisfied if any is, violated iff all are."""
    if not verdicts:
        raise ValueError("nothing to combine")
    for v in verdicts:
        if v.satisfied:
            return _merge(v, verdicts, Status.SATISFIED, label)
    if all(v.violated for v in verdicts):
        return _merge(verdicts[0], verdicts, Status.VIOLATED, label)
    rep = next(v for v in verdicts if v.inconclusive)
    return _merge(rep, verdicts, Status.INCONCLUSIVE, label)
