"""Sequential convergence methods: ordinary, statistical, S_theta and N_theta."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence as Seq

import numpy as np

from .density import AnalysisConfig, Status, Verdict, combine_all, mask_verdict
from .errors import ConfigError, RangeError
from .sequences import Sequence

__all__ = [
    "LacunaryScheme",
    "MethodVerdict",
    "RegularityReport",
    "tail_start",
    "ordinary_limit",
    "statistical_limit_verdict",
    "statistical_limit_estimate",
    "ntheta_verdict",
    "lacunary_statistical_verdict",
    "fibonacci_scheme",
    "fibonacci_scheme_covering",
    "regularity_spotcheck",
    "METHODS",
]

DELTA_Q = 0.05
_INT64_MAX = int(np.iinfo(np.int64).max)


def tail_start(horizon: int) -> int:
    """First index of the tail window ``[N/2, N]``."""
    return max(1, (horizon + 1) // 2)


@dataclass(frozen=True)
class LacunaryScheme:
    """Boundaries ``0 = k_0 < k_1 < ... < k_R`` with blocks ``I_r = (k_{r-1}, k_r]``."""

    boundaries: tuple[int, ...]
    delta_q: float = DELTA_Q
    name: str = "theta"

    def __post_init__(self):
        b = tuple(int(v) for v in self.boundaries)
        object.__setattr__(self, "boundaries", b)
        if len(b) < 2 or b[0] != 0:
            raise ConfigError("a lacunary scheme needs k_0 = 0 and at least one block")
        if any(x >= y for x, y in zip(b, b[1:])):
            raise ConfigError("lacunary boundaries must be strictly increasing")
        if b[-1] > _INT64_MAX:
            raise RangeError("lacunary boundary exceeds the int64 index range")
        for r, q in enumerate(self.ratios, start=2):
            if q < 1 + Fraction(self.delta_q):
                raise ConfigError(f"ratio q_{r} = {float(q):.4g} below 1 + {self.delta_q}")

    @property
    def blocks(self) -> list[tuple[int, int]]:
        """Half-open blocks as ``(k_{r-1}, k_r)``."""
        return list(zip(self.boundaries, self.boundaries[1:]))

    @property
    def lengths(self) -> list[int]:
        return [b - a for a, b in self.blocks]

    @property
    def ratios(self) -> list[Fraction]:
        """``q_r = k_r / k_{r-1}`` for ``r >= 2``."""
        b = self.boundaries
        return [Fraction(b[r], b[r - 1]) for r in range(2, len(b))]

    def complete_blocks(self, horizon: int) -> list[tuple[int, int]]:
        if self.boundaries[-1] < horizon:
            raise ConfigError(
                f"scheme {self.name} ends at {self.boundaries[-1]}, short of horizon {horizon}"
            )
        blocks = [(a, b) for a, b in self.blocks if b <= horizon]
        if not blocks:
            raise ConfigError(f"no complete block of {self.name} within horizon {horizon}")
        return blocks


def fibonacci_scheme(r_max: int) -> LacunaryScheme:
    """``k_0 = 0, k_r = F_{r+2}`` with ``F_1 = F_2 = 1``."""
    if r_max < 2:
        raise ConfigError("the Fibonacci scheme needs R >= 2")
    fib = [0, 1, 1]  # fib[i] = F_i
    while len(fib) < r_max + 3:
        fib.append(fib[-1] + fib[-2])
    bounds = [0] + fib[3 : r_max + 3]
    if bounds[-1] > _INT64_MAX:
        raise RangeError(f"F_{r_max + 2} exceeds the int64 index range")
    return LacunaryScheme(tuple(bounds), name=f"fib:{r_max}")


def fibonacci_scheme_covering(horizon: int) -> LacunaryScheme:
    """Smallest Fibonacci scheme whose last boundary reaches ``horizon``."""
    a, b, r = 1, 2, 1  # F_{r+1}, F_{r+2}
    while b < horizon or r < 2:
        a, b, r = b, a + b, r + 1
    return fibonacci_scheme(r)


@dataclass(frozen=True)
class MethodVerdict:
    method: str
    limit_estimate: float | None
    verdict: Verdict

    def __post_init__(self):
        if self.verdict.satisfied and self.limit_estimate is None:
            raise ValueError("a satisfied method verdict needs a limit estimate")

    @property
    def status(self) -> Status:
        return self.verdict.status


def _tail(x: np.ndarray) -> tuple[int, np.ndarray]:
    start = tail_start(x.size)
    return start, x[start - 1 :]


def statistical_limit_verdict(seq: Sequence, ell: float, config: AnalysisConfig) -> MethodVerdict:
    x = seq.head(config.horizon)
    dev = np.abs(x - ell)
    per_eps = [
        mask_verdict(dev >= eps, config, eps, f"|x_k - {ell:g}| >= {eps:g}")
        for eps in config.epsilon_grid
    ]
    return MethodVerdict("statistical", float(ell), combine_all(per_eps, "statistical"))


def statistical_limit_estimate(seq: Sequence, config: AnalysisConfig) -> MethodVerdict:
    """Candidate limit = median of the tail window, then the statistical verdict there."""
    _, tail = _tail(seq.head(config.horizon))
    return statistical_limit_verdict(seq, float(np.median(tail)), config)


def ordinary_limit(seq: Sequence, config: AnalysisConfig) -> MethodVerdict:
    """Ordinary limit judged on the tail window, estimate = value at the horizon."""
    x = seq.head(config.horizon)
    ell = float(x[-1])
    start, tail = _tail(x)
    dev = np.abs(tail - ell)
    osc = float(tail.max() - tail.min())
    note = f"tail [{start}, {x.size}]: max |x_k - l| = {dev.max():.6g}, oscillation {osc:.6g}"
    if dev.max() <= config.pass_tolerance:
        verdict = Verdict(Status.SATISFIED, x.size, note=note, metric=float(dev.max()), label="ordinary")
        # finite regularity: a convergent verdict must also hold statistically at the same limit
        stat = statistical_limit_verdict(seq, ell, config).verdict
        if not stat.satisfied:
            verdict = verdict.downgraded(f"statistical verdict at l is {stat.status}")
    elif osc > config.fail_threshold:
        witnesses = tuple(sorted({start + int(np.argmax(tail)), start + int(np.argmin(tail))}))
        verdict = Verdict(
            Status.VIOLATED, x.size, witness_indices=witnesses, note=note, metric=osc, label="ordinary"
        )
    else:
        verdict = Verdict(Status.INCONCLUSIVE, x.size, note=note, metric=float(dev.max()), label="ordinary")
    return MethodVerdict("ordinary", ell, verdict)


def _final_half(blocks: Seq[tuple[int, int]]) -> int:
    """Position of the first block meeting the tail half of the covered range."""
    end = blocks[-1][1]
    for i, (_, b) in enumerate(blocks):
        if 2 * b > end:
            return i
    return len(blocks) - 1


def _block_verdict(
    values: Seq, blocks: Seq[tuple[int, int]], members: np.ndarray, config: AnalysisConfig,
    epsilon: float | None, label: str, horizon: int,
) -> Verdict:
    first = _final_half(blocks)
    profile = tuple((b, float(v)) for (_, b), v in zip(blocks, values))
    tail_vals = values[first:]
    note = f"{len(blocks)} blocks, final-half from block {first + 1}, final value {float(values[-1]):.6g}"
    if all(v <= config.pass_tolerance for v in tail_vals):
        return Verdict(Status.SATISFIED, horizon, epsilon, note=note, metric=float(values[-1]),
                       profile=profile, label=label)
    if values[-1] >= config.fail_threshold:
        a, b = blocks[-1]
        hits = np.flatnonzero(members[a:b]) + a + 1
        witnesses = tuple(int(i) for i in hits[-10:]) or (b,)
        return Verdict(Status.VIOLATED, horizon, epsilon, witness_indices=witnesses, note=note,
                       metric=float(values[-1]), profile=profile, label=label)
    return Verdict(Status.INCONCLUSIVE, horizon, epsilon, note=note, metric=float(values[-1]),
                   profile=profile, label=label)


def ntheta_verdict(
    seq: Sequence, scheme: LacunaryScheme, ell: float, config: AnalysisConfig
) -> MethodVerdict:
    """Block means ``(1/h_r) sum_{k in I_r} |x_k - l|`` over the complete blocks."""
    blocks = scheme.complete_blocks(config.horizon)
    x = seq.head(blocks[-1][1])
    dev = np.abs(x - ell)
    starts = np.array([a for a, _ in blocks], dtype=np.int64)
    lengths = np.array([b - a for a, b in blocks], dtype=float)
    means = np.add.reduceat(dev, starts) / lengths
    verdict = _block_verdict(
        means, blocks, dev >= config.fail_threshold, config, None, f"N_theta({scheme.name})",
        config.horizon,
    )
    return MethodVerdict("ntheta", float(ell), verdict)


def lacunary_statistical_verdict(
    seq: Sequence, scheme: LacunaryScheme, ell: float, config: AnalysisConfig
) -> MethodVerdict:
    """Block fractions ``(1/h_r)|{k in I_r : |x_k - l| >= eps}|`` for each eps."""
    blocks = scheme.complete_blocks(config.horizon)
    x = seq.head(blocks[-1][1])
    dev = np.abs(x - ell)
    per_eps = []
    for eps in config.epsilon_grid:
        members = dev >= eps
        counts = np.add.reduceat(members.astype(np.int64), [a for a, _ in blocks])
        fracs = [Fraction(int(c), b - a) for c, (a, b) in zip(counts, blocks)]
        per_eps.append(
            _block_verdict(fracs, blocks, members, config, eps, f"S_theta({scheme.name})", config.horizon)
        )
    return MethodVerdict("stheta", float(ell), combine_all(per_eps, f"S_theta({scheme.name})"))


METHODS = ("ordinary", "statistical", "stheta", "ntheta")


@dataclass(frozen=True)
class RegularityReport:
    method: str
    results: tuple[tuple[str, float, MethodVerdict], ...]

    @property
    def failures(self) -> list[str]:
        return [name for name, _, mv in self.results if not mv.verdict.satisfied]

    @property
    def passed(self) -> bool:
        return not self.failures


def regularity_spotcheck(
    method: str,
    corpus: Iterable[tuple[Sequence, float]],
    config: AnalysisConfig,
    scheme: LacunaryScheme | None = None,
) -> RegularityReport:
    """Run ``method`` on convergent sequences at their known ordinary limits."""
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}")
    if method in ("stheta", "ntheta") and scheme is None:
        scheme = fibonacci_scheme_covering(config.horizon)
    results = []
    for seq, ell in corpus:
        if method == "ordinary":
            mv = ordinary_limit(seq, config)
        elif method == "statistical":
            mv = statistical_limit_verdict(seq, ell, config)
        elif method == "stheta":
            mv = lacunary_statistical_verdict(seq, scheme, ell, config)
        else:
            mv = ntheta_verdict(seq, scheme, ell, config)
        results.append((seq.name, float(ell), mv))
    return RegularityReport(method, tuple(results))
