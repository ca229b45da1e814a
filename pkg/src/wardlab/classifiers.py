"""Finite-horizon classifiers for the quasi-Cauchy family of sequence classes.

All one-sided conditions use the closed threshold ``>= eps``. Tail-window
checks look at ``[N/2, N]``. A tail-window verdict that would claim a class
whose density-level consequence is not itself satisfied at the same config is
reported as inconclusive, so verdicts never contradict the class implications
(quasi-Cauchy => statistically quasi-Cauchy => both one-sided classes, upward
half Cauchy => statistically upward half quasi-Cauchy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence as Seq

import numpy as np

from .density import AnalysisConfig, Status, Verdict, combine_all, combine_any, mask_verdict
from .errors import ConfigError
from .methods import ordinary_limit, statistical_limit_estimate, tail_start
from .sequences import Sequence

__all__ = [
    "SEQUENCE_CLASSES",
    "ClassReport",
    "fit_config",
    "stat_upward_hqc_verdict",
    "stat_downward_hqc_verdict",
    "stat_qc_verdict",
    "half_stat_qc_verdict",
    "quasi_cauchy_verdict",
    "up_half_qc_verdict",
    "down_half_qc_verdict",
    "up_half_cauchy_verdict",
    "down_half_cauchy_verdict",
    "cauchy_verdict",
    "slowly_oscillating_verdict",
    "classify",
]

SEQUENCE_CLASSES = (
    "convergent",
    "cauchy",
    "quasiCauchy",
    "statConvergent",
    "statQuasiCauchy",
    "upHalfQuasiCauchy",
    "downHalfQuasiCauchy",
    "statUpHalfQuasiCauchy",
    "statDownHalfQuasiCauchy",
    "halfStatQuasiCauchy",
    "upHalfCauchy",
    "downHalfCauchy",
    "slowlyOscillating",
)


def fit_config(seq: Sequence, config: AnalysisConfig) -> tuple[AnalysisConfig, str]:
    """Clip the horizon so that ``x_{N+1}`` exists for finite sequences."""
    if seq.length is None or seq.length > config.horizon:
        return config, ""
    if seq.length < 2:
        raise ConfigError(f"{seq.name}: need at least two terms, have {seq.length}")
    clipped = seq.length - 1
    return config.with_horizon(clipped), f"horizon clipped to {clipped} (finite data of length {seq.length})"


def _steps(seq: Sequence, horizon: int) -> tuple[np.ndarray, np.ndarray]:
    """``(x_k - x_{k+1}, x_{k+1} - x_k)`` for ``k = 1..N``."""
    x = seq.head(horizon + 1)
    return x[:-1] - x[1:], x[1:] - x[:-1]


def _per_eps(values: np.ndarray, config: AnalysisConfig, what: str, label: str) -> Verdict:
    per_eps = [mask_verdict(values >= eps, config, eps, f"{what} >= {eps:g}") for eps in config.epsilon_grid]
    return combine_all(per_eps, label)


def stat_upward_hqc_verdict(seq: Sequence, config: AnalysisConfig) -> Verdict:
    """Density of ``{k : x_k - x_{k+1} >= eps}`` for every eps in the grid."""
    down, _ = _steps(seq, config.horizon)
    return _per_eps(down, config, "x_k - x_{k+1}", "statUpHalfQuasiCauchy")


def stat_downward_hqc_verdict(seq: Sequence, config: AnalysisConfig) -> Verdict:
    _, up = _steps(seq, config.horizon)
    return _per_eps(up, config, "x_{k+1} - x_k", "statDownHalfQuasiCauchy")


def half_stat_qc_verdict(seq: Sequence, config: AnalysisConfig) -> Verdict:
    """Either one-sided statistical class (or both)."""
    return combine_any(
        [stat_upward_hqc_verdict(seq, config), stat_downward_hqc_verdict(seq, config)],
        "halfStatQuasiCauchy",
    )


def stat_qc_verdict(seq: Sequence, config: AnalysisConfig) -> Verdict:
    down, _ = _steps(seq, config.horizon)
    verdict = _per_eps(np.abs(down), config, "|x_k - x_{k+1}|", "statQuasiCauchy")
    if verdict.satisfied:
        for side in (stat_upward_hqc_verdict(seq, config), stat_downward_hqc_verdict(seq, config)):
            if not side.satisfied:
                return verdict.downgraded(f"{side.label} is {side.status}")
    return verdict


def _tail_max_verdict(
    values: np.ndarray, config: AnalysisConfig, label: str, what: str
) -> Verdict:
    """Judge ``values_k -> 0`` (from above) on the tail window of ``k = 1..N``."""
    horizon = values.size
    start = tail_start(horizon)
    tail = values[start - 1 :]
    peak = float(tail.max())
    note = f"max {what} over tail [{start}, {horizon}] = {peak:.6g}"
    if peak <= config.pass_tolerance:
        return Verdict(Status.SATISFIED, horizon, note=note, metric=peak, label=label)
    hits = np.flatnonzero(tail >= config.fail_threshold)
    if hits.size:
        witnesses = tuple(int(i) + start for i in hits[-10:])
        return Verdict(Status.VIOLATED, horizon, witness_indices=witnesses, note=note, metric=peak, label=label)
    return Verdict(Status.INCONCLUSIVE, horizon, note=note, metric=peak, label=label)


def _guarded(verdict: Verdict, implied: Verdict) -> Verdict:
    if verdict.satisfied and not implied.satisfied:
        return verdict.downgraded(f"implied class {implied.label} is {implied.status}")
    return verdict


def quasi_cauchy_verdict(seq: Sequence, config: AnalysisConfig) -> Verdict:
    down, _ = _steps(seq, config.horizon)
    verdict = _tail_max_verdict(np.abs(down), config, "quasiCauchy", "|Δx_k|")
    return _guarded(verdict, stat_qc_verdict(seq, config)) if verdict.satisfied else verdict


def up_half_qc_verdict(seq: Sequence, config: AnalysisConfig) -> Verdict:
    """Eventually ``x_k - x_{k+1} < eps``."""
    down, _ = _steps(seq, config.horizon)
    verdict = _tail_max_verdict(down, config, "upHalfQuasiCauchy", "x_k - x_{k+1}")
    return _guarded(verdict, stat_upward_hqc_verdict(seq, config)) if verdict.satisfied else verdict


def down_half_qc_verdict(seq: Sequence, config: AnalysisConfig) -> Verdict:
    _, up = _steps(seq, config.horizon)
    verdict = _tail_max_verdict(up, config, "downHalfQuasiCauchy", "x_{k+1} - x_k")
    return _guarded(verdict, stat_downward_hqc_verdict(seq, config)) if verdict.satisfied else verdict


def _half_cauchy(seq: Sequence, config: AnalysisConfig, upward: bool) -> Verdict:
    x = seq.head(config.horizon)
    start = tail_start(x.size)
    tail = x[start - 1 :]
    if upward:
        # x_n - min_{m >= n} x_m, future minimum running backwards from the horizon
        gap = tail - np.minimum.accumulate(tail[::-1])[::-1]
        label, what = "upHalfCauchy", "x_n - min_{m>=n} x_m"
    else:
        gap = np.maximum.accumulate(tail[::-1])[::-1] - tail
        label, what = "downHalfCauchy", "max_{m>=n} x_m - x_n"
    peak = float(gap.max())
    note = f"max {what} over tail [{start}, {x.size}] = {peak:.6g}"
    if peak <= config.pass_tolerance:
        verdict = Verdict(Status.SATISFIED, x.size, note=note, metric=peak, label=label)
        implied = (stat_upward_hqc_verdict if upward else stat_downward_hqc_verdict)(seq, config)
        return _guarded(verdict, implied)
    if peak > config.fail_threshold:
        hits = np.flatnonzero(gap > config.fail_threshold)
        witnesses = tuple(int(i) + start for i in hits[-10:])
        return Verdict(Status.VIOLATED, x.size, witness_indices=witnesses, note=note, metric=peak, label=label)
    return Verdict(Status.INCONCLUSIVE, x.size, note=note, metric=peak, label=label)


def up_half_cauchy_verdict(seq: Sequence, config: AnalysisConfig) -> Verdict:
    """``x_n - x_m < eps`` for ``m >= n`` in the tail window."""
    return _half_cauchy(seq, config, upward=True)


def down_half_cauchy_verdict(seq: Sequence, config: AnalysisConfig) -> Verdict:
    return _half_cauchy(seq, config, upward=False)


def cauchy_verdict(seq: Sequence, config: AnalysisConfig) -> Verdict:
    """Tail oscillation ``max - min`` over ``[N/2, N]``."""
    x = seq.head(config.horizon)
    start = tail_start(x.size)
    tail = x[start - 1 :]
    osc = float(tail.max() - tail.min())
    note = f"oscillation over tail [{start}, {x.size}] = {osc:.6g}"
    if osc <= config.pass_tolerance:
        return Verdict(Status.SATISFIED, x.size, note=note, metric=osc, label="cauchy")
    if osc > config.fail_threshold:
        witnesses = tuple(sorted({start + int(np.argmax(tail)), start + int(np.argmin(tail))}))
        return Verdict(Status.VIOLATED, x.size, witness_indices=witnesses, note=note, metric=osc, label="cauchy")
    return Verdict(Status.INCONCLUSIVE, x.size, note=note, metric=osc, label="cauchy")


class _RangeExtrema:
    """Sparse tables answering max/min over ``x[lo..hi]`` (0-based, inclusive) in O(1)."""

    def __init__(self, x: np.ndarray):
        self.hi_tab = [x]
        self.lo_tab = [x]
        span = 1
        while 2 * span <= x.size:
            prev_hi, prev_lo = self.hi_tab[-1], self.lo_tab[-1]
            self.hi_tab.append(np.maximum(prev_hi[:-span], prev_hi[span:]))
            self.lo_tab.append(np.minimum(prev_lo[:-span], prev_lo[span:]))
            span *= 2

    def query(self, lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        level = np.floor(np.log2(hi - lo + 1)).astype(np.int64)
        top = np.empty(lo.shape)
        bottom = np.empty(lo.shape)
        for j in np.unique(level):
            sel = level == j
            right = hi[sel] - (1 << int(j)) + 1
            top[sel] = np.maximum(self.hi_tab[j][lo[sel]], self.hi_tab[j][right])
            bottom[sel] = np.minimum(self.lo_tab[j][lo[sel]], self.lo_tab[j][right])
        return top, bottom


def _window_sup(x: np.ndarray, table: _RangeExtrema, lam: float, n_lo: int, n_hi: int) -> tuple[float, int]:
    """``sup_{n_lo <= n <= n_hi} max_{n < k <= [lam n]} |x_k - x_n|`` and its argmax n."""
    if n_hi < n_lo:
        return 0.0, n_lo
    n = np.arange(n_lo, n_hi + 1, dtype=np.int64)
    right = np.minimum(np.floor(lam * n).astype(np.int64), x.size)
    ok = right >= n + 1
    if not ok.any():
        return 0.0, n_lo
    n, right = n[ok], right[ok]
    top, bottom = table.query(n, right - 1)  # 0-based window [n+1, right] in 1-based terms
    xn = x[n - 1]
    spread = np.maximum(top - xn, xn - bottom)
    i = int(np.argmax(spread))
    return float(spread[i]), int(n[i])


def slowly_oscillating_verdict(
    seq: Sequence, config: AnalysisConfig, lambda_grid: Iterable[float] | None = None
) -> Verdict:
    """Window oscillation ``max_{n < k <= [lam n]} |x_k - x_n|`` as lam decreases toward 1.

    For each lam the supremum is taken over ``n in [N/(2 lam), N/lam]`` (the
    late range, windows never pass the horizon) and over the preceding early
    range ``[N/(4 lam), N/(2 lam))``. The outer limit lam -> 1+ is estimated by
    linear extrapolation in ``log lam`` through the two smallest grid points;
    a late/early ratio above 1.2 at the smallest lam signals window
    oscillation growing with n (no finite limsup).
    """
    grid = tuple(config.lambda_grid if lambda_grid is None else lambda_grid)
    if not grid or any(not 1 < v <= 2 for v in grid) or any(a <= b for a, b in zip(grid, grid[1:])):
        raise ConfigError("lambda grid must lie in (1, 2] sorted strictly descending")
    horizon = config.horizon
    x = seq.head(horizon)
    table = _RangeExtrema(x)
    late, early, argmax_n = [], [], []
    for lam in grid:
        n_lo, n_hi = math.ceil(horizon / (2 * lam)), math.floor(horizon / lam)
        g, arg = _window_sup(x, table, lam, max(n_lo, 1), n_hi)
        e, _ = _window_sup(x, table, lam, max(math.ceil(horizon / (4 * lam)), 1), n_lo - 1)
        late.append(g)
        early.append(e)
        argmax_n.append(arg)
    profile = tuple(zip(grid, late))
    if len(grid) >= 2:
        (l1, g1), (l2, g2) = profile[-2], profile[-1]
        slope = (g1 - g2) / (math.log(l1) - math.log(l2))
        intercept = g2 - slope * math.log(l2)
    else:
        intercept = late[-1]
    g_min, e_min = late[-1], early[-1]
    if e_min > 0:
        growth = g_min / e_min
    else:
        growth = math.inf if g_min > 0 else 1.0
    monotone = all(b <= a * (1 + 1e-9) + 1e-12 for a, b in zip(late, late[1:]))
    note = (
        f"window sup by lambda {', '.join(f'{l:g}:{g:.4g}' for l, g in profile)}; "
        f"extrapolated lambda->1+ value {intercept:.4g}; late/early growth {growth:.3g}"
    )
    grows = growth >= 1.2 and g_min >= config.fail_threshold
    if monotone and intercept <= config.pass_tolerance and (growth <= 1.1 or g_min <= config.pass_tolerance):
        status, witnesses = Status.SATISFIED, ()
    elif intercept >= config.fail_threshold or grows:
        status, witnesses = Status.VIOLATED, (argmax_n[-1],)
    else:
        status, witnesses = Status.INCONCLUSIVE, ()
    return Verdict(status, horizon, witness_indices=witnesses, note=note, metric=float(intercept),
                   profile=profile, label="slowlyOscillating")


@dataclass(frozen=True)
class ClassReport:
    sequence_name: str
    entries: dict[str, Verdict]
    config: AnalysisConfig
    note: str = ""

    def __getitem__(self, label: str) -> Verdict:
        return self.entries[label]

    def satisfied_labels(self) -> set[str]:
        return {k for k, v in self.entries.items() if v.satisfied}


def _dispatch(label: str, seq: Sequence, config: AnalysisConfig) -> Verdict:
    if label == "convergent":
        return replace(ordinary_limit(seq, config).verdict, label=label)
    if label == "statConvergent":
        mv = statistical_limit_estimate(seq, config)
        v = mv.verdict
        return replace(v, label=label, note=f"candidate l = {mv.limit_estimate:.10g}; {v.note}")
    table = {
        "cauchy": cauchy_verdict,
        "quasiCauchy": quasi_cauchy_verdict,
        "statQuasiCauchy": stat_qc_verdict,
        "upHalfQuasiCauchy": up_half_qc_verdict,
        "downHalfQuasiCauchy": down_half_qc_verdict,
        "statUpHalfQuasiCauchy": stat_upward_hqc_verdict,
        "statDownHalfQuasiCauchy": stat_downward_hqc_verdict,
        "halfStatQuasiCauchy": half_stat_qc_verdict,
        "upHalfCauchy": up_half_cauchy_verdict,
        "downHalfCauchy": down_half_cauchy_verdict,
        "slowlyOscillating": slowly_oscillating_verdict,
    }
    try:
        fn = table[label]
    except KeyError:
        raise ConfigError(f"unknown sequence class {label!r}") from None
    return fn(seq, config)


def classify(
    seq: Sequence, labels: Seq[str] | None = None, config: AnalysisConfig | None = None
) -> ClassReport:
    """One verdict per requested class label (all classes by default)."""
    config = config or AnalysisConfig()
    labels = list(SEQUENCE_CLASSES if labels is None else labels)
    if not labels:
        raise ConfigError("no class labels requested")
    unknown = [l for l in labels if l not in SEQUENCE_CLASSES]
    if unknown:
        raise ConfigError(f"unknown sequence class(es): {', '.join(unknown)}")
    config, note = fit_config(seq, config)
    entries = {label: _dispatch(label, seq, config) for label in labels}
    return ClassReport(seq.name, entries, config, note)
