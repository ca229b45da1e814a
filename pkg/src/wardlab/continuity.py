"""Black-box checks of how real functions act on sequence classes.

A function *preserves* a property ``A -> B`` on a corpus when every corpus
member of class ``A`` is mapped to a member of class ``B``. The eight
properties combine the statistically upward / downward half quasi-Cauchy
classes (``dS+``, ``dS-``) with ordinary convergence (``c``) and statistical
convergence (``st``).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np
from scipy.optimize import minimize_scalar

from . import catalogue
from .classifiers import _dispatch, fit_config, stat_upward_hqc_verdict, stat_downward_hqc_verdict
from .compactness import REALS, RealSet
from .density import AnalysisConfig, Status, Verdict, checkpoints, combine_all
from .errors import ContractError, DomainError, PreconditionError
from .expr import compile_expression
from .methods import statistical_limit_verdict
from .sequences import IndexMap, Sequence, interleave_with_constant, map_values

__all__ = [
    "FunctionUnderTest",
    "PreservationProperty",
    "PROPERTIES",
    "IMPLICATIONS",
    "Corpus",
    "default_corpus",
    "preservation_verdict",
    "LatticeReport",
    "implication_lattice_report",
    "interleave_continuity_check",
    "WitnessPair",
    "uniform_continuity_witness_search",
    "three_sum_decomposition_check",
    "FunctionSequence",
    "UniformLimitResult",
    "uniform_limit_preservation",
    "SHIPPED_FUNCTIONS",
    "COUNTEREXAMPLES",
    "shipped_function",
]

GRID_PER_UNIT = 1024
_UP, _DOWN = "statUpHalfQuasiCauchy", "statDownHalfQuasiCauchy"


@dataclass(frozen=True)
class FunctionUnderTest:
    """Vectorized evaluator ``f`` with its domain."""

    evaluator: Callable[[np.ndarray], np.ndarray]
    domain: RealSet = REALS
    name: str = "f"

    def __call__(self, x):
        return np.asarray(self.evaluator(np.asarray(x, dtype=float)), dtype=float)

    @classmethod
    def from_expression(cls, text: str, domain: RealSet = REALS, name: str | None = None) -> "FunctionUnderTest":
        return cls(compile_expression(text, "x"), domain, name or text)

    def image(self, seq: Sequence) -> Sequence:
        return map_values(seq, self.evaluator, self.name)


@dataclass(frozen=True)
class PreservationProperty:
    label: str
    antecedent: str
    consequent: str


PROPERTIES: dict[str, PreservationProperty] = {
    p.label: p
    for p in (
        PreservationProperty("dS+", _UP, _UP),
        PreservationProperty("dS+c", _UP, "convergent"),
        PreservationProperty("c", "convergent", "convergent"),
        PreservationProperty("cdS+", "convergent", _UP),
        PreservationProperty("st", "statConvergent", "statConvergent"),
        PreservationProperty("dS-", _DOWN, _DOWN),
        PreservationProperty("dS-c", _DOWN, "convergent"),
        PreservationProperty("cdS-", "convergent", _DOWN),
    )
}

# (from, to): a function with property `from` has property `to`
IMPLICATIONS: tuple[tuple[str, str], ...] = (
    ("dS+c", "dS+"),
    ("dS+", "cdS+"),
    ("dS+c", "c"),
    ("c", "cdS+"),
    ("cdS+", "c"),
    ("dS-c", "dS-"),
    ("dS-", "cdS-"),
    ("dS-c", "c"),
    ("c", "cdS-"),
    ("cdS-", "c"),
    ("dS+", "st"),
    ("dS-", "st"),
)


class Corpus:
    """Named test sequences with memoized class verdicts.

    Antecedent verdicts do not depend on the function under test, so one
    corpus can be reused across many functions without reclassifying.
    """

    def __init__(self, sequences: Iterable[Sequence]):
        self.sequences = tuple(sequences)
        names = [s.name for s in self.sequences]
        if len(set(names)) != len(names):
            raise ValueError("corpus sequence names must be unique")
        self._verdicts: dict[tuple[int, str, AnalysisConfig], Verdict] = {}

    def __len__(self) -> int:
        return len(self.sequences)

    def __iter__(self):
        return iter(self.sequences)

    def verdict(self, i: int, label: str, config: AnalysisConfig) -> Verdict:
        key = (i, label, config)
        if key not in self._verdicts:
            seq = self.sequences[i]
            self._verdicts[key] = _dispatch(label, seq, fit_config(seq, config)[0])
        return self._verdicts[key]

    def within(self, domain: RealSet, config: AnalysisConfig) -> "Corpus":
        """Members whose horizon prefix lies in ``domain``."""
        keep = [s for s in self.sequences if _outside(s, domain, config) is None]
        return Corpus(keep)


def _perturbed(base: Sequence, seed: int, amplitude: float) -> Sequence:
    """``base_n + amplitude * u_n / n`` with seeded ``u_n`` uniform on ``[-1, 1]``."""

    def build(n: int) -> np.ndarray:
        noise = np.random.default_rng(seed).uniform(-1.0, 1.0, n)
        return base.head(n) + amplitude * noise / np.arange(1, n + 1)

    return Sequence(prefix=build, name=f"{base.name}~{seed}")


_PERTURBED_BASES = ("identity", "negated-identity", "reciprocal", "alternating-reciprocal", "sqrt", "fibonacci-ratio")
_DEFAULT_CORPUS: Corpus | None = None


def default_corpus() -> Corpus:
    """Catalogue members followed by seeded perturbations of six of them (shared instance)."""
    global _DEFAULT_CORPUS
    if _DEFAULT_CORPUS is None:
        members = [catalogue.get(name) for name in catalogue.names()]
        perturbed = [_perturbed(catalogue.get(name), seed, 0.1) for seed, name in enumerate(_PERTURBED_BASES)]
        _DEFAULT_CORPUS = Corpus(members + perturbed)
    return _DEFAULT_CORPUS


def _outside(seq: Sequence, domain: RealSet, config: AnalysisConfig) -> int | None:
    cfg, _ = fit_config(seq, config)
    x = seq.head(cfg.horizon + 1)
    bad = ~domain.contains(x)
    return int(np.argmax(bad)) + 1 if bad.any() else None


def _as_corpus(corpus) -> Corpus:
    if corpus is None:
        return default_corpus()
    return corpus if isinstance(corpus, Corpus) else Corpus(corpus)


def preservation_verdict(
    f: FunctionUnderTest,
    prop: PreservationProperty | str,
    corpus: Corpus | Iterable[Sequence] | None,
    config: AnalysisConfig,
    workers: int | None = None,
) -> Verdict:
    """Does ``f`` map every corpus member of the antecedent class into the consequent class?

    Members whose antecedent verdict is not satisfied are skipped (and named
    in the note); ``f`` is never evaluated on them.
    """
    prop = PROPERTIES[prop] if isinstance(prop, str) else prop
    corpus = _as_corpus(corpus)
    admitted, skipped = [], []
    for i, seq in enumerate(corpus.sequences):
        (admitted if corpus.verdict(i, prop.antecedent, config).satisfied else skipped).append(i)
    for i in admitted:
        seq = corpus.sequences[i]
        bad = _outside(seq, f.domain, config)
        if bad is not None:
            raise DomainError(f"{seq.name}: x_{bad} lies outside the domain of {f.name}", index=bad)

    def judge(i: int) -> Verdict:
        image = f.image(corpus.sequences[i])
        return _dispatch(prop.consequent, image, fit_config(image, config)[0])

    with ThreadPoolExecutor(max_workers=workers) as pool:
        images = list(pool.map(judge, admitted))

    skipped_note = f"skipped: {', '.join(corpus.sequences[i].name for i in skipped)}" if skipped else ""
    if not admitted:
        note = "vacuous: no corpus member satisfies the antecedent"
        return Verdict(Status.SATISFIED, config.horizon, note="; ".join(filter(None, [note, skipped_note])),
                       label=prop.label)
    names = [corpus.sequences[i].name for i in admitted]
    for name, v in zip(names, images):
        if v.violated:
            note = f"image of {name} is not {prop.consequent}: {v.note}"
            return Verdict(Status.VIOLATED, v.horizon, v.epsilon, witness_indices=v.witness_indices,
                           trace=v.trace, note="; ".join(filter(None, [note, skipped_note])),
                           metric=v.metric, components=tuple(images), witness_sequence=name,
                           label=prop.label)
    undecided = [name for name, v in zip(names, images) if not v.satisfied]
    status = Status.INCONCLUSIVE if undecided else Status.SATISFIED
    note = f"{len(admitted)} member(s) checked"
    if undecided:
        note += f"; inconclusive images: {', '.join(undecided)}"
    return Verdict(status, config.horizon, note="; ".join(filter(None, [note, skipped_note])),
                   components=tuple(images), label=prop.label)


@dataclass(frozen=True)
class LatticeReport:
    function_name: str
    per_property: dict[str, Verdict]
    implied_pairs: tuple[tuple[str, str, bool], ...]

    @property
    def consistent(self) -> bool:
        return all(ok for _, _, ok in self.implied_pairs)

    @property
    def decisive(self) -> bool:
        return not any(v.inconclusive for v in self.per_property.values())


def implication_lattice_report(
    f: FunctionUnderTest,
    corpus: Corpus | Iterable[Sequence] | None,
    config: AnalysisConfig,
) -> LatticeReport:
    """All eight property verdicts and a consistency flag per asserted implication."""
    corpus = _as_corpus(corpus)
    per = {label: preservation_verdict(f, prop, corpus, config) for label, prop in PROPERTIES.items()}
    pairs = tuple(
        (a, b, not (per[a].satisfied and per[b].violated)) for a, b in IMPLICATIONS
    )
    return LatticeReport(f.name, per, pairs)


def interleave_continuity_check(
    f: FunctionUnderTest, seq: Sequence, ell: float, config: AnalysisConfig
) -> Verdict:
    """Run ``f`` on ``(x_1, l, x_1, l, x_2, l, ...)`` and on ``(x_k)`` itself.

    Satisfied iff the interleaved image is statistically upward half
    quasi-Cauchy and ``f(x_k)`` is statistically convergent to ``f(l)``.
    """
    pre = statistical_limit_verdict(seq, ell, config).verdict
    if not pre.satisfied:
        raise PreconditionError(f"{seq.name} is not statistically convergent to {ell:g} ({pre.status})")
    mixed = f.image(interleave_with_constant(seq, ell))
    upward = stat_upward_hqc_verdict(mixed, config)
    f_ell = float(f(np.array([ell]))[0])
    at_limit = statistical_limit_verdict(f.image(seq), f_ell, config).verdict
    return combine_all([upward, at_limit], "interleave-continuity")


@dataclass(frozen=True)
class WitnessPair:
    n: int
    x: float
    y: float
    fx: float
    fy: float

    def verify(self, eps0: float) -> bool:
        """Both inequalities in exact arithmetic on the evaluated floats."""
        gap = abs(Fraction(self.x) - Fraction(self.y))
        jump = abs(Fraction(self.fx) - Fraction(self.fy))
        return gap < Fraction(1, self.n) and jump >= Fraction(eps0)


def _domain_window(domain: RealSet, n: int) -> tuple[float, float]:
    centre = domain.nearest(0.0)
    lo = max(centre - (n + 1), domain.infimum())
    hi = min(centre + (n + 1), domain.supremum())
    return lo, hi


def uniform_continuity_witness_search(
    f: FunctionUnderTest, n_max: int, eps0: float
) -> list[WitnessPair]:
    """For each ``n <= n_max`` look for ``|x - y| < 1/n`` with ``|f(x) - f(y)| >= eps0``.

    Pairs are ``(x, x + h)`` with ``h`` just under ``1/n``, ``x`` on a grid of
    1024 points per unit over a window of radius ``n + 1`` around the domain
    point nearest 0, together with 1025 evenly spaced admissible starts (so
    windows narrower than a grid step are still sampled). The best grid pair
    is refined locally when it falls short.
    Returns the verified pairs found (empty when none is found).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if eps0 <= 0:
        raise ValueError("eps0 must be positive")
    try:
        f.domain.nearest(0.0)
    except Exception as exc:
        raise DomainError(f"{f.name}: empty or unsampleable domain ({exc})") from None
    found = []
    for n in range(1, n_max + 1):
        h = (1.0 / n) * (1.0 - 2.0**-20)
        lo, hi = _domain_window(f.domain, n)
        count = int(math.floor((hi - lo) * GRID_PER_UNIT)) + 1
        xs = lo + np.arange(count) / GRID_PER_UNIT
        if hi - h > lo:
            # the admissible starts can be narrower than one grid step
            xs = np.union1d(xs, np.linspace(lo, hi - h, GRID_PER_UNIT + 1))
        xs = xs[f.domain.contains(xs) & f.domain.contains(xs + h)]
        if xs.size == 0:
            continue
        with np.errstate(all="ignore"):
            jumps = np.abs(f(xs + h) - f(xs))
        jumps[~np.isfinite(jumps)] = -np.inf
        best = int(np.argmax(jumps))
        x = float(xs[best])
        if jumps[best] < eps0:
            a, b = x - 1.0 / GRID_PER_UNIT, x + 1.0 / GRID_PER_UNIT

            def negative_jump(t: float) -> float:
                if not (f.domain.contains(t) and f.domain.contains(t + h)):
                    return 0.0
                return -float(abs(f(np.array([t + h]))[0] - f(np.array([t]))[0]))

            res = minimize_scalar(negative_jump, bounds=(a, b), method="bounded")
            if -res.fun > jumps[best]:
                x = float(res.x)
        y = x + h
        fx, fy = (float(v) for v in f(np.array([x, y])))
        pair = WitnessPair(n, x, y, fx, fy)
        if pair.verify(eps0):
            found.append(pair)
    return found


def three_sum_decomposition_check(x: Sequence, y: Sequence, index_map: IndexMap, horizon: int) -> bool:
    """Check ``y_{n_k} - y_{n_{k+1}}`` equals the three-term split through ``x`` for ``k <= horizon``.

    Each evaluated value is taken as the exact rational it represents, so the
    identity is tested without rounding.
    """
    idx = index_map.head(horizon + 1)
    xs = [Fraction(float(v)) for v in x.at(idx)]
    ys = [Fraction(float(v)) for v in y.at(idx)]
    for k in range(horizon):
        lhs = ys[k] - ys[k + 1]
        rhs = ((ys[k] - xs[k]) + (xs[k] - xs[k + 1])) + (xs[k + 1] - ys[k + 1])
        if lhs != rhs:
            return False
    return True


@dataclass(frozen=True)
class FunctionSequence:
    """``f_n -> f`` uniformly, with ``sup |f_n - f| <= uniform_gap`` for ``n >= uniform_index``."""

    members: Callable[[int], FunctionUnderTest]
    limit: FunctionUnderTest
    uniform_index: int
    uniform_gap: float
    sample_members: int = 8

    def __post_init__(self):
        if self.uniform_index < 1 or self.uniform_gap <= 0:
            raise ValueError("uniform_index must be >= 1 and uniform_gap positive")
        lo, hi = _domain_window(self.limit.domain, 9)
        xs = np.linspace(lo, hi, 2049)
        xs = xs[self.limit.domain.contains(xs)]
        fx = self.limit(xs)
        for n in range(self.uniform_index, self.uniform_index + self.sample_members):
            diff = np.abs(self.members(n)(xs) - fx)
            # allow the rounding of the two evaluations themselves
            slack = 4 * np.spacing(np.maximum(np.abs(fx), 1.0))
            gap = float(np.max(diff - slack)) if xs.size else 0.0
            if gap > self.uniform_gap:
                raise ContractError(f"sampled sup |f_{n} - f| = {gap:.6g} exceeds {self.uniform_gap:g}")


@dataclass(frozen=True)
class UniformLimitResult:
    inequality_holds: bool
    counts: tuple[tuple[int, int, int, int, int], ...]  # (n, A, B1, B2, B3) per checkpoint
    verdict: Verdict


def _at_least(a: np.ndarray, b: np.ndarray, c: float) -> np.ndarray:
    """Exact ``a - b >= c`` for float arrays; rounding-sensitive entries are redone in Fractions."""
    diff = a - b
    out = diff >= c
    scale = np.abs(a) + np.abs(b) + abs(c)
    close = np.flatnonzero(np.abs(diff - c) <= 1e-12 * np.maximum(scale, 1e-300))
    fc = Fraction(c)
    for i in close:
        out[i] = Fraction(float(a[i])) - Fraction(float(b[i])) >= fc
    return out


def _abs_at_least(a: np.ndarray, b: np.ndarray, c: float) -> np.ndarray:
    return _at_least(a, b, c) | _at_least(b, a, c)


def uniform_limit_preservation(
    fseq: FunctionSequence, seq: Sequence, eps: float, config: AnalysisConfig, upward: bool = True
) -> UniformLimitResult:
    """Check the three-set cover of the large-jump set of ``f(x_k)`` at every checkpoint.

    With ``g = f_N`` and ``t = eps/3``, every ``k`` with ``f(x_k) - f(x_{k+1}) >= eps``
    lies in ``{|f(x_k) - g(x_k)| >= t} ∪ {g(x_k) - g(x_{k+1}) >= t} ∪
    {|g(x_{k+1}) - f(x_{k+1})| >= t}``, so counts obey the matching inequality.
    ``upward=False`` uses increases instead of decreases.
    """
    third = eps / 3
    if fseq.uniform_gap >= third:
        raise PreconditionError(f"uniform gap {fseq.uniform_gap:g} is not below eps/3 = {third:g}")
    config, _ = fit_config(seq, config)
    one_sided = stat_upward_hqc_verdict if upward else stat_downward_hqc_verdict
    pre = one_sided(seq, config)
    if not pre.satisfied:
        raise PreconditionError(f"{seq.name}: input verdict is {pre.status}")
    x = seq.head(config.horizon + 1)
    fx = fseq.limit(x)
    gx = fseq.members(fseq.uniform_index)(x)
    if upward:
        big = _at_least(fx[:-1], fx[1:], eps)
        middle = _at_least(gx[:-1], gx[1:], third)
    else:
        big = _at_least(fx[1:], fx[:-1], eps)
        middle = _at_least(gx[1:], gx[:-1], third)
    first = _abs_at_least(fx[:-1], gx[:-1], third)
    last = _abs_at_least(gx[1:], fx[1:], third)
    cum = [np.cumsum(m, dtype=np.int64) for m in (big, first, middle, last)]
    rows = tuple(
        (n, *(int(c[n - 1]) for c in cum)) for n in checkpoints(config.horizon, config.checkpoint_count)
    )
    holds = all(a <= b1 + b2 + b3 for _, a, b1, b2, b3 in rows)
    image = fseq.limit.image(seq)
    return UniformLimitResult(holds, rows, one_sided(image, config))


SHIPPED_FUNCTIONS: dict[str, str] = {
    "identity": "x",
    "shift": "x + 5",
    "double": "2*x",
    "square": "x^2",
    "step": "step(0)",
    "constant": "0*x + 1",
    "negation": "-x",
}

# Non-implications shown by a named function: (from, to) -> function key
COUNTEREXAMPLES: dict[tuple[str, str], str] = {
    ("dS+", "dS+c"): "identity",
    ("c", "dS+c"): "identity",
    ("cdS+", "dS+"): "negation",
    ("dS-", "dS-c"): "identity",
    ("cdS-", "dS-"): "negation",
}


def shipped_function(key: str, domain: RealSet = REALS) -> FunctionUnderTest:
    return FunctionUnderTest.from_expression(SHIPPED_FUNCTIONS[key], domain, name=key)
