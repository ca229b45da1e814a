"""Named example sequences with their expected class memberships.

Each member records ``claims``: ``(class label, expected status)`` pairs that
the classifiers reproduce at the default configuration. Convergent members
also record their ordinary limit for regularity checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .density import squares
from .errors import CatalogueError, ParameterError
from .sequences import IndexMap, Sequence, subsequence

__all__ = ["NamedSequence", "get", "entry", "entries", "list_claims", "names", "GOLDEN_MEAN"]

GOLDEN_MEAN = (1 + math.sqrt(5)) / 2

# Past this index |F_{n+1}/F_n - phi| < 1e-100, so the correctly rounded ratio no longer changes.
_FIB_EXACT_UNTIL = 256

SAT, VIO = "satisfied", "violated"


@dataclass(frozen=True)
class NamedSequence:
    name: str
    build: Callable[..., Sequence]
    claims: tuple[tuple[str, str], ...]
    defaults: dict[str, Any] = field(default_factory=dict)
    limit: float | None = None
    description: str = ""

    def make(self, **params) -> Sequence:
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise ParameterError(f"{self.name}: unknown parameter(s) {sorted(unknown)}")
        merged = {**self.defaults, **params}
        seq = self.build(**merged)
        return seq.with_claims(self.claims, name=self.name)

    def known_limit(self, **params) -> float | None:
        if self.name == "constant":
            return float({**self.defaults, **params}["c"])
        return self.limit


def _vec(func: Callable[[np.ndarray], np.ndarray], name: str) -> Sequence:
    return Sequence(func, vectorized=True, name=name)


def _constant(c: float) -> Sequence:
    c = float(c)
    if not math.isfinite(c):
        raise ParameterError("constant must be finite")
    return _vec(lambda k: np.full(k.shape, c), "constant")


def _alternating(**_) -> Sequence:
    return _vec(lambda k: np.where(k % 2 == 0, 1.0, -1.0), "alternating")


def _ones_at_squares(**_) -> Sequence:
    sq = squares()
    return _vec(lambda k: sq.mask_at(k).astype(float), "ones-at-squares")


def _sqrt_at_squares(**_) -> Sequence:
    root = _vec(lambda k: np.sqrt(k.astype(float)), "sqrt")
    return subsequence(root, IndexMap(lambda k: k * k, vectorized=True, name="k^2"))


def _iterated_ln(depth: int) -> Sequence:
    if not isinstance(depth, (int, np.integer)) or depth < 1:
        raise ParameterError("iterated-ln depth must be an integer >= 1")

    def evaluate(k):
        v = k.astype(float)
        for _ in range(int(depth)):
            # shift by e keeps every argument above 1 + e, so each level stays positive
            v = np.log(v + math.e)
        return v

    return _vec(evaluate, "iterated-ln")


def _harmonic_prefix(n: int) -> np.ndarray:
    return np.cumsum(1.0 / np.arange(1, n + 1, dtype=float))


def _nested_harmonic_prefix(n: int) -> np.ndarray:
    k = np.arange(1, n + 1, dtype=float)
    inner = np.cumsum(1.0 / k)
    return np.cumsum(inner / k)


def _fibonacci_ratio_prefix(n: int) -> np.ndarray:
    out = np.empty(n, dtype=float)
    a, b = 1, 1  # F_i, F_{i+1}
    exact = min(n, _FIB_EXACT_UNTIL)
    for i in range(exact):
        out[i] = b / a
        a, b = b, a + b
    out[exact:] = out[exact - 1]
    return out


def _build_registry() -> dict[str, NamedSequence]:
    members = [
        NamedSequence(
            "constant", _constant,
            ((("convergent", SAT), ("cauchy", SAT), ("statConvergent", SAT),
              ("statQuasiCauchy", SAT), ("slowlyOscillating", SAT))),
            defaults={"c": 1.0}, description="x_n = c",
        ),
        NamedSequence(
            "identity", lambda: _vec(lambda k: k.astype(float), "identity"),
            (("statUpHalfQuasiCauchy", SAT), ("statDownHalfQuasiCauchy", VIO),
             ("upHalfCauchy", SAT), ("downHalfCauchy", VIO), ("convergent", VIO)),
            description="x_n = n",
        ),
        NamedSequence(
            "negated-identity", lambda: _vec(lambda k: -k.astype(float), "negated-identity"),
            (("statUpHalfQuasiCauchy", VIO), ("statDownHalfQuasiCauchy", SAT),
             ("upHalfCauchy", VIO), ("downHalfCauchy", SAT)),
            description="x_n = -n",
        ),
        NamedSequence(
            "alternating", _alternating,
            (("halfStatQuasiCauchy", VIO), ("statQuasiCauchy", VIO), ("convergent", VIO)),
            description="x_n = (-1)^n",
        ),
        NamedSequence(
            "ones-at-squares", _ones_at_squares,
            (("statConvergent", SAT), ("statDownHalfQuasiCauchy", SAT),
             ("convergent", VIO), ("quasiCauchy", VIO)),
            description="x_n = 1 if n is a perfect square else 0",
        ),
        NamedSequence(
            "reciprocal", lambda: _vec(lambda k: 1.0 / k, "reciprocal"),
            (("convergent", SAT), ("statConvergent", SAT)),
            limit=0.0, description="x_n = 1/n",
        ),
        NamedSequence(
            "alternating-reciprocal",
            lambda: _vec(lambda k: np.where(k % 2 == 0, 1.0, -1.0) / k, "alternating-reciprocal"),
            (("convergent", SAT), ("statQuasiCauchy", SAT)),
            limit=0.0, description="x_n = (-1)^n / n",
        ),
        NamedSequence(
            "sqrt", lambda: _vec(lambda k: np.sqrt(k.astype(float)), "sqrt"),
            (("statQuasiCauchy", SAT), ("quasiCauchy", SAT), ("cauchy", VIO)),
            description="x_n = sqrt(n)",
        ),
        NamedSequence(
            "sqrt-at-squares", _sqrt_at_squares,
            (("statQuasiCauchy", VIO), ("quasiCauchy", VIO)),
            description="subsequence sqrt(k^2) = k of sqrt(n)",
        ),
        NamedSequence(
            "log10", lambda: _vec(lambda k: np.log10(k.astype(float)), "log10"),
            (("slowlyOscillating", SAT), ("cauchy", VIO)),
            description="x_n = log10(n)",
        ),
        NamedSequence(
            "ln", lambda: _vec(lambda k: np.log(k.astype(float)), "ln"),
            (("slowlyOscillating", SAT), ("cauchy", VIO)),
            description="x_n = ln(n)",
        ),
        NamedSequence(
            "iterated-ln", _iterated_ln,
            (("slowlyOscillating", SAT),),
            defaults={"depth": 2},
            description="depth-fold ln(x + e) applied to n",
        ),
        NamedSequence(
            "harmonic-partial", lambda: Sequence(prefix=_harmonic_prefix, name="harmonic-partial"),
            (("slowlyOscillating", SAT), ("cauchy", VIO), ("quasiCauchy", SAT)),
            description="x_n = sum_{k<=n} 1/k",
        ),
        NamedSequence(
            "cos-6-log", lambda: _vec(lambda k: np.cos(6 * np.log(k + 1.0)), "cos-6-log"),
            (("slowlyOscillating", SAT), ("cauchy", VIO)),
            description="x_n = cos(6 ln(n + 1))",
        ),
        NamedSequence(
            "cos-pi-sqrt", lambda: _vec(lambda k: np.cos(np.pi * np.sqrt(k.astype(float))), "cos-pi-sqrt"),
            (("statQuasiCauchy", SAT), ("cauchy", VIO)),
            description="x_n = cos(pi sqrt(n))",
        ),
        NamedSequence(
            "nested-harmonic", lambda: Sequence(prefix=_nested_harmonic_prefix, name="nested-harmonic"),
            (("quasiCauchy", SAT), ("cauchy", VIO)),
            description="x_n = sum_{k<=n} (1/k) sum_{j<=k} 1/j",
        ),
        NamedSequence(
            "fibonacci-ratio", lambda: Sequence(prefix=_fibonacci_ratio_prefix, name="fibonacci-ratio"),
            (("convergent", SAT), ("statConvergent", SAT)),
            limit=GOLDEN_MEAN, description="x_n = F_{n+1} / F_n",
        ),
        NamedSequence(
            "descending-witness",
            lambda: _vec(lambda k: -2.0 * (k - 1), "descending-witness"),
            (("statUpHalfQuasiCauchy", VIO),),
            description="x_n = -2(n - 1), the canonical witness in an unbounded-below set",
        ),
    ]
    return {m.name: m for m in members}


_REGISTRY = _build_registry()


def names() -> list[str]:
    return list(_REGISTRY)


def entry(name: str) -> NamedSequence:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise CatalogueError(f"unknown catalogue sequence {name!r}") from None


def entries() -> list[NamedSequence]:
    return list(_REGISTRY.values())


def get(name: str, **params) -> Sequence:
    return entry(name).make(**params)


def list_claims() -> list[tuple[str, tuple[tuple[str, str], ...]]]:
    return [(m.name, m.claims) for m in _REGISTRY.values()]
