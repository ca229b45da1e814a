"""Lazy real sequences and the structural transformations used on them.

Sequences are 1-indexed. A :class:`Sequence` wraps either a pointwise
evaluator (scalar or numpy-vectorized over an int64 index array) or a prefix
builder for recurrences, and memoizes the contiguous head it has computed.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence as Seq

import numpy as np

from .errors import ContractError, EvaluationError

__all__ = [
    "Sequence",
    "Prefix",
    "IndexMap",
    "materialize",
    "forward_difference",
    "subsequence",
    "interleave_with_constant",
    "interleave_pairs",
    "reflect",
    "map_values",
]

_INT64_MAX = np.iinfo(np.int64).max


def _index_array(indices) -> np.ndarray:
    idx = np.asarray(indices, dtype=np.int64)
    if idx.ndim != 1:
        idx = idx.reshape(-1)
    return idx


class Sequence:
    """A deterministic map from positive indices to finite floats.

    Parameters
    ----------
    func:
        Evaluator. With ``vectorized=True`` it receives an int64 array of
        indices and returns an array (or scalar, broadcast) of values;
        otherwise it is called once per index with a Python ``int``.
    prefix:
        Alternative to ``func``: ``prefix(N)`` returns the first ``N`` values.
        Used for recurrences where random access is expensive.
    length:
        Number of available terms for finite (file-backed or extracted)
        sequences; ``None`` means infinite.
    claims:
        Optional ``(label, status)`` annotations carried along for reports.
    """

    def __init__(
        self,
        func: Callable | None = None,
        *,
        name: str = "sequence",
        vectorized: bool = False,
        prefix: Callable[[int], Iterable[float]] | None = None,
        length: int | None = None,
        claims: Seq[tuple[str, str]] = (),
    ):
        if (func is None) == (prefix is None):
            raise ValueError("exactly one of func or prefix must be given")
        if length is not None and length < 1:
            raise ValueError("length must be positive")
        self._func = func
        self._prefix = prefix
        self._vectorized = vectorized
        self.name = name
        self.length = length
        self.claims = tuple(claims)
        self._cache = np.empty(0, dtype=float)
        self._lock = threading.RLock()

    def __repr__(self) -> str:
        return f"Sequence({self.name!r})"

    def __call__(self, n: int) -> float:
        return float(self.at(np.array([n], dtype=np.int64))[0])

    def with_claims(self, claims: Seq[tuple[str, str]], name: str | None = None) -> "Sequence":
        """Shallow copy sharing the evaluator and cache, with new annotations."""
        other = object.__new__(Sequence)
        other.__dict__.update(self.__dict__)
        other.claims = tuple(claims)
        if name is not None:
            other.name = name
        return other

    def _check_range(self, idx: np.ndarray) -> None:
        if idx.size and idx.min() < 1:
            raise ContractError(f"{self.name}: indices are 1-based, got {int(idx.min())}")
        if self.length is not None and idx.size and idx.max() > self.length:
            raise EvaluationError(
                f"{self.name}: index {int(idx.max())} beyond the last term {self.length}",
                index=int(idx.max()),
            )

    def _finite(self, idx: np.ndarray, values: np.ndarray) -> np.ndarray:
        bad = ~np.isfinite(values)
        if bad.any():
            where = int(idx[np.argmax(bad)])
            raise EvaluationError(f"{self.name}: non-finite value at index {where}", index=where)
        return values

    def _evaluate(self, idx: np.ndarray) -> np.ndarray:
        if self._vectorized:
            out = np.asarray(self._func(idx), dtype=float)
            if out.shape != idx.shape:
                out = np.broadcast_to(out, idx.shape).astype(float)
        else:
            out = np.empty(idx.size, dtype=float)
            for j, i in enumerate(idx):
                try:
                    out[j] = self._func(int(i))
                except (ArithmeticError, ValueError) as exc:
                    raise EvaluationError(f"{self.name}: cannot evaluate at {int(i)}: {exc}", index=int(i)) from exc
        return self._finite(idx, out)

    def head(self, n: int) -> np.ndarray:
        """Read-only array ``[x_1, ..., x_n]``."""
        if n < 0:
            raise ContractError("negative prefix length")
        self._check_range(np.array([max(n, 1)], dtype=np.int64))
        with self._lock:
            have = self._cache.size
            if have < n:
                if self._prefix is not None:
                    values = np.asarray(self._prefix(n), dtype=float)
                    if values.shape != (n,):
                        raise EvaluationError(f"{self.name}: prefix builder returned wrong length")
                    values = self._finite(np.arange(1, n + 1, dtype=np.int64), values)
                else:
                    fresh = self._evaluate(np.arange(have + 1, n + 1, dtype=np.int64))
                    values = np.concatenate([self._cache, fresh])
                values.flags.writeable = False
                self._cache = values
            return self._cache[:n]

    def at(self, indices) -> np.ndarray:
        """Values at arbitrary positive indices, in the order given."""
        idx = _index_array(indices)
        if idx.size == 0:
            return np.empty(0, dtype=float)
        self._check_range(idx)
        top = int(idx.max())
        with self._lock:
            cache = self._cache
        if top <= cache.size:
            return cache[idx - 1]
        if self._prefix is not None:
            return self.head(top)[idx - 1]
        return self._evaluate(idx)

    @classmethod
    def from_values(cls, values: Iterable[float], name: str = "data") -> "Sequence":
        """Finite sequence backed by explicit data."""
        arr = np.asarray(list(values), dtype=float)
        if arr.size == 0:
            raise ValueError("empty data")
        arr.flags.writeable = False
        return cls(prefix=lambda n: arr[:n], name=name, length=int(arr.size))


@dataclass(frozen=True)
class Prefix:
    values: tuple[float, ...]
    source_name: str

    def __len__(self) -> int:
        return len(self.values)


class IndexMap:
    """Strictly increasing selector ``k -> n_k`` on positive integers."""

    def __init__(
        self,
        selector: Callable,
        *,
        vectorized: bool = False,
        length: int | None = None,
        name: str = "map",
    ):
        self._selector = selector
        self._vectorized = vectorized
        self.length = length
        self.name = name

    def __repr__(self) -> str:
        return f"IndexMap({self.name!r})"

    def __len__(self) -> int:
        if self.length is None:
            raise TypeError("infinite index map has no len()")
        return self.length

    @classmethod
    def from_indices(cls, indices: Iterable[int], name: str = "explicit") -> "IndexMap":
        arr = np.asarray(list(indices), dtype=np.int64)
        if arr.size == 0:
            raise ContractError("empty index map")
        if arr[0] < 1 or np.any(np.diff(arr) <= 0):
            raise ContractError("index map must be strictly increasing and start at >= 1")
        arr.flags.writeable = False
        return cls(lambda k: arr[k - 1], vectorized=True, length=int(arr.size), name=name)

    @classmethod
    def identity(cls) -> "IndexMap":
        return cls(lambda k: k, vectorized=True, name="identity")

    def _raw(self, k: np.ndarray) -> np.ndarray:
        if self.length is not None and k.size and k.max() > self.length:
            raise ContractError(f"{self.name}: index {int(k.max())} beyond map length {self.length}")
        if self._vectorized:
            return np.asarray(self._selector(k), dtype=np.int64).reshape(k.shape)
        out = []
        for i in k:
            v = int(self._selector(int(i)))
            if v > _INT64_MAX:
                raise EvaluationError(f"{self.name}: selector overflow at {int(i)}", index=int(i))
            out.append(v)
        return np.asarray(out, dtype=np.int64)

    def at(self, k) -> np.ndarray:
        """Selected indices at positions ``k``; checks monotonicity at each position."""
        k = _index_array(k)
        if k.size == 0:
            return k
        if k.min() < 1:
            raise ContractError("index map positions are 1-based")
        sel = self._raw(k)
        if np.array_equal(k, np.arange(k[0], k[0] + k.size)):
            # contiguous request: check consecutive pairs directly
            ok = sel.size < 2 or bool(np.all(np.diff(sel) > 0))
            if k[0] > 1:
                ok = ok and bool(self._raw(k[:1] - 1)[0] < sel[0])
        else:
            inner = k > 1
            prev = self._raw(k[inner] - 1)
            ok = bool(np.all(prev < sel[inner]))
        if not ok or sel[k == 1].min(initial=1) < 1:
            raise ContractError(f"{self.name}: selector is not strictly increasing")
        return sel

    def __call__(self, k: int) -> int:
        return int(self.at([k])[0])

    def head(self, n: int) -> np.ndarray:
        return self.at(np.arange(1, n + 1, dtype=np.int64))

    def compose(self, inner: "IndexMap") -> "IndexMap":
        """``k -> self(inner(k))``."""
        length = inner.length
        return IndexMap(
            lambda k: self.at(inner.at(k)),
            vectorized=True,
            length=length,
            name=f"{self.name}∘{inner.name}",
        )


def materialize(seq: Sequence, n: int) -> Prefix:
    """First ``n`` terms, evaluated in order."""
    if n < 1:
        raise ContractError("horizon must be >= 1")
    return Prefix(tuple(float(v) for v in seq.head(n)), seq.name)


def forward_difference(seq: Sequence) -> Sequence:
    """``n -> x_n - x_{n+1}``."""
    return Sequence(
        lambda k: seq.at(k) - seq.at(k + 1),
        vectorized=True,
        name=f"Δ({seq.name})",
        length=None if seq.length is None else max(seq.length - 1, 1),
    )


def subsequence(seq: Sequence, index_map: IndexMap) -> Sequence:
    return Sequence(
        lambda k: seq.at(index_map.at(k)),
        vectorized=True,
        name=f"{seq.name}[{index_map.name}]",
        length=index_map.length,
    )


def interleave_with_constant(seq: Sequence, ell: float) -> Sequence:
    """``(x_1, l, x_1, l, x_2, l, x_2, l, ...)``."""
    ell = float(ell)

    def evaluate(k: np.ndarray) -> np.ndarray:
        out = np.full(k.shape, ell, dtype=float)
        odd = (k % 2) == 1
        out[odd] = seq.at((k[odd] + 3) // 4)
        return out

    return Sequence(
        evaluate,
        vectorized=True,
        name=f"interleave({seq.name}, {ell:g})",
        length=None if seq.length is None else 4 * seq.length,
    )


def interleave_pairs(a: Sequence, b: Sequence) -> Sequence:
    """``(a_1, b_1, a_2, b_2, ...)``."""

    def evaluate(k: np.ndarray) -> np.ndarray:
        out = np.empty(k.shape, dtype=float)
        odd = (k % 2) == 1
        out[odd] = a.at((k[odd] + 1) // 2)
        out[~odd] = b.at(k[~odd] // 2)
        return out

    lengths = [2 * s.length for s in (a, b) if s.length is not None]
    return Sequence(
        evaluate,
        vectorized=True,
        name=f"pairs({a.name}, {b.name})",
        length=min(lengths) if lengths else None,
    )


def reflect(seq: Sequence) -> Sequence:
    return Sequence(lambda k: -seq.at(k), vectorized=True, name=f"-({seq.name})", length=seq.length)


def map_values(seq: Sequence, func: Callable[[np.ndarray], np.ndarray], name: str) -> Sequence:
    """Pointwise image ``(f(x_n))`` for a vectorized ``f``."""
    return Sequence(
        lambda k: func(seq.at(k)),
        vectorized=True,
        name=f"{name}({seq.name})",
        length=seq.length,
    )
