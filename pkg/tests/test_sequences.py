import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wardlab import catalogue
from wardlab.errors import ContractError, EvaluationError
from wardlab.sequences import (
    IndexMap,
    Sequence,
    forward_difference,
    interleave_pairs,
    interleave_with_constant,
    map_values,
    materialize,
    reflect,
    subsequence,
)


def vec(func, name="s"):
    return Sequence(func, vectorized=True, name=name)


identity = vec(lambda k: k.astype(float), "identity")
alternating = vec(lambda k: np.where(k % 2 == 0, 1.0, -1.0), "alternating")

finite_floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


def test_materialize_examples():
    assert materialize(catalogue.get("constant", c=3), 4).values == (3.0, 3.0, 3.0, 3.0)
    assert materialize(identity, 3).values == (1.0, 2.0, 3.0)
    assert materialize(catalogue.get("fibonacci-ratio"), 3).values == (1.0, 2.0, 1.5)


def test_materialize_rejects_empty_horizon():
    with pytest.raises(ContractError):
        materialize(identity, 0)


def test_non_finite_value_reports_index():
    seq = Sequence(lambda n: 1.0 / (n - 5), name="pole")
    with pytest.raises(EvaluationError) as info:
        seq.head(10)
    assert info.value.index == 5


def test_head_is_read_only_and_cached():
    calls = []

    def f(k):
        calls.append(k.size)
        return k * 2.0

    seq = vec(f)
    first = seq.head(10)
    assert not first.flags.writeable
    seq.head(5)
    assert calls == [10]
    seq.head(12)
    assert calls == [10, 2]


def test_scalar_and_vectorized_agree():
    scalar = Sequence(lambda n: n**0.5, name="root")
    vector = vec(lambda k: np.sqrt(k), "root")
    assert np.array_equal(scalar.head(50), vector.head(50))
    assert scalar(9) == 3.0


def test_finite_sequence_bounds():
    data = Sequence.from_values([1, 2, 3])
    assert data.length == 3
    with pytest.raises(EvaluationError):
        data.head(4)
    with pytest.raises(ContractError):
        data.at([0])


def test_forward_difference_examples():
    assert np.all(forward_difference(identity).head(20) == -1)
    assert np.array_equal(forward_difference(alternating).head(20), 2 * alternating.head(20))
    assert np.all(forward_difference(catalogue.get("constant", c=4)).head(20) == 0)


def test_subsequence_examples():
    sqrt = catalogue.get("sqrt")
    squares = IndexMap(lambda k: k * k, vectorized=True)
    assert np.array_equal(subsequence(sqrt, squares).head(100), identity.head(100))
    assert np.array_equal(subsequence(sqrt, IndexMap.identity()).head(30), sqrt.head(30))
    log10 = catalogue.get("log10")
    powers = IndexMap(lambda k: 10**k, vectorized=True)
    assert np.array_equal(subsequence(log10, powers).head(15), identity.head(15))


def test_non_increasing_map_is_rejected():
    bad = IndexMap(lambda k: 10 - k, vectorized=True)
    with pytest.raises(ContractError):
        subsequence(identity, bad).head(3)
    with pytest.raises(ContractError):
        IndexMap.from_indices([3, 3, 4])


def test_interleave_with_constant_pattern():
    assert interleave_with_constant(identity, 0).head(8).tolist() == [1, 0, 1, 0, 2, 0, 2, 0]
    c = catalogue.get("constant", c=2.5)
    assert np.all(interleave_with_constant(c, 2.5).head(40) == 2.5)


def test_interleave_with_constant_uses_only_first_n_values():
    seen = []

    def f(k):
        seen.extend(k.tolist())
        return k.astype(float)

    interleave_with_constant(vec(f), 0.0).head(4 * 25)
    assert max(seen) == 25


def test_interleave_pairs_examples():
    neg = vec(lambda k: -k.astype(float))
    assert interleave_pairs(identity, neg).head(4).tolist() == [1, -1, 2, -2]
    near = vec(lambda k: k + 1 / (2 * k))
    both = interleave_pairs(identity, near).head(200)
    n = np.arange(1, 101)
    assert np.all(np.abs(both[0::2] - both[1::2]) < 1 / n)


def test_reflect_examples():
    assert reflect(identity).head(3).tolist() == [-1, -2, -3]
    assert np.all(reflect(catalogue.get("constant", c=0)).head(5) == 0)


@given(st.lists(finite_floats, min_size=2, max_size=60))
def test_reflect_is_an_involution(values):
    seq = Sequence.from_values(values)
    assert np.array_equal(reflect(reflect(seq)).head(len(values)), seq.head(len(values)))


@given(st.lists(finite_floats, min_size=2, max_size=60))
def test_difference_of_reflection_is_negated_difference(values):
    seq = Sequence.from_values(values)
    n = len(values) - 1
    assert np.array_equal(forward_difference(reflect(seq)).head(n), -forward_difference(seq).head(n))


@given(
    st.lists(st.integers(1, 5), min_size=1, max_size=20),
    st.lists(st.integers(1, 5), min_size=1, max_size=20),
)
def test_subsequence_composition(gaps_outer, gaps_inner):
    outer = IndexMap.from_indices(np.cumsum(gaps_outer))
    inner_steps = np.cumsum(gaps_inner)
    inner_steps = inner_steps[inner_steps <= len(outer)]
    if inner_steps.size == 0:
        return
    inner = IndexMap.from_indices(inner_steps)
    x = vec(lambda k: np.sin(k.astype(float)))
    n = len(inner)
    nested = subsequence(subsequence(x, outer), inner).head(n)
    composed = subsequence(x, outer.compose(inner)).head(n)
    assert np.array_equal(nested, composed)


def test_map_values_keeps_length():
    data = Sequence.from_values([1.0, 2.0, 3.0])
    squared = map_values(data, np.square, "sq")
    assert squared.length == 3 and squared.head(3).tolist() == [1, 4, 9]


def test_concurrent_head_calls_are_consistent():
    seq = vec(lambda k: np.cos(k.astype(float)))
    expected = vec(lambda k: np.cos(k.astype(float))).head(20_000)
    results = []

    def worker(n):
        results.append((n, seq.head(n).copy()))

    threads = [threading.Thread(target=worker, args=(n,)) for n in range(1000, 20_001, 1000)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for n, values in results:
        assert np.array_equal(values, expected[:n])


@settings(max_examples=30)
@given(st.integers(1, 500))
def test_caching_is_transparent(n):
    cached = vec(lambda k: np.log(k.astype(float)))
    cached.head(250)
    fresh = vec(lambda k: np.log(k.astype(float)))
    assert np.array_equal(cached.head(n), fresh.head(n))
    assert np.array_equal(cached.at([n, 1]), fresh.at([n, 1]))
