import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wardlab import catalogue
from wardlab.classifiers import fit_config, stat_upward_hqc_verdict
from wardlab.compactness import (
    REALS,
    GeneratedSet,
    Interval,
    IntervalUnion,
    PointSet,
    ascending_witness,
    bounded,
    bounded_above,
    bounded_below,
    descending_witness,
    extract_stat_upward_hqc_subsequence,
    parse_set,
    stat_downward_compact,
    stat_upward_compact,
    witness_sequence,
)
from wardlab.density import AnalysisConfig
from wardlab.errors import ExtractionRefused, NoWitnessError, ParseError, UndecidableError
from wardlab.sequences import Sequence, subsequence

config = AnalysisConfig(horizon=20_000)
naturals = GeneratedSet(lambda i: float(i), infimum=1.0, supremum=math.inf, name="naturals")


def test_bound_examples():
    assert (bounded_below(parse_set("[0,inf)")), bounded_above(parse_set("[0,inf)"))) == (True, False)
    assert (bounded_below(parse_set("(-inf,3]")), bounded_above(parse_set("(-inf,3]"))) == (False, True)
    assert bounded(parse_set("{1,2,7}"))


def test_compactness_examples():
    s = parse_set("[0,inf)")
    assert stat_upward_compact(s) and not stat_downward_compact(s)
    assert not stat_upward_compact(REALS) and not stat_downward_compact(REALS)
    s = parse_set("[-1,1]")
    assert stat_upward_compact(s) and stat_downward_compact(s) and bounded(s)


def test_witness_examples():
    assert descending_witness(REALS, 4).values == (0.0, -2.0, -4.0, -6.0)
    with pytest.raises(NoWitnessError):
        ascending_witness(parse_set("(-inf,0)"), 3)
    assert ascending_witness(naturals, 3).values == (1.0, 3.0, 5.0)


def test_witness_in_gappy_set_stays_inside():
    s = parse_set("(-inf,-10] | [-3.5,-3] | {0}")
    prefix = descending_witness(s, 30).values
    assert np.all(s.contains(np.array(prefix)))
    assert all(a - b > 1 for a, b in zip(prefix, prefix[1:]))


def test_generated_set_needs_declared_bounds():
    anonymous = GeneratedSet(lambda i: float(-i))
    with pytest.raises(UndecidableError):
        bounded_below(anonymous)
    with pytest.raises(ValueError):
        GeneratedSet(lambda i: float(i), supremum=10.0)


def test_parse_set_forms():
    assert parse_set("ℝ") == REALS
    assert parse_set("[0,1] | [1,2)") == IntervalUnion([Interval(0, 2, True, False)])
    assert parse_set("[0,1] ∪ (3,4]").intervals == (Interval(0, 1), Interval(3, 4, False, True))
    pts = parse_set("{3, 1, 2, 1}")
    assert isinstance(pts, PointSet) and pts.points.tolist() == [1, 2, 3]
    mixed = parse_set("(-inf,0) U {5}")
    assert mixed.contains(np.array([5.0, -1.0, 0.0])).tolist() == [True, True, False]
    for bad in ("", "[1,0]", "(0,0)", "[inf,2]", "[0,inf]", "{1,inf}", "[0;1]", "{a}"):
        with pytest.raises(ParseError):
            parse_set(bad)


def test_extraction_examples():
    index_map = extract_stat_upward_hqc_subsequence(catalogue.get("alternating"), config)
    picked = index_map.head(len(index_map))
    values = catalogue.get("alternating").at(picked)
    assert np.all(values == values[0])  # constant subsequence

    index_map = extract_stat_upward_hqc_subsequence(catalogue.get("identity"), config)
    assert index_map.head(len(index_map)).tolist() == list(range(1, config.horizon + 2))


def test_extraction_refuses_unbounded_below():
    with pytest.raises(ExtractionRefused):
        extract_stat_upward_hqc_subsequence(catalogue.get("negated-identity"), config)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_shuffled_bounded_sample_extracts_to_satisfied(seed):
    values = np.random.default_rng(seed).permutation(np.linspace(-3, 7, 5001))
    seq = Sequence.from_values(values)
    cfg = AnalysisConfig(horizon=5000)
    index_map = extract_stat_upward_hqc_subsequence(seq, cfg)
    picked = index_map.head(len(index_map))
    assert np.all(np.diff(picked) > 0)
    sub = subsequence(seq, index_map)
    assert stat_upward_hqc_verdict(sub, fit_config(sub, cfg)[0]).satisfied


intervals = st.builds(
    lambda a, b, lc, hc, linf, hinf: Interval(
        -math.inf if linf else min(a, b),
        math.inf if hinf else max(a, b) + 1,
        lc and not linf,
        hc and not hinf,
    ),
    st.floats(-100, 100), st.floats(-100, 100), st.booleans(), st.booleans(),
    st.booleans(), st.booleans(),
)


@given(st.lists(intervals, min_size=1, max_size=5))
def test_equivalence_wiring(pieces):
    s = IntervalUnion(pieces)
    assert stat_upward_compact(s) == bounded_below(s)
    assert stat_downward_compact(s) == bounded_above(s)
    assert bounded(s) == (stat_upward_compact(s) and stat_downward_compact(s))


@given(st.lists(intervals, min_size=1, max_size=5))
def test_normalized_intervals_are_sorted_and_disjoint(pieces):
    s = IntervalUnion(pieces)
    probe = np.linspace(-150, 150, 601)
    expected = np.zeros(probe.shape, bool)
    for iv in pieces:
        expected |= iv.contains(probe)
    assert np.array_equal(s.contains(probe), expected)
    for a, b in zip(s.intervals, s.intervals[1:]):
        assert a.hi < b.lo or (a.hi == b.lo and not a.hi_closed and not b.lo_closed)


@given(st.lists(intervals, min_size=1, max_size=4), st.lists(intervals, min_size=1, max_size=4))
def test_set_algebra_preserves_upward_compactness(left, right):
    a, b = IntervalUnion(left), IntervalUnion(right)
    if stat_upward_compact(a) and stat_upward_compact(b):
        assert stat_upward_compact(a.union(b))
    if stat_upward_compact(a):
        inter = a.intersection(b)
        assert not inter.intervals or stat_upward_compact(inter)
    probe = np.linspace(-150, 150, 301)
    assert np.array_equal(a.intersection(b).contains(probe), a.contains(probe) & b.contains(probe))


@settings(max_examples=25)
@given(st.lists(intervals, min_size=1, max_size=4), st.integers(2, 40))
def test_witness_soundness(pieces, n):
    s = IntervalUnion(pieces)
    if bounded_below(s):
        with pytest.raises(NoWitnessError):
            descending_witness(s, n)
        return
    prefix = np.array(descending_witness(s, n).values)
    assert np.all(s.contains(prefix))
    assert np.all(prefix[:-1] - prefix[1:] > 1)


def test_extended_witness_is_violated_at_one():
    v = stat_upward_hqc_verdict(witness_sequence(REALS), config).component_for(1.0)
    assert v.violated and v.final_density == 1
