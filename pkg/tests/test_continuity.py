import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wardlab import catalogue
from wardlab.compactness import REALS, parse_set
from wardlab.continuity import (
    COUNTEREXAMPLES,
    IMPLICATIONS,
    PROPERTIES,
    Corpus,
    FunctionSequence,
    FunctionUnderTest,
    WitnessPair,
    implication_lattice_report,
    interleave_continuity_check,
    preservation_verdict,
    shipped_function,
    three_sum_decomposition_check,
    uniform_continuity_witness_search,
    uniform_limit_preservation,
)
from wardlab.density import AnalysisConfig
from wardlab.errors import ContractError, DomainError, PreconditionError
from wardlab.sequences import IndexMap, Sequence

config = AnalysisConfig(horizon=4096)
small_corpus = Corpus(
    [catalogue.get(n) for n in ("identity", "negated-identity", "reciprocal", "alternating-reciprocal", "alternating")]
)


def test_preservation_examples():
    v = preservation_verdict(shipped_function("step"), "dS+", [catalogue.get("alternating-reciprocal")], config)
    assert v.violated and v.witness_sequence == "alternating-reciprocal"
    assert preservation_verdict(shipped_function("shift"), "dS+", small_corpus, config).satisfied
    v = preservation_verdict(shipped_function("identity"), "dS+c", small_corpus, config)
    assert v.violated and v.witness_sequence == "identity"


def test_vacuous_and_skipped_members():
    v = preservation_verdict(shipped_function("square"), "dS+", [catalogue.get("negated-identity")], config)
    assert v.satisfied and "vacuous" in v.note and "negated-identity" in v.note


def test_domain_error():
    root = FunctionUnderTest.from_expression("sqrt(x)", parse_set("[0,inf)"))
    with pytest.raises(DomainError):
        preservation_verdict(root, "dS-", [catalogue.get("negated-identity")], config)
    # members failing the antecedent are never evaluated
    assert preservation_verdict(root, "dS+", [catalogue.get("negated-identity")], config).satisfied


def test_parallel_matches_serial():
    f = shipped_function("double")
    a = preservation_verdict(f, "dS+", small_corpus, config, workers=1)
    b = preservation_verdict(f, "dS+", small_corpus, config, workers=4)
    assert a == b


@pytest.mark.parametrize("key", ["identity", "shift", "negation", "constant", "step"])
def test_lattice_is_consistent(key):
    report = implication_lattice_report(shipped_function(key), small_corpus, config)
    assert set(report.per_property) == set(PROPERTIES)
    assert len(report.implied_pairs) == len(IMPLICATIONS) == 12
    assert report.consistent


@pytest.mark.parametrize("pair, key", sorted(COUNTEREXAMPLES.items()))
def test_counterexample_functions(pair, key):
    report = implication_lattice_report(shipped_function(key), small_corpus, config)
    source, target = pair
    assert report.per_property[source].satisfied and report.per_property[target].violated


def test_interleave_examples():
    square = shipped_function("square")
    assert interleave_continuity_check(square, catalogue.get("reciprocal"), 0.0, config).satisfied
    step = shipped_function("step")
    assert interleave_continuity_check(step, catalogue.get("alternating-reciprocal"), 0.0, config).violated
    with pytest.raises(PreconditionError):
        interleave_continuity_check(square, catalogue.get("alternating"), 0.0, config)


def test_uc_witness_examples():
    pairs = uniform_continuity_witness_search(shipped_function("square"), 10, 1.0)
    assert [p.n for p in pairs] == list(range(1, 11))
    assert all(p.verify(1.0) for p in pairs)
    assert uniform_continuity_witness_search(shipped_function("identity"), 10, 1.0) == []
    root = FunctionUnderTest.from_expression("sqrt(x)", parse_set("[0,inf)"))
    # jumps near 0 are about sqrt(1/n), so only n < 4 reach 0.5
    assert [p.n for p in uniform_continuity_witness_search(root, 10, 0.5)] == [1, 2, 3]
    steps = uniform_continuity_witness_search(shipped_function("step"), 50, 1.0)
    assert len(steps) == 50


def test_uc_witness_on_bounded_domain():
    recip = FunctionUnderTest.from_expression("1/x", parse_set("(0,1]"))
    pairs = uniform_continuity_witness_search(recip, 8, 1.0)
    assert [p.n for p in pairs] == list(range(1, 9))
    assert all(0 < p.x <= 1 and 0 < p.y <= 1 for p in pairs)


def test_uc_argument_errors():
    with pytest.raises(ValueError):
        uniform_continuity_witness_search(shipped_function("square"), 0, 1.0)
    with pytest.raises(ValueError):
        uniform_continuity_witness_search(shipped_function("square"), 3, 0.0)


def test_witness_pair_verification_is_exact():
    assert not WitnessPair(2, 0.0, 0.5, 0.0, 1.0).verify(1.0)  # gap not strictly below 1/2
    assert WitnessPair(2, 0.0, 0.4999, 0.0, 1.0).verify(1.0)
    assert WitnessPair(1, 0.0, 0.1, 0.0, 0.3).verify(0.3)
    assert not WitnessPair(1, 0.0, 0.1, 0.0, 0.3).verify(math.nextafter(0.3, 1.0))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1e9, 1e9), min_size=11, max_size=11), st.lists(st.floats(-1e9, 1e9), min_size=11, max_size=11))
def test_three_sum_identity(xs, ys):
    x, y = Sequence.from_values(xs), Sequence.from_values(ys)
    assert three_sum_decomposition_check(x, y, IndexMap.identity(), 10)
    assert three_sum_decomposition_check(x, y, IndexMap.from_indices([1, 3, 4, 8, 11]), 4)


def _shifted_family(limit_expr="x"):
    return FunctionSequence(
        members=lambda n: FunctionUnderTest.from_expression(f"{limit_expr} + 1/{n}"),
        limit=FunctionUnderTest.from_expression(limit_expr),
        uniform_index=10,
        uniform_gap=0.1,
    )


def test_uniform_limit_examples():
    result = uniform_limit_preservation(_shifted_family(), catalogue.get("identity"), 1.0, config)
    assert result.inequality_holds and result.verdict.satisfied
    assert all(a <= b1 + b2 + b3 for _, a, b1, b2, b3 in result.counts)
    result = uniform_limit_preservation(
        _shifted_family("cos(x)"), catalogue.get("sqrt"), 0.5, config
    )
    assert result.inequality_holds


def test_uniform_limit_preconditions():
    with pytest.raises(PreconditionError):
        uniform_limit_preservation(_shifted_family(), catalogue.get("identity"), 0.3, config)
    with pytest.raises(PreconditionError):
        uniform_limit_preservation(_shifted_family(), catalogue.get("negated-identity"), 1.0, config)
    with pytest.raises(ContractError):
        FunctionSequence(
            members=lambda n: FunctionUnderTest.from_expression("x + 1"),
            limit=FunctionUnderTest.from_expression("x"),
            uniform_index=1,
            uniform_gap=0.5,
        )


def test_image_keeps_finite_length():
    data = Sequence.from_values([1.0, 2.0, 3.0])
    image = shipped_function("square").image(data)
    assert image.length == 3 and image.head(3).tolist() == [1.0, 4.0, 9.0]


def test_default_function_domain_is_reals():
    assert shipped_function("identity").domain == REALS
    assert math.isclose(float(shipped_function("constant")(np.array([123.0]))[0]), 1.0)
