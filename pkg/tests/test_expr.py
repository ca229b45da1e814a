import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wardlab.errors import ParseError
from wardlab.expr import compile_expression


@pytest.mark.parametrize(
    "text, x, expected",
    [
        ("x^2 + 1", 3.0, 10.0),
        ("2×x − 1", 2.0, 3.0),
        ("x ÷ 4", 2.0, 0.5),
        ("sqrt(x) + ln(e)", 16.0, 5.0),
        ("log(x)", 1000.0, 3.0),
        ("cos(pi*x)", 1.0, -1.0),
        ("abs(-x) % 3", 7.0, 1.0),
        ("pow(x, 3) - floor(x)", 1.5, 1.5**3 - 1),
        ("step(0)", 0.0, 1.0),
        ("step(2)", 1.9, 0.0),
        ("piecewise(x - 1, 5, -5)", 0.0, -5.0),
    ],
)
def test_evaluates(text, x, expected):
    assert compile_expression(text)(np.array([x]))[0] == pytest.approx(expected, rel=1e-15)


def test_other_variable():
    f = compile_expression("1/n", "n")
    assert f(np.arange(1, 4)).tolist() == [1.0, 0.5, 1 / 3]
    with pytest.raises(ParseError):
        compile_expression("1/x", "n")


@pytest.mark.parametrize(
    "text",
    [
        "", "x +", "__import__('os')", "x.real", "[x]", "x if x else 1", "lambda: 1",
        "open(x)", "sqrt", "x < 1", "y", "sqrt(x=1)", "'a'",
    ],
)
def test_rejects(text):
    with pytest.raises(ParseError):
        compile_expression(text)


def test_domain_errors_become_nan_not_warnings():
    with np.errstate(all="raise"):
        out = compile_expression("ln(x)")(np.array([-1.0]))
    assert math.isnan(out[0])


@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
def test_matches_python_arithmetic(a, b):
    f = compile_expression(f"x*{a!r} + {b!r}")
    assert f(np.array([2.0]))[0] == 2.0 * a + b


def test_constant_broadcasts_to_input_shape():
    assert compile_expression("7")(np.zeros(5)).tolist() == [7.0] * 5
