"""A small whitelisted expression language for functions and sequences.

Expressions use one variable (``x`` for functions, ``n`` for sequences) and
compile to numpy-vectorized callables. Only arithmetic, a fixed set of
functions and the constants ``pi`` and ``e`` are accepted; anything else is a
:class:`ParseError`.
"""

from __future__ import annotations

import ast
import math
from typing import Callable

import numpy as np

from .errors import ParseError

__all__ = ["compile_expression", "FUNCTIONS", "CONSTANTS"]


def _step(x, a=0.0):
    """Indicator of ``x >= a``; in expressions ``step(a)`` uses the variable as ``x``."""
    return np.where(np.asarray(x) >= a, 1.0, 0.0)


def _piecewise(t, a, b):
    """``a`` where ``t >= 0`` else ``b``."""
    return np.where(np.asarray(t) >= 0, a, b)


FUNCTIONS: dict[str, Callable] = {
    "sqrt": np.sqrt,
    "log": np.log10,
    "log10": np.log10,
    "ln": np.log,
    "exp": np.exp,
    "cos": np.cos,
    "sin": np.sin,
    "abs": np.abs,
    "pow": np.power,
    "floor": np.floor,
    "step": _step,
    "piecewise": _piecewise,
}

CONSTANTS = {"pi": math.pi, "e": math.e}

_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
    ast.Mod: np.mod,
}
_UNARY = {ast.USub: np.negative, ast.UAdd: np.positive}


def _normalize(text: str) -> str:
    return text.replace("^", "**").replace("×", "*").replace("÷", "/").replace("−", "-")


def _compile_node(node: ast.AST, variable: str) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ParseError(f"unsupported literal {node.value!r}")
        value = float(node.value)
        return lambda v: value
    if isinstance(node, ast.Name):
        if node.id == variable:
            return lambda v: v
        if node.id in CONSTANTS:
            value = CONSTANTS[node.id]
            return lambda v: value
        raise ParseError(f"unknown name {node.id!r} (variable is {variable!r})")
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        left, right = _compile_node(node.left, variable), _compile_node(node.right, variable)
        return lambda v: op(left(v), right(v))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        op = _UNARY[type(node.op)]
        inner = _compile_node(node.operand, variable)
        return lambda v: op(inner(v))
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
            raise ParseError(f"unknown function in {ast.unparse(node)!r}")
        if node.keywords:
            raise ParseError("keyword arguments are not supported")
        func = FUNCTIONS[node.func.id]
        args = [_compile_node(a, variable) for a in node.args]
        if node.func.id == "step" and len(args) == 1:
            # step(a) is the indicator of variable >= a
            threshold = args[0]
            return lambda v: _step(v, threshold(v))
        return lambda v: func(*(a(v) for a in args))
    raise ParseError(f"unsupported syntax: {ast.unparse(node)!r}")


def compile_expression(text: str, variable: str = "x") -> Callable[[np.ndarray], np.ndarray]:
    """Compile ``text`` into a vectorized callable of ``variable``.

    >>> f = compile_expression("x^2 + 1")
    >>> f(np.array([0.0, 2.0])).tolist()
    [1.0, 5.0]
    """
    try:
        tree = ast.parse(_normalize(text.strip()), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None
    body = _compile_node(tree.body, variable)

    def evaluate(values):
        v = np.asarray(values, dtype=float)
        with np.errstate(all="ignore"):
            out = np.asarray(body(v), dtype=float)
        return np.broadcast_to(out, v.shape).astype(float) if out.shape != v.shape else out

    evaluate.__name__ = f"expr[{text.strip()}]"
    return evaluate
