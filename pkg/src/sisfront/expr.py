"""Closed-form coefficient expressions in the variable ``x``.

Grammar: numbers, ``x``, the constants ``pi`` and ``e``, the binary operators
``+ - * /`` and ``**`` (``^`` is accepted as a synonym), unary sign,
parentheses, and the functions ``sin cos tan exp log sqrt abs tanh cosh
sinh``.  Expressions evaluate elementwise on numpy arrays.

>>> Expression("4 + 2*sin(x)/(1 + x^2)")(0.0)
4.0
"""

import ast
from functools import lru_cache

import numpy as np

from .errors import ExpressionError

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "tanh": np.tanh,
    "cosh": np.cosh,
    "sinh": np.sinh,
}
CONSTANTS = {"pi": np.pi, "e": np.e}

_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_UNARYOPS = (ast.UAdd, ast.USub)


def _check(node, source):
    if isinstance(node, ast.Expression):
        _check(node.body, source)
    elif isinstance(node, ast.BinOp):
        if not isinstance(node.op, _BINOPS):
            raise ExpressionError(f"operator {type(node.op).__name__} not allowed in {source!r}")
        _check(node.left, source)
        _check(node.right, source)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, _UNARYOPS):
            raise ExpressionError(f"operator {type(node.op).__name__} not allowed in {source!r}")
        _check(node.operand, source)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
            raise ExpressionError(f"unknown function in {source!r}")
        if len(node.args) != 1 or node.keywords:
            raise ExpressionError(f"functions take exactly one argument in {source!r}")
        _check(node.args[0], source)
    elif isinstance(node, ast.Name):
        if node.id != "x" and node.id not in CONSTANTS:
            raise ExpressionError(f"unknown name {node.id!r} in {source!r}")
    elif isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ExpressionError(f"non-numeric literal in {source!r}")
    else:
        raise ExpressionError(f"unsupported syntax {type(node).__name__} in {source!r}")


@lru_cache(maxsize=256)
def _compile(source):
    text = source.replace("^", "**")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {source!r}: {exc.msg}") from None
    _check(tree, source)
    return compile(tree, "<expr>", "eval")


class Expression:
    """A parsed expression; picklable because only the source is stored."""

    __slots__ = ("source",)

    def __init__(self, source):
        if isinstance(source, Expression):
            source = source.source
        if not isinstance(source, str) or not source.strip():
            raise ExpressionError("expression must be a non-empty string")
        self.source = source.strip()
        _compile(self.source)

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        namespace = {"x": x_arr, **FUNCTIONS, **CONSTANTS}
        with np.errstate(all="ignore"):
            value = eval(_compile(self.source), {"__builtins__": {}}, namespace)
        value = np.broadcast_to(np.asarray(value, dtype=float), x_arr.shape)
        if not np.all(np.isfinite(value)):
            bad = np.atleast_1d(x_arr)[~np.isfinite(np.atleast_1d(value))][0]
            raise ExpressionError(f"{self.source!r} is not finite at x = {float(bad):g}")
        if value.ndim == 0:
            return float(value)
        return np.array(value)

    def __getstate__(self):
        return self.source

    def __setstate__(self, state):
        self.source = state

    def __eq__(self, other):
        return isinstance(other, Expression) and other.source == self.source

    def __hash__(self):
        return hash(self.source)

    def __repr__(self):
        return f"Expression({self.source!r})"
