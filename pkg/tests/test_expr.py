import math
import pickle

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sisfront.errors import ExpressionError
from sisfront.expr import Expression


def test_reference_coefficients_evaluate():
    beta = Expression("4 + 2*sin(x)/(1 + x^2)")
    x = np.array([0.0, 1.0, -2.5])
    assert np.allclose(beta(x), 4 + 2 * np.sin(x) / (1 + x**2))


def test_constant_broadcasts_to_array():
    out = Expression("3.5")(np.zeros(4))
    assert out.shape == (4,)
    assert np.all(out == 3.5)
    out[0] = 1.0  # result is writable


def test_pi_is_reserved_constant():
    assert Expression("cos(pi*x/2)")(1.0) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("source", [
    "__import__('os')",
    "x.real",
    "y + 1",
    "foo(x)",
    "sin(x, x)",
    "x if x else 1",
    "[x]",
    "'a'",
    "x % 2",
    "",
])
def test_rejects_unsafe_or_unknown_syntax(source):
    with pytest.raises(ExpressionError):
        Expression(source)


def test_nonfinite_value_names_the_point():
    expr = Expression("1/x")
    with pytest.raises(ExpressionError, match="x = 0"):
        expr(np.array([-1.0, 0.0, 1.0]))


def test_pickle_roundtrip():
    expr = Expression("exp(-x^2)")
    clone = pickle.loads(pickle.dumps(expr))
    assert clone == expr
    assert clone(0.5) == pytest.approx(math.exp(-0.25))


@given(st.floats(-50, 50), st.floats(0.1, 5))
def test_matches_python_arithmetic(x, c):
    expr = Expression(f"{c!r}*x^2 - sin(x)/(1 + x^2) + exp(-abs(x))")
    expected = c * x * x - math.sin(x) / (1 + x * x) + math.exp(-abs(x))
    assert expr(x) == pytest.approx(expected, rel=1e-12, abs=1e-12)
