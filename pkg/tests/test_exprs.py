"""Expression parser and jet-arithmetic evaluator."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groliton import exprs, jets


def ev(text, **env):
    return exprs.evaluate(exprs.parse(text), env)


def test_basic_arithmetic_and_precedence():
    assert ev("2*x^3 - sin(y)/4", x=0.7, y=-0.3) == pytest.approx(
        2 * 0.7**3 - math.sin(-0.3) / 4
    )
    assert ev("(y^4+6)/6", y=1.0) == pytest.approx(7 / 6)
    assert ev("2 - 3 - 4") == -5.0  # left-associative
    assert ev("12/4/3") == 1.0
    assert ev("2^3^2") == 64.0  # pow is left-associative too
    assert ev("-x^2", x=0.7) == pytest.approx(-0.49)  # pow binds tighter than unary -
    assert ev("2 + 3*4") == 14.0
    assert ev("pi") == pytest.approx(math.pi)


def test_paper_display_values():
    # "(y^4+6)/6" -> 7/6 at y = 1; second derivative of (y^4+6)/6 at 1 is 2.
    y = jets.jet_variable(0, 1.0, 4, 1)
    f = exprs.evaluate(exprs.parse("(y^4+6)/6"), {"y": y})
    assert f.value == pytest.approx(7 / 6)
    assert f.partial((2,)) == pytest.approx(2.0)
    assert ev("exp(2*t)", t=0.0) == pytest.approx(1.0)
    direct = math.tanh(0.5 * math.sqrt(2)) ** 2
    assert ev("tanh(0.5*sqrt(2)*r)^2", r=1.0) == pytest.approx(direct, abs=1e-12)


def test_jet_evaluation_matches_manual_composition():
    x = jets.jet_variable(0, 0.4, 6, 2)
    y = jets.jet_variable(1, -1.1, 6, 2)
    via_parser = exprs.evaluate(exprs.parse("exp(x*y) + sin(x)/(2 + y^2)"), {"x": x, "y": y})
    manual = jets.exp(x * y) + jets.sin(x) / (2.0 + y * y)
    assert np.allclose(via_parser.coeffs, manual.coeffs, rtol=1e-14, atol=1e-14)


def test_eval_square_jet_coeffs():
    y = jets.jet_variable(0, 3.0, 2, 1)
    f = exprs.evaluate(exprs.parse("y^2"), {"y": y})
    assert list(f.coeffs) == [9.0, 6.0, 1.0]


def test_all_listed_functions_evaluate():
    samples = {
        "sin": 0.5,
        "cos": 0.5,
        "tan": 0.5,
        "exp": 0.5,
        "log": 1.5,
        "sqrt": 2.0,
        "tanh": 0.5,
        "sech": 0.5,
        "arcsin": 0.5,
        "arcsinh": 0.5,
        "lambert_w0": 0.5,
        "lambert_wm1": -0.25,
    }
    assert set(samples) == set(exprs.FUNCTIONS)
    for name, x0 in samples.items():
        val = ev(f"{name}(x)", x=x0)
        assert math.isfinite(val)


def test_variable_names_restricted():
    assert exprs.VARIABLES == ("x", "y", "z", "t", "r")
    for name in exprs.VARIABLES:
        assert ev(f"{name} + 1", **{name: 2.0}) == 3.0
    with pytest.raises(exprs.ExprSyntaxError):
        exprs.parse("q + 1")


@pytest.mark.parametrize(
    "bad",
    [
        "",
        "2*",
        "2x",  # no implicit multiplication
        "foo(3)",
        "sin(1,2)",
        "log()",
        "(1 + 2",
        "1 + * 2",
        "..5",
        "x @ y",
        ")(",
        "sin",
        "^2",
        "1e",
    ],
)
def test_malformed_inputs_rejected(bad):
    with pytest.raises(exprs.ExprSyntaxError):
        exprs.parse(bad)


def test_syntax_errors_carry_offsets():
    with pytest.raises(exprs.ExprSyntaxError, match="offset"):
        exprs.parse("2 + @")


def test_eval_errors():
    with pytest.raises(exprs.ExprEvalError):
        ev("x + y", x=1.0)  # unbound variable
    with pytest.raises(jets.JetDomainError):
        exprs.evaluate(exprs.parse("log(x)"), {"x": jets.jet_variable(0, 0.0, 4, 1)})
    with pytest.raises(jets.JetDomainError):
        ev("x^0.5", x=-2.0)


def test_variables_of():
    assert exprs.variables_of(exprs.parse("x*sin(y) + t")) == frozenset({"x", "y", "t"})
    assert exprs.variables_of(exprs.parse("3.5 + pi")) == frozenset()


@st.composite
def expr_trees(draw, depth=0):
    """Random well-formed expression strings with their float evaluators."""
    leaf = draw(st.integers(0, 2)) if depth < 3 else 2
    if leaf == 0:
        return draw(st.sampled_from([("x", lambda e: e["x"]), ("y", lambda e: e["y"])]))
    if leaf == 1:
        op = draw(st.sampled_from(["+", "-", "*"]))
        lt, lf = draw(expr_trees(depth=depth + 1))
        rt, rf = draw(expr_trees(depth=depth + 1))
        fn = {"+": lambda a, b: a + b, "-": lambda a, b: a - b, "*": lambda a, b: a * b}[op]
        return f"({lt} {op} {rt})", (lambda e, lf=lf, rf=rf, fn=fn: fn(lf(e), rf(e)))
    v = draw(st.floats(-3, 3).map(lambda f: round(f, 3)))
    return repr(v), (lambda e, v=v: v)


@given(tree=expr_trees(), x=st.floats(-2, 2), y=st.floats(-2, 2))
@settings(max_examples=100, deadline=None)
def test_pretty_print_round_trip(tree, x, y):
    text, direct = tree
    e = exprs.parse(text)
    e2 = exprs.parse(exprs.pretty_print(e))
    env = {"x": x, "y": y}
    v1, v2 = exprs.evaluate(e, env), exprs.evaluate(e2, env)
    assert v1 == pytest.approx(v2, rel=1e-12, abs=1e-12)
    assert v1 == pytest.approx(direct(env), rel=1e-12, abs=1e-9)


def test_scientific_notation_and_decimals():
    assert ev("1.5e-3 + 2E2") == pytest.approx(0.0015 + 200.0)
    assert ev("0.25*4") == 1.0


def test_trees_are_immutable():
    e = exprs.parse("x + 1")
    with pytest.raises((AttributeError, TypeError)):
        e.left = None  # type: ignore[attr-defined]
