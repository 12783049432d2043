"""Jet arithmetic against closed-form derivatives, finite differences,
symbolic differentiation, and scipy's Lambert W."""

from __future__ import annotations

import math
import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.special
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from groliton import jets

from conftest import d1


def _jet_of(fn, x0, order=8):
    return fn(jets.jet_variable(0, x0, order, 1))


def test_variable_and_constant_seeds():
    j = jets.jet_variable(0, 0.5, 4, 1)
    assert list(j.coeffs) == [0.5, 1.0, 0.0, 0.0, 0.0]
    c = jets.jet_constant(2.5, 4, 2)
    assert c.value == 2.5
    assert all(v == 0.0 for v in c.coeffs[1:])
    p = jets.seed_point((0.3, 0.4), 3)
    assert [s.value for s in p] == [0.3, 0.4]
    assert p[0].nvars == 2 and p[0].order == 3


def test_partial_of_square_is_two():
    j = jets.jet_variable(0, 3.0, 4, 1)
    sq = j * j
    assert sq.partial((2,)) == pytest.approx(2.0, abs=1e-14)
    assert sq.partial((0,)) == sq.value == 9.0


def test_partial_exp_t_squared():
    # d^2/dt^2 e^{t^2} = (4t^2 + 2) e^{t^2} -> 6e at t = 1
    t = jets.jet_variable(0, 1.0, 4, 1)
    f = jets.exp(t * t)
    assert f.partial((2,)) == pytest.approx(6.0 * math.e, rel=1e-13)


def test_coefficient_vs_partial_factorials():
    t = jets.jet_variable(0, 0.7, 6, 1)
    f = jets.sin(t * t + t)
    for k in range(7):
        assert f.partial((k,)) == pytest.approx(
            f.coefficient((k,)) * math.factorial(k), rel=1e-12, abs=1e-300
        )


@pytest.mark.parametrize(
    "fn,x0,kth",
    [
        (jets.exp, 0.4, lambda k, x: math.exp(x)),
        (jets.sin, 0.9, lambda k, x: math.sin(x + k * math.pi / 2)),
        (jets.cos, -0.6, lambda k, x: math.cos(x + k * math.pi / 2)),
        (
            jets.log,
            1.7,
            lambda k, x: math.log(x) if k == 0 else (-1.0) ** (k - 1) * math.factorial(k - 1) / x**k,
        ),
    ],
)
def test_elementary_against_closed_form_derivatives(fn, x0, kth):
    f = _jet_of(fn, x0)
    for k in range(9):
        assert f.partial((k,)) == pytest.approx(kth(k, x0), rel=1e-12, abs=1e-12)


def test_sqrt_matches_pow_half_derivatives():
    x0 = 2.3
    f = _jet_of(jets.sqrt, x0)
    for k in range(9):
        coef = 1.0
        for j in range(k):
            coef *= 0.5 - j
        assert f.partial((k,)) == pytest.approx(coef * x0 ** (0.5 - k), rel=1e-12)
    g = jets.jet_pow(jets.jet_variable(0, x0, 8, 1), 0.5)
    assert np.allclose(f.coeffs, g.coeffs, rtol=1e-14, atol=1e-14)


@pytest.mark.parametrize(
    "fn,sym,x0",
    [
        (jets.tan, sympy.tan, 0.6),
        (jets.tanh, sympy.tanh, 0.8),
        (jets.sech, lambda v: 1 / sympy.cosh(v), -0.5),
        (jets.arcsin, sympy.asin, 0.4),
        (jets.arcsinh, sympy.asinh, 1.2),
    ],
)
def test_elementary_against_sympy_derivatives(fn, sym, x0):
    v = sympy.Symbol("v")
    expr = sym(v)
    f = _jet_of(fn, x0, order=6)
    for k in range(7):
        want = float(sympy.diff(expr, v, k).subs(v, x0).evalf(30))
        assert f.partial((k,)) == pytest.approx(want, rel=1e-11, abs=1e-12)


def test_composition_against_finite_differences():
    # Spec invariant: composed functions agree with FD to 1e-6 for orders <= 4.
    def composed(x):
        return math.sin(math.exp(x / 2) + x * x)

    x0 = 0.35
    f = jets.sin(jets.exp(jets.jet_variable(0, x0, 5, 1) / 2) + jets.jet_variable(0, x0, 5, 1) ** 2)
    h = 1e-2
    fd1 = d1(composed, x0, h)
    fd2 = d1(lambda s: d1(composed, s, h), x0, h)
    fd3 = d1(lambda s: d1(lambda u: d1(composed, u, h), s, h), x0, h)
    for order, fd in [(1, fd1), (2, fd2), (3, fd3)]:
        assert f.partial((order,)) == pytest.approx(fd, rel=1e-6)


@given(
    a=st.lists(st.floats(-2, 2), min_size=5, max_size=5),
    b=st.lists(st.floats(-2, 2), min_size=5, max_size=5),
)
@settings(max_examples=100, deadline=None)
def test_leibniz_property(a, b):
    # partial(a*b, k) equals the Leibniz expansion of the factors' partials.
    order = 4
    ja = jets.compose_series(a, jets.jet_variable(0, 0.0, order, 1))
    jb = jets.compose_series(b, jets.jet_variable(0, 0.0, order, 1))
    prod = ja * jb
    for k in range(order + 1):
        expansion = sum(
            math.comb(k, i) * ja.partial((i,)) * jb.partial((k - i,))
            for i in range(k + 1)
        )
        assert prod.partial((k,)) == pytest.approx(expansion, rel=1e-12, abs=1e-10)


@given(x=st.floats(-1.2, 1.2))
@settings(max_examples=100, deadline=None)
def test_sin_cos_pythagorean_jet_identity(x):
    j = jets.jet_variable(0, x, 6, 1)
    one = jets.sin(j) ** 2 + jets.cos(j) ** 2
    assert one.value == pytest.approx(1.0, abs=1e-13)
    assert max(abs(c) for c in one.coeffs[1:]) < 1e-12


@given(x=st.floats(0.2, 3.0))
@settings(max_examples=100, deadline=None)
def test_exp_log_roundtrip(x):
    # Well-conditioned points only: log coefficients scale like x^{-k}, so
    # tiny x trades away float precision without testing anything new.
    j = jets.jet_variable(0, x, 6, 1)
    back = jets.exp(jets.log(j))
    assert np.allclose(back.coeffs, j.coeffs, rtol=1e-11, atol=1e-10)


def test_derivative_drops_one_order():
    e = jets.exp(jets.jet_variable(0, 0.7, 5, 1))
    d = e.derivative(0)
    assert d.order == 4
    assert np.allclose(d.coeffs, e.truncated(4).coeffs, rtol=1e-13)


def test_multivariate_mixed_partials():
    x = jets.jet_variable(0, 0.3, 6, 2)
    y = jets.jet_variable(1, 1.1, 6, 2)
    f = jets.exp(x) * jets.sin(y)
    # d^2/dx^2 d^3/dy^3 (e^x sin y) = e^x * (-cos y)
    assert f.partial((2, 3)) == pytest.approx(-math.exp(0.3) * math.cos(1.1), rel=1e-12)
    assert f.partial((0, 0)) == pytest.approx(math.exp(0.3) * math.sin(1.1), rel=1e-14)


def test_compose_series_matches_exp():
    series = [1.0 / math.factorial(k) for k in range(9)]
    a = jets.jet_variable(0, 0.0, 8, 1) * 0.8  # exp(0.8 x) around 0
    composed = jets.compose_series(series, a)
    direct = jets.exp(a)
    assert np.allclose(composed.coeffs, direct.coeffs, rtol=1e-12, atol=1e-12)


def test_lambert_w_values_against_scipy():
    for z in (0.2, 1.5, 3.0, -0.2, -0.05):
        w = jets.lambert_w(jets.jet_constant(z, 2, 1))
        assert w.value == pytest.approx(scipy.special.lambertw(z, 0).real, rel=1e-12)
    for z in (-0.3, -0.05, -1 / math.e + 1e-3):
        w = jets.lambert_w(jets.jet_constant(z, 2, 1), branch=-1)
        assert w.value == pytest.approx(scipy.special.lambertw(z, -1).real, rel=1e-10)


def test_lambert_w_inverse_property():
    # Spec invariant: w * exp(w) re-evaluated as a jet equals the input jet.
    for z0, branch in [(0.7, 0), (2.2, 0), (-0.25, 0), (-0.25, -1)]:
        z = jets.jet_variable(0, z0, 6, 1)
        w = jets.lambert_w(z, branch=branch)
        back = w * jets.exp(w)
        assert np.allclose(back.coeffs, z.coeffs, rtol=1e-10, atol=1e-10)


def test_lambert_w_derivative_identity():
    # W'(z) = W / (z (1 + W)) away from the branch point.
    z0 = 1.3
    w = jets.lambert_w(jets.jet_variable(0, z0, 4, 1))
    wv = w.value
    assert w.partial((1,)) == pytest.approx(wv / (z0 * (1 + wv)), rel=1e-12)


@pytest.mark.parametrize(
    "call,err",
    [
        (lambda: jets.log(jets.jet_constant(0.0, 3, 1)), jets.JetDomainError),
        (lambda: jets.log(jets.jet_constant(-1.0, 3, 1)), jets.JetDomainError),
        (lambda: jets.sqrt(jets.jet_constant(-2.0, 3, 1)), jets.JetDomainError),
        (lambda: jets.arcsin(jets.jet_constant(1.5, 3, 1)), jets.JetDomainError),
        (
            lambda: jets.jet_pow(jets.jet_constant(-1.0, 3, 1), 0.5),
            jets.JetDomainError,
        ),
        (
            lambda: jets.lambert_w(jets.jet_constant(-0.5, 3, 1)),
            jets.JetDomainError,
        ),
        (
            lambda: jets.jet_constant(1.0, 3, 1)
            / (jets.jet_constant(1.0, 3, 1) - 1.0),
            ZeroDivisionError,
        ),
        (lambda: jets.jet_variable(0, 1.0, 4, 4), ValueError),
    ],
)
def test_domain_errors(call, err):
    with pytest.raises(err):
        call()


def test_integer_powers_allow_negative_base():
    j = jets.jet_variable(0, 0.5, 4, 1)
    sq = (j - 1.5) ** 2
    assert sq.value == pytest.approx(1.0)
    assert sq.partial((1,)) == pytest.approx(2 * (0.5 - 1.5))


def test_ncoeffs_formula():
    for nvars in (1, 2, 3):
        for order in (0, 1, 4, 8):
            assert jets.ncoeffs(nvars, order) == math.comb(nvars + order, nvars)


def test_backend_selected_and_reported():
    assert jets.BACKEND in ("compiled", "python")


def _run_py(code, env_extra):
    env = dict(os.environ)
    env.update(env_extra)
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env
    )
    assert out.returncode == 0, out.stderr
    return out.stdout.strip()


def test_order_env_override():
    code = "from groliton import jets; print(jets.DEFAULT_ORDER)"
    assert _run_py(code, {"GROLITON_ORDER": "5"}) == "5"


def test_pure_python_backend_matches_compiled():
    code = (
        "from groliton import jets\n"
        "j = jets.jet_variable(0, 0.37, 8, 2) + jets.jet_variable(1, -0.9, 8, 2)\n"
        "f = jets.exp(jets.sin(j) * j) / (j + 2.0)\n"
        "print(jets.BACKEND)\n"
        "print(' '.join(f'{float(c):.17g}' for c in f.coeffs))\n"
    )
    here = _run_py(code, {})
    pure = _run_py(code, {"GROLITON_PURE_PYTHON": "1"})
    assert pure.splitlines()[0] == "python"
    a = np.array([float(v) for v in here.splitlines()[1].split()])
    b = np.array([float(v) for v in pure.splitlines()[1].split()])
    assert np.allclose(a, b, rtol=1e-13, atol=1e-13)
