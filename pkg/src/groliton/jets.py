"""Truncated multivariate Taylor arithmetic (jets).

A :class:`Jet` stores the Taylor coefficients of a smooth function at a point,
truncated at a fixed total degree, for 1 to 3 variables.  Coefficients are kept
densely in graded-lexicographic order, so ``coeffs[i]`` is
``partial^alpha f / alpha!`` for the ``i``-th multi-index ``alpha``.  All
arithmetic is exact truncation: the result of an operation on two jets of the
same order carries the exact Taylor coefficients of the composite function up
to that order.

Differentiating a jet loses one order of information, so :meth:`Jet.derivative`
returns a jet of order one less.  Binary operations between jets of different
orders truncate to the smaller order.

The hot kernel — the truncated Cauchy product — is table-driven: for each
``(nvars, order)`` pair an index table enumerates every coefficient pair whose
product lands inside the truncation.  A compiled version of the accumulation
loop is used when available; set ``GROLITON_PURE_PYTHON=1`` to force the numpy
fallback.  ``GROLITON_ORDER`` overrides the default truncation order.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from itertools import product as _iproduct
from typing import Sequence

import numpy as np

if os.environ.get("GROLITON_PURE_PYTHON"):
    from . import _jetkernel_py as _kernel
else:
    try:
        from . import _jetkernel as _kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _jetkernel_py as _kernel

#: Which convolution kernel was selected at import ("compiled" or "python").
BACKEND: str = _kernel.BACKEND

#: Default truncation order; overridable through the environment.
DEFAULT_ORDER: int = int(os.environ.get("GROLITON_ORDER", "8"))

MAX_NVARS = 3


class JetDomainError(ValueError):
    """An elementary function was evaluated outside its real domain."""


def ncoeffs(nvars: int, order: int) -> int:
    """Number of monomials of total degree <= order in nvars variables."""
    return math.comb(nvars + order, nvars)


@dataclass(frozen=True)
class JetTables:
    """Precomputed index tables for one (nvars, order) pair."""

    monomials: tuple[tuple[int, ...], ...]
    index: dict[tuple[int, ...], int]
    mul_a: np.ndarray
    mul_b: np.ndarray
    mul_out: np.ndarray
    deriv_src: tuple[np.ndarray, ...]
    deriv_factor: tuple[np.ndarray, ...]


@lru_cache(maxsize=None)
def tables(nvars: int, order: int) -> JetTables:
    """Build (and cache) the monomial/product/derivative tables."""
    if not 1 <= nvars <= MAX_NVARS:
        raise ValueError(f"jets support 1..{MAX_NVARS} variables, got {nvars}")
    if order < 0:
        raise ValueError(f"jet order must be >= 0, got {order}")
    monos = sorted(
        (alpha for alpha in _iproduct(range(order + 1), repeat=nvars)
         if sum(alpha) <= order),
        key=lambda alpha: (sum(alpha), alpha),
    )
    index = {alpha: i for i, alpha in enumerate(monos)}

    mul_a, mul_b, mul_out = [], [], []
    for i, alpha in enumerate(monos):
        da = sum(alpha)
        for j, beta in enumerate(monos):
            if da + sum(beta) > order:
                continue
            gamma = tuple(a + b for a, b in zip(alpha, beta))
            mul_a.append(i)
            mul_b.append(j)
            mul_out.append(index[gamma])

    # Graded order makes the monomials of degree <= order-1 a prefix of the
    # list, in the same relative order, so a derivative maps position i of the
    # lower-order table to a source position in this table.
    deriv_src, deriv_factor = [], []
    if order >= 1:
        nlow = ncoeffs(nvars, order - 1)
        for v in range(nvars):
            src = np.empty(nlow, dtype=np.intp)
            fac = np.empty(nlow, dtype=np.float64)
            for i in range(nlow):
                beta = monos[i]
                shifted = tuple(b + 1 if k == v else b for k, b in enumerate(beta))
                src[i] = index[shifted]
                fac[i] = beta[v] + 1
            deriv_src.append(src)
            deriv_factor.append(fac)

    return JetTables(
        monomials=tuple(monos),
        index=index,
        mul_a=np.asarray(mul_a, dtype=np.int32),
        mul_b=np.asarray(mul_b, dtype=np.int32),
        mul_out=np.asarray(mul_out, dtype=np.int32),
        deriv_src=tuple(deriv_src),
        deriv_factor=tuple(deriv_factor),
    )


class Jet:
    """Dense truncated Taylor expansion of a scalar function at a point."""

    __slots__ = ("coeffs", "order", "nvars")

    def __init__(self, coeffs: np.ndarray, order: int, nvars: int):
        self.coeffs = coeffs
        self.order = order
        self.nvars = nvars

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(value: float, order: int = DEFAULT_ORDER, nvars: int = 1) -> "Jet":
        c = np.zeros(ncoeffs(nvars, order))
        c[0] = value
        return Jet(c, order, nvars)

    @staticmethod
    def variable(var: int, value: float, order: int = DEFAULT_ORDER,
                 nvars: int = 1) -> "Jet":
        if not 0 <= var < nvars:
            raise ValueError(f"variable index {var} out of range for nvars={nvars}")
        c = np.zeros(ncoeffs(nvars, order))
        c[0] = value
        if order >= 1:
            unit = tuple(1 if k == var else 0 for k in range(nvars))
            c[tables(nvars, order).index[unit]] = 1.0
        return Jet(c, order, nvars)

    # -- inspection --------------------------------------------------------

    @property
    def value(self) -> float:
        """The constant term (function value at the expansion point)."""
        return float(self.coeffs[0])

    def coefficient(self, alpha: Sequence[int]) -> float:
        """Taylor coefficient of the monomial with multi-index alpha."""
        alpha = tuple(alpha)
        if len(alpha) != self.nvars or sum(alpha) > self.order:
            raise ValueError(f"multi-index {alpha} outside jet of order "
                             f"{self.order} in {self.nvars} variables")
        return float(self.coeffs[tables(self.nvars, self.order).index[alpha]])

    def partial(self, alpha: Sequence[int]) -> float:
        """Mixed partial derivative: alpha! times the Taylor coefficient."""
        c = self.coefficient(alpha)
        for a in alpha:
            c *= math.factorial(a)
        return c

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, nvars={self.nvars}, value={self.value:g})"

    # -- structural ops ----------------------------------------------------

    def truncated(self, order: int) -> "Jet":
        """The same expansion cut to a lower order."""
        if order > self.order:
            raise ValueError(f"cannot extend a jet of order {self.order} to {order}")
        if order == self.order:
            return self
        return Jet(self.coeffs[: ncoeffs(self.nvars, order)].copy(), order, self.nvars)

    def derivative(self, var: int) -> "Jet":
        """Partial derivative with respect to variable ``var`` (order drops by 1)."""
        if self.order < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        if not 0 <= var < self.nvars:
            raise ValueError(f"variable index {var} out of range for nvars={self.nvars}")
        t = tables(self.nvars, self.order)
        return Jet(self.coeffs[t.deriv_src[var]] * t.deriv_factor[var],
                   self.order - 1, self.nvars)

    # -- arithmetic --------------------------------------------------------

    def _align(self, other: "Jet") -> tuple[np.ndarray, np.ndarray, int]:
        if self.nvars != other.nvars:
            raise ValueError(f"jet variable counts differ: "
                             f"{self.nvars} vs {other.nvars}")
        order = min(self.order, other.order)
        n = ncoeffs(self.nvars, order)
        return self.coeffs[:n], other.coeffs[:n], order

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b, order = self._align(other)
            return Jet(a + b, order, self.nvars)
        c = self.coeffs.copy()
        c[0] += other
        return Jet(c, self.order, self.nvars)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            a, b, order = self._align(other)
            return Jet(a - b, order, self.nvars)
        c = self.coeffs.copy()
        c[0] -= other
        return Jet(c, self.order, self.nvars)

    def __rsub__(self, other):
        c = -self.coeffs
        c[0] += other
        return Jet(c, self.order, self.nvars)

    def __neg__(self):
        return Jet(-self.coeffs, self.order, self.nvars)

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b, order = self._align(other)
            t = tables(self.nvars, order)
            out = _kernel.convolve(a, b, t.mul_a, t.mul_b, t.mul_out, len(a))
            return Jet(out, order, self.nvars)
        return Jet(self.coeffs * other, self.order, self.nvars)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * _reciprocal(other)
        return Jet(self.coeffs / other, self.order, self.nvars)

    def __rtruediv__(self, other):
        return _reciprocal(self) * other

    def __pow__(self, exponent):
        return jet_pow(self, exponent)


def jet_constant(value: float, order: int = DEFAULT_ORDER, nvars: int = 1) -> Jet:
    """Jet of the constant function ``value``."""
    return Jet.constant(value, order, nvars)


def jet_variable(var: int, value: float, order: int = DEFAULT_ORDER,
                 nvars: int = 1) -> Jet:
    """Jet of the coordinate function number ``var`` expanded at ``value``."""
    return Jet.variable(var, value, order, nvars)


def seed_point(point: Sequence[float], order: int = DEFAULT_ORDER) -> list[Jet]:
    """Coordinate jets for a full point: one variable jet per coordinate."""
    point = list(point)
    return [jet_variable(i, p, order, len(point)) for i, p in enumerate(point)]


# ---------------------------------------------------------------------------
# Composition with univariate Taylor series
# ---------------------------------------------------------------------------


def compose_series(series: Sequence[float], a: Jet) -> Jet:
    """Evaluate ``sum_k series[k] * (a - a.value)**k`` by Horner's scheme.

    ``series`` must hold the univariate Taylor coefficients of some function f
    at ``a.value``, listed up to at least ``a.order``; the result is then the
    jet of ``f(a)``.
    """
    h = a - a.value
    out = Jet.constant(series[a.order], a.order, a.nvars)
    for k in range(a.order - 1, -1, -1):
        out = out * h + series[k]
    return out


def _as_float(x) -> float:
    return x.value if isinstance(x, Jet) else float(x)


def _reciprocal(b: Jet) -> Jet:
    b0 = b.value
    if b0 == 0.0:
        raise ZeroDivisionError("division by a jet with zero constant term")
    series = [(-1.0) ** k / b0 ** (k + 1) for k in range(b.order + 1)]
    return compose_series(series, b)


def jet_pow(a: Jet, exponent) -> Jet:
    """``a ** exponent`` for an integer or real constant exponent."""
    if isinstance(exponent, Jet):
        raise TypeError("jet exponents are not supported; use exp(b*log(a))")
    r = float(exponent)
    if r == int(r):
        n = int(r)
        if n < 0:
            return _reciprocal(_int_pow(a, -n))
        return _int_pow(a, n)
    a0 = a.value
    if a0 <= 0.0:
        raise JetDomainError(
            f"x**{r}: non-integer real power needs a positive base, got {a0:g}")
    series = [a0 ** r]
    for k in range(1, a.order + 1):
        series.append(series[-1] * (r - k + 1) / (k * a0))
    return compose_series(series, a)


def _int_pow(a: Jet, n: int) -> Jet:
    if n == 0:
        return Jet.constant(1.0, a.order, a.nvars)
    out = None
    base = a
    while n:
        if n & 1:
            out = base if out is None else out * base
        n >>= 1
        if n:
            base = base * base
    return out


# ---------------------------------------------------------------------------
# Elementary functions
#
# Each function builds the univariate Taylor coefficients of itself at the
# jet's constant term and composes them through `compose_series`.  The
# coefficient recursions below are the classical ones (derivative cycling for
# sin/cos, T' = 1 + T^2 for tan, the coupled pair S' = -S T, T' = S^2 for
# sech/tanh, and termwise integration of the derivative series for the inverse
# functions).
# ---------------------------------------------------------------------------


def exp(x):
    if not isinstance(x, Jet):
        return math.exp(x)
    e0 = math.exp(x.value)
    series = [e0]
    for k in range(1, x.order + 1):
        series.append(series[-1] / k)
    return compose_series(series, x)


def log(x):
    if not isinstance(x, Jet):
        if x <= 0.0:
            raise JetDomainError(f"log: needs a positive argument, got {x:g}")
        return math.log(x)
    a0 = x.value
    if a0 <= 0.0:
        raise JetDomainError(f"log: needs a positive argument, got {a0:g}")
    series = [math.log(a0)]
    for k in range(1, x.order + 1):
        series.append(-((-1.0 / a0) ** k) / k)
    return compose_series(series, x)


def sqrt(x):
    if not isinstance(x, Jet):
        if x < 0.0:
            raise JetDomainError(f"sqrt: needs a non-negative argument, got {x:g}")
        return math.sqrt(x)
    return jet_pow(x, 0.5)


def sin(x):
    if not isinstance(x, Jet):
        return math.sin(x)
    a0 = x.value
    series = [math.sin(a0 + k * math.pi / 2.0) / math.factorial(k)
              for k in range(x.order + 1)]
    return compose_series(series, x)


def cos(x):
    if not isinstance(x, Jet):
        return math.cos(x)
    a0 = x.value
    series = [math.cos(a0 + k * math.pi / 2.0) / math.factorial(k)
              for k in range(x.order + 1)]
    return compose_series(series, x)


def _tan_series(t0: float, sign: float, order: int) -> list[float]:
    """Coefficients of tan (sign=+1) or tanh (sign=-1) from T' = 1 + sign*T^2."""
    t = [t0]
    for k in range(order):
        conv = sum(t[i] * t[k - i] for i in range(k + 1))
        t.append(((1.0 if k == 0 else 0.0) + sign * conv) / (k + 1))
    return t


def tan(x):
    if not isinstance(x, Jet):
        return math.tan(x)
    if abs(math.cos(x.value)) < 1e-300:
        raise JetDomainError("tan: argument at a pole")
    return compose_series(_tan_series(math.tan(x.value), +1.0, x.order), x)


def tanh(x):
    if not isinstance(x, Jet):
        return math.tanh(x)
    return compose_series(_tan_series(math.tanh(x.value), -1.0, x.order), x)


def sech(x):
    if not isinstance(x, Jet):
        return 1.0 / math.cosh(x)
    a0 = x.value
    s = [1.0 / math.cosh(a0)]
    t = [math.tanh(a0)]
    for k in range(x.order):
        s.append(-sum(s[i] * t[k - i] for i in range(k + 1)) / (k + 1))
        t.append(sum(s[i] * s[k - i] for i in range(k + 1)) / (k + 1))
    return compose_series(s, x)


def _integrated_series(value0: float, dseries: Jet, order: int) -> list[float]:
    """Series of f from f(a0) and the univariate jet of f' at a0."""
    series = [value0]
    for k in range(1, order + 1):
        series.append(float(dseries.coeffs[k - 1]) / k)
    return series


def arcsin(x):
    if not isinstance(x, Jet):
        if not -1.0 < x < 1.0:
            raise JetDomainError(f"arcsin: needs |x| < 1, got {x:g}")
        return math.asin(x)
    a0 = x.value
    if not -1.0 < a0 < 1.0:
        raise JetDomainError(f"arcsin: needs |x| < 1, got {a0:g}")
    u = Jet.variable(0, a0, max(x.order - 1, 0), 1)
    dseries = jet_pow(1.0 - u * u, -0.5)
    return compose_series(_integrated_series(math.asin(a0), dseries, x.order), x)


def arcsinh(x):
    if not isinstance(x, Jet):
        return math.asinh(x)
    a0 = x.value
    u = Jet.variable(0, a0, max(x.order - 1, 0), 1)
    dseries = jet_pow(1.0 + u * u, -0.5)
    return compose_series(_integrated_series(math.asinh(a0), dseries, x.order), x)


# ---------------------------------------------------------------------------
# Lambert W
# ---------------------------------------------------------------------------

_BRANCH_POINT = -1.0 / math.e
_NEWTON_CAP = 64
_NEWTON_TOL = 1e-14


def _lambert_w_value(z: float, branch: int) -> float:
    """Real Lambert W on branch 0 or -1 by Newton on w*e^w = z."""
    if branch not in (0, -1):
        raise ValueError(f"lambert_w: branch must be 0 or -1, got {branch}")
    if z < _BRANCH_POINT - 1e-15:
        raise JetDomainError(f"lambert_w: argument {z:g} below -1/e")
    z = max(z, _BRANCH_POINT)
    if branch == -1 and z >= 0.0:
        raise JetDomainError("lambert_w branch -1: needs -1/e <= z < 0")

    p2 = 2.0 * (math.e * z + 1.0)
    if p2 <= 4e-16:
        return -1.0
    p = math.sqrt(p2)
    if branch == 0:
        if z < -0.25:
            w = -1.0 + p - p2 / 3.0
        elif z < 1.0:
            w = z / (1.0 + z)
        else:
            w = math.log(z)
            if w > 1.0:
                w -= math.log(w)
    else:
        if z > -0.25:
            lz = math.log(-z)
            w = lz - math.log(-lz)
        else:
            w = -1.0 - p - p2 / 3.0

    for _ in range(_NEWTON_CAP):
        ew = math.exp(w)
        f = w * ew - z
        dw = f / (ew * (1.0 + w))
        w -= dw
        if abs(dw) <= _NEWTON_TOL * (1.0 + abs(w)):
            break
    return w


def lambert_w(x, branch: int = 0):
    """Real Lambert W (principal or -1 branch) of a float or a jet.

    Values come from Newton's method on ``w e^w = z``; for a jet the scalar
    solution seeds a jet-space Newton iteration, each step of which doubles
    the number of correct Taylor coefficients.
    """
    if not isinstance(x, Jet):
        return _lambert_w_value(float(x), branch)
    w0 = _lambert_w_value(x.value, branch)
    if abs(1.0 + w0) < 1e-12:
        raise JetDomainError("lambert_w: derivative singular at the branch point")
    w = Jet.constant(w0, x.order, x.nvars)
    steps = max(1, math.ceil(math.log2(x.order + 1))) + 1
    for _ in range(steps):
        ew = exp(w)
        w = w - (w * ew - x) / (ew * (1.0 + w))
    return w


#: Name -> callable map for every supported elementary function.
ELEMENTARY = {
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "tanh": tanh,
    "sech": sech,
    "arcsin": arcsin,
    "arcsinh": arcsinh,
    "lambert_w0": lambda x: lambert_w(x, 0),
    "lambert_wm1": lambda x: lambert_w(x, -1),
}
