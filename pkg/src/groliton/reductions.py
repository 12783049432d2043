"""The ODE layer: generic explicit integration plus the reduction equations.

Several solution families are cut down, by symmetry ansatz, to a single
ordinary differential equation in one variable.  This module provides

* :class:`OdeProblem` / :func:`integrate` — a thin, dense-output wrapper
  around an adaptive 4th/5th-order embedded Runge–Kutta pair,
* :func:`ode_residual` — residual evaluation of every named reduction ODE
  on a jet of the candidate function,
* :func:`solution_jet` — Taylor reconstruction of an integrated solution
  as a jet, so trajectories can feed metric charts directly, and
* :func:`legendre_B` — the almost-Legendre machinery: closed forms where
  they exist, a numeric solution plane parametrised by ``(B(0), B'(0))``
  otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from . import jets
from .jets import Jet

TOL_MIN = 1e-12
TOL_MAX = 1e-4
#: Integration stops this far from a declared singular point.
SINGULAR_GUARD = 1e-3
#: Default jet order for reconstructed trajectory jets.
TRAJECTORY_ORDER = 6

__all__ = [
    "OdeError",
    "OdeProblem",
    "Trajectory",
    "integrate",
    "solution_jet",
    "ode_residual",
    "ODE_IDS",
    "legendre_B",
]


class OdeError(ValueError):
    """Bad ODE input: unknown identifier, missing parameter, bad span."""


# ----------------------------------------------------------------------
# Generic explicit integration
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class OdeProblem:
    """A scalar ODE of order 1..4 rewritten as a first-order system.

    ``rhs(t, y)`` receives the scalar coordinate and the state sequence
    ``(f, f', ..., f^(order-1))`` and returns the state derivatives.  It must
    be jet-evaluable: given ``Jet`` arguments it must return jets, which is
    automatic as long as it sticks to arithmetic and :mod:`groliton.jets`
    elementary functions.
    """

    rhs: Callable
    y0: tuple
    span: tuple
    tol: float = 1e-10
    singular_points: tuple = ()

    def __post_init__(self):
        order = len(self.y0)
        if not 1 <= order <= 4:
            raise OdeError(f"system order must be 1..4, got {order}")
        if not TOL_MIN <= self.tol <= TOL_MAX:
            raise OdeError(
                f"tolerance {self.tol:g} outside [{TOL_MIN:g}, {TOL_MAX:g}]")
        object.__setattr__(self, "y0", tuple(float(v) for v in self.y0))
        object.__setattr__(self, "span", (float(self.span[0]), float(self.span[1])))

    @property
    def order(self) -> int:
        return len(self.y0)

    def guarded_span(self) -> tuple:
        """The span clipped :data:`SINGULAR_GUARD` short of singular points."""
        t0, t1 = self.span
        lo, hi = min(t0, t1), max(t0, t1)
        for s in self.singular_points:
            if lo - SINGULAR_GUARD < s < hi + SINGULAR_GUARD:
                if t0 < s <= t1 + SINGULAR_GUARD:
                    t1 = min(t1, s - SINGULAR_GUARD)
                elif t1 - SINGULAR_GUARD <= s < t0:
                    t1 = max(t1, s + SINGULAR_GUARD)
        if (t1 - t0) * (self.span[1] - self.span[0]) < 0 or t0 == t1:
            raise OdeError(
                f"span {self.span} lies inside the guard zone of a singular point")
        return (t0, t1)


class Trajectory:
    """Dense-output solution of an :class:`OdeProblem`.

    Calling the trajectory at ``t`` returns the state vector; :meth:`jet`
    reconstructs the scalar solution as a jet by Taylor recurrence on the
    right-hand side, so integrated functions can be consumed by charts.
    """

    def __init__(self, problem: OdeProblem, solution):
        self.problem = problem
        self._solution = solution
        self._jet_cache: dict = {}
        ts = solution.t
        self.t_span = (float(ts[0]), float(ts[-1]))

    def __call__(self, t: float) -> np.ndarray:
        lo, hi = sorted(self.t_span)
        if not lo <= t <= hi:
            raise OdeError(f"t={t:g} outside the integrated span {self.t_span}")
        return np.asarray(self._solution.sol(t), dtype=float)

    def state_jets(self, t: float, order: int = TRAJECTORY_ORDER) -> tuple:
        """Jets of every state component at ``t`` (memoized per trajectory)."""
        key = (float(t), int(order))
        hit = self._jet_cache.get(key)
        if hit is None:
            hit = solution_jet(self.problem.rhs, t, self(t), order)
            self._jet_cache[key] = hit
        return hit

    def jet(self, t: float, order: int = TRAJECTORY_ORDER) -> Jet:
        """Jet of the scalar solution (the first state component) at ``t``."""
        return self.state_jets(t, order)[0]

    def field(self, component: int = 0) -> Callable:
        """One state component as a jet-in, jet-out callable ``f(xj)``.

        The returned callable composes the trajectory's Taylor coefficients
        with an incoming coordinate jet, so integrated functions (and their
        derivative components) can serve as metric-entry building blocks.
        """

        def evaluate(xj):
            if not isinstance(xj, Jet):
                return float(self(float(xj))[component])
            fj = self.state_jets(xj.value, max(xj.order, 1))[component]
            series = [fj.coeffs[k] for k in range(xj.order + 1)]
            return jets.compose_series(series, xj)

        return evaluate


def integrate(problem: OdeProblem) -> Trajectory:
    """Integrate with an adaptive embedded 4th/5th-order Runge–Kutta pair.

    Dense output is retained so the trajectory is queryable at arbitrary
    points of the (guard-clipped) span.
    """
    t0, t1 = problem.guarded_span()

    def rhs(t, y):
        return [float(v) for v in problem.rhs(t, list(y))]

    result = solve_ivp(
        rhs, (t0, t1), list(problem.y0), method="RK45",
        dense_output=True, rtol=problem.tol, atol=problem.tol,
    )
    if not result.success:
        raise OdeError(f"integration failed: {result.message}")
    return Trajectory(problem, result)


def solution_jet(rhs: Callable, t: float, state: Sequence[float], order: int) -> tuple:
    """Taylor recurrence: jets of an ODE solution from its state at ``t``.

    Each pass through the right-hand side (in jet arithmetic) fixes one more
    Taylor coefficient of every state component, by matching the coefficients
    of ``y'`` against the jet of ``rhs(t, y)``.
    """
    tj = jets.jet_variable(0, float(t), order, 1)
    comps = [jets.jet_constant(float(s), order, 1) for s in state]
    for _ in range(order):
        derivs = rhs(tj, comps)
        new = []
        for comp, dj in zip(comps, derivs):
            coeffs = comp.coeffs.copy()
            if isinstance(dj, Jet):
                dvals = dj.coeffs
            else:
                dvals = np.zeros(order)
                dvals[0] = float(dj)
            for k in range(1, order + 1):
                coeffs[k] = dvals[k - 1] / k
            new.append(Jet(coeffs, order, 1))
        comps = new
    return tuple(comps)


# ----------------------------------------------------------------------
# Named reduction ODE residuals
# ----------------------------------------------------------------------


def _need(params: Mapping, *names: str) -> list:
    try:
        return [float(params[n]) for n in names]
    except (KeyError, TypeError) as exc:
        raise OdeError(f"missing ODE parameter: {exc}") from exc


def _derivs(fn: Jet, n: int, ode_id: str) -> list:
    """Values ``[f, f', ..., f^(n)]`` extracted from a 1-variable jet."""
    if fn.nvars != 1:
        raise OdeError(f"({ode_id}) needs a 1-variable jet, got {fn.nvars}")
    if fn.order < n:
        raise OdeError(
            f"({ode_id}) needs derivatives to order {n}; the jet carries {fn.order}")
    out = [fn.value]
    d = fn
    for _ in range(n):
        d = d.derivative(0)
        out.append(d.value)
    return out


def _rssol(fn, params, point):
    c2, mu, lam = _need(params, "c2", "mu", "lam")
    a0, a1, a2 = _derivs(fn, 2, "rssol")
    return c2 * a2 + mu * a1 - 2.0 * lam


def _rssollor(fn, params, point):
    c2, mu, lam = _need(params, "c2", "mu", "lam")
    a0, a1, a2 = _derivs(fn, 2, "rssollor")
    return c2 * a2 + mu * a1 + 2.0 * lam


def _trz(fn, params, point):
    a, lam = _need(params, "a", "lam")
    f0, f1, f2, f3 = _derivs(fn, 3, "trz")
    e2f = math.exp(2.0 * f0)
    return (f3 * f1 - f2 ** 2 + (a * e2f - 2.0 * f1 ** 2 - e2f * lam) * f2
            - a * e2f * f1 ** 2)


def _czw(fn, params, point):
    (lam,) = _need(params, "lam")
    f0, f1, f2, f3, f4 = _derivs(fn, 4, "czw")
    e2f = math.exp(2.0 * f0)
    return (f4 * (f2 - f1 ** 2) - 4.0 * f1 ** 4 * f2 - 2.0 * e2f * lam * f2 ** 2
            + 2.0 * f1 ** 2 * f2 ** 2 - 4.0 * f2 ** 3
            + (e2f * lam * f1 + 4.0 * f1 ** 3 + f1 * f2) * f3 - f3 ** 2)


def _psy(fn, params, point):
    f0, f1, f2, f3, f4 = _derivs(fn, 4, "psy")
    return (f1 * f2 * f4 - 2.0 * f1 * f3 ** 2
            + (2.0 * f1 ** 2 * f2 + f2 ** 2) * f3 - 4.0 * f1 * f2 ** 3)


def _czw1(fn, params, point):
    # (f''/f'^2)' evaluated literally in jet arithmetic.
    if fn.order < 3:
        raise OdeError(f"(czw1) needs derivatives to order 3; the jet carries {fn.order}")
    d1 = fn.derivative(0)
    d2 = d1.derivative(0)
    if d1.value == 0.0:
        raise OdeError("(czw1) is undefined where f' = 0")
    ratio = d2 / (d1.truncated(d2.order) ** 2)
    return ratio.derivative(0).value


def _legr(fn, params, point):
    c2, lam, alpha = _need(params, "c2", "lam", "alpha")
    a0, a1, a2 = _derivs(fn, 2, "legr")
    z = float(point)
    w = 1.0 + z * z
    return c2 * w ** 2 * a2 + z * w * a1 + 2.0 * a0 - 2.0 * lam * alpha ** 2 * w ** 2


def _legqe(fn, params, point):
    (c2,) = _need(params, "c2")
    if c2 == 0.0:
        raise OdeError("(legqe) is undefined at c2 = 0")
    b0, b1, b2 = _derivs(fn, 2, "legqe")
    z = float(point)
    w = 1.0 + z * z
    h = 0.5 / c2
    return w * b2 + 2.0 * z * b1 - ((h - 1.0) * h - (h + 1.0) ** 2 / w) * b0


def _legqelo(fn, params, point):
    (c2,) = _need(params, "c2")
    if c2 == 0.0:
        raise OdeError("(legqelo) is undefined at c2 = 0")
    z = float(point)
    if abs(abs(z) - 1.0) < SINGULAR_GUARD:
        raise OdeError(f"(legqelo) is singular at z = +/-1; got z = {z:g}")
    b0, b1, b2 = _derivs(fn, 2, "legqelo")
    ell = 0.5 / c2 - 1.0
    w = 1.0 - z * z
    return w * b2 - 2.0 * z * b1 + (ell * (ell + 1.0) - (ell + 2.0) ** 2 / w) * b0


def _c11ode(fn, params, point):
    c2, lam = _need(params, "c2", "lam")
    z = float(point)
    if abs(z) < SINGULAR_GUARD:
        raise OdeError(f"(c11ode) is singular at z = 0; got z = {z:g}")
    a0, a1, a2 = _derivs(fn, 2, "c11ode")
    return c2 * z * a2 + a1 - 2.0 * lam * z


def _lorode(fn, params, point):
    c2, lam = _need(params, "c2", "lam")
    z = float(point)
    if abs(z) < SINGULAR_GUARD:
        raise OdeError(f"(lorode) is singular at z = 0; got z = {z:g}")
    a0, a1, a2 = _derivs(fn, 2, "lorode")
    return c2 * z * a2 + a1 + 2.0 * lam * z


def _by(fn, params, point):
    c2, a, s = _need(params, "c2", "a", "s")
    if s == 0.0:
        raise OdeError("(By) needs s != 0")
    if c2 == -0.5:
        raise OdeError("(By) degenerates at c2 = -1/2; use ode 'by_log'")
    b0, b1 = _derivs(fn, 1, "By")
    return b1 - (b0 ** (1.0 + 2.0 * c2) - 2.0 * a * s) / (s * (1.0 + 2.0 * c2))


def _by_log(fn, params, point):
    a, s = _need(params, "a", "s")
    b0, b1 = _derivs(fn, 1, "by_log")
    if b0 <= 0.0:
        raise OdeError("(by_log) needs B > 0 for the logarithm")
    return b1 - (2.0 * a * math.log(b0) - s)


_ODE_TABLE = {
    "rssol": _rssol,
    "rssollor": _rssollor,
    "trz": _trz,
    "czw": _czw,
    "psy": _psy,
    "czw1": _czw1,
    "legr": _legr,
    "legqe": _legqe,
    "legqelo": _legqelo,
    "c11ode": _c11ode,
    "lorode": _lorode,
    "By": _by,
    "by_log": _by_log,
}

#: Registered reduction-ODE identifiers.
ODE_IDS = tuple(sorted(_ODE_TABLE))


def ode_residual(family_ode: str, fn_values: Jet, params: Mapping | None = None,
                 point: float = 0.0) -> float:
    """Plug a jet of the candidate function into the named reduction ODE.

    ``fn_values`` is a 1-variable jet of the scalar unknown at ``point``
    carrying enough derivative orders (4 for the fourth-order equations,
    down to 1 for the first integrals).  Returns the scalar residual.
    """
    try:
        op = _ODE_TABLE[family_ode]
    except KeyError:
        known = ", ".join(ODE_IDS)
        raise OdeError(f"unknown ODE identifier {family_ode!r}; known: {known}") from None
    return float(op(fn_values, params or {}, point))


# ----------------------------------------------------------------------
# Almost-Legendre machinery
# ----------------------------------------------------------------------


def _legqe_rhs(c2: float):
    h = 0.5 / c2

    def rhs(z, y):
        b, db = y
        w = 1.0 + z * z
        return [db, (((h - 1.0) * h - (h + 1.0) ** 2 / w) * b - 2.0 * z * db) / w]

    return rhs


def _legqelo_rhs(c2: float):
    ell = 0.5 / c2 - 1.0

    def rhs(z, y):
        b, db = y
        w = 1.0 - z * z
        return [db, (2.0 * z * db - (ell * (ell + 1.0) - (ell + 2.0) ** 2 / w) * b) / w]

    return rhs


@lru_cache(maxsize=64)
def _legendre_trajectory(c2: float, beta: float, gamma: float, variant: str,
                         zmax: float) -> tuple:
    """Dense solutions of the B-equation on [-zmax, 0] and [0, zmax]."""
    rhs = _legqe_rhs(c2) if variant == "riem" else _legqelo_rhs(c2)
    # At c2 = 1/2 the displayed closed-form pair (beta, gamma) has initial
    # data (B(0), B'(0)) = (gamma, 2 beta) in both variants.
    y0 = (gamma, 2.0 * beta) if c2 == 0.5 else (beta, gamma)
    sing = () if variant == "riem" else (-1.0, 1.0)
    out = []
    for direction in (-1.0, 1.0):
        prob = OdeProblem(rhs=rhs, y0=y0, span=(0.0, direction * zmax),
                          tol=1e-12, singular_points=sing)
        out.append(integrate(prob))
    return tuple(out)


def _closed_B_riem(c2: float, zj: Jet, beta: float, gamma: float) -> Jet:
    w = 1.0 + zj * zj
    if c2 == 0.5:
        return (2.0 * beta * zj + gamma * (1.0 - zj * zj)) / w
    # c2 == -1: the elementary associated-Legendre pair.
    return beta * jets.jet_pow(w, 0.25) + gamma * zj * jets.jet_pow(w, -0.25)


def _closed_B_lor(c2: float, zj: Jet, beta: float, gamma: float) -> Jet:
    w = 1.0 - zj * zj
    if c2 == 0.5:
        return (2.0 * beta * zj + gamma * (1.0 + zj * zj)) / w
    return beta * jets.jet_pow(w, 0.25) + gamma * zj * jets.jet_pow(w, -0.25)


def legendre_B(c2: float, z, beta: float, gamma: float, *,
               variant: str = "riem", method: str = "auto",
               order: int = TRAJECTORY_ORDER) -> Jet:
    """The function ``B`` of the almost-Legendre equation, as a jet at ``z``.

    For ``c2 = 1/2`` and ``c2 = -1`` the elementary closed forms are
    dispatched, with ``(beta, gamma)`` the displayed solution-pair
    coefficients; otherwise the equation is integrated numerically from
    ``z = 0`` with ``(B(0), B'(0)) = (beta, gamma)`` parametrising the
    solution plane.  ``method="numeric"`` forces the integration path (the
    closed-form parameter conventions are preserved).  ``variant`` selects
    the ``1+z^2`` (Riemannian ansatz) or ``1-z^2`` (Lorentzian ansatz,
    singular at ``z = +/-1``) equation.  ``z`` may be a float or a
    coordinate jet; the result is a jet either way.
    """
    c2 = float(c2)
    if c2 == 0.0:
        raise OdeError(
            "c2 = 0 has no B-form: the reduction is first-order there and its "
            "solutions are catalogued in closed form")
    if variant not in ("riem", "lor"):
        raise OdeError(f"variant must be 'riem' or 'lor', got {variant!r}")
    if isinstance(z, Jet):
        zj = z
    else:
        zj = jets.jet_variable(0, float(z), order, 1)
    z0 = zj.value
    if variant == "lor" and abs(z0) >= 1.0 - SINGULAR_GUARD:
        raise OdeError(f"(legqelo) is singular at z = +/-1; got z = {z0:g}")
    closed = c2 in (0.5, -1.0)
    if closed and method == "auto":
        form = _closed_B_riem if variant == "riem" else _closed_B_lor
        return form(c2, zj, beta, gamma)
    if method not in ("auto", "numeric"):
        raise OdeError(f"method must be 'auto' or 'numeric', got {method!r}")
    if variant == "riem":
        zmax = max(4.0, abs(z0) + 1.0)
    else:
        zmax = 1.0 - SINGULAR_GUARD
    neg, pos = _legendre_trajectory(c2, float(beta), float(gamma), variant, zmax)
    traj = pos if z0 >= 0.0 else neg
    bj = traj.jet(z0, max(zj.order, 1))
    series = [bj.coeffs[k] for k in range(zj.order + 1)]
    return jets.compose_series(series, zj)
