"""Residuals of the generalised Ricci soliton equation and its prolongations.

The defining equation for a pair ``(g, X)`` with parameters ``(c1, c2, lam)``
is::

    nabla_(a X_b) + c1 X_a X_b - c2 Ric_ab = lam g_ab.

This module evaluates, pointwise and in jet arithmetic:

- the defining residual (:func:`grs_residual`),
- the Maxwell form ``F_ab = nabla_[a X_b]`` and its 2D scalar dual
  (:func:`maxwell_F`),
- the residual of the 2D prolonged (closed) system (:func:`prolonged_residual_2d`),
- the first differential constraint in 2D (:func:`constraint_2d`) and the
  3D ``c1 = 0`` trace constraint (:func:`constraint_3d`),
- the potential-form (Poisson/Laplace) reformulation checks for non-null
  ``X`` (:func:`potential_check`),

plus a grid runner assembling a :class:`ResidualReport` over a coordinate
box with singular points skipped and recorded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import exprs, jets
from .geometry import (
    ChartFrame,
    GeometryError,
    MetricChart,
    SingularPointError,
    evaluate_covector,
)
from .jets import Jet

__all__ = [
    "SolitonParams",
    "NullVectorError",
    "PotentialCheck",
    "ResidualReport",
    "grs_residual",
    "maxwell_F",
    "prolonged_residual_2d",
    "constraint_2d",
    "constraint_3d",
    "potential_check",
    "grid_report",
]

#: Jet orders sufficient for each residual's *value* (one extra for safety).
GRS_ORDER = 3
MAXWELL_ORDER = 3
PROLONGED_ORDER = 4
CONSTRAINT_2D_ORDER = 5
CONSTRAINT_3D_ORDER = 5
POTENTIAL_ORDER = 3

#: |X_a X^a| below this counts as null for the potential-form checks.
NULL_TOL = 1e-12


class NullVectorError(ValueError):
    """The potential form ``Phi_a = X_a / (X_b X^b)`` needs non-null ``X``."""


@dataclass(frozen=True)
class SolitonParams:
    """The parameter triple ``(c1, c2, lam)`` of the soliton equation.

    Every finite combination is legal.  The classical cases:

    ========================  ==================
    Killing                   ``(0, 0, 0)``
    homothety                 ``(0, 0, lam)``
    Ricci soliton             ``(0, -1, lam)``
    projective Einstein-Weyl  ``(1, -1, 0)``
    near-horizon geometry     ``(1, 1/2, 0)``
    ========================  ==================
    """

    c1: float
    c2: float
    lam: float

    @classmethod
    def killing(cls) -> "SolitonParams":
        return cls(0.0, 0.0, 0.0)

    @classmethod
    def homothety(cls, lam: float) -> "SolitonParams":
        return cls(0.0, 0.0, lam)

    @classmethod
    def ricci_soliton(cls, lam: float) -> "SolitonParams":
        return cls(0.0, -1.0, lam)

    @classmethod
    def pew(cls) -> "SolitonParams":
        return cls(1.0, -1.0, 0.0)

    @classmethod
    def nhg(cls) -> "SolitonParams":
        return cls(1.0, 0.5, 0.0)

    def rescaled(self) -> "SolitonParams":
        """The equivalent ``c1 = 1`` parameters (requires ``c1 != 0``).

        Replacing ``X`` by ``c1 X`` turns a ``(c1, c2, lam)`` solution into a
        ``(1, c1*c2, c1*lam)`` one.
        """
        if self.c1 == 0.0:
            raise ValueError("rescaling to c1 = 1 requires c1 != 0")
        return SolitonParams(1.0, self.c1 * self.c2, self.c1 * self.lam)


def _resolve_frame(
    g: MetricChart | None,
    point: Sequence[float] | None,
    frame: ChartFrame | None,
    order: int,
) -> ChartFrame:
    if frame is not None:
        return frame
    if g is None or point is None:
        raise GeometryError("either a frame or a chart and point must be given")
    return ChartFrame(g, point, order)


def _mixed_eps(frame: ChartFrame):
    """``eps^b{}_a = g^{bc} eps_{ca}`` (2D), indexed [b][a]."""
    eps = frame.epsilon.lower
    out = [[None] * 2 for _ in range(2)]
    for b in range(2):
        for a in range(2):
            acc = None
            for c in range(2):
                term = frame.ginv[b][c] * eps[c][a]
                acc = term if acc is None else acc + term
            out[b][a] = acc
    return out


def _scalar_F(frame: ChartFrame, Xj: Sequence[Jet]) -> Jet:
    """``F = eps^{ab} F_ab`` with ``F_ab = (d_a X_b - d_b X_a)/2`` (2D)."""
    eps_up = frame.epsilon.upper
    dX01 = Xj[1].derivative(0)
    dX10 = Xj[0].derivative(1)
    F01 = (dX01 - dX10) * 0.5
    return (eps_up[0][1] - eps_up[1][0]) * F01


def grs_residual(
    g: MetricChart,
    X,
    params: SolitonParams,
    point: Sequence[float] | None = None,
    *,
    frame: ChartFrame | None = None,
    order: int = GRS_ORDER,
) -> np.ndarray:
    """Residual tensor ``nabla_(a X_b) + c1 X_a X_b - c2 Ric_ab - lam g_ab``.

    Returns the symmetric ``dim x dim`` array of component values at the
    point; an exact zero characterizes a solution there.
    """
    frame = _resolve_frame(g, point, frame, order)
    Xj = evaluate_covector(X, frame)
    dX = frame.cov_d_covector(Xj)
    n = frame.dim
    out = np.empty((n, n))
    for a in range(n):
        for b in range(n):
            sym = (dX[a][b] + dX[b][a]) * 0.5
            res = (
                sym
                + Xj[a] * Xj[b] * params.c1
                - frame.ric[a][b] * params.c2
                - frame.g[a][b] * params.lam
            )
            out[a, b] = res.value
    return out


def maxwell_F(
    g: MetricChart,
    X,
    point: Sequence[float] | None = None,
    *,
    frame: ChartFrame | None = None,
    order: int = MAXWELL_ORDER,
):
    """The Maxwell form of ``X``: the scalar dual ``eps^{ab} F_ab`` in 2D,
    or the antisymmetric matrix ``F_ab = (d_a X_b - d_b X_a)/2`` in 3D."""
    frame = _resolve_frame(g, point, frame, order)
    Xj = evaluate_covector(X, frame)
    if frame.dim == 2:
        return _scalar_F(frame, Xj).value
    n = frame.dim
    out = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            val = 0.5 * (Xj[b].derivative(a).value - Xj[a].derivative(b).value)
            out[a, b] = val
            out[b, a] = -val
    return out


def prolonged_residual_2d(
    g: MetricChart,
    X,
    params: SolitonParams,
    point: Sequence[float] | None = None,
    *,
    frame: ChartFrame | None = None,
    order: int = PROLONGED_ORDER,
) -> np.ndarray:
    """Residual covector of the second closed-system equation in 2D::

        nabla_a F + 3 c1 X_a F - 2 eps^b_a (c2 d_b K + ((1+c1 c2)K + lam c1) X_b)

    with ``F`` computed from ``X`` by differentiation.  Vanishes identically
    on a neighborhood of any solution of the defining equation.
    """
    frame = _resolve_frame(g, point, frame, order)
    if frame.dim != 2:
        raise GeometryError("the prolonged system is 2-dimensional")
    Xj = evaluate_covector(X, frame)
    F = _scalar_F(frame, Xj)
    gradF = frame.grad(F)
    K = frame.K
    gradK = frame.grad(K)
    coeff = K * (1.0 + params.c1 * params.c2) + params.lam * params.c1
    L = [gradK[b] * params.c2 + coeff * Xj[b] for b in range(2)]
    eps_mixed = _mixed_eps(frame)
    out = np.empty(2)
    for a in range(2):
        res = gradF[a] + Xj[a] * F * (3.0 * params.c1)
        for b in range(2):
            res = res - eps_mixed[b][a] * L[b] * 2.0
        out[a] = res.value
    return out


def constraint_2d(
    g: MetricChart,
    X,
    params: SolitonParams,
    point: Sequence[float] | None = None,
    *,
    frame: ChartFrame | None = None,
    order: int = CONSTRAINT_2D_ORDER,
) -> float:
    """The first differential constraint of the 2D closed system::

        -3 c1 F^2 + 4 e c1 D X^b X_b + 2 e (1 + 4 c1 c2) X^a d_a K
        + 2 e (c2 Lap K + D (2 c2 K + 2 lam))

    with ``D = (1 + c1 c2) K + lam c1``.  Necessarily zero on solutions.
    """
    frame = _resolve_frame(g, point, frame, order)
    if frame.dim != 2:
        raise GeometryError("the first differential constraint is 2-dimensional")
    c1, c2, lam = params.c1, params.c2, params.lam
    e = float(frame.e)
    Xj = evaluate_covector(X, frame)
    X_up = frame.raise_index(Xj)
    F = _scalar_F(frame, Xj).value
    K = frame.K
    gradK = frame.grad(K)
    lapK = frame.laplacian(K).value
    Kv = K.value
    D = (1.0 + c1 * c2) * Kv + lam * c1
    X2 = sum(X_up[a].value * Xj[a].value for a in range(2))
    XdK = sum(X_up[a].value * gradK[a].value for a in range(2))
    return (
        -3.0 * c1 * F * F
        + 4.0 * e * c1 * D * X2
        + 2.0 * e * (1.0 + 4.0 * c1 * c2) * XdK
        + 2.0 * e * (c2 * lapK + D * (2.0 * c2 * Kv + 2.0 * lam))
    )


def constraint_3d(
    g: MetricChart,
    X,
    params: SolitonParams,
    point: Sequence[float] | None = None,
    *,
    frame: ChartFrame | None = None,
    order: int = CONSTRAINT_3D_ORDER,
) -> float:
    """The 3D ``c1 = 0`` trace constraint::

        X^d d_d R + c2 Lap R + 2 c2 R_bd R^bd + 2 lam R.
    """
    if params.c1 != 0.0:
        raise GeometryError("the 3D trace constraint applies to c1 = 0 only")
    frame = _resolve_frame(g, point, frame, order)
    if frame.dim != 3:
        raise GeometryError("the trace constraint is 3-dimensional")
    c2, lam = params.c2, params.lam
    Xj = evaluate_covector(X, frame)
    X_up = frame.raise_index(Xj)
    R = frame.scalar_R
    gradR = frame.grad(R)
    lapR = frame.laplacian(R).value
    XdR = sum(X_up[a].value * gradR[a].value for a in range(3))
    ric2 = 0.0
    for b in range(3):
        for d in range(3):
            ric_up = sum(
                frame.ginv[b][p].value * frame.ginv[d][q].value * frame.ric[p][q].value
                for p in range(3)
                for q in range(3)
            )
            ric2 += frame.ric[b][d].value * ric_up
    return XdR + c2 * lapR + 2.0 * c2 * ric2 + 2.0 * lam * R.value


@dataclass(frozen=True)
class PotentialCheck:
    """Residuals of the potential-form (Poisson/Laplace) reformulation."""

    div_residual: float  #: nabla_a Phi^a - c1
    curl: float  #: eps^{ab} nabla_a Phi_b
    trace_residual: float  #: nabla_a X^a + c1 X_a X^a - 2 c2 K - 2 lam


def potential_check(
    g: MetricChart,
    X,
    params: SolitonParams,
    point: Sequence[float] | None = None,
    *,
    frame: ChartFrame | None = None,
    order: int = POTENTIAL_ORDER,
) -> PotentialCheck:
    """Check the potential 1-form ``Phi_a = X_a / (X_b X^b)`` equations (2D).

    For ``c1 = 1`` a solution satisfies the Poisson system ``div Phi = 1``,
    ``curl Phi = 0``; for ``c1 = 0`` the Laplace system ``div Phi = 0``,
    ``curl Phi = 0``.  The trace residual is the remaining scalar equation
    ``nabla_a X^a + c1 X_a X^a - 2 c2 K - 2 lam``.

    Raises :class:`NullVectorError` when ``X`` is null at the point.
    """
    frame = _resolve_frame(g, point, frame, order)
    if frame.dim != 2:
        raise GeometryError("the potential-form checks are 2-dimensional")
    Xj = evaluate_covector(X, frame)
    X_up = frame.raise_index(Xj)
    norm2 = X_up[0] * Xj[0] + X_up[1] * Xj[1]
    if abs(norm2.value) < NULL_TOL:
        raise NullVectorError(
            f"X is null at {frame.point} (X_a X^a = {norm2.value:.3e}); "
            "the potential form is undefined"
        )
    phi = tuple(Xj[a] / norm2 for a in range(2))
    phi_up = frame.raise_index(phi)
    div_phi = frame.divergence(phi_up).value
    dphi = frame.cov_d_covector(phi)
    eps_up = frame.epsilon.upper
    curl = sum(
        (eps_up[a][b] * dphi[a][b]).value for a in range(2) for b in range(2)
    )
    div_X = frame.divergence(X_up).value
    trace = (
        div_X + params.c1 * norm2.value - 2.0 * params.c2 * frame.K.value - 2.0 * params.lam
    )
    return PotentialCheck(
        div_residual=div_phi - params.c1,
        curl=curl,
        trace_residual=trace,
    )


# ----------------------------------------------------------------------
# grid reports
# ----------------------------------------------------------------------


@dataclass
class ResidualReport:
    """Max-abs / RMS residual summary of a grid scan.

    ``rows`` holds ``(point, {check: value})`` pairs in row-major grid order;
    ``summary`` maps each check to ``{"max_abs", "rms", "worst_point"}``;
    ``skipped`` lists ``(point, reason)`` pairs for singular points.
    """

    grid: tuple
    box: tuple
    rows: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def max_abs(self) -> float:
        """The largest max-abs residual across all checks (0.0 if empty)."""
        if not self.summary:
            return 0.0
        return max(entry["max_abs"] for entry in self.summary.values())

    def finalize(self) -> "ResidualReport":
        checks: dict[str, list] = {}
        for point, values in self.rows:
            for name, value in values.items():
                checks.setdefault(name, []).append((abs(value), point))
        for name, entries in checks.items():
            worst, worst_point = max(entries, key=lambda item: item[0])
            rms = math.sqrt(sum(v * v for v, _ in entries) / len(entries))
            self.summary[name] = {
                "max_abs": worst,
                "rms": rms,
                "worst_point": worst_point,
            }
        return self

    def to_dict(self) -> dict:
        return {
            "grid": list(self.grid),
            "box": [list(b) for b in self.box],
            "residuals": [
                {"point": list(point), "values": dict(values)} for point, values in self.rows
            ],
            "skipped": [
                {"point": list(point), "reason": reason} for point, reason in self.skipped
            ],
            "summary": {
                name: {
                    "max_abs": entry["max_abs"],
                    "rms": entry["rms"],
                    "worst_point": list(entry["worst_point"]),
                }
                for name, entry in self.summary.items()
            },
        }


def grid_points(box: Sequence[Sequence[float]], grid: Sequence[int]):
    """Row-major uniform grid over a coordinate box."""
    axes = [np.linspace(lo, hi, int(count)) for (lo, hi), count in zip(box, grid)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return [tuple(float(m[idx]) for m in mesh) for idx in np.ndindex(*[len(a) for a in axes])]


#: Exceptions treated as "singular point, skip and record" during scans.
SKIPPABLE = (
    SingularPointError,
    ZeroDivisionError,
    jets.JetDomainError,
    exprs.ExprEvalError,
    OverflowError,
)


def grid_report(
    g: MetricChart,
    X,
    params: SolitonParams,
    box: Sequence[Sequence[float]],
    grid: Sequence[int] = (21, 21),
    checks: Sequence[str] | None = None,
) -> ResidualReport:
    """Evaluate residual checks on a uniform grid and summarize.

    ``checks`` defaults to ``("grs", "prolonged", "constraint")`` in 2D and
    ``("grs", "constraint")`` in 3D (the latter only when ``c1 = 0``).
    Points where the metric degenerates or a family formula leaves its
    domain are skipped and recorded with the reason.
    """
    if checks is None:
        if g.dim == 2:
            checks = ("grs", "prolonged", "constraint")
        else:
            checks = ("grs", "constraint") if params.c1 == 0.0 else ("grs",)
    order = GRS_ORDER
    if "prolonged" in checks:
        order = max(order, PROLONGED_ORDER)
    if "constraint" in checks:
        order = max(order, CONSTRAINT_2D_ORDER if g.dim == 2 else CONSTRAINT_3D_ORDER)
    report = ResidualReport(grid=tuple(grid), box=tuple(tuple(b) for b in box))
    for point in grid_points(box, grid):
        try:
            frame = ChartFrame(g, point, order)
            values: dict[str, float] = {}
            if "grs" in checks:
                res = grs_residual(g, X, params, frame=frame)
                values["grs"] = float(np.max(np.abs(res)))
            if "prolonged" in checks and g.dim == 2:
                res = prolonged_residual_2d(g, X, params, frame=frame)
                values["prolonged"] = float(np.max(np.abs(res)))
            if "constraint" in checks:
                if g.dim == 2:
                    values["constraint"] = abs(constraint_2d(g, X, params, frame=frame))
                else:
                    values["constraint"] = abs(constraint_3d(g, X, params, frame=frame))
        except SKIPPABLE as exc:
            report.skipped.append((point, f"{type(exc).__name__}: {exc}"))
            continue
        report.rows.append((point, values))
    return report.finalize()
