"""Pointwise differential geometry of a coordinate-chart metric.

All curvature data is produced by truncated-Taylor (jet) arithmetic: the
metric components are evaluated as :class:`~groliton.jets.Jet` values at a
point, and every derived quantity (Christoffel symbols, Riemann/Ricci
tensors, scalar and Gauss curvature, covariant derivatives, Laplacians, the
volume form, and the 2D invariant pack) is an exact derivative of the
truncated Taylor polynomial — no finite differencing is involved.

Conventions
-----------
- ``R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb} + Gamma^a_{ce}Gamma^e_{db}
  - Gamma^a_{de}Gamma^e_{cb}`` and ``Ric_{bd} = R^a_{bad}`` (the unit sphere
  has ``Ric = +g``).
- In 2D the Gauss curvature is ``K = R/2`` and ``Ric = K g``.
- The volume form is oriented by coordinate order: ``eps_{12} =
  +sqrt(|det g|)`` (2D) and ``eps_{123} = +sqrt(|det g|)`` (3D); indices are
  raised with the inverse metric, giving ``eps^{ab} eps_{ac} = e delta^b_c``
  with the signature sign ``e = sign(det g)``.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from functools import cached_property
from itertools import permutations
from typing import Callable, Sequence, Union

import numpy as np

from . import exprs, jets
from .jets import Jet

__all__ = [
    "GeometryError",
    "SingularPointError",
    "MetricChart",
    "ChartFrame",
    "RicciData",
    "EpsilonData",
    "InvariantPack2D",
    "evaluate_field",
    "evaluate_covector",
    "christoffels",
    "gauss_K",
    "ricci",
    "epsilon",
    "invariant_pack_2d",
]

#: Absolute tolerance below which det g counts as zero (singular point).
DET_TOL = 1e-12

#: Relative condition threshold: 1/cond(g) below this counts as singular.
COND_TOL = 1e-10


class GeometryError(ValueError):
    """Invalid geometric input (bad chart data, wrong dimension, ...)."""


class SingularPointError(GeometryError):
    """The metric is singular (or numerically non-invertible) at the point."""


#: Anything accepted as a scalar field on a chart: a number (constant
#: field), an expression source string, a parsed :mod:`groliton.exprs` node,
#: an already-evaluated :class:`Jet`, or a callable receiving the coordinate
#: jets and returning a Jet or number.
FieldSpec = Union[numbers.Real, str, exprs.Expr, Jet, Callable[..., object]]


def evaluate_field(spec: FieldSpec, coord_jets: Sequence[Jet], coords: Sequence[str]) -> Jet:
    """Evaluate a scalar-field specification at a point as a jet.

    Parameters
    ----------
    spec : FieldSpec
        The field.  Strings are parsed with :func:`groliton.exprs.parse`;
        callables are invoked as ``spec(*coord_jets)``.
    coord_jets : sequence of Jet
        Coordinate jets seeded at the evaluation point.
    coords : sequence of str
        Coordinate names, matching ``coord_jets`` positionally.
    """
    if isinstance(spec, Jet):
        return spec
    if isinstance(spec, numbers.Real):
        template = coord_jets[0]
        return jets.jet_constant(float(spec), template.order, template.nvars)
    if isinstance(spec, str):
        spec = exprs.parse(spec)
    if isinstance(spec, exprs.Expr):
        bindings = dict(zip(coords, coord_jets))
        value = exprs.evaluate(spec, bindings)
        if isinstance(value, Jet):
            return value
        template = coord_jets[0]
        return jets.jet_constant(float(value), template.order, template.nvars)
    if callable(spec):
        value = spec(*coord_jets)
        if isinstance(value, Jet):
            return value
        if isinstance(value, numbers.Real):
            template = coord_jets[0]
            return jets.jet_constant(float(value), template.order, template.nvars)
        raise GeometryError(
            f"field callable returned {type(value).__name__}, expected Jet or number"
        )
    raise GeometryError(f"cannot evaluate field of type {type(spec).__name__}")


class MetricChart:
    """A (pseudo-)Riemannian metric given by components on a coordinate chart.

    Parameters
    ----------
    components : dim x dim nested sequence of FieldSpec
        Symmetric matrix of metric components in coordinate order.  Entries
        may be numbers, expression strings, parsed expressions, or callables
        of the coordinate jets.
    coords : sequence of str
        Coordinate names (2 or 3 of them); these fix both the variable names
        available to expression components and the orientation of the volume
        form.
    e : int, optional
        Declared signature sign (+1 Riemannian, -1 Lorentzian).  When given
        it is validated against ``sign(det g)`` at every evaluated point;
        when omitted the sign is inferred pointwise.

    Notes
    -----
    Instances are immutable after construction and safe to share across
    threads; all evaluation happens in per-point :class:`ChartFrame` objects.
    """

    __slots__ = ("components", "coords", "dim", "e")

    def __init__(
        self,
        components: Sequence[Sequence[FieldSpec]],
        coords: Sequence[str],
        e: int | None = None,
    ) -> None:
        coords = tuple(coords)
        if len(coords) not in (2, 3):
            raise GeometryError(f"charts must have 2 or 3 coordinates, got {len(coords)}")
        if len(set(coords)) != len(coords):
            raise GeometryError(f"duplicate coordinate names in {coords!r}")
        for name in coords:
            if name not in exprs.VARIABLES:
                raise GeometryError(
                    f"unknown coordinate {name!r}; choose from {exprs.VARIABLES}"
                )
        dim = len(coords)
        rows = tuple(tuple(row) for row in components)
        if len(rows) != dim or any(len(row) != dim for row in rows):
            raise GeometryError(f"metric components must form a {dim}x{dim} matrix")
        parsed = [
            [exprs.parse(entry) if isinstance(entry, str) else entry for entry in row]
            for row in rows
        ]
        for a in range(dim):
            for b in range(a + 1, dim):
                lo, hi = parsed[a][b], parsed[b][a]
                if isinstance(lo, (exprs.Expr, numbers.Real)) and isinstance(
                    hi, (exprs.Expr, numbers.Real)
                ):
                    if lo != hi:
                        raise GeometryError(
                            f"metric components are not symmetric at ({a},{b})"
                        )
        if e is not None and e not in (1, -1):
            raise GeometryError(f"signature sign must be +1 or -1, got {e!r}")
        object.__setattr__(self, "components", tuple(tuple(row) for row in parsed))
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "e", e)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("MetricChart is immutable")

    def __repr__(self) -> str:
        return f"MetricChart(dim={self.dim}, coords={self.coords!r}, e={self.e!r})"

    def frame(self, point: Sequence[float], order: int | None = None) -> "ChartFrame":
        """Return the evaluation frame of this chart at ``point``."""
        return ChartFrame(self, point, order)


def evaluate_covector(X, frame: "ChartFrame") -> tuple[Jet, ...]:
    """Evaluate a covector-field specification at a frame's point.

    ``X`` may be a sequence of per-component :data:`FieldSpec` entries or a
    callable receiving the coordinate jets and returning such a sequence.
    """
    if callable(X) and not isinstance(X, Jet):
        X = X(*frame.coord_jets)
    entries = tuple(X)
    if len(entries) != frame.dim:
        raise GeometryError(
            f"covector has {len(entries)} components, chart has {frame.dim}"
        )
    return tuple(
        evaluate_field(entry, frame.coord_jets, frame.chart.coords) for entry in entries
    )


@dataclass(frozen=True)
class RicciData:
    """Ricci curvature bundle at a point (all entries are jets)."""

    ric: tuple  #: Ric_{ab}
    R: Jet  #: scalar curvature
    gradR: tuple  #: covector d_a R
    lapR: Jet  #: Delta R
    gradRic: tuple  #: nabla_a Ric_{bc}, indexed [a][b][c]


@dataclass(frozen=True)
class EpsilonData:
    """Volume form at a point with both index positions and the sign e."""

    lower: tuple  #: eps_{ab} (2D) or eps_{abc} (3D)
    upper: tuple  #: indices raised with the inverse metric
    e: int  #: signature sign, sign(det g)


@dataclass(frozen=True)
class InvariantPack2D:
    """The 2D curvature invariants behind the candidate-field branch tests.

    All scalars are jets (so callers can take further derivatives) and all
    covectors are tuples of jets.  ``I1`` coincides with ``rho``; ``I2`` is
    ``eps^{ab} d_a K d_b (Delta K)``.
    """

    K: Jet
    gradK: tuple
    hessK: tuple
    lapK: Jet
    gradLapK: tuple
    M: Jet
    gradM: tuple
    N: tuple
    rho: Jet
    nu: Jet
    I1: Jet
    I2: Jet


class ChartFrame:
    """All pointwise geometric data of a chart at a single point.

    Every attribute is computed lazily from the metric jets and cached, so a
    frame can be shared by several residual/candidate evaluations at the
    same point without recomputation.

    Parameters
    ----------
    chart : MetricChart
    point : sequence of float
        Chart coordinates of the evaluation point.
    order : int, optional
        Jet truncation order for the metric components (defaults to
        :data:`groliton.jets.DEFAULT_ORDER`).  Each derivative consumes one
        order, so downstream quantities carry ``order - depth`` usable
        orders.
    """

    def __init__(self, chart: MetricChart, point: Sequence[float], order: int | None = None):
        if order is None:
            order = jets.DEFAULT_ORDER
        point = tuple(float(c) for c in point)
        if len(point) != chart.dim:
            raise GeometryError(
                f"point has {len(point)} coordinates, chart has {chart.dim}"
            )
        self.chart = chart
        self.point = point
        self.order = int(order)
        self.dim = chart.dim

    # ------------------------------------------------------------------
    # metric-level data
    # ------------------------------------------------------------------

    @cached_property
    def coord_jets(self) -> tuple[Jet, ...]:
        return jets.seed_point(self.point, self.order)

    @cached_property
    def g(self) -> tuple[tuple[Jet, ...], ...]:
        n = self.dim
        comps = self.chart.components
        out: list[list[Jet]] = [[None] * n for _ in range(n)]
        for a in range(n):
            for b in range(a, n):
                value = evaluate_field(comps[a][b], self.coord_jets, self.chart.coords)
                out[a][b] = value
                out[b][a] = value
        return tuple(tuple(row) for row in out)

    @cached_property
    def det(self) -> Jet:
        g = self.g
        if self.dim == 2:
            d = g[0][0] * g[1][1] - g[0][1] * g[0][1]
        else:
            d = (
                g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
                - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
                + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
            )
        self._check_regular(d)
        return d

    def _check_regular(self, det: Jet) -> None:
        if not math.isfinite(det.value) or abs(det.value) < DET_TOL:
            raise SingularPointError(
                f"metric is singular at {self.point}: det g = {det.value:.3e}"
            )
        gval = np.array([[self.g[a][b].value for b in range(self.dim)] for a in range(self.dim)])
        cond = np.linalg.cond(gval)
        if not np.isfinite(cond) or 1.0 / cond < COND_TOL:
            raise SingularPointError(
                f"metric is numerically non-invertible at {self.point}: cond = {cond:.3e}"
            )

    @cached_property
    def e(self) -> int:
        sign = 1 if self.det.value > 0.0 else -1
        declared = self.chart.e
        if declared is not None and declared != sign:
            raise GeometryError(
                f"declared signature sign {declared} contradicts det g sign {sign} "
                f"at {self.point}"
            )
        return sign

    @cached_property
    def ginv(self) -> tuple[tuple[Jet, ...], ...]:
        g, d = self.g, self.det
        if self.dim == 2:
            return (
                (g[1][1] / d, -g[0][1] / d),
                (-g[0][1] / d, g[0][0] / d),
            )
        n = 3
        inv: list[list[Jet]] = [[None] * n for _ in range(n)]
        for a in range(n):
            for b in range(n):
                r = [(a + 1) % 3, (a + 2) % 3]
                c = [(b + 1) % 3, (b + 2) % 3]
                minor = g[r[0]][c[0]] * g[r[1]][c[1]] - g[r[0]][c[1]] * g[r[1]][c[0]]
                inv[b][a] = minor / d
        return tuple(tuple(row) for row in inv)

    @cached_property
    def sqrt_abs_det(self) -> Jet:
        d = self.det
        return jets.sqrt(d if d.value > 0.0 else -d)

    @cached_property
    def epsilon(self) -> EpsilonData:
        n = self.dim
        vol = self.sqrt_abs_det
        zero = vol * 0.0
        if n == 2:
            lower = ((zero, vol), (-vol, zero))
            upper_rows: list[list[Jet]] = [[zero] * 2 for _ in range(2)]
            for a in range(2):
                for b in range(2):
                    acc = zero
                    for c in range(2):
                        for d in range(2):
                            if lower[c][d] is zero:
                                continue
                            acc = acc + self.ginv[a][c] * self.ginv[b][d] * lower[c][d]
                    upper_rows[a][b] = acc
            return EpsilonData(lower=lower, upper=tuple(tuple(r) for r in upper_rows), e=self.e)
        lower3 = [[[zero] * 3 for _ in range(3)] for _ in range(3)]
        inv_vol = (jets.jet_constant(float(self.e), vol.order, vol.nvars) / vol)
        upper3 = [[[zero] * 3 for _ in range(3)] for _ in range(3)]
        for perm in permutations(range(3)):
            sign = _perm_sign(perm)
            lower3[perm[0]][perm[1]][perm[2]] = vol * float(sign)
            upper3[perm[0]][perm[1]][perm[2]] = inv_vol * float(sign)
        freeze = lambda t: tuple(tuple(tuple(row) for row in plane) for plane in t)
        return EpsilonData(lower=freeze(lower3), upper=freeze(upper3), e=self.e)

    # ------------------------------------------------------------------
    # connection and curvature
    # ------------------------------------------------------------------

    @cached_property
    def christoffels(self) -> tuple:
        """Levi-Civita symbols ``Gamma^a_{bc}``, indexed [a][b][c]."""
        n = self.dim
        dg = [
            [[self.g[b][c].derivative(a) for c in range(n)] for b in range(n)]
            for a in range(n)
        ]
        gamma: list[list[list[Jet]]] = [[[None] * n for _ in range(n)] for _ in range(n)]
        for a in range(n):
            for b in range(n):
                for c in range(b, n):
                    acc = None
                    for d in range(n):
                        term = self.ginv[a][d] * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c])
                        acc = term if acc is None else acc + term
                    half = acc * 0.5
                    gamma[a][b][c] = half
                    gamma[a][c][b] = half
        return tuple(tuple(tuple(row) for row in plane) for plane in gamma)

    @cached_property
    def riemann(self) -> tuple:
        """Curvature tensor ``R^a_{bcd}``, indexed [a][b][c][d]."""
        n = self.dim
        gam = self.christoffels
        dgam = [
            [[[gam[a][d][b].derivative(c) for b in range(n)] for d in range(n)] for c in range(n)]
            for a in range(n)
        ]
        riem = [[[[None] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for d in range(n):
                        acc = dgam[a][c][d][b] - dgam[a][d][c][b]
                        for e_ in range(n):
                            acc = acc + gam[a][c][e_] * gam[e_][d][b]
                            acc = acc - gam[a][d][e_] * gam[e_][c][b]
                        riem[a][b][c][d] = acc
        return tuple(
            tuple(tuple(tuple(row) for row in plane) for plane in block) for block in riem
        )

    @cached_property
    def ric(self) -> tuple:
        """Ricci tensor ``Ric_{bd} = R^a_{bad}``."""
        n = self.dim
        riem = self.riemann
        out = [[None] * n for _ in range(n)]
        for b in range(n):
            for d in range(n):
                acc = riem[0][b][0][d]
                for a in range(1, n):
                    acc = acc + riem[a][b][a][d]
                out[b][d] = acc
        return tuple(tuple(row) for row in out)

    @cached_property
    def scalar_R(self) -> Jet:
        n = self.dim
        acc = None
        for a in range(n):
            for b in range(n):
                term = self.ginv[a][b] * self.ric[a][b]
                acc = term if acc is None else acc + term
        return acc

    @cached_property
    def K(self) -> Jet:
        """Gauss curvature (2D only), ``K = R/2``."""
        if self.dim != 2:
            raise GeometryError("Gauss curvature is defined on 2D charts only")
        return self.scalar_R * 0.5

    # ------------------------------------------------------------------
    # covariant calculus
    # ------------------------------------------------------------------

    def grad(self, s: Jet) -> tuple[Jet, ...]:
        """Coordinate partials of a scalar jet (= its covariant gradient)."""
        return tuple(s.derivative(a) for a in range(self.dim))

    def raise_index(self, cov: Sequence[Jet]) -> tuple[Jet, ...]:
        n = self.dim
        out = []
        for a in range(n):
            acc = None
            for b in range(n):
                term = self.ginv[a][b] * cov[b]
                acc = term if acc is None else acc + term
            out.append(acc)
        return tuple(out)

    def lower_index(self, vec: Sequence[Jet]) -> tuple[Jet, ...]:
        n = self.dim
        out = []
        for a in range(n):
            acc = None
            for b in range(n):
                term = self.g[a][b] * vec[b]
                acc = term if acc is None else acc + term
            out.append(acc)
        return tuple(out)

    def cov_d_covector(self, X: Sequence[Jet]) -> tuple:
        """``nabla_a X_b``, indexed [a][b]."""
        n = self.dim
        gam = self.christoffels
        out = [[None] * n for _ in range(n)]
        for a in range(n):
            for b in range(n):
                acc = X[b].derivative(a)
                for c in range(n):
                    acc = acc - gam[c][a][b] * X[c]
                out[a][b] = acc
        return tuple(tuple(row) for row in out)

    def cov_d_tensor2(self, T: Sequence[Sequence[Jet]]) -> tuple:
        """``nabla_a T_{bc}``, indexed [a][b][c]."""
        n = self.dim
        gam = self.christoffels
        out = [[[None] * n for _ in range(n)] for _ in range(n)]
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    acc = T[b][c].derivative(a)
                    for d in range(n):
                        acc = acc - gam[d][a][b] * T[d][c]
                        acc = acc - gam[d][a][c] * T[b][d]
                    out[a][b][c] = acc
        return tuple(tuple(tuple(row) for row in plane) for plane in out)

    def cov_d_tensor3(self, T) -> tuple:
        """``nabla_a T_{bcd}``, indexed [a][b][c][d]."""
        n = self.dim
        gam = self.christoffels
        out = [[[[None] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for d in range(n):
                        acc = T[b][c][d].derivative(a)
                        for e_ in range(n):
                            acc = acc - gam[e_][a][b] * T[e_][c][d]
                            acc = acc - gam[e_][a][c] * T[b][e_][d]
                            acc = acc - gam[e_][a][d] * T[b][c][e_]
                        out[a][b][c][d] = acc
        return tuple(
            tuple(tuple(tuple(row) for row in plane) for plane in block) for block in out
        )

    def hessian(self, s: Jet) -> tuple:
        """``nabla_a nabla_b s``, indexed [a][b]."""
        return self.cov_d_covector(self.grad(s))

    def laplacian(self, s: Jet) -> Jet:
        """``Delta s = g^{ab} nabla_a nabla_b s``."""
        n = self.dim
        hess = self.hessian(s)
        acc = None
        for a in range(n):
            for b in range(n):
                term = self.ginv[a][b] * hess[a][b]
                acc = term if acc is None else acc + term
        return acc

    def divergence(self, vec: Sequence[Jet]) -> Jet:
        """``nabla_a V^a`` of a vector (upper-index) field."""
        n = self.dim
        gam = self.christoffels
        acc = None
        for a in range(n):
            term = vec[a].derivative(a)
            for b in range(n):
                term = term + gam[a][a][b] * vec[b]
            acc = term if acc is None else acc + term
        return acc

    # ------------------------------------------------------------------
    # 2D invariant pack
    # ------------------------------------------------------------------

    @cached_property
    def pack(self) -> InvariantPack2D:
        if self.dim != 2:
            raise GeometryError("the invariant pack is defined on 2D charts only")
        K = self.K
        gradK = self.grad(K)
        hessK = self.hessian(K)
        lapK = None
        for a in range(2):
            for b in range(2):
                term = self.ginv[a][b] * hessK[a][b]
                lapK = term if lapK is None else lapK + term
        gradLapK = self.grad(lapK)
        gradK_up = self.raise_index(gradK)
        M = gradK_up[0] * gradK[0] + gradK_up[1] * gradK[1]
        gradM = self.grad(M)
        eps_up = self.epsilon.upper
        N = []
        for c in range(2):
            acc = None
            for a in range(2):
                for b in range(2):
                    term = hessK[a][c] * eps_up[a][b] * gradK[b]
                    acc = term if acc is None else acc + term
            N.append(acc)
        N = tuple(N)
        rho = _eps_pair(eps_up, gradK, gradM)
        nu = _eps_pair(eps_up, gradK, N)
        I2 = _eps_pair(eps_up, gradK, gradLapK)
        return InvariantPack2D(
            K=K,
            gradK=gradK,
            hessK=hessK,
            lapK=lapK,
            gradLapK=gradLapK,
            M=M,
            gradM=gradM,
            N=N,
            rho=rho,
            nu=nu,
            I1=rho,
            I2=I2,
        )


def _perm_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def _eps_pair(eps_up, u: Sequence[Jet], v: Sequence[Jet]) -> Jet:
    """``eps^{ab} u_a v_b`` in 2D."""
    acc = None
    for a in range(2):
        for b in range(2):
            term = eps_up[a][b] * u[a] * v[b]
            acc = term if acc is None else acc + term
    return acc


# ----------------------------------------------------------------------
# module-level operations
# ----------------------------------------------------------------------


def christoffels(g: MetricChart, point: Sequence[float], order: int | None = None) -> tuple:
    """Christoffel symbols ``Gamma^a_{bc}`` of ``g`` at ``point`` as jets."""
    return ChartFrame(g, point, order).christoffels


def gauss_K(g: MetricChart, point: Sequence[float], order: int | None = None) -> Jet:
    """Gauss curvature jet of a 2D chart at ``point``."""
    return ChartFrame(g, point, order).K


def ricci(g: MetricChart, point: Sequence[float], order: int | None = None) -> RicciData:
    """Ricci curvature bundle of ``g`` at ``point``.

    Returns the Ricci tensor, scalar curvature, its gradient and Laplacian,
    and the covariant derivative of the Ricci tensor — everything the 3D
    constraint and linear-system builders consume.
    """
    frame = ChartFrame(g, point, order)
    R = frame.scalar_R
    return RicciData(
        ric=frame.ric,
        R=R,
        gradR=frame.grad(R),
        lapR=frame.laplacian(R),
        gradRic=frame.cov_d_tensor2(frame.ric),
    )


def epsilon(g: MetricChart, point: Sequence[float], order: int | None = None) -> EpsilonData:
    """Volume form of ``g`` at ``point`` with both index positions."""
    return ChartFrame(g, point, order).epsilon


def invariant_pack_2d(
    g: MetricChart, point: Sequence[float], order: int | None = None
) -> InvariantPack2D:
    """The 2D invariant pack (K, M, N, rho, nu, I1, I2) of ``g`` at ``point``."""
    return ChartFrame(g, point, order).pack
