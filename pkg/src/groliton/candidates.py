"""Candidate vector fields and obstruction tensors.

In every parameter regime of the soliton equation that admits a closed-form
necessary condition, the 1-form ``X`` is forced — in terms of differential
invariants of the metric alone — onto a *candidate* whose residual in the
defining equation is the local obstruction:

- 2D gradient candidate ``X_a = -c2 grad_a K / ((1+c1 c2)K + lam c1)`` and its
  closed-form obstruction tensor,
- the Ricci-soliton (``c1=0, c2=-1``) and homothety (``c1=c2=0``) branches:
  the rho-branch expresses ``X`` in the basis ``eps grad K, eps grad M``; the
  nu-branch writes ``X = A + F B`` with the Maxwell scalar ``F`` eliminated
  through the integrability condition of ``nabla F`` (or, when that equation
  degenerates, a scalar obstruction),
- the n-dimensional gradient candidate from the traced prolonged system,
- the 3D ``c1=0`` affine linear system for ``X`` after eliminating ``F_ab``,
- the near-horizon-geometry quartic for ``sigma = X_a X^a`` and the
  resulting candidate.

All candidates evaluate pointwise in jet arithmetic; where meaningful the
result carries the candidate's jets so it can be fed straight back into
:func:`groliton.soliton.grs_residual`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import ChartFrame, GeometryError, MetricChart
from .jets import Jet

__all__ = [
    "CandidateResult",
    "CandidateError",
    "GuardError",
    "BranchError",
    "LinearSystem3D",
    "SigmaQuartic",
    "gradient_candidate_2d",
    "gradient_obstruction_2d",
    "ricci_candidate",
    "homothety_candidate",
    "gradient_candidate_nd",
    "gradient_obstruction_nd",
    "linear_system_3d",
    "nhg_sigma_quartic",
    "nhg_candidate",
]

#: Default jet order: the nu-branch needs six derivatives of the metric for
#: the value of eps^{ab} nabla_a C_b.
CANDIDATE_ORDER = 8
LINSYS_ORDER = 6

#: Relative threshold below which an invariant counts as zero for branching.
BRANCH_TOL = 1e-9
#: Condition-number ceiling for the n-dimensional candidate's linear solve.
COND_MAX = 1e10


class CandidateError(ValueError):
    """Base class for candidate-construction failures."""


class GuardError(CandidateError):
    """A denominator / determinant guard failed at the evaluation point."""


class BranchError(CandidateError):
    """The requested branch does not apply in the point's invariant regime."""


@dataclass(frozen=True)
class CandidateResult:
    """A candidate covector at a point.

    ``X`` holds the component values; ``X_jets`` the corresponding jets when
    the construction is differentiable (for chaining into residual
    evaluations), else ``None``.  ``guards`` records every denominator the
    branch relied on.  ``F`` is the eliminated Maxwell scalar when the branch
    determines one.  ``obstruction`` is the scalar obstruction produced when
    the F-elimination equation degenerates (nu-branch) or, for the
    near-horizon candidate, the defect ``X_a X^a - sigma``.
    """

    X: np.ndarray
    branch: str
    guards: dict = field(default_factory=dict)
    F: float | None = None
    obstruction: float | None = None
    X_jets: tuple | None = None


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


def _values(cov: Sequence[Jet]) -> np.ndarray:
    return np.array([c.value for c in cov])


def _eps_lower_sharp(frame: ChartFrame, cov: Sequence[Jet]) -> list[Jet]:
    """``(eps u^sharp)_c = eps_{cd} u^d`` for a covector ``u``."""
    up = frame.raise_index(cov)
    eps = frame.epsilon.lower
    n = frame.dim
    out = []
    for c in range(n):
        acc = None
        for d in range(n):
            term = eps[c][d] * up[d]
            acc = term if acc is None else acc + term
        out.append(acc)
    return out

def _eps_pair_up(frame: ChartFrame, u: Sequence[Jet], v: Sequence[Jet]) -> Jet:
    """``eps^{ab} u_a v_b`` for covectors ``u, v``."""
    eps = frame.epsilon.upper
    acc = None
    for a in range(frame.dim):
        for b in range(frame.dim):
            term = eps[a][b] * u[a] * v[b]
            acc = term if acc is None else acc + term
    return acc


def _eps_div(frame: ChartFrame, cov: Sequence[Jet]) -> Jet:
    """``eps^{ab} nabla_a u_b`` for a covector ``u``."""
    du = frame.cov_d_covector(cov)
    eps = frame.epsilon.upper
    acc = None
    for a in range(frame.dim):
        for b in range(frame.dim):
            term = eps[a][b] * du[a][b]
            acc = term if acc is None else acc + term
    return acc


def _dot_up(frame: ChartFrame, u: Sequence[Jet], v: Sequence[Jet]) -> Jet:
    """``g^{ab} u_a v_b`` for covectors ``u, v``."""
    up = frame.raise_index(u)
    acc = None
    for a in range(frame.dim):
        term = up[a] * v[a]
        acc = term if acc is None else acc + term
    return acc


# ----------------------------------------------------------------------
# gradient candidates
# ----------------------------------------------------------------------


def gradient_candidate_2d(
    g: MetricChart,
    params,
    point: Sequence[float] | None = None,
    *,
    frame: ChartFrame | None = None,
    order: int = CANDIDATE_ORDER,
    denom_tol: float = 1e-10,
) -> CandidateResult:
    """The forced gradient candidate ``X_a = -c2 grad_a K / D`` in 2D,
    with ``D = (1 + c1 c2) K + lam c1``.

    Raises :class:`GuardError` at the excluded curvature value
    ``K = -lam c1 / (1 + c1 c2)`` where ``D`` vanishes.
    """
    frame = _resolve_frame(g, point, frame, order)
    if frame.dim != 2:
        raise GeometryError("the 2D gradient candidate needs a 2D chart")
    c1, c2, lam = params.c1, params.c2, params.lam
    K = frame.K
    D = K * (1.0 + c1 * c2) + lam * c1
    scale = max(1.0, abs(K.value), abs(lam * c1))
    if abs(D.value) <= denom_tol * scale:
        raise GuardError(
            f"(1 + c1 c2) K + lam c1 = {D.value:.3e} vanishes at {frame.point}; "
            "the gradient candidate is undefined at the excluded curvature value"
        )
    gradK = frame.grad(K)
    Xj = tuple(gradK[a] * (-c2) / D for a in range(2))
    return CandidateResult(
        X=_values(Xj),
        branch="gradient",
        guards={"D": D.value},
        X_jets=Xj,
    )


def gradient_obstruction_2d(
    g: MetricChart,
    params,
    point: Sequence[float] | None = None,
    *,
    frame: ChartFrame | None = None,
    order: int = CANDIDATE_ORDER,
    denom_tol: float = 1e-10,
) -> np.ndarray:
    """Closed-form obstruction tensor of the 2D gradient candidate::

        Theta_ab = -c2 hess_ab K / D + c2 (1 + 2 c1 c2) grad_a K grad_b K / D^2
                   - (c2 K + lam) g_ab

    with ``D = (1 + c1 c2) K + lam c1``; equals the soliton residual of
    :func:`gradient_candidate_2d` (cross-checked in the test suite).
    """
    frame = _resolve_frame(g, point, frame, order)
    if frame.dim != 2:
        raise GeometryError("the 2D gradient obstruction needs a 2D chart")
    c1, c2, lam = params.c1, params.c2, params.lam
    K = frame.K
    D = K * (1.0 + c1 * c2) + lam * c1
    scale = max(1.0, abs(K.value), abs(lam * c1))
    if abs(D.value) <= denom_tol * scale:
        raise GuardError(
            f"(1 + c1 c2) K + lam c1 = {D.value:.3e} vanishes at {frame.point}"
        )
    gradK = frame.grad(K)
    hessK = frame.hessian(K)
    out = np.empty((2, 2))
    for a in range(2):
        for b in range(2):
            theta = (
                hessK[a][b] * (-c2) / D
                + gradK[a] * gradK[b] * (c2 * (1.0 + 2.0 * c1 * c2)) / (D * D)
                - frame.g[a][b] * (c2 * K.value + lam)
            )
            out[a, b] = theta.value
    return out


def gradient_candidate_nd(
    g: MetricChart,
    params,
    point: Sequence[float] | None = None,
    *,
    frame: ChartFrame | None = None,
    order: int = CANDIDATE_ORDER,
    cond_max: float = COND_MAX,
) -> CandidateResult:
    """The n-dimensional gradient candidate from the traced prolonged system.

    Solves ``rho^b_d X^d = -(c2/2) grad^b R`` where::

        rho^a_b = (1 - c1 c2) R^a_b + ((n-1) lam c1 + c1 c2 R) delta^a_b

    and lowers the result.  Raises :class:`GuardError` when ``rho^a_b`` is
    numerically singular (condition number above ``cond_max``).
    """
    frame = _resolve_frame(g, point, frame, order)
    n = frame.dim
    c1, c2, lam = params.c1, params.c2, params.lam
    R = frame.scalar_R
    shift = R * (c1 * c2) + (n - 1) * lam * c1
    rho_mat = [[None] * n for _ in range(n)]
    for b in range(n):
        for d in range(n):
            acc = None
            for p in range(n):
                term = frame.ginv[b][p] * frame.ric[p][d] * (1.0 - c1 * c2)
                acc = term if acc is None else acc + term
            if b == d:
                acc = acc + shift
            rho_mat[b][d] = acc
    rho_vals = np.array([[rho_mat[b][d].value for d in range(n)] for b in range(n)])
    cond = np.linalg.cond(rho_vals)
    if not np.isfinite(cond) or cond > cond_max:
        raise GuardError(
            f"rho^a_b is numerically singular at {frame.point} "
            f"(condition number {cond:.3e})"
        )
    gradR_up = frame.raise_index(frame.grad(R))
    rhs = [gradR_up[b] * (-0.5 * c2) for b in range(n)]
    X_up = _solve_jet_system(rho_mat, rhs)
    Xj = tuple(frame.lower_index(X_up))
    return CandidateResult(
        X=_values(Xj),
        branch="nd_gradient",
        guards={"det_rho": float(np.linalg.det(rho_vals)), "cond_rho": float(cond)},
        X_jets=Xj,
    )


def gradient_obstruction_nd(
    g: MetricChart,
    params,
    point: Sequence[float] | None = None,
    *,
    frame: ChartFrame | None = None,
    order: int = CANDIDATE_ORDER,
    cond_max: float = COND_MAX,
) -> np.ndarray:
    """Soliton residual of the traced n-dimensional gradient candidate.

    The candidate of :func:`gradient_candidate_nd` is solved in jet
    arithmetic, so its covariant derivative is available pointwise::

        Theta_ab = nabla_(a X_b) + c1 X_a X_b - c2 Ric_ab - lam g_ab

    A nonzero ``Theta`` certifies that no solution with the forced candidate
    exists at the point.
    """
    frame = _resolve_frame(g, point, frame, order)
    res = gradient_candidate_nd(g, params, frame=frame, cond_max=cond_max)
    Xj = res.X_jets
    n = frame.dim
    c1, c2, lam = params.c1, params.c2, params.lam
    DX = frame.cov_d_covector(Xj)
    out = np.empty((n, n))
    for a in range(n):
        for b in range(n):
            theta = (
                (DX[a][b] + DX[b][a]) * 0.5
                + Xj[a] * Xj[b] * c1
                - frame.ric[a][b] * c2
                - frame.g[a][b] * lam
            )
            out[a, b] = theta.value
    return out


def _solve_jet_system(mat, rhs):
    """Solve an n x n jet-valued linear system by adjugate / determinant."""
    n = len(rhs)
    if n == 1:
        return [rhs[0] / mat[0][0]]
    if n == 2:
        det = mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
        return [
            (mat[1][1] * rhs[0] - mat[0][1] * rhs[1]) / det,
            (mat[0][0] * rhs[1] - mat[1][0] * rhs[0]) / det,
        ]
    if n == 3:
        det = (
            mat[0][0] * (mat[1][1] * mat[2][2] - mat[1][2] * mat[2][1])
            - mat[0][1] * (mat[1][0] * mat[2][2] - mat[1][2] * mat[2][0])
            + mat[0][2] * (mat[1][0] * mat[2][1] - mat[1][1] * mat[2][0])
        )
        out = []
        for i in range(3):
            cof = []
            for j in range(3):
                r = [k for k in range(3) if k != j]
                c = [k for k in range(3) if k != i]
                minor = mat[r[0]][c[0]] * mat[r[1]][c[1]] - mat[r[0]][c[1]] * mat[r[1]][c[0]]
                sign = -1.0 if (i + j) % 2 else 1.0
                cof.append(minor * sign)
            acc = None
            for j in range(3):
                term = cof[j] * rhs[j]
                acc = term if acc is None else acc + term
            out.append(acc / det)
        return out
    raise GeometryError(f"unsupported dimension {n}")


# ----------------------------------------------------------------------
# Ricci-soliton and homothety branches (2D, c1 = 0)
# ----------------------------------------------------------------------


def ricci_candidate(
    g: MetricChart,
    lam: float,
    point: Sequence[float] | None = None,
    branch: str = "rho",
    *,
    frame: ChartFrame | None = None,
    order: int = CANDIDATE_ORDER,
    branch_tol: float = BRANCH_TOL,
) -> CandidateResult:
    """Forced candidate for a 2D Ricci soliton (``c1=0, c2=-1``).

    Branch ``rho`` (requires ``rho != 0``)::

        X_a = (-2 grad^c K grad_c LapK + 2(3 lam - 5K) M) / rho * eps_ab grad^b K
            + (LapK + 2K^2 - 2K lam) / rho * eps_ab grad^b M

    Branch ``nu`` (requires ``rho = 0`` within tolerance and ``nu != 0``)
    writes ``X = A + F B`` and eliminates ``F`` through the integrability
    condition of ``nabla F = C + F E``; when ``eps^{ab} nabla_a E_b`` vanishes
    the returned result instead carries the scalar obstruction
    ``eps^{ab} nabla_a C_b + eps^{ab} C_a E_b`` with ``X`` evaluated at the
    representative ``F = 0``.
    """
    return _branched_candidate(g, lam, point, branch, "ricci", frame, order, branch_tol)


def homothety_candidate(
    g: MetricChart,
    lam: float,
    point: Sequence[float] | None = None,
    branch: str = "rho",
    *,
    frame: ChartFrame | None = None,
    order: int = CANDIDATE_ORDER,
    branch_tol: float = BRANCH_TOL,
) -> CandidateResult:
    """Forced candidate for a 2D homothety (``c1 = c2 = 0``).

    Branch ``rho``: ``X_a = (6 M lam eps_ab grad^b K - 2 K lam eps_ab grad^b M)/rho``.
    Branch ``nu``: ``X_c = (M F / 2 nu) eps_cd grad^d K - (2 K lam / nu) eps_cd N^d``
    with ``F`` eliminated exactly as in :func:`ricci_candidate`.
    """
    return _branched_candidate(g, lam, point, branch, "homothety", frame, order, branch_tol)


def _branched_candidate(g, lam, point, branch, kind, frame, order, branch_tol):
    frame = _resolve_frame(g, point, frame, order)
    if frame.dim != 2:
        raise GeometryError("the branched candidates need a 2D chart")
    pack = frame.pack
    gradK_norm = math.sqrt(sum(v.value ** 2 for v in pack.gradK))
    gradM_norm = math.sqrt(sum(v.value ** 2 for v in pack.gradM))
    N_norm = math.sqrt(sum(v.value ** 2 for v in pack.N))
    if gradK_norm <= branch_tol * (1.0 + abs(pack.K.value)):
        # Locally constant curvature: rho and nu vanish identically and the
        # relative guards below degenerate to comparing rounding noise.
        if frame.e == 1:
            raise BranchError(
                f"the curvature is locally constant at {frame.point} "
                "(Riemannian): X is locally a gradient; use gradient_candidate_2d"
            )
        raise BranchError(
            f"the curvature is locally constant at {frame.point} "
            "(Lorentzian): the candidate is undetermined by this construction"
        )
    rho_scale = gradK_norm * gradM_norm + 1e-300
    nu_scale = gradK_norm * N_norm + 1e-300
    rho_val, nu_val = pack.rho.value, pack.nu.value
    guards = {"rho": rho_val, "nu": nu_val}
    if branch == "rho":
        if abs(rho_val) <= branch_tol * rho_scale:
            raise BranchError(
                f"rho = {rho_val:.3e} vanishes at {frame.point}; "
                "the rho-branch does not apply (try branch 'nu')"
            )
        epsK = _eps_lower_sharp(frame, pack.gradK)
        epsM = _eps_lower_sharp(frame, pack.gradM)
        K, M = pack.K, pack.M
        if kind == "ricci":
            dKdLap = _dot_up(frame, pack.gradK, pack.gradLapK)
            alpha = (dKdLap * (-2.0) + (K * (-5.0) + 3.0 * lam) * M * 2.0) / pack.rho
            beta = (pack.lapK + K * K * 2.0 - K * (2.0 * lam)) / pack.rho
        else:
            alpha = M * (6.0 * lam) / pack.rho
            beta = K * (-2.0 * lam) / pack.rho
        Xj = tuple(alpha * epsK[c] + beta * epsM[c] for c in range(2))
        return CandidateResult(X=_values(Xj), branch="rho", guards=guards, X_jets=Xj)
    if branch != "nu":
        raise BranchError(f"unknown branch {branch!r}; expected 'rho' or 'nu'")
    if abs(rho_val) > branch_tol * rho_scale:
        raise BranchError(
            f"rho = {rho_val:.3e} is nonzero at {frame.point}; "
            "the nu-branch applies only in the rho = 0 regime (use branch 'rho')"
        )
    if abs(nu_val) <= branch_tol * nu_scale:
        if frame.e == 1:
            raise BranchError(
                f"rho = nu = 0 at {frame.point} (Riemannian): X is locally a "
                "gradient; use gradient_candidate_2d"
            )
        raise BranchError(
            f"rho = nu = 0 at {frame.point} (Lorentzian): the candidate is "
            "undetermined by this construction"
        )
    epsK = _eps_lower_sharp(frame, pack.gradK)
    epsN = _eps_lower_sharp(frame, pack.N)
    K, M, nu = pack.K, pack.M, pack.nu
    if kind == "ricci":
        # eps^{ab} grad_a LapK grad_b K
        w = _eps_pair_up(frame, pack.gradLapK, pack.gradK)
        coeffN = (pack.lapK + K * K * 2.0 - K * (2.0 * lam)) / nu
        A = [epsK[c] * (w * (-1.0) / nu) + epsN[c] * coeffN for c in range(2)]
    else:
        coeffN = K * (-2.0 * lam) / nu
        A = [epsN[c] * coeffN for c in range(2)]
    B = [epsK[c] * (M / (nu * 2.0)) for c in range(2)]
    # nabla_a F = C_a + F E_a from the prolonged system with X = A + F B:
    # C_a = -2 c2 eps_ab grad^b K - 2 K eps_ab A^b  (c2 = -1 or 0), E_a = -2 K eps_ab B^b
    epsA = _eps_lower_sharp(frame, A)
    epsB = _eps_lower_sharp(frame, B)
    if kind == "ricci":
        C = [epsK[a] * 2.0 - K * epsA[a] * 2.0 for a in range(2)]
    else:
        C = [K * epsA[a] * (-2.0) for a in range(2)]
    E = [K * epsB[a] * (-2.0) for a in range(2)]
    eps_dC = _eps_div(frame, C)
    eps_CE = _eps_pair_up(frame, C, E)
    eps_dE = _eps_div(frame, E)
    guards["eps_dE"] = eps_dE.value
    lhs = eps_dC + eps_CE
    if abs(eps_dE.value) <= branch_tol * (1.0 + abs(lhs.value)):
        Xj = tuple(A)
        return CandidateResult(
            X=_values(Xj),
            branch="nu",
            guards=guards,
            F=None,
            obstruction=lhs.value,
            X_jets=Xj,
        )
    F = lhs * (-1.0) / eps_dE
    Xj = tuple(A[c] + F * B[c] for c in range(2))
    return CandidateResult(
        X=_values(Xj), branch="nu", guards=guards, F=F.value, X_jets=Xj
    )


# ----------------------------------------------------------------------
# 3D c1 = 0 linear system
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class LinearSystem3D:
    """The 3D ``c1 = 0`` affine system for ``X^e`` after eliminating ``F_ab``.

    ``matrix`` (6x3) and ``rhs`` (6) are the upper-triangle rows labeled by
    ``rows``; ``trace_row``/``trace_rhs`` append the trace constraint.
    ``solution`` is the least-squares ``X^e`` of the stacked 7x3 system,
    ``solution_cov`` its lowering, ``residual`` the stacked max-abs defect at
    the optimum, and ``consistent`` whether it is below tolerance.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    rows: tuple
    trace_row: np.ndarray
    trace_rhs: float
    solution: np.ndarray
    solution_cov: np.ndarray
    residual: float
    consistent: bool


def linear_system_3d(
    g: MetricChart,
    params,
    point: Sequence[float] | None = None,
    *,
    frame: ChartFrame | None = None,
    order: int = LINSYS_ORDER,
    cond_max: float = 1e12,
    consistency_tol: float = 1e-8,
) -> LinearSystem3D:
    """Build the pointwise linear system every 3D ``c1=0`` soliton satisfies.

    The second prolonged equation determines ``F_ab`` algebraically from
    ``X`` through ``E_(cd)b = P^a_(c eps_d)ab`` and the invertible
    ``Q^b_d = P_ac P^ac d^b_d + P P^b_d - 3/2 P^be P_de - 1/2 P^2 d^b_d``
    built from the Schouten tensor ``P_ab = R_ab - R/4 g_ab``; eliminating
    ``F`` from the once-differentiated Ricci equation leaves::

        X^e (nabla_e R_ac - e (nabla_e R_fk) E_(ca)d Qt^d_b E^(fk)b)
            = S_ac - e E_(ca)d Qt^d_b S_fk E^(fk)b

    whose six independent components (plus the trace constraint) the result
    packages for a consistency verdict.  Raises :class:`GuardError` when
    ``Q`` is numerically singular (constant-curvature degeneration).
    """
    if params.c1 != 0.0:
        raise GeometryError("the 3D linear system applies to c1 = 0 only")
    frame = _resolve_frame(g, point, frame, order)
    if frame.dim != 3:
        raise GeometryError("the linear system needs a 3D chart")
    c2, lam = params.c2, params.lam
    e_sign = float(frame.e)
    n = 3
    ginv_v = np.array([[frame.ginv[a][b].value for b in range(n)] for a in range(n)])
    g_v = np.array([[frame.g[a][b].value for b in range(n)] for a in range(n)])
    ric_v = np.array([[frame.ric[a][b].value for b in range(n)] for a in range(n)])
    R_v = frame.scalar_R.value
    eps_low = np.array(
        [[[frame.epsilon.lower[a][b][c].value for c in range(n)] for b in range(n)]
         for a in range(n)]
    )

    # Schouten tensor and its mixed / raised forms.
    P = ric_v - 0.25 * R_v * g_v
    P_mix = ginv_v @ P  # P^a_c
    P_up = ginv_v @ P @ ginv_v.T  # P^ac
    P_tr = float(np.trace(P_mix))

    # E_(cd)b = P^a_(c eps_d)ab  and its fully raised form.
    E = np.zeros((n, n, n))
    for c in range(n):
        for d in range(n):
            for b in range(n):
                acc = 0.0
                for a in range(n):
                    acc += 0.5 * (P_mix[a, c] * eps_low[d, a, b] + P_mix[a, d] * eps_low[c, a, b])
                E[c, d, b] = acc
    E_up = np.einsum("fc,kd,be,cde->fkb", ginv_v, ginv_v, ginv_v, E)

    # Q^b_d and its inverse.
    PP = float(np.sum(P * P_up))
    Q_mix = (
        PP * np.eye(n)
        + P_tr * P_mix
        - 1.5 * (P_up @ P)
        - 0.5 * P_tr * P_tr * np.eye(n)
    )
    condQ = np.linalg.cond(Q_mix)
    if not np.isfinite(condQ) or condQ > cond_max:
        raise GuardError(
            f"Q^b_d is numerically singular at {frame.point} "
            f"(condition number {condQ:.3e}); the F-elimination degenerates"
        )
    Q_tilde = np.linalg.inv(Q_mix)  # Qt^d_b with Qt @ Q = id

    # First and second covariant derivatives of the Ricci tensor.
    dRic_j = frame.cov_d_tensor2(frame.ric)  # [e][a][c] = nabla_e R_ac
    dRic = np.array(
        [[[dRic_j[e][a][c].value for c in range(n)] for a in range(n)] for e in range(n)]
    )
    U_j = frame.cov_d_tensor3(dRic_j)  # [a][e][b][c] = nabla_a nabla_e R_bc
    U = np.array(
        [[[[U_j[a][e][b][c].value for c in range(n)] for b in range(n)]
          for e in range(n)] for a in range(n)]
    )
    hessR_j = frame.hessian(frame.scalar_R)
    hessR = np.array([[hessR_j[a][c].value for c in range(n)] for a in range(n)])

    # Riemann with the contraction pattern R^b_c^e_a R_be.
    riem_j = frame.riemann
    riem = np.array(
        [[[[riem_j[a][b][c][d].value for d in range(n)] for c in range(n)]
          for b in range(n)] for a in range(n)]
    )
    riem_mixed = np.einsum("ed,bcda->bcea", ginv_v, riem)  # R^b_c^e_a

    ric_mix = ginv_v @ ric_v  # R^e_c

    # S_ac as displayed.
    S = np.zeros((n, n))
    div_hess = np.einsum("bd,adcb->ac", ginv_v, U)  # nabla_a nabla^b R_cb
    lap_ric = np.einsum("de,deca->ca", ginv_v, U)  # Lap R_ca
    cross = np.einsum("bd,dcba->ca", ginv_v, U)  # nabla^b nabla_c R_ba
    for a in range(n):
        for c in range(n):
            t1 = -np.dot(ric_mix[:, c], ric_v[a, :])  # -R_c^e R_ae
            t2 = -np.einsum("be,be->", riem_mixed[:, c, :, a], ric_v)  # -R^b_c^e_a R_be
            S[a, c] = (
                c2 * (t1 + t2)
                - 2.0 * lam * ric_v[c, a]
                + c2 * (div_hess[a, c] - hessR[a, c])
                - c2 * (lap_ric[c, a] - cross[c, a])
            )

    # G[(ca)][(fk)] = E_(ca)d Qt^d_b E^(fk)b
    G = np.einsum("cad,db,fkb->cafk", E, Q_tilde, E_up)

    pairs = tuple((a, c) for a in range(n) for c in range(a, n))
    matrix = np.empty((len(pairs), n))
    rhs = np.empty(len(pairs))
    for i, (a, c) in enumerate(pairs):
        for e in range(n):
            matrix[i, e] = dRic[e, a, c] - e_sign * np.einsum(
                "fk,fk->", dRic[e], G[c, a]
            )
        rhs[i] = S[a, c] - e_sign * np.einsum("fk,fk->", S, G[c, a])

    gradR = np.array([v.value for v in frame.grad(frame.scalar_R)])
    lapR = frame.laplacian(frame.scalar_R).value
    ric2 = float(np.sum(ric_v * (ginv_v @ ric_v @ ginv_v.T)))
    trace_rhs = -c2 * lapR - 2.0 * c2 * ric2 - 2.0 * lam * R_v

    stacked = np.vstack([matrix, gradR])
    stacked_rhs = np.concatenate([rhs, [trace_rhs]])
    solution, *_ = np.linalg.lstsq(stacked, stacked_rhs, rcond=None)
    defect = stacked @ solution - stacked_rhs
    residual = float(np.max(np.abs(defect)))
    return LinearSystem3D(
        matrix=matrix,
        rhs=rhs,
        rows=pairs,
        trace_row=gradR,
        trace_rhs=float(trace_rhs),
        solution=solution,
        solution_cov=g_v @ solution,
        residual=residual,
        consistent=residual <= consistency_tol,
    )


# ----------------------------------------------------------------------
# near-horizon geometry quartic
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class SigmaQuartic:
    """The quartic ``M J^2 sigma - e (AN - MB)^2 - A^2 J^2`` in ``sigma``.

    ``coefficients`` are in descending powers; ``real_roots`` the polished
    real roots; ``guards`` the denominators used.
    """

    coefficients: np.ndarray
    real_roots: tuple
    guards: dict


def _nhg_invariants(frame: ChartFrame, F: float, guard_tol: float):
    pack = frame.pack
    e = float(frame.e)
    K = pack.K.value
    M = pack.M.value
    rho = pack.rho.value
    lapK = pack.lapK.value
    mu = lapK / 6.0 + 0.5 * K * K
    gradmu = [pack.gradLapK[a] * (1.0 / 6.0) + pack.K * pack.gradK[a] for a in range(2)]
    gKmu = _dot_up(frame, pack.gradK, gradmu).value
    N = _dot_up(frame, pack.gradK, pack.gradM).value
    J = rho + 8.0 * K * F * M
    if abs(M) <= guard_tol:
        raise GuardError(f"M = {M:.3e} vanishes at {frame.point}")
    if abs(J) <= guard_tol * (abs(rho) + abs(8.0 * K * F * M) + 1.0):
        raise GuardError(
            f"J = rho + 8KFM = {J:.3e} vanishes at {frame.point} "
            f"(the quartic becomes an identity at F = -rho/(8KM))"
        )
    return e, K, M, rho, mu, gKmu, N, J


def _nhg_AB_polys(e, K, M, F, mu, gKmu):
    """``A(sigma)`` and ``B(sigma)`` as descending-coefficient polynomials."""
    A = np.array([-K, 0.5 * e * F * F - mu])
    sigma_poly = np.array([1.0, 0.0])
    B = np.polyadd(2.0 * np.polymul(A, A), (-6.0 * e * F * F - 2.0 * K * K) * A)
    B = np.polyadd(B, 4.0 * K * np.polymul(A, sigma_poly))
    B = np.polyadd(B, -2.0 * M * sigma_poly)
    B = np.polyadd(B, np.array([-K * M - 2.0 * gKmu]))
    return A, B


def nhg_sigma_quartic(
    g: MetricChart,
    F: float,
    point: Sequence[float] | None = None,
    *,
    frame: ChartFrame | None = None,
    order: int = CANDIDATE_ORDER,
    guard_tol: float = 1e-12,
) -> SigmaQuartic:
    """The quartic every ``sigma = X_a X^a`` of a near-horizon-geometry
    solution (``c1=1, c2=1/2, lam=0``) must satisfy at the point, given the
    Maxwell scalar ``F`` there.

    Expands ``M J^2 sigma - e(AN - MB)^2 - A^2 J^2`` with ``A = (e/2)F^2 -
    sigma K - mu``, ``mu = LapK/6 + K^2/2``, ``B`` as in the prolongation,
    ``N = grad_a K grad^a M``, ``J = rho + 8KFM``.  Roots come from the
    companion matrix with one Newton polish each.
    """
    frame = _resolve_frame(g, point, frame, order)
    if frame.dim != 2:
        raise GeometryError("the near-horizon quartic needs a 2D chart")
    e, K, M, rho, mu, gKmu, N, J = _nhg_invariants(frame, F, guard_tol)
    A, B = _nhg_AB_polys(e, K, M, F, mu, gKmu)
    P1 = np.polysub(N * A, M * B)  # AN - MB, degree 2
    quartic = np.polysub(
        M * J * J * np.array([1.0, 0.0]),
        np.polyadd(e * np.polymul(P1, P1), J * J * np.polymul(A, A)),
    )
    roots = np.roots(quartic)
    dq = np.polyder(quartic)
    real_roots = []
    for r in roots:
        if abs(r.imag) > 1e-8 * (1.0 + abs(r)):
            continue
        s = r.real
        slope = np.polyval(dq, s)
        if slope != 0.0:
            s = s - np.polyval(quartic, s) / slope
        real_roots.append(float(s))
    return SigmaQuartic(
        coefficients=quartic,
        real_roots=tuple(sorted(real_roots)),
        guards={"M": M, "J": J, "rho": rho},
    )


def nhg_candidate(
    g: MetricChart,
    F: float,
    sigma: float,
    point: Sequence[float] | None = None,
    *,
    frame: ChartFrame | None = None,
    order: int = CANDIDATE_ORDER,
    guard_tol: float = 1e-12,
) -> CandidateResult:
    """The near-horizon-geometry candidate at a quartic root ``sigma``::

        X_a = (AN - MB) / (M J) eps_ab grad^b K + (A / M) grad_a K.

    The result's ``obstruction`` field carries ``X_a X^a - sigma``: it
    vanishes (to root-finding accuracy) exactly when ``sigma`` is a genuine
    quartic root, and flags non-roots otherwise.
    """
    frame = _resolve_frame(g, point, frame, order)
    if frame.dim != 2:
        raise GeometryError("the near-horizon candidate needs a 2D chart")
    e, K, M, rho, mu, gKmu, N, J = _nhg_invariants(frame, F, guard_tol)
    A_poly, B_poly = _nhg_AB_polys(e, K, M, F, mu, gKmu)
    A = float(np.polyval(A_poly, sigma))
    B = float(np.polyval(B_poly, sigma))
    pack = frame.pack
    epsK = _values(_eps_lower_sharp(frame, pack.gradK))
    gradK = _values(pack.gradK)
    coeff = (A * N - M * B) / (M * J)
    X = coeff * epsK + (A / M) * gradK
    ginv_v = np.array([[frame.ginv[a][b].value for b in range(2)] for a in range(2)])
    sigma_check = float(X @ ginv_v @ X)
    return CandidateResult(
        X=X,
        branch="nhg",
        guards={"M": M, "J": J, "rho": rho, "sigma_check": sigma_check},
        F=F,
        obstruction=sigma_check - sigma,
    )
