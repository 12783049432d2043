"""Chart geometry: Christoffels, curvature, the 2D invariant pack, and the
volume form, cross-examined against finite differences and sympy."""

from __future__ import annotations

import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from groliton import geometry
from groliton.geometry import (
    ChartFrame,
    GeometryError,
    MetricChart,
    SingularPointError,
)

from conftest import (
    ORACLE_METRICS,
    brioschi_K,
    grad_fd,
    metric_matrix_fd,
    oracle_charts,
)

EUCLID = MetricChart([["1", "0"], ["0", "1"]], ("x", "y"), e=1)
GENERIC = MetricChart(
    [["1 + x^2 + y^2/2", "x*y/5"], ["x*y/5", "2 + y^2 + x^4/8"]], ("x", "y"), e=1
)
Y4PLUS6 = MetricChart([["(y^4+6)/6", "0"], ["0", "6/(y^4+6)"]], ("x", "y"), e=1)
SPHERE = MetricChart([["1", "0"], ["0", "sin(x)^2"]], ("x", "y"), e=1)
EXP_T2_3D = MetricChart(
    [["exp(t^2)", "0", "0"], ["0", "exp(t)", "0"], ["0", "0", "1"]],
    ("x", "y", "t"),
    e=1,
)


def vals(tensor, n):
    return np.array(
        [[tensor[a][b].value for b in range(n)] for a in range(n)]
    )


# ----------------------------------------------------------------------
# construction and validation
# ----------------------------------------------------------------------


def test_components_must_be_symmetric():
    with pytest.raises(GeometryError):
        MetricChart([["1", "2"], ["3", "4"]], ("x", "y"), e=1)


def test_declared_signature_checked_per_point():
    g = MetricChart([["-(1+x^2)", "0"], ["0", "1"]], ("x", "y"), e=1)
    with pytest.raises(GeometryError, match="contradicts"):
        ChartFrame(g, (0.2, 0.1), 2).e


def test_signature_inferred_when_not_declared():
    g = MetricChart([["-(1+x^2)", "0"], ["0", "1"]], ("x", "y"), e=None)
    assert ChartFrame(g, (0.2, 0.1), 2).e == -1
    h = MetricChart([["1 + x^2", "0"], ["0", "1"]], ("x", "y"), e=None)
    assert ChartFrame(h, (0.2, 0.1), 2).e == 1


def test_singular_point_raises():
    g = MetricChart([["x", "0"], ["0", "1"]], ("x", "y"), e=None)
    with pytest.raises(SingularPointError):
        ChartFrame(g, (0.0, 0.1), 2).det


def test_full_symmetric_3d_accepted():
    g = MetricChart(
        [["2", "x*y/10", "0"], ["x*y/10", "3", "z/10"], ["0", "z/10", "1 + x^2"]],
        ("x", "y", "z"),
        e=1,
    )
    fr = ChartFrame(g, (0.3, 0.2, 0.4), 3)
    assert fr.dim == 3 and fr.det.value > 0


# ----------------------------------------------------------------------
# Christoffel symbols
# ----------------------------------------------------------------------


def test_christoffels_vanish_on_flat_chart():
    Gam = geometry.christoffels(EUCLID, (0.3, -0.8))
    assert max(
        abs(Gam[c][a][b].value) for c in range(2) for a in range(2) for b in range(2)
    ) == 0.0


def test_christoffel_ansatz_anchor():
    # g = A(y) dx^2 + dy^2/A(y): Gamma^y_xx = -(1/2) g^{yy} d_y g_xx = -A A'/2,
    # confirmed against the finite-difference assembly below.
    A_, dA = 2 + 0.8**2, 2 * 0.8
    g = MetricChart([["2 + y^2", "0"], ["0", "1/(2 + y^2)"]], ("x", "y"), e=1)
    Gam = geometry.christoffels(g, (0.3, 0.8))
    assert Gam[1][0][0].value == pytest.approx(-A_ * dA / 2, rel=1e-12)
    gfuns = [
        [lambda x, y: 2 + y * y, lambda x, y: 0.0],
        [lambda x, y: 0.0, lambda x, y: 1 / (2 + y * y)],
    ]
    _, _, Gam_fd, _, _ = metric_matrix_fd(gfuns, (0.3, 0.8))
    assert Gam[1][0][0].value == pytest.approx(Gam_fd[1, 0, 0], rel=1e-9)


def test_christoffel_3d_anchor():
    Gam = geometry.christoffels(EXP_T2_3D, (0.1, 0.2, 0.7))
    assert Gam[2][0][0].value == pytest.approx(-0.7 * math.exp(0.49), rel=1e-12)


def test_christoffels_symmetric_and_metric_compatible():
    fr = ChartFrame(GENERIC, (0.4, 0.7), 4)
    for c in range(2):
        for a in range(2):
            for b in range(2):
                assert fr.christoffels[c][a][b].value == pytest.approx(
                    fr.christoffels[c][b][a].value, abs=1e-14
                )
    Dg = fr.cov_d_tensor2(fr.g)
    assert (
        max(
            abs(Dg[c][a][b].value)
            for c in range(2)
            for a in range(2)
            for b in range(2)
        )
        < 1e-10
    )


def test_christoffels_against_sympy():
    x, y = sympy.symbols("x y")
    gs = sympy.Matrix([[1 + x**2 + y**2 / 2, x * y / 5], [x * y / 5, 2 + y**2 + x**4 / 8]])
    ginv = gs.inv()
    coords = (x, y)
    p = {x: 0.4, y: 0.7}
    Gam = geometry.christoffels(GENERIC, (0.4, 0.7))
    for c in range(2):
        for a in range(2):
            for b in range(2):
                want = sum(
                    sympy.Rational(1, 2)
                    * ginv[c, d]
                    * (
                        sympy.diff(gs[d, b], coords[a])
                        + sympy.diff(gs[d, a], coords[b])
                        - sympy.diff(gs[a, b], coords[d])
                    )
                    for d in range(2)
                )
                assert Gam[c][a][b].value == pytest.approx(
                    float(want.subs(p).evalf(30)), rel=1e-12, abs=1e-13
                )


# ----------------------------------------------------------------------
# Gauss curvature
# ----------------------------------------------------------------------


def test_gauss_K_flat_and_paper_metric():
    assert geometry.gauss_K(EUCLID, (1.0, 2.0)).value == 0.0
    for yv in (0.6, 1.0, 1.4, -0.9):
        assert geometry.gauss_K(Y4PLUS6, (0.3, yv)).value == pytest.approx(
            -yv * yv, rel=1e-12
        )


def test_gauss_K_constant_curvature_sphere():
    assert geometry.gauss_K(SPHERE, (0.8, 0.3)).value == pytest.approx(1.0, rel=1e-12)


def test_gauss_K_ansatz_signs():
    # g = A(y)dx^2 + dy^2/A(y) has K = -A''/2; the Lorentzian companion
    # A(y)dx^2 - dy^2/A(y) flips it to +A''/2.
    g = MetricChart([["2 + y^2", "0"], ["0", "1/(2 + y^2)"]], ("x", "y"), e=1)
    assert geometry.gauss_K(g, (0.3, 0.8)).value == pytest.approx(-1.0, rel=1e-12)
    gl = MetricChart([["2 + y^2", "0"], ["0", "-1/(2 + y^2)"]], ("x", "y"), e=-1)
    assert geometry.gauss_K(gl, (0.3, 0.8)).value == pytest.approx(1.0, rel=1e-12)


def test_gauss_K_against_brioschi_oracle():
    rng = np.random.default_rng(3)
    for chart, gfuns, box in oracle_charts():
        for _ in range(5):
            p = tuple(rng.uniform(lo, hi) for lo, hi in box)
            want = brioschi_K(gfuns, p)
            got = geometry.gauss_K(chart, p).value
            assert got == pytest.approx(want, rel=1e-6, abs=1e-9)


def test_gauss_K_jet_carries_derivatives():
    Kj = geometry.gauss_K(Y4PLUS6, (0.3, 0.9))
    # K = -y^2: dK/dy = -2y, d2K/dy2 = -2, dK/dx = 0.
    assert Kj.partial((0, 1)) == pytest.approx(-1.8, rel=1e-10)
    assert Kj.partial((0, 2)) == pytest.approx(-2.0, rel=1e-9)
    assert Kj.partial((1, 0)) == pytest.approx(0.0, abs=1e-10)


# ----------------------------------------------------------------------
# Ricci data
# ----------------------------------------------------------------------


def test_ricci_3d_paper_anchor():
    for t in (-0.5, 0.0, 0.4, 1.0):
        rd = geometry.ricci(EXP_T2_3D, (0.1, 0.2, t))
        assert rd.ric[2][2].value == pytest.approx(-(t * t + 1.25), rel=1e-11)


def test_ricci_2d_is_K_times_g():
    rng = np.random.default_rng(5)
    for chart, _, box in oracle_charts():
        p = tuple(rng.uniform(lo, hi) for lo, hi in box)
        rd = geometry.ricci(chart, p)
        K = geometry.gauss_K(chart, p).value
        fr = ChartFrame(chart, p, 2)
        for a in range(2):
            for b in range(2):
                assert rd.ric[a][b].value == pytest.approx(
                    K * fr.g[a][b].value, rel=1e-10, abs=1e-11
                )


def test_contracted_bianchi_3d():
    from conftest import random_metric_3d

    rng = np.random.default_rng(11)
    for _ in range(10):
        g, p = random_metric_3d(rng)
        fr = ChartFrame(g, p, 4)
        Dric = fr.cov_d_tensor2(fr.ric)
        for b in range(3):
            div = sum(
                fr.ginv[a][c].value * Dric[a][c][b].value
                for a in range(3)
                for c in range(3)
            )
            half_grad = 0.5 * fr.grad(fr.scalar_R)[b].value
            assert div == pytest.approx(half_grad, rel=1e-9, abs=1e-9)


def test_scalar_curvature_gradient_consistency():
    # gradR from the ricci bundle equals an FD derivative of pointwise R.
    p = (0.3, 0.2, 0.5)
    rd = geometry.ricci(EXP_T2_3D, p)

    def R_at(t):
        return geometry.ricci(EXP_T2_3D, (0.3, 0.2, t)).R.value

    from conftest import d1

    assert rd.gradR[2].value == pytest.approx(d1(R_at, 0.5, 2e-3), rel=1e-8)


# ----------------------------------------------------------------------
# 2D invariant pack
# ----------------------------------------------------------------------


def test_invariant_pack_internal_identities():
    for chart, _, box in oracle_charts():
        p = (0.5 * (box[0][0] + box[0][1]), 0.45 * (box[1][0] + box[1][1]))
        fr = ChartFrame(chart, p, 8)
        pk = fr.pack
        ginv = vals(fr.ginv, 2)
        gK = np.array([v.value for v in pk.gradK])
        gM = np.array([v.value for v in pk.gradM])
        # M = |grad K|^2
        assert pk.M.value == pytest.approx(gK @ ginv @ gK, rel=1e-10, abs=1e-13)
        # Laplacian two ways: trace of the Hessian.
        lap2 = sum(
            ginv[a][b] * pk.hessK[a][b].value for a in range(2) for b in range(2)
        )
        assert pk.lapK.value == pytest.approx(lap2, rel=1e-10, abs=1e-13)
        # nu = e(1/2 grad^a K grad_a M - M lapK)
        ident = fr.e * (0.5 * gK @ ginv @ gM - pk.M.value * pk.lapK.value)
        assert pk.nu.value == pytest.approx(ident, rel=1e-9, abs=1e-13)
        # I1 = rho; I2 = eps^{ab} grad_a K grad_b lapK
        assert pk.I1.value == pk.rho.value
        eps = vals(fr.epsilon.upper, 2)
        gLap = np.array([v.value for v in pk.gradLapK])
        assert pk.I2.value == pytest.approx(gK @ eps @ gLap, rel=1e-10, abs=1e-13)
        # N_c = (hess K)_{ac} eps^{ab} grad_b K
        for c in range(2):
            want = sum(
                pk.hessK[a][c].value * eps[a][b] * gK[b]
                for a in range(2)
                for b in range(2)
            )
            assert pk.N[c].value == pytest.approx(want, rel=1e-9, abs=1e-12)


def test_conformal_1d_profile_has_rho_zero_and_nu_closed_form():
    # g = e^{2f}(dx^2+dy^2) with f = f(x):  rho = 0 identically and
    # nu = -e^{-10f} f'(2f'f'' - f''')^3.
    g = MetricChart(
        [["exp(2*(sin(x)+x^2/3))", "0"], ["0", "exp(2*(sin(x)+x^2/3))"]],
        ("x", "y"),
        e=1,
    )
    for x, y in [(0.3, -0.7), (1.1, 0.4), (-0.8, 2.0)]:
        pk = geometry.invariant_pack_2d(g, (x, y))
        f = math.sin(x) + x * x / 3
        f1 = math.cos(x) + 2 * x / 3
        f2 = -math.sin(x) + 2 / 3
        f3 = -math.cos(x)
        nu_closed = -math.exp(-10 * f) * f1 * (2 * f1 * f2 - f3) ** 3
        assert pk.rho.value == pytest.approx(0.0, abs=1e-12)
        assert pk.nu.value == pytest.approx(nu_closed, rel=1e-11)


def test_constant_curvature_pack_degenerates():
    pk = geometry.invariant_pack_2d(SPHERE, (0.9, 0.2))
    assert abs(pk.gradK[0].value) < 1e-11 and abs(pk.gradK[1].value) < 1e-11
    assert abs(pk.M.value) < 1e-11
    assert abs(pk.rho.value) < 1e-11
    assert abs(pk.nu.value) < 1e-11


def test_invariants_against_fd_oracle_sample():
    # Smaller copy of the acceptance AD-vs-FD criterion for fast feedback.
    from conftest import H_VALUE, hess_fd

    chart, gfuns, box = oracle_charts()[0]
    rng = np.random.default_rng(17)
    for _ in range(3):
        p = tuple(rng.uniform(lo, hi) for lo, hi in box)
        pk = geometry.invariant_pack_2d(chart, p)
        K_ad = lambda q: geometry.gauss_K(chart, q).value
        _, ginv, Gam, _, eps_up = metric_matrix_fd(gfuns, p)
        dK = grad_fd(K_ad, p, H_VALUE)
        hK = hess_fd(K_ad, p, H_VALUE) - np.einsum("cab,c->ab", Gam, dK)
        assert pk.K.value == pytest.approx(brioschi_K(gfuns, p), rel=1e-6)
        assert pk.M.value == pytest.approx(float(dK @ ginv @ dK), rel=1e-6)
        assert pk.lapK.value == pytest.approx(
            float(np.einsum("ab,ab->", ginv, hK)), rel=1e-6
        )


# ----------------------------------------------------------------------
# volume form
# ----------------------------------------------------------------------


def test_epsilon_normalization_and_contraction():
    for chart, gfuns, box in oracle_charts():
        p = (0.5 * (box[0][0] + box[0][1]), 0.4 * (box[1][0] + box[1][1]))
        fr = ChartFrame(chart, p, 2)
        eps = fr.epsilon
        det = np.linalg.det(np.array([[gfuns[a][b](*p) for b in range(2)] for a in range(2)]))
        assert eps.lower[0][1].value == pytest.approx(math.sqrt(abs(det)), rel=1e-12)
        assert eps.lower[0][0].value == 0.0 and eps.lower[1][1].value == 0.0
        assert eps.lower[1][0].value == pytest.approx(-eps.lower[0][1].value)
        contr = sum(
            eps.upper[a][b].value * eps.lower[a][b].value
            for a in range(2)
            for b in range(2)
        )
        assert contr == pytest.approx(2.0 * fr.e, rel=1e-12)
        assert eps.e == fr.e


@given(seed=st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_epsilon_pair_identity_random(seed):
    from conftest import random_riemannian_2d

    rng = np.random.default_rng(seed)
    g, p = random_riemannian_2d(rng)
    fr = ChartFrame(g, p, 2)
    eps = fr.epsilon
    gm = vals(fr.g, 2)
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    want = fr.e * (gm[a, c] * gm[b, d] - gm[a, d] * gm[b, c])
                    got = eps.lower[a][b].value * eps.lower[c][d].value
                    assert got == pytest.approx(want, rel=1e-11, abs=1e-11)


def test_epsilon_mixed_contraction_identity():
    # eps^{ab} eps_{ac} = e delta^b_c in both signatures.
    charts = [
        MetricChart([["1 + x^2", "x*y/6"], ["x*y/6", "2 + y^2"]], ("x", "y"), e=1),
        MetricChart([["-(1 + x^2)", "0"], ["0", "2 + y^2"]], ("x", "y"), e=-1),
    ]
    for g in charts:
        fr = ChartFrame(g, (0.3, 0.4), 2)
        eps = fr.epsilon
        for b in range(2):
            for c in range(2):
                got = sum(eps.upper[a][b].value * eps.lower[a][c].value for a in range(2))
                assert got == pytest.approx(fr.e * (1.0 if b == c else 0.0), abs=1e-12)


# ----------------------------------------------------------------------
# frame helpers
# ----------------------------------------------------------------------


def test_raise_lower_round_trip():
    fr = ChartFrame(GENERIC, (0.4, 0.7), 3)
    X = geometry.evaluate_covector(("sin(x+y)/3", "x*y/4"), fr)
    up = fr.raise_index(X)
    back = fr.lower_index(up)
    for a in range(2):
        assert back[a].value == pytest.approx(X[a].value, rel=1e-12)


def test_divergence_and_laplacian_consistency():
    fr = ChartFrame(GENERIC, (0.4, 0.7), 4)
    s = geometry.evaluate_field("sin(x)*y^2", fr.coord_jets, ("x", "y"))
    lap = fr.laplacian(s)
    div_grad = fr.divergence(fr.raise_index(fr.grad(s)))
    assert lap.value == pytest.approx(div_grad.value, rel=1e-11)


def test_evaluate_covector_accepts_callables_and_strings():
    fr = ChartFrame(GENERIC, (0.4, 0.7), 3)
    from groliton import jets as J

    as_strings = geometry.evaluate_covector(("x^2 + y", "sin(x)"), fr)
    as_callable = geometry.evaluate_covector(
        lambda xj, yj: (xj * xj + yj, J.sin(xj)), fr
    )
    for a in range(2):
        assert as_strings[a].value == pytest.approx(as_callable[a].value, rel=1e-14)
