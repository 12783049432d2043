"""Shared helpers: finite-difference oracles and test-metric tables.

The finite-difference routines here are the *independent* differentiation
path used to cross-examine the jet arithmetic: they never touch
:mod:`groliton.jets`.  Gauss curvature has a fully metric-level oracle
(the Brioschi formula, :func:`brioschi_K`); the higher invariants are
checked by applying one finite-difference layer to pointwise curvature
values, so every derivative the jets propagate is re-derived numerically.
"""

from __future__ import annotations

import math

import numpy as np

from groliton.geometry import MetricChart

# Steps tuned for 4th-order central stencils in float64: truncation ~h^4,
# roundoff ~eps/h (first derivative) and ~eps/h^2 (second derivative).
H_VALUE = 2e-3   # FD layers on AD-computed pointwise values
H_METRIC = 1e-3  # FD on the metric component lambdas


def d1(f, x, h):
    """4th-order central first derivative of a scalar function."""
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def d2(f, x, h):
    """4th-order central second derivative of a scalar function."""
    return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (
        12 * h * h
    )


def grad_fd(f, p, h):
    """FD gradient of f(point) for a 2D point."""
    p = np.asarray(p, float)
    out = np.empty(2)
    for a in range(2):

        def along(s, a=a):
            q = p.copy()
            q[a] = s
            return f(q)

        out[a] = d1(along, p[a], h)
    return out


def hess_fd(f, p, h):
    """FD Hessian (partial derivatives, no connection) of f at a 2D point."""
    p = np.asarray(p, float)
    out = np.empty((2, 2))
    for a in range(2):

        def along(s, a=a):
            q = p.copy()
            q[a] = s
            return f(q)

        out[a, a] = d2(along, p[a], h)

    def cross(s):
        return d1(lambda u: f((s, u)), p[1], h)

    out[0, 1] = out[1, 0] = d1(cross, p[0], h)
    return out


def brioschi_K(gfuns, p, h=H_METRIC):
    """Gauss curvature from the metric components alone (Brioschi formula)."""
    E = lambda q: gfuns[0][0](*q)
    F = lambda q: gfuns[0][1](*q)
    G = lambda q: gfuns[1][1](*q)
    Eu, Ev = grad_fd(E, p, h)
    Evv = hess_fd(E, p, h)[1, 1]
    Gu, Gv = grad_fd(G, p, h)
    Guu = hess_fd(G, p, h)[0, 0]
    Fu, Fv = grad_fd(F, p, h)
    Fuv = hess_fd(F, p, h)[0, 1]
    Ep, Fp, Gp = E(p), F(p), G(p)
    M1 = np.array(
        [
            [-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev],
            [Fv - 0.5 * Gu, Ep, Fp],
            [0.5 * Gv, Fp, Gp],
        ]
    )
    M2 = np.array([[0.0, 0.5 * Ev, 0.5 * Gu], [0.5 * Ev, Ep, Fp], [0.5 * Gu, Fp, Gp]])
    det = Ep * Gp - Fp * Fp
    return (np.linalg.det(M1) - np.linalg.det(M2)) / (det * det)


def metric_matrix_fd(gfuns, p, h=H_METRIC):
    """(g, g^{-1}, Gamma, e, eps_upper) assembled purely from the lambdas."""
    n = len(gfuns)
    p = np.asarray(p, float)
    g = np.array([[gfuns[a][b](*p) for b in range(n)] for a in range(n)])
    ginv = np.linalg.inv(g)
    dg = np.empty((n, n, n))
    for a in range(n):
        for b in range(n):
            for c in range(n):

                def along(s, a=a, b=b, c=c):
                    q = p.copy()
                    q[c] = s
                    return gfuns[a][b](*q)

                dg[c, a, b] = d1(along, p[c], h)
    Gam = np.empty((n, n, n))
    for c in range(n):
        for a in range(n):
            for b in range(n):
                Gam[c, a, b] = 0.5 * sum(
                    ginv[c, d] * (dg[a, d, b] + dg[b, d, a] - dg[d, a, b])
                    for d in range(n)
                )
    det = np.linalg.det(g)
    e = 1.0 if det > 0 else -1.0
    eps_up = None
    if n == 2:
        eps_up = np.array([[0.0, 1.0], [-1.0, 0.0]]) * (e / math.sqrt(abs(det)))
    return g, ginv, Gam, e, eps_up


# Five test metrics for the AD-vs-FD oracle: expression strings for the
# package, plain lambdas for the oracle, signature sign, and a sample box.
ORACLE_METRICS = [
    (
        [["1 + x^2 + y^2/2", "x*y/5"], ["x*y/5", "2 + y^2 + x^4/8"]],
        [
            [lambda x, y: 1 + x * x + y * y / 2, lambda x, y: x * y / 5],
            [lambda x, y: x * y / 5, lambda x, y: 2 + y * y + x**4 / 8],
        ],
        1,
        ((-0.6, 0.6), (-0.6, 0.6)),
    ),
    (
        [
            ["exp(2*(x^2/4 - y^2/5 + x*y/10))", "0"],
            ["0", "exp(2*(x^2/4 - y^2/5 + x*y/10))"],
        ],
        [
            [
                lambda x, y: math.exp(2 * (x * x / 4 - y * y / 5 + x * y / 10)),
                lambda x, y: 0.0,
            ],
            [
                lambda x, y: 0.0,
                lambda x, y: math.exp(2 * (x * x / 4 - y * y / 5 + x * y / 10)),
            ],
        ],
        1,
        ((-0.8, 0.8), (-0.8, 0.8)),
    ),
    (
        [
            ["2 + cos(x) + y^2/3", "sin(x)*sin(y)/5"],
            ["sin(x)*sin(y)/5", "2 + sin(y) + x^2/2"],
        ],
        [
            [
                lambda x, y: 2 + math.cos(x) + y * y / 3,
                lambda x, y: math.sin(x) * math.sin(y) / 5,
            ],
            [
                lambda x, y: math.sin(x) * math.sin(y) / 5,
                lambda x, y: 2 + math.sin(y) + x * x / 2,
            ],
        ],
        1,
        ((0.2, 1.2), (0.2, 1.2)),
    ),
    (
        [["-(1 + x^2 + y^2/3)", "0"], ["0", "1 + x^2/2 + y^4/9"]],
        [
            [lambda x, y: -(1 + x * x + y * y / 3), lambda x, y: 0.0],
            [lambda x, y: 0.0, lambda x, y: 1 + x * x / 2 + y**4 / 9],
        ],
        -1,
        ((-0.7, 0.7), (-0.7, 0.7)),
    ),
    (
        [["3 + x + y^2/2", "(x - y)/5"], ["(x - y)/5", "2 + y + x^2/3"]],
        [
            [lambda x, y: 3 + x + y * y / 2, lambda x, y: (x - y) / 5],
            [lambda x, y: (x - y) / 5, lambda x, y: 2 + y + x * x / 3],
        ],
        1,
        ((-0.5, 0.9), (-0.5, 0.9)),
    ),
]


def oracle_charts():
    """The five oracle metrics as (MetricChart, lambdas, box) triples."""
    return [
        (MetricChart(comps, ("x", "y"), e=e), gfuns, box)
        for comps, gfuns, e, box in ORACLE_METRICS
    ]


def random_riemannian_2d(rng):
    """A random positive-definite 2D polynomial metric and a safe sample point.

    Components are quadratic polynomials with small off-diagonal dominated
    by the diagonal on the unit box, so every draw is a valid chart.
    """
    a1, a2 = rng.uniform(0.1, 0.8, size=2)
    b1, b2 = rng.uniform(0.1, 0.8, size=2)
    c = rng.uniform(-0.2, 0.2)
    comps = [
        [f"{1.0 + a1} + {a2}*x^2 + {b1}*y^2", f"{c}*x*y"],
        [f"{c}*x*y", f"{1.0 + b2} + {b1}*x^2 + {a1}*y^2"],
    ]
    point = tuple(rng.uniform(-0.7, 0.7, size=2))
    return MetricChart(comps, ("x", "y"), e=1), point


def random_metric_3d(rng):
    """A random 3D Riemannian metric (diagonal-dominant) and a sample point."""
    d = rng.uniform(0.3, 1.0, size=3)
    w = rng.uniform(-0.15, 0.15, size=3)
    comps = [
        [f"{1.0 + d[0]} + {d[1]}*x^2 + {d[2]}*y^2", f"{w[0]}*x*z", f"{w[1]}*y"],
        [f"{w[0]}*x*z", f"{1.0 + d[1]} + {d[2]}*y^2 + {d[0]}*z^2", f"{w[2]}*x*y"],
        [f"{w[1]}*y", f"{w[2]}*x*y", f"{1.0 + d[2]} + {d[0]}*x^2 + {d[1]}*z^2"],
    ]
    point = tuple(rng.uniform(-0.6, 0.6, size=3))
    return MetricChart(comps, ("x", "y", "z"), e=1), point
