"""Command-line front end.

Subcommands: ``list`` (families and ODE ids), ``verify`` (residual report of
a catalog family), ``obstruct`` (obstruction of a forced candidate on a user
metric), ``candidate`` (candidate vector field at a point), ``scan``
(parameter sweep of a family), and ``ode-compare`` (reduction-ODE checks).

Exit codes: 0 success (all residuals under tolerance), 1 residual/obstruction
failure, 2 invalid input.  JSON output is deterministic: keys sorted, floats
formatted to 17 significant digits.  The environment variable
``GROLITON_ORDER`` overrides the default jet truncation order.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from typing import Mapping, Sequence

import numpy as np

from . import candidates, catalog, exprs, jets, reductions
from .geometry import ChartFrame, GeometryError, MetricChart
from .soliton import SKIPPABLE, SolitonParams, grid_points

RESIDUAL_TOL = 1e-8

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class CliError(ValueError):
    """Invalid command-line input (mapped to exit code 2)."""


# ----------------------------------------------------------------------
# deterministic serialization
# ----------------------------------------------------------------------


def _fmt_float(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    return format(v, ".17g")


def _dumps(obj, indent: int = 0) -> str:
    """JSON text with sorted keys and fixed 17-significant-digit floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [
            f'{inner}"{key}": {_dumps(obj[key], indent + 1)}'
            for key in sorted(obj)
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{_dumps(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    text = str(obj)
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{escaped}"'


def _write_json(path: str, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dumps(payload))
        fh.write("\n")


def _write_csv(path: str, header: Sequence[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [_fmt_float(v) if isinstance(v, float) else v for v in row]
            )


# ----------------------------------------------------------------------
# flag parsing helpers
# ----------------------------------------------------------------------


def _parse_params(text: str | None) -> dict:
    """``k=v,k2=v2`` with numeric coercion; quoted values stay strings."""
    out: dict = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise CliError(f"bad parameter {item!r}; expected name=value")
        key, value = item.split("=", 1)
        key, value = key.strip(), value.strip()
        if value and value[0] == value[-1] and value[0] in "'\"":
            out[key] = value[1:-1]
            continue
        try:
            out[key] = float(value)
        except ValueError:
            out[key] = value
    return out


def _parse_grid(text: str | None, dim: int) -> tuple:
    if not text:
        return (21,) * dim
    parts = [p for p in text.replace("x", ",").split(",") if p]
    try:
        grid = tuple(int(p) for p in parts)
    except ValueError as exc:
        raise CliError(f"bad grid {text!r}: {exc}") from exc
    if len(grid) == 1:
        grid = grid * dim
    if len(grid) != dim or any(n < 1 for n in grid):
        raise CliError(f"grid {text!r} does not match a {dim}D box")
    return grid


def _parse_box(text: str | None, dim: int) -> tuple | None:
    if not text:
        return None
    axes = []
    for part in text.split(","):
        bounds = part.split(":")
        if len(bounds) != 2:
            raise CliError(f"bad box axis {part!r}; expected lo:hi")
        try:
            lo, hi = float(bounds[0]), float(bounds[1])
        except ValueError as exc:
            raise CliError(f"bad box axis {part!r}: {exc}") from exc
        axes.append((lo, hi))
    if len(axes) != dim:
        raise CliError(f"box {text!r} has {len(axes)} axes, chart has {dim}")
    return tuple(axes)


def _parse_point(text: str, dim: int) -> tuple:
    try:
        values = tuple(float(p) for p in text.split(","))
    except ValueError as exc:
        raise CliError(f"bad point {text!r}: {exc}") from exc
    if len(values) != dim:
        raise CliError(f"point {text!r} has {len(values)} coordinates, chart has {dim}")
    return values


def _parse_metric(metric_text: str, coords_text: str) -> MetricChart:
    """Semicolon-separated upper-triangle components in coordinate order."""
    coords = tuple(c.strip() for c in coords_text.split(",") if c.strip())
    dim = len(coords)
    if dim not in (2, 3):
        raise CliError(f"--coords must name 2 or 3 coordinates, got {coords!r}")
    entries = [p.strip() for p in metric_text.split(";")]
    want = dim * (dim + 1) // 2
    if len(entries) != want:
        raise CliError(
            f"--metric needs {want} upper-triangle components for {dim}D "
            f"(row-major g11;g12;...), got {len(entries)}"
        )
    rows = [[None] * dim for _ in range(dim)]
    k = 0
    for a in range(dim):
        for b in range(a, dim):
            rows[a][b] = entries[k]
            rows[b][a] = entries[k]
            k += 1
    try:
        return MetricChart(rows, coords)
    except (GeometryError, exprs.ExprSyntaxError) as exc:
        raise CliError(f"bad metric: {exc}") from exc


def _pin_signature(g: MetricChart, box: Sequence[Sequence[float]]) -> MetricChart:
    """Re-declare the chart with the signature of det g at the box center."""
    center = tuple(0.5 * (lo + hi) for lo, hi in box)
    frame = ChartFrame(g, center, 2)
    return MetricChart(
        [[g.components[a][b] for b in range(g.dim)] for a in range(g.dim)],
        g.coords,
        e=frame.e,
    )


def _center_box(point: Sequence[float], half: float = 0.25) -> tuple:
    return tuple((v - half, v + half) for v in point)


# ----------------------------------------------------------------------
# list
# ----------------------------------------------------------------------


def _cmd_list(args) -> int:
    reg = catalog.registry()
    print(f"{len(reg)} catalog families:")
    for family_id in catalog.family_ids():
        info = reg[family_id]
        defaults = ", ".join(
            f"{k}={info['defaults'][k]}" for k in info["parameters"]
        )
        print(f"  {family_id:22s} [{info['signature']:11s} dim={info['dim']}] "
              f"params: {defaults}")
    print(f"negative fixtures: {', '.join(catalog.NEGATIVE_IDS)}")
    print(f"reduction ODEs: {', '.join(reductions.ODE_IDS)}")
    if args.json:
        _write_json(args.json, {"families": reg,
                                "fixtures": list(catalog.NEGATIVE_IDS),
                                "odes": list(reductions.ODE_IDS)})
        print(f"registry written to {args.json}")
    return EXIT_OK


# ----------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------


def _cmd_verify(args) -> int:
    params = _parse_params(args.params)
    instance = catalog.make_family(args.family, params)
    dim = instance.metric.dim
    box = _parse_box(args.box, dim) or instance.regular_box
    grid = _parse_grid(args.grid, dim)
    checks = tuple(args.checks.split(",")) if args.checks else None
    report = instance.verify(grid=grid, box=box, checks=checks)

    print(f"family {args.family}  params "
          f"(c1={instance.params.c1:g}, c2={instance.params.c2:g}, "
          f"lam={instance.params.lam:g})  grid {'x'.join(map(str, grid))}")
    summary = report.summary
    for name in sorted(summary):
        print(f"  {name:12s} max |residual| = {summary[name]['max_abs']:.3e}")
    if report.skipped:
        print(f"  skipped {len(report.skipped)} points "
              f"(first: {report.skipped[0]})")
    ok = bool(report.rows) and report.max_abs <= RESIDUAL_TOL

    cc = catalog.cross_check(instance, grid=(5,) * dim, box=box)
    for key in ("K", "F"):
        err = cc[key]
        if err is None:
            continue
        verdict = "ok" if err <= RESIDUAL_TOL else "MISMATCH"
        print(f"  {key} closed form  max rel err = {err:.3e}  [{verdict}]")
        ok = ok and err <= RESIDUAL_TOL

    print("PASS" if ok else "FAIL")
    payload = report.to_dict()
    payload.update(
        family=args.family,
        params=instance.notes.get("family_params", {}),
        case={"c1": instance.params.c1, "c2": instance.params.c2,
              "lam": instance.params.lam},
        cross_check={k: v for k, v in cc.items() if v is not None},
    )
    payload["pass"] = ok
    if args.json:
        _write_json(args.json, payload)
    if args.csv:
        names = sorted(summary)
        header = list(instance.metric.coords) + names
        rows = [
            list(point) + [float(values[n]) for n in names]
            for point, values in report.rows
        ]
        _write_csv(args.csv, header, rows)
    return EXIT_OK if ok else EXIT_FAIL


# ----------------------------------------------------------------------
# obstruct / candidate
# ----------------------------------------------------------------------


def _theta_from_jets(frame: ChartFrame, X_jets, params: SolitonParams) -> np.ndarray:
    """grs residual of a jet-valued candidate at the frame's point."""
    n = frame.dim
    DX = frame.cov_d_covector(X_jets)
    out = np.empty((n, n))
    for a in range(n):
        for b in range(n):
            theta = (
                (DX[a][b] + DX[b][a]) * 0.5
                + X_jets[a] * X_jets[b] * params.c1
                - frame.ric[a][b] * params.c2
                - frame.g[a][b] * params.lam
            )
            out[a, b] = theta.value
    return out


def _curl_from_jets(frame: ChartFrame, X_jets) -> float:
    """``eps^{ab} nabla_[a X_b]`` of a jet-valued candidate (2D)."""
    DX = frame.cov_d_covector(X_jets)
    acc = 0.0
    for a in range(2):
        for b in range(2):
            acc += frame.epsilon.upper[a][b].value * DX[a][b].value
    return acc


def _candidate_at(g: MetricChart, params: SolitonParams, mode: str,
                  branch: str, point) -> tuple:
    """(CandidateResult | LinearSystem3D, theta | None) at one point."""
    if mode == "nd":
        res = candidates.gradient_candidate_nd(g, params, point)
        theta = candidates.gradient_obstruction_nd(g, params, point)
        return res, theta
    if mode == "gradient":
        if g.dim != 2:
            raise CliError("--mode gradient is the 2D closed-form route; "
                           "use --mode nd for 3D metrics")
        res = candidates.gradient_candidate_2d(g, params, point)
        theta = candidates.gradient_obstruction_2d(g, params, point)
        return res, theta
    if mode == "ricci":
        if g.dim != 2:
            raise CliError("--mode ricci needs a 2D metric (3D c1=0 cases "
                           "are served by --mode homothety or nd)")
        res = candidates.ricci_candidate(g, params.lam, point, branch)
        frame = ChartFrame(g, point, candidates.CANDIDATE_ORDER)
        theta = _theta_from_jets(frame, res.X_jets, params)
        return res, theta
    if mode == "homothety":
        if g.dim == 3:
            res = candidates.linear_system_3d(g, params, point)
            return res, None
        res = candidates.homothety_candidate(g, params.lam, point, branch)
        frame = ChartFrame(g, point, candidates.CANDIDATE_ORDER)
        theta = _theta_from_jets(frame, res.X_jets, params)
        return res, theta
    raise CliError(f"unknown mode {mode!r}; expected gradient|ricci|homothety|nd")


def _metric_args(args) -> tuple[MetricChart, SolitonParams]:
    g = _parse_metric(args.metric, args.coords)
    params = SolitonParams(args.c1, args.c2, getattr(args, "lam"))
    return g, params


def _cmd_obstruct(args) -> int:
    g, params = _metric_args(args)
    dim = g.dim
    if args.point and not args.box:
        box = _center_box(_parse_point(args.point, dim))
        grid = (1,) * dim if not args.grid else _parse_grid(args.grid, dim)
        points = [_parse_point(args.point, dim)] if grid == (1,) * dim else None
    else:
        box = _parse_box(args.box, dim)
        if box is None:
            raise CliError("--box (or --point) is required for obstruct")
        grid = _parse_grid(args.grid or "5", dim)
        points = None
    g = _pin_signature(g, box)
    if points is None:
        points = list(grid_points(box, grid))

    rows = []
    guard_lines = []
    worst = None
    verdicts = []
    for point in points:
        try:
            res, theta = _candidate_at(g, params, args.mode, args.branch, point)
        except (candidates.CandidateError, CliError) as exc:
            if isinstance(exc, CliError):
                raise
            guard_lines.append((point, f"{type(exc).__name__}: {exc}"))
            continue
        except SKIPPABLE as exc:
            guard_lines.append((point, f"{type(exc).__name__}: {exc}"))
            continue
        if isinstance(res, candidates.LinearSystem3D):
            verdicts.append((point, res.consistent, res.residual))
            rows.append({"point": list(point),
                         "consistent": res.consistent,
                         "residual": float(res.residual),
                         "X": [float(v) for v in res.solution_cov]})
            value = 0.0 if res.consistent else float(res.residual)
        else:
            value = float(np.max(np.abs(theta)))
            row = {"point": list(point),
                   "X": [float(v) for v in res.X],
                   "branch": res.branch,
                   "theta_max": value,
                   "guards": {k: float(v) for k, v in res.guards.items()}}
            if getattr(res, "obstruction", None) is not None:
                row["scalar_obstruction"] = float(res.obstruction)
                value = max(value, abs(float(res.obstruction)))
            rows.append(row)
        worst = value if worst is None else max(worst, value)

    if not rows:
        detail = f" (first: {guard_lines[0][1]})" if guard_lines else ""
        raise CliError(f"no evaluable points in the box{detail}")

    if verdicts:
        n_bad = sum(1 for _, consistent, _ in verdicts if not consistent)
        label = "inconsistent linear system" if n_bad else "consistent linear system"
        print(f"{label} at {n_bad}/{len(verdicts)} points "
              f"(max least-squares defect {worst:.3e})")
    else:
        print(f"mode {args.mode}: max |Theta| = {worst:.3e} "
              f"over {len(rows)} points")
        sample = rows[0]
        print(f"  candidate at {tuple(sample['point'])}: X = "
              f"[{', '.join(_fmt_float(v) for v in sample['X'])}] "
              f"(branch {sample.get('branch', 'n/a')})")
    for point, reason in guard_lines[:3]:
        print(f"  guard at {tuple(point)}: {reason}")
    if len(guard_lines) > 3:
        print(f"  ... {len(guard_lines) - 3} more guarded points")
    ok = worst is not None and worst <= RESIDUAL_TOL
    print("PASS" if ok else "FAIL")

    payload = {
        "mode": args.mode,
        "case": {"c1": params.c1, "c2": params.c2, "lam": params.lam},
        "coords": list(g.coords),
        "box": [list(axis) for axis in box],
        "rows": rows,
        "guards": [{"point": list(p), "reason": r} for p, r in guard_lines],
        "max_obstruction": worst,
        "pass": ok,
    }
    if args.json:
        _write_json(args.json, payload)
    if args.csv:
        header = list(g.coords) + ["obstruction"]
        _write_csv(
            args.csv,
            header,
            [list(r["point"]) + [r.get("theta_max", r.get("residual", 0.0))]
             for r in rows],
        )
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_candidate(args) -> int:
    g, params = _metric_args(args)
    point = _parse_point(args.point, g.dim)
    g = _pin_signature(g, _center_box(point))
    try:
        res, theta = _candidate_at(g, params, args.mode, args.branch, point)
    except candidates.CandidateError as exc:
        print(f"{type(exc).__name__}: {exc}")
        return EXIT_FAIL
    if isinstance(res, candidates.LinearSystem3D):
        print(f"linear system at {point}: consistent={res.consistent} "
              f"least-squares defect {res.residual:.3e}")
        print(f"  X = [{', '.join(_fmt_float(float(v)) for v in res.solution_cov)}]")
        payload = {
            "point": list(point),
            "consistent": res.consistent,
            "residual": float(res.residual),
            "X": [float(v) for v in res.solution_cov],
        }
        ok = res.consistent
    else:
        frame = ChartFrame(g, point, candidates.CANDIDATE_ORDER)
        print(f"candidate at {point} (branch {res.branch}):")
        print(f"  X = [{', '.join(_fmt_float(float(v)) for v in res.X)}]")
        for key in sorted(res.guards):
            print(f"  guard {key} = {res.guards[key]:.6e}")
        payload = {
            "point": list(point),
            "branch": res.branch,
            "X": [float(v) for v in res.X],
            "guards": {k: float(v) for k, v in res.guards.items()},
        }
        if g.dim == 2:
            curl = _curl_from_jets(frame, res.X_jets)
            print(f"  curl scalar F = {_fmt_float(curl)}")
            payload["F"] = curl
        if theta is not None:
            tmax = float(np.max(np.abs(theta)))
            print(f"  obstruction max |Theta| = {tmax:.3e}")
            payload["theta"] = [[float(v) for v in row] for row in theta]
        ok = True
    if args.json:
        _write_json(args.json, payload)
    return EXIT_OK if ok else EXIT_FAIL


# ----------------------------------------------------------------------
# scan
# ----------------------------------------------------------------------


def _cmd_scan(args) -> int:
    name, _, spec = args.param.partition("=")
    parts = spec.split(":")
    if len(parts) != 3:
        raise CliError(f"bad --param {args.param!r}; expected name=lo:hi:N")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise CliError(f"bad --param {args.param!r}: {exc}") from exc
    if count < 1:
        raise CliError("--param needs at least one sample")
    base = _parse_params(args.params)

    values = [lo] if count == 1 else [
        lo + (hi - lo) * i / (count - 1) for i in range(count)
    ]
    rows = []
    all_ok = True
    print(f"scan {args.family} over {name} in [{lo:g}, {hi:g}] ({count} values)")
    for value in values:
        merged = dict(base)
        merged[name] = value
        try:
            instance = catalog.make_family(args.family, merged)
            dim = instance.metric.dim
            grid = _parse_grid(args.grid, dim) if args.grid else (7,) * dim
            report = instance.verify(grid=grid)
            mx = report.max_abs
            ok = mx is not None and mx <= RESIDUAL_TOL and not report.skipped
            line = (f"  {name}={value:<12g} max={mx:.3e} "
                    f"skipped={len(report.skipped)} {'ok' if ok else 'FAIL'}")
            rows.append({"value": value, "max_abs": mx,
                         "skipped": len(report.skipped), "pass": ok})
        except catalog.CatalogError as exc:
            ok = False
            line = f"  {name}={value:<12g} rejected: {exc}"
            rows.append({"value": value, "rejected": str(exc), "pass": False})
        all_ok = all_ok and ok
        print(line)
    print("PASS" if all_ok else "FAIL")
    payload = {"family": args.family, "param": name, "values": values,
               "rows": rows, "pass": all_ok}
    if args.json:
        _write_json(args.json, payload)
    if args.csv:
        _write_csv(
            args.csv,
            [name, "max_abs", "pass"],
            [[r["value"], r.get("max_abs"), r["pass"]] for r in rows],
        )
    return EXIT_OK if all_ok else EXIT_FAIL


# ----------------------------------------------------------------------
# ode-compare
# ----------------------------------------------------------------------


def _closed_form_jet(expr_text: str, var: str, value: float, order: int = 4):
    xj = jets.jet_variable(0, float(value), order, 1)
    from .geometry import evaluate_field

    return evaluate_field(exprs.parse(expr_text), (xj,), (var,))


def _ode_exact_table(ode: str, params: dict):
    """(description, params, expr, var) for ODEs with exact family solutions."""
    if ode in ("rssol", "rssollor"):
        p = {"c2": -1.0, "mu": 1.0, "lam": 0.3, "alpha": 1.0, "beta": 2.0}
        p.update(params)
        sign = 1.0 if ode == "rssol" else -1.0
        expr = (f"{sign * 2.0 * p['lam'] / p['mu']!r}*y"
                f" + ({p['alpha']!r})*exp(-({p['mu']!r})*y/({p['c2']!r}))"
                f" + ({p['beta']!r})")
        return f"exact family A(y) for ({ode})", p, expr, "y"
    if ode in ("c11ode", "lorode"):
        p = {"c2": 0.7, "lam": 0.4, "alpha": -1.0, "beta": 1.0}
        p.update(params)
        c2, lam = p["c2"], p["lam"]
        if c2 in (0.0, 1.0, -1.0):
            raise CliError(
                f"({ode}) exact comparison uses the generic power form; "
                "pick c2 outside {0, 1, -1}"
            )
        s = 1.0 if ode == "c11ode" else -1.0
        expr = (f"({p['alpha'] * c2 / (c2 - 1.0)!r})*z^({(c2 - 1.0) / c2!r})"
                f" + ({s * lam / (c2 + 1.0)!r})*z^2 + ({p['beta']!r})")
        return f"exact family A(z) for ({ode})", p, expr, "z"
    if ode == "psy":
        p = {"s": 2.0}
        p.update(params)
        return "exact conformal factor f = s log x", p, f"({p['s']!r})*log(x)", "x"
    if ode == "czw1":
        p = {"a": 2.0, "b": 0.5}
        p.update(params)
        expr = f"-log(({p['a']!r}) - ({p['b']!r})*x)/({p['b']!r})"
        return "exact f with f''/f'^2 constant", p, expr, "x"
    if ode == "By":
        p = {"c2": 0.5, "a": 1.0, "s": 0.5, "c": 0.3}
        p.update(params)
        if p["c2"] != 0.5:
            raise CliError("(By) exact comparison uses the c2 = 1/2 closed form")
        expr = (f"-sqrt({2.0 * p['a'] * p['s']!r})"
                f"*tanh(sqrt({p['a']!r})*(y+({p['c']!r}))/sqrt({2.0 * p['s']!r}))")
        return "exact tanh branch of (By) at c2 = 1/2", p, expr, "y"
    return None


def _cmd_ode_compare(args) -> int:
    params = _parse_params(args.params)
    span = (
        tuple(float(v) for v in args.span.split(","))
        if args.span
        else None
    )
    if span is not None and len(span) != 2:
        raise CliError(f"bad --span {args.span!r}; expected a,b")
    tol = args.tol
    samples = args.samples
    rows = []

    if args.ode in ("legqe", "legqelo"):
        variant = "riem" if args.ode == "legqe" else "lor"
        p = {"c2": 0.5, "beta": 0.3, "gamma": 1.5}
        p.update(params)
        c2 = p["c2"]
        if c2 not in (0.5, -1.0):
            raise CliError(
                f"({args.ode}) numeric-vs-closed comparison needs c2 in "
                "{0.5, -1} (the elementary closed forms)"
            )
        lo, hi = span if span else ((-3.0, 3.0) if variant == "riem" else (-0.9, 0.9))
        desc = f"({args.ode}) numeric integration vs closed form, c2={c2:g}"
        def scalar(v):
            return float(v.value) if isinstance(v, jets.Jet) else float(v)

        for i in range(samples):
            z = lo + (hi - lo) * i / (samples - 1)
            closed = scalar(reductions.legendre_B(
                c2, z, p["beta"], p["gamma"], variant=variant))
            numeric = scalar(reductions.legendre_B(
                c2, z, p["beta"], p["gamma"], variant=variant, method="numeric"))
            rows.append((z, abs(numeric - closed)))
    elif args.ode in ("trz", "czw"):
        p = {"a": 0.3, "lam": 0.7, "f0": 0.1, "df0": 0.8, "ddf0": -0.3}
        p.update(params)
        a, lam = p["a"], p["lam"]

        def rhs(x, state):
            f, f1, f2 = state
            ef = jets.exp(2.0 * f) if isinstance(f, jets.Jet) else math.exp(2.0 * f)
            f3 = (f2 * f2 - (a * ef - 2.0 * f1 * f1 - lam * ef) * f2
                  + a * ef * f1 * f1) / f1
            return (f1, f2, f3)

        lo, hi = span if span else (0.0, 1.0)
        traj = reductions.integrate(reductions.OdeProblem(
            rhs=rhs, y0=(p["f0"], p["df0"], p["ddf0"]), span=(lo, hi), tol=1e-12))
        desc = "(trz) trajectory plugged into the (czw) first integral"
        pad = 0.02 * (hi - lo)
        for i in range(samples):
            x = (lo + pad) + (hi - lo - 2 * pad) * i / (samples - 1)
            fj = traj.jet(x, order=5)
            rows.append((x, abs(reductions.ode_residual("czw", fj, {"lam": lam}, x))))
    elif args.ode == "legr":
        p = {"c2": 0.5, "lam": 0.3, "alpha": 1.0, "b0": 1.5, "db0": 0.6}
        p.update(params)
        c2 = p["c2"]
        if c2 in (0.0, -1.0):
            raise CliError("(legr) needs c2 outside {0, -1}")
        Bf = catalog._legendre_field(c2, p["b0"], p["db0"], "riem")
        e_g = (2.0 * c2 - 1.0) / (4.0 * c2)
        shift = p["lam"] * p["alpha"] ** 2 / (1.0 + c2)
        lo, hi = span if span else (-1.5, 1.5)
        desc = "exact family A(z) for (legr) via the almost-Legendre reduction"
        for i in range(samples):
            z = lo + (hi - lo) * i / (samples - 1)
            zj = jets.jet_variable(0, z, 2, 1)
            w = 1.0 + zj * zj
            fj = jets.jet_pow(w, e_g) * Bf(zj) + shift * w
            rows.append((z, abs(reductions.ode_residual("legr", fj, p, z))))
    elif args.ode == "by_log":
        p = {"a": 1.0, "s": 0.5, "b0": 2.0}
        p.update(params)
        a, s = p["a"], p["s"]

        def rhs(y, state):
            B = state[0]
            lg = jets.log(B) if isinstance(B, jets.Jet) else math.log(B)
            return (2.0 * a * lg - s,)

        lo, hi = span if span else (0.0, 1.0)
        traj = reductions.integrate(reductions.OdeProblem(
            rhs=rhs, y0=(p["b0"],), span=(lo, hi), tol=1e-12))
        desc = "(by_log) trajectory self-consistency"
        pad = 0.02 * (hi - lo)
        for i in range(samples):
            y = (lo + pad) + (hi - lo - 2 * pad) * i / (samples - 1)
            fj = traj.jet(y, order=2)
            rows.append((y, abs(reductions.ode_residual("by_log", fj, p, y))))
    else:
        table = _ode_exact_table(args.ode, params)
        if table is None:
            known = ", ".join(reductions.ODE_IDS)
            raise CliError(
                f"no comparison recipe for ODE {args.ode!r}; known ids: {known}")
        desc, p, expr, var = table
        if span is None:
            span = {"z": (0.3, 1.5), "x": (0.5, 2.0)}.get(var, (-1.0, 1.0))
        lo, hi = span
        order = 4 if args.ode in ("psy", "czw1") else 2
        for i in range(samples):
            v = lo + (hi - lo) * i / (samples - 1)
            fj = _closed_form_jet(expr, var, v, order)
            rows.append((v, abs(reductions.ode_residual(args.ode, fj, p, v))))

    worst = max(err for _, err in rows)
    print(desc)
    print(f"  {len(rows)} samples, max deviation = {worst:.3e} "
          f"(bound {10.0 * tol:.1e})")
    ok = worst <= 10.0 * tol
    print("PASS" if ok else "FAIL")
    payload = {
        "ode": args.ode,
        "samples": [{"point": pt, "deviation": err} for pt, err in rows],
        "max_deviation": worst,
        "tolerance": tol,
        "pass": ok,
    }
    if args.json:
        _write_json(args.json, payload)
    if args.csv:
        _write_csv(args.csv, ["point", "deviation"], rows)
    return EXIT_OK if ok else EXIT_FAIL


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------


def _add_output_flags(sub) -> None:
    sub.add_argument("--json", metavar="PATH", help="write a JSON report")
    sub.add_argument("--csv", metavar="PATH", help="write a CSV mirror")


def _add_metric_flags(sub) -> None:
    sub.add_argument("--metric", required=True,
                     help='semicolon-separated upper-triangle components, e.g. "A;0;1/A"')
    sub.add_argument("--coords", required=True, help="comma-separated names, e.g. x,y")
    sub.add_argument("--c1", type=float, required=True)
    sub.add_argument("--c2", type=float, required=True)
    sub.add_argument("--lambda", dest="lam", type=float, required=True)
    sub.add_argument("--mode", default="gradient",
                     choices=("gradient", "ricci", "homothety", "nd"))
    sub.add_argument("--branch", default="rho", choices=("rho", "nu"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groliton",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("list", help="registered families and ODE ids")
    sub.add_argument("--json", metavar="PATH", help="write the registry as JSON")
    sub.set_defaults(func=_cmd_list)

    sub = commands.add_parser("verify", help="residual report of a catalog family")
    sub.add_argument("--family", required=True)
    sub.add_argument("--params", help="comma-separated name=value overrides")
    sub.add_argument("--grid", help="samples per axis, e.g. 21x21")
    sub.add_argument("--box", help="axis ranges lo:hi,lo:hi (default: the family box)")
    sub.add_argument("--checks", help="comma-separated subset of grs,prolonged,constraint")
    _add_output_flags(sub)
    sub.set_defaults(func=_cmd_verify)

    sub = commands.add_parser("obstruct",
                              help="obstruction of a forced candidate on a user metric")
    _add_metric_flags(sub)
    sub.add_argument("--box", help="axis ranges lo:hi,lo:hi")
    sub.add_argument("--grid", help="samples per axis (default 5 per axis)")
    sub.add_argument("--point", help="single point p1,p2[,p3] instead of a box")
    _add_output_flags(sub)
    sub.set_defaults(func=_cmd_obstruct)

    sub = commands.add_parser("candidate",
                              help="candidate vector field at a single point")
    _add_metric_flags(sub)
    sub.add_argument("--point", required=True, help="evaluation point p1,p2[,p3]")
    sub.add_argument("--json", metavar="PATH", help="write a JSON report")
    sub.set_defaults(func=_cmd_candidate)

    sub = commands.add_parser("scan", help="parameter sweep of a catalog family")
    sub.add_argument("--family", required=True)
    sub.add_argument("--param", required=True, help="sweep spec name=lo:hi:N")
    sub.add_argument("--params", help="fixed name=value overrides")
    sub.add_argument("--grid", help="verification grid per value (default 7 per axis)")
    _add_output_flags(sub)
    sub.set_defaults(func=_cmd_scan)

    sub = commands.add_parser("ode-compare",
                              help="numeric-vs-closed-form reduction ODE checks")
    sub.add_argument("--ode", required=True)
    sub.add_argument("--params", help="comma-separated name=value overrides")
    sub.add_argument("--span", help="comparison interval a,b")
    sub.add_argument("--tol", type=float, default=1e-7,
                     help="tolerance T; the pass bound is 10*T")
    sub.add_argument("--samples", type=int, default=25)
    _add_output_flags(sub)
    sub.set_defaults(func=_cmd_ode_compare)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, catalog.CatalogError, reductions.OdeError,
            GeometryError, exprs.ExprSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
