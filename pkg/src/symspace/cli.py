"""Command-line front end.

Exit codes: 0 success / positive verdict, 1 negative verdict, 2 usage or
parse error, 3 inconclusive.
"""
from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import (
    AmbiguityError,
    InvalidInputError,
    NumericalAmbiguityError,
    PropertyViolationError,
    UnsupportedError,
)
from .geometry import double_ngon_solve, midpoint, transvection_placement
from .lts import (
    LtsStructure,
    is_solvable,
    loads_lts,
    roots,
    solvable_exponentiality,
    standard_embedding,
    verify_lts_axioms,
)
from .models import MODEL_SELECTORS, space_from_selector
from .newton import UNIQUE
from .spectral import locally_exponential_sample_test
from .svg import polygons_svg
from .verify import all_pass, verify_lts, verify_space

OK, NEGATIVE, USAGE, INCONCLUSIVE = 0, 1, 2, 3
FIXTURES = ("ex5", "ex6", "sphere2", "hyperbolic2")


class UsageError(Exception):
    pass


def fixture_text(name: str) -> str | None:
    stem = name[:-5] if name.endswith(".json") else name
    if stem not in FIXTURES:
        return None
    return resources.files("symspace").joinpath("fixtures", f"{stem}.json").read_text()


def read_lts(source: str) -> LtsStructure:
    """Load from a path, a shipped fixture name, or inline JSON."""
    path = Path(source)
    if path.is_file():
        text = path.read_text()
    elif (text := fixture_text(source)) is None:
        if source.lstrip().startswith("{"):
            text = source
        else:
            raise UsageError(f"no such Lts file or fixture: {source}")
    try:
        return loads_lts(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{source}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}")


def parse_point(text: str, dim: int) -> np.ndarray:
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"cannot parse point {text!r} (line {exc.lineno}, column {exc.colno})")
    p = np.atleast_1d(np.asarray(value, dtype=float))
    if p.shape != (dim,):
        raise UsageError(f"point {text!r} needs {dim} chart coordinates")
    return p


def _num(v) -> str:
    return f"{float(v):.12g}"


def _fmt_point(p) -> str:
    p = np.atleast_1d(p)
    return _num(p[0]) if p.size == 1 else "(" + ", ".join(_num(v) for v in p) + ")"


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _emit(args, payload: dict, text_lines: list) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True, indent=2, default=_jsonable))
    else:
        print("\n".join(text_lines))


def _space(args):
    if not args.space:
        raise UsageError("--space is required for this command")
    return space_from_selector(args.space)


def _points(space, texts):
    charts = np.array([parse_point(t, space.dim) for t in texts])
    pts = space._from_chart(charts)
    if not np.all(np.isfinite(pts)):
        raise UsageError("a point lies outside the chart domain")
    return space.validate(pts)


def _solver(args):
    out = {"seed": args.seed, "max_iter": args.max_iter}
    if args.tol is not None:
        out["tol"] = args.tol
    if args.starts is not None:
        out["starts"] = args.starts
    return out


# -- commands -----------------------------------------------------------------


def cmd_lts_check(args) -> int:
    lts = read_lts(args.lts)
    if args.tol is not None:
        lts = LtsStructure(lts.constants, args.tol)
    report = verify_lts_axioms(lts)
    solvable = is_solvable(lts) if report.ok else None
    payload = {
        "dim": lts.dim,
        "residuals": report.residuals,
        "passed": report.passed,
        "ok": report.ok,
        "solvable": solvable,
    }
    lines = [f"dim: {lts.dim}"]
    for name, r in report.residuals.items():
        lines.append(f"{name}: {'pass' if report.passed[name] else 'FAIL'} (residual {r:.3g})")
    if report.ok:
        lines.append(f"solvable: {str(solvable).lower()}")
    else:
        lines.append("violated axioms: " + ", ".join(report.failed))
    _emit(args, payload, lines)
    return OK if report.ok else NEGATIVE


def cmd_embed(args) -> int:
    lts = read_lts(args.lts)
    emb = standard_embedding(lts)
    payload = {
        "dim_m": emb.dim_m,
        "dim_h": emb.dim_h,
        "jacobi_residual": emb.jacobi_residual(),
        "sigma_residual": emb.sigma_residual(),
        "lts_residual": emb.lts_residual(lts),
        "sigma": emb.sigma.tolist(),
        "bracket": emb.bracket.tolist(),
    }
    lines = [
        f"dim m: {emb.dim_m}",
        f"dim h: {emb.dim_h}",
        f"jacobi residual: {payload['jacobi_residual']:.3g}",
        f"round-trip residual: {payload['lts_residual']:.3g}",
    ]
    _emit(args, payload, lines)
    return OK


def cmd_roots(args) -> int:
    lts = read_lts(args.lts)
    rs = roots(lts, seed=args.seed)
    payload = {"roots": [{"A": r.A.tolist(), "B": r.B.tolist(), "real": bool(r.is_real)} for r in rs]}
    lines = [f"{len(rs)} roots"]
    for k, r in enumerate(rs):
        lines.append(f"root {k}: A = {np.round(r.A, 12).tolist()}, B = {np.round(r.B, 12).tolist()}")
    _emit(args, payload, lines)
    return OK


def cmd_exponential(args) -> int:
    lts = read_lts(args.lts)
    report = verify_lts_axioms(lts)
    if not report.ok:
        raise InvalidInputError("Lts axioms fail: " + ", ".join(report.failed))
    if is_solvable(lts):
        v = solvable_exponentiality(lts, seed=args.seed, starts=args.starts or 64)
        payload = {
            "method": "roots",
            "exponential": v.exponential,
            "sampled": v.sampled,
            "assumes_simply_connected": v.assumes_simply_connected,
        }
        lines = [f"exponential: {str(v.exponential).lower()} (solvable; root criterion)"]
        if not v.exponential:
            payload.update(
                witness_root=v.witness_root,
                witness_x=v.witness_x.tolist(),
                witness_value=v.witness_value,
                witness_residual=v.witness_residual,
            )
            lines.append(
                f"witness: root {v.witness_root} at X = {_fmt_point(v.witness_x)} has value {_num(v.witness_value)}"
            )
        if v.sampled:
            lines.append("note: complex roots decided by sampling")
        lines.append("assumes a simply connected space")
        _emit(args, payload, lines)
        return OK if v.exponential else NEGATIVE
    v = locally_exponential_sample_test(lts, samples=args.starts or 256, seed=args.seed, tol=args.tol)
    payload = {"method": "sampling", "exponential": False if v.violated else None, "sampled": True}
    if v.violated:
        payload.update(witness_x=v.witness_x.tolist(), eigenvalue=v.eigenvalue, residual=v.residual)
        lines = [
            "exponential: false (not locally exponential)",
            f"witness: [., X, X] at X = {_fmt_point(v.witness_x)} has eigenvalue {_num(v.eigenvalue)}",
        ]
        _emit(args, payload, lines)
        return NEGATIVE
    lines = [f"exponential: inconclusive (not solvable; no violation in {v.samples} samples)"]
    _emit(args, payload, lines)
    return INCONCLUSIVE


def _result_payload(space, res, polygons=False):
    sols = res.solutions
    charts = [space._chart(s).tolist() for s in sols]
    out = res.to_json()
    out["solutions"] = charts
    out["space"] = space.name
    return out


TEXT_LIMIT = 10


def _listing(res, rendered) -> list:
    """Text lines for the solutions, shortened when the solution set is not isolated."""
    lines = []
    if not res.isolated:
        lines.append(f"solution set is not isolated; {res.count} sampled points found")
        rendered = rendered[:TEXT_LIMIT]
    lines += [f"{text} (residual {r:.2g})" for text, r in zip(rendered, res.residuals)]
    if len(lines) < res.count + (0 if res.isolated else 1):
        lines.append(f"... {res.count - TEXT_LIMIT} more (use --format json)")
    return lines


def cmd_midpoint(args) -> int:
    space = _space(args)
    if len(args.points) != 2:
        raise UsageError("midpoint takes exactly two points")
    x, y = _points(space, args.points)
    res = midpoint(space, x, y, **_solver(args))
    payload = _result_payload(space, res)
    lines = [f"status: {res.status}"]
    lines += _listing(res, [f"midpoint {_fmt_point(c)}" for c in payload["solutions"]])
    _emit(args, payload, lines)
    return OK if res.count else NEGATIVE


def cmd_double(args) -> int:
    space = _space(args)
    if len(args.points) % 2 == 0:
        raise UsageError(f"double polygons need an odd number of midpoints (got {len(args.points)})")
    mids = _points(space, args.points)
    res = double_ngon_solve(space, mids, **_solver(args))
    payload = _result_payload(space, res)
    lines = [f"status: {res.status}"]
    if "det_squared" in res.extra:
        lines.append(f"det^2 = {_num(res.extra['det_squared'])}")
    lines += _listing(res, ["solution " + " ".join(_fmt_point(p) for p in poly) for poly in payload["solutions"]])
    if not res.count:
        if "det_squared" in res.extra and res.extra["det_squared"] >= 1:
            lines.append(f"no double triangle (det^2 = {_num(res.extra['det_squared'])} >= 1)")
        else:
            lines.append("no double polygon found")
    if args.format == "svg":
        sys.stdout.write(polygons_svg(space, [mids] + list(res.solutions)))
    else:
        _emit(args, payload, lines)
    return OK if res.count else NEGATIVE


def cmd_place(args) -> int:
    space = _space(args)
    if len(args.points) != 1:
        raise UsageError("place takes exactly one point z")
    (z,) = _points(space, args.points)
    if (args.vector is None) == (args.matrix is None):
        raise UsageError("give exactly one of --vector or --matrix")
    if args.vector is not None:
        g = space.transvection(parse_point(args.vector, space.dim))
    else:
        try:
            g = np.asarray(json.loads(args.matrix), dtype=float)
        except json.JSONDecodeError as exc:
            raise UsageError(f"cannot parse --matrix (line {exc.lineno}, column {exc.colno})")
    res = transvection_placement(space, g, z, **_solver(args))
    payload = _result_payload(space, res)
    lines = [f"status: {res.status}"]
    lines += _listing(res, [f"x = {_fmt_point(c)}" for c in payload["solutions"]])
    _emit(args, payload, lines)
    return OK if res.status == UNIQUE else NEGATIVE if not res.count else INCONCLUSIVE


def cmd_verify(args) -> int:
    target = args.target or args.space or "all"
    summary = {}
    if target == "all":
        for sel in MODEL_SELECTORS:
            summary[sel] = verify_space(space_from_selector(sel), args.seed, args.tol)
        for name in FIXTURES:
            summary[f"{name}.json"] = verify_lts(read_lts(name), args.seed, args.tol)
    else:
        try:
            summary[target] = verify_space(space_from_selector(target), args.seed, args.tol)
        except InvalidInputError:
            summary[target] = verify_lts(read_lts(target), args.seed, args.tol)
    ok = all_pass(summary)
    payload = {"pass": ok, "seed": args.seed, "tol_override": args.tol, "results": summary}
    lines = []
    for name, suites in summary.items():
        for suite, entry in suites.items():
            flag = "pass" if entry["pass"] else "FAIL"
            lines.append(f"{name:14s} {suite:11s} {flag} (max residual {entry['max_residual']:.3g})")
    lines.append("all suites pass" if ok else "some suites FAIL")
    _emit(args, payload, lines)
    return OK if ok else NEGATIVE


def cmd_plot(args) -> int:
    space = _space(args)
    pts = _points(space, args.points)
    sys.stdout.write(polygons_svg(space, [pts]))
    return OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", help="euclidean:<n>, sphere:<n>, hyperbolic, ex5, ex6, group:sl2")
    common.add_argument("--tol", type=float, default=None, help="override tolerances")
    common.add_argument("--starts", type=int, default=None, help="multistart count")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-iter", type=int, default=100)
    common.add_argument("--format", choices=("text", "json", "svg"), default="text")

    parser = argparse.ArgumentParser(prog="symspace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    for name, func, help_text in (
        ("lts-check", cmd_lts_check, "check the Lie triple system axioms"),
        ("embed", cmd_embed, "build the standard embedding"),
        ("roots", cmd_roots, "roots of a solvable system"),
        ("exponential", cmd_exponential, "decide (local) exponentiality"),
    ):
        add(name, func, help_text).add_argument("lts", help="Lts JSON file, fixture name, or inline JSON")
    for name, func, help_text in (
        ("midpoint", cmd_midpoint, "all midpoints of two points"),
        ("double", cmd_double, "double polygon of odd-many midpoints"),
        ("plot", cmd_plot, "draw a polygon as SVG"),
    ):
        add(name, func, help_text).add_argument("points", nargs="+", help="JSON chart coordinates")
    p = add("place", cmd_place, "place a transvection by its midpoint")
    p.add_argument("points", nargs=1, help="the point z (JSON chart coordinates)")
    p.add_argument("--vector", help="g = exp of this tangent vector (JSON)")
    p.add_argument("--matrix", help="g as a JSON matrix")
    add("verify", cmd_verify, "run the property suites").add_argument(
        "target", nargs="?", help="space selector, Lts file or 'all'"
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (UnsupportedError, NumericalAmbiguityError, AmbiguityError, PropertyViolationError) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
