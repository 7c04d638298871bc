"""Command line entry point.

Subcommands: verify (run named checks against a config and report verdicts),
solve (run one of the iteration schemes and write a CSV trace), fixtures
(replay the shipped reference instances), and search (sweep a coefficient to
bracket where a check starts to fail).  Exit codes are 0 when everything
requested holds or converges, 1 when a check is falsified or an iteration
fails to converge, and 2 on configuration or usage errors.  Output depends
only on the inputs, so reruns are byte identical.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from typing import Optional

from .config import ConfigError, Instance, load_instance
from .expr import EvalError, ParseError
from .gspace import (
    CheckReport,
    GSpaceError,
    NoProximalMate,
    Point,
    check_convex_structure,
    check_semi_sharp,
    check_side_condition,
    check_starshaped,
    convex_condition_sides,
    eval_g,
    falsify_axiom,
    proximal_core,
)
from .fixtures import run_fixtures
from .properties import (
    PropertyReport,
    check_banach_contraction,
    check_proximal_inequality,
    estimate_coefficient,
    estimate_proximal_coefficient,
    proximal_sides,
)
from .solvers import (
    Schedule,
    berinde_scheme,
    picard,
    power_fixed_point,
    proximal_iterate,
    write_trace_csv,
)

EXIT_OK = 0
EXIT_FALSIFIED = 1
EXIT_ERROR = 2

_AXIOM_KINDS = ("identity", "symmetry", "triangle")
_CHECK_KINDS = _AXIOM_KINDS + (
    "axioms",
    "banach",
    "proximal-weak",
    "berinde",
    "convex",
    "starshaped",
    "semi-sharp",
    "side-condition",
)


class CheckSpecError(ValueError):
    pass


def parse_check_spec(text: str) -> tuple[str, Optional[str], dict[str, str]]:
    """Parse "kind[:gauge][:key=value]..." into its parts."""
    parts = text.split(":")
    kind = parts[0]
    if kind not in _CHECK_KINDS:
        raise CheckSpecError(
            f"unknown check kind {kind!r}; expected one of {', '.join(_CHECK_KINDS)}"
        )
    target: Optional[str] = None
    params: dict[str, str] = {}
    for part in parts[1:]:
        if "=" in part:
            key, _, value = part.partition("=")
            params[key] = value
        elif target is None:
            target = part
        else:
            raise CheckSpecError(f"unexpected token {part!r} in check {text!r}")
    return kind, target, params


def _point_from_text(text: str, dimension: int) -> Point:
    body = text.strip().strip("()")
    coords = tuple(float(part) for part in body.split(",") if part.strip())
    if len(coords) != dimension:
        raise CheckSpecError(
            f"point {text!r} has {len(coords)} coordinates, expected {dimension}"
        )
    return Point(coords)


def _default_scan_set(inst: Instance):
    return next(iter(inst.sets.values()))


def _union_of_sets(inst: Instance):
    sets = list(inst.sets.values())
    out = sets[0]
    for s in sets[1:]:
        out = out.union(s)
    return out


def run_check(inst: Instance, spec_text: str, seed: int = 0):
    """Run one named check; returns a CheckReport or PropertyReport."""
    kind, target, params = parse_check_spec(spec_text)
    tol = inst.tol
    if kind in _AXIOM_KINDS:
        gauge = inst.gauge(target or "g")
        scan = inst.set_(params["set"]) if "set" in params else _default_scan_set(inst)
        return falsify_axiom(kind, gauge, scan, tol)
    if kind == "banach":
        gauge = inst.gauge(target or "g")
        t = inst.map_(params.get("map"))
        if "alpha" not in params:
            raise CheckSpecError("banach check needs alpha=<value in (0,1)>")
        return check_banach_contraction(
            gauge, t, float(params["alpha"]), tol, seed=seed
        )
    if kind in ("proximal-weak", "berinde"):
        gauge = inst.gauge(target or "g")
        f = inst.map_(params.get("map"))
        a = inst.set_(params.get("A", "A"))
        b = inst.set_(params.get("B", "B"))
        if kind == "berinde":
            beta = 1.0
        else:
            if "beta" not in params:
                raise CheckSpecError("proximal-weak check needs beta=<value>")
            beta = float(params["beta"])
        n_cap = float(params.get("N", 0.0))
        core = proximal_core(gauge, a, b, tol)
        return check_proximal_inequality(
            gauge, f, a, b, beta, n_cap, core, tol, seed=seed
        )
    if kind == "convex":
        gauge = inst.gauge(target or "g")
        cv = _need_convex(inst)
        scan = inst.set_(params["set"]) if "set" in params else _union_of_sets(inst)
        return check_convex_structure(
            cv.h, gauge, scan, cv.lambda_grid, tol, seed=seed
        )
    if kind == "starshaped":
        cv = _need_convex(inst)
        if target is None and "set" not in params:
            raise CheckSpecError("starshaped check needs a set name")
        scan = inst.set_(params.get("set", target))
        centre = cv.r if params.get("center", "r") == "r" else cv.s
        return check_starshaped(cv.h, scan, centre, cv.lambda_grid, tol)
    if kind == "semi-sharp":
        gauge = inst.gauge(target or "g")
        a = inst.set_(params.get("A", "A"))
        b = inst.set_(params.get("B", "B"))
        core = proximal_core(gauge, a, b, tol)
        return check_semi_sharp(gauge, a, b, core, tol)
    if kind == "side-condition":
        gauge = inst.gauge(target or "g")
        cv = _need_convex(inst)
        a = inst.set_(params.get("A", "A"))
        b = inst.set_(params.get("B", "B"))
        core = proximal_core(gauge, a, b, tol)
        return check_side_condition(gauge, core, cv.r, cv.s, tol)
    if kind == "axioms":
        raise AssertionError("expanded by the caller")
    raise CheckSpecError(f"unhandled check kind {kind!r}")


def _need_convex(inst: Instance):
    if inst.convex is None:
        raise CheckSpecError("this check needs a 'convex' block in the config")
    return inst.convex


def _expand_specs(specs: list[str]) -> list[str]:
    out = []
    for text in specs:
        kind, target, params = parse_check_spec(text)
        if kind == "axioms":
            suffix = text[len("axioms"):]
            out.extend(k + suffix for k in _AXIOM_KINDS)
        else:
            out.append(text)
    return out


def _witness_to_json(witness) -> Optional[dict]:
    if witness is None:
        return None
    out = {}
    for key, value in witness.items():
        out[key] = list(value.coords) if isinstance(value, Point) else value
    return out


def _report_entry(spec_text: str, report) -> dict:
    entry = {
        "spec": spec_text,
        "check": report.check,
        "verdict": report.verdict,
        "witness": _witness_to_json(report.witness),
        "lhs": report.lhs,
        "rhs": report.rhs,
    }
    if isinstance(report, PropertyReport):
        entry["beta"] = report.beta
        entry["n_cap"] = report.n_cap
        entry["vacuous"] = report.vacuous
    if isinstance(report, CheckReport) and report.note:
        entry["note"] = report.note
    return entry


def _witness_points(entry: dict) -> dict:
    out = {}
    for key, value in (entry.get("witness") or {}).items():
        out[key] = Point(tuple(value)) if isinstance(value, list) else float(value)
    return out


def replay_entry(inst: Instance, entry: dict) -> tuple[Optional[float], Optional[float]]:
    """Recompute the two sides of a reported witness from the same config."""
    kind, target, params = parse_check_spec(entry["spec"])
    wit = _witness_points(entry)
    if not wit:
        return None, None
    gauge = inst.gauge(target or "g")
    tol = inst.tol
    if kind == "identity":
        return abs(eval_g(gauge, wit["x"], wit["y"])), tol.eps_zero
    if kind == "symmetry":
        return (
            abs(abs(eval_g(gauge, wit["x"], wit["y"]))
                - abs(eval_g(gauge, wit["y"], wit["x"]))),
            tol.eps_ineq,
        )
    if kind == "triangle":
        lhs = abs(eval_g(gauge, wit["x"], wit["z"]))
        rhs = abs(eval_g(gauge, wit["x"], wit["y"])) + abs(
            eval_g(gauge, wit["y"], wit["z"])
        )
        return lhs, rhs
    if kind == "banach":
        t = inst.map_(params.get("map"))
        lhs = abs(eval_g(gauge, t.apply(wit["x"]), t.apply(wit["y"])))
        rhs = float(params["alpha"]) * abs(eval_g(gauge, wit["x"], wit["y"]))
        return lhs, rhs
    if kind in ("proximal-weak", "berinde"):
        beta = 1.0 if kind == "berinde" else float(params["beta"])
        return proximal_sides(gauge, wit, beta, float(params.get("N", 0.0)))
    if kind == "convex":
        return convex_condition_sides(_need_convex(inst).h, gauge, wit)
    if kind == "side-condition":
        cv = _need_convex(inst)
        a = inst.set_(params.get("A", "A"))
        b = inst.set_(params.get("B", "B"))
        core = proximal_core(gauge, a, b, tol)
        inner = proximal_core(gauge, core.a_g, core.b_g, tol)
        lhs = abs(eval_g(gauge, cv.r, wit["x"])) + abs(
            eval_g(gauge, wit["y"], cv.s)
        )
        return lhs, 2.0 * inner.d_g
    if kind == "semi-sharp":
        a = inst.set_(params.get("A", "A"))
        b = inst.set_(params.get("B", "B"))
        core = proximal_core(gauge, a, b, tol)
        return abs(eval_g(gauge, wit["a"], wit["b2"])), core.d_g
    if kind == "starshaped":
        cv = _need_convex(inst)
        centre = cv.r if params.get("center", "r") == "r" else cv.s
        image = cv.h.apply(centre, wit["x"], wit["lam"])
        return (0.0, 0.0) if image == wit["image"] else (1.0, 0.0)
    raise CheckSpecError(f"cannot replay check kind {kind!r}")


def _apply_tol_overrides(inst: Instance, args) -> Instance:
    tol = inst.tol
    if getattr(args, "tol_prox", None) is not None:
        tol = replace(tol, eps_prox=args.tol_prox)
    if getattr(args, "tol_zero", None) is not None:
        tol = replace(tol, eps_zero=args.tol_zero)
    inst.tol = tol
    return inst


def _emit(doc: dict, args) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    if getattr(args, "json", False):
        sys.stdout.write(text)


def cmd_verify(args) -> int:
    inst = _apply_tol_overrides(load_instance(args.config), args)
    specs = _expand_specs(args.checks)
    entries = []
    any_falsified = False
    for spec_text in specs:
        report = run_check(inst, spec_text, seed=args.seed)
        entries.append(_report_entry(spec_text, report))
        falsified = report.verdict == "falsified"
        any_falsified = any_falsified or falsified
        if not args.json:
            mark = "FALSIFIED" if falsified else "holds-on-sample"
            extra = ""
            if getattr(report, "vacuous", False):
                extra = "  [vacuous: no qualifying quadruples]"
            print(f"{spec_text:<48} {mark}{extra}")
            if falsified:
                print(f"    witness: {_witness_to_json(report.witness)}")
                print(f"    lhs: {report.lhs!r}  rhs: {report.rhs!r}")
    doc = {"checks": entries, "falsified": any_falsified}
    _emit(doc, args)
    if args.replay:
        with open(args.replay) as fh:
            previous = json.load(fh)
        ok = True
        for entry in previous["checks"]:
            lhs, rhs = replay_entry(inst, entry)
            if lhs is None:
                continue
            same = (lhs == entry["lhs"]) and (rhs == entry["rhs"])
            ok = ok and same
            if not args.json:
                state = "reproduced" if same else "MISMATCH"
                print(f"replay {entry['spec']:<40} {state}")
        if not ok:
            return EXIT_FALSIFIED
    return EXIT_FALSIFIED if any_falsified else EXIT_OK


def cmd_solve(args) -> int:
    inst = _apply_tol_overrides(load_instance(args.config), args)
    tol = inst.tol
    g = inst.gauge(args.gauge) if args.gauge else inst.g
    scheme = args.scheme
    if scheme in ("picard", "power"):
        u = inst.map_(args.map)
        if args.from_point is None:
            raise CheckSpecError("--from is required for this scheme")
        p0 = _point_from_text(args.from_point, inst.dimension)
        alpha = args.alpha
        if alpha is None:
            est = estimate_coefficient(g, u, tol, seed=args.seed)
            if not 0.0 < est < 1.0:
                raise CheckSpecError(
                    f"no usable coefficient estimate ({est!r}); pass --alpha"
                )
            alpha = min(est + 1e-9, 0.999999999)
        if scheme == "picard":
            trace = picard(g, u, p0, alpha, tol, args.max_iter)
        else:
            trace = power_fixed_point(g, u, args.n0, p0, alpha, tol, args.max_iter)
        summary = {
            "scheme": scheme,
            "verdict": trace.verdict,
            "steps": trace.steps,
            "final": list(trace.final.coords),
            "certificate_residual": trace.certificate_residual,
            "alpha": alpha,
        }
    elif scheme == "proximal":
        f = inst.map_(args.map)
        a, b = f.domain, f.codomain
        core = proximal_core(g, a, b, tol)
        p0 = (
            _point_from_text(args.from_point, inst.dimension)
            if args.from_point
            else core.a_g.points[0]
        )
        trace = proximal_iterate(g, f, a, b, core, p0, tol, args.max_iter)
        summary = {
            "scheme": scheme,
            "verdict": trace.verdict,
            "steps": trace.steps,
            "final": list(trace.final.coords),
            "certificate_residual": trace.certificate_residual,
            "proximity_level": core.d_g,
        }
    elif scheme == "berinde":
        f = inst.map_(args.map)
        cv = _need_convex(inst)
        sched = inst.schedule or Schedule.harmonic(10)
        if args.stages:
            sched = Schedule.harmonic(args.stages)
        result = berinde_scheme(
            g, f, f.domain, f.codomain, cv.h, cv.r, cv.s, sched, tol,
            max_iter=args.max_iter,
            lambda_grid=cv.lambda_grid,
            skip_side_condition=args.skip_side_condition,
            seed=args.seed,
        )
        trace = result.trace
        summary = {
            "scheme": scheme,
            "verdict": result.verdict,
            "stages": len(result.stages),
            "final": list(result.final.coords),
            "certificate_residual": result.residual,
            "hypotheses": [
                {"name": item.name, "passed": item.passed, "vacuous": item.vacuous}
                for item in result.battery
            ],
        }
        if not args.json:
            for item in result.battery:
                state = "ok" if item.passed else "WARNING: failed on sample"
                extra = " (vacuous)" if item.vacuous else ""
                print(f"hypothesis {item.name:<24} {state}{extra}")
    else:
        raise CheckSpecError(f"unknown scheme {scheme!r}")
    if args.trace:
        write_trace_csv(trace, args.trace)
    if not args.json:
        print(
            f"{scheme}: {summary['verdict']}, final {summary['final']}, "
            f"certificate residual {summary['certificate_residual']!r}"
        )
    _emit(summary, args)
    return EXIT_OK if summary["verdict"] == "converged" else EXIT_FALSIFIED


def cmd_fixtures(args) -> int:
    reports = run_fixtures(args.pattern)
    if not reports:
        print(f"no fixtures match pattern {args.pattern!r}")
        return EXIT_OK
    all_ok = True
    rows = []
    for rep in reports:
        for o in rep.outcomes:
            rows.append((rep.name, o.label, o.provenance, o.passed, o.detail))
            all_ok = all_ok and o.passed
    if args.json:
        doc = {
            "fixtures": [
                {
                    "name": rep.name,
                    "passed": rep.passed,
                    "expectations": [
                        {
                            "label": o.label,
                            "provenance": o.provenance,
                            "passed": o.passed,
                            "detail": o.detail,
                        }
                        for o in rep.outcomes
                    ],
                }
                for rep in reports
            ],
            "passed": all_ok,
        }
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        width = max(len(r[0]) for r in rows)
        for name, label, provenance, passed, detail in rows:
            mark = "PASS" if passed else "FAIL"
            print(f"{mark}  {name:<{width}}  {label}  [{provenance}]")
            if not passed and detail:
                print(f"      {detail}")
        total = sum(len(rep.outcomes) for rep in reports)
        print(
            f"{len(reports)} fixtures, {total} expectations, "
            f"{'all passed' if all_ok else 'FAILURES PRESENT'}"
        )
    return EXIT_OK if all_ok else EXIT_FALSIFIED


def cmd_search(args) -> int:
    inst = _apply_tol_overrides(load_instance(args.config), args)
    kind, target, params = parse_check_spec(args.check)
    gauge = inst.gauge(target or "g")
    tol = inst.tol
    rows = []
    if kind == "banach":
        t = inst.map_(params.get("map"))
        estimate = estimate_coefficient(gauge, t, tol, seed=args.seed)
        values = _sweep_values(args)
        for value in values:
            rep = check_banach_contraction(gauge, t, value, tol, seed=args.seed)
            rows.append((value, rep))
        label = "alpha"
    elif kind in ("proximal-weak", "berinde"):
        f = inst.map_(params.get("map"))
        a = inst.set_(params.get("A", "A"))
        b = inst.set_(params.get("B", "B"))
        n_cap = float(params.get("N", 0.0))
        core = proximal_core(gauge, a, b, tol)
        estimate = estimate_proximal_coefficient(
            gauge, f, a, b, n_cap, core, tol, seed=args.seed
        )
        for value in _sweep_values(args):
            rep = check_proximal_inequality(
                gauge, f, a, b, value, n_cap, core, tol, seed=args.seed
            )
            rows.append((value, rep))
        label = "beta"
    else:
        raise CheckSpecError("search sweeps banach, proximal-weak or berinde checks")
    doc = {
        "check": args.check,
        "estimate": estimate if math.isfinite(estimate) else "infinite",
        "sweep": [
            {label: value, "verdict": rep.verdict, "margin": rep.margin}
            for value, rep in rows
        ],
    }
    if not args.json:
        print(f"coefficient estimate on this sample: {doc['estimate']!r}")
        for value, rep in rows:
            print(f"{label}={value!r:<24} {rep.verdict}")
    _emit(doc, args)
    return EXIT_OK


def _sweep_values(args) -> list[float]:
    lo, hi, steps = args.lo, args.hi, args.steps
    if steps < 2:
        return [lo]
    return [lo + i * (hi - lo) / (steps - 1) for i in range(steps)]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gproxim",
        description=(
            "Fixed points and best proximity points under a bivariate gauge: "
            "run falsifier checks, iteration schemes and the fixture suite."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="instance config (JSON)")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for subsampled scans (default 0: even strides)")
        p.add_argument("--json", action="store_true",
                       help="machine-readable output on stdout")
        p.add_argument("--out", help="also write the JSON report to this path")
        p.add_argument("--tol-prox", type=float, dest="tol_prox",
                       help="override the proximity band")
        p.add_argument("--tol-zero", type=float, dest="tol_zero",
                       help="override the zero level")

    p = sub.add_parser("verify", help="run named checks against a config")
    common(p)
    p.add_argument("--checks", nargs="+", required=True,
                   metavar="KIND[:GAUGE][:KEY=VALUE]",
                   help="e.g. axioms:g banach:g:alpha=0.5 proximal-weak:g:beta=0.0625:N=0")
    p.add_argument("--replay", help="re-verify witnesses from a previous JSON report")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve", help="run an iteration scheme")
    common(p)
    p.add_argument("--scheme", required=True,
                   choices=("picard", "power", "proximal", "berinde"))
    p.add_argument("--map", help="map name (defaults to the only one)")
    p.add_argument("--gauge", help="gauge name (defaults to g)")
    p.add_argument("--from", dest="from_point",
                   help="start point, e.g. '(0,1)' or '1'")
    p.add_argument("--alpha", type=float, help="contraction coefficient")
    p.add_argument("--n0", type=int, default=2, help="composition power")
    p.add_argument("--stages", type=int, help="stage count for the staged scheme")
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--trace", help="write the iteration trace CSV here")
    p.add_argument("--skip-side-condition", action="store_true",
                   help="omit the two-centre side condition from the battery")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("fixtures", help="replay the shipped reference instances")
    p.add_argument("pattern", nargs="?", default="*", help="glob over fixture names")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fixtures)

    p = sub.add_parser("search", help="sweep a coefficient against a check")
    common(p)
    p.add_argument("--check", required=True,
                   help="banach:g[:map=T] or proximal-weak:g[:N=0]")
    p.add_argument("--lo", type=float, default=0.05)
    p.add_argument("--hi", type=float, default=0.95)
    p.add_argument("--steps", type=int, default=10)
    p.set_defaults(func=cmd_search)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CheckSpecError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (GSpaceError, EvalError, OSError) as exc:
        if isinstance(exc, NoProximalMate):
            print(f"no proximity mate: {exc}", file=sys.stderr)
            return EXIT_FALSIFIED
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
