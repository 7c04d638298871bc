"""Constructive schemes: contraction iteration, its power variant, proximity
iteration for non-self maps, and the staged interpolation scheme.

Each run produces a Trace: the visited points, per-step gauge residuals, the
geometric a-priori bounds used as a stopping certificate, and a final-point
certificate residual.  Stopping combines the a-priori tail bound with the
step residual, whichever triggers first.  Runs are single threaded and
deterministic; independent runs may execute concurrently.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .gspace import (
    CheckReport,
    ConvexStructure,
    GFunction,
    GSpaceError,
    NoProximalMate,
    Point,
    ProximalCore,
    SampleSet,
    ToleranceSet,
    check_convex_structure,
    check_semi_sharp,
    check_side_condition,
    check_starshaped,
    eval_g,
    proximal_core,
    proximal_select,
)
from .properties import MapSpec, PropertyReport, check_proximal_inequality

__all__ = [
    "Trace",
    "Schedule",
    "IteratedMap",
    "StageMap",
    "StageReport",
    "BatteryItem",
    "BerindeResult",
    "DomainEscape",
    "picard",
    "power_fixed_point",
    "proximal_iterate",
    "berinde_scheme",
    "write_trace_csv",
]

DEFAULT_MAX_ITER = 10_000


class DomainEscape(GSpaceError):
    """An iterate left the sampled domain."""


@dataclass
class Trace:
    """Record of one solver run.

    step_residuals[k] is abs(g(p_k, p_{k+1})).  proximity_residuals[k] is the
    certificate residual at p_k: abs(g(p_k, U(p_k))) for self maps, and the
    distance of abs(g(p_k, f(p_k))) from the proximity level for non-self
    maps.  apriori_bounds[k] is the geometric tail bound from p_k.
    """

    points: list[Point]
    step_residuals: list[float]
    proximity_residuals: list[float]
    apriori_bounds: list[float]
    verdict: str  # "converged" | "max_iter" | "no_proximal_mate" | "post_check_failed"
    final: Point
    alpha: Optional[float] = None
    contraction_verified: bool = False
    certificate_residual: Optional[float] = None

    @property
    def residuals(self) -> list[float]:
        return self.step_residuals

    @property
    def steps(self) -> int:
        return len(self.points) - 1

    @property
    def converged(self) -> bool:
        return self.verdict == "converged"


def write_trace_csv(trace: Trace, path) -> None:
    """Write the trace as CSV: step, coordinates, step_residual,
    proximity_residual, apriori_bound."""
    d = trace.points[0].dimension
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["step"]
            + [f"x{i}" for i in range(1, d + 1)]
            + ["step_residual", "proximity_residual", "apriori_bound"]
        )
        for k, p in enumerate(trace.points):
            step_res = (
                repr(trace.step_residuals[k]) if k < len(trace.step_residuals) else ""
            )
            prox_res = (
                repr(trace.proximity_residuals[k])
                if k < len(trace.proximity_residuals)
                else ""
            )
            bound = (
                repr(trace.apriori_bounds[k]) if k < len(trace.apriori_bounds) else ""
            )
            writer.writerow(
                [k] + [repr(c) for c in p.coords] + [step_res, prox_res, bound]
            )


@dataclass(frozen=True)
class Schedule:
    """Stage parameters a_1..a_K in (0, 1), non-increasing, tending to zero."""

    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values:
            raise GSpaceError("schedule needs at least one stage")
        prev = 1.0
        for v in self.values:
            if not 0.0 < v < 1.0:
                raise GSpaceError(f"schedule value {v!r} outside (0, 1)")
            if v > prev:
                raise GSpaceError("schedule must be non-increasing")
            prev = v

    @property
    def stages(self) -> int:
        return len(self.values)

    @classmethod
    def harmonic(cls, stages: int) -> "Schedule":
        """The default rule a_n = 1 / (n + 1)."""
        return cls(tuple(1.0 / (n + 1) for n in range(1, stages + 1)))


@dataclass(frozen=True)
class IteratedMap:
    """The n-fold composition of a self map, applied functionally."""

    base: MapSpec
    power: int

    def __post_init__(self):
        if self.power < 1:
            raise GSpaceError("power must be at least 1")

    @property
    def domain(self) -> SampleSet:
        return self.base.domain

    @property
    def codomain(self) -> SampleSet:
        return self.base.codomain

    @property
    def name(self) -> str:
        return f"{self.base.name}^{self.power}"

    def apply(self, p: Point) -> Point:
        for _ in range(self.power):
            p = self.base.apply(p)
        return p


@dataclass(frozen=True)
class StageMap:
    """One stage of the interpolation scheme: x maps to H(s, f(x), a_n)."""

    h: ConvexStructure
    s: Point
    f: MapSpec
    a_n: float

    @property
    def domain(self) -> SampleSet:
        return self.f.domain

    @property
    def codomain(self) -> SampleSet:
        return self.f.codomain

    @property
    def name(self) -> str:
        return f"H(s,{self.f.name},{self.a_n!r})"

    def apply(self, p: Point) -> Point:
        return self.h.apply(self.s, self.f.apply(p), self.a_n)


MapLike = Union[MapSpec, IteratedMap, StageMap]


def picard(
    g: GFunction,
    u: MapLike,
    p0: Point,
    alpha: float,
    tol: ToleranceSet,
    max_iter: int = DEFAULT_MAX_ITER,
) -> Trace:
    """Iterate p_{k+1} = U(p_k) until the geometric tail bound or the step
    residual falls below zero level.

    The tail bound after k + 1 steps is alpha^(k+1) / (1 - alpha) times the
    first step residual, which bounds every remaining gauge distance when U
    contracts at rate alpha.  Visited points are checked against the domain
    sample; an escaping iterate raises DomainEscape.
    """
    if not 0.0 < alpha < 1.0:
        raise GSpaceError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not u.domain.contains(p0, tol.eps_prox):
        raise DomainEscape(f"start point {p0} outside the sampled domain")
    points = [p0]
    step_res: list[float] = []
    verdict = "max_iter"
    r0 = None
    for k in range(max_iter):
        p = points[-1]
        q = u.apply(p)
        if not u.domain.contains(q, tol.eps_prox):
            raise DomainEscape(f"iterate {q} left the sampled domain at step {k + 1}")
        r = abs(eval_g(g, p, q))
        points.append(q)
        step_res.append(r)
        if r0 is None:
            r0 = r
        bound_next = alpha ** (k + 1) / (1.0 - alpha) * r0
        if r < tol.eps_zero or bound_next < tol.eps_zero:
            verdict = "converged"
            break
    r0 = r0 if r0 is not None else 0.0
    bounds = [alpha ** k / (1.0 - alpha) * r0 for k in range(len(points))]
    prox = [abs(eval_g(g, p, u.apply(p))) for p in points]
    verified = all(
        step_res[k + 1] <= alpha * step_res[k] + tol.eps_ineq
        for k in range(len(step_res) - 1)
    )
    return Trace(
        points=points,
        step_residuals=step_res,
        proximity_residuals=prox,
        apriori_bounds=bounds,
        verdict=verdict,
        final=points[-1],
        alpha=alpha,
        contraction_verified=verified,
        certificate_residual=prox[-1],
    )


def power_fixed_point(
    g: GFunction,
    u: MapSpec,
    n0: int,
    p0: Point,
    alpha: float,
    tol: ToleranceSet,
    max_iter: int = DEFAULT_MAX_ITER,
) -> Trace:
    """Run the contraction iteration on the n0-fold composition of U, then
    certify the result against U itself.

    The composed map may contract even when U does not.  After convergence
    the base-map residual abs(g(U(final), final)) is stored as the
    certificate; exceeding ten times zero level downgrades the verdict to
    "post_check_failed".  n0 = 1 reduces exactly to the plain iteration.
    """
    if n0 < 1:
        raise GSpaceError(f"n0 must be at least 1, got {n0}")
    composed = IteratedMap(u, n0) if n0 > 1 else u
    trace = picard(g, composed, p0, alpha, tol, max_iter)
    base_res = abs(eval_g(g, u.apply(trace.final), trace.final))
    trace.certificate_residual = base_res
    if trace.verdict == "converged" and base_res > 10.0 * tol.eps_zero:
        trace.verdict = "post_check_failed"
    return trace


def _prox_residual(
    g: GFunction, f: MapLike, p: Point, d_g: float
) -> float:
    return abs(abs(eval_g(g, p, f.apply(p))) - d_g)


def proximal_iterate(
    g: GFunction,
    f: MapLike,
    a: SampleSet,
    b: SampleSet,
    core: ProximalCore,
    p0: Point,
    tol: ToleranceSet,
    max_iter: int = DEFAULT_MAX_ITER,
    check_image: bool = True,
) -> Trace:
    """Iterate the proximity selection p_{k+1} realising the level against
    f(p_k), until both the step residual and the proximity residual vanish.

    The start point must realise the proximity level itself, and (by default)
    every realising point must have a selectable image, mirroring the
    requirement that f maps the realising set into its partner.  A selection
    failing mid-run ends the trace with verdict "no_proximal_mate".
    """
    best0 = min(abs(abs(eval_g(g, p0, y)) - core.d_g) for y in b.points)
    if best0 > tol.eps_prox:
        raise GSpaceError(
            f"start point {p0} does not realise the proximity level "
            f"(residual {best0!r})"
        )
    if check_image:
        for x in core.a_g.points:
            try:
                proximal_select(g, a, f.apply(x), core, tol)
            except NoProximalMate:
                raise NoProximalMate(
                    f"image of realising point {x} has no proximity mate; "
                    f"the map does not send the realising set into its partner"
                ) from None
    points = [p0]
    step_res: list[float] = []
    prox_res = [_prox_residual(g, f, p0, core.d_g)]
    verdict = "max_iter"
    for _ in range(max_iter):
        p = points[-1]
        try:
            q = proximal_select(g, a, f.apply(p), core, tol)
        except NoProximalMate:
            verdict = "no_proximal_mate"
            break
        r = abs(eval_g(g, p, q))
        points.append(q)
        step_res.append(r)
        prox_res.append(_prox_residual(g, f, q, core.d_g))
        if r <= tol.eps_zero and prox_res[-1] <= tol.eps_prox:
            verdict = "converged"
            break
    bounds = [math.nan] * len(points)  # no verified rate for non-self maps
    return Trace(
        points=points,
        step_residuals=step_res,
        proximity_residuals=prox_res,
        apriori_bounds=bounds,
        verdict=verdict,
        final=points[-1],
        certificate_residual=prox_res[-1],
    )


@dataclass(frozen=True)
class BatteryItem:
    """One hypothesis check of the staged scheme; failures warn, not abort."""

    name: str
    passed: bool
    vacuous: bool = False
    note: str = ""
    report: Optional[object] = None


@dataclass
class StageReport:
    stage: int
    a_n: float
    beta_n: float
    check: PropertyReport
    trace: Trace
    output: Point
    residual: float  # proximity residual of the stage output under the base map


@dataclass
class BerindeResult:
    final: Point
    residual: float
    verdict: str
    battery: list[BatteryItem]
    stages: list[StageReport]
    trace: Trace

    @property
    def hypotheses_ok(self) -> bool:
        return all(item.passed for item in self.battery)


def _battery(
    g: GFunction,
    f: MapSpec,
    a: SampleSet,
    b: SampleSet,
    h: ConvexStructure,
    r: Point,
    s: Point,
    core: ProximalCore,
    n_cap: float,
    lambda_grid: Sequence[float],
    tol: ToleranceSet,
    skip_side_condition: bool,
    seed: int,
    max_tuples: int,
) -> list[BatteryItem]:
    items: list[BatteryItem] = []

    def add(name: str, report: CheckReport) -> None:
        items.append(BatteryItem(name, report.holds, note=report.note, report=report))

    ambient = a.union(b, name="A|B")
    add(
        "convex-structure",
        check_convex_structure(
            h, g, ambient, lambda_grid, tol, max_tuples=max_tuples, seed=seed
        ),
    )
    add("starshaped-A", check_starshaped(h, a, r, lambda_grid, tol))
    add("starshaped-B", check_starshaped(h, b, s, lambda_grid, tol))
    centre_gap = abs(abs(eval_g(g, r, s)) - core.d_g)
    items.append(
        BatteryItem(
            "centres-realise-level",
            centre_gap <= tol.eps_prox,
            note=f"gap {centre_gap!r}",
        )
    )
    add("semi-sharp", check_semi_sharp(g, a, b, core, tol))
    berinde = check_proximal_inequality(
        g, f, a, b, 1.0, n_cap, core, tol, seed=seed
    )
    items.append(
        BatteryItem(
            "berinde-nonexpansive",
            berinde.holds,
            vacuous=berinde.vacuous,
            note="no qualifying quadruples" if berinde.vacuous else "",
            report=berinde,
        )
    )
    if skip_side_condition:
        items.append(
            BatteryItem("side-condition", True, note="skipped on request")
        )
    else:
        add("side-condition", check_side_condition(g, core, r, s, tol))
    return items


def berinde_scheme(
    g: GFunction,
    f: MapSpec,
    a: SampleSet,
    b: SampleSet,
    h: ConvexStructure,
    r: Point,
    s: Point,
    sched: Schedule,
    tol: ToleranceSet,
    max_iter: int = DEFAULT_MAX_ITER,
    n_cap: float = 0.0,
    lambda_grid: Optional[Sequence[float]] = None,
    skip_side_condition: bool = False,
    seed: int = 0,
    max_tuples: int = 1_000_000,
) -> BerindeResult:
    """Staged approximation for a non-expansive proximal map.

    Stage n builds the interpolated map x -> H(s, f(x), a_n), verifies it is
    a proximal weak contraction at coefficient beta_n = 1 - a_n, and runs the
    proximity iteration from the previous stage's output (stage one starts
    at the first realising point).  Hypothesis checks are reported as a
    battery; failures warn rather than abort, because the scheme remains
    numerically runnable when a sampled check is inconclusive.  The final
    answer is the stage output with the smallest proximity residual under
    the original map.
    """
    lams = list(lambda_grid) if lambda_grid is not None else [i / 10 for i in range(11)]
    core = proximal_core(g, a, b, tol)
    battery = _battery(
        g, f, a, b, h, r, s, core, n_cap, lams, tol, skip_side_condition, seed,
        max_tuples,
    )
    stages: list[StageReport] = []
    current = core.a_g.points[0]
    for n, a_n in enumerate(sched.values, start=1):
        stage_map = StageMap(h, s, f, a_n)
        beta_n = 1.0 - a_n
        check = check_proximal_inequality(
            g, stage_map, a, b, beta_n, n_cap, core, tol, seed=seed
        )
        trace = proximal_iterate(
            g, stage_map, a, b, core, current, tol, max_iter, check_image=False
        )
        current = trace.final
        residual = _prox_residual(g, f, current, core.d_g)
        stages.append(
            StageReport(
                stage=n, a_n=a_n, beta_n=beta_n, check=check,
                trace=trace, output=current, residual=residual,
            )
        )
    best = min(stages, key=lambda st: (st.residual, st.stage))
    outputs = [st.output for st in stages]
    summary = Trace(
        points=outputs,
        step_residuals=[
            abs(eval_g(g, p, q)) for p, q in zip(outputs, outputs[1:])
        ],
        proximity_residuals=[st.residual for st in stages],
        apriori_bounds=[math.nan] * len(outputs),
        verdict="converged"
        if best.residual <= tol.eps_prox + tol.eps_zero
        else "max_iter",
        final=best.output,
        certificate_residual=best.residual,
    )
    return BerindeResult(
        final=best.output,
        residual=best.residual,
        verdict=summary.verdict,
        battery=battery,
        stages=stages,
        trace=summary,
    )
