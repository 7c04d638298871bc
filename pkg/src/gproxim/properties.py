"""Contraction-class hypothesis checks on sampled instances.

Three families are covered: the plain contraction inequality for self or
cross maps (abs(g(Tx, Ty)) <= alpha * abs(g(x, y))), the proximal weak
contraction (quadruples whose images realise the proximity level), and its
non-expansive variant, which is the same inequality with beta pinned to 1.
All checks are falsifiers over deterministic scans; grid instances are
subsampled under a tuple cap, exact finite sets are enumerated exhaustively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from .expr import Expr, compile_expr, parse, variables
from .gspace import (
    GFunction,
    GSpaceError,
    Point,
    ProximalCore,
    SampleSet,
    ToleranceSet,
    _stride_indices,
    eval_g,
)

__all__ = [
    "MapSpec",
    "PropertyReport",
    "check_banach_contraction",
    "estimate_coefficient",
    "check_proximal_inequality",
    "estimate_proximal_coefficient",
    "qualifying_pairs",
    "proximal_sides",
]

_HOLDS = "holds-on-sample"
_FALSIFIED = "falsified"


class MapSpec:
    """A coordinatewise map given by expressions over x1..xd, with sampled
    domain and codomain."""

    def __init__(
        self,
        exprs: Sequence[Union[Expr, str]],
        domain: SampleSet,
        codomain: SampleSet,
        name: str = "T",
    ):
        parsed = tuple(parse(e) if isinstance(e, str) else e for e in exprs)
        d = domain.dimension
        if len(parsed) != d:
            raise GSpaceError(
                f"map {name!r} needs {d} coordinate expressions, got {len(parsed)}"
            )
        allowed = tuple(f"x{i}" for i in range(1, d + 1))
        for i, e in enumerate(parsed):
            unknown = sorted(variables(e) - set(allowed))
            if unknown:
                raise GSpaceError(
                    f"map {name!r} coordinate {i + 1} references {unknown}"
                )
        self.exprs = parsed
        self.domain = domain
        self.codomain = codomain
        self.name = name
        self._fns = tuple(compile_expr(e, allowed) for e in parsed)

    @property
    def dimension(self) -> int:
        return self.domain.dimension

    def apply(self, p: Point) -> Point:
        if p.dimension != self.dimension:
            raise GSpaceError(f"map {self.name!r} applied to wrong dimension")
        coords = tuple(fn(*p.coords) for fn in self._fns)
        if not all(math.isfinite(c) for c in coords):
            raise GSpaceError(f"map {self.name!r} produced non-finite image at {p}")
        return Point(coords)

    def validate_into_codomain(self, tol: float = 1e-9) -> Optional[Point]:
        """First sampled domain point whose image escapes the codomain, if any."""
        for p in self.domain.points:
            if not self.codomain.contains(self.apply(p), tol):
                return p
        return None

    def __repr__(self) -> str:
        body = ", ".join(str(e) for e in self.exprs)
        return f"MapSpec({self.name}=[{body}])"


@dataclass(frozen=True)
class PropertyReport:
    """Verdict of a contraction-class check with a replayable witness.

    beta and n_cap record the coefficients the inequality was checked with
    (alpha is stored in beta for the plain contraction check).  vacuous marks
    a proximal check that found no qualifying quadruples at all.
    """

    check: str
    verdict: str
    witness: Optional[Mapping[str, Point]]
    lhs: Optional[float]
    rhs: Optional[float]
    beta: float
    n_cap: float
    vacuous: bool = False

    @property
    def falsified(self) -> bool:
        return self.verdict == _FALSIFIED

    @property
    def holds(self) -> bool:
        return self.verdict == _HOLDS

    @property
    def margin(self) -> Optional[float]:
        if self.lhs is None or self.rhs is None:
            return None
        return self.lhs - self.rhs


def _pair_axes(domain: SampleSet, max_pairs: int, seed: int) -> list[Point]:
    n = len(domain.points)
    if domain.mode == "exact" or n * n <= max_pairs:
        return list(domain.points)
    m = max(2, int(math.isqrt(max_pairs)))
    return [domain.points[i] for i in _stride_indices(n, m, seed)]


def check_banach_contraction(
    g: GFunction,
    t: MapSpec,
    alpha: float,
    tol: ToleranceSet,
    max_pairs: int = 1_000_000,
    seed: int = 0,
) -> PropertyReport:
    """Falsified when some sampled pair has abs(g(Tx, Ty)) above
    alpha * abs(g(x, y)) by more than eps_ineq."""
    if not 0.0 < alpha < 1.0:
        raise GSpaceError(f"alpha must lie in (0, 1), got {alpha!r}")
    pts = _pair_axes(t.domain, max_pairs, seed)
    images = {p.coords: t.apply(p) for p in pts}
    for x in pts:
        tx = images[x.coords]
        for y in pts:
            lhs = abs(eval_g(g, tx, images[y.coords]))
            rhs = alpha * abs(eval_g(g, x, y))
            if lhs > rhs + tol.eps_ineq:
                return PropertyReport(
                    "banach-contraction", _FALSIFIED, {"x": x, "y": y},
                    lhs=lhs, rhs=rhs, beta=alpha, n_cap=0.0,
                )
    return PropertyReport(
        "banach-contraction", _HOLDS, None, None, None, beta=alpha, n_cap=0.0
    )


def estimate_coefficient(
    g: GFunction,
    t: MapSpec,
    tol: ToleranceSet,
    max_pairs: int = 1_000_000,
    seed: int = 0,
) -> float:
    """Tightest contraction coefficient supported by the sample.

    The supremum of abs(g(Tx, Ty)) / abs(g(x, y)) over pairs whose gauge is
    above zero level.  A pair at zero level with a non-zero image gauge makes
    the estimate infinite.  Returns 0.0 when no pair constrains the ratio.
    """
    pts = _pair_axes(t.domain, max_pairs, seed)
    images = {p.coords: t.apply(p) for p in pts}
    best = 0.0
    for x in pts:
        tx = images[x.coords]
        for y in pts:
            num = abs(eval_g(g, tx, images[y.coords]))
            den = abs(eval_g(g, x, y))
            if den > tol.eps_zero:
                best = max(best, num / den)
            elif num > tol.eps_zero:
                return math.inf
    return best


def qualifying_pairs(
    g: GFunction,
    f: MapSpec,
    a: SampleSet,
    core: ProximalCore,
    tol: ToleranceSet,
    max_points: int = 2000,
    seed: int = 0,
) -> list[tuple[Point, Point]]:
    """Pairs (x, u) of sampled A points with abs(g(u, f(x))) at the proximity
    level; these are the building blocks of the quadruple scans."""
    pts = list(a.points)
    if a.mode == "box" and len(pts) > max_points:
        pts = [pts[i] for i in _stride_indices(len(pts), max_points, seed)]
    images = [(x, f.apply(x)) for x in pts]
    out = []
    for x, fx in images:
        for u in pts:
            if abs(abs(eval_g(g, u, fx)) - core.d_g) <= tol.eps_prox:
                out.append((x, u))
    return out


def proximal_sides(
    g: GFunction,
    witness: Mapping[str, Point],
    beta: float,
    n_cap: float,
) -> tuple[float, float]:
    """Recompute both sides of the proximal inequality at a witness."""
    x1, x2 = witness["x1"], witness["x2"]
    u1, u2 = witness["u1"], witness["u2"]
    lhs = abs(eval_g(g, u1, u2))
    rhs = beta * abs(eval_g(g, x1, x2)) + n_cap * abs(eval_g(g, x2, u1))
    return lhs, rhs


def _quadruples(
    pairs: list[tuple[Point, Point]], max_quadruples: int, exhaustive: bool, seed: int
):
    axis = pairs
    if not exhaustive and len(pairs) ** 2 > max_quadruples:
        m = max(2, int(math.isqrt(max_quadruples)))
        axis = [pairs[i] for i in _stride_indices(len(pairs), m, seed)]
    for x1, u1 in axis:
        for x2, u2 in axis:
            yield x1, x2, u1, u2


def check_proximal_inequality(
    g: GFunction,
    f: MapSpec,
    a: SampleSet,
    b: SampleSet,
    beta: float,
    n_cap: float,
    core: ProximalCore,
    tol: ToleranceSet,
    max_quadruples: int = 1_000_000,
    seed: int = 0,
) -> PropertyReport:
    """Check the proximal contraction inequality over qualifying quadruples.

    Quadruples (x1, x2, u1, u2) from A with both abs(g(u_i, f(x_i))) at the
    proximity level must satisfy abs(g(u1, u2)) <= beta * abs(g(x1, x2)) +
    n_cap * abs(g(x2, u1)).  beta below 1 is the weak-contraction mode and
    beta equal to 1 the non-expansive mode; the two definitions differ only
    in that coefficient, so they share this code path.  Finding no qualifying
    quadruple at all is reported as a vacuous hold, never silently.
    """
    if not 0.0 < beta <= 1.0:
        raise GSpaceError(f"beta must lie in (0, 1], got {beta!r}")
    if n_cap < 0.0:
        raise GSpaceError(f"N must be non-negative, got {n_cap!r}")
    check_name = "proximal-berinde" if beta == 1.0 else "proximal-weak"
    pairs = qualifying_pairs(g, f, a, core, tol, seed=seed)
    if not pairs:
        return PropertyReport(
            check_name, _HOLDS, None, None, None,
            beta=beta, n_cap=n_cap, vacuous=True,
        )
    exhaustive = a.mode == "exact"
    for x1, x2, u1, u2 in _quadruples(pairs, max_quadruples, exhaustive, seed):
        witness = {"x1": x1, "x2": x2, "u1": u1, "u2": u2}
        lhs, rhs = proximal_sides(g, witness, beta, n_cap)
        if lhs > rhs + tol.eps_ineq:
            return PropertyReport(
                check_name, _FALSIFIED, witness,
                lhs=lhs, rhs=rhs, beta=beta, n_cap=n_cap,
            )
    return PropertyReport(
        check_name, _HOLDS, None, None, None, beta=beta, n_cap=n_cap
    )


def estimate_proximal_coefficient(
    g: GFunction,
    f: MapSpec,
    a: SampleSet,
    b: SampleSet,
    n_cap: float,
    core: ProximalCore,
    tol: ToleranceSet,
    max_quadruples: int = 1_000_000,
    seed: int = 0,
) -> float:
    """Tightest beta supported by the qualifying quadruples, given N.

    The supremum of (abs(g(u1, u2)) - N * abs(g(x2, u1))) / abs(g(x1, x2))
    over quadruples whose denominator is above zero level; infinite when a
    zero-level denominator meets a positive numerator.  Returns 0.0 when no
    quadruple constrains the ratio (including the vacuous case).
    """
    pairs = qualifying_pairs(g, f, a, core, tol, seed=seed)
    exhaustive = a.mode == "exact"
    best = 0.0
    for x1, x2, u1, u2 in _quadruples(pairs, max_quadruples, exhaustive, seed):
        num = abs(eval_g(g, u1, u2)) - n_cap * abs(eval_g(g, x2, u1))
        den = abs(eval_g(g, x1, x2))
        if den > tol.eps_zero:
            best = max(best, num / den)
        elif num > tol.eps_zero:
            return math.inf
    return best
