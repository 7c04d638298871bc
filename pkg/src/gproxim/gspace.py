"""Sampled point sets under a bivariate gauge function.

A "gauge" g is a continuous real-valued function of two points; it may be
negative and asymmetric, so it is not a metric.  All definitional checks in
this module apply abs() at the use site and work on finite samples: grids
discretise bounded boxes, exact lists represent finite sets.  Axiom-style
checks are falsifiers, not verifiers; "holds-on-sample" is the strongest
verdict a finite scan can return.

Every type here is immutable after construction and every operation is pure,
so scans can run concurrently on shared instances.  Witness searches use a
fixed deterministic order (list order, ties broken lexicographically by
coordinates) so that reports are reproducible.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .expr import EvalError, Expr, compile_expr, parse, variables

__all__ = [
    "Point",
    "GFunction",
    "SampleSet",
    "SequencePrefix",
    "ProximalCore",
    "ConvexStructure",
    "ToleranceSet",
    "CheckReport",
    "SequenceReport",
    "GSpaceError",
    "DimensionMismatch",
    "NoProximalMate",
    "eval_g",
    "falsify_axiom",
    "classify_sequence",
    "enumerate_g_limits",
    "proximal_core",
    "proximal_select",
    "check_semi_sharp",
    "check_convex_structure",
    "check_starshaped",
    "check_side_condition",
]


class GSpaceError(Exception):
    """Base class for gauge-space errors."""


class DimensionMismatch(GSpaceError):
    pass


class NoProximalMate(GSpaceError):
    """No sample point realises the proximity level for the requested target."""


@dataclass(frozen=True)
class Point:
    """A point of the ambient space: a fixed-length tuple of finite reals."""

    coords: tuple[float, ...]
    label: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        coords = tuple(float(c) + 0.0 for c in self.coords)  # normalises -0.0
        if not coords:
            raise GSpaceError("point must have at least one coordinate")
        if not all(math.isfinite(c) for c in coords):
            raise GSpaceError(f"non-finite coordinates: {coords}")
        object.__setattr__(self, "coords", coords)

    @property
    def dimension(self) -> int:
        return len(self.coords)

    def __str__(self) -> str:
        body = ", ".join(repr(c) for c in self.coords)
        return f"({body})"


def _as_point(value: Union[Point, Sequence[float], float]) -> Point:
    if isinstance(value, Point):
        return value
    if isinstance(value, (int, float)):
        return Point((float(value),))
    return Point(tuple(float(c) for c in value))


@dataclass(frozen=True)
class ToleranceSet:
    """Numeric tolerances for the sampled checks.

    eps_prox bands equality to the proximity level, eps_zero decides when a
    gauge value counts as zero, eps_ineq is the slack allowed before an
    inequality counts as violated, tail_len is the sequence tail window.
    """

    eps_prox: float = 1e-9
    eps_zero: float = 1e-9
    eps_ineq: float = 1e-9
    tail_len: int = 10

    def __post_init__(self):
        if self.eps_prox <= 0 or self.eps_zero <= 0:
            raise GSpaceError("eps_prox and eps_zero must be positive")
        if self.eps_ineq < 0:
            raise GSpaceError("eps_ineq must be non-negative")
        if self.tail_len < 1:
            raise GSpaceError("tail_len must be at least 1")

    @classmethod
    def for_grid_step(cls, step: float, **overrides) -> "ToleranceSet":
        """Default proximity band for discretised regions: half the grid step."""
        return cls(eps_prox=step / 2.0, **overrides)


class GFunction:
    """A bivariate gauge: an expression over x1..xd (first point), u1..ud (second)."""

    def __init__(self, expr: Union[Expr, str], dimension: int, name: str = "g"):
        if isinstance(expr, str):
            expr = parse(expr)
        if dimension < 1:
            raise GSpaceError("dimension must be at least 1")
        allowed = self._var_names(dimension)
        unknown = sorted(variables(expr) - set(allowed))
        if unknown:
            raise GSpaceError(
                f"gauge {name!r} references undeclared variables {unknown} "
                f"(dimension {dimension})"
            )
        self.expr = expr
        self.dimension = dimension
        self.name = name
        self._fn = compile_expr(expr, allowed)

    @staticmethod
    def _var_names(d: int) -> tuple[str, ...]:
        return tuple(f"x{i}" for i in range(1, d + 1)) + tuple(
            f"u{i}" for i in range(1, d + 1)
        )

    def __call__(self, x: Point, y: Point) -> float:
        return eval_g(self, x, y)

    def __repr__(self) -> str:
        return f"GFunction({self.name}={self.expr!s}, d={self.dimension})"


def eval_g(g: GFunction, x: Point, y: Point) -> float:
    """Signed gauge value g(x, y); callers take abs() where definitions do."""
    if x.dimension != g.dimension or y.dimension != g.dimension:
        raise DimensionMismatch(
            f"gauge {g.name!r} has dimension {g.dimension}, "
            f"got points of dimension {x.dimension} and {y.dimension}"
        )
    value = g._fn(*x.coords, *y.coords)
    if not math.isfinite(value):
        raise EvalError("non-finite", f"{g.name}({x}, {y}) = {value!r}")
    return value


@dataclass(frozen=True)
class SampleSet:
    """A finite sample of a subset: an exact point list or a discretised box.

    mode "exact" means membership is coordinate proximity to a listed point;
    mode "box" means membership is containment in the box up to tolerance.
    Points are stored in deterministic scan order (grids in row-major order).
    """

    points: tuple[Point, ...]
    box: Optional[tuple[tuple[float, float], ...]] = None
    resolution: Optional[tuple[int, ...]] = None
    name: str = ""

    def __post_init__(self):
        if not self.points:
            raise GSpaceError(f"sample set {self.name!r} is empty")
        d = self.points[0].dimension
        seen = set()
        for p in self.points:
            if p.dimension != d:
                raise DimensionMismatch(f"inconsistent dimensions in {self.name!r}")
            if p.coords in seen:
                raise GSpaceError(f"duplicate point {p} in {self.name!r}")
            seen.add(p.coords)
        if self.box is not None:
            if len(self.box) != d:
                raise DimensionMismatch(f"box rank mismatch in {self.name!r}")
            for p in self.points:
                if not self._in_box(p, 1e-12):
                    raise GSpaceError(f"grid point {p} outside box in {self.name!r}")

    @property
    def mode(self) -> str:
        return "box" if self.box is not None else "exact"

    @property
    def dimension(self) -> int:
        return self.points[0].dimension

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @classmethod
    def from_points(
        cls, pts: Iterable[Union[Point, Sequence[float], float]], name: str = ""
    ) -> "SampleSet":
        return cls(points=tuple(_as_point(p) for p in pts), name=name)

    @classmethod
    def grid(
        cls,
        box: Sequence[tuple[float, float]],
        resolution: Union[int, Sequence[int]] = 101,
        name: str = "",
    ) -> "SampleSet":
        """Per-axis uniform grid over the box, row-major point order."""
        box = tuple((float(lo), float(hi)) for lo, hi in box)
        if isinstance(resolution, int):
            res = tuple(resolution if lo != hi else 1 for lo, hi in box)
        else:
            res = tuple(int(r) for r in resolution)
        if len(res) != len(box):
            raise GSpaceError("resolution rank does not match box rank")
        axes = []
        for (lo, hi), n in zip(box, res):
            if n < 1 or (n == 1 and lo != hi):
                raise GSpaceError(f"bad resolution {n} for axis [{lo}, {hi}]")
            if n == 1:
                axes.append([lo])
            else:
                step = (hi - lo) / (n - 1)
                axes.append([lo + i * step for i in range(n - 1)] + [hi])
        pts = tuple(Point(tuple(c)) for c in itertools.product(*axes))
        return cls(points=pts, box=box, resolution=res, name=name)

    def grid_step(self) -> Optional[float]:
        """Smallest non-degenerate axis step, or None for exact sets."""
        if self.box is None or self.resolution is None:
            return None
        steps = [
            (hi - lo) / (n - 1)
            for (lo, hi), n in zip(self.box, self.resolution)
            if n > 1
        ]
        return min(steps) if steps else None

    def contains(self, p: Point, tol: float = 1e-9) -> bool:
        if p.dimension != self.dimension:
            return False
        if self.box is not None:
            return self._in_box(p, tol)
        return any(
            all(abs(a - b) <= tol for a, b in zip(p.coords, q.coords))
            for q in self.points
        )

    def _in_box(self, p: Point, tol: float) -> bool:
        assert self.box is not None
        return all(
            lo - tol <= c <= hi + tol for c, (lo, hi) in zip(p.coords, self.box)
        )

    def union(self, other: "SampleSet", name: str = "") -> "SampleSet":
        """Exact-mode union, deduplicated by coordinates, order preserved."""
        seen = set()
        pts = []
        for p in itertools.chain(self.points, other.points):
            if p.coords not in seen:
                seen.add(p.coords)
                pts.append(p)
        return SampleSet(points=tuple(pts), name=name or f"{self.name}|{other.name}")


@dataclass(frozen=True)
class SequencePrefix:
    """The first n terms of a sequence, n >= 2."""

    points: tuple[Point, ...]

    def __post_init__(self):
        if len(self.points) < 2:
            raise GSpaceError("sequence prefix needs at least two terms")
        d = self.points[0].dimension
        if any(p.dimension != d for p in self.points):
            raise DimensionMismatch("inconsistent dimensions in sequence")

    @classmethod
    def from_function(
        cls, fn: Callable[[int], Union[Point, Sequence[float], float]], n: int
    ) -> "SequencePrefix":
        """Terms fn(1) .. fn(n)."""
        return cls(tuple(_as_point(fn(k)) for k in range(1, n + 1)))

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class ConvexStructure:
    """A ternary interpolation map H(x, y, lam), one expression per coordinate.

    Expressions range over x1..xd (first argument), u1..ud (second argument)
    and l (the parameter in [0, 1]).
    """

    exprs: tuple[Expr, ...]
    dimension: int = 0

    def __post_init__(self):
        exprs = tuple(parse(e) if isinstance(e, str) else e for e in self.exprs)
        d = self.dimension or len(exprs)
        if len(exprs) != d:
            raise GSpaceError("one expression per coordinate is required")
        allowed = GFunction._var_names(d) + ("l",)
        for i, e in enumerate(exprs):
            unknown = sorted(variables(e) - set(allowed))
            if unknown:
                raise GSpaceError(
                    f"convex structure coordinate {i + 1} references {unknown}"
                )
        object.__setattr__(self, "exprs", exprs)
        object.__setattr__(self, "dimension", d)
        object.__setattr__(
            self, "_fns", tuple(compile_expr(e, allowed) for e in exprs)
        )

    def apply(self, x: Point, y: Point, lam: float) -> Point:
        if x.dimension != self.dimension or y.dimension != self.dimension:
            raise DimensionMismatch("convex structure dimension mismatch")
        args = x.coords + y.coords + (lam,)
        coords = tuple(fn(*args) for fn in self._fns)
        if not all(math.isfinite(c) for c in coords):
            raise EvalError("non-finite", f"H({x}, {y}, {lam!r})")
        return Point(coords)


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a sampled check: a verdict plus a replayable witness.

    A falsified verdict always carries the first witness in deterministic
    scan order together with the two sides of the violated inequality.
    """

    check: str
    verdict: str  # "holds-on-sample" | "falsified"
    witness: Optional[Mapping[str, Union[Point, float]]] = None
    lhs: Optional[float] = None
    rhs: Optional[float] = None
    note: str = ""

    @property
    def falsified(self) -> bool:
        return self.verdict == "falsified"

    @property
    def holds(self) -> bool:
        return self.verdict == "holds-on-sample"


@dataclass(frozen=True)
class SequenceReport:
    """Numeric classification of a sequence prefix against the tail window."""

    verdict: str  # "g-convergent-to-target" | "g-cauchy" | "neither"
    convergent: Optional[bool]
    cauchy: bool
    max_convergence_residual: Optional[float]
    max_cauchy_residual: float
    target: Optional[Point]


@dataclass(frozen=True)
class ProximalCore:
    """Proximity level of a sampled pair (A, B) and the sets realising it.

    d_g is the exact minimum of abs(g) over the sampled product A x B; a_g
    and b_g collect the points whose best partner lands within eps of d_g,
    and witnesses pairs each member of a_g with its first such partner.
    """

    d_g: float
    a_g: SampleSet
    b_g: SampleSet
    witnesses: tuple[tuple[Point, Point], ...]
    eps: float


_HOLDS = "holds-on-sample"
_FALSIFIED = "falsified"


def falsify_axiom(
    kind: str,
    g: GFunction,
    s: SampleSet,
    tol: ToleranceSet,
    max_tuples: int = 1_000_000,
    seed: int = 0,
) -> CheckReport:
    """Search the sample for a violation of one metric-like gauge axiom.

    kind "identity": a pair of distinct points with abs(g) at zero level.
    kind "symmetry": a pair where abs(g(x,y)) and abs(g(y,x)) differ by more
    than eps_ineq.  kind "triangle": a pairwise-distinct triple (x, y, z)
    with abs(g(x,z)) > abs(g(x,y)) + abs(g(y,z)) + eps_ineq.  Exact finite
    sets are scanned exhaustively; discretised sets are subsampled under the
    tuple cap.
    """
    pts: Sequence[Point] = s.points
    if s.mode == "box":
        arity = 3 if kind == "triangle" else 2
        if len(pts) ** arity > max_tuples:
            per_axis = max(2, int(max_tuples ** (1.0 / arity)))
            pts = _subsampled(pts, per_axis, seed)
    if kind == "identity":
        for x in pts:
            for y in pts:
                if x.coords == y.coords:
                    continue
                v = abs(eval_g(g, x, y))
                if v <= tol.eps_zero:
                    return CheckReport(
                        "identity-axiom", _FALSIFIED, {"x": x, "y": y},
                        lhs=v, rhs=tol.eps_zero,
                        note="distinct points at zero gauge level",
                    )
        return CheckReport("identity-axiom", _HOLDS)
    if kind == "symmetry":
        for i, x in enumerate(pts):
            for y in pts[i + 1:]:
                lhs = abs(abs(eval_g(g, x, y)) - abs(eval_g(g, y, x)))
                if lhs > tol.eps_ineq:
                    return CheckReport(
                        "symmetry-axiom", _FALSIFIED, {"x": x, "y": y},
                        lhs=lhs, rhs=tol.eps_ineq,
                    )
        return CheckReport("symmetry-axiom", _HOLDS)
    if kind == "triangle":
        for x in pts:
            for y in pts:
                if y.coords == x.coords:
                    continue
                gxy = abs(eval_g(g, x, y))
                for z in pts:
                    if z.coords == x.coords or z.coords == y.coords:
                        continue
                    lhs = abs(eval_g(g, x, z))
                    rhs = gxy + abs(eval_g(g, y, z))
                    if lhs > rhs + tol.eps_ineq:
                        return CheckReport(
                            "triangle-axiom", _FALSIFIED,
                            {"x": x, "y": y, "z": z}, lhs=lhs, rhs=rhs,
                        )
        return CheckReport("triangle-axiom", _HOLDS)
    raise GSpaceError(f"unknown axiom kind {kind!r}")


def classify_sequence(
    g: GFunction,
    s: SequencePrefix,
    target: Optional[Point],
    tol: ToleranceSet,
) -> SequenceReport:
    """Classify a prefix using the tail window of length tol.tail_len.

    Convergence to the target means every abs(g(x_n, target)) in the tail is
    at zero level; the Cauchy criterion bounds abs(g(x_n, x_m)) over all tail
    index pairs.  Both maxima are reported.
    """
    if len(s) < tol.tail_len + 1:
        raise GSpaceError(
            f"prefix of length {len(s)} is shorter than tail_len + 1 = "
            f"{tol.tail_len + 1}"
        )
    tail = s.points[-tol.tail_len:]
    max_cauchy = max(
        abs(eval_g(g, x, y)) for x in tail for y in tail
    )
    cauchy = max_cauchy <= tol.eps_zero
    convergent: Optional[bool] = None
    max_conv: Optional[float] = None
    if target is not None:
        max_conv = max(abs(eval_g(g, x, target)) for x in tail)
        convergent = max_conv <= tol.eps_zero
    if convergent:
        verdict = "g-convergent-to-target"
    elif cauchy:
        verdict = "g-cauchy"
    else:
        verdict = "neither"
    return SequenceReport(verdict, convergent, cauchy, max_conv, max_cauchy, target)


def enumerate_g_limits(
    g: GFunction,
    s: SequencePrefix,
    candidates: SampleSet,
    tol: ToleranceSet,
) -> list[Point]:
    """All candidate points the prefix converges to; more than one witnesses
    non-uniqueness of limits."""
    limits = []
    for c in candidates.points:
        report = classify_sequence(g, s, c, tol)
        if report.convergent:
            limits.append(c)
    return limits


def proximal_core(
    g: GFunction, a: SampleSet, b: SampleSet, tol: ToleranceSet
) -> ProximalCore:
    """Exact minimum of abs(g) over the sampled product, with realising sets.

    Membership in a_g and b_g uses the eps_prox band around d_g; witnesses
    pair each a_g member with its first banded partner in list order.
    """
    values = [
        [abs(eval_g(g, x, y)) for y in b.points] for x in a.points
    ]
    d_g = min(min(row) for row in values)
    eps = tol.eps_prox
    a_pts, wits = [], []
    b_hit = [False] * len(b.points)
    for i, x in enumerate(a.points):
        mate = None
        for j, y in enumerate(b.points):
            if abs(values[i][j] - d_g) <= eps:
                b_hit[j] = True
                if mate is None:
                    mate = y
        if mate is not None:
            a_pts.append(x)
            wits.append((x, mate))
    b_pts = [y for j, y in enumerate(b.points) if b_hit[j]]
    return ProximalCore(
        d_g=d_g,
        a_g=SampleSet(points=tuple(a_pts), name=f"{a.name or 'A'}_g"),
        b_g=SampleSet(points=tuple(b_pts), name=f"{b.name or 'B'}_g"),
        witnesses=tuple(wits),
        eps=eps,
    )


def proximal_select(
    g: GFunction,
    a: SampleSet,
    b: Point,
    core: ProximalCore,
    tol: ToleranceSet,
) -> Point:
    """The sample point of A realising the proximity level against b.

    Among points within the eps_prox band the one with the smallest residual
    wins; exact ties break lexicographically by coordinates, so selection is
    deterministic.  Raises NoProximalMate when the band is empty, which
    signals either an image escaping the realising set or a grid too coarse.
    """
    best: Optional[tuple[float, tuple[float, ...], Point]] = None
    for x in a.points:
        residual = abs(abs(eval_g(g, x, b)) - core.d_g)
        if residual <= tol.eps_prox:
            key = (residual, x.coords)
            if best is None or key < (best[0], best[1]):
                best = (residual, x.coords, x)
    if best is None:
        raise NoProximalMate(
            f"no point of {a.name or 'A'} realises the proximity level "
            f"{core.d_g!r} against {b} within {tol.eps_prox!r}"
        )
    return best[2]


def check_semi_sharp(
    g: GFunction,
    a: SampleSet,
    b: SampleSet,
    core: ProximalCore,
    tol: ToleranceSet,
) -> CheckReport:
    """Falsified when some a has two distinct partners at the proximity level."""
    for x in a.points:
        first = None
        for y in b.points:
            if abs(abs(eval_g(g, x, y)) - core.d_g) <= tol.eps_prox:
                if first is None:
                    first = y
                elif y.coords != first.coords:
                    return CheckReport(
                        "semi-sharp", _FALSIFIED,
                        {"a": x, "b1": first, "b2": y},
                        lhs=abs(eval_g(g, x, y)), rhs=core.d_g,
                        note="two distinct partners at the proximity level",
                    )
    return CheckReport("semi-sharp", _HOLDS)


def _stride_indices(n: int, m: int, seed: int = 0) -> list[int]:
    """Deterministic subsample of range(n) of size <= m.

    Seed 0 gives evenly spaced indices including both endpoints; other seeds
    give a reproducible random sample.
    """
    if m >= n:
        return list(range(n))
    if m == 1:
        return [0]
    if seed == 0:
        return sorted({round(i * (n - 1) / (m - 1)) for i in range(m)})
    rng = random.Random(seed)
    return sorted(rng.sample(range(n), m))


def _axis_budget(sizes: Sequence[int], cap: int) -> list[int]:
    """Per-axis subsample sizes so the product stays within cap."""
    sizes = list(sizes)
    budget = sizes[:]
    while math.prod(budget) > cap:
        i = budget.index(max(budget))
        budget[i] = max(2, int(budget[i] * 0.8))
        if all(b <= 2 for b in budget):
            break
    return budget


def _subsampled(points: Sequence[Point], m: int, seed: int) -> list[Point]:
    return [points[i] for i in _stride_indices(len(points), m, seed)]


def check_convex_structure(
    h: ConvexStructure,
    g: GFunction,
    s: SampleSet,
    lambda_grid: Sequence[float],
    tol: ToleranceSet,
    max_tuples: int = 1_000_000,
    seed: int = 0,
) -> CheckReport:
    """Check both interpolation inequalities of a convex structure on a sample.

    Condition one bounds abs(g(x0, H(x,y,lam))) by the lam-weighted mix of
    abs(g(x0,x)) and abs(g(x0,y)); condition two bounds the gauge between two
    interpolants by the mix of the endpoint gauges.  Tuple scans are capped
    by subsampling each axis deterministically.
    """
    lams = list(lambda_grid)
    if not lams or min(lams) > 0.0 or max(lams) < 1.0 or 0.0 not in lams or 1.0 not in lams:
        raise GSpaceError("lambda grid must include 0 and 1")
    pts = list(s.points)
    n = len(pts)
    # condition one: tuples (x0, x, y, lam)
    m = _axis_budget([n, n, n, len(lams)], max_tuples)
    xs0 = _subsampled(pts, m[0], seed)
    xs = _subsampled(pts, m[1], seed)
    ys = _subsampled(pts, m[2], seed)
    lam_sub = sorted(
        set(lams[i] for i in _stride_indices(len(lams), m[3], seed)) | {0.0, 1.0}
    )
    h_cache: dict[tuple[tuple[float, ...], tuple[float, ...], float], Point] = {}

    def h_at(x: Point, y: Point, lam: float) -> Point:
        key = (x.coords, y.coords, lam)
        got = h_cache.get(key)
        if got is None:
            got = h.apply(x, y, lam)
            h_cache[key] = got
        return got

    for x0 in xs0:
        gx = {x.coords: abs(eval_g(g, x0, x)) for x in xs}
        gy = {y.coords: abs(eval_g(g, x0, y)) for y in ys}
        for x in xs:
            for y in ys:
                for lam in lam_sub:
                    lhs = abs(eval_g(g, x0, h_at(x, y, lam)))
                    rhs = lam * gx[x.coords] + (1.0 - lam) * gy[y.coords]
                    if lhs > rhs + tol.eps_ineq:
                        return CheckReport(
                            "convex-structure", _FALSIFIED,
                            {"x0": x0, "x": x, "y": y, "lam": lam},
                            lhs=lhs, rhs=rhs, note="condition one",
                        )
    # condition two: tuples (x, y, x0, y0, lam)
    m2 = _axis_budget([n, n, n, n, len(lams)], max_tuples)
    xs = _subsampled(pts, m2[0], seed)
    ys = _subsampled(pts, m2[1], seed)
    xs0 = _subsampled(pts, m2[2], seed)
    ys0 = _subsampled(pts, m2[3], seed)
    lam_sub = sorted(
        set(lams[i] for i in _stride_indices(len(lams), m2[4], seed)) | {0.0, 1.0}
    )
    for x in xs:
        for y in ys:
            for x0 in xs0:
                gxx0 = abs(eval_g(g, x, x0))
                for y0 in ys0:
                    gyy0 = abs(eval_g(g, y, y0))
                    for lam in lam_sub:
                        lhs = abs(
                            eval_g(g, h_at(x, y, lam), h_at(x0, y0, lam))
                        )
                        rhs = lam * gxx0 + (1.0 - lam) * gyy0
                        if lhs > rhs + tol.eps_ineq:
                            return CheckReport(
                                "convex-structure", _FALSIFIED,
                                {"x": x, "y": y, "x0": x0, "y0": y0, "lam": lam},
                                lhs=lhs, rhs=rhs, note="condition two",
                            )
    return CheckReport("convex-structure", _HOLDS)


def convex_condition_sides(
    h: ConvexStructure,
    g: GFunction,
    witness: Mapping[str, Union[Point, float]],
) -> tuple[float, float]:
    """Recompute the two sides of a convex-structure condition at a witness."""
    lam = float(witness["lam"])  # type: ignore[arg-type]
    if "x0" in witness and "y0" in witness:
        x, y = witness["x"], witness["y"]
        x0, y0 = witness["x0"], witness["y0"]
        lhs = abs(eval_g(g, h.apply(x, y, lam), h.apply(x0, y0, lam)))
        rhs = lam * abs(eval_g(g, x, x0)) + (1 - lam) * abs(eval_g(g, y, y0))
        return lhs, rhs
    x0, x, y = witness["x0"], witness["x"], witness["y"]
    lhs = abs(eval_g(g, x0, h.apply(x, y, lam)))
    rhs = lam * abs(eval_g(g, x0, x)) + (1 - lam) * abs(eval_g(g, x0, y))
    return lhs, rhs


def check_starshaped(
    h: ConvexStructure,
    a: SampleSet,
    r: Point,
    lambda_grid: Sequence[float],
    tol: ToleranceSet,
    membership_tol: float = 1e-9,
) -> CheckReport:
    """Holds when H(r, x, lam) stays inside the set for all sampled x, lam."""
    if not a.contains(r, max(membership_tol, tol.eps_prox)):
        raise GSpaceError(f"centre {r} is not a member of {a.name or 'the set'}")
    for x in a.points:
        for lam in lambda_grid:
            image = h.apply(r, x, lam)
            if not a.contains(image, max(membership_tol, tol.eps_prox)):
                return CheckReport(
                    "starshaped", _FALSIFIED,
                    {"x": x, "lam": lam, "image": image},
                    note="interpolant escapes the set",
                )
    return CheckReport("starshaped", _HOLDS)


def check_side_condition(
    g: GFunction,
    core: ProximalCore,
    r: Point,
    s: Point,
    tol: ToleranceSet,
) -> CheckReport:
    """Check that abs(g(r,x)) + abs(g(y,s)) sits at twice the inner proximity
    level for every sampled x in b_g, y in a_g."""
    inner = proximal_core(g, core.a_g, core.b_g, tol)
    target = 2.0 * inner.d_g
    for x in core.b_g.points:
        grx = abs(eval_g(g, r, x))
        for y in core.a_g.points:
            lhs = grx + abs(eval_g(g, y, s))
            if abs(lhs - target) > tol.eps_ineq:
                return CheckReport(
                    "side-condition", _FALSIFIED,
                    {"x": x, "y": y}, lhs=lhs, rhs=target,
                )
    return CheckReport("side-condition", _HOLDS, note=f"target {target!r}")
