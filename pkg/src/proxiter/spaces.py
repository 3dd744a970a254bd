"""Metric spaces, regions, set pairs, and sum-metric product composition.

Points are fixed-length tuples of floats.  Every sampler is driven by an
explicit seed so that repeated campaigns reproduce bit for bit.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

from .errors import EstimationFailureError, InvalidInputError

Point = tuple[float, ...]

#: membership slack for regions defined by an implicit equation (segments, circles)
GEOMETRY_TOL = 1e-9


def as_point(value: Union[float, int, Sequence[float]]) -> Point:
    """Coerce a scalar or a coordinate sequence to a Point tuple."""
    if isinstance(value, (int, float)):
        return (float(value),)
    return tuple(float(v) for v in value)


def format_point(p: Point, digits: int = 17) -> str:
    """Semicolon-joined decimal form; round-trips exactly at 17 digits."""
    return ";".join(f"{c:.{digits}g}" for c in p)


def parse_point(text: str) -> Point:
    return tuple(float(part) for part in text.replace(";", ",").split(","))


@dataclass(frozen=True)
class MetricSpace:
    """A point universe together with its distance function."""

    name: str
    dim: Optional[int]  # None marks an opaque universe
    metric: Callable[[Point, Point], float]


def distance(space: MetricSpace, x: Point, y: Point) -> float:
    """Evaluate the space's metric, validating dimensions for vector spaces."""
    if space.dim is not None and (len(x) != space.dim or len(y) != space.dim):
        raise InvalidInputError(
            f"dimension mismatch in {space.name}: got {len(x)}/{len(y)}, want {space.dim}"
        )
    return space.metric(x, y)


def _abs_metric(x: Point, y: Point) -> float:
    return abs(x[0] - y[0])


def real_line() -> MetricSpace:
    return MetricSpace("R", 1, _abs_metric)


def vector_space(dim: int, metric: str = "sum") -> MetricSpace:
    """R^dim under the coordinate-sum metric or the Euclidean one."""
    if metric == "sum":
        def d(x: Point, y: Point) -> float:
            return sum(abs(a - b) for a, b in zip(x, y))
    elif metric == "euclidean":
        def d(x: Point, y: Point) -> float:
            return math.sqrt(sum((a - b) ** 2 for a, b in zip(x, y)))
    else:
        raise InvalidInputError(f"unknown metric kind {metric!r}")
    return MetricSpace(f"R^{dim}[{metric}]", dim, d)


def compose_spaces(s1: MetricSpace, s2: MetricSpace) -> MetricSpace:
    """Product universe under the sum of the component metrics."""
    if s1.dim is None or s2.dim is None:
        raise InvalidInputError("product composition needs explicit dimensions")
    d1 = s1.dim

    def d(x: Point, y: Point) -> float:
        return s1.metric(x[:d1], y[:d1]) + s2.metric(x[d1:], y[d1:])

    return MetricSpace(f"({s1.name})x({s2.name})", d1 + s2.dim, d)


@dataclass(frozen=True)
class Region:
    """A membership predicate plus a deterministic seeded sampler.

    The ``complete`` flag is asserted by the instance author; it is not
    verifiable from samples.
    """

    name: str
    contains: Callable[[Point], bool]
    draw: Callable[[random.Random, int], list[Point]]
    complete: bool = False


def sample_region(region: Region, n: int, seed: int) -> list[Point]:
    """n member points, reproducible per seed."""
    if n < 0:
        raise InvalidInputError("sample count must be nonnegative")
    if n == 0:
        return []
    pts = region.draw(random.Random(seed), n)
    if len(pts) < n:
        raise EstimationFailureError(
            f"sampler exhaustion in region {region.name}: {len(pts)} of {n}"
        )
    for p in pts:
        if not region.contains(p):
            raise EstimationFailureError(
                f"sampler for region {region.name} produced non-member {p}"
            )
    return pts


def interval(
    lo: float,
    hi: float,
    *,
    closed_lo: bool = True,
    closed_hi: bool = True,
    sample_lo: Optional[float] = None,
    sample_hi: Optional[float] = None,
    complete: Optional[bool] = None,
    name: Optional[str] = None,
) -> Region:
    """A real interval region; infinite ends get a truncated sampling box."""
    s_lo = sample_lo if sample_lo is not None else (lo if math.isfinite(lo) else -100.0)
    s_hi = sample_hi if sample_hi is not None else (hi if math.isfinite(hi) else 100.0)
    if not closed_lo:
        s_lo = s_lo + min(1e-9, (s_hi - s_lo) * 1e-9)
    if not closed_hi:
        s_hi = s_hi - min(1e-9, (s_hi - s_lo) * 1e-9)

    def contains(p: Point) -> bool:
        v = p[0]
        ok_lo = v >= lo if closed_lo else v > lo
        ok_hi = v <= hi if closed_hi else v < hi
        return ok_lo and ok_hi

    def draw(rng: random.Random, n: int) -> list[Point]:
        return [(rng.uniform(s_lo, s_hi),) for _ in range(n)]

    if name is None:
        name = f"{'[' if closed_lo else '('}{lo};{hi}{']' if closed_hi else ')'}"
    if complete is None:
        complete = closed_lo and closed_hi
    return Region(name, contains, draw, complete)


def singleton_region(p: Union[float, Sequence[float]], name: Optional[str] = None) -> Region:
    pt = as_point(p)
    return Region(
        name or f"{{{format_point(pt, 6)}}}",
        lambda q: q == pt,
        lambda rng, n: [pt] * n,
        complete=True,
    )


def segment_region(a: Sequence[float], b: Sequence[float], name: Optional[str] = None) -> Region:
    """Closed straight segment between two points of R^d (Euclidean test)."""
    pa, pb = as_point(a), as_point(b)
    direction = tuple(q - p for p, q in zip(pa, pb))
    length2 = sum(d * d for d in direction)
    if length2 <= 0.0:
        raise InvalidInputError("degenerate segment")

    def project(p: Point) -> float:
        return sum((c - o) * d for c, o, d in zip(p, pa, direction)) / length2

    def at(t: float) -> Point:
        return tuple(o + t * d for o, d in zip(pa, direction))

    def contains(p: Point) -> bool:
        t = min(1.0, max(0.0, project(p)))
        q = at(t)
        return math.sqrt(sum((c - d) ** 2 for c, d in zip(p, q))) <= GEOMETRY_TOL

    def draw(rng: random.Random, n: int) -> list[Point]:
        return [at(rng.random()) for _ in range(n)]

    return Region(name or "segment", contains, draw, complete=True)


def circle_region(center: Sequence[float], radius: float, name: Optional[str] = None) -> Region:
    """The circle itself (not the disk); a deliberately non-convex region."""
    c = as_point(center)

    def contains(p: Point) -> bool:
        r = math.sqrt(sum((a - b) ** 2 for a, b in zip(p, c)))
        return abs(r - radius) <= GEOMETRY_TOL

    def draw(rng: random.Random, n: int) -> list[Point]:
        out = []
        for _ in range(n):
            th = rng.uniform(0.0, 2.0 * math.pi)
            out.append((c[0] + radius * math.cos(th), c[1] + radius * math.sin(th)))
        return out

    return Region(name or f"circle(r={radius})", contains, draw, complete=True)


def product_region(r1: Region, r2: Region, d1: int, name: Optional[str] = None) -> Region:
    """Cartesian product of two regions, coordinates concatenated."""

    def contains(p: Point) -> bool:
        return r1.contains(p[:d1]) and r2.contains(p[d1:])

    def draw(rng: random.Random, n: int) -> list[Point]:
        left = r1.draw(rng, n)
        right = r2.draw(rng, n)
        return [a + b for a, b in zip(left, right)]

    return Region(
        name or f"{r1.name}x{r2.name}",
        contains,
        draw,
        complete=r1.complete and r2.complete,
    )


@dataclass(frozen=True)
class SetPair:
    """Two regions of one space; dist_ab is exact when supplied, else estimated."""

    space: MetricSpace
    a: Region
    b: Region
    dist_ab: Optional[float] = None

    def __post_init__(self):
        if self.dist_ab is not None and self.dist_ab < 0:
            raise InvalidInputError("set distance cannot be negative")


def set_distance(pair: SetPair, samples: int = 0, seed: int = 0) -> tuple[float, str]:
    """Exact author-supplied distance, or a sampled upper estimate of the infimum.

    The estimate is the minimum over the samples x samples cross distances.
    On the absolute-difference line the closest cross pair is adjacent in the
    merged sorted order, so that case avoids the quadratic sweep exactly.
    """
    if pair.dist_ab is not None:
        return pair.dist_ab, "exact"
    if samples < 1:
        raise InvalidInputError("samples must be >= 1 when dist_ab is estimated")
    pts_a = sample_region(pair.a, samples, seed)
    pts_b = sample_region(pair.b, samples, seed + 1)
    if not pts_a or not pts_b:
        raise EstimationFailureError("empty sampler output while estimating set distance")
    if pair.space.metric is _abs_metric:
        merged = sorted(
            [(p[0], 0) for p in pts_a] + [(p[0], 1) for p in pts_b]
        )
        best = math.inf
        for (v1, side1), (v2, side2) in zip(merged, merged[1:]):
            if side1 != side2:
                best = min(best, v2 - v1)
        return best, "estimated"
    best = min(distance(pair.space, x, y) for x in pts_a for y in pts_b)
    return best, "estimated"


def product_space(p1: SetPair, p2: SetPair) -> SetPair:
    """(A1xA2, B1xB2) in the sum-metric product; exact distances add."""
    space = compose_spaces(p1.space, p2.space)
    d1 = p1.space.dim
    a = product_region(p1.a, p2.a, d1)
    b = product_region(p1.b, p2.b, d1)
    dist = None
    if p1.dist_ab is not None and p2.dist_ab is not None:
        dist = p1.dist_ab + p2.dist_ab
    return SetPair(space, a, b, dist)


def metric_axiom_violations(
    space: MetricSpace, points: Sequence[Point], slack: float = 1e-12
) -> list[str]:
    """Check identity, symmetry and the triangle inequality on point windows.

    Consecutive windows (p[i], p[i+1], p[i+2]) of the supplied list are used
    as test triples, so n points yield n-2 triples.
    """
    bad: list[str] = []
    for i in range(len(points) - 2):
        x, y, z = points[i], points[i + 1], points[i + 2]
        dxx = distance(space, x, x)
        dxy = distance(space, x, y)
        dyx = distance(space, y, x)
        dxz = distance(space, x, z)
        dyz = distance(space, y, z)
        if abs(dxx) > slack:
            bad.append(f"identity failed at {x}: rho(x,x)={dxx}")
        if abs(dxy - dyx) > slack:
            bad.append(f"symmetry failed at ({x},{y}): {dxy} vs {dyx}")
        if dxz > dxy + dyz + slack:
            bad.append(f"triangle failed at ({x},{y},{z}): {dxz} > {dxy}+{dyz}")
        if dxy < -slack:
            bad.append(f"negativity at ({x},{y}): {dxy}")
    return bad
