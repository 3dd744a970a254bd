"""Built-in systems, set pairs, cyclic triples, and the instance registry.

Example 1 is a half-line system whose first-side map either doubles a point
or quarters its dyadic remainder, depending on the parity of floor(log2 x);
its penalties vanish exactly on the even-parity bands.  The other built-ins
are a degenerate single-region family, sum-metric products, and three-set
cyclic triples solved through a product-space reduction.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .errors import InvalidInputError, RefutedError
from .spaces import (
    MetricSpace,
    Point,
    Region,
    SetPair,
    as_point,
    circle_region,
    compose_spaces,
    distance,
    interval,
    product_region,
    product_space,
    real_line,
    sample_region,
    singleton_region,
    segment_region,
    vector_space,
)
from .systems import (
    Atom,
    CElement,
    CPair,
    CUniverse,
    ExternalFactor,
    ExternalFactorSystem,
    Quadruple,
    RelationP,
)

#: slack for the summing-contraction residual gate, matching RESIDUAL_TOL
CYCLIC_RESIDUAL_TOL = 1e-10


# ---------------------------------------------------------------------------
# example 1: half-line system with dyadic-parity penalties


def floor_log2(x: float) -> int:
    """Exact floor(log2 x) for positive floats via the binary exponent."""
    if x <= 0:
        raise InvalidInputError("floor_log2 needs a positive argument")
    mantissa, exp = math.frexp(x)  # x = mantissa * 2**exp, mantissa in [0.5, 1)
    return exp - 1


def pow2_floor(x: float) -> float:
    """Largest power of two not exceeding x; 0 by convention at x = 0."""
    if x == 0:
        return 0.0
    return math.ldexp(1.0, floor_log2(x))


def alpha_parity(x: float) -> int:
    """Euclidean mod-2 parity of floor(log2 x); 0 at x = 0."""
    if x < 0:
        raise InvalidInputError("alpha_parity needs a nonnegative argument")
    if x == 0:
        return 0
    return floor_log2(x) % 2


def example1_T(x: float) -> float:
    """First-side point map: doubles on odd bands, quarters the remainder on even."""
    if x < 0:
        raise InvalidInputError("example1_T needs a nonnegative argument")
    a = alpha_parity(x)
    return 2.0 * x * a + 0.25 * (x - pow2_floor(x)) * (1 - a)


def example1_Tb(y: float) -> float:
    """Second-side point map; contracts the gap below -1 by 1/8 or doubles it."""
    g = y + 1.0
    return g / 8.0 + (15.0 / 8.0) * g * alpha_parity(-g) - 1.0


def example1_fa(c: float) -> float:
    if c >= 0:
        return 4.0 * c * alpha_parity(c)
    if c <= -1:
        return 0.0
    raise InvalidInputError(f"{c} is outside the external set")


def example1_fb(c: float) -> float:
    if c >= 0:
        return 0.0
    if c <= -1:
        return -4.0 * (c + 1.0) * alpha_parity(-c - 1.0)
    raise InvalidInputError(f"{c} is outside the external set")


def example1_pair() -> SetPair:
    a = interval(0.0, math.inf, sample_hi=100.0, name="[0,inf)")
    b = interval(-math.inf, -1.0, sample_lo=-100.0, name="(-inf,-1]")
    return SetPair(real_line(), a, b, dist_ab=1.0)


def example1_system() -> ExternalFactorSystem:
    """Half-line system: both external sequences mirror the point iterates."""
    pair = example1_pair()

    def t_a(x: Point, c: CElement) -> Point:
        return (example1_T(x[0]),)

    def h_a(x: Point, c: CElement) -> CElement:
        return (example1_T(x[0]),)

    def t_b(y: Point, c: CElement) -> Point:
        return (example1_Tb(y[0]),)

    def h_b(y: Point, c: CElement) -> CElement:
        return (example1_Tb(y[0]),)

    def p_contains(x: Point, y: Point, u: CElement, v: CElement) -> bool:
        return pair.a.contains(x) and pair.b.contains(y) and u == x and v == y

    def p_draw(rng: random.Random, n: int) -> list[Quadruple]:
        out = []
        for _ in range(n):
            x = (rng.uniform(0.0, 100.0),)
            y = (rng.uniform(-100.0, -1.0),)
            out.append(Quadruple(x, y, x, y))
        return out

    def c_draw(rng: random.Random, n: int) -> list[CElement]:
        out: list[CElement] = []
        for _ in range(n):
            if rng.random() < 0.5:
                out.append((rng.uniform(0.0, 100.0),))
            else:
                out.append((rng.uniform(-100.0, -1.0),))
        return out

    return ExternalFactorSystem(
        name="e1",
        pair=pair,
        c_universe=CUniverse("union of both half-lines", c_draw),
        t_a=t_a,
        h_a=h_a,
        t_b=t_b,
        h_b=h_b,
        f_a=ExternalFactor(lambda c: example1_fa(c[0]), 0.0),
        f_b=ExternalFactor(lambda c: example1_fb(c[0]), 0.0),
        p=RelationP(p_contains, p_draw),
        lam=5.0 / 8.0,
    )


# ---------------------------------------------------------------------------
# degenerate single-region systems


def estimate_lipschitz(
    map_fn: Callable[[Point], Point],
    space: MetricSpace,
    region: Region,
    samples: int = 2000,
    seed: int = 0,
) -> float:
    """Supremum of sampled displacement ratios; a lower estimate of the constant."""
    pts = sample_region(region, 2 * samples, seed)
    best = 0.0
    for i in range(0, len(pts) - 1, 2):
        x, y = pts[i], pts[i + 1]
        dxy = distance(space, x, y)
        if dxy <= 1e-12:
            continue
        best = max(best, distance(space, map_fn(x), map_fn(y)) / dxy)
    return best


def banach_system(
    map_fn: Callable[[Point], Point],
    space: MetricSpace,
    region: Region,
    lipschitz: float,
    *,
    name: str = "banach",
    samples: int = 2000,
    seed: int = 0,
) -> ExternalFactorSystem:
    """Single-region single-map system with a trivial external set.

    Both sides share the region and the map, the penalties vanish, and the
    contraction inequality collapses to the classical displacement bound.
    The declared constant is probed against a sampled estimate before the
    system is built; an exceedance refuses construction.
    """
    if not (0.0 <= lipschitz < 1.0):
        raise InvalidInputError("lipschitz constant must be in [0,1)")
    est = estimate_lipschitz(map_fn, space, region, samples, seed)
    if est > lipschitz + 1e-9:
        raise RefutedError(
            f"refuted at construction: sampled displacement ratio {est:.6g} "
            f"exceeds declared constant {lipschitz}"
        )
    atom = Atom("unit")
    pair = SetPair(space, region, region, dist_ab=0.0)

    def p_contains(x: Point, y: Point, u: CElement, v: CElement) -> bool:
        return region.contains(x) and region.contains(y) and u == atom and v == atom

    def p_draw(rng: random.Random, n: int) -> list[Quadruple]:
        xs = region.draw(rng, n)
        ys = region.draw(rng, n)
        return [Quadruple(x, y, atom, atom) for x, y in zip(xs, ys)]

    return ExternalFactorSystem(
        name=name,
        pair=pair,
        c_universe=CUniverse("single atom", lambda rng, n: [atom] * n),
        t_a=lambda x, c: map_fn(x),
        h_a=lambda x, c: atom,
        t_b=lambda y, c: map_fn(y),
        h_b=lambda y, c: atom,
        f_a=ExternalFactor(lambda c: 0.0, 0.0),
        f_b=ExternalFactor(lambda c: 0.0, 0.0),
        p=RelationP(p_contains, p_draw),
        lam=lipschitz,
    )


def _whole_line_region() -> Region:
    return interval(-math.inf, math.inf, name="R")


def banach_half_system() -> ExternalFactorSystem:
    return banach_system(
        lambda x: (x[0] / 2.0,), real_line(), _whole_line_region(), 0.5, name="banach-half"
    )


def banach_affine_system() -> ExternalFactorSystem:
    return banach_system(
        lambda x: ((x[0] + 4.0) / 2.0,),
        real_line(),
        _whole_line_region(),
        0.5,
        name="banach-affine",
    )


# ---------------------------------------------------------------------------
# sum-metric product composition


def product_system(
    s1: ExternalFactorSystem, s2: ExternalFactorSystem
) -> ExternalFactorSystem:
    """Component-wise composition on the sum-metric product pair.

    Penalty values add, the relation is the component conjunction, and the
    composed constant is the larger of the two: each component inequality
    still holds at it because the one-step value never drops below the floor.
    Callers are expected to pass systems that individually certify.
    """
    d1 = s1.pair.space.dim
    if d1 is None or s2.pair.space.dim is None:
        raise InvalidInputError("product systems need explicit dimensions")
    pair = product_space(s1.pair, s2.pair)

    def split(p: Point) -> tuple[Point, Point]:
        return p[:d1], p[d1:]

    def need_pair(c: CElement) -> CPair:
        if not isinstance(c, CPair):
            raise InvalidInputError("product external elements must be component pairs")
        return c

    def t_a(x: Point, c: CElement) -> Point:
        x1, x2 = split(x)
        cp = need_pair(c)
        return s1.t_a(x1, cp.left) + s2.t_a(x2, cp.right)

    def h_a(x: Point, c: CElement) -> CElement:
        x1, x2 = split(x)
        cp = need_pair(c)
        return CPair(s1.h_a(x1, cp.left), s2.h_a(x2, cp.right))

    def t_b(y: Point, c: CElement) -> Point:
        y1, y2 = split(y)
        cp = need_pair(c)
        return s1.t_b(y1, cp.left) + s2.t_b(y2, cp.right)

    def h_b(y: Point, c: CElement) -> CElement:
        y1, y2 = split(y)
        cp = need_pair(c)
        return CPair(s1.h_b(y1, cp.left), s2.h_b(y2, cp.right))

    def f_a_fn(c: CElement) -> float:
        cp = need_pair(c)
        return s1.f_a.fn(cp.left) + s2.f_a.fn(cp.right)

    def f_b_fn(c: CElement) -> float:
        cp = need_pair(c)
        return s1.f_b.fn(cp.left) + s2.f_b.fn(cp.right)

    def add_or_none(a: Optional[float], b: Optional[float]) -> Optional[float]:
        return None if a is None or b is None else a + b

    def p_contains(x: Point, y: Point, u: CElement, v: CElement) -> bool:
        if not isinstance(u, CPair) or not isinstance(v, CPair):
            return False
        x1, x2 = split(x)
        y1, y2 = split(y)
        return s1.p.contains(x1, y1, u.left, v.left) and s2.p.contains(
            x2, y2, u.right, v.right
        )

    def p_draw(rng: random.Random, n: int) -> list[Quadruple]:
        q1s = s1.p.draw(rng, n)
        q2s = s2.p.draw(rng, n)
        return [
            Quadruple(q1.x + q2.x, q1.y + q2.y, CPair(q1.u, q2.u), CPair(q1.v, q2.v))
            for q1, q2 in zip(q1s, q2s)
        ]

    def c_draw(rng: random.Random, n: int) -> list[CElement]:
        left = s1.c_universe.draw(rng, n)
        right = s2.c_universe.draw(rng, n)
        return [CPair(a, b) for a, b in zip(left, right)]

    return ExternalFactorSystem(
        name=f"{s1.name}x{s2.name}",
        pair=pair,
        c_universe=CUniverse(f"{s1.c_universe.name} x {s2.c_universe.name}", c_draw),
        t_a=t_a,
        h_a=h_a,
        t_b=t_b,
        h_b=h_b,
        f_a=ExternalFactor(f_a_fn, add_or_none(s1.f_a.inf_value, s2.f_a.inf_value)),
        f_b=ExternalFactor(f_b_fn, add_or_none(s1.f_b.inf_value, s2.f_b.inf_value)),
        p=RelationP(p_contains, p_draw),
        lam=max(s1.lam, s2.lam),
    )


def example1_product_system() -> ExternalFactorSystem:
    return product_system(example1_system(), example1_system())


# ---------------------------------------------------------------------------
# three-set cyclic triples and their product-space reduction


@dataclass(frozen=True)
class CyclicTriple:
    """Three regions cycled by one map, with a summed contraction constant.

    dists holds the exact pairwise set distances (d12, d23, d31).
    """

    space: MetricSpace
    regions: tuple[Region, Region, Region]
    t: Callable[[Point], Point]
    k: float
    dists: tuple[float, float, float]

    @property
    def d_total(self) -> float:
        return sum(self.dists)


def cyclic_residual(ct: CyclicTriple, x1: Point, x2: Point, x3: Point) -> float:
    """Slack of the summed contraction inequality at one triple (>= 0 iff it holds)."""
    d = ct.space.metric
    perim = d(x1, x2) + d(x2, x3) + d(x3, x1)
    tx1, tx2, tx3 = ct.t(x1), ct.t(x2), ct.t(x3)
    image = d(tx1, tx2) + d(tx2, tx3) + d(tx3, tx1)
    return ct.k * perim + (1.0 - ct.k) * ct.d_total - image


def certify_cyclic(
    ct: CyclicTriple, samples: int = 2000, seed: int = 0
) -> tuple[float, Optional[tuple[Point, Point, Point]]]:
    """Minimum sampled residual and the worst triple."""
    rng = random.Random(seed)
    xs1 = ct.regions[0].draw(rng, samples)
    xs2 = ct.regions[1].draw(rng, samples)
    xs3 = ct.regions[2].draw(rng, samples)
    worst = math.inf
    arg = None
    for x1, x2, x3 in zip(xs1, xs2, xs3):
        r = cyclic_residual(ct, x1, x2, x3)
        if r < worst:
            worst, arg = r, (x1, x2, x3)
    return worst, arg


def rotate_cyclic(ct: CyclicTriple, shift: int) -> CyclicTriple:
    """Relabel the triple so that region shift becomes the first one."""
    i = shift % 3
    regions = tuple(ct.regions[(i + j) % 3] for j in range(3))
    dists = tuple(ct.dists[(i + j) % 3] for j in range(3))
    return CyclicTriple(ct.space, regions, ct.t, ct.k, dists)


ONE_ATOM = Atom("one")


def cyclic3_reduce(
    ct: CyclicTriple, *, samples: int = 1000, seed: int = 0
) -> ExternalFactorSystem:
    """Rebuild a cyclic triple as a paired system on the product space.

    First-side points are diagonal pairs over the first region driven by the
    cubed map; second-side points pair the other two regions; the second
    penalty charges the cross gap inside a second-side point.  The composed
    constant is k cubed.  Construction refuses when the sampled summed
    residual dips below the certification slack.
    """
    worst, arg = certify_cyclic(ct, samples, seed)
    if worst < -CYCLIC_RESIDUAL_TOL:
        raise RefutedError(
            f"refuted at construction: summed-contraction residual {worst:.3g} at {arg}"
        )
    base = ct.space
    if base.dim is None:
        raise InvalidInputError("cyclic reduction needs an explicit dimension")
    d = base.dim
    space2 = compose_spaces(base, base)
    a1, a2, a3 = ct.regions
    region_a = product_region(a1, a1, d)
    region_b = product_region(a2, a3, d)
    d12, d23, d31 = ct.dists
    pair = SetPair(space2, region_a, region_b, dist_ab=d12 + d31)

    def t3(p: Point) -> Point:
        return ct.t(ct.t(ct.t(p)))

    def t_a(x: Point, c: CElement) -> Point:
        return t3(x[:d]) + t3(x[d:])

    def t_b(y: Point, c: CElement) -> Point:
        return t3(y[:d]) + t3(y[d:])

    def h_b(y: Point, c: CElement) -> CElement:
        return t_b(y, c)

    def f_b_fn(c: CElement) -> float:
        if isinstance(c, Atom):
            if c == ONE_ATOM:
                return d23
            raise InvalidInputError(f"unknown atom {c} in the external set")
        return base.metric(c[:d], c[d:])

    def diagonal(x: Point) -> bool:
        return x[:d] == x[d:]

    def p_contains(x: Point, y: Point, u: CElement, v: CElement) -> bool:
        return (
            region_a.contains(x)
            and diagonal(x)
            and region_b.contains(y)
            and u == ONE_ATOM
            and v == y
        )

    def p_draw(rng: random.Random, n: int) -> list[Quadruple]:
        gs = a1.draw(rng, n)
        bs = a2.draw(rng, n)
        cs = a3.draw(rng, n)
        return [Quadruple(g + g, b + c, ONE_ATOM, b + c) for g, b, c in zip(gs, bs, cs)]

    def c_draw(rng: random.Random, n: int) -> list[CElement]:
        out: list[CElement] = []
        bs = a2.draw(rng, n)
        cs = a3.draw(rng, n)
        for b, c in zip(bs, cs):
            out.append(ONE_ATOM if rng.random() < 0.25 else b + c)
        return out

    return ExternalFactorSystem(
        name="cyclic3-reduction",
        pair=pair,
        c_universe=CUniverse("second-side pairs plus one atom", c_draw),
        t_a=t_a,
        h_a=lambda x, c: ONE_ATOM,
        t_b=t_b,
        h_b=h_b,
        f_a=ExternalFactor(lambda c: 0.0, 0.0),
        f_b=ExternalFactor(f_b_fn, d23),
        p=RelationP(p_contains, p_draw),
        lam=ct.k ** 3,
    )


@dataclass(frozen=True)
class BestProximityResult:
    """Limits of the three rotated reductions with their residuals."""

    z: tuple[Point, Point, Point]
    gap_residuals: tuple[float, float, float]
    cycle_residuals: tuple[float, float, float]

    def to_dict(self) -> dict:
        from .spaces import format_point

        return {
            "z": [format_point(p) for p in self.z],
            "gap_residuals": list(self.gap_residuals),
            "cycle_residuals": list(self.cycle_residuals),
        }


def cyclic3_solve(
    ct: CyclicTriple,
    starts: Optional[Sequence[Point]] = None,
    max_steps: int = 400,
    tol: float = 1e-9,
    *,
    samples: int = 1000,
    seed: int = 0,
) -> Optional[BestProximityResult]:
    """Locate the three best-proximity points through rotated reductions.

    Each rotation contributes the diagonal limit over its first region; the
    second-side limits converge in distance only, so they are not read off.
    Returns None (undecided) when any rotation misses the confirmation
    window within max_steps.
    """
    from .iteration import run_paired

    d = ct.space.dim
    zs: list[Point] = []
    for i in range(3):
        rotated = rotate_cyclic(ct, i)
        system = cyclic3_reduce(rotated, samples=samples, seed=seed)
        rng = random.Random(seed + 17 * i)
        if starts is not None and i < len(starts) and starts[i] is not None:
            g = as_point(starts[i])
        else:
            g = rotated.regions[0].draw(rng, 1)[0]
        b = rotated.regions[1].draw(rng, 1)[0]
        c = rotated.regions[2].draw(rng, 1)[0]
        q0 = Quadruple(g + g, b + c, ONE_ATOM, b + c)
        _, report = run_paired(system, q0, max_steps, tol)
        if report.limit is None:
            return None
        zs.append(report.limit[:d])
    z1, z2, z3 = zs
    metric = ct.space.metric
    d12, d23, d31 = ct.dists
    gaps = (
        abs(metric(z1, z2) - d12),
        abs(metric(z2, z3) - d23),
        abs(metric(z3, z1) - d31),
    )
    cycles = (
        metric(ct.t(z1), z2),
        metric(ct.t(z2), z3),
        metric(ct.t(z3), z1),
    )
    return BestProximityResult((z1, z2, z3), gaps, cycles)


def affine_cyclic_example() -> CyclicTriple:
    """Three unit segments pointing outward from an equilateral unit triangle.

    The map carries each segment onto the near half of the next one, halving
    the outward parameter, so the summed contraction holds with k = 1/2 and
    the best-proximity points are the three inner endpoints.
    """
    r = 1.0 / math.sqrt(3.0)
    angles = [math.pi / 2.0 + j * 2.0 * math.pi / 3.0 for j in range(3)]
    inner = [(r * math.cos(a), r * math.sin(a)) for a in angles]
    unit = [(math.cos(a), math.sin(a)) for a in angles]
    outer = [
        (e[0] + u[0], e[1] + u[1]) for e, u in zip(inner, unit)
    ]
    space = vector_space(2, "euclidean")
    regions = tuple(
        segment_region(inner[j], outer[j], name=f"spoke-{j + 1}") for j in range(3)
    )
    m = 0.5

    def param(p: Point, j: int) -> float:
        t = (p[0] - inner[j][0]) * unit[j][0] + (p[1] - inner[j][1]) * unit[j][1]
        return min(1.0, max(0.0, t))

    def t(p: Point) -> Point:
        for j in range(3):
            if regions[j].contains(p):
                nxt = (j + 1) % 3
                s = m * param(p, j)
                return (
                    inner[nxt][0] + s * unit[nxt][0],
                    inner[nxt][1] + s * unit[nxt][1],
                )
        raise InvalidInputError(f"point {p} is on none of the three segments")

    return CyclicTriple(space, regions, t, m, (1.0, 1.0, 1.0))


def singleton_cyclic_example() -> CyclicTriple:
    """Degenerate triple of three collinear singletons; equality case throughout."""
    pts = [(10.0,), (20.0,), (30.0,)]
    regions = tuple(singleton_region(p, name=f"pt-{int(p[0])}") for p in pts)

    def t(p: Point) -> Point:
        for j in range(3):
            if p == pts[j]:
                return pts[(j + 1) % 3]
        raise InvalidInputError(f"point {p} is not one of the three singletons")

    return CyclicTriple(real_line(), regions, t, 0.5, (10.0, 10.0, 20.0))


# ---------------------------------------------------------------------------
# scan fixtures: set pairs with candidate-sequence generators


def open_interval_pair() -> SetPair:
    a = interval(0.0, 1.0, closed_lo=False, closed_hi=False, complete=False, name="(0,1)")
    b = interval(2.0, 3.0, closed_lo=False, closed_hi=False, complete=False, name="(2,3)")
    return SetPair(real_line(), a, b, dist_ab=1.0)


def circle_origin_pair() -> SetPair:
    space = vector_space(2, "euclidean")
    a = circle_region((0.0, 0.0), 1.0, name="unit-circle")
    b = singleton_region((0.0, 0.0), name="origin")
    return SetPair(space, a, b, dist_ab=1.0)


def _geometric(
    target: float, c: float, ratio: float, length: int, sign: float, floor: float = 0.0
) -> list[Point]:
    # the floor keeps strictly-open boundaries unreached despite float absorption
    return [(target + sign * max(c * ratio ** n, floor),) for n in range(length)]


def pair_cd_generator(
    name: str, seed: int, length: int = 80
) -> Callable[[int], tuple[list[Point], list[Point]]]:
    """Candidate pairs converging in distance toward the facing boundary.

    For the half-line pair they settle on member points; for the open pair
    the first sequence escapes toward the missing endpoint.
    """

    def gen(i: int) -> tuple[list[Point], list[Point]]:
        rng = random.Random(f"cd:{name}:{seed}:{i}")
        c1, c2 = rng.uniform(0.05, 0.5), rng.uniform(0.05, 0.5)
        r1, r2 = rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7)
        if name == "e1-pair":
            xs = _geometric(0.0, c1 * 80.0, r1, length, +1.0)
            ys = _geometric(-1.0, c2 * 80.0, r2, length, -1.0)
        elif name == "open-interval-pair":
            xs = _geometric(1.0, c1, r1, length, -1.0, floor=1e-13)
            ys = _geometric(2.0, c2, r2, length, +1.0, floor=1e-13)
        else:
            raise InvalidInputError(f"no candidate generator for pair {name}")
        return xs, ys

    return gen


def pair_uc_generator(
    name: str, seed: int, length: int = 80
) -> Callable[[int], tuple[list[Point], list[Point], list[Point]]]:
    """Candidate triples approaching the pair distance from two first-set paths.

    On the circle the first candidate puts the two paths at exactly antipodal
    rest points, the known failure of the collapse property there.
    """

    def gen(i: int) -> tuple[list[Point], list[Point], list[Point]]:
        rng = random.Random(f"uc:{name}:{seed}:{i}")
        if name == "e1-pair":
            c1, c2, c3 = (rng.uniform(0.05, 0.5) * 80.0 for _ in range(3))
            r1, r2, r3 = (rng.uniform(0.3, 0.7) for _ in range(3))
            xs = _geometric(0.0, c1, r1, length, +1.0)
            zs = _geometric(0.0, c2, r2, length, +1.0)
            ys = _geometric(-1.0, c3, r3, length, -1.0)
            return xs, zs, ys
        if name == "circle-origin-pair":
            th1 = 0.0 if i == 0 else rng.uniform(0.0, 2.0 * math.pi)
            th2 = math.pi if i == 0 else rng.uniform(0.0, 2.0 * math.pi)
            n = min(length, 40)
            xs = [(math.cos(th1), math.sin(th1))] * n
            zs = [(math.cos(th2), math.sin(th2))] * n
            ys = [(0.0, 0.0)] * n
            return xs, zs, ys
        raise InvalidInputError(f"no candidate generator for pair {name}")

    return gen


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class SystemInstance:
    name: str
    description: str
    build: Callable[[], ExternalFactorSystem]
    default_x0: Point
    default_y0: Point
    quadruple: Callable[[ExternalFactorSystem, Point, Point], Quadruple]
    witness: Callable[[ExternalFactorSystem], tuple[Point, CElement]]


@dataclass(frozen=True)
class CyclicInstance:
    name: str
    description: str
    build: Callable[[], CyclicTriple]


@dataclass(frozen=True)
class PairInstance:
    name: str
    description: str
    build: Callable[[], SetPair]


def _mirror_quadruple(system: ExternalFactorSystem, x: Point, y: Point) -> Quadruple:
    return Quadruple(x, y, x, y)


def _atom_quadruple(system: ExternalFactorSystem, x: Point, y: Point) -> Quadruple:
    return Quadruple(x, y, Atom("unit"), Atom("unit"))


def _product_quadruple(system: ExternalFactorSystem, x: Point, y: Point) -> Quadruple:
    # components mirror their own coordinates, as in the factor systems
    return Quadruple(x, y, CPair(x[:1], x[1:]), CPair(y[:1], y[1:]))


SYSTEMS: dict[str, SystemInstance] = {
    "e1": SystemInstance(
        "e1",
        "half-line system with dyadic-parity penalties, lambda 5/8",
        example1_system,
        (3.0,),
        (-2.0,),
        _mirror_quadruple,
        lambda system: ((-1.0,), (-1.0,)),
    ),
    "banach-half": SystemInstance(
        "banach-half",
        "halving map on the line, trivial external set",
        banach_half_system,
        (8.0,),
        (0.0,),
        _atom_quadruple,
        lambda system: ((0.0,), Atom("unit")),
    ),
    "banach-affine": SystemInstance(
        "banach-affine",
        "affine map (x+4)/2 on the line, fixed point 4",
        banach_affine_system,
        (8.0,),
        (0.0,),
        _atom_quadruple,
        lambda system: ((0.0,), Atom("unit")),
    ),
    "e1-product": SystemInstance(
        "e1-product",
        "sum-metric product of two copies of e1",
        example1_product_system,
        (3.0, 5.0),
        (-2.0, -3.0),
        _product_quadruple,
        lambda system: ((-1.0, -1.0), CPair((-1.0,), (-1.0,))),
    ),
}

CYCLIC: dict[str, CyclicInstance] = {
    "cyclic3-singleton": CyclicInstance(
        "cyclic3-singleton",
        "three collinear singletons, equality case of the summed contraction",
        singleton_cyclic_example,
    ),
    "cyclic3-affine": CyclicInstance(
        "cyclic3-affine",
        "three radial unit segments at an equilateral triangle, k = 1/2",
        affine_cyclic_example,
    ),
}

PAIRS: dict[str, PairInstance] = {
    "e1-pair": PairInstance(
        "e1-pair", "half-line pair of e1, distance 1", example1_pair
    ),
    "open-interval-pair": PairInstance(
        "open-interval-pair",
        "open intervals (0,1) and (2,3); first region incomplete",
        open_interval_pair,
    ),
    "circle-origin-pair": PairInstance(
        "circle-origin-pair",
        "unit circle against the origin; non-convex first region",
        circle_origin_pair,
    ),
}

#: convenience alias used by the command line
ALIASES = {"banach": "banach-half"}


def list_instances() -> list[tuple[str, str, str]]:
    rows = [(e.name, "system", e.description) for e in SYSTEMS.values()]
    rows += [(e.name, "cyclic", e.description) for e in CYCLIC.values()]
    rows += [(e.name, "pair", e.description) for e in PAIRS.values()]
    return rows


# ---------------------------------------------------------------------------
# JSON-described instances (degenerate external-factor shape)

_JSON_MAPS: dict[str, Callable[..., Callable[[float], float]]] = {
    "affine": lambda slope=1.0, offset=0.0: (lambda x: slope * x + offset),
    "identity": lambda: (lambda x: x),
}


def _region_from_json(spec: dict) -> Region:
    kind = spec.get("kind", "interval")
    if kind != "interval":
        raise InvalidInputError(f"unsupported region kind {kind!r}")
    lo = float(spec.get("lo", -math.inf))
    hi = float(spec.get("hi", math.inf))
    return interval(
        lo,
        hi,
        closed_lo=bool(spec.get("closed_lo", True)),
        closed_hi=bool(spec.get("closed_hi", True)),
        sample_lo=spec.get("sample_lo"),
        sample_hi=spec.get("sample_hi"),
        complete=spec.get("complete"),
        name=spec.get("name"),
    )


def load_instance_json(path: str) -> SystemInstance:
    """Build a system instance from a JSON description.

    Supported shape: one real region per side, named scalar maps for both
    sides, zero penalties with supplied infima, an exact distance, and a
    declared constant.  The relation is the membership product.
    """
    with open(path) as fh:
        spec = json.load(fh)
    space_kind = spec.get("space", {}).get("kind", "real")
    if space_kind != "real":
        raise InvalidInputError(f"unsupported space kind {space_kind!r}")
    space = real_line()
    regions = spec.get("regions", {})
    region_a = _region_from_json(regions.get("a", {}))
    region_b = _region_from_json(regions.get("b", regions.get("a", {})))
    maps = spec.get("maps", {})

    def scalar_map(key: str) -> Callable[[float], float]:
        m = dict(maps.get(key, {"name": "identity"}))
        name = m.pop("name")
        if name not in _JSON_MAPS:
            raise InvalidInputError(f"unknown map name {name!r}")
        return _JSON_MAPS[name](**m)

    ta, tb = scalar_map("t_a"), scalar_map("t_b")
    lam = float(spec["lambda"])
    dist = float(spec.get("dist", 0.0))
    infima = spec.get("infima", {"a": 0.0, "b": 0.0})
    atom = Atom("unit")
    pair = SetPair(space, region_a, region_b, dist_ab=dist)

    def p_contains(x, y, u, v):
        return region_a.contains(x) and region_b.contains(y) and u == atom and v == atom

    def p_draw(rng: random.Random, n: int) -> list[Quadruple]:
        xs = region_a.draw(rng, n)
        ys = region_b.draw(rng, n)
        return [Quadruple(x, y, atom, atom) for x, y in zip(xs, ys)]

    name = spec.get("name", "json-instance")
    system = ExternalFactorSystem(
        name=name,
        pair=pair,
        c_universe=CUniverse("single atom", lambda rng, n: [atom] * n),
        t_a=lambda x, c: (ta(x[0]),),
        h_a=lambda x, c: atom,
        t_b=lambda y, c: (tb(y[0]),),
        h_b=lambda y, c: atom,
        f_a=ExternalFactor(lambda c: 0.0, float(infima.get("a", 0.0))),
        f_b=ExternalFactor(lambda c: 0.0, float(infima.get("b", 0.0))),
        p=RelationP(p_contains, p_draw),
        lam=lam,
    )
    x0 = as_point(spec.get("x0", sample_region(region_a, 1, 0)[0]))
    y0 = as_point(spec.get("y0", sample_region(region_b, 1, 1)[0]))
    return SystemInstance(
        name,
        f"JSON instance from {path}",
        lambda: system,
        x0,
        y0,
        _atom_quadruple,
        lambda s: (y0, atom),
    )
