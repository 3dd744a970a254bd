"""Trace-level bound checks, tail-sup tables, and budgeted property falsifiers.

All falsifiers are budgeted searches.  Absence of a counterexample is
evidence, never proof: the checked properties quantify over all sequences
while only finitely many candidates are examined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .errors import InvalidInputError
from .iteration import PairedTrace
from .spaces import Point, SetPair, distance, format_point, set_distance
from .systems import ExternalFactorSystem, resolve_constants

#: slack used by the bound checks, matching the certification residual slack
BOUND_SLACK = 1e-10

#: length of the trailing window used for tail estimates
TAIL_WINDOW = 10


@dataclass(frozen=True)
class TailSupTable:
    """sup over n,m in [k, horizon] of a pairwise value, for each k."""

    k_min: int
    horizon: int
    values: tuple[float, ...]

    def at(self, k: int) -> float:
        if not (self.k_min <= k <= self.horizon):
            raise InvalidInputError(f"k={k} outside [{self.k_min}, {self.horizon}]")
        return self.values[k - self.k_min]


def tail_sup(fn: Callable[[int, int], float], k: int, horizon: int) -> float:
    """Finite-horizon stand-in for the limsup-style tail quantity."""
    if k > horizon:
        raise InvalidInputError("empty index window: k exceeds the horizon")
    return max(fn(n, m) for n in range(k, horizon + 1) for m in range(k, horizon + 1))


def tail_sup_table(
    fn: Callable[[int, int], float], horizon: int, k_min: int = 0
) -> TailSupTable:
    """All tail sups in one backward sweep; nonincreasing in k by construction."""
    if k_min > horizon:
        raise InvalidInputError("empty index window: k_min exceeds the horizon")
    values = [0.0] * (horizon - k_min + 1)
    running = -math.inf
    for k in range(horizon, k_min - 1, -1):
        edge = max(
            max(fn(k, m) for m in range(k, horizon + 1)),
            max(fn(n, k) for n in range(k, horizon + 1)),
        )
        running = max(running, edge)
        values[k - k_min] = running
    return TailSupTable(k_min, horizon, tuple(values))


def split_limit_validate(
    xs: Sequence[float],
    ys: Sequence[float],
    x_floor: float,
    y_floor: float,
    eps_schedule: Sequence[float],
    *,
    slack: float = 1e-12,
) -> bool:
    """Check the split-limit conclusion on finite data.

    For each epsilon: once the summed tail stays below x_floor + y_floor +
    epsilon, each sequence's tail must sit within epsilon of its own floor.
    An epsilon whose criterion is never met is vacuously fine.
    """
    if len(xs) != len(ys) or not xs:
        raise InvalidInputError("sequences must be nonempty and equally long")
    for name, seq, floor in (("x", xs, x_floor), ("y", ys, y_floor)):
        low = min(seq)
        if floor > low + slack:
            raise InvalidInputError(f"{name} floor {floor} exceeds a term ({low})")
    n = len(xs)
    for eps in eps_schedule:
        target = x_floor + y_floor + eps
        start = None
        for i in range(n - 1, -1, -1):
            if xs[i] + ys[i] <= target + slack:
                start = i
            else:
                break
        if start is None:
            continue  # criterion never met: vacuous
        for i in range(start, n):
            if xs[i] > x_floor + eps + slack or ys[i] > y_floor + eps + slack:
                return False
    return True


def _u_value(paired: PairedTrace, system: ExternalFactorSystem, m: int, n: int) -> float:
    rho = distance(system.pair.space, paired.a.points[m], paired.b.points[n])
    return rho + paired.a.f_values[m] + paired.b.f_values[n]


def check_l1_bound(
    paired: PairedTrace,
    system: ExternalFactorSystem,
    *,
    lam: Optional[float] = None,
    s: Optional[float] = None,
    slack: float = BOUND_SLACK,
) -> bool:
    """One-sided boundedness check along a paired trace.

    Validates rho(x_n, y_1) + f_A(u_n) <= rho(x_1, y_1) + f_A(u_1)
    + Q/(1-lam) + S at every n >= 1, with Q = rho(y_1, y_2)
    + lam*f_B(v_1) - f_B(v_2).
    """
    if paired.steps < 2:
        raise InvalidInputError("need at least two steps for the boundedness check")
    lam = system.lam if lam is None else lam
    if not (0.0 <= lam < 1.0):
        raise InvalidInputError("the constant must lie in [0,1)")
    s = resolve_constants(system).s if s is None else s
    space = system.pair.space
    y1, y2 = paired.b.points[1], paired.b.points[2]
    q = distance(space, y1, y2) + lam * paired.b.f_values[1] - paired.b.f_values[2]
    rhs = (
        distance(space, paired.a.points[1], y1)
        + paired.a.f_values[1]
        + q / (1.0 - lam)
        + s
    )
    for n in range(1, paired.steps + 1):
        lhs = distance(space, paired.a.points[n], y1) + paired.a.f_values[n]
        if lhs > rhs + slack:
            return False
    return True


@dataclass(frozen=True)
class BoundCertificate:
    """Geometric-decay envelope check over all index pairs of a trace."""

    m: float
    lam: float
    s: float
    horizon: int
    first_violation: Optional[tuple[int, int]] = None

    @property
    def ok(self) -> bool:
        return self.first_violation is None


def check_l2_bound(
    paired: PairedTrace,
    system: ExternalFactorSystem,
    *,
    lam: Optional[float] = None,
    s: Optional[float] = None,
    slack: float = BOUND_SLACK,
) -> BoundCertificate:
    """Check U(m,n) <= lam^(min(m,n)-1) * M + (1 - lam^(min(m,n)-1)) * S.

    U(m,n) = rho(x_m, y_n) + f_A(u_m) + f_B(v_n); M is the maximum of U over
    the first row and column of the finite trace, indices starting at 1.
    """
    if paired.steps < 1:
        raise InvalidInputError("need at least one step")
    lam = system.lam if lam is None else lam
    if not (0.0 <= lam < 1.0):
        raise InvalidInputError("the constant must lie in [0,1)")
    s = resolve_constants(system).s if s is None else s
    horizon = paired.steps
    m_const = max(
        max(_u_value(paired, system, k, 1) for k in range(1, horizon + 1)),
        max(_u_value(paired, system, 1, k) for k in range(1, horizon + 1)),
    )
    first: Optional[tuple[int, int]] = None
    for mm in range(1, horizon + 1):
        for nn in range(1, horizon + 1):
            decay = lam ** (min(mm, nn) - 1)
            bound = decay * m_const + (1.0 - decay) * s
            if _u_value(paired, system, mm, nn) > bound + slack:
                first = (mm, nn)
                break
        if first is not None:
            break
    return BoundCertificate(m_const, lam, s, horizon, first)


def _aitken_limit(points: Sequence[Point]) -> Point:
    """Per-coordinate Aitken extrapolation of the last three points.

    Exact on geometric tails; falls back to the final value where the second
    difference degenerates.  Coordinates are snapped to 12 decimal places so
    that membership tests see the intended limit rather than float fuzz.
    """
    p0, p1, p2 = points[-3], points[-2], points[-1]
    out = []
    for a, b, c in zip(p0, p1, p2):
        denom = c - 2.0 * b + a
        if denom == 0.0 or not math.isfinite(denom):
            out.append(c)
            continue
        val = c - (c - b) ** 2 / denom
        out.append(val if math.isfinite(val) else c)
    return tuple(round(v, 12) for v in out)


def _window_settled(points: Sequence[Point], pair: SetPair, tol: float, window: int) -> bool:
    n = len(points) - 1
    if n < 1:
        return True
    w = min(window, n)
    return all(
        distance(pair.space, points[i], points[i + 1]) < tol for i in range(n - w, n)
    )


def _limit_estimate(points: Sequence[Point], pair: SetPair) -> Point:
    if len(points) >= 3:
        return _aitken_limit(points)
    return points[-1]


def _validate_members(points: Sequence[Point], region, label: str) -> None:
    for p in points:
        if not region.contains(p):
            raise InvalidInputError(f"generator produced {p} outside region {label}")


@dataclass(frozen=True)
class CDCounterexample:
    """An admissible pair whose first sequence fails to converge in A."""

    index: int
    xs: tuple[Point, ...]
    ys: tuple[Point, ...]
    reason: str  # "no-cauchy-window" or "limit-escapes-region"
    limit_estimate: Optional[Point]

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "reason": self.reason,
            "limit_estimate": None
            if self.limit_estimate is None
            else format_point(self.limit_estimate),
            "xs": [format_point(p) for p in self.xs],
            "ys": [format_point(p) for p in self.ys],
        }


def cd_falsify(
    pair: SetPair,
    gen: Callable[[int], tuple[Sequence[Point], Sequence[Point]]],
    budget: int,
    tol: float,
    *,
    window: int = TAIL_WINDOW,
    samples: int = 0,
    seed: int = 0,
) -> Optional[CDCounterexample]:
    """Search for an admissible pair of sequences refuting convergence in A.

    A candidate is admissible when the tail sup of the cross distances sits
    within tol of dist(A,B).  "Converges in A" means: confirmation window met
    and the extrapolated limit is a member of A, so completeness failures
    surface as escaping limits.  Returns the first counterexample, else None.
    """
    if budget < 1:
        raise InvalidInputError("budget must be >= 1")
    dist, _ = set_distance(pair, samples, seed)
    for i in range(budget):
        xs_raw, ys_raw = gen(i)
        xs = tuple(tuple(p) for p in xs_raw)
        ys = tuple(tuple(p) for p in ys_raw)
        if len(xs) < 2 or len(ys) < 2:
            raise InvalidInputError("candidate sequences must have at least 2 terms")
        _validate_members(xs, pair.a, pair.a.name)
        _validate_members(ys, pair.b, pair.b.name)
        horizon = min(len(xs), len(ys)) - 1
        k_tail = max(0, horizon - window)
        sup = tail_sup(
            lambda n, m: distance(pair.space, xs[n], ys[m]), k_tail, horizon
        )
        if abs(sup - dist) > tol:
            continue  # cross distances never reach the pair gap: not admissible
        if not _window_settled(xs, pair, tol, window):
            return CDCounterexample(i, xs, ys, "no-cauchy-window", None)
        limit = _limit_estimate(xs, pair)
        if not pair.a.contains(limit):
            return CDCounterexample(i, xs, ys, "limit-escapes-region", limit)
    return None


@dataclass(frozen=True)
class UCCounterexample:
    """Two first-set sequences that approach B in distance yet stay apart."""

    index: int
    xs: tuple[Point, ...]
    zs: tuple[Point, ...]
    ys: tuple[Point, ...]
    tail_separation: float

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "tail_separation": self.tail_separation,
            "xs": [format_point(p) for p in self.xs],
            "zs": [format_point(p) for p in self.zs],
            "ys": [format_point(p) for p in self.ys],
        }


def uc_falsify(
    pair: SetPair,
    gen: Callable[[int], tuple[Sequence[Point], Sequence[Point], Sequence[Point]]],
    budget: int,
    tol: float,
    *,
    window: int = TAIL_WINDOW,
    samples: int = 0,
    seed: int = 0,
) -> Optional[UCCounterexample]:
    """Search for admissible triples refuting the collapse property.

    Admissible: rho(x_n, y_n) and rho(z_n, y_n) both reach dist(A,B) within
    tol at the tail.  A counterexample keeps rho(x_n, z_n) above 10*tol
    through the whole trailing window.
    """
    if budget < 1:
        raise InvalidInputError("budget must be >= 1")
    dist, _ = set_distance(pair, samples, seed)
    for i in range(budget):
        xs_raw, zs_raw, ys_raw = gen(i)
        xs = tuple(tuple(p) for p in xs_raw)
        zs = tuple(tuple(p) for p in zs_raw)
        ys = tuple(tuple(p) for p in ys_raw)
        n = min(len(xs), len(zs), len(ys))
        if n < 2:
            raise InvalidInputError("candidate sequences must have at least 2 terms")
        _validate_members(xs, pair.a, pair.a.name)
        _validate_members(zs, pair.a, pair.a.name)
        _validate_members(ys, pair.b, pair.b.name)
        if abs(distance(pair.space, xs[n - 1], ys[n - 1]) - dist) > tol:
            continue
        if abs(distance(pair.space, zs[n - 1], ys[n - 1]) - dist) > tol:
            continue
        w = min(window, n)
        sep = [distance(pair.space, xs[j], zs[j]) for j in range(n - w, n)]
        if min(sep) > 10.0 * tol:
            return UCCounterexample(i, xs, zs, ys, min(sep))
    return None
