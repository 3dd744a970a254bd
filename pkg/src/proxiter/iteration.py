"""Paired iteration engine, limit detection, and weak-fixed-point scans."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

from .errors import (
    DomainViolationError,
    InvalidInputError,
    NotAnInfimumSequenceError,
    NumericFailureError,
)
from .spaces import MetricSpace, Point, Region, SetPair, distance, set_distance
from .systems import (
    CElement,
    ExternalFactorSystem,
    Quadruple,
    SystemConstants,
    resolve_constants,
)

#: number of consecutive settled steps required before declaring a limit
CONFIRM_WINDOW = 10

#: magnitude bound beyond which a run is aborted as divergent
DIVERGENCE_GUARD = 1e15


@dataclass(frozen=True)
class IterationTrace:
    """States of one iterated sequence pair (x_n, u_n) with f values along it."""

    space: MetricSpace
    points: tuple[Point, ...]
    celements: tuple[CElement, ...]
    f_values: tuple[float, ...]

    @property
    def steps(self) -> int:
        return len(self.points) - 1

    def state(self, n: int) -> tuple[Point, CElement]:
        return self.points[n], self.celements[n]


@dataclass(frozen=True)
class PairedTrace:
    """Lock-stepped traces of both sides plus the per-step cross distance."""

    a: IterationTrace
    b: IterationTrace
    rho_xy: tuple[float, ...]

    @property
    def steps(self) -> int:
        return self.a.steps


@dataclass(frozen=True)
class ConvergenceReport:
    limit: Optional[Point]
    proximity_residual: Optional[float]
    fa_residual: Optional[float]
    fb_residual: Optional[float]
    rho_alpha_y_tail: Optional[float]
    steps: int
    stop_reason: str  # tolerance-met | max-steps | divergence-guard
    dist: float

    def to_dict(self) -> dict:
        from .spaces import format_point

        return {
            "limit": None if self.limit is None else format_point(self.limit),
            "proximity_residual": self.proximity_residual,
            "fa_residual": self.fa_residual,
            "fb_residual": self.fb_residual,
            "rho_alpha_y_tail": self.rho_alpha_y_tail,
            "steps": self.steps,
            "stop_reason": self.stop_reason,
            "dist": self.dist,
        }


@dataclass(frozen=True)
class InfimumSequence:
    """A C-sequence anchored at a point, admissible in P, with f tending to inf f."""

    anchor: Point
    witness_y: Point
    witness_v: CElement
    elements: tuple[CElement, ...]
    f_values: tuple[float, ...]


def _check_finite(p: Point, step: int) -> None:
    for c in p:
        if not math.isfinite(c):
            raise NumericFailureError(f"non-finite coordinate at step {step}: {p}")


def iterate(
    t: Callable[[Point, CElement], Point],
    h: Callable[[Point, CElement], CElement],
    initial: tuple[Point, CElement],
    steps: int,
    *,
    space: MetricSpace,
    region: Optional[Region] = None,
    f: Optional[Callable[[CElement], float]] = None,
) -> IterationTrace:
    """Drive x_{n+1} = t(x_n, u_n), u_{n+1} = h(x_n, u_n) for the given steps.

    When a region is supplied every produced point must stay a member;
    violations name the offending step.
    """
    if steps < 0:
        raise InvalidInputError("steps must be nonnegative")
    x, u = initial
    if region is not None and not region.contains(x):
        raise DomainViolationError(f"initial point {x} outside region {region.name}", step=0)
    points, celements = [x], [u]
    f_values = [f(u)] if f is not None else [0.0]
    for k in range(1, steps + 1):
        x_next = t(x, u)
        u_next = h(x, u)
        _check_finite(x_next, k)
        if region is not None and not region.contains(x_next):
            raise DomainViolationError(
                f"map output {x_next} left region {region.name} at step {k}", step=k
            )
        points.append(x_next)
        celements.append(u_next)
        f_values.append(f(u_next) if f is not None else 0.0)
        x, u = x_next, u_next
    return IterationTrace(space, tuple(points), tuple(celements), tuple(f_values))


def detect_limit(
    trace: IterationTrace, tol: float, *, window: int = CONFIRM_WINDOW
) -> Optional[Point]:
    """The final point when the trailing successive distances are all < tol.

    A trace shorter than the window is judged on all its transitions; a
    single-state trace is vacuously settled.
    """
    n = trace.steps
    if n == 0:
        return trace.points[0]
    w = min(window, n)
    for i in range(n - w, n):
        if distance(trace.space, trace.points[i], trace.points[i + 1]) >= tol:
            return None
    return trace.points[-1]


def run_paired(
    system: ExternalFactorSystem,
    q0: Quadruple,
    max_steps: int,
    tol: float,
    *,
    window: int = CONFIRM_WINDOW,
    constants: Optional[SystemConstants] = None,
) -> tuple[PairedTrace, ConvergenceReport]:
    """Advance both sides in lock step until both settle or the budget ends.

    The stop rule requires the successive displacements of both sides to stay
    below tol for a full confirmation window.  Report residuals are tail
    means over the final window.
    """
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    if max_steps < 0:
        raise InvalidInputError("max_steps must be nonnegative")
    q0 = Quadruple(*q0)
    if not system.in_p(q0):
        raise InvalidInputError(f"initial quadruple not in P: {q0}")
    if constants is None:
        constants = resolve_constants(system)
    space = system.pair.space
    region_a, region_b = system.pair.a, system.pair.b

    xs, us = [q0.x], [q0.u]
    ys, vs = [q0.y], [q0.v]
    fa_vals = [system.f_a.fn(q0.u)]
    fb_vals = [system.f_b.fn(q0.v)]
    rho = [distance(space, q0.x, q0.y)]

    settled = 0
    stop_reason = "max-steps"
    for k in range(1, max_steps + 1):
        x, u = xs[-1], us[-1]
        y, v = ys[-1], vs[-1]
        x_next, u_next = system.t_a(x, u), system.h_a(x, u)
        y_next, v_next = system.t_b(y, v), system.h_b(y, v)
        _check_finite(x_next, k)
        _check_finite(y_next, k)
        if not region_a.contains(x_next):
            raise DomainViolationError(
                f"T_A output {x_next} left region {region_a.name} at step {k}", step=k
            )
        if not region_b.contains(y_next):
            raise DomainViolationError(
                f"T_B output {y_next} left region {region_b.name} at step {k}", step=k
            )
        da = distance(space, x, x_next)
        db = distance(space, y, y_next)
        xs.append(x_next)
        us.append(u_next)
        ys.append(y_next)
        vs.append(v_next)
        fa_vals.append(system.f_a.fn(u_next))
        fb_vals.append(system.f_b.fn(v_next))
        rho.append(distance(space, x_next, y_next))

        if any(abs(c) > DIVERGENCE_GUARD for c in x_next + y_next) or rho[-1] > DIVERGENCE_GUARD:
            stop_reason = "divergence-guard"
            break
        settled = settled + 1 if max(da, db) < tol else 0
        if settled >= window:
            stop_reason = "tolerance-met"
            break

    trace_a = IterationTrace(space, tuple(xs), tuple(us), tuple(fa_vals))
    trace_b = IterationTrace(space, tuple(ys), tuple(vs), tuple(fb_vals))
    paired = PairedTrace(trace_a, trace_b, tuple(rho))

    limit = detect_limit(trace_a, tol, window=window)
    if limit is None:
        report = ConvergenceReport(
            None, None, None, None, None, paired.steps, stop_reason, constants.dist
        )
        return paired, report

    w = min(window, len(ys) - 1) or 1
    tail_rho = [distance(space, limit, y) for y in ys[-w:]]
    rho_tail = sum(tail_rho) / len(tail_rho)
    fa_tail = sum(fa_vals[-w:]) / w - constants.inf_a
    fb_tail = sum(fb_vals[-w:]) / w - constants.inf_b
    report = ConvergenceReport(
        limit=limit,
        proximity_residual=abs(rho_tail - constants.dist),
        fa_residual=fa_tail,
        fb_residual=fb_tail,
        rho_alpha_y_tail=rho_tail,
        steps=paired.steps,
        stop_reason=stop_reason,
        dist=constants.dist,
    )
    return paired, report


def limit_uniqueness_check(
    system: ExternalFactorSystem,
    q1: Quadruple,
    q2: Quadruple,
    max_steps: int,
    tol: float,
) -> Optional[bool]:
    """Whether two first-side starts sharing (y0, v0) reach the same limit.

    Returns True/False when both traces settle, None (undecided) when either
    fails to meet the confirmation window within max_steps.
    """
    q1, q2 = Quadruple(*q1), Quadruple(*q2)
    for q in (q1, q2):
        if not system.in_p(q):
            raise InvalidInputError(f"quadruple not in P: {q}")
    if q1.y != q2.y or q1.v != q2.v:
        raise InvalidInputError("the two starts must share (y0, v0)")
    limits = []
    for q in (q1, q2):
        trace = iterate(
            system.t_a,
            system.h_a,
            (q.x, q.u),
            max_steps,
            space=system.pair.space,
            region=system.pair.a,
            f=system.f_a.fn,
        )
        limits.append(detect_limit(trace, tol))
    if limits[0] is None or limits[1] is None:
        return None
    return distance(system.pair.space, limits[0], limits[1]) <= 10.0 * tol


def make_infimum_sequence(
    system: ExternalFactorSystem,
    anchor: Point,
    witness: tuple[Point, CElement],
    generator: Callable[[int], CElement],
    length: int,
    *,
    f_tol: float = 1e-6,
    constants: Optional[SystemConstants] = None,
) -> InfimumSequence:
    """Materialize and validate a C-sequence anchored at a point.

    Every element must keep (anchor, y, c_n, v) inside P, and the final f
    value must sit within f_tol of the resolved infimum of f_A.
    """
    if length < 1:
        raise InvalidInputError("length must be >= 1")
    if constants is None:
        constants = resolve_constants(system)
    y, v = witness
    elements = []
    f_values = []
    for n in range(length):
        c = generator(n)
        if not system.p.contains(anchor, y, c, v):
            raise InvalidInputError(
                f"element {n} breaks admissibility: ({anchor}, {y}, c, v) not in P"
            )
        elements.append(c)
        f_values.append(system.f_a.fn(c))
    if f_values[-1] > constants.inf_a + f_tol:
        raise NotAnInfimumSequenceError(
            f"tail f value {f_values[-1]} exceeds inf {constants.inf_a} + {f_tol}"
        )
    return InfimumSequence(anchor, y, v, tuple(elements), tuple(f_values))


def weak_fixed_residuals(
    system: ExternalFactorSystem, alpha: Point, inf_seq: InfimumSequence
) -> list[float]:
    """Distances rho(T_A(alpha, c_n), alpha) along an anchored sequence."""
    if inf_seq.anchor != alpha:
        raise InvalidInputError("infimum sequence is not anchored at the given point")
    space = system.pair.space
    out = []
    for c in inf_seq.elements:
        if not system.p.contains(alpha, inf_seq.witness_y, c, inf_seq.witness_v):
            raise InvalidInputError("anchored quadruple left P")
        out.append(distance(space, system.t_a(alpha, c), alpha))
    return out


class Violation(NamedTuple):
    beta: Point
    tail_residual: float
    separation: float


def uniqueness_scan(
    system: ExternalFactorSystem,
    alpha: Point,
    candidates: list[tuple[Point, InfimumSequence]],
    tol: float,
    *,
    window: int = CONFIRM_WINDOW,
) -> list[Violation]:
    """Hunt for a second weakly fixed point away from alpha.

    A violation is a candidate beta whose weak-fixation residual tail stays
    below tol while beta itself sits more than 10*tol away from alpha.
    """
    space = system.pair.space
    violations = []
    for beta, seq in candidates:
        sep = distance(space, beta, alpha)
        if sep <= 10.0 * tol:
            continue
        residuals = weak_fixed_residuals(system, beta, seq)
        w = min(window, len(residuals))
        tail = max(residuals[-w:])
        if tail < tol:
            violations.append(Violation(beta, tail, sep))
    return violations


def proximity_residual(
    report: ConvergenceReport, pair: SetPair, *, samples: int = 0, seed: int = 0
) -> Optional[float]:
    """Gap between the report's tail estimate of rho(alpha, y_n) and dist(A,B).

    None (undecided) when the report carries no limit.
    """
    if report.limit is None or report.rho_alpha_y_tail is None:
        return None
    dist, _ = set_distance(pair, samples, seed)
    return abs(report.rho_alpha_y_tail - dist)


def write_trace_csv(paired: PairedTrace, fh) -> None:
    """Trace table: n, x_n, u_n, y_n, v_n, rho_xy, f_a_u, f_b_v.

    Coordinates are semicolon-joined and printed with 17 significant digits
    so that values round-trip exactly.
    """
    from .spaces import format_point
    from .systems import format_celement

    fh.write("n,x_n,u_n,y_n,v_n,rho_xy,f_a_u,f_b_v\n")
    for n in range(len(paired.a.points)):
        row = [
            str(n),
            format_point(paired.a.points[n]),
            format_celement(paired.a.celements[n]),
            format_point(paired.b.points[n]),
            format_celement(paired.b.celements[n]),
            f"{paired.rho_xy[n]:.17g}",
            f"{paired.a.f_values[n]:.17g}",
            f"{paired.b.f_values[n]:.17g}",
        ]
        fh.write(",".join(row) + "\n")
