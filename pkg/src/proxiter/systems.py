"""Contraction systems driven by an external set, and their certification.

A system bundles two region maps (one per side of a set pair), two update
maps on an external set C, two penalty functions with known or estimable
infima, an admissibility relation P on (x, y, u, v) quadruples, and a
contraction constant.  Certification is sample based: verdicts are
"certified-on-samples" or "refuted", never "proved".
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Union

from .errors import (
    DomainViolationError,
    EstimationFailureError,
    InvalidInputError,
    NotCertifiedError,
)
from .spaces import Point, SetPair, distance, format_point, set_distance

#: absolute slack when judging the contraction inequality on samples
RESIDUAL_TOL = 1e-10

#: denominators at or below this are treated as degenerate in ratio estimates
DEGENERATE_DENOM = 1e-12


@dataclass(frozen=True)
class Atom:
    """A tagged non-vector member of the external set."""

    label: str

    def __repr__(self):
        return f"@{self.label}"


@dataclass(frozen=True)
class CPair:
    """External element of a product system, one component per factor."""

    left: "CElement"
    right: "CElement"


CElement = Union[Point, Atom, CPair]


def format_celement(c: CElement) -> str:
    if isinstance(c, Atom):
        return f"@{c.label}"
    if isinstance(c, CPair):
        return f"{format_celement(c.left)}&{format_celement(c.right)}"
    return format_point(c)


class Quadruple(NamedTuple):
    x: Point
    y: Point
    u: CElement
    v: CElement


@dataclass(frozen=True)
class ExternalFactor:
    """A penalty function on C with an exact or to-be-estimated infimum."""

    fn: Callable[[CElement], float]
    inf_value: Optional[float] = None


@dataclass(frozen=True)
class CUniverse:
    """Description of the external set C with a seeded sampler."""

    name: str
    draw: Callable[[random.Random, int], list[CElement]]


@dataclass(frozen=True)
class RelationP:
    """Admissible quadruples, as a predicate plus a deterministic sampler."""

    contains: Callable[[Point, Point, CElement, CElement], bool]
    draw: Callable[[random.Random, int], list[Quadruple]]


@dataclass(frozen=True)
class ExternalFactorSystem:
    """The six maps, the external set, the relation P and the constant."""

    name: str
    pair: SetPair
    c_universe: CUniverse
    t_a: Callable[[Point, CElement], Point]
    h_a: Callable[[Point, CElement], CElement]
    t_b: Callable[[Point, CElement], Point]
    h_b: Callable[[Point, CElement], CElement]
    f_a: ExternalFactor
    f_b: ExternalFactor
    p: RelationP
    lam: float

    def __post_init__(self):
        if not (0.0 <= self.lam < 1.0):
            raise InvalidInputError(f"contraction constant must be in [0,1), got {self.lam}")

    def in_p(self, q: Quadruple) -> bool:
        return self.p.contains(q.x, q.y, q.u, q.v)


@dataclass(frozen=True)
class SystemConstants:
    """Resolved distance and infima, each flagged exact or estimated."""

    dist: float
    dist_flag: str
    inf_a: float
    inf_a_flag: str
    inf_b: float
    inf_b_flag: str

    @property
    def s(self) -> float:
        return self.dist + self.inf_a + self.inf_b

    @property
    def exact(self) -> bool:
        return "estimated" not in (self.dist_flag, self.inf_a_flag, self.inf_b_flag)


def factor_infimum(
    factor: ExternalFactor, universe: CUniverse, samples: int = 0, seed: int = 0
) -> tuple[float, str]:
    """Author-supplied infimum, or a sampled upper estimate over C."""
    if factor.inf_value is not None:
        return factor.inf_value, "exact"
    if samples < 1:
        raise NotCertifiedError("infimum not supplied and estimation disabled")
    cs = universe.draw(random.Random(seed), samples)
    if not cs:
        raise EstimationFailureError("empty C sample while estimating an infimum")
    return min(factor.fn(c) for c in cs), "estimated"


def resolve_constants(
    system: ExternalFactorSystem, samples: int = 2048, seed: int = 0
) -> SystemConstants:
    dist, dist_flag = set_distance(system.pair, samples, seed)
    inf_a, fa_flag = factor_infimum(system.f_a, system.c_universe, samples, seed + 101)
    inf_b, fb_flag = factor_infimum(system.f_b, system.c_universe, samples, seed + 202)
    return SystemConstants(dist, dist_flag, inf_a, fa_flag, inf_b, fb_flag)


def s_value(system: ExternalFactorSystem, *, samples: int = 2048, seed: int = 0) -> float:
    """dist(A,B) + inf f_A + inf f_B, the contraction inequality's affine floor."""
    return resolve_constants(system, samples, seed).s


def contraction_residual(
    system: ExternalFactorSystem,
    q: Quadruple,
    constants: Optional[SystemConstants] = None,
) -> float:
    """Right side minus left side of the contraction inequality at q.

    Nonnegative exactly when the inequality holds at q.  The left side maps
    the quadruple forward once through (T_A, H_A) and (T_B, H_B).
    """
    q = Quadruple(*q)
    if not system.in_p(q):
        raise InvalidInputError(f"quadruple not in P: {q}")
    if constants is None:
        constants = resolve_constants(system)
    rho = distance(system.pair.space, q.x, q.y)
    lhs = (
        distance(system.pair.space, system.t_a(q.x, q.u), system.t_b(q.y, q.v))
        + system.f_a.fn(system.h_a(q.x, q.u))
        + system.f_b.fn(system.h_b(q.y, q.v))
    )
    rhs = system.lam * (rho + system.f_a.fn(q.u) + system.f_b.fn(q.v)) + (
        1.0 - system.lam
    ) * constants.s
    return rhs - lhs


def check_p_invariance(
    system: ExternalFactorSystem, q: Quadruple, depth: int
) -> tuple[bool, Optional[tuple[int, int]]]:
    """Iterate both sides and test every cross pairing (x_n, y_m, u_n, v_m).

    Returns (ok, first_failure) where first_failure is the (n, m) index pair
    of the first cross pairing that left P, or None.
    """
    q = Quadruple(*q)
    if not system.in_p(q):
        raise InvalidInputError(f"quadruple not in P: {q}")
    xs, us = [q.x], [q.u]
    ys, vs = [q.y], [q.v]
    for _ in range(depth):
        x, u = xs[-1], us[-1]
        xs.append(system.t_a(x, u))
        us.append(system.h_a(x, u))
        y, v = ys[-1], vs[-1]
        ys.append(system.t_b(y, v))
        vs.append(system.h_b(y, v))
    for n in range(depth + 1):
        for m in range(depth + 1):
            if not system.p.contains(xs[n], ys[m], us[n], vs[m]):
                return False, (n, m)
    return True, None


@dataclass(frozen=True)
class CertificationReport:
    """Outcome of a sampling campaign against the contraction conditions."""

    verdict: str  # "certified-on-samples" or "refuted"
    min_residual: float
    samples: int
    seed: int
    lam: float
    s: float
    infima_finite: bool
    p_invariant: bool
    p_depth: int
    reason: str = ""
    witness: Optional[Quadruple] = None

    @property
    def certified(self) -> bool:
        return self.verdict == "certified-on-samples"

    def to_dict(self) -> dict:
        out = {
            "verdict": self.verdict,
            "min_residual": self.min_residual,
            "samples": self.samples,
            "seed": self.seed,
            "lambda": self.lam,
            "s_value": self.s,
            "infima_finite": self.infima_finite,
            "p_invariant": self.p_invariant,
            "p_depth": self.p_depth,
        }
        if self.reason:
            out["reason"] = self.reason
        if self.witness is not None:
            out["witness"] = {
                "x": format_point(self.witness.x),
                "y": format_point(self.witness.y),
                "u": format_celement(self.witness.u),
                "v": format_celement(self.witness.v),
            }
        return out


def verify_contraction(
    system: ExternalFactorSystem,
    samples: int,
    seed: int,
    *,
    depth: int = 8,
    invariance_probes: int = 4,
    constants: Optional[SystemConstants] = None,
) -> CertificationReport:
    """Sample quadruples from P and certify the three contraction conditions.

    The inequality is checked on every sampled quadruple, the infima are
    checked finite, and P-invariance is probed on a few quadruples to the
    given depth.  Any residual below -RESIDUAL_TOL refutes, and the worst
    quadruple is returned as a witness.
    """
    if samples < 1:
        raise InvalidInputError("samples must be >= 1")
    if constants is None:
        constants = resolve_constants(system, seed=seed)
    quads = system.p.draw(random.Random(seed), samples)
    if not quads:
        raise EstimationFailureError("relation sampler produced no quadruples")

    infima_finite = math.isfinite(constants.inf_a) and math.isfinite(constants.inf_b)

    min_res = math.inf
    arg_min: Optional[Quadruple] = None
    for raw in quads:
        q = Quadruple(*raw)
        if not system.in_p(q):
            raise InvalidInputError(f"relation sampler produced a non-member quadruple: {q}")
        ta_out = system.t_a(q.x, q.u)
        tb_out = system.t_b(q.y, q.v)
        if not system.pair.a.contains(ta_out):
            raise DomainViolationError(f"T_A output {ta_out} left region {system.pair.a.name}")
        if not system.pair.b.contains(tb_out):
            raise DomainViolationError(f"T_B output {tb_out} left region {system.pair.b.name}")
        res = contraction_residual(system, q, constants)
        if res < min_res:
            min_res, arg_min = res, q

    p_ok = True
    p_witness: Optional[Quadruple] = None
    for q in quads[: max(0, invariance_probes)]:
        ok, _ = check_p_invariance(system, Quadruple(*q), depth)
        if not ok:
            p_ok, p_witness = False, Quadruple(*q)
            break

    if not infima_finite:
        verdict, reason, witness = "refuted", "infimum-not-finite", None
    elif not p_ok:
        verdict, reason, witness = "refuted", "p-invariance-failed", p_witness
    elif min_res < -RESIDUAL_TOL:
        verdict, reason, witness = "refuted", "negative-residual", arg_min
    else:
        verdict, reason, witness = "certified-on-samples", "", None

    return CertificationReport(
        verdict=verdict,
        min_residual=min_res,
        samples=samples,
        seed=seed,
        lam=system.lam,
        s=constants.s,
        infima_finite=infima_finite,
        p_invariant=p_ok,
        p_depth=depth,
        reason=reason,
        witness=witness,
    )


def estimate_min_lambda(
    system: ExternalFactorSystem,
    samples: int,
    seed: int,
    *,
    constants: Optional[SystemConstants] = None,
) -> float:
    """Lower estimate of the least admissible contraction constant.

    For each sampled quadruple the one-step left side is compared with the
    affine floor S; the supremum of (lhs - S) / (rho + f_A + f_B - S) over
    non-degenerate samples is a tightness probe for the declared constant.
    """
    if samples < 1:
        raise InvalidInputError("samples must be >= 1")
    if constants is None:
        constants = resolve_constants(system, seed=seed)
    quads = system.p.draw(random.Random(seed), samples)
    best: Optional[float] = None
    for raw in quads:
        q = Quadruple(*raw)
        rho = distance(system.pair.space, q.x, q.y)
        denom = rho + system.f_a.fn(q.u) + system.f_b.fn(q.v) - constants.s
        if denom <= DEGENERATE_DENOM:
            continue
        lhs = (
            distance(system.pair.space, system.t_a(q.x, q.u), system.t_b(q.y, q.v))
            + system.f_a.fn(system.h_a(q.x, q.u))
            + system.f_b.fn(system.h_b(q.y, q.v))
        )
        ratio = (lhs - constants.s) / denom
        if best is None or ratio > best:
            best = ratio
    if best is None:
        raise EstimationFailureError("all sampled quadruples were degenerate")
    return min(1.0, max(0.0, best))
