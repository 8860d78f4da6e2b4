"""Ray-landing laminations: finite angle-pair systems on the circle for the
three dynamical families, plus their comparison.

Every lamination here is generated by finitely many 2-cycle angle pairs
(one per boundary double point / cut point / extra tangency) pulled back
through the angle map to a finite depth.  The pullback keeps a candidate
preimage pair only when both angles fall in one complementary component of
the cut-angle preimage set, which selects exactly the true classes.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from . import antipoly as antipoly_mod
from . import groups, rays, sigma
from .angles import (
    circular_distance,
    fixed_angles,
    md_step,
    mod1,
    preimages,
    symbol_md,
    two_cycles,
    unlinked,
)
from .geom import fixed_points as moebius_fixed_points
from .geom import AntiMoebius, reflect

DEFAULT_DEPTH = 6
COLAND_TOL = 1e-3
SEPARATION_TOL = 1e-2


class LaminationError(Exception):
    pass


class AmbiguousLandingError(LaminationError):
    pass


class NotCriticallyFixedError(LaminationError):
    pass


@dataclass(frozen=True)
class Lamination:
    """Finite angle lamination: unordered exact-rational pairs, all pairwise
    unlinked, truncated at a pullback depth.

    points, when present, carries the circle-side coding pair of each class
    (used by the conjugacy-mediated comparison)."""

    d: int
    depth: int
    classes: frozenset
    points: dict | None = None

    def pairs(self) -> list[tuple[Fraction, Fraction]]:
        return sorted(tuple(sorted(c)) for c in self.classes)

    def validate(self) -> None:
        pairs = self.pairs()
        for i in range(len(pairs)):
            for j in range(i + 1, len(pairs)):
                if not unlinked(pairs[i], pairs[j]):
                    raise LaminationError(f"linked classes {pairs[i]} and {pairs[j]}")
        for pair in pairs:
            image = frozenset(md_step(self.d, x) for x in pair)
            if len(image) == 2 and image not in self.classes:
                raise LaminationError(f"class {pair} maps outside the lamination")

    def rotated(self, shift: Fraction) -> "Lamination":
        classes = frozenset(
            frozenset(mod1(x + shift) for x in c) for c in self.classes
        )
        return Lamination(self.d, self.depth, classes, None)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "depth": self.depth,
            "classes": [
                [[str(x.numerator), str(x.denominator)] for x in pair]
                for pair in self.pairs()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Lamination":
        classes = frozenset(
            frozenset(Fraction(int(num), int(den)) for num, den in pair)
            for pair in data["classes"]
        )
        return cls(int(data["d"]), int(data["depth"]), classes)


def _pull_back(d: int, generators: list[tuple[Fraction, Fraction]], depth: int,
               generator_points: dict | None = None):
    """Close the generator pairs under inverse branches to the given depth.

    Returns (classes frozenset, points dict or None).  Cut angles are the
    fixed angles plus the generator angles; a level-n pair must lie in one
    complementary component of the (n-1)-st preimage of the cut set.
    """
    base_cut = sorted(set(fixed_angles(d)) | {x for pair in generators for x in pair})
    track_points = generator_points is not None
    chain = groups.base_chain(d + 1) if track_points else None

    classes: dict[tuple[Fraction, Fraction], tuple[complex, complex] | None] = {}
    for pair in generators:
        key = tuple(sorted(pair))
        classes[key] = None
        if track_points:
            pts = generator_points[tuple(pair)]
            classes[key] = pts if key == tuple(pair) else (pts[1], pts[0])

    level = list(classes.keys())
    cut = base_cut
    for _ in range(depth):
        cut_set = set(cut)
        nxt = []
        for key in level:
            x, y = key
            for xp in preimages(d, x):
                if xp in cut_set:
                    continue
                gap_x = bisect_right(cut, xp) - 1
                for yp in preimages(d, y):
                    if yp in cut_set or yp == xp:
                        continue
                    if bisect_right(cut, yp) - 1 != gap_x:
                        continue
                    child = tuple(sorted((xp, yp)))
                    if child in classes:
                        continue
                    if track_points:
                        branch = symbol_md(d, xp)
                        tx, ty = classes[key]
                        circle = chain.circles[branch]
                        child_pts = (reflect(circle, tx), reflect(circle, ty))
                        if child != (xp, yp):
                            child_pts = (child_pts[1], child_pts[0])
                        classes[child] = child_pts
                    else:
                        classes[child] = None
                    nxt.append(child)
        level = nxt
        cut = sorted(set(cut) | {q for c in cut for q in preimages(d, c)})

    class_set = frozenset(frozenset(k) for k in classes)
    points = (
        {frozenset(k): v for k, v in classes.items()} if track_points else None
    )
    return class_set, points


def lamination_sigma(
    f: sigma.SigmaMap,
    depth: int = DEFAULT_DEPTH,
    tracer: rays.RayTracer | None = None,
) -> Lamination:
    """Lamination of a Schwarz reflection: one generator pair per boundary
    double point, found by co-landing of 2-cycle rays, pulled back."""
    body = sigma.anatomy(f)
    d = f.degree
    if tracer is None:
        tracer = rays.RayTracer(rays.SchwarzDynamics(f))
    generators = []
    matched: set[int] = set()
    for a, b in two_cycles(d):
        try:
            la, _ = rays.landing(tracer.trace(a))
            lb, _ = rays.landing(tracer.trace(b))
        except rays.RayError as exc:
            raise AmbiguousLandingError(f"2-cycle ray pair {a},{b}: {exc}") from exc
        if abs(la - lb) >= COLAND_TOL:
            continue
        hits = [
            i for i, dp in enumerate(body.double_points)
            if abs(la - dp.zeta) < COLAND_TOL
        ]
        if len(hits) != 1:
            raise AmbiguousLandingError(
                f"co-landing pair {a},{b} matches {len(hits)} double points"
            )
        matched.add(hits[0])
        generators.append((a, b))
    if len(matched) != len(body.double_points) or len(generators) != len(
        body.double_points
    ):
        raise AmbiguousLandingError(
            f"{len(generators)} co-landing pairs for {len(body.double_points)} double points"
        )
    classes, _ = _pull_back(d, generators, depth)
    lam = Lamination(d, depth, classes)
    lam.validate()
    return lam


def cusp_ray_angles(f: sigma.SigmaMap) -> list[Fraction]:
    """The fixed ray angles (they land on the cusps, bijectively)."""
    return fixed_angles(f.degree)


def lamination_group(g: groups.NecklaceGroup, depth: int = DEFAULT_DEPTH) -> Lamination:
    """Lamination of a necklace group on d+1 circles, in angle coordinates.

    Purely combinatorial on the angle side: each non-consecutive tangency
    {i, j} contributes the unique angle 2-cycle with one point in piece i
    and one in piece j.  The circle-side coding pair of each class (the
    corresponding 2-cycle of the regular chain's reflection map, and its
    reflection pullbacks) is carried along for the conjugacy-mediated
    comparison.
    """
    D = g.d
    d = D - 1
    chain = groups.base_chain(D)
    generators = []
    generator_points = {}
    for tang in g.extra_tangencies:
        pair_cycle = None
        for a, b in two_cycles(d):
            pieces = {symbol_md(d, a), symbol_md(d, b)}
            if pieces == {tang.i, tang.j}:
                pair_cycle = (a, b)
                break
        if pair_cycle is None:
            raise LaminationError(
                f"no angle 2-cycle for tangency pair {tang.i},{tang.j}"
            )
        ri = AntiMoebius.circle_reflection(chain.circles[tang.i])
        rj = AntiMoebius.circle_reflection(chain.circles[tang.j])
        fixed = moebius_fixed_points(rj @ ri)
        pts = []
        for angle in pair_cycle:
            piece = symbol_md(d, angle)
            candidates = [
                z for z in fixed
                if _piece_of_point(D, z) == piece
            ]
            if len(candidates) != 1:
                raise LaminationError(
                    f"reflection 2-cycle not split between pieces {tang.i},{tang.j}"
                )
            pts.append(candidates[0] / abs(candidates[0]))
        generators.append(pair_cycle)
        generator_points[pair_cycle] = tuple(pts)
    classes, points = _pull_back(d, generators, depth, generator_points)
    lam = Lamination(d, depth, classes, points)
    lam.validate()
    return lam


def _piece_of_point(D: int, z: complex) -> int:
    angle = math.atan2(z.imag, z.real) % (2 * math.pi)
    return int(angle / (2 * math.pi) * D) % D


def lamination_antipoly(
    p: antipoly_mod.AntiPoly,
    depth: int = DEFAULT_DEPTH,
    rotation: Fraction = Fraction(0),
    tracer: rays.RayTracer | None = None,
) -> Lamination:
    """Lamination of a critically fixed anti-polynomial from co-landing
    2-cycle rays; reported angles are shifted by the rotation offset (a
    multiple of 1/(d+1), the escape-coordinate ambiguity)."""
    if not antipoly_mod.is_critically_fixed(p):
        raise NotCriticallyFixedError("a finite critical point is not fixed")
    d = p.degree
    rotation = mod1(rotation)
    if rotation.denominator not in (1, d + 1) and (rotation * (d + 1)).denominator != 1:
        raise ValueError(f"rotation must be a multiple of 1/{d + 1}")
    if tracer is None:
        tracer = rays.RayTracer(rays.AntiPolyDynamics(p))
    generators = []
    for a, b in two_cycles(d):
        try:
            la, _ = rays.landing(tracer.trace(a))
            lb, _ = rays.landing(tracer.trace(b))
        except rays.RayError as exc:
            raise AmbiguousLandingError(f"2-cycle ray pair {a},{b}: {exc}") from exc
        if abs(la - lb) < COLAND_TOL:
            generators.append((a, b))
    classes, _ = _pull_back(d, generators, depth)
    lam = Lamination(d, depth, classes)
    lam.validate()
    if rotation:
        lam = Lamination(d, depth, lam.rotated(rotation).classes)
        lam.validate()
    return lam


class CompareMode(Enum):
    IDENTITY = "identity"
    VIA_E = "via_conjugacy"
    UP_TO_ROTATION = "up_to_rotation"


@dataclass(frozen=True)
class CompareReport:
    matched: bool
    mode: CompareMode
    witness: str | None = None
    rotation_used: Fraction | None = None


def compare_laminations(
    a: Lamination,
    b: Lamination,
    mode: CompareMode,
    tol: float = 1e-6,
) -> CompareReport:
    """Class-for-class comparison of two laminations.

    IDENTITY expects exact equality of rational pairs; VIA_E maps the
    circle-side coding points of `a` through the boundary conjugacy and
    matches classes of `b` within 10*tol; UP_TO_ROTATION tries every shift
    by j/(d+1) and reports the first that gives exact equality.
    """
    if a.depth != b.depth:
        raise ValueError(f"depth mismatch: {a.depth} vs {b.depth}")
    if mode is CompareMode.IDENTITY:
        if a.classes == b.classes:
            return CompareReport(True, mode)
        diff = (a.classes ^ b.classes)
        sample = tuple(sorted(next(iter(diff))))
        return CompareReport(False, mode, witness=f"unmatched class {sample}")

    if mode is CompareMode.UP_TO_ROTATION:
        for j in range(a.d + 1):
            shift = Fraction(j, a.d + 1)
            if a.rotated(shift).classes == b.classes:
                return CompareReport(True, mode, rotation_used=shift)
        return CompareReport(False, mode, witness="no rotation matches")

    if mode is CompareMode.VIA_E:
        from . import conjugacy

        if a.points is None:
            raise ValueError("left lamination carries no circle coding points")
        if len(a.classes) != len(b.classes):
            return CompareReport(
                False, mode, witness=f"class counts {len(a.classes)} vs {len(b.classes)}"
            )
        unused = set(b.classes)
        for cls, (t1, t2) in a.points.items():
            e1 = conjugacy.eval_E(a.d, t1, tol)
            e2 = conjugacy.eval_E(a.d, t2, tol)
            matched_cls = None
            for cand in unused:
                p1, p2 = tuple(cand)
                direct = max(circular_distance(e1, p1), circular_distance(e2, p2))
                crossed = max(circular_distance(e1, p2), circular_distance(e2, p1))
                if min(direct, crossed) < 10.0 * tol:
                    matched_cls = cand
                    break
            if matched_cls is None:
                return CompareReport(
                    False, mode,
                    witness=f"class {tuple(sorted(cls))} has no partner within {10 * tol:g}",
                )
            unused.remove(matched_cls)
        return CompareReport(True, mode)

    raise ValueError(f"unknown mode {mode}")
