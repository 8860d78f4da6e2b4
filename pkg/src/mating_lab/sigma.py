"""Univalent rational maps z + a_1/z + ... + a_d/z^d (a_d = -1/d), their
Schwarz reflections, and the anatomy of the droplet boundary: cusps, double
points, components, and the angled tree.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import polyroots
from .angles import mod1

MAX_DEGREE = 16
INVERT_TOL = 1e-12
DOUBLE_POINT_RESIDUAL = 1e-12
DOUBLE_POINT_MERGE = 1e-6
DIAGONAL_GAP = 1e-4          # (theta, theta') closer than this is the diagonal
UNIT_ROOT_TOL = 1e-8         # cusp preimages must sit on the unit circle
RAY_CUSP_MATCH = 1e-3        # 0-ray landing must single out one cusp
COARSE_GRID = 512


class SigmaError(Exception):
    pass


class OriginInputError(SigmaError):
    """The map has a pole at the origin."""


class NoConvergenceError(SigmaError):
    def __init__(self, iterations: int):
        super().__init__(f"inversion did not converge in {iterations} iterations")
        self.iterations = iterations


class NotExteriorError(SigmaError):
    """Newton converged to a root inside the closed unit disk."""


class WrongCuspCountError(SigmaError):
    """Critical points do not all sit on the unit circle: not in the family."""


class RayLandingAmbiguousError(SigmaError):
    pass


class TooManyDoublePointsError(SigmaError):
    pass


class InconsistentDecompositionError(SigmaError):
    pass


@dataclass(frozen=True)
class SigmaMap:
    """A map z + a_1/z + ... + a_d/z^d with a_d = -1/d."""

    degree: int
    coeffs: tuple[complex, ...]  # a_1 .. a_d

    def __post_init__(self):
        d = self.degree
        if not (2 <= d <= MAX_DEGREE):
            raise ValueError(f"degree must be in [2, {MAX_DEGREE}], got {d}")
        coeffs = tuple(complex(a) for a in self.coeffs)
        if len(coeffs) != d:
            raise ValueError(f"expected {d} coefficients, got {len(coeffs)}")
        if abs(coeffs[-1] + 1.0 / d) > 1e-12:
            raise ValueError(f"a_d must equal -1/{d}, got {coeffs[-1]}")
        for a in coeffs:
            if not (math.isfinite(a.real) and math.isfinite(a.imag)):
                raise ValueError("non-finite coefficient")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def base(cls, d: int) -> "SigmaMap":
        """The base map z - 1/(d z^d)."""
        return cls(d, (0.0,) * (d - 1) + (-1.0 / d,))

    def to_json(self) -> dict:
        return {"d": self.degree, "a": [[a.real, a.imag] for a in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "SigmaMap":
        return cls(int(data["d"]), tuple(complex(re, im) for re, im in data["a"]))


def evaluate(f: SigmaMap, z):
    """f(z) and f'(z), by Horner in 1/z.  Works on scalars and numpy arrays."""
    if np.isscalar(z) or isinstance(z, complex):
        if abs(z) < 1e-300:
            raise OriginInputError("evaluation at the pole z = 0")
    u = 1.0 / z
    s = 0.0 + 0.0j  # sum a_k u^k
    t = 0.0 + 0.0j  # sum k a_k u^k
    for k in range(f.degree, 0, -1):
        a = f.coeffs[k - 1]
        s = (s + a) * u
        t = (t + k * a) * u
    return z + s, 1.0 - t * u


def boundary_point(f: SigmaMap, theta):
    """f(e^{i theta}); theta may be an array."""
    z = np.exp(1j * np.asarray(theta)) if not np.isscalar(theta) else cmath.exp(1j * theta)
    return evaluate(f, z)[0]


def invert_exterior(
    f: SigmaMap,
    w: complex,
    guess: complex | None = None,
    tol: float = INVERT_TOL,
    max_iter: int = 200,
) -> complex:
    """Solve f(z) = w for the exterior branch |z| > 1 by damped Newton.

    The map is tangent to the identity at infinity, so w itself is a usable
    seed far away; pass a guess when continuing along a path.
    """
    z = guess if guess is not None else w
    if abs(z) < 1.05:
        z = 1.05 * (z / abs(z)) if abs(z) > 1e-12 else 1.05 + 0.0j
    eff_tol = max(tol, 1e-15 * (1.0 + abs(w)))
    val, der = evaluate(f, z)
    res = abs(val - w)
    for _ in range(max_iter):
        if res < eff_tol:
            break
        if abs(der) < 1e-30:
            der = 1e-30
        step = (val - w) / der
        for _ in range(20):
            z_new = z - step
            if abs(z_new) < 1e-9:
                step *= 0.5
                continue
            val_new, der_new = evaluate(f, z_new)
            if abs(val_new - w) <= res or abs(step) < 1e-17 * (1 + abs(z)):
                break
            step *= 0.5
        else:
            raise NoConvergenceError(max_iter)
        z, val, der = z_new, val_new, der_new
        res = abs(val - w)
    else:
        raise NoConvergenceError(max_iter)
    if abs(z) <= 1.0:
        raise NotExteriorError(f"root {z} is not exterior")
    return z


def invert_exterior_array(f: SigmaMap, w: np.ndarray, guess: np.ndarray, steps: int = 60):
    """Vectorized undamped Newton for arrays of targets (rendering path).

    Returns (z, ok) where ok flags entries with residual below a loose
    per-entry tolerance and |z| > 1.
    """
    z = guess.astype(complex).copy()
    bad = np.abs(z) < 1.05
    z[bad] = 1.05 * np.exp(1j * np.angle(z[bad]))
    for _ in range(steps):
        val, der = evaluate(f, z)
        der = np.where(np.abs(der) < 1e-30, 1e-30, der)
        step = (val - w) / der
        z = z - step
        z = np.where(np.abs(z) < 1e-9, 1.05, z)
        if np.max(np.abs(step)) < 1e-13 * (1.0 + np.max(np.abs(z))):
            break
    val, _ = evaluate(f, z)
    ok = (np.abs(val - w) < 1e-9 * (1.0 + np.abs(w))) & (np.abs(z) > 1.0)
    return z, ok


def schwarz_with_pullback(
    f: SigmaMap, w: complex, guess: complex | None = None
) -> tuple[complex, complex]:
    """sigma_f(w) together with the exterior preimage z = f^{-1}(w)."""
    z = invert_exterior(f, w, guess)
    value, _ = evaluate(f, 1.0 / z.conjugate())
    return value, z


def schwarz(f: SigmaMap, w: complex, guess: complex | None = None) -> complex:
    """The Schwarz reflection sigma_f = f o (1/conj) o f^{-1}; fixes f(T)."""
    return schwarz_with_pullback(f, w, guess)[0]


def schwarz_dbar(f: SigmaMap, w: complex, z: complex | None = None) -> complex:
    """The anti-holomorphic derivative d(sigma)/d(conj w).

    z, when given, must be the exterior preimage f^{-1}(w).
    """
    if z is None:
        z = invert_exterior(f, w)
    zc = z.conjugate()
    _, der_out = evaluate(f, z)
    _, der_in = evaluate(f, 1.0 / zc)
    return -der_in / (zc * zc * der_out.conjugate())


class Region:
    EXTERIOR = "exterior"
    DROPLET = "droplet"
    BOUNDARY = "boundary"


def membership_exterior(
    f: SigmaMap, w: complex, tol: float = 1e-9, samples: int = 4096
) -> str:
    """Locate w relative to the droplet by the winding number of f(T) - w.

    Adaptive argument summation: intervals with a large argument increment
    (the curve passes near w) are subdivided until every increment is small.
    """
    theta = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    pts = boundary_point(f, theta)
    for _ in range(24):
        rel = pts - w
        dist = np.abs(rel)
        if dist.min() < tol:
            return Region.BOUNDARY
        inc = np.angle(np.roll(rel, -1) / rel)
        coarse = np.abs(inc) > 0.5
        if not coarse.any() or theta.size > (1 << 17):
            break
        idx = np.flatnonzero(coarse)
        nxt = np.where(idx + 1 < theta.size, theta[(idx + 1) % theta.size], 2 * math.pi)
        mids = 0.5 * (theta[idx] + nxt)
        theta = np.sort(np.concatenate([theta, mids]))
        pts = boundary_point(f, theta)
    winding = int(round(inc.sum() / (2.0 * math.pi)))
    return Region.DROPLET if winding != 0 else Region.EXTERIOR


@dataclass(frozen=True)
class CuspSet:
    """Critical points xi_i on the unit circle and cusps zeta_i = f(xi_i),
    labeled counter-clockwise with label 1 fixed by the landing of the 0-ray.
    """

    xi: tuple[complex, ...]
    zeta: tuple[complex, ...]

    def __len__(self) -> int:
        return len(self.xi)


@dataclass(frozen=True)
class DoublePoint:
    theta: float
    theta_prime: float
    zeta: complex


@dataclass(frozen=True)
class DropletComponent:
    """One component of the desingularized droplet.

    boundary lists the singular points on its boundary in counter-clockwise
    order as ("cusp", cusp index) / ("double", double point index) tags.
    """

    index: int
    boundary: tuple[tuple[str, int], ...]

    @property
    def cusp_labels(self) -> tuple[int, ...]:
        return tuple(i for kind, i in self.boundary if kind == "cusp")

    @property
    def double_points(self) -> tuple[int, ...]:
        return tuple(i for kind, i in self.boundary if kind == "double")

    @property
    def j(self) -> int:
        return len(self.boundary) - 3


def critical_point_polynomial(f: SigmaMap) -> np.ndarray:
    """Coefficients (by increasing power) of z^{d+1} f'(z)."""
    d = f.degree
    coeffs = np.zeros(d + 2, dtype=complex)
    coeffs[d + 1] = 1.0
    for k in range(1, d + 1):
        coeffs[d - k] = -k * f.coeffs[k - 1]
    return coeffs


def find_cusps(f: SigmaMap) -> CuspSet:
    """All d+1 cusps of the droplet boundary, labeled from the 0-ray landing.

    The critical points are the roots of z^{d+1} f'(z); every root must lie
    on the unit circle for a member of the family.
    """
    roots = polyroots.all_roots(critical_point_polynomial(f))
    on_circle = [z for z in roots if abs(abs(z) - 1.0) < UNIT_ROOT_TOL]
    if len(on_circle) != f.degree + 1:
        raise WrongCuspCountError(
            f"{len(on_circle)} unit-circle critical points, expected {f.degree + 1}"
        )
    xi = sorted(on_circle, key=lambda z: math.atan2(z.imag, z.real) % (2 * math.pi))
    zeta = [evaluate(f, z)[0] for z in xi]

    from . import rays  # local import: rays needs this module for its targets

    landing = rays.zero_ray_landing(f)
    dists = [abs(landing - zt) for zt in zeta]
    order = sorted(range(len(zeta)), key=dists.__getitem__)
    if dists[order[0]] > RAY_CUSP_MATCH or (
        len(order) > 1 and dists[order[1]] < RAY_CUSP_MATCH
    ):
        raise RayLandingAmbiguousError(
            f"0-ray landing {landing} does not single out a cusp (distances {sorted(dists)[:2]})"
        )
    first = order[0]
    xi = xi[first:] + xi[:first]
    zeta = zeta[first:] + zeta[:first]
    return CuspSet(tuple(xi), tuple(zeta))


def _double_point_newton(f: SigmaMap, t1: float, t2: float):
    """Newton for f(e^{i t1}) = f(e^{i t2}) as two real equations."""
    for _ in range(200):
        z1, z2 = cmath.exp(1j * t1), cmath.exp(1j * t2)
        v1, d1 = evaluate(f, z1)
        v2, d2 = evaluate(f, z2)
        r = v1 - v2
        if abs(r) < DOUBLE_POINT_RESIDUAL:
            return t1, t2, abs(r)
        j1 = 1j * z1 * d1
        j2 = -1j * z2 * d2
        jac = np.array([[j1.real, j2.real], [j1.imag, j2.imag]])
        rhs = np.array([r.real, r.imag])
        try:
            step = np.linalg.solve(jac, rhs)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(jac, rhs, rcond=None)
        # tangential contacts make the Jacobian nearly singular; cap the step
        norm = float(np.hypot(*step))
        if norm > 0.1:
            step *= 0.1 / norm
        t1 -= step[0]
        t2 -= step[1]
    z1, z2 = cmath.exp(1j * t1), cmath.exp(1j * t2)
    return t1, t2, abs(evaluate(f, z1)[0] - evaluate(f, z2)[0])


def find_double_points(f: SigmaMap, grid: int = COARSE_GRID) -> tuple[DoublePoint, ...]:
    """Self-contacts of the droplet boundary.

    Coarse scan of |f(e^{i s}) - f(e^{i t})| over the parameter triangle,
    one refinement pass around candidate minima, then Newton polishing.
    """
    theta = np.linspace(0.0, 2.0 * math.pi, grid, endpoint=False)
    pts = boundary_point(f, theta)
    diff = np.abs(pts[:, None] - pts[None, :])
    step = 2.0 * math.pi / grid
    found: list[tuple[float, float]] = []

    cand = np.argwhere(diff < 5e-2)
    cand = cand[cand[:, 0] + 2 < cand[:, 1]]  # upper triangle, off the diagonal
    # local minima among the coarse candidates
    mins = []
    for i, j in cand:
        window = diff[max(0, i - 1): i + 2, max(0, j - 1): j + 2]
        if diff[i, j] <= window.min() + 1e-15:
            mins.append((i, j))
    for i, j in mins:
        # refinement pass: subsample the cell before trusting the 1e-2 gate
        s = np.linspace(theta[i] - step, theta[i] + step, 17)
        t = np.linspace(theta[j] - step, theta[j] + step, 17)
        sub = np.abs(
            boundary_point(f, s)[:, None] - boundary_point(f, t)[None, :]
        )
        si, ti = np.unravel_index(np.argmin(sub), sub.shape)
        if sub[si, ti] > 1e-2:
            continue
        t1, t2, res = _double_point_newton(f, float(s[si]), float(t[ti]))
        if res > 1e-10:
            continue
        t1m, t2m = t1 % (2 * math.pi), t2 % (2 * math.pi)
        gap = abs(t1m - t2m)
        gap = min(gap, 2 * math.pi - gap)
        if gap < DIAGONAL_GAP:
            continue
        found.append((t1m, t2m))

    merged: list[tuple[float, float]] = []
    for t1, t2 in found:
        pair = tuple(sorted((t1, t2)))
        is_new = True
        for q in merged:
            if max(
                min(abs(pair[0] - q[0]), 2 * math.pi - abs(pair[0] - q[0])),
                min(abs(pair[1] - q[1]), 2 * math.pi - abs(pair[1] - q[1])),
            ) < DOUBLE_POINT_MERGE:
                is_new = False
                break
        if is_new:
            merged.append(pair)
    if len(merged) > f.degree - 2:
        raise TooManyDoublePointsError(
            f"{len(merged)} double points exceed the bound {f.degree - 2}"
        )
    merged.sort()
    return tuple(
        DoublePoint(t1, t2, boundary_point(f, t1)) for t1, t2 in merged
    )


def droplet_decomposition(
    f: SigmaMap,
    cusps: CuspSet | None = None,
    double_points: tuple[DoublePoint, ...] | None = None,
) -> tuple[DropletComponent, ...]:
    """Components of the desingularized droplet.

    The circle is cut at cusp preimages and double-point preimages; faces are
    traced by walking arcs counter-clockwise and jumping between the two
    parameters of each double point.
    """
    if cusps is None:
        cusps = find_cusps(f)
    if double_points is None:
        double_points = find_double_points(f)

    marks: list[tuple[float, str, int]] = []
    for i, x in enumerate(cusps.xi):
        marks.append((math.atan2(x.imag, x.real) % (2 * math.pi), "cusp", i))
    for i, dp in enumerate(double_points):
        marks.append((dp.theta % (2 * math.pi), "double", i))
        marks.append((dp.theta_prime % (2 * math.pi), "double", i))
    marks.sort()
    n = len(marks)
    partner = {}
    for i in range(n):
        for j in range(i + 1, n):
            if marks[i][1] == "double" and marks[j][1] == "double" and marks[i][2] == marks[j][2]:
                partner[i] = j
                partner[j] = i

    visited = [False] * n  # arc a runs from mark a to mark (a+1) % n
    faces: list[DropletComponent] = []
    for start in range(n):
        if visited[start]:
            continue
        boundary: list[tuple[str, int]] = []
        arc = start
        while not visited[arc]:
            visited[arc] = True
            end = (arc + 1) % n
            _, kind, idx = marks[end]
            boundary.append((kind, idx))
            arc = end if kind == "cusp" else partner[end]
        faces.append(DropletComponent(len(faces), tuple(boundary)))

    k = len(double_points)
    if len(faces) != k + 1:
        raise InconsistentDecompositionError(
            f"{len(faces)} components for {k} double points"
        )
    if sum(len(c.boundary) for c in faces) != (f.degree + 1) + 2 * k:
        raise InconsistentDecompositionError("boundary vertex count mismatch")
    if any(len(c.boundary) < 3 for c in faces):
        raise InconsistentDecompositionError("component with fewer than 3 vertices")
    # adjacency through double points must form a tree
    if k:
        adjacency = {i: set() for i in range(len(faces))}
        for dpi in range(k):
            touching = [c.index for c in faces if dpi in c.double_points]
            if len(touching) != 2:
                raise InconsistentDecompositionError(
                    f"double point {dpi} touches {len(touching)} components"
                )
            adjacency[touching[0]].add(touching[1])
            adjacency[touching[1]].add(touching[0])
        seen = {0}
        stack = [0]
        while stack:
            for nb in adjacency[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        if len(seen) != len(faces):
            raise InconsistentDecompositionError("component graph is not connected")
    return tuple(faces)


@dataclass(frozen=True)
class AngledTree:
    """Tree of droplet components with local degrees and exact edge angles.

    angle_steps[(v, e, e')] counts boundary vertices passed counter-clockwise
    from edge e to edge e' around component v; the geometric angle is that
    count times 2*pi/(1 + deg(v)).  Edges are identified by double point
    index.
    """

    degrees: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]  # (component, component, double point)
    angle_steps: dict

    @property
    def total_degree(self) -> int:
        return 1 + sum(deg - 1 for deg in self.degrees)

    def angle(self, v: int, e1: int, e2: int) -> Fraction:
        """Angle between edges e1, e2 at vertex v, as a fraction of a turn."""
        return mod1(Fraction(self.angle_steps[(v, e1, e2)], 1 + self.degrees[v]))

    def validate(self) -> None:
        for v, deg in enumerate(self.degrees):
            if deg < 2:
                raise ValueError(f"vertex {v} has degree {deg} < 2")
            valence = sum(1 for a, b, _ in self.edges if v in (a, b))
            if valence > 1 + deg:
                raise ValueError(f"vertex {v} valence {valence} exceeds 1 + deg")
        for (v, e1, e2), steps in self.angle_steps.items():
            m = 1 + self.degrees[v]
            if steps % m == 0:
                raise ValueError("degenerate angle between distinct edges")
            if (steps + self.angle_steps[(v, e2, e1)]) % m != 0:
                raise ValueError("angle function is not skew-symmetric")
        # additivity over edge triples at a common vertex
        for v in range(len(self.degrees)):
            incident = sorted({e for (vv, e, _) in self.angle_steps if vv == v})
            m = 1 + self.degrees[v]
            for e1 in incident:
                for e2 in incident:
                    for e3 in incident:
                        if len({e1, e2, e3}) < 3:
                            continue
                        lhs = self.angle_steps[(v, e1, e2)] + self.angle_steps[(v, e2, e3)]
                        if (lhs - self.angle_steps[(v, e1, e3)]) % m != 0:
                            raise ValueError("angle function is not additive")


def angled_tree(f: SigmaMap, components: tuple[DropletComponent, ...] | None = None) -> AngledTree:
    """The angled tree of the droplet: one vertex per component, one edge per
    double point, angles read off the cyclic boundary order."""
    if components is None:
        components = droplet_decomposition(f)
    degrees = tuple(2 + c.j for c in components)
    edges = []
    k = max((max(c.double_points, default=-1) for c in components), default=-1) + 1
    for dpi in range(k):
        touching = [c.index for c in components if dpi in c.double_points]
        edges.append((touching[0], touching[1], dpi))
    angle_steps = {}
    for c in components:
        cycle = c.boundary
        m = len(cycle)
        positions = {idx: pos for pos, (kind, idx) in enumerate(cycle) if kind == "double"}
        for e1, p1 in positions.items():
            for e2, p2 in positions.items():
                if e1 != e2:
                    angle_steps[(c.index, e1, e2)] = (p2 - p1) % m
    tree = AngledTree(degrees, tuple(edges), angle_steps)
    tree.validate()
    if tree.total_degree != f.degree:
        raise InconsistentDecompositionError(
            f"total degree {tree.total_degree} != map degree {f.degree}"
        )
    return tree


@dataclass(frozen=True)
class DropletAnatomy:
    cusps: CuspSet
    double_points: tuple[DoublePoint, ...]
    components: tuple[DropletComponent, ...]
    tree: AngledTree


@lru_cache(maxsize=64)
def anatomy(f: SigmaMap) -> DropletAnatomy:
    """Cusps, double points, decomposition and tree, computed once per map."""
    cusps = find_cusps(f)
    dps = find_double_points(f)
    components = droplet_decomposition(f, cusps, dps)
    tree = angled_tree(f, components)
    return DropletAnatomy(cusps, dps, components, tree)
