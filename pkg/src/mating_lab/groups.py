"""Necklace reflection groups: validated tangent circle chains, the piecewise
reflection map, and orbit classification against the fundamental domain.

The plane-minus-disks face structure (unbounded polygon component vs bounded
droplet components) is classified on a raster: exact circle-arrangement
topology would be disproportionate for chains of at most 17 circles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import ndimage

from .geom import Circle, CircleRelation, circle_relation, reflect, CenterInputError

CHAIN_TOL = 1e-8          # tangency residual accepted for chain contacts
DISK_EDGE_TOL = 1e-12     # closed-disk membership inflation for the reflection map
RASTER_RES = 2048
MAX_CIRCLES = 17
DEFAULT_QUERY_DEPTH = 4096
DEFAULT_RENDER_DEPTH = 512


class GroupError(Exception):
    pass


class NotTangentChainError(GroupError):
    pass


class OverlappingInteriorsError(GroupError):
    pass


class HiddenCircleError(GroupError):
    """A circle is invisible from infinity (condition on the unbounded face)."""


class TransversalIntersectionError(GroupError):
    pass


class NotInDomainError(GroupError):
    """The point lies outside every closed disk (fundamental domain side)."""


@dataclass(frozen=True)
class Tangency:
    i: int
    j: int
    point: complex


@dataclass(frozen=True)
class NecklaceGroup:
    """Labeled circle chain C_0 .. C_{d-1} with all tangential contacts."""

    circles: tuple[Circle, ...]
    tangencies: tuple[Tangency, ...]

    @property
    def d(self) -> int:
        return len(self.circles)

    def consecutive_tangency_point(self, i: int) -> complex:
        """Contact point of C_{i-1} and C_i (cusp label i, 0-based)."""
        a, b = (i - 1) % self.d, i
        lo, hi = min(a, b), max(a, b)
        for t in self.tangencies:
            if (t.i, t.j) == (lo, hi):
                return t.point
        raise GroupError(f"missing consecutive tangency {a}-{b}")

    @property
    def extra_tangencies(self) -> tuple[Tangency, ...]:
        d = self.d
        return tuple(
            t for t in self.tangencies if (t.j - t.i) % d not in (1, d - 1)
        )

    def to_json(self) -> dict:
        return {
            "circles": [
                {"center": [c.center.real, c.center.imag], "r": c.radius}
                for c in self.circles
            ]
        }

    @classmethod
    def from_json(cls, data: dict) -> "NecklaceGroup":
        circles = [
            Circle(complex(c["center"][0], c["center"][1]), float(c["r"]))
            for c in data["circles"]
        ]
        return validate_necklace(circles)


def _base_circles(d: int) -> list[Circle]:
    # center sec(pi/d) e^{i pi (2j+1)/d}, radius tan(pi/d); circle j passes
    # through the roots of unity e^{2 pi i j/d} and e^{2 pi i (j+1)/d}
    return [
        Circle(
            complex(math.cos(math.pi * (2 * j + 1) / d), math.sin(math.pi * (2 * j + 1) / d))
            / math.cos(math.pi / d),
            math.tan(math.pi / d),
        )
        for j in range(d)
    ]


def base_group(d: int) -> NecklaceGroup:
    """The regular chain: d circles orthogonal to the unit circle through
    consecutive d-th roots of unity; consecutive contacts at the roots."""
    if not (3 <= d <= MAX_CIRCLES):
        raise ValueError(f"need 3 <= d <= {MAX_CIRCLES}, got {d}")
    return validate_necklace(_base_circles(d))


@lru_cache(maxsize=32)
def base_chain(d: int) -> NecklaceGroup:
    """The regular chain with its exact tangency list, skipping the raster
    validation pass (hot path for the boundary conjugacy)."""
    if not (3 <= d <= MAX_CIRCLES):
        raise ValueError(f"need 3 <= d <= {MAX_CIRCLES}, got {d}")
    circles = _base_circles(d)
    tangencies = []
    for j in range(d - 1):
        root = complex(math.cos(2 * math.pi * (j + 1) / d), math.sin(2 * math.pi * (j + 1) / d))
        tangencies.append(Tangency(j, j + 1, root))
    tangencies.append(Tangency(0, d - 1, 1.0 + 0.0j))
    return NecklaceGroup(tuple(circles), tuple(tangencies))


def validate_necklace(circles: list[Circle], tol: float = CHAIN_TOL,
                      raster: int = RASTER_RES) -> NecklaceGroup:
    """Check the chain conditions and record every tangential contact.

    Consecutive circles must be externally tangent, interiors pairwise
    disjoint, non-consecutive contacts tangential, and every circle must
    border the unbounded complementary face (checked by flood fill).
    """
    d = len(circles)
    if d < 3:
        raise GroupError(f"a chain needs at least 3 circles, got {d}")
    if d > MAX_CIRCLES:
        raise GroupError(f"at most {MAX_CIRCLES} circles supported, got {d}")
    tangencies: list[Tangency] = []
    for i in range(d):
        for j in range(i + 1, d):
            rel, point = circle_relation(circles[i], circles[j], tol)
            consecutive = j - i == 1 or (i == 0 and j == d - 1)
            if rel is CircleRelation.EXTERNALLY_TANGENT:
                tangencies.append(Tangency(i, j, point))
            elif consecutive:
                raise NotTangentChainError(
                    f"circles {i} and {j} are {rel.value}, expected tangent"
                )
            elif rel is CircleRelation.OVERLAPPING:
                raise TransversalIntersectionError(
                    f"circles {i} and {j} cross transversally"
                )
            elif rel is CircleRelation.NESTED:
                raise OverlappingInteriorsError(
                    f"circle {i} and {j} interiors are not disjoint"
                )
    group = NecklaceGroup(tuple(circles), tuple(tangencies))
    field = face_field(group, raster)
    px = field.step
    for i, c in enumerate(circles):
        ring = np.abs(np.abs(field.grid - c.center) - c.radius) < 2.5 * px
        if not np.any(ring & field.outer_mask):
            raise HiddenCircleError(f"circle {i} does not border the unbounded face")
    return group


@dataclass(frozen=True)
class FaceField:
    """Raster classification of the complement of the closed disks."""

    x0: float
    y0: float
    step: float
    labels: np.ndarray          # 0 = blocked (inside a disk)
    outer_labels: frozenset
    face_of_label: dict         # bounded-face label -> component index
    grid: np.ndarray            # pixel-center complex coordinates
    outer_mask: np.ndarray

    @property
    def face_count(self) -> int:
        return len(self.face_of_label)

    def locate(self, z: complex) -> int | None:
        """Component index of the face containing z: -1 for the unbounded
        face, a bounded-face index otherwise, None if unresolved (blocked
        pixels with no free neighbor within a few pixels)."""
        n = self.labels.shape[0]
        col = (z.real - self.x0) / self.step
        row = (z.imag - self.y0) / self.step
        ic, ir = int(round(col)), int(round(row))
        if not (0 <= ic < n and 0 <= ir < n):
            return -1
        for radius in range(4):
            lo_r, hi_r = max(0, ir - radius), min(n, ir + radius + 1)
            lo_c, hi_c = max(0, ic - radius), min(n, ic + radius + 1)
            patch = self.labels[lo_r:hi_r, lo_c:hi_c]
            for lab in np.unique(patch):
                if lab == 0:
                    continue
                if lab in self.outer_labels:
                    return -1
                return self.face_of_label[int(lab)]
        return None


@lru_cache(maxsize=16)
def face_field(group: NecklaceGroup, raster: int = RASTER_RES) -> FaceField:
    xs = [c.center.real for c in group.circles]
    ys = [c.center.imag for c in group.circles]
    rs = [c.radius for c in group.circles]
    lo = min(x - r for x, r in zip(xs, rs)), min(y - r for y, r in zip(ys, rs))
    hi = max(x + r for x, r in zip(xs, rs)), max(y + r for y, r in zip(ys, rs))
    size = max(hi[0] - lo[0], hi[1] - lo[1])
    pad = 0.02 * size
    x0, y0 = lo[0] - pad, lo[1] - pad
    step = (size + 2 * pad) / (raster - 1)
    xs_grid = x0 + step * np.arange(raster)
    ys_grid = y0 + step * np.arange(raster)
    grid = xs_grid[None, :] + 1j * ys_grid[:, None]
    blocked = np.zeros(grid.shape, dtype=bool)
    for c in group.circles:
        blocked |= np.abs(grid - c.center) <= c.radius + 0.5 * step
    labels, _ = ndimage.label(~blocked)
    border = np.unique(
        np.concatenate([labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]])
    )
    outer = frozenset(int(lab) for lab in border if lab != 0)
    outer_mask = np.isin(labels, list(outer))
    bounded = [int(lab) for lab in np.unique(labels) if lab != 0 and lab not in outer]
    centroids = ndimage.center_of_mass(np.ones_like(labels), labels, bounded)
    order = sorted(
        range(len(bounded)),
        key=lambda k: (round(centroids[k][1], 6), round(centroids[k][0], 6)),
    )
    face_of_label = {bounded[k]: idx for idx, k in enumerate(order)}
    return FaceField(x0, y0, step, labels, outer, face_of_label, grid, outer_mask)


def rho_step(group: NecklaceGroup, z: complex) -> tuple[complex, int]:
    """One application of the reflection map: reflect in the lowest-index
    circle whose closed disk contains z."""
    for i, c in enumerate(group.circles):
        if abs(z - c.center) <= c.radius + DISK_EDGE_TOL:
            return reflect(c, z), i
    raise NotInDomainError(f"{z} lies outside every closed disk")


@dataclass(frozen=True)
class OrbitFate:
    kind: str                  # "polygon" | "droplet" | "undecided"
    depth: int
    component: int | None = None

    @property
    def escaped(self) -> bool:
        return self.kind != "undecided"


def classify_orbit(group: NecklaceGroup, z: complex, max_depth: int = DEFAULT_QUERY_DEPTH) -> OrbitFate:
    """Iterate the reflection map until the orbit leaves all disks, then
    classify the terminal point into the unbounded or a bounded face.

    Points still inside a disk after max_depth steps are limit-set
    candidates (undecided)."""
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    field = face_field(group)
    for depth in range(max_depth + 1):
        inside = None
        for i, c in enumerate(group.circles):
            if abs(z - c.center) <= c.radius + DISK_EDGE_TOL:
                inside = i
                break
        if inside is None:
            face = field.locate(z)
            if face is None:
                return OrbitFate("undecided", depth)
            if face == -1:
                return OrbitFate("polygon", depth)
            return OrbitFate("droplet", depth, face)
        if depth == max_depth:
            break
        try:
            z = reflect(group.circles[inside], z)
        except CenterInputError:
            # the center maps to infinity, deep inside the unbounded face
            return OrbitFate("polygon", depth + 1)
    return OrbitFate("undecided", max_depth)


def tangency_points(group: NecklaceGroup) -> tuple[list[complex], list[Tangency]]:
    """Consecutive contact points in label order (cusps of the polygon
    boundary) plus the non-consecutive contacts (double points)."""
    cusps = [group.consecutive_tangency_point(i) for i in range(group.d)]
    return cusps, list(group.extra_tangencies)
