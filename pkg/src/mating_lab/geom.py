"""Plane inversive geometry: circles, circle reflections, (anti-)Möbius maps.

Points are python complex numbers throughout.  The point at infinity is never
stored in a value; operations that would produce it raise one of the signal
exceptions below and the caller decides what infinity means for it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

CENTER_EPS = 1e-14      # reflecting the center would send it to infinity
POLE_EPS = 1e-30        # |cz+d| below this counts as a Möbius pole
DET_EPS = 1e-30         # minimal |ad-bc| for a non-degenerate map
TANGENCY_TOL = 1e-9     # default tolerance for circle contact classification


class GeomError(Exception):
    """Base class for geometric signal errors."""


class CenterInputError(GeomError):
    """Reflection was asked for the circle center (image is infinity)."""


class PoleInputError(GeomError):
    """Möbius map was evaluated at its pole (image is infinity)."""


class AntipodalPointsError(GeomError):
    """The orthogonal circle through the given boundary points is a line."""


class DegenerateMapError(GeomError):
    """ad - bc vanished; the coefficients do not define a Möbius map."""


def require_finite(z: complex, what: str = "point") -> complex:
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite {what}: {z!r}")
    return z


@dataclass(frozen=True)
class Circle:
    """Euclidean circle with strictly positive radius."""

    center: complex
    radius: float

    def __post_init__(self):
        require_finite(self.center, "circle center")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"circle radius must be positive, got {self.radius}")

    def point(self, angle: float) -> complex:
        return self.center + self.radius * cmath.exp(1j * angle)

    def contains(self, z: complex, tol: float = 0.0) -> bool:
        """True if z lies in the closed disk (inflated by tol)."""
        return abs(z - self.center) <= self.radius + tol


def reflect(c: Circle, z: complex) -> complex:
    """Inversion of z in the circle c.

    Raises CenterInputError when z is the center (the image would be the
    point at infinity).
    """
    w = z - c.center
    if abs(w) < CENTER_EPS:
        raise CenterInputError(f"reflection of the center of {c}")
    return c.center + c.radius * c.radius / w.conjugate()


class CircleRelation(Enum):
    DISJOINT = "disjoint"
    EXTERNALLY_TANGENT = "externally_tangent"
    OVERLAPPING = "overlapping"
    NESTED = "nested"


def circle_relation(
    c1: Circle, c2: Circle, tol: float = TANGENCY_TOL
) -> tuple[CircleRelation, complex | None]:
    """Classify the mutual position of two circles.

    Returns (relation, tangency point); the point is set only for external
    tangency and lies on the segment joining the centers.  Internal tangency
    is classified as NESTED (the interiors are not disjoint in the sense
    needed by reflection-group chains).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    sep = abs(c2.center - c1.center)
    r1, r2 = c1.radius, c2.radius
    if abs(sep - (r1 + r2)) <= tol:
        point = c1.center + (c2.center - c1.center) * (r1 / sep)
        return CircleRelation.EXTERNALLY_TANGENT, point
    if sep > r1 + r2:
        return CircleRelation.DISJOINT, None
    if sep <= abs(r1 - r2) + tol:
        return CircleRelation.NESTED, None
    return CircleRelation.OVERLAPPING, None


def orthogonal_chord_circle(theta1: float, theta2: float) -> Circle:
    """The circle through e^{i theta1}, e^{i theta2} orthogonal to the unit circle.

    Orthogonality forces |center|^2 = 1 + radius^2.  Antipodal boundary
    points are rejected: the orthogonal "circle" degenerates to a diameter.
    """
    half = 0.5 * (theta2 - theta1)
    c = math.cos(half)
    if abs(c) < 1e-9:
        raise AntipodalPointsError(
            f"boundary points at angles {theta1}, {theta2} are antipodal"
        )
    mid = cmath.exp(0.5j * (theta1 + theta2))
    center = mid / c
    radius = abs(math.tan(half))
    if radius < 1e-15:
        raise ValueError("coincident boundary points")
    return Circle(center, radius)


class Orientation(Enum):
    PRESERVING = "preserving"
    REVERSING = "reversing"


@dataclass(frozen=True)
class AntiMoebius:
    """Möbius or anti-Möbius map z -> (a z' + b) / (c z' + d), z' = z or conj(z).

    Coefficients are normalized to ad - bc = 1 on construction.
    """

    a: complex
    b: complex
    c: complex
    d: complex
    orientation: Orientation = Orientation.PRESERVING

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if abs(det) < DET_EPS:
            raise DegenerateMapError(f"determinant {det} too small")
        s = 1.0 / cmath.sqrt(det)
        object.__setattr__(self, "a", self.a * s)
        object.__setattr__(self, "b", self.b * s)
        object.__setattr__(self, "c", self.c * s)
        object.__setattr__(self, "d", self.d * s)

    @property
    def reversing(self) -> bool:
        return self.orientation is Orientation.REVERSING

    @classmethod
    def identity(cls) -> "AntiMoebius":
        return cls(1, 0, 0, 1)

    @classmethod
    def circle_reflection(cls, circle: Circle) -> "AntiMoebius":
        """Reflection in a circle, as an anti-Möbius map."""
        c0, r = circle.center, circle.radius
        return cls(c0, r * r - abs(c0) ** 2, 1, -c0.conjugate(), Orientation.REVERSING)

    @classmethod
    def from_three_points(
        cls, src: tuple[complex, complex, complex], dst: tuple[complex, complex, complex]
    ) -> "AntiMoebius":
        """The Möbius map taking the three src points to the three dst points."""
        return _to_zero_one_inf(*dst).inverse() @ _to_zero_one_inf(*src)

    def inverse(self) -> "AntiMoebius":
        # (a,b;c,d) inverse is (d,-b;-c,a); a reversing map needs conjugated entries.
        if self.reversing:
            return AntiMoebius(
                self.d.conjugate(),
                -self.b.conjugate(),
                -self.c.conjugate(),
                self.a.conjugate(),
                Orientation.REVERSING,
            )
        return AntiMoebius(self.d, -self.b, -self.c, self.a, Orientation.PRESERVING)

    def __matmul__(self, other: "AntiMoebius") -> "AntiMoebius":
        return compose(self, other)

    def __call__(self, z: complex) -> complex:
        return apply(self, z)


def apply(m: AntiMoebius, z: complex) -> complex:
    """Evaluate the map at a finite point.

    Raises PoleInputError at the pole; the caller maps that to infinity.
    """
    w = z.conjugate() if m.reversing else z
    den = m.c * w + m.d
    if abs(den) < POLE_EPS:
        raise PoleInputError(f"pole of {m} at {z}")
    return (m.a * w + m.b) / den


def compose(m1: AntiMoebius, m2: AntiMoebius) -> AntiMoebius:
    """The map m1 o m2, tracking orientation parity."""
    a2, b2, c2, d2 = m2.a, m2.b, m2.c, m2.d
    if m1.reversing:
        a2, b2, c2, d2 = (
            a2.conjugate(),
            b2.conjugate(),
            c2.conjugate(),
            d2.conjugate(),
        )
    orientation = (
        Orientation.REVERSING
        if m1.reversing != m2.reversing
        else Orientation.PRESERVING
    )
    return AntiMoebius(
        m1.a * a2 + m1.b * c2,
        m1.a * b2 + m1.b * d2,
        m1.c * a2 + m1.d * c2,
        m1.c * b2 + m1.d * d2,
        orientation,
    )


def fixed_points(m: AntiMoebius) -> tuple[complex, ...]:
    """Finite fixed points of an orientation-preserving map."""
    if m.reversing:
        raise ValueError("fixed_points expects an orientation-preserving map")
    # c z^2 + (d - a) z - b = 0
    if abs(m.c) < POLE_EPS:
        if abs(m.d - m.a) < POLE_EPS:
            raise DegenerateMapError("identity map has no isolated fixed points")
        return (m.b / (m.d - m.a),)
    disc = cmath.sqrt((m.d - m.a) ** 2 + 4 * m.b * m.c)
    z1 = ((m.a - m.d) + disc) / (2 * m.c)
    z2 = ((m.a - m.d) - disc) / (2 * m.c)
    return (z1, z2)


def circle_through_points(z1: complex, z2: complex, z3: complex) -> Circle:
    """The circle through three non-collinear points."""
    # Perpendicular bisector intersection, solved as a 2x2 linear system.
    ax, ay = (z2 - z1).real, (z2 - z1).imag
    bx, by = (z3 - z1).real, (z3 - z1).imag
    det = 2.0 * (ax * by - ay * bx)
    if abs(det) < 1e-300:
        raise GeomError("collinear points have no circumscribed circle")
    sa = ax * ax + ay * ay
    sb = bx * bx + by * by
    ux = (by * sa - ay * sb) / det
    uy = (ax * sb - bx * sa) / det
    center = z1 + complex(ux, uy)
    return Circle(center, abs(complex(ux, uy)))


def map_circle(m: AntiMoebius, circle: Circle) -> Circle:
    """Image of a circle under a Möbius map, assuming the image is a circle."""
    pts = [apply(m, circle.point(t)) for t in (0.0, 2.0, 4.0)]
    return circle_through_points(*pts)


def _to_zero_one_inf(z1: complex, z2: complex, z3: complex) -> AntiMoebius:
    # The Möbius map sending (z1, z2, z3) to (0, 1, infinity).
    return AntiMoebius(z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))
