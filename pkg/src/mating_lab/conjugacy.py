"""The circle homeomorphism matching Markov itineraries of the regular
reflection chain on d+1 circles with those of the angle map x -> -d*x.

Both systems carry the partition by the d+1 fixed points (roots of unity on
the circle side, j/(d+1) on the angle side) with identical transition
structure, so equal itineraries identify points.  The angle-side pullback
contracts by exactly 1/d per symbol, giving certified enclosures; the
circle-side pullback slows down near the parabolic fixed points.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

from . import groups
from .angles import angle_from_itinerary, itinerary_md, mod1
from .geom import reflect

UNIT_TOL = 1e-12
DEFAULT_TOL = 1e-7
DEFAULT_MAX_SYMBOLS = 256


def itinerary_rho(num_circles: int, t: complex, n: int) -> list[int]:
    """First n generator indices of the orbit of t on the unit circle under
    the reflection map of the regular chain."""
    if abs(abs(t) - 1.0) > UNIT_TOL:
        raise ValueError(f"|t| = {abs(t)} is not on the unit circle")
    g = groups.base_chain(num_circles)
    z = t / abs(t)
    out = []
    for _ in range(n):
        z, i = groups.rho_step(g, z)
        out.append(i)
        z /= abs(z)
    return out


def _fixed_point_index(d: int, t: complex) -> int | None:
    D = d + 1
    for j in range(D):
        if abs(t - cmath.exp(2 * math.pi * 1j * j / D)) < 1e-12:
            return j
    return None


def eval_E(d: int, t: complex, tol: float = DEFAULT_TOL) -> Fraction:
    """Angle coordinate of a circle point: the angle with the same itinerary.

    The result is the midpoint of an exact interval of width < tol (angle
    pullback contracts by 1/d per symbol).  Fixed points are matched
    exactly; the map sends 1 to 0 and respects the cyclic order.
    """
    if abs(abs(t) - 1.0) > UNIT_TOL:
        raise ValueError(f"|t| = {abs(t)} is not on the unit circle")
    j = _fixed_point_index(d, t)
    if j is not None:
        return Fraction(j, d + 1)
    n = max(2, math.ceil(math.log(1.0 / tol) / math.log(d)))
    symbols = itinerary_rho(d + 1, t, n)
    lo, hi = _enclosure(d, symbols)
    return mod1((lo + hi) / 2)


def _enclosure(d: int, symbols: list[int]) -> tuple[Fraction, Fraction]:
    # tolerate an inadmissible numeric tail by truncating at the failure
    for cut in range(len(symbols), 0, -1):
        try:
            return angle_from_itinerary(d, symbols[:cut])
        except ValueError:
            continue
    return Fraction(0), Fraction(1)


def eval_E_inverse(
    d: int,
    theta: Fraction,
    tol: float = DEFAULT_TOL,
    max_symbols: int = DEFAULT_MAX_SYMBOLS,
) -> tuple[complex, float]:
    """Circle point with the itinerary of the given angle.

    Nested arc pullback through the chain reflections prescribed by the
    angle itinerary; stops when the arc chord is below tol or max_symbols
    is reached (slow near the parabolic points, where the result is still
    returned with its achieved diameter).  Returns (point, diameter).
    """
    theta = mod1(theta)
    D = d + 1
    if (theta * D).denominator == 1:
        j = int(theta * D)
        return cmath.exp(2 * math.pi * 1j * j / D), 0.0
    g = groups.base_chain(D)
    n = max(2, math.ceil(math.log(1.0 / tol) / math.log(d)))
    best: tuple[complex, float] | None = None
    while True:
        n = min(n, max_symbols)
        symbols = itinerary_md(d, theta, n)
        arc = _arc_pullback(g, symbols)
        if arc is not None:
            mid, diam = arc
            if best is None or diam < best[1]:
                best = (mid, diam)
            if diam < tol:
                return best
        if n >= max_symbols:
            if best is None:
                raise ValueError("arc pullback failed for every symbol depth")
            return best
        n = min(2 * n, max_symbols)


def _arc_pullback(g: groups.NecklaceGroup, symbols: list[int]):
    """Image of the last symbol's circle arc under the reversed reflection
    word; returns (midpoint, chord diameter)."""
    D = g.d
    j = symbols[-1]
    a = cmath.exp(2 * math.pi * 1j * j / D)
    b = cmath.exp(2 * math.pi * 1j * (j + 1) / D)
    m = cmath.exp(2 * math.pi * 1j * (j + 0.5) / D)
    for s in reversed(symbols[:-1]):
        circle = g.circles[s]
        a, b, m = reflect(circle, a), reflect(circle, b), reflect(circle, m)
    return m / abs(m), abs(a - b)
