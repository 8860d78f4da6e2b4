"""Exact dynamics of the degree -d angle map x -> -d*x on R/Z.

Angles are fractions.Fraction values normalized to [0, 1); this module is the
exact-rational backbone of the lamination and conjugacy machinery.
"""

from __future__ import annotations

from fractions import Fraction


def mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def parse_angle(text: str) -> Fraction:
    """Parse "num/den" (or "num") as an exact angle in [0, 1)."""
    return mod1(Fraction(text))


def format_angle(x: Fraction) -> str:
    x = mod1(x)
    return f"{x.numerator}/{x.denominator}"


def md_step(d: int, theta: Fraction) -> Fraction:
    """One step of the angle map: -d*theta mod 1."""
    return mod1(-d * theta)


def md_orbit(d: int, theta: Fraction) -> list[Fraction]:
    """Forward orbit of a rational angle until it repeats (always finite)."""
    theta = mod1(theta)
    seen: dict[Fraction, int] = {}
    orbit: list[Fraction] = []
    while theta not in seen:
        seen[theta] = len(orbit)
        orbit.append(theta)
        theta = md_step(d, theta)
    return orbit


def exact_period(d: int, theta: Fraction) -> int | None:
    """Exact period of theta under the angle map, or None if not periodic."""
    t = mod1(theta)
    for n in range(1, 64):
        t = md_step(d, t)
        if t == mod1(theta):
            return n
    return None


def fixed_angles(d: int) -> list[Fraction]:
    """The d+1 fixed angles j/(d+1)."""
    return [Fraction(j, d + 1) for j in range(d + 1)]


def periodic_angles(d: int, n: int) -> list[Fraction]:
    """All angles of exact period n: denominators divide |(-d)^n - 1|."""
    if n > 12:
        raise ValueError("period bound is 12")
    big = abs((-d) ** n - 1)
    out = []
    for j in range(big):
        theta = Fraction(j, big)
        if exact_period(d, theta) == n:
            out.append(theta)
    return out


def two_cycles(d: int) -> list[tuple[Fraction, Fraction]]:
    """Period-two orbits, each listed once as (theta, -d*theta) with theta minimal."""
    cycles = []
    seen: set[Fraction] = set()
    for theta in periodic_angles(d, 2):
        if theta in seen:
            continue
        mate = md_step(d, theta)
        seen.update({theta, mate})
        cycles.append((theta, mate))
    return cycles


def preimages(d: int, theta: Fraction) -> list[Fraction]:
    """The d preimages of theta under x -> -d*x."""
    return sorted(mod1(Fraction(k - theta, d)) for k in range(d))


def symbol_md(d: int, theta: Fraction) -> int:
    """Markov symbol of an angle: 0-based index of the arc between
    consecutive fixed angles, pieces P_j = [j/(d+1), (j+1)/(d+1)].

    The pieces mirror the circles of the d+1-chain, so symbols here match
    reflection-map generator indices.  A boundary angle (a fixed angle)
    takes the lower-index piece; 0 itself takes piece 0.
    """
    D = d + 1
    t = mod1(theta)
    scaled = t * D
    if scaled.denominator == 1:
        j = int(scaled)
        return j - 1 if j >= 1 else 0
    return int(scaled)


def itinerary_md(d: int, theta: Fraction, n: int) -> list[int]:
    """First n Markov symbols of the orbit of theta."""
    out = []
    t = mod1(theta)
    for _ in range(n):
        out.append(symbol_md(d, t))
        t = md_step(d, t)
    return out


def pull_back_interval(
    d: int, symbol: int, lo: Fraction, hi: Fraction
) -> tuple[Fraction, Fraction]:
    """Preimage of the angle interval [lo, hi] through the inverse branch of
    x -> -d*x landing in piece P_symbol = [symbol/(d+1), (symbol+1)/(d+1)].

    Requires [lo, hi] inside a single piece other than P_symbol (admissible
    itinerary step); the result has length (hi - lo)/d.
    """
    D = d + 1
    j = symbol
    k_lo = hi + Fraction(d * j, D)
    k_hi = lo + Fraction(d * (j + 1), D)
    k = k_hi.numerator // k_hi.denominator  # floor; the window is shorter than 1
    if not (k_lo <= k <= k_hi):
        raise ValueError(
            f"no inverse branch of piece {symbol} over [{lo}, {hi}] (inadmissible symbols)"
        )
    return Fraction(k - hi, d), Fraction(k - lo, d)


def angle_from_itinerary(d: int, symbols: list[int]) -> tuple[Fraction, Fraction]:
    """Interval of angles whose itinerary starts with the given symbols.

    Nested pullback through the inverse branches; the interval shrinks by a
    factor d per symbol.
    """
    D = d + 1
    if not symbols:
        return Fraction(0), Fraction(1)
    j = symbols[-1]
    lo, hi = Fraction(j, D), Fraction(j + 1, D)
    for s in reversed(symbols[:-1]):
        lo, hi = pull_back_interval(d, s, lo, hi)
    return lo, hi


def circular_distance(x: Fraction | float, y: Fraction | float) -> float:
    """Distance mod 1, as a float in [0, 1/2]."""
    diff = abs(float(x) - float(y)) % 1.0
    return min(diff, 1.0 - diff)


def unlinked(pair1: tuple[Fraction, Fraction], pair2: tuple[Fraction, Fraction]) -> bool:
    """True if the two chords {a,b}, {c,d} do not cross inside the disk.

    Chords sharing an endpoint never cross."""
    a, b = sorted(map(mod1, pair1))
    c, d = sorted(map(mod1, pair2))
    if {a, b} & {c, d}:
        return True
    c_in = a < c < b
    d_in = a < d < b
    return c_in == d_in
