"""Escape potentials, external-ray tracing, and ray landing.

Rays are traced on a geometric ladder of potentials: the sample of the
theta-ray at potential g pulls back, through an anti-holomorphic Newton
solve, from the sample of the (-d*theta)-ray at potential d*g.  Rational
angles have finite forward orbits, so one table per target covers every ray
the orbit needs.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import antipoly, sigma
from .angles import md_step, mod1

START_LOG_POTENTIAL = 8.0
FLOOR_LOG_POTENTIAL = 1e-60   # deep floor: cusp landings converge like a power
STEPS_PER_DIVISION = 4
ESCAPE_RADIUS = 1e6
LANDING_TAIL = 12
LANDING_GIVE_UP = 1e-2


class RayError(Exception):
    pass


class BranchJumpError(RayError):
    """Newton pullback jumped to a different inverse branch."""


class NoConvergenceError(RayError):
    pass


class NotConvergedError(RayError):
    """Landing extrapolation tail did not settle."""


class SchwarzDynamics:
    """The Schwarz reflection of a family member, as a traceable target."""

    def __init__(self, f: sigma.SigmaMap):
        self.f = f
        self.degree = f.degree
        # first-order coefficient of the escape coordinate at infinity
        self.seed_scale = f.degree ** (1.0 / (f.degree - 1)) * cmath.exp(
            1j * math.pi / (f.degree + 1)
        )

    def apply(self, z: complex, state=None):
        value, w = sigma.schwarz_with_pullback(self.f, z, state)
        return value, w

    def dbar(self, z: complex, state=None) -> complex:
        w = state if state is not None else sigma.invert_exterior(self.f, z)
        return sigma.schwarz_dbar(self.f, z, w)


class AntiPolyDynamics:
    """A monic anti-polynomial as a traceable target."""

    def __init__(self, p: antipoly.AntiPoly):
        if not p.monic:
            raise ValueError("ray tracing expects a monic anti-polynomial")
        self.p = p
        self.degree = p.degree
        self.seed_scale = 1.0 + 0.0j

    def apply(self, z: complex, state=None):
        return antipoly.apply(self.p, z), None

    def dbar(self, z: complex, state=None) -> complex:
        return antipoly.dbar(self.p, z)


@dataclass
class RayTrace:
    angle: Fraction
    samples: list[tuple[float, complex]]  # (log-potential, point), decreasing
    landing: tuple[complex, float] | None = None


@dataclass
class RayTracer:
    """Shared ladder of ray samples for one target."""

    dynamics: object
    start: float = START_LOG_POTENTIAL
    floor: float = FLOOR_LOG_POTENTIAL
    steps_per_division: int = STEPS_PER_DIVISION
    _table: dict = field(default_factory=dict, repr=False)
    _state: dict = field(default_factory=dict, repr=False)

    def potentials(self) -> list[float]:
        d, s = self.dynamics.degree, self.steps_per_division
        count = math.ceil(s * math.log(self.start / self.floor) / math.log(d)) + 1
        return [self.start * d ** (-m / s) for m in range(count)]

    def trace(self, theta: Fraction) -> RayTrace:
        theta = mod1(theta)
        ladder = self.potentials()
        self._extend(theta, len(ladder))
        return RayTrace(theta, list(zip(ladder, self._table[theta])))

    def _orbit(self, theta: Fraction) -> list[Fraction]:
        d = self.dynamics.degree
        orbit, t = [], theta
        while t not in orbit:
            orbit.append(t)
            t = md_step(d, t)
        return orbit

    def _seed(self, theta: Fraction, g: float) -> complex:
        u = cmath.exp(g + 2j * math.pi * float(theta))
        return self.dynamics.seed_scale * u

    def _extend(self, theta: Fraction, levels: int) -> None:
        d, s = self.dynamics.degree, self.steps_per_division
        ladder = self.potentials()
        orbit = self._orbit(theta)
        for alpha in orbit:
            self._table.setdefault(alpha, [])
            self._state.setdefault(alpha, None)
        start_level = min(len(self._table[a]) for a in orbit)
        for m in range(start_level, levels):
            for alpha in orbit:
                col = self._table[alpha]
                if len(col) > m:
                    continue
                if m < s:
                    col.append(self._seed(alpha, ladder[m]))
                    continue
                target = self._table[md_step(d, alpha)][m - s]
                z = self._pull(alpha, target, col[m - 1], ladder[m])
                step = abs(z - col[m - 1])
                if m >= 2:
                    expected = abs(col[m - 1] - col[m - 2])
                    if step > 10.0 * expected + 1e-9:
                        raise BranchJumpError(
                            f"ray {alpha}: step {step:.3g} vs expected {expected:.3g} "
                            f"at potential {ladder[m]:.3g}"
                        )
                col.append(z)

    def _pull(self, alpha: Fraction, target: complex, seed: complex, g: float) -> complex:
        """Solve map(z) = target near seed by anti-holomorphic Newton."""
        z = seed
        state = self._state.get(alpha)
        val, state = self.dynamics.apply(z, state)
        res = abs(val - target)
        for _ in range(80):
            if res < 1e-12 * (1.0 + abs(target)):
                self._state[alpha] = state
                return z
            deriv = self.dynamics.dbar(z, state)
            if abs(deriv) < 1e-30:
                raise NoConvergenceError(f"vanishing derivative on ray {alpha}")
            delta = ((target - val) / deriv).conjugate()
            for _ in range(24):
                z_new = z + delta
                try:
                    val_new, state_new = self.dynamics.apply(z_new, state)
                except sigma.SigmaError:
                    delta *= 0.5
                    continue
                if abs(val_new - target) <= res or abs(delta) < 1e-16 * (1 + abs(z)):
                    break
                delta *= 0.5
            else:
                raise NoConvergenceError(
                    f"damping failed on ray {alpha} at potential {g}"
                )
            z, val, state = z_new, val_new, state_new
            res = abs(val - target)
        raise NoConvergenceError(f"pullback stalled on ray {alpha} at potential {g}")


def trace_ray(
    dynamics,
    theta: Fraction,
    start: float = START_LOG_POTENTIAL,
    floor: float = FLOOR_LOG_POTENTIAL,
    steps_per_division: int = STEPS_PER_DIVISION,
) -> RayTrace:
    """Trace one external ray (fresh ladder; use RayTracer to share work)."""
    tracer = RayTracer(dynamics, start, floor, steps_per_division)
    return tracer.trace(theta)


def landing(ray: RayTrace) -> tuple[complex, float]:
    """Landing point by extrapolating the sample tail.

    Parabolic landings (cusps, double points) approach like inverse powers
    of the step index, so the tail is run through a small Richardson ladder
    in those powers; the column whose index-scaled self-consistency is best
    wins, and that estimate is returned as the confidence.  Converged
    (repelling) tails pass through untouched.
    """
    if not ray.samples or ray.samples[-1][0] > 1e-6:
        raise NotConvergedError("ray was not traced down to potential 1e-6")
    pts = [z for _, z in ray.samples[-LANDING_TAIL:]]
    if len(pts) < 3:
        raise NotConvergedError("not enough samples to extrapolate")
    first = len(ray.samples) - len(pts)
    cols = [pts]
    indices = list(range(first, first + len(pts)))
    for k in range(1, 5):
        prev = cols[-1]
        if len(prev) < 2:
            break
        nxt = []
        for i in range(len(prev) - 1):
            w1 = float(indices[i]) ** k
            w2 = float(indices[i + 1]) ** k
            nxt.append((w2 * prev[i + 1] - w1 * prev[i]) / (w2 - w1))
        cols.append(nxt)
        indices = indices[1:]
    scale = float(len(ray.samples))
    point, confidence = pts[-1], float("inf")
    for col in cols:
        if len(col) < 2:
            continue
        est = scale * abs(col[-1] - col[-2])
        if est < confidence:
            point, confidence = col[-1], est
    if confidence > LANDING_GIVE_UP:
        raise NotConvergedError(f"extrapolation tail estimate {confidence:.3g}")
    ray.landing = (point, confidence)
    return point, confidence


def potential(dynamics, z: complex, max_iter: int = 256) -> float:
    """Escape potential lim log|iter^n(z)| / d^n; 0 when no escape is seen."""
    d = dynamics.degree
    state = None
    scale = 1.0
    for _ in range(max_iter):
        if abs(z) > ESCAPE_RADIUS:
            return math.log(abs(z)) * scale
        try:
            z, state = dynamics.apply(z, state)
        except (sigma.SigmaError, OverflowError):
            return 0.0
        scale /= d
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            return 0.0
    return 0.0


@lru_cache(maxsize=64)
def _zero_ray_tracer(f: sigma.SigmaMap) -> RayTracer:
    return RayTracer(SchwarzDynamics(f))


def zero_ray_landing(f: sigma.SigmaMap) -> complex:
    """Landing point of the 0-ray of the Schwarz reflection (labels cusp 1)."""
    ray = _zero_ray_tracer(f).trace(Fraction(0))
    return landing(ray)[0]
