"""Anti-holomorphic polynomials p(w) = q(conj w) and their fixed points."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import polyroots

FIXED_POINT_TOL = 1e-8
MAX_FIXED_DEGREE = 8


class AntiPolyError(Exception):
    pass


class NotCriticallyFixedError(AntiPolyError):
    pass


@dataclass(frozen=True)
class AntiPoly:
    """Degree-d anti-polynomial with ascending coefficients c_0 .. c_d of the
    holomorphic part: p(w) = sum c_k conj(w)^k."""

    coeffs: tuple[complex, ...]

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        if len(coeffs) < 2 or coeffs[-1] == 0:
            raise ValueError("leading coefficient must be nonzero, degree >= 1")
        for c in coeffs:
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError("non-finite coefficient")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def monic(self) -> bool:
        return abs(self.coeffs[-1] - 1.0) < 1e-14

    @classmethod
    def power_map(cls, d: int) -> "AntiPoly":
        """p(w) = conj(w)^d."""
        return cls((0.0,) * d + (1.0,))

    def to_json(self) -> dict:
        return {"d": self.degree, "c": [[c.real, c.imag] for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "AntiPoly":
        coeffs = tuple(complex(re, im) for re, im in data["c"])
        if len(coeffs) != int(data["d"]) + 1:
            raise ValueError("coefficient count does not match the declared degree")
        return cls(coeffs)


def apply(p: AntiPoly, w):
    """p(w); works on scalars and numpy arrays."""
    wc = np.conjugate(w)
    val = 0.0
    for c in p.coeffs[::-1]:
        val = val * wc + c
    return val


def dbar(p: AntiPoly, w):
    """The anti-holomorphic derivative dp/d(conj w) = q'(conj w)."""
    wc = np.conjugate(w)
    val = 0.0
    for k in range(p.degree, 0, -1):
        val = val * wc + k * p.coeffs[k]
    return val


def critical_points(p: AntiPoly) -> list[complex]:
    """Finite critical points: conjugates of the roots of q'."""
    dcoeffs = [k * p.coeffs[k] for k in range(1, p.degree + 1)]
    return [complex(z).conjugate() for z in polyroots.all_roots(dcoeffs)]


def is_critically_fixed(p: AntiPoly, tol: float = FIXED_POINT_TOL) -> bool:
    return all(abs(apply(p, c) - c) <= tol for c in critical_points(p))


def fixed_points(p: AntiPoly) -> list[complex]:
    """All solutions of p(z) = z.

    Roots of the holomorphic degree-d^2 polynomial p(p(z)) - z, filtered by
    the fixed-point residual and deduplicated.
    """
    if p.degree > MAX_FIXED_DEGREE:
        raise AntiPolyError(f"degree {p.degree} exceeds bound {MAX_FIXED_DEGREE}")
    q = np.asarray(p.coeffs, dtype=complex)
    q_star = np.conjugate(q)
    # q(q_star(z)) by coefficient composition
    comp = np.zeros(1, dtype=complex)
    power = np.ones(1, dtype=complex)
    for c in q:
        comp = _poly_add(comp, c * power)
        power = np.convolve(power, q_star)
    comp = _poly_add(comp, np.array([0.0, -1.0], dtype=complex))  # minus z
    roots = polyroots.all_roots(comp)
    fixed = [complex(z) for z in roots if abs(apply(p, complex(z)) - complex(z)) < FIXED_POINT_TOL]
    out: list[complex] = []
    for z in sorted(fixed, key=lambda v: (round(v.real, 12), round(v.imag, 12))):
        if all(abs(z - prev) > FIXED_POINT_TOL for prev in out):
            out.append(z)
    return out


def _poly_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = max(a.size, b.size)
    out = np.zeros(n, dtype=complex)
    out[: a.size] += a
    out[: b.size] += b
    return out
