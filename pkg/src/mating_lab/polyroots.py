"""Simultaneous polynomial root finding (Aberth-Ehrlich iteration)."""

from __future__ import annotations

import numpy as np

RESIDUAL_TARGET = 1e-14
MAX_SWEEPS = 400


class RootFindingError(Exception):
    pass


def polyval_with_derivative(coeffs: np.ndarray, z: np.ndarray):
    """Horner evaluation of p and p' for coeffs[k] the z^k coefficient."""
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for c in coeffs[::-1]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def all_roots(coeffs, seed: int = 2718) -> np.ndarray:
    """All complex roots of sum_k coeffs[k] z^k, by Aberth-Ehrlich iteration.

    Starts from a slightly jittered ring inside the Cauchy root bound; the
    jitter RNG is seeded so results are deterministic.
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.size == 0 or np.all(c == 0):
        raise RootFindingError("zero polynomial")
    # strip trailing zero coefficients (they only lower the degree)
    deg = c.size - 1
    while deg > 0 and c[deg] == 0:
        deg -= 1
    c = c[: deg + 1]
    if deg == 0:
        return np.zeros(0, dtype=complex)
    if deg == 1:
        return np.array([-c[0] / c[1]])

    bound = 1.0 + float(np.max(np.abs(c[:-1] / c[-1])))
    rng = np.random.default_rng(seed)
    angles = 2.0 * np.pi * (np.arange(deg) + 0.25) / deg + 0.2 * rng.random(deg)
    z = 0.7 * bound * np.exp(1j * angles)

    scale = float(np.max(np.abs(c)))
    ok = False
    for _ in range(MAX_SWEEPS):
        p, dp = polyval_with_derivative(c, z)
        newton = np.where(dp != 0, p / np.where(dp == 0, 1, dp), 0.1 + 0.1j)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        sums = inv.sum(axis=1)
        denom = 1.0 - newton * sums
        step = np.where(np.abs(denom) > 1e-300, newton / denom, newton)
        z = z - step
        if np.max(np.abs(step)) < 1e-15 * (1.0 + np.max(np.abs(z))):
            ok = True
            break
    p, _ = polyval_with_derivative(c, z)
    zmax = np.maximum(1.0, np.abs(z)) ** deg
    if not ok and np.max(np.abs(p) / (scale * zmax)) > RESIDUAL_TARGET:
        raise RootFindingError("Aberth iteration did not converge")
    return z
