import numpy as np
import pytest

from mating_lab.polyroots import RootFindingError, all_roots


def sorted_c(arr):
    return np.sort_complex(np.asarray(arr, dtype=complex))


def test_quadratic():
    # z^2 - 3z + 2
    roots = all_roots([2, -3, 1])
    assert np.allclose(sorted_c(roots), [1, 2])


def test_roots_of_unity():
    n = 11
    coeffs = np.zeros(n + 1)
    coeffs[0], coeffs[n] = -1, 1
    roots = all_roots(coeffs)
    assert np.max(np.abs(np.abs(roots) - 1)) < 1e-12
    assert np.max(np.abs(np.sort(np.angle(roots) % (2 * np.pi)) - 2 * np.pi * np.arange(n) / n)) < 1e-10


def test_matches_numpy_on_random_polynomials():
    rng = np.random.default_rng(5)
    for deg in (3, 5, 9, 16):
        coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        mine = sorted_c(all_roots(coeffs))
        ref = sorted_c(np.roots(coeffs[::-1]))
        assert np.max(np.abs(mine - ref)) < 1e-8


def test_deterministic():
    coeffs = [1, 2.5, -0.5j, 1]
    assert np.array_equal(all_roots(coeffs), all_roots(coeffs))


def test_zero_polynomial_rejected():
    with pytest.raises(RootFindingError):
        all_roots([0, 0, 0])


def test_linear():
    assert np.allclose(all_roots([3, -1.5]), [2.0])
