import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from mating_lab import sigma
from mating_lab.sigma import (
    NoConvergenceError,
    NotExteriorError,
    Region,
    SigmaMap,
    WrongCuspCountError,
    anatomy,
    angled_tree,
    boundary_point,
    droplet_decomposition,
    evaluate,
    find_cusps,
    find_double_points,
    invert_exterior,
    membership_exterior,
    schwarz,
    schwarz_dbar,
)

F0 = SigmaMap.base(3)
WORKED = SigmaMap(3, (-2 / 3, 0, -1 / 3))  # one boundary double point (at 0)


def test_coefficient_gate():
    with pytest.raises(ValueError):
        SigmaMap(3, (0, 0, -0.25))
    with pytest.raises(ValueError):
        SigmaMap(1, (-1.0,))


def test_json_roundtrip():
    f = SigmaMap(4, (0.1 + 0.2j, 0, 0, -0.25))
    assert SigmaMap.from_json(f.to_json()) == f


def test_eval_base_map():
    value, deriv = evaluate(F0, 2.0 + 0j)
    assert value == pytest.approx(47 / 24)
    assert deriv == pytest.approx(1 + 1 / 16)  # f0'(z) = 1 + 1/z^4


def test_eval_at_distinguished_direction():
    # f0 maps (1+1/d) w0 with w0 = e^{i pi/(d+1)} for every degree
    for d in range(2, 8):
        f = SigmaMap.base(d)
        w0 = cmath.exp(1j * math.pi / (d + 1))
        value, _ = evaluate(f, w0)
        assert abs(value - (1 + 1 / d) * w0) < 1e-12


def test_derivative_matches_finite_difference():
    f = SigmaMap(4, (0.05 - 0.1j, 0.02j, 0, -0.25))
    h = 1e-6
    for z in (1.7 + 0.3j, -2 + 1j, 0.4 - 0.8j):
        _, deriv = evaluate(f, z)
        fd = (evaluate(f, z + h)[0] - evaluate(f, z - h)[0]) / (2 * h)
        assert abs(deriv - fd) < 1e-6 * (1 + abs(deriv))


def test_eval_vectorized_matches_scalar():
    z = np.array([2.0 + 0j, 1j * 1.5, -3.0 + 0.25j])
    vals, ders = evaluate(WORKED, z)
    for i, zz in enumerate(z):
        v, dd = evaluate(WORKED, complex(zz))
        assert abs(vals[i] - v) < 1e-14
        assert abs(ders[i] - dd) < 1e-14


def test_invert_exterior_known_value():
    assert abs(invert_exterior(F0, 47 / 24 + 0j) - 2.0) < 1e-10


def test_invert_round_trip_far_circle():
    rng = np.random.default_rng(11)
    for _ in range(20):
        z = 10.0 * cmath.exp(2j * math.pi * rng.random())
        w, _ = evaluate(F0, z)
        assert abs(invert_exterior(F0, w) - z) < 1e-10


def test_invert_rejects_droplet_interior():
    with pytest.raises((NotExteriorError, NoConvergenceError)):
        invert_exterior(F0, 0.05 + 0.02j)


def test_schwarz_pullback_identity():
    assert schwarz(F0, 47 / 24 + 0j) == pytest.approx(-13 / 6)


def test_schwarz_fixes_boundary():
    for theta in np.linspace(0.1, 2 * math.pi, 7):
        w = boundary_point(F0, float(theta))
        assert abs(schwarz(F0, w) - w) < 1e-9


def test_schwarz_identity_grid():
    rng = np.random.default_rng(3)
    for f in (F0, WORKED):
        for _ in range(250):
            w = (1.05 + 2 * rng.random()) * cmath.exp(2j * math.pi * rng.random())
            lhs = schwarz(f, evaluate(f, w)[0])
            rhs = evaluate(f, 1 / w.conjugate())[0]
            assert abs(lhs - rhs) < 1e-9


def test_expansion_law_exact_derivative():
    # |dbar sigma| at f(w) equals |w|^(d-1)
    rng = np.random.default_rng(7)
    for f in (F0, WORKED, SigmaMap.base(4)):
        for _ in range(50):
            w = (1.1 + 1.9 * rng.random()) * cmath.exp(2j * math.pi * rng.random())
            z, _ = evaluate(f, w)
            assert abs(abs(schwarz_dbar(f, z)) - abs(w) ** (f.degree - 1)) < 1e-9 * abs(w) ** (
                f.degree - 1
            )


def test_expansion_law_finite_difference():
    rng = np.random.default_rng(13)
    h = 3e-6
    for _ in range(60):
        w = (1.1 + 1.9 * rng.random()) * cmath.exp(2j * math.pi * rng.random())
        z, _ = evaluate(F0, w)
        guess = w
        fd = (schwarz(F0, z + h, guess) - schwarz(F0, z - h, guess)) / (2 * h)
        assert abs(abs(fd) - abs(w) ** 2) < 1e-5 * abs(w) ** 2


def test_membership():
    assert membership_exterior(F0, 10 + 0j) == Region.EXTERIOR
    assert membership_exterior(F0, 0j) == Region.DROPLET
    assert membership_exterior(F0, boundary_point(F0, 0.3)) == Region.BOUNDARY


def test_membership_against_winding_oracle():
    # coarse-sampled winding number as an independent check
    theta = np.linspace(0, 2 * math.pi, 20000, endpoint=False)
    curve = boundary_point(F0, theta)
    rng = np.random.default_rng(23)
    for _ in range(25):
        w = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        dist = np.min(np.abs(curve - w))
        if dist < 1e-2:
            continue
        inc = np.angle(np.roll(curve - w, -1) / (curve - w))
        winding = round(float(inc.sum()) / (2 * math.pi))
        expected = Region.DROPLET if winding != 0 else Region.EXTERIOR
        assert membership_exterior(F0, w) == expected


def test_find_cusps_base_maps():
    for d in (2, 3, 5):
        f = SigmaMap.base(d)
        cusps = find_cusps(f)
        assert len(cusps) == d + 1
        for k in range(d + 1):
            xi_expected = cmath.exp(1j * math.pi * (2 * k + 1) / (d + 1))
            assert abs(cusps.xi[k] - xi_expected) < 1e-10
            assert abs(cusps.zeta[k] - (1 + 1 / d) * xi_expected) < 1e-10


def test_find_cusps_worked_example():
    cusps = find_cusps(WORKED)
    assert len(cusps) == 4
    # preimages satisfy z^4 + (2/3) z^2 + 1 = 0 (all on the unit circle)
    for xi in cusps.xi:
        assert abs(xi**4 + (2 / 3) * xi**2 + 1) < 1e-10
        assert abs(abs(xi) - 1) < 1e-10
    args = [math.atan2(x.imag, x.real) % (2 * math.pi) for x in cusps.xi]
    gaps = np.diff(args)
    assert np.all(gaps[gaps != 0] > 0)  # counter-clockwise labels


def test_find_cusps_rejects_off_circle_critical_points():
    bad = SigmaMap(3, (0.8, 0, -1 / 3))
    with pytest.raises(WrongCuspCountError):
        find_cusps(bad)


def test_double_points_base_map_empty():
    assert find_double_points(F0) == ()


def test_double_points_worked_example():
    dps = find_double_points(WORKED)
    assert len(dps) == 1
    dp = dps[0]
    assert abs(dp.zeta) < 1e-9  # the pinch point is the origin
    assert abs(boundary_point(WORKED, dp.theta) - boundary_point(WORKED, dp.theta_prime)) < 1e-10
    # real coefficients: parameters symmetric under conjugation
    assert {round(dp.theta, 6), round(dp.theta_prime, 6)} == {0.0, round(math.pi, 6)}


def test_double_points_conjugation_symmetry():
    f = SigmaMap(3, (-0.55, 0, -1 / 3))
    for dp in find_double_points(f):
        t, tp = sorted((dp.theta % (2 * math.pi), dp.theta_prime % (2 * math.pi)))
        assert abs((t + tp) % (2 * math.pi)) < 1e-6 or abs((t + tp) - 2 * math.pi) < 1e-6


def test_decomposition_base_map():
    comps = droplet_decomposition(F0)
    assert len(comps) == 1
    assert comps[0].cusp_labels == (0, 1, 2, 3)
    assert comps[0].j == 1


def test_decomposition_worked_example():
    comps = droplet_decomposition(WORKED)
    assert len(comps) == 2
    assert all(c.j == 0 for c in comps)
    assert all(len(c.cusp_labels) == 2 for c in comps)
    # both components share the single double point
    assert all(c.double_points == (0,) for c in comps)


def test_angled_tree_base():
    tree = angled_tree(F0)
    assert tree.degrees == (3,)
    assert tree.edges == ()
    assert tree.total_degree == 3


def test_angled_tree_worked():
    tree = angled_tree(WORKED)
    assert tree.degrees == (2, 2)
    assert len(tree.edges) == 1
    assert tree.total_degree == 3


def test_angled_tree_validation_synthetic():
    # a 5-gon component with two double points at cyclic positions 0 and 2
    comps = (
        sigma.DropletComponent(0, (("double", 0), ("cusp", 0), ("double", 1), ("cusp", 1), ("cusp", 2))),
        sigma.DropletComponent(1, (("double", 0), ("cusp", 3))),
        sigma.DropletComponent(2, (("double", 1), ("cusp", 4))),
    )
    degrees = tuple(2 + c.j for c in comps)
    assert degrees == (4, 2, 2)
    tree = sigma.AngledTree(
        degrees,
        ((0, 1, 0), (0, 2, 1)),
        {
            (0, 0, 1): 2,
            (0, 1, 0): 3,
        },
    )
    tree.validate()
    assert tree.total_degree == 1 + 3 + 1 + 1
    assert tree.angle(0, 0, 1) == Fraction(2, 5)


def test_anatomy_cached():
    assert anatomy(WORKED) is anatomy(WORKED)
