import math

import numpy as np
import pytest

from vdwmedia.greens import (
    AtomPositions,
    _g_of_p,
    green_on_axis,
    green_p_representation,
    green_rescaled,
    green_single_medium_closed,
    trace_space_brute_force,
    trace_space_integral,
    trace_tensor_product,
)
from vdwmedia.materials import VACUUM, MaterialModel, OscillatorTerm
from vdwmedia.planar_optics import HalfSpacePair
from vdwmedia.quadrature import QuadratureSpec

TIGHT = QuadratureSpec(rel_tol=1e-11)
E = math.e


def random_medium(rng, magnetic=True):
    eps = (OscillatorTerm(rng.uniform(0.2, 4.0), rng.uniform(0.3, 5.0), rng.uniform(0.0, 0.5)),)
    mu = (OscillatorTerm(rng.uniform(0.1, 1.0), rng.uniform(0.3, 3.0)),) if magnetic else ()
    return MaterialModel(eps, mu)


def test_closed_form_vacuum_values():
    g = green_single_medium_closed(1.0, 1.0, 1.0, 1.0)
    assert g.g_par == pytest.approx(3.0 / E, rel=1e-15)
    assert g.g_perp == pytest.approx(-4.0 / E, rel=1e-15)


def test_closed_form_ratio_limits():
    ratios = [abs(g.g_perp / g.g_par) for g in (green_single_medium_closed(1.0, 1.0, 1.0, z) for z in (30.0, 300.0))]
    assert ratios[1] < ratios[0] < 0.1 and ratios[1] < 1e-2
    near = green_single_medium_closed(1.0, 1.0, 1.0, 1e-6)
    assert near.g_perp / near.g_par == pytest.approx(-2.0, rel=1e-5)


def test_numeric_matches_closed_form_single_medium():
    medium = MaterialModel.constant(2.25, 1.3)
    pair = HalfSpacePair(medium, medium)
    n = medium.n_static
    worst = 0.0
    for xi in np.geomspace(1e-2, 1e1, 6):
        for z in np.geomspace(1e-2, 1e1, 6):
            num = green_on_axis(pair, AtomPositions(-0.4 * z, 0.6 * z), xi, TIGHT)
            ref = green_single_medium_closed(n, medium.mu_static, xi, z)
            worst = max(worst, abs(num.g_par / ref.g_par - 1), abs(num.g_perp / ref.g_perp - 1))
    assert worst < 1e-8


def test_vacuum_unit_point_on_axis():
    pair = HalfSpacePair(VACUUM, VACUUM)
    g = green_on_axis(pair, AtomPositions(-0.5, 0.5), 1.0, TIGHT)
    assert g.g_par == pytest.approx(3.0 / E, rel=1e-9)
    assert g.g_perp == pytest.approx(-4.0 / E, rel=1e-9)


def test_mirror_symmetry(dispersive_pair):
    pos = AtomPositions(-0.3, 0.8)
    a = green_on_axis(dispersive_pair, pos, 0.7, TIGHT)
    b = green_on_axis(dispersive_pair.swapped(), pos.mirrored(), 0.7, TIGHT)
    assert b.g_par == pytest.approx(a.g_par, rel=1e-9)
    assert b.g_perp == pytest.approx(a.g_perp, rel=1e-9)


def test_rescaled_static_values():
    pos = AtomPositions(-0.5, 0.5)
    vac = green_rescaled(HalfSpacePair(VACUUM, VACUUM), pos, 0.0)
    assert vac.g_par == 1.0 and vac.g_perp == -2.0
    mixed = green_rescaled(HalfSpacePair(MaterialModel.constant(3.0), VACUUM), pos, 0.0)
    assert mixed.g_par == pytest.approx(0.5, rel=1e-12)


def test_rescaled_continuous_at_zero(dispersive_pair):
    pos = AtomPositions(-0.3, 0.5)
    h0 = green_rescaled(dispersive_pair, pos, 0.0)
    h = green_rescaled(dispersive_pair, pos, 1e-6, TIGHT)
    assert h.g_par == pytest.approx(h0.g_par, rel=1e-4)
    assert h.g_perp == pytest.approx(h0.g_perp, rel=1e-4)


def test_nonretarded_limit_at_least_first_order(dispersive_pair):
    pos = AtomPositions(-0.4, 0.6)
    h0 = green_rescaled(dispersive_pair, pos, 0.0)
    devs = []
    for xi in (1e-2, 1e-3, 1e-4):
        h = green_rescaled(dispersive_pair, pos, xi, TIGHT)
        devs.append(max(abs(h.g_par / h0.g_par - 1), abs(h.g_perp / h0.g_perp - 1)))
    assert devs[0] > devs[1] > devs[2]
    assert devs[1] / devs[2] > 9.0
    assert devs[2] < 1e-3


def test_p_representation_matches_k_form():
    rng = np.random.default_rng(7)
    quad = QuadratureSpec(rel_tol=1e-11)
    worst = 0.0
    for _ in range(50):
        pair = HalfSpacePair(random_medium(rng), random_medium(rng))
        za, zb = -rng.uniform(0.05, 3.0), rng.uniform(0.05, 3.0)
        xi = 10 ** rng.uniform(-1.5, 1.0)
        pos = AtomPositions(za, zb)
        k_form = green_on_axis(pair, pos, xi, quad)
        p_form = green_p_representation(pair, pos, xi, quad)
        worst = max(worst, abs(p_form.g_par / k_form.g_par - 1), abs(p_form.g_perp / k_form.g_perp - 1))
    assert worst < 1e-8


def test_p_kernel_facts(water_like):
    same = HalfSpacePair(water_like, water_like)
    p = np.array([1.0, 1.5, 4.0])
    _, g_perp, s = _g_of_p(same, 0.7, p)
    np.testing.assert_allclose(s, p, rtol=1e-15)
    assert g_perp[0] == 0.0
    denser = HalfSpacePair(MaterialModel.constant(1.0), MaterialModel.constant(4.0))
    _, _, s1 = _g_of_p(denser, 0.7, np.array([1.0]))
    # s(1) = n2/n1 from s = sqrt(p^2 - 1 + n2^2/n1^2)
    assert s1[0] == pytest.approx(2.0, rel=1e-10)


def _e1(x, terms=80):
    """Exponential integral E1 by its convergent power series (fine for x < ~10)."""
    total, term = 0.0, 1.0
    for n in range(1, terms):
        term *= -x / n
        total += term / n
    return -0.5772156649015329 - math.log(x) - total


def test_trace_vacuum_closed_form():
    # xi^4 * trace in vacuum reduces to pi int_xi^inf (4k^2 - 4xi^2 + 2xi^4/k^2) e^{-2ak} dk.
    pair = HalfSpacePair(VACUUM, VACUUM)
    for a, xi in ((1.0, 0.5), (0.3, 2.0), (2.0, 0.2)):
        b = 2.0 * a
        ex = math.exp(-b * xi)
        poly = 4 * ex * (xi * xi / b + 2 * xi / b**2 + 2 / b**3) - 4 * xi * xi * ex / b
        inv_sq = 2 * xi**4 * (ex / xi - b * _e1(b * xi))
        expected = math.pi * (poly + inv_sq)
        got, _, ok = trace_space_integral(pair, -a, xi, TIGHT, rescaled=True)
        assert ok
        assert got == pytest.approx(expected, rel=1e-10)


def test_trace_matches_brute_force(dispersive_pair):
    for za, xi in ((-0.5, 0.8), (-1.5, 0.2)):
        fast, _, _ = trace_space_integral(dispersive_pair, za, xi, QuadratureSpec(rel_tol=1e-10))
        slow, _, _ = trace_space_brute_force(dispersive_pair, za, xi, QuadratureSpec(rel_tol=1e-9))
        assert slow == pytest.approx(fast, rel=1e-6)


def test_trace_decreases_with_distance(dispersive_pair):
    vals = [trace_space_integral(dispersive_pair, -d, 0.5)[0] for d in (0.2, 0.5, 1.0, 2.0)]
    assert all(a > b > 0 for a, b in zip(vals, vals[1:]))


def test_trace_independent_of_azimuth_and_real(dispersive_pair):
    ref, imag = trace_tensor_product(dispersive_pair, 0.6, 1.3, -0.4, 0.2, 0.0)
    assert abs(imag) < 1e-14 * abs(ref)
    for phi in (0.3, 1.2, 2.9):
        assert trace_tensor_product(dispersive_pair, 0.6, 1.3, -0.4, 0.2, phi)[0] == pytest.approx(ref, rel=1e-13)


def test_input_validation(dispersive_pair):
    with pytest.raises(ValueError):
        AtomPositions(0.1, 0.5)
    with pytest.raises(ValueError):
        green_on_axis(dispersive_pair, AtomPositions(-0.1, 0.5), 0.0)
    with pytest.raises(ValueError):
        trace_space_integral(dispersive_pair, 0.5, 1.0)
