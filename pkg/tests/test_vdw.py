import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vdwmedia.greens import AtomPositions
from vdwmedia.materials import VACUUM, AtomModel, MaterialModel, OscillatorTerm
from vdwmedia.planar_optics import HalfSpacePair
from vdwmedia.quadrature import QuadratureSpec
from vdwmedia.vdw import (
    InterfaceSystem,
    london_integral_analytic,
    nonretarded_ratio_scan,
    ratio_scan,
    vdw_full,
    vdw_nonretarded,
    vdw_retarded,
    vdw_single_medium,
)

GOLDEN = Path(__file__).parent / "golden" / "ratio_scan_endpoints.json"
UNIT = AtomModel(1.0, 1.0)


def vacuum_system(z, frac=0.5):
    return InterfaceSystem(HalfSpacePair(VACUUM, VACUUM), UNIT, UNIT, AtomPositions(-(1 - frac) * z, frac * z))


def test_london_limit_vacuum():
    z = 1e-3
    london = -0.75 / z**6
    assert vdw_nonretarded(vacuum_system(z), QuadratureSpec(rel_tol=1e-11)).value == pytest.approx(london, rel=1e-9)
    assert vdw_full(vacuum_system(z)).value == pytest.approx(london, rel=1e-2)


def test_london_integral_analytic_matches_quadrature():
    a, b = AtomModel(2.0, 1.0), AtomModel(0.5, 3.0)
    sys = InterfaceSystem(HalfSpacePair(VACUUM, VACUUM), a, b, AtomPositions(-1.0, 1.0))
    numeric = vdw_nonretarded(sys, QuadratureSpec(rel_tol=1e-11)).value
    assert numeric == pytest.approx(-3.0 / (math.pi * 2.0**6) * london_integral_analytic(a, b), rel=1e-9)


def test_retarded_limit_vacuum():
    z = 1e3
    cp = -23.0 / (4.0 * math.pi * z**7)
    assert vdw_full(vacuum_system(z)).value == pytest.approx(cp, rel=2e-2)
    assert vdw_retarded(vacuum_system(z), QuadratureSpec(rel_tol=1e-10)).value == pytest.approx(cp, rel=1e-8)


def test_retarded_single_medium_reduction():
    medium = MaterialModel.constant(2.5)
    sys = InterfaceSystem(HalfSpacePair(medium, medium), UNIT, UNIT, AtomPositions(-3.0, 7.0))
    ref = vdw_single_medium(medium.n_static, medium.eps_static, UNIT, UNIT, 10.0).value
    assert vdw_retarded(sys, QuadratureSpec(rel_tol=1e-9)).value == pytest.approx(ref, rel=1e-4)


def test_single_medium_closed_forms():
    vac = vdw_single_medium(1.0, 1.0, UNIT, UNIT, 2.0).value
    assert vac == pytest.approx(-23.0 / (4 * math.pi * 2.0**7), rel=1e-15)
    assert vdw_single_medium(2.0, 4.0, UNIT, UNIT, 2.0).value == pytest.approx(vac / 32.0, rel=1e-15)
    e1, e2 = 2.0, 5.0
    u1 = vdw_single_medium(math.sqrt(e1), e1, UNIT, UNIT, 3.0).value
    u2 = vdw_single_medium(math.sqrt(e2), e2, UNIT, UNIT, 3.0).value
    assert u2 / u1 == pytest.approx((e1 / e2) ** 2.5, rel=1e-12)


def test_nonretarded_screening_factor_four():
    def u(e1, e2):
        pair = HalfSpacePair(MaterialModel.constant(e1), MaterialModel.constant(e2))
        return vdw_nonretarded(InterfaceSystem(pair, UNIT, UNIT, AtomPositions(-0.01, 0.02))).value

    assert u(1.0, 3.0) / u(3.0, 5.0) == pytest.approx(4.0, rel=1e-12)
    values = [abs(u(e, e)) for e in (1.0, 1.5, 2.0, 3.0)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_media_swap_symmetry(water_like, magnetic):
    a, b = AtomModel(1.0, 1.0), AtomModel(0.3, 2.5)
    sys = InterfaceSystem(HalfSpacePair(water_like, magnetic), a, b, AtomPositions(-0.7, 0.4))
    u = vdw_full(sys, QuadratureSpec(rel_tol=1e-8)).value
    assert vdw_full(sys.mirrored(), QuadratureSpec(rel_tol=1e-8)).value == pytest.approx(u, rel=1e-6)


@settings(max_examples=8, deadline=None)
@given(
    s1=st.floats(0.0, 4.0),
    s2=st.floats(0.0, 4.0),
    m2=st.floats(0.0, 1.0),
    za=st.floats(0.05, 5.0),
    zb=st.floats(0.05, 5.0),
)
def test_potential_is_attractive(s1, s2, m2, za, zb):
    pair = HalfSpacePair(
        MaterialModel((OscillatorTerm(s1, 1.2),)), MaterialModel((OscillatorTerm(s2, 0.7),), (OscillatorTerm(m2, 0.4),))
    )
    sys = InterfaceSystem(pair, UNIT, AtomModel(0.5, 2.0), AtomPositions(-za, zb))
    assert vdw_full(sys).value < 0
    assert vdw_nonretarded(sys).value < 0
    assert vdw_retarded(sys).value < 0


def test_asymptotic_matching_over_three_decades(water_like):
    pair = HalfSpacePair(water_like, MaterialModel((OscillatorTerm(2.0, 1.5),)))

    def system(z):
        return InterfaceSystem(pair, UNIT, UNIT, AtomPositions(-0.4 * z, 0.6 * z))

    short = [abs(vdw_full(system(z)).value / vdw_nonretarded(system(z)).value - 1) for z in (1e-2, 1e-3, 1e-4)]
    assert short[0] > short[1] > short[2] and short[2] < 1e-4
    q = QuadratureSpec(rel_tol=1e-8)
    long = [abs(vdw_full(system(z), q).value / vdw_retarded(system(z), q).value - 1) for z in (1e2, 1e3, 1e4)]
    assert long[0] > long[1] > long[2] and long[2] < 1e-3


def test_finite_as_atom_b_approaches_interface():
    pair = HalfSpacePair(MaterialModel.constant(2.0), MaterialModel.constant(4.0))
    vals = [
        vdw_retarded(InterfaceSystem(pair, UNIT, UNIT, AtomPositions(-(1 - f), f)), QuadratureSpec(rel_tol=1e-9)).value
        for f in (1e-3, 1e-5, 1e-7)
    ]
    assert np.all(np.isfinite(vals))
    assert vals[2] == pytest.approx(vals[1], rel=1e-4)


@pytest.mark.parametrize("eps2,trend", [(1.0, "up"), (4.0, "down")])
def test_ratio_scan_trends(eps2, trend):
    pair = HalfSpacePair(MaterialModel.constant(2.0), MaterialModel.constant(eps2))
    fr = np.linspace(0.02, 0.98, 13)
    ratios = np.array([r for _, r in ratio_scan(pair, fr)])
    steps = np.diff(ratios)
    assert np.all(steps > 0) if trend == "up" else np.all(steps < 0)
    flat = np.array([r for _, r in nonretarded_ratio_scan(pair, fr[::3])])
    np.testing.assert_allclose(flat, 1.0, atol=1e-2)


def test_ratio_scan_golden_endpoints():
    golden = json.loads(GOLDEN.read_text())["cases"]
    for case in golden.values():
        pair = HalfSpacePair(MaterialModel.constant(case["eps1"]), MaterialModel.constant(case["eps2"]))
        got = ratio_scan(pair, case["z_b_over_Z"], quad=QuadratureSpec(rel_tol=1e-10))
        np.testing.assert_allclose([r for _, r in got], case["ratio"], rtol=1e-8)


def test_ratio_scan_rejects_bad_fraction():
    with pytest.raises(ValueError):
        ratio_scan(HalfSpacePair(VACUUM, VACUUM), [1.0])
